//! Benchmark families, the experiment harness and result tables.
//!
//! Two radius families are supported, `r_i = i` and `r_i = sqrt(i)`, each in
//! a fixed form (five copies of every radius `f(1)..f(n0)`) and a random form
//! (a uniform copy count per radius). Bin radii come from a per-`n0` table
//! or, when the table has no entry, from an optional target density.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asags::{self, AnnealParams, RunStats};
use crate::error::{CbppError, Result};
use crate::model::{self, Family, Instance, Item, Metrics, Solution};
use crate::rng::{instance_stream, split_seed, stream_rng};
use crate::stats::{paired_t_test, TTestResult, TTestVariant};
use crate::toa;

pub const FIXED_COPIES: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Fixed,
    Random,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Fixed => "fixed",
            Mode::Random => "random",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn default_copies() -> (u32, u32) {
    (2, 10)
}

/// One benchmark set: a family, a mode and a range of base sizes `n0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub family: Family,
    pub mode: Mode,
    /// Inclusive `[lo, hi]`; `lo > hi` is an empty range.
    pub n0_range: (u32, u32),
    /// Bin radius per `n0`, keyed by the decimal `n0`.
    #[serde(default)]
    pub bin_radius: BTreeMap<String, f64>,
    /// Fallback for `n0` missing from the table: `R = ceil(sqrt(Σr² / density))`.
    #[serde(default)]
    pub auto_radius_density: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Inclusive copy-count range for random mode.
    #[serde(default = "default_copies")]
    pub copies_range: (u32, u32),
}

impl BenchConfig {
    pub fn n0_values(&self) -> impl Iterator<Item = u32> {
        self.n0_range.0..=self.n0_range.1
    }

    pub fn check(&self) -> Result<()> {
        if self.family == Family::Custom {
            return Err(CbppError::InvalidParams(
                "benchmark family must be r_eq_i or r_eq_sqrt_i".into(),
            ));
        }
        if self.n0_range.0 == 0 {
            return Err(CbppError::InvalidParams("n0 starts at 1".into()));
        }
        if self.copies_range.0 < 1 || self.copies_range.0 > self.copies_range.1 {
            return Err(CbppError::InvalidParams(format!(
                "copies range {:?} must satisfy 1 <= lo <= hi",
                self.copies_range
            )));
        }
        if let Some(d) = self.auto_radius_density {
            if !(d > 0.0 && d.is_finite()) {
                return Err(CbppError::InvalidParams(format!(
                    "auto radius density must be in (0, 1], got {d}"
                )));
            }
        }
        for (key, &r) in &self.bin_radius {
            if key.parse::<u32>().is_err() || !(r > 0.0 && r.is_finite()) {
                return Err(CbppError::InvalidParams(format!(
                    "bad bin radius entry {key} = {r}"
                )));
            }
        }
        for n0 in self.n0_values() {
            if self.radius_entry(n0).is_none() && self.auto_radius_density.is_none() {
                return Err(CbppError::MissingBinRadius(n0));
            }
        }
        Ok(())
    }

    fn radius_entry(&self, n0: u32) -> Option<f64> {
        self.bin_radius.get(&n0.to_string()).copied()
    }

    pub fn instance_name(&self, n0: u32) -> String {
        format!("{}-{}-n0_{}", self.family, self.mode, n0)
    }
}

/// `ceil(sqrt(Σr² / density))`.
pub fn radius_for_density(radii: &[f64], density: f64) -> f64 {
    let area: f64 = radii.iter().map(|r| r * r).sum();
    (area / density).sqrt().ceil()
}

/// Build the instance for base size `n0`. Fixed mode is pure in
/// `(family, n0)`, random mode in `(family, n0, seed)`.
pub fn generate_instance(cfg: &BenchConfig, n0: u32) -> Result<Instance> {
    if n0 < cfg.n0_range.0 || n0 > cfg.n0_range.1 {
        return Err(CbppError::InvalidParams(format!(
            "n0 = {n0} outside {:?}",
            cfg.n0_range
        )));
    }
    let base = |i: u32| {
        cfg.family
            .radius_of(i)
            .ok_or_else(|| CbppError::InvalidParams("custom family has no generator".into()))
    };
    let mut radii = Vec::new();
    match cfg.mode {
        Mode::Fixed => {
            for i in 1..=n0 {
                let r = base(i)?;
                radii.extend(std::iter::repeat_n(r, FIXED_COPIES as usize));
            }
        }
        Mode::Random => {
            let mut rng = stream_rng(cfg.seed, instance_stream(cfg.family, n0));
            let (lo, hi) = cfg.copies_range;
            for i in 1..=n0 {
                let r = base(i)?;
                let copies = rng.gen_range(lo..=hi);
                radii.extend(std::iter::repeat_n(r, copies as usize));
            }
        }
    }
    let bin_radius = match (cfg.radius_entry(n0), cfg.auto_radius_density) {
        (Some(r), _) => r,
        (None, Some(d)) => radius_for_density(&radii, d),
        (None, None) => return Err(CbppError::MissingBinRadius(n0)),
    };
    let items = radii
        .into_iter()
        .enumerate()
        .map(|(i, radius)| Item { id: i + 1, radius })
        .collect();
    Instance::new(
        cfg.instance_name(n0),
        bin_radius,
        items,
        cfg.family,
        Some(n0),
        (cfg.mode == Mode::Random).then_some(cfg.seed),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "TOA")]
    Toa,
    #[serde(rename = "ASAGS")]
    Asags,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Toa => "TOA",
            Algorithm::Asags => "ASAGS",
        }
    }

    /// Lower-case tag used in file names.
    pub fn tag(&self) -> &'static str {
        match self {
            Algorithm::Toa => "toa",
            Algorithm::Asags => "asags",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "TOA" | "toa" => Some(Algorithm::Toa),
            "ASAGS" | "asags" | "ASA-GS" => Some(Algorithm::Asags),
            _ => None,
        }
    }
}

/// Which solvers an experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Algorithms {
    pub toa: bool,
    pub asags: bool,
}

impl Algorithms {
    pub const BOTH: Algorithms = Algorithms {
        toa: true,
        asags: true,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub family: Family,
    pub mode: Mode,
    pub n0: u32,
    pub n: usize,
    pub algorithm: Algorithm,
    /// Densities of the used bins, densest first.
    pub densities: Vec<f64>,
    pub f_obj: f64,
    pub runtime: Duration,
}

/// A solver's output on one instance.
#[derive(Debug, Clone)]
pub struct AlgoRun {
    pub solution: Solution,
    pub metrics: Metrics,
    pub runtime: Duration,
    pub stats: Option<RunStats>,
}

#[derive(Debug, Clone)]
pub struct InstanceRun {
    pub instance: Instance,
    pub toa: Option<AlgoRun>,
    pub asags: Option<AlgoRun>,
}

impl InstanceRun {
    pub fn rows(&self, cfg: &BenchConfig) -> Vec<ExperimentRow> {
        let mut rows = Vec::new();
        for (alg, run) in [(Algorithm::Asags, &self.asags), (Algorithm::Toa, &self.toa)] {
            if let Some(run) = run {
                let mut densities = run.metrics.densities.clone();
                densities.sort_by(|a, b| b.total_cmp(a));
                rows.push(ExperimentRow {
                    family: cfg.family,
                    mode: cfg.mode,
                    n0: self.instance.n0.unwrap_or(0),
                    n: self.instance.len(),
                    algorithm: alg,
                    densities,
                    f_obj: run.metrics.f_obj,
                    runtime: run.runtime,
                });
            }
        }
        rows
    }
}

fn checked(instance: &Instance, solution: Solution, alg: Algorithm) -> Result<(Solution, Metrics)> {
    let report = model::validate(&solution, instance, instance.tolerance());
    if !report.is_feasible() {
        return Err(CbppError::Infeasible {
            instance: format!("{} ({})", instance.name, alg.as_str()),
            details: report.to_string(),
        });
    }
    let metrics = model::objective(&solution, instance)?;
    Ok((solution, metrics))
}

/// Run the selected solvers on one instance. The annealer gets the seed
/// `split_seed(params.seed, n0)`.
pub fn run_instance(instance: &Instance, params: &AnnealParams, algorithms: Algorithms) -> Result<InstanceRun> {
    let toa = if algorithms.toa {
        let started = Instant::now();
        let solution = toa::construct(instance)?;
        let runtime = started.elapsed();
        let (solution, metrics) = checked(instance, solution, Algorithm::Toa)?;
        Some(AlgoRun {
            solution,
            metrics,
            runtime,
            stats: None,
        })
    } else {
        None
    };
    let asags = if algorithms.asags {
        let seeded = AnnealParams {
            seed: split_seed(params.seed, instance.n0.unwrap_or(0) as u64),
            ..params.clone()
        };
        let started = Instant::now();
        let (solution, stats) = asags::run(instance, &seeded)?;
        let runtime = started.elapsed();
        let (solution, metrics) = checked(instance, solution, Algorithm::Asags)?;
        Some(AlgoRun {
            solution,
            metrics,
            runtime,
            stats: Some(stats),
        })
    } else {
        None
    };
    Ok(InstanceRun {
        instance: instance.clone(),
        toa,
        asags,
    })
}

/// Generate and solve every instance of `cfg`, in parallel, ordered by `n0`.
pub fn run_experiment_detailed(
    cfg: &BenchConfig,
    params: &AnnealParams,
    algorithms: Algorithms,
) -> Result<Vec<InstanceRun>> {
    cfg.check()?;
    params.check()?;
    let n0s: Vec<u32> = cfg.n0_values().collect();
    n0s.par_iter()
        .map(|&n0| {
            let instance = generate_instance(cfg, n0)?;
            run_instance(&instance, params, algorithms)
        })
        .collect()
}

pub fn run_experiment(cfg: &BenchConfig, params: &AnnealParams) -> Result<Vec<ExperimentRow>> {
    Ok(run_experiment_detailed(cfg, params, Algorithms::BOTH)?
        .iter()
        .flat_map(|run| run.rows(cfg))
        .collect())
}

/// Paired two-tailed t-test of TOA against ASA-GS objective values, pairing
/// rows by `(family, mode, n0)`.
pub fn compare_algorithms(rows: &[ExperimentRow]) -> Result<TTestResult> {
    let mut toa = BTreeMap::new();
    let mut asa = BTreeMap::new();
    for r in rows {
        let key = (r.family, r.mode, r.n0);
        match r.algorithm {
            Algorithm::Toa => toa.insert(key, r.f_obj),
            Algorithm::Asags => asa.insert(key, r.f_obj),
        };
    }
    let (a, b): (Vec<f64>, Vec<f64>) = toa
        .iter()
        .filter_map(|(k, &ft)| asa.get(k).map(|&fa| (ft, fa)))
        .unzip();
    paired_t_test(&a, &b, TTestVariant::PairedTwoTailed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

fn max_bins(rows: &[ExperimentRow]) -> usize {
    rows.iter().map(|r| r.densities.len()).max().unwrap_or(0)
}

/// Render rows as a results table: identification columns, one density
/// column per bin (densest first, `-` when absent), `F`, and optionally the
/// runtime in seconds.
pub fn emit_tables(rows: &[ExperimentRow], format: TableFormat, include_runtime: bool) -> String {
    let bins = max_bins(rows);
    let mut header: Vec<String> = ["family", "mode", "n0", "n", "alg"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((1..=bins).map(|i| format!("bin{i}")));
    header.push("F".into());
    if include_runtime {
        header.push("t".into());
    }

    let lines: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut cells = vec![
                r.family.to_string(),
                r.mode.to_string(),
                r.n0.to_string(),
                r.n.to_string(),
                r.algorithm.as_str().to_string(),
            ];
            cells.extend((0..bins).map(|i| match r.densities.get(i) {
                Some(d) => format!("{d:.2}"),
                None => "-".into(),
            }));
            cells.push(format!("{:.2}", r.f_obj));
            if include_runtime {
                cells.push(format!("{:.3}", r.runtime.as_secs_f64()));
            }
            cells
        })
        .collect();

    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            let _ = writeln!(out, "{}", header.join(","));
            for cells in &lines {
                let _ = writeln!(out, "{}", cells.join(","));
            }
        }
        TableFormat::Markdown => {
            let _ = writeln!(out, "| {} |", header.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
            for cells in &lines {
                let _ = writeln!(out, "| {} |", cells.join(" | "));
            }
        }
    }
    out
}

/// Parse a CSV table written by [`emit_tables`].
pub fn parse_csv_table(text: &str) -> Result<Vec<ExperimentRow>> {
    let bad = |msg: String| CbppError::InvalidParams(format!("results table: {msg}"));
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| bad("missing header".into()))?
        .split(',')
        .collect();
    let has_runtime = header.last() == Some(&"t");
    let bins = header.iter().filter(|h| h.starts_with("bin")).count();
    let expected = 5 + bins + 1 + usize::from(has_runtime);
    if header.len() != expected {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let parse_family = |s: &str| match s {
        "r_eq_i" => Ok(Family::REqI),
        "r_eq_sqrt_i" => Ok(Family::REqSqrtI),
        "custom" => Ok(Family::Custom),
        _ => Err(bad(format!("unknown family {s}"))),
    };
    let parse_f64 = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("{s}: {e}")));

    let mut rows = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != expected {
            return Err(bad(format!("row has {} cells, expected {expected}", cells.len())));
        }
        let mode = match cells[1] {
            "fixed" => Mode::Fixed,
            "random" => Mode::Random,
            other => return Err(bad(format!("unknown mode {other}"))),
        };
        let mut densities = Vec::new();
        for cell in &cells[5..5 + bins] {
            if *cell != "-" {
                densities.push(parse_f64(cell)?);
            }
        }
        let runtime = if has_runtime {
            Duration::from_secs_f64(parse_f64(cells[expected - 1])?)
        } else {
            Duration::ZERO
        };
        rows.push(ExperimentRow {
            family: parse_family(cells[0])?,
            mode,
            n0: cells[2].parse().map_err(|e| bad(format!("n0: {e}")))?,
            n: cells[3].parse().map_err(|e| bad(format!("n: {e}")))?,
            algorithm: Algorithm::parse(cells[4])
                .ok_or_else(|| bad(format!("unknown algorithm {}", cells[4])))?,
            densities,
            f_obj: parse_f64(cells[5 + bins])?,
            runtime,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(family: Family, mode: Mode, lo: u32, hi: u32) -> BenchConfig {
        BenchConfig {
            family,
            mode,
            n0_range: (lo, hi),
            bin_radius: BTreeMap::new(),
            auto_radius_density: Some(0.55),
            seed: 11,
            copies_range: (2, 10),
        }
    }

    fn multiset(inst: &Instance) -> Vec<f64> {
        let mut r: Vec<f64> = inst.items.iter().map(|i| i.radius).collect();
        r.sort_by(f64::total_cmp);
        r
    }

    #[test]
    fn fixed_r_eq_i_n0_8_has_forty_items() {
        let c = cfg(Family::REqI, Mode::Fixed, 8, 8);
        let inst = generate_instance(&c, 8).unwrap();
        assert_eq!(inst.len(), 40);
        for i in 1..=8 {
            let count = inst.items.iter().filter(|it| it.radius == i as f64).count();
            assert_eq!(count, 5);
        }
        assert_eq!(inst.n0, Some(8));
        assert_eq!(inst.seed, None);
        assert_eq!(inst.name, "r_eq_i-fixed-n0_8");
    }

    #[test]
    fn fixed_sqrt_n0_20_has_hundred_items() {
        let c = cfg(Family::REqSqrtI, Mode::Fixed, 20, 20);
        let inst = generate_instance(&c, 20).unwrap();
        assert_eq!(inst.len(), 100);
        let max = inst.items.iter().map(|i| i.radius).fold(0.0, f64::max);
        assert_eq!(max, 20f64.sqrt());
    }

    #[test]
    fn random_mode_is_bounded_and_reproducible() {
        let c = cfg(Family::REqI, Mode::Random, 8, 8);
        let a = generate_instance(&c, 8).unwrap();
        let b = generate_instance(&c, 8).unwrap();
        assert_eq!(a, b);
        assert!((16..=80).contains(&a.len()));
        assert_eq!(a.seed, Some(11));
        let other = BenchConfig { seed: 12, ..c };
        let counts = |inst: &Instance| {
            (1..=8)
                .map(|i| inst.items.iter().filter(|it| it.radius == i as f64).count())
                .collect::<Vec<_>>()
        };
        let o = generate_instance(&other, 8).unwrap();
        assert!(counts(&a).iter().all(|c| (2..=10).contains(c)));
        assert_ne!(counts(&a), counts(&o));
    }

    #[test]
    fn fixed_mode_ignores_seed() {
        let a = generate_instance(&cfg(Family::REqSqrtI, Mode::Fixed, 9, 9), 9).unwrap();
        let b = generate_instance(
            &BenchConfig {
                seed: 999,
                ..cfg(Family::REqSqrtI, Mode::Fixed, 9, 9)
            },
            9,
        )
        .unwrap();
        assert_eq!(multiset(&a), multiset(&b));
        assert_eq!(a.bin_radius, b.bin_radius);
    }

    #[test]
    fn radius_table_and_missing_entries() {
        let mut c = cfg(Family::REqI, Mode::Fixed, 8, 9);
        c.auto_radius_density = None;
        c.bin_radius.insert("8".into(), 16.2);
        assert_eq!(c.check(), Err(CbppError::MissingBinRadius(9)));
        assert_eq!(generate_instance(&c, 9), Err(CbppError::MissingBinRadius(9)));
        assert_eq!(generate_instance(&c, 8).unwrap().bin_radius, 16.2);
        assert!(generate_instance(&c, 10).is_err());
    }

    #[test]
    fn auto_radius_matches_rule() {
        let c = cfg(Family::REqI, Mode::Fixed, 8, 8);
        let inst = generate_instance(&c, 8).unwrap();
        // Σ r² = 5 * 204 = 1020; sqrt(1020 / 0.55) = 43.06...
        assert_eq!(inst.bin_radius, 44.0);
    }

    #[test]
    fn empty_range_gives_no_rows() {
        let c = cfg(Family::REqI, Mode::Fixed, 9, 8);
        let rows = run_experiment(&c, &AnnealParams::default()).unwrap();
        assert!(rows.is_empty());
    }

    #[test]
    fn single_instance_gives_two_rows() {
        let c = cfg(Family::REqSqrtI, Mode::Random, 3, 3);
        let params = AnnealParams {
            n_iters: 500,
            ..AnnealParams::default()
        };
        let rows = run_experiment(&c, &params).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].algorithm, Algorithm::Asags);
        assert_eq!(rows[1].algorithm, Algorithm::Toa);
        for r in &rows {
            let m = Metrics::from_densities(r.densities.clone()).unwrap();
            assert!((m.f_obj - r.f_obj).abs() < 1e-12);
            assert!(r.densities.windows(2).all(|w| w[0] >= w[1]));
        }
        let again = run_experiment(&c, &params).unwrap();
        let strip = |rs: &[ExperimentRow]| {
            rs.iter()
                .map(|r| (r.densities.clone(), r.f_obj))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&rows), strip(&again));
    }

    #[test]
    fn toa_only_gives_half_the_rows() {
        let c = cfg(Family::REqI, Mode::Fixed, 3, 4);
        let runs = run_experiment_detailed(
            &c,
            &AnnealParams::default(),
            Algorithms {
                toa: true,
                asags: false,
            },
        )
        .unwrap();
        let rows: Vec<_> = runs.iter().flat_map(|r| r.rows(&c)).collect();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.algorithm == Algorithm::Toa));
    }

    #[test]
    fn empty_table_is_header_only() {
        let csv = emit_tables(&[], TableFormat::Csv, true);
        assert_eq!(csv, "family,mode,n0,n,alg,F,t\n");
        let md = emit_tables(&[], TableFormat::Markdown, false);
        assert_eq!(md.lines().count(), 2);
    }

    #[test]
    fn one_row_table() {
        let row = ExperimentRow {
            family: Family::REqI,
            mode: Mode::Fixed,
            n0: 8,
            n: 40,
            algorithm: Algorithm::Toa,
            densities: vec![0.81, 0.74, 0.72, 0.72, 0.69, 0.19],
            f_obj: -5.38,
            runtime: Duration::from_millis(1500),
        };
        let csv = emit_tables(std::slice::from_ref(&row), TableFormat::Csv, true);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "family,mode,n0,n,alg,bin1,bin2,bin3,bin4,bin5,bin6,F,t");
        assert_eq!(lines[1], "r_eq_i,fixed,8,40,TOA,0.81,0.74,0.72,0.72,0.69,0.19,-5.38,1.500");
        assert_eq!(lines.len(), 2);
        let md = emit_tables(&[row], TableFormat::Markdown, true);
        assert!(md.contains("| r_eq_i | fixed | 8 | 40 | TOA | 0.81 |"));
    }

    #[test]
    fn t_test_pairs_by_instance() {
        let mk = |n0, alg, f| ExperimentRow {
            family: Family::REqI,
            mode: Mode::Fixed,
            n0,
            n: 5 * n0 as usize,
            algorithm: alg,
            densities: vec![0.5],
            f_obj: f,
            runtime: Duration::ZERO,
        };
        let rows = vec![
            mk(8, Algorithm::Asags, -5.19),
            mk(8, Algorithm::Toa, -5.38),
            mk(9, Algorithm::Asags, -4.87),
            mk(9, Algorithm::Toa, -5.34),
            mk(10, Algorithm::Toa, -5.40),
            mk(10, Algorithm::Asags, -4.95),
        ];
        let r = compare_algorithms(&rows).unwrap();
        assert_eq!(r.dof, 2);
        assert!(r.t_stat < 0.0);
    }

    fn row_strategy() -> impl Strategy<Value = ExperimentRow> {
        (
            prop_oneof![Just(Family::REqI), Just(Family::REqSqrtI)],
            prop_oneof![Just(Mode::Fixed), Just(Mode::Random)],
            1u32..30,
            1usize..200,
            prop_oneof![Just(Algorithm::Toa), Just(Algorithm::Asags)],
            proptest::collection::vec(0.0..1.0f64, 1..8),
            0u64..500_000,
        )
            .prop_map(|(family, mode, n0, n, algorithm, mut densities, micros)| {
                densities.sort_by(|a, b| b.total_cmp(a));
                let f_obj = Metrics::from_densities(densities.clone()).unwrap().f_obj;
                ExperimentRow {
                    family,
                    mode,
                    n0,
                    n,
                    algorithm,
                    densities,
                    f_obj,
                    runtime: Duration::from_micros(micros),
                }
            })
    }

    proptest! {
        #[test]
        fn csv_round_trips_at_emitted_precision(rows in proptest::collection::vec(row_strategy(), 0..6)) {
            let text = emit_tables(&rows, TableFormat::Csv, true);
            let parsed = parse_csv_table(&text).unwrap();
            prop_assert_eq!(parsed.len(), rows.len());
            for (p, r) in parsed.iter().zip(&rows) {
                prop_assert_eq!((p.family, p.mode, p.n0, p.n, p.algorithm), (r.family, r.mode, r.n0, r.n, r.algorithm));
                prop_assert_eq!(p.densities.len(), r.densities.len());
                for (a, b) in p.densities.iter().zip(&r.densities) {
                    prop_assert!((a - b).abs() <= 0.005 + 1e-12);
                }
                prop_assert!((p.f_obj - r.f_obj).abs() <= 0.005 + 1e-12);
                prop_assert!((p.runtime.as_secs_f64() - r.runtime.as_secs_f64()).abs() <= 0.0005 + 1e-12);
            }
            // emitting the parsed rows reproduces the text exactly
            prop_assert_eq!(emit_tables(&parsed, TableFormat::Csv, true), text);
        }
    }
}
