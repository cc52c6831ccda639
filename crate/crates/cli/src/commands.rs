//! Subcommand implementations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cbpp_core::asags::{self, AnnealParams, TracePoint};
use cbpp_core::bench::{self, Algorithms, ExperimentRow, InstanceRun, TableFormat};
use cbpp_core::model::{self, Metrics};
use cbpp_core::{toa, Instance, Solution};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::BenchFile;
use crate::error::{create_dir, write_text, CliError, CliResult};
use crate::formats::{read_instance, read_solution_file, write_instance, write_solution};
use crate::render::render_svg;

#[derive(Debug, Parser)]
#[command(name = "cbpp", version, about = "Circle bin packing with circular items")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write one instance file per benchmark instance of a config.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Seed for random-mode sets; overrides the seeds in the config.
        #[arg(long, env = "CBPP_SEED")]
        seed: Option<u64>,
    },
    /// Solve one instance and write its solution.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Algo::Asags)]
        algo: Algo,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        anneal: AnnealArgs,
        /// Write the annealing trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check a solution against the packing constraints.
    Validate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Draw a solution as SVG.
    Render {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a benchmark config and write tables, solutions and drawings.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = AlgoChoice::Both)]
        algo: AlgoChoice,
        #[command(flatten)]
        anneal: AnnealArgs,
        /// Instance seed override for random-mode sets.
        #[arg(long)]
        instance_seed: Option<u64>,
        /// Record an annealing trace point every this many batches.
        #[arg(long, default_value_t = 0)]
        trace_every: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Toa,
    Asags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoChoice {
    Toa,
    Asags,
    Both,
}

impl AlgoChoice {
    fn algorithms(self) -> Algorithms {
        Algorithms {
            toa: matches!(self, AlgoChoice::Toa | AlgoChoice::Both),
            asags: matches!(self, AlgoChoice::Asags | AlgoChoice::Both),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct AnnealArgs {
    /// Annealing seed.
    #[arg(long, env = "CBPP_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Budget of neighbor generations.
    #[arg(long, default_value_t = 2_000_000)]
    pub iters: u64,
    #[arg(long, default_value_t = 0.1)]
    pub t_start: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub t_end: f64,
    #[arg(long, default_value_t = 0.9)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.08)]
    pub beta: f64,
    /// Fixed sector span in degrees instead of a random one in [20, 60].
    #[arg(long)]
    pub delta_theta: Option<f64>,
    /// Shrink the sector span from 60 to 20 degrees as the run cools.
    #[arg(long)]
    pub adaptive_span: bool,
    /// Cool after every greedy batch.
    #[arg(long)]
    pub cool_every_batch: bool,
}

impl AnnealArgs {
    pub fn params(&self) -> AnnealParams {
        AnnealParams {
            t_start: self.t_start,
            t_end: self.t_end,
            n_iters: self.iters,
            alpha: self.alpha,
            beta: self.beta,
            delta_theta_fixed: self.delta_theta,
            adaptive_span: self.adaptive_span,
            seed: self.seed,
            cool_every_batch: self.cool_every_batch,
            trace_every: 0,
        }
    }
}

/// Run a parsed command, writing human output to `out`.
pub fn execute(cli: Cli, out: &mut dyn std::io::Write) -> CliResult<()> {
    match cli.command {
        Command::Generate { config, out: dir, seed } => generate(&config, &dir, seed, out),
        Command::Solve {
            instance,
            algo,
            out: path,
            anneal,
            trace,
        } => solve(&instance, algo, &path, &anneal, trace.as_deref(), out),
        Command::Validate { instance, solution } => validate(&instance, &solution, out),
        Command::Render {
            instance,
            solution,
            out: path,
        } => render(&instance, &solution, &path),
        Command::Bench {
            config,
            out: dir,
            algo,
            anneal,
            instance_seed,
            trace_every,
        } => bench_cmd(&config, &dir, algo, &anneal, instance_seed, trace_every, out),
    }
}

fn say(out: &mut dyn std::io::Write, line: &str) {
    let _ = writeln!(out, "{line}");
}

fn ensure_feasible(solution: &Solution, instance: &Instance) -> CliResult<()> {
    let report = model::validate(solution, instance, instance.tolerance());
    if report.is_feasible() {
        Ok(())
    } else {
        Err(CliError::Infeasible(format!("{}:\n{report}", instance.name)))
    }
}

pub fn generate(
    config: &Path,
    dir: &Path,
    seed: Option<u64>,
    out: &mut dyn std::io::Write,
) -> CliResult<()> {
    let file = BenchFile::load(config, seed)?;
    create_dir(dir)?;
    for set in &file.sets {
        for n0 in set.n0_values() {
            let instance = bench::generate_instance(set, n0)?;
            let path = dir.join(format!("{}.json", instance.name));
            write_instance(&path, &instance)?;
            say(out, &format!("{} n={} R={}", path.display(), instance.len(), instance.bin_radius));
        }
    }
    Ok(())
}

fn summary(metrics: &Metrics, seconds: f64) -> String {
    format!("K={} F={:.2} time={seconds:.3}", metrics.k_used, metrics.f_obj)
}

pub fn trace_csv(points: &[TracePoint]) -> String {
    let mut text = String::from("iteration,t_current,f,k\n");
    for p in points {
        let _ = writeln!(text, "{},{:e},{},{}", p.iteration, p.t_current, p.f, p.k);
    }
    text
}

pub fn solve(
    instance_path: &Path,
    algo: Algo,
    out_path: &Path,
    anneal: &AnnealArgs,
    trace: Option<&Path>,
    out: &mut dyn std::io::Write,
) -> CliResult<()> {
    let instance = read_instance(instance_path)?;
    let (solution, seconds, trace_points) = match algo {
        Algo::Toa => {
            let started = Instant::now();
            let solution = toa::construct(&instance)?;
            (solution, started.elapsed().as_secs_f64(), None)
        }
        Algo::Asags => {
            let mut params = anneal.params();
            if trace.is_some() {
                params.trace_every = 1;
            }
            params.check().map_err(|e| CliError::Usage(e.to_string()))?;
            let started = Instant::now();
            let (solution, stats) = asags::run(&instance, &params)?;
            (solution, started.elapsed().as_secs_f64(), Some(stats.f_trace))
        }
    };
    ensure_feasible(&solution, &instance)?;
    let metrics = model::objective(&solution, &instance)?;
    write_solution(out_path, &solution, &instance)?;
    if let (Some(path), Some(points)) = (trace, trace_points) {
        write_text(path, &trace_csv(&points))?;
    }
    say(out, &summary(&metrics, seconds));
    Ok(())
}

pub fn validate(instance_path: &Path, solution_path: &Path, out: &mut dyn std::io::Write) -> CliResult<()> {
    let instance = read_instance(instance_path)?;
    let file = read_solution_file(solution_path)?;
    let report = model::validate(&file.to_solution(), &instance, instance.tolerance());
    let mut lines: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
    if report.is_feasible() {
        lines.extend(file.metric_mismatches(&instance));
    }
    if lines.is_empty() {
        say(out, "OK");
        Ok(())
    } else {
        for line in &lines {
            say(out, line);
        }
        Err(CliError::Infeasible(format!(
            "{} violation(s) in {}",
            lines.len(),
            solution_path.display()
        )))
    }
}

pub fn render(instance_path: &Path, solution_path: &Path, out_path: &Path) -> CliResult<()> {
    let instance = read_instance(instance_path)?;
    let solution = read_solution_file(solution_path)?.to_solution();
    ensure_feasible(&solution, &instance)?;
    write_text(out_path, &render_svg(&solution, &instance)?)
}

fn write_run_artifacts(run: &InstanceRun, dir: &Path) -> CliResult<()> {
    for (tag, result) in [("toa", &run.toa), ("asags", &run.asags)] {
        let Some(result) = result else { continue };
        let stem = format!("{}.{tag}", run.instance.name);
        write_solution(
            &dir.join("solutions").join(format!("{stem}.json")),
            &result.solution,
            &run.instance,
        )?;
        write_text(
            &dir.join("svg").join(format!("{stem}.svg")),
            &render_svg(&result.solution, &run.instance)?,
        )?;
        if let Some(stats) = &result.stats {
            if !stats.f_trace.is_empty() {
                write_text(
                    &dir.join("traces").join(format!("{stem}.csv")),
                    &trace_csv(&stats.f_trace),
                )?;
            }
        }
    }
    Ok(())
}

fn runtimes_csv(rows: &[ExperimentRow]) -> String {
    let mut text = String::from("family,mode,n0,n,alg,t\n");
    for r in rows {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{:.3}",
            r.family,
            r.mode,
            r.n0,
            r.n,
            r.algorithm.as_str(),
            r.runtime.as_secs_f64()
        );
    }
    text
}

fn ttest_report(rows: &[ExperimentRow]) -> String {
    match bench::compare_algorithms(rows) {
        Ok(r) => format!(
            "paired two-tailed t-test, TOA vs ASAGS objective F\npairs = {}\nt = {:.6}\ndof = {}\np = {:.10e}\nsignificant at 0.05: {}\n",
            r.dof + 1,
            r.t_stat,
            r.dof,
            r.p_value,
            r.p_value < 0.05
        ),
        Err(e) => format!("t-test not available: {e}\n"),
    }
}

pub fn bench_cmd(
    config: &Path,
    dir: &Path,
    algo: AlgoChoice,
    anneal: &AnnealArgs,
    instance_seed: Option<u64>,
    trace_every: u64,
    out: &mut dyn std::io::Write,
) -> CliResult<()> {
    let file = BenchFile::load(config, instance_seed)?;
    let mut params = anneal.params();
    params.trace_every = trace_every;
    params.check().map_err(|e| CliError::Usage(e.to_string()))?;
    for sub in ["solutions", "svg", "traces"] {
        create_dir(&dir.join(sub))?;
    }

    let mut rows = Vec::new();
    for set in &file.sets {
        let runs = bench::run_experiment_detailed(set, &params, algo.algorithms())?;
        for run in &runs {
            write_run_artifacts(run, dir)?;
            let set_rows = run.rows(set);
            for r in &set_rows {
                say(
                    out,
                    &format!(
                        "{} {} K={} F={:.2} time={:.3}",
                        run.instance.name,
                        r.algorithm.as_str(),
                        r.densities.len(),
                        r.f_obj,
                        r.runtime.as_secs_f64()
                    ),
                );
            }
            rows.extend(set_rows);
        }
    }

    write_text(&dir.join("results.csv"), &bench::emit_tables(&rows, TableFormat::Csv, false))?;
    write_text(
        &dir.join("results.md"),
        &bench::emit_tables(&rows, TableFormat::Markdown, true),
    )?;
    write_text(&dir.join("runtimes.csv"), &runtimes_csv(&rows))?;
    let ttest = ttest_report(&rows);
    write_text(&dir.join("ttest.txt"), &ttest)?;
    let _ = write!(out, "{ttest}");
    Ok(())
}
