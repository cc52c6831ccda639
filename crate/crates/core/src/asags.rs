//! Adaptive simulated annealing with greedy search.
//!
//! Starting from one item per bin, each move picks two used bins, removes
//! every item meeting a random region (a disc around a packed item, or a
//! sector of the bin) and repacks the removed items into those two bins with
//! the tangent-placement greedy.
//!
//! Neighbors are generated in greedy batches of up to `t_greedy`: the first
//! neighbor that is no worse than the current state is taken at once;
//! otherwise the best neighbor of a full batch is taken with probability
//! `exp(-dE / t * ln(n / 2))`. The temperature is multiplied by `t_cool`
//! at the end of the first batch that completes a stage of
//! `generations_per_stage` neighbor generations, so the budget is spread
//! over the whole cooling schedule. Both `t_greedy` and `t_cool` scale with
//! the number of items.

use std::time::{Duration, Instant};

use rand::seq::index;
use rand::Rng;

use crate::error::{CbppError, Result};
use crate::geometry::{self, CircleGeom, SectorRegion};
use crate::model::{self, BinState, Instance, Placement, Solution};
use crate::rng::{stream_rng, SolverRng};
use crate::toa;

/// Random span bounds for sector perturbation, in whole degrees.
pub const SECTOR_SPAN_MIN_DEG: u32 = 20;
pub const SECTOR_SPAN_MAX_DEG: u32 = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealParams {
    pub t_start: f64,
    pub t_end: f64,
    /// Budget of neighbor generations.
    pub n_iters: u64,
    pub alpha: f64,
    pub beta: f64,
    /// Fixed sector span in degrees; `None` draws it from `[20, 60]`.
    pub delta_theta_fixed: Option<f64>,
    /// Shrink the sector span from 60° to 20° as the temperature falls.
    pub adaptive_span: bool,
    pub seed: u64,
    /// Cool after every batch instead of spreading `n_iters` over the
    /// cooling schedule.
    pub cool_every_batch: bool,
    /// Record a trace point every this many batches; 0 disables tracing.
    pub trace_every: u64,
}

impl Default for AnnealParams {
    fn default() -> Self {
        Self {
            t_start: 0.1,
            t_end: 1e-4,
            n_iters: 2_000_000,
            alpha: 0.9,
            beta: 0.08,
            delta_theta_fixed: None,
            adaptive_span: false,
            seed: 0,
            cool_every_batch: false,
            trace_every: 0,
        }
    }
}

impl AnnealParams {
    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(CbppError::InvalidParams(msg));
        if !(self.t_end > 0.0 && self.t_end < self.t_start && self.t_start.is_finite()) {
            return bad(format!(
                "need 0 < t_end < t_start, got t_start={} t_end={}",
                self.t_start, self.t_end
            ));
        }
        if self.n_iters == 0 {
            return bad("n_iters must be positive".into());
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if let Some(span) = self.delta_theta_fixed {
            if !(span > 0.0 && span < 360.0) {
                return bad(format!("sector span must be in (0, 360), got {span}"));
            }
        }
        Ok(())
    }
}

/// Schedule constants derived from the parameters and the instance size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedSchedule {
    pub t_cool: f64,
    pub t_greedy: u64,
    /// Cooling steps needed to go from `t_start` to `t_end`.
    pub stages: u64,
    /// Neighbor generations per temperature, `ceil(n_iters / stages)`.
    pub generations_per_stage: u64,
}

/// `t_greedy = max(1, round(beta * n))`, `t_cool = (alpha√n - 1) / (alpha√n)`
/// (0.5 when that is not positive).
pub fn derive_schedule(params: &AnnealParams, n: usize) -> DerivedSchedule {
    let n_f = n.max(1) as f64;
    let t_greedy = ((params.beta * n_f + 0.5).floor() as u64).max(1);
    let scale = params.alpha * n_f.sqrt();
    let mut t_cool = (scale - 1.0) / scale;
    if t_cool <= 0.0 {
        t_cool = 0.5;
    }
    let stages = ((params.t_end / params.t_start).ln() / t_cool.ln())
        .ceil()
        .max(1.0) as u64;
    let generations_per_stage = params.n_iters.div_ceil(stages).max(1);
    DerivedSchedule {
        t_cool,
        t_greedy,
        stages,
        generations_per_stage,
    }
}

/// Probability of taking a move that raises the energy by `d_e`.
///
/// For `n <= 2` the size factor uses `ln(3/2)` so that worse moves stay
/// penalized.
pub fn acceptance_probability(d_e: f64, t_current: f64, n: usize) -> f64 {
    let size = (n.max(3) as f64 / 2.0).ln();
    let p = (-d_e / t_current * size).exp();
    if p.is_nan() {
        0.0
    } else {
        p.clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbationKind {
    Circle,
    Sector,
}

/// A removal region inside one bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Circle(CircleGeom),
    Sector(SectorRegion),
}

/// One item per bin, each at its bin's center.
pub fn initial_solution(instance: &Instance) -> Result<Solution> {
    let c = instance.bin_circle().center;
    let bins = instance
        .items
        .iter()
        .map(|it| {
            if it.radius > instance.bin_radius {
                return Err(CbppError::ItemLargerThanBin {
                    radius: it.radius,
                    bin_radius: instance.bin_radius,
                });
            }
            Ok(BinState::new(vec![Placement {
                item_id: it.id,
                x: c.x,
                y: c.y,
            }]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Solution::new(instance.name.clone(), bins))
}

/// A disc centered on a uniformly chosen item of `bin`, radius uniform in
/// `[0, R/2]`. The anchor item always meets it.
pub fn sample_circle_region<R: Rng + ?Sized>(
    bin: &BinState,
    instance: &Instance,
    rng: &mut R,
) -> Result<CircleGeom> {
    if bin.is_empty() {
        return Err(CbppError::EmptyBin);
    }
    let radius = rng.gen_range(0.0..=instance.bin_radius / 2.0);
    let anchor = bin.placements[rng.gen_range(0..bin.len())];
    Ok(CircleGeom::new(anchor.center(), radius))
}

/// Sector of `bin` starting at a whole-degree angle in `[0, 360)`.
pub fn sector_from(alpha_deg: f64, span_deg: f64, bin: &CircleGeom) -> SectorRegion {
    SectorRegion::new(
        bin.center,
        bin.radius,
        alpha_deg,
        (alpha_deg + span_deg) % 360.0,
    )
}

/// A random sector of `bin`: start angle uniform over whole degrees, span
/// `delta_theta` if given, else uniform over whole degrees in `[20, 60]`.
pub fn sample_sector<R: Rng + ?Sized>(
    delta_theta: Option<f64>,
    bin: &CircleGeom,
    rng: &mut R,
) -> Result<SectorRegion> {
    if let Some(span) = delta_theta {
        if !(span > 0.0 && span < 360.0) {
            return Err(CbppError::InvalidSample(format!(
                "sector span must be in (0, 360), got {span}"
            )));
        }
    }
    let alpha = rng.gen_range(0u32..360) as f64;
    let span = match delta_theta {
        Some(s) => s,
        None => rng.gen_range(SECTOR_SPAN_MIN_DEG..=SECTOR_SPAN_MAX_DEG) as f64,
    };
    Ok(sector_from(alpha, span, bin))
}

/// Ids of the items of `bin` meeting `region`.
pub fn removed_set(bin: &BinState, region: &Region, instance: &Instance) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for p in &bin.placements {
        let c = CircleGeom::new(p.center(), instance.radius(p.item_id)?);
        let hit = match region {
            Region::Circle(area) => geometry::circle_intersects_circle_region(&c, area),
            Region::Sector(s) => geometry::circle_intersects_sector(&c, s),
        };
        if hit {
            out.push(p.item_id);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum NeighborOutcome {
    Neighbor(Solution),
    /// The removed items no longer fit into the selected bins.
    ReinsertionFailed,
}

/// Remove the items meeting each bin's region and repack them, largest
/// first, into the listed bins in order. The result is compacted.
pub fn neighbor_from_regions(
    sol: &Solution,
    regions: &[(usize, Region)],
    instance: &Instance,
) -> Result<NeighborOutcome> {
    let mut removed = Vec::new();
    for &(k, ref region) in regions {
        let bin = sol
            .bins
            .get(k)
            .ok_or_else(|| CbppError::InvalidRequest(format!("bin index {k} out of range")))?;
        removed.extend(removed_set(bin, region, instance)?);
    }
    if removed.is_empty() {
        return Ok(NeighborOutcome::Neighbor(sol.clone()));
    }
    removed.sort_unstable();
    removed.dedup();

    let mut next = sol.clone();
    let mut bin_ids: Vec<usize> = Vec::with_capacity(regions.len());
    for &(k, _) in regions {
        if !bin_ids.contains(&k) {
            bin_ids.push(k);
        }
        next.bins[k]
            .placements
            .retain(|p| removed.binary_search(&p.item_id).is_err());
    }
    toa::largest_first(instance, &mut removed);

    match toa::pack_in_place(&mut next, &removed, &bin_ids, instance)? {
        Some(_) => Ok(NeighborOutcome::ReinsertionFailed),
        None => Ok(NeighborOutcome::Neighbor(model::compact(next)?)),
    }
}

/// Perturb two random used bins (one when only one is used) with regions of
/// the given kind and repack.
pub fn generate_neighbor<R: Rng + ?Sized>(
    sol: &Solution,
    kind: PerturbationKind,
    delta_theta: Option<f64>,
    instance: &Instance,
    rng: &mut R,
) -> Result<NeighborOutcome> {
    let k = sol.bins.len();
    if k == 0 {
        return Err(CbppError::EmptySolution);
    }
    let picks: Vec<usize> = if k == 1 {
        vec![0]
    } else {
        index::sample(rng, k, 2).into_vec()
    };
    let bin_circle = instance.bin_circle();
    let mut regions = Vec::with_capacity(picks.len());
    for k in picks {
        let region = match kind {
            PerturbationKind::Circle => {
                Region::Circle(sample_circle_region(&sol.bins[k], instance, rng)?)
            }
            PerturbationKind::Sector => {
                Region::Sector(sample_sector(delta_theta, &bin_circle, rng)?)
            }
        };
        regions.push((k, region));
    }
    neighbor_from_regions(sol, &regions, instance)
}

/// One sample of the annealing trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iteration: u64,
    pub t_current: f64,
    /// Energy of the current state.
    pub f: f64,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunStats {
    /// Neighbor generations, including failed reinsertions.
    pub iterations_done: u64,
    pub batches: u64,
    /// Neighbors taken because they were no worse than the current state.
    pub accepts_better: u64,
    /// Batch bests taken by the probabilistic test.
    pub accepts_worse: u64,
    /// Full batches whose best was refused or that produced no neighbor.
    pub rejects: u64,
    /// The final batch when the generation budget cut it short.
    pub truncated_batches: u64,
    /// Generated neighbors that were worse than the current state or failed.
    pub worse_generated: u64,
    pub reinsertion_failures: u64,
    /// Lowest energy seen.
    pub best_f: f64,
    pub final_temperature: f64,
    /// Times the temperature was lowered.
    pub cooling_steps: u64,
    pub schedule: Option<DerivedSchedule>,
    pub wall_time: Duration,
    pub f_trace: Vec<TracePoint>,
}

pub fn run(instance: &Instance, params: &AnnealParams) -> Result<(Solution, RunStats)> {
    run_with_observer(instance, params, |_| {})
}

/// Anneal, calling `on_accept` with every state the chain moves to.
pub fn run_with_observer<F: FnMut(&Solution)>(
    instance: &Instance,
    params: &AnnealParams,
    mut on_accept: F,
) -> Result<(Solution, RunStats)> {
    let started = Instant::now();
    instance.check()?;
    params.check()?;
    let n = instance.len();
    let schedule = derive_schedule(params, n);
    let mut rng: SolverRng = stream_rng(params.seed, 0);

    let mut current = initial_solution(instance)?;
    let mut f_current = model::objective(&current, instance)?.energy;
    let mut best = current.clone();
    let mut stats = RunStats {
        best_f: f_current,
        schedule: Some(schedule),
        ..RunStats::default()
    };

    let log_span = (params.t_start / params.t_end).ln();
    let mut t = params.t_start;
    let mut generations_in_stage = 0u64;

    while t > params.t_end && stats.iterations_done < params.n_iters {
        let kind = if rng.gen::<bool>() {
            PerturbationKind::Circle
        } else {
            PerturbationKind::Sector
        };
        let span = if params.adaptive_span {
            let progress = ((params.t_start / t).ln() / log_span).clamp(0.0, 1.0);
            Some(SECTOR_SPAN_MAX_DEG as f64
                - (SECTOR_SPAN_MAX_DEG - SECTOR_SPAN_MIN_DEG) as f64 * progress)
        } else {
            params.delta_theta_fixed
        };

        let mut batch_best: Option<(Solution, f64)> = None;
        let mut generated = 0u64;
        let mut moved = false;
        while generated < schedule.t_greedy && stats.iterations_done < params.n_iters {
            generated += 1;
            stats.iterations_done += 1;
            match generate_neighbor(&current, kind, span, instance, &mut rng)? {
                NeighborOutcome::Neighbor(candidate) => {
                    let f_candidate = model::objective(&candidate, instance)?.energy;
                    if f_candidate <= f_current {
                        current = candidate;
                        f_current = f_candidate;
                        stats.accepts_better += 1;
                        moved = true;
                        break;
                    }
                    stats.worse_generated += 1;
                    if batch_best.as_ref().is_none_or(|(_, fb)| f_candidate < *fb) {
                        batch_best = Some((candidate, f_candidate));
                    }
                }
                NeighborOutcome::ReinsertionFailed => {
                    stats.worse_generated += 1;
                    stats.reinsertion_failures += 1;
                }
            }
        }

        if !moved {
            if generated < schedule.t_greedy {
                stats.truncated_batches += 1;
            } else if let Some((candidate, f_candidate)) = batch_best {
                let p = acceptance_probability(f_candidate - f_current, t, n);
                if rng.gen::<f64>() < p {
                    current = candidate;
                    f_current = f_candidate;
                    stats.accepts_worse += 1;
                    moved = true;
                } else {
                    stats.rejects += 1;
                }
            } else {
                stats.rejects += 1;
            }
        }
        if moved {
            on_accept(&current);
            if f_current < stats.best_f {
                stats.best_f = f_current;
                best = current.clone();
            }
        }

        stats.batches += 1;
        generations_in_stage += generated;
        if params.cool_every_batch || generations_in_stage >= schedule.generations_per_stage {
            t *= schedule.t_cool;
            stats.cooling_steps += 1;
            generations_in_stage = 0;
        }
        if params.trace_every > 0 && stats.batches.is_multiple_of(params.trace_every) {
            stats.f_trace.push(TracePoint {
                iteration: stats.iterations_done,
                t_current: t,
                f: f_current,
                k: current.bins.len(),
            });
        }
    }
    if params.trace_every > 0 {
        stats.f_trace.push(TracePoint {
            iteration: stats.iterations_done,
            t_current: t,
            f: f_current,
            k: current.bins.len(),
        });
    }

    stats.final_temperature = t;
    stats.wall_time = started.elapsed();
    Ok((best, stats))
}
