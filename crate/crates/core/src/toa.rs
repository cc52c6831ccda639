//! Constructive greedy packing by tangent placement.
//!
//! Each item goes to a position tangent to two already-placed objects (items
//! or the bin boundary), choosing the position closest to the boundary. Bins
//! are scanned first-fit.

use std::cmp::Ordering;

use crate::error::{CbppError, Result};
use crate::geometry::{self, CircleGeom, Contact, Point, Tolerance};
use crate::model::{self, BinState, Instance, Item, Placement, Solution};

/// An object a candidate touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectRef {
    Bin,
    Item(usize),
}

/// A feasible tangent position for an item in a particular bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub position: Point,
    /// Gap to the bin boundary; smaller is better.
    pub clearance: f64,
    pub touching: (ObjectRef, ObjectRef),
}

/// Items to place, the bins they may go to (scanned in order) and the
/// partial solution to place them into.
#[derive(Debug, Clone)]
pub struct PackRequest {
    pub circle_ids: Vec<usize>,
    pub bin_ids: Vec<usize>,
    pub base: Solution,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PackOutcome {
    Packed(Solution),
    /// No listed bin admits `item_id`; items before it had been placed.
    Unplaceable { item_id: usize },
}

impl PackOutcome {
    pub fn into_solution(self) -> Option<Solution> {
        match self {
            PackOutcome::Packed(s) => Some(s),
            PackOutcome::Unplaceable { .. } => None,
        }
    }
}

/// All feasible tangent positions for `item` in `bin`.
pub fn feasible_candidates(item: &Item, bin: &BinState, instance: &Instance) -> Result<Vec<Candidate>> {
    let circles = bin.circles(instance)?;
    let bin_circle = instance.bin_circle();
    let tol = instance.tolerance();
    let to_ref = |c: Contact| match c {
        Contact::Bin => ObjectRef::Bin,
        Contact::Packed(idx) => ObjectRef::Item(bin.placements[idx].item_id),
    };
    Ok(
        geometry::tangent_points(item.radius, &circles, &bin_circle, tol)?
            .into_iter()
            .map(|tp| Candidate {
                position: tp.point,
                clearance: geometry::boundary_clearance(&tp.point, item.radius, &bin_circle),
                touching: (to_ref(tp.touching.0), to_ref(tp.touching.1)),
            })
            .collect(),
    )
}

fn lex_less(a: &Point, b: &Point) -> bool {
    matches!(
        a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)),
        Ordering::Less
    )
}

/// Pick the preferred candidate: minimum clearance, with candidates within
/// `eps` of the minimum broken by lexicographic `(x, y)`.
pub fn select_best(candidates: &[Candidate], tol: Tolerance) -> Option<Candidate> {
    let min = candidates
        .iter()
        .map(|c| c.clearance)
        .min_by(f64::total_cmp)?;
    candidates
        .iter()
        .filter(|c| c.clearance <= min + tol.eps)
        .copied()
        .reduce(|best, c| if lex_less(&c.position, &best.position) { c } else { best })
}

/// Buffers reused across placements.
#[derive(Debug, Default)]
pub(crate) struct Scratch {
    points: Vec<geometry::TangentPoint>,
    feasible: Vec<(f64, Point)>,
}

/// Best feasible tangent position. Equivalent to `select_best` over all
/// feasible candidates.
pub(crate) fn best_position(
    r: f64,
    packed: &[CircleGeom],
    bin: &CircleGeom,
    tol: Tolerance,
) -> Result<Option<Point>> {
    best_position_with(&mut Scratch::default(), r, packed, bin, tol)
}

pub(crate) fn best_position_with(
    scratch: &mut Scratch,
    r: f64,
    packed: &[CircleGeom],
    bin: &CircleGeom,
    tol: Tolerance,
) -> Result<Option<Point>> {
    let Scratch { points, feasible } = scratch;
    let strict = tol.placement();
    let mut hint = 0;
    let mut collect = |points: &[geometry::TangentPoint], bound: f64, out: &mut Vec<(f64, Point)>| {
        for tp in points {
            let c = geometry::boundary_clearance(&tp.point, r, bin);
            if c >= -2.0 * tol.eps
                && c <= bound
                && feasible_with_hint(&tp.point, r, packed, bin, strict, &mut hint)
            {
                out.push((c, tp.point));
            }
        }
    };
    points.clear();
    feasible.clear();
    geometry::bin_contact_points(r, packed, bin, tol, points)?;
    collect(points, f64::INFINITY, feasible);

    // Pairs whose positions all sit farther from the boundary than the best
    // boundary contact cannot enter the winning window.
    let bound = window_min(feasible).map_or(f64::INFINITY, |c0| c0 + tol.eps);
    points.clear();
    geometry::pair_contact_points(r, packed, bin, tol, bound, points);
    collect(points, bound, feasible);

    let Some(c0) = window_min(feasible) else {
        return Ok(None);
    };
    Ok(feasible
        .iter()
        .filter(|(c, _)| *c <= c0 + tol.eps)
        .map(|&(_, p)| p)
        .reduce(|best, p| if lex_less(&p, &best) { p } else { best }))
}

fn window_min(feasible: &[(f64, Point)]) -> Option<f64> {
    feasible.iter().map(|&(c, _)| c).min_by(f64::total_cmp)
}

/// Same answer as `geometry::is_feasible_position`, testing the circle that
/// blocked the previous probe first.
fn feasible_with_hint(
    p: &Point,
    r: f64,
    packed: &[CircleGeom],
    bin: &CircleGeom,
    tol: Tolerance,
    hint: &mut usize,
) -> bool {
    let probe = CircleGeom::new(*p, r);
    if packed
        .get(*hint)
        .is_some_and(|q| geometry::overlaps(&probe, q, tol))
    {
        return false;
    }
    if !geometry::contains(bin, &probe, tol) {
        return false;
    }
    match packed.iter().position(|q| geometry::overlaps(&probe, q, tol)) {
        Some(i) => {
            *hint = i;
            false
        }
        None => true,
    }
}

/// Place `circle_ids` in order into `sol`, scanning `bin_ids` first-fit.
/// Returns the id of the first item that fits nowhere. The caller guarantees
/// the request is well formed.
pub(crate) fn pack_in_place(
    sol: &mut Solution,
    circle_ids: &[usize],
    bin_ids: &[usize],
    instance: &Instance,
) -> Result<Option<usize>> {
    let bin_circle = instance.bin_circle();
    let tol = instance.tolerance();
    let mut scratch = Scratch::default();
    let mut circles: Vec<Vec<CircleGeom>> = bin_ids
        .iter()
        .map(|&k| sol.bins[k].circles(instance))
        .collect::<Result<_>>()?;

    for &id in circle_ids {
        let r = instance.radius(id)?;
        let mut placed = false;
        for (slot, &k) in bin_ids.iter().enumerate() {
            if let Some(p) = best_position_with(&mut scratch, r, &circles[slot], &bin_circle, tol)? {
                sol.bins[k].placements.push(Placement {
                    item_id: id,
                    x: p.x,
                    y: p.y,
                });
                circles[slot].push(CircleGeom::new(p, r));
                placed = true;
                break;
            }
        }
        if !placed {
            return Ok(Some(id));
        }
    }
    Ok(None)
}

/// Place the requested items into the listed bins. Never opens a new bin.
pub fn pack(req: PackRequest, instance: &Instance) -> Result<PackOutcome> {
    let PackRequest {
        circle_ids,
        bin_ids,
        mut base,
    } = req;
    for &k in &bin_ids {
        if k >= base.bins.len() {
            return Err(CbppError::InvalidRequest(format!(
                "bin index {k} out of range ({} bins)",
                base.bins.len()
            )));
        }
    }
    let mut seen = vec![false; instance.len() + 1];
    for id in base.placed_ids() {
        instance.radius(id)?;
        seen[id] = true;
    }
    for &id in &circle_ids {
        instance.radius(id)?;
        if seen[id] {
            return Err(CbppError::InvalidRequest(format!(
                "item {id} is already placed or listed twice"
            )));
        }
        seen[id] = true;
    }

    match pack_in_place(&mut base, &circle_ids, &bin_ids, instance)? {
        None => Ok(PackOutcome::Packed(base)),
        Some(item_id) => Ok(PackOutcome::Unplaceable { item_id }),
    }
}

/// Item ids by non-increasing radius, ties by ascending id.
pub fn largest_first(instance: &Instance, ids: &mut [usize]) {
    ids.sort_by(|&a, &b| {
        let ra = instance.items[a - 1].radius;
        let rb = instance.items[b - 1].radius;
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
}

/// Pack a whole instance largest-first, opening bins on demand.
pub fn construct(instance: &Instance) -> Result<Solution> {
    instance.check()?;
    let mut order: Vec<usize> = instance.items.iter().map(|it| it.id).collect();
    largest_first(instance, &mut order);

    let bin_circle = instance.bin_circle();
    let tol = instance.tolerance();
    let mut sol = Solution::empty_for(instance);
    let mut circles: Vec<Vec<CircleGeom>> = Vec::new();

    for id in order {
        let r = instance.radius(id)?;
        let mut target = None;
        for (k, packed) in circles.iter().enumerate() {
            if let Some(p) = best_position(r, packed, &bin_circle, tol)? {
                target = Some((k, p));
                break;
            }
        }
        let (k, p) = match target {
            Some(t) => t,
            None => {
                sol.bins.push(BinState::default());
                circles.push(Vec::new());
                let p = best_position(r, &[], &bin_circle, tol)?
                    .expect("an empty bin admits any item no larger than the bin");
                (sol.bins.len() - 1, p)
            }
        };
        sol.bins[k].placements.push(Placement {
            item_id: id,
            x: p.x,
            y: p.y,
        });
        circles[k].push(CircleGeom::new(p, r));
    }
    model::compact(sol)
}
