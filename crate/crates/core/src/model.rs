//! Problem instances, packing solutions, feasibility validation and the
//! objective surface.
//!
//! The energy minimized by the annealer is `f = K - d_max + d_min`, the
//! negation of the optimization function `F = -K + d_max - d_min`, where
//! `K` counts used bins and `d_*` are the extreme bin densities.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CbppError, Result};
use crate::geometry::{CircleGeom, Point, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Item {
    /// 1-based, contiguous within an instance.
    pub id: usize,
    pub radius: f64,
}

/// Radius family of a benchmark instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `r_i = i`, strongly heterogeneous.
    REqI,
    /// `r_i = sqrt(i)`, weakly heterogeneous.
    REqSqrtI,
    Custom,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::REqI => "r_eq_i",
            Family::REqSqrtI => "r_eq_sqrt_i",
            Family::Custom => "custom",
        }
    }

    /// Radius of the `i`-th base circle for benchmark families.
    pub fn radius_of(&self, i: u32) -> Option<f64> {
        match self {
            Family::REqI => Some(i as f64),
            Family::REqSqrtI => Some((i as f64).sqrt()),
            Family::Custom => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    pub bin_radius: f64,
    pub items: Vec<Item>,
    pub family: Family,
    pub n0: Option<u32>,
    pub seed: Option<u64>,
}

impl Instance {
    /// Build a custom instance; item ids are assigned `1..=n` in order.
    pub fn from_radii(name: impl Into<String>, bin_radius: f64, radii: &[f64]) -> Result<Self> {
        let items = radii
            .iter()
            .enumerate()
            .map(|(i, &radius)| Item { id: i + 1, radius })
            .collect();
        Self::new(name, bin_radius, items, Family::Custom, None, None)
    }

    pub fn new(
        name: impl Into<String>,
        bin_radius: f64,
        items: Vec<Item>,
        family: Family,
        n0: Option<u32>,
        seed: Option<u64>,
    ) -> Result<Self> {
        let inst = Self {
            name: name.into(),
            bin_radius,
            items,
            family,
            n0,
            seed,
        };
        inst.check()?;
        Ok(inst)
    }

    /// Check every invariant: positive finite radii, `r_i <= R`, non-empty,
    /// ids `1..=n` in order.
    pub fn check(&self) -> Result<()> {
        if !(self.bin_radius.is_finite() && self.bin_radius > 0.0) {
            return Err(CbppError::InvalidInstance(format!(
                "bin radius must be positive and finite, got {}",
                self.bin_radius
            )));
        }
        if self.items.is_empty() {
            return Err(CbppError::InvalidInstance("no items".into()));
        }
        for (idx, item) in self.items.iter().enumerate() {
            if item.id != idx + 1 {
                return Err(CbppError::InvalidInstance(format!(
                    "item ids must be contiguous from 1, found id {} at position {}",
                    item.id,
                    idx + 1
                )));
            }
            if !(item.radius.is_finite() && item.radius > 0.0) {
                return Err(CbppError::InvalidInstance(format!(
                    "item {} has invalid radius {}",
                    item.id, item.radius
                )));
            }
            if item.radius > self.bin_radius {
                return Err(CbppError::ItemLargerThanBin {
                    radius: item.radius,
                    bin_radius: self.bin_radius,
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn item(&self, id: usize) -> Result<&Item> {
        id.checked_sub(1)
            .and_then(|idx| self.items.get(idx))
            .ok_or(CbppError::UnknownItem(id))
    }

    pub fn radius(&self, id: usize) -> Result<f64> {
        self.item(id).map(|it| it.radius)
    }

    /// The bin in bin-local coordinates, centered at `(R, R)`.
    pub fn bin_circle(&self) -> CircleGeom {
        CircleGeom::at(self.bin_radius, self.bin_radius, self.bin_radius)
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance::for_bin_radius(self.bin_radius)
    }

    /// `Σ r_i²`, the total item area divided by π.
    pub fn total_area_units(&self) -> f64 {
        self.items.iter().map(|it| it.radius * it.radius).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub item_id: usize,
    pub x: f64,
    pub y: f64,
}

impl Placement {
    pub fn center(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BinState {
    pub placements: Vec<Placement>,
}

impl BinState {
    pub fn new(placements: Vec<Placement>) -> Self {
        Self { placements }
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    /// The placed items as circles.
    pub fn circles(&self, instance: &Instance) -> Result<Vec<CircleGeom>> {
        self.placements
            .iter()
            .map(|p| Ok(CircleGeom::new(p.center(), instance.radius(p.item_id)?)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub instance_name: String,
    pub bins: Vec<BinState>,
}

impl Solution {
    pub fn new(instance_name: impl Into<String>, bins: Vec<BinState>) -> Self {
        Self {
            instance_name: instance_name.into(),
            bins,
        }
    }

    pub fn empty_for(instance: &Instance) -> Self {
        Self::new(instance.name.clone(), Vec::new())
    }

    pub fn used_bins(&self) -> usize {
        self.bins.iter().filter(|b| !b.is_empty()).count()
    }

    pub fn placed_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.bins
            .iter()
            .flat_map(|b| b.placements.iter().map(|p| p.item_id))
    }

    /// Bin index holding `item_id`, if any.
    pub fn bin_of(&self, item_id: usize) -> Option<usize> {
        self.bins
            .iter()
            .position(|b| b.placements.iter().any(|p| p.item_id == item_id))
    }
}

/// Objective surface of a solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub k_used: usize,
    pub densities: Vec<f64>,
    pub d_min: f64,
    pub d_max: f64,
    /// `F = -K + d_max - d_min`, to be maximized.
    pub f_obj: f64,
    /// `f = -F`, to be minimized.
    pub energy: f64,
}

impl Metrics {
    /// Metrics of a solution whose used bins have the given densities.
    pub fn from_densities(densities: Vec<f64>) -> Result<Self> {
        if densities.is_empty() {
            return Err(CbppError::EmptySolution);
        }
        let d_min = densities.iter().copied().fold(f64::INFINITY, f64::min);
        let d_max = densities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let k = densities.len();
        let f_obj = -(k as f64) + d_max - d_min;
        Ok(Self {
            k_used: k,
            densities,
            d_min,
            d_max,
            f_obj,
            energy: (k as f64) - d_max + d_min,
        })
    }
}

/// Fraction of the bin area covered by its items, `Σ r_i² / R²`.
pub fn density(bin: &BinState, instance: &Instance) -> Result<f64> {
    let mut sum = 0.0;
    for p in &bin.placements {
        let r = instance.radius(p.item_id)?;
        sum += r * r;
    }
    Ok(sum / (instance.bin_radius * instance.bin_radius))
}

/// Metrics over the used (non-empty) bins of `sol`.
pub fn objective(sol: &Solution, instance: &Instance) -> Result<Metrics> {
    let densities = sol
        .bins
        .iter()
        .filter(|b| !b.is_empty())
        .map(|b| density(b, instance))
        .collect::<Result<Vec<_>>>()?;
    Metrics::from_densities(densities)
}

/// A single feasibility breach.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Unpacked { item_id: usize },
    Duplicated { item_id: usize, count: usize },
    UnknownItem { bin: usize, item_id: usize },
    Overlap { bin: usize, a: usize, b: usize, depth: f64 },
    Containment { bin: usize, item_id: usize, excess: f64 },
    NonFinite { bin: usize, item_id: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Unpacked { item_id } => write!(f, "unpacked item {item_id}"),
            Violation::Duplicated { item_id, count } => {
                write!(f, "duplicated item {item_id}: placed {count} times")
            }
            Violation::UnknownItem { bin, item_id } => {
                write!(f, "unknown item {item_id} in bin {bin}")
            }
            Violation::Overlap { bin, a, b, depth } => {
                write!(f, "overlap in bin {bin}: items {a} and {b} by {depth:e}")
            }
            Violation::Containment { bin, item_id, excess } => {
                write!(f, "containment in bin {bin}: item {item_id} outside by {excess:e}")
            }
            Violation::NonFinite { bin, item_id } => {
                write!(f, "non-finite coordinates in bin {bin}: item {item_id}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("OK");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Check the packing constraints and report every breach: each item packed
/// exactly once, no pairwise overlap within a bin, every item inside its bin.
pub fn validate(sol: &Solution, instance: &Instance, tol: Tolerance) -> ValidationReport {
    let mut violations = Vec::new();
    let n = instance.len();
    let mut counts = vec![0usize; n + 1];
    let bin = instance.bin_circle();

    for (k, b) in sol.bins.iter().enumerate() {
        let mut circles: Vec<(usize, CircleGeom)> = Vec::with_capacity(b.len());
        for p in &b.placements {
            let Ok(r) = instance.radius(p.item_id) else {
                violations.push(Violation::UnknownItem {
                    bin: k,
                    item_id: p.item_id,
                });
                continue;
            };
            counts[p.item_id] += 1;
            if !p.center().is_finite() {
                violations.push(Violation::NonFinite {
                    bin: k,
                    item_id: p.item_id,
                });
                continue;
            }
            let excess = p.center().distance(&bin.center) + r - bin.radius;
            if excess > tol.eps {
                violations.push(Violation::Containment {
                    bin: k,
                    item_id: p.item_id,
                    excess,
                });
            }
            circles.push((p.item_id, CircleGeom::new(p.center(), r)));
        }
        for (i, (id_a, a)) in circles.iter().enumerate() {
            for (id_b, c) in &circles[i + 1..] {
                let depth = a.radius + c.radius - a.center.distance(&c.center);
                if depth > tol.eps {
                    violations.push(Violation::Overlap {
                        bin: k,
                        a: *id_a,
                        b: *id_b,
                        depth,
                    });
                }
            }
        }
    }

    for (id, &count) in counts.iter().enumerate().skip(1) {
        match count {
            0 => violations.push(Violation::Unpacked { item_id: id }),
            1 => {}
            _ => violations.push(Violation::Duplicated { item_id: id, count }),
        }
    }
    ValidationReport { violations }
}

/// Drop empty bins, keeping the order of the rest.
pub fn compact(sol: Solution) -> Result<Solution> {
    let Solution {
        instance_name,
        bins,
    } = sol;
    let bins: Vec<BinState> = bins.into_iter().filter(|b| !b.is_empty()).collect();
    if bins.is_empty() {
        return Err(CbppError::EmptySolution);
    }
    Ok(Solution {
        instance_name,
        bins,
    })
}
