//! Planar circle geometry: intersections, tangency candidates, containment
//! and overlap predicates, and the region tests used by the perturbation
//! operators.

use serde::{Deserialize, Serialize};

use crate::error::{CbppError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn distance_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn distance(&self, other: &Point) -> f64 {
        self.distance_sq(other).sqrt()
    }

    /// Point at `radius` from `self` in direction `angle_deg` (counter-clockwise from +x).
    pub fn polar_offset(&self, radius: f64, angle_deg: f64) -> Point {
        let (s, c) = angle_deg.to_radians().sin_cos();
        Point::new(self.x + radius * c, self.y + radius * s)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// A circle: either a packed item or the bin itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleGeom {
    pub center: Point,
    pub radius: f64,
}

impl CircleGeom {
    pub const fn new(center: Point, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn at(x: f64, y: f64, radius: f64) -> Self {
        Self::new(Point::new(x, y), radius)
    }
}

/// A circular sector of a bin, spanning counter-clockwise from `alpha_deg`
/// to `beta_deg`. Wraps through 0° when `beta_deg < alpha_deg`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorRegion {
    pub origin: Point,
    pub outer_radius: f64,
    pub alpha_deg: f64,
    pub beta_deg: f64,
}

impl SectorRegion {
    pub fn new(origin: Point, outer_radius: f64, alpha_deg: f64, beta_deg: f64) -> Self {
        Self {
            origin,
            outer_radius,
            alpha_deg: normalize_deg(alpha_deg),
            beta_deg: normalize_deg(beta_deg),
        }
    }

    /// Central angle in degrees.
    pub fn span_deg(&self) -> f64 {
        let span = self.beta_deg - self.alpha_deg;
        if span < 0.0 {
            span + 360.0
        } else {
            span
        }
    }

    /// Whether a normalized polar angle lies on the arc (inclusive).
    pub fn contains_angle(&self, theta_deg: f64) -> bool {
        if self.alpha_deg <= self.beta_deg {
            self.alpha_deg <= theta_deg && theta_deg <= self.beta_deg
        } else {
            theta_deg >= self.alpha_deg || theta_deg <= self.beta_deg
        }
    }

    pub fn alpha_end(&self) -> Point {
        self.origin.polar_offset(self.outer_radius, self.alpha_deg)
    }

    pub fn beta_end(&self) -> Point {
        self.origin.polar_offset(self.outer_radius, self.beta_deg)
    }
}

/// Absolute length tolerance for tangency, containment and overlap tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub eps: f64,
}

impl Tolerance {
    pub const fn new(eps: f64) -> Self {
        Self { eps }
    }

    /// `1e-9 * max(1, R)`.
    pub fn for_bin_radius(bin_radius: f64) -> Self {
        Self::new(1e-9 * bin_radius.max(1.0))
    }

    /// Half of `eps`, used when accepting a new position so that packed
    /// layouts still validate at `eps` after rounding.
    pub fn placement(self) -> Self {
        Self::new(0.5 * self.eps)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-9)
    }
}

/// Map an angle in degrees onto `[0, 360)`.
pub fn normalize_deg(angle: f64) -> f64 {
    let mut a = angle % 360.0;
    if a < 0.0 {
        a += 360.0;
    }
    if a >= 360.0 {
        a -= 360.0;
    }
    a
}

/// Intersection points of two circle outlines.
///
/// Tangent circles (external or internal, within `tol`) yield a single
/// point; concentric, disjoint or nested circles yield none.
pub fn circle_circle_intersection(c1: &CircleGeom, c2: &CircleGeom, tol: Tolerance) -> Vec<Point> {
    let mut out = Vec::with_capacity(2);
    circle_circle_intersection_into(c1, c2, tol, &mut out);
    out
}

fn circle_circle_intersection_into(
    c1: &CircleGeom,
    c2: &CircleGeom,
    tol: Tolerance,
    out: &mut Vec<Point>,
) {
    let dx = c2.center.x - c1.center.x;
    let dy = c2.center.y - c1.center.y;
    let d = (dx * dx + dy * dy).sqrt();
    if d <= tol.eps {
        return;
    }
    let (r1, r2) = (c1.radius, c2.radius);
    let sum = r1 + r2;
    let diff = (r1 - r2).abs();
    if d > sum + tol.eps || d < diff - tol.eps {
        return;
    }
    let a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    let (ux, uy) = (dx / d, dy / d);
    let base = Point::new(c1.center.x + a * ux, c1.center.y + a * uy);
    let h2 = r1 * r1 - a * a;
    if (d - sum).abs() <= tol.eps || (d - diff).abs() <= tol.eps || h2 <= 0.0 {
        out.push(base);
        return;
    }
    let h = h2.sqrt();
    out.push(Point::new(base.x - h * uy, base.y + h * ux));
    out.push(Point::new(base.x + h * uy, base.y - h * ux));
}

/// `|item.center - bin.center| + item.radius <= bin.radius + eps`.
#[inline]
pub fn contains(bin: &CircleGeom, item: &CircleGeom, tol: Tolerance) -> bool {
    item.center.distance(&bin.center) + item.radius <= bin.radius + tol.eps
}

/// Strict overlap; tangent circles do not overlap.
#[inline]
pub fn overlaps(a: &CircleGeom, b: &CircleGeom, tol: Tolerance) -> bool {
    let limit = a.radius + b.radius - tol.eps;
    if limit <= 0.0 {
        return false;
    }
    a.center.distance_sq(&b.center) < limit * limit
}

/// Gap between an item of radius `r` centered at `p` and the bin boundary.
/// Negative when the item sticks out.
#[inline]
pub fn boundary_clearance(p: &Point, r: f64, bin: &CircleGeom) -> f64 {
    bin.radius - p.distance(&bin.center) - r
}

pub fn point_in_sector(p: &Point, s: &SectorRegion) -> bool {
    let dx = p.x - s.origin.x;
    let dy = p.y - s.origin.y;
    let d = dx.hypot(dy);
    if d > s.outer_radius {
        return false;
    }
    if d == 0.0 {
        return true;
    }
    let theta = normalize_deg(dy.atan2(dx).to_degrees());
    s.contains_angle(theta)
}

/// Whether the disc `c` meets the closed segment `seg_start`..`seg_end`.
pub fn circle_intersects_segment(c: &CircleGeom, seg_start: &Point, seg_end: &Point) -> bool {
    let vx = seg_end.x - seg_start.x;
    let vy = seg_end.y - seg_start.y;
    let wx = c.center.x - seg_start.x;
    let wy = c.center.y - seg_start.y;
    let len_sq = vx * vx + vy * vy;
    let t = if len_sq > 0.0 {
        ((wx * vx + wy * vy) / len_sq).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let closest = Point::new(seg_start.x + t * vx, seg_start.y + t * vy);
    closest.distance_sq(&c.center) <= c.radius * c.radius
}

/// A disc meets a sector if its center lies inside the sector or it crosses
/// one of the two bounding radii. Items are always inside the bin, so the
/// arc needs no test of its own.
pub fn circle_intersects_sector(c: &CircleGeom, s: &SectorRegion) -> bool {
    point_in_sector(&c.center, s)
        || circle_intersects_segment(c, &s.origin, &s.alpha_end())
        || circle_intersects_segment(c, &s.origin, &s.beta_end())
}

pub fn circle_intersects_circle_region(c: &CircleGeom, region: &CircleGeom) -> bool {
    c.center.distance(&region.center) <= c.radius + region.radius
}

/// The object a tangent position touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Contact {
    Bin,
    /// Index into the `packed` slice handed to the candidate generator.
    Packed(usize),
}

/// A tangent position with the two objects that generated it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentPoint {
    pub point: Point,
    pub touching: (Contact, Contact),
}

/// Every position for a circle of radius `r` tangent to two objects of
/// `packed ∪ {bin}`, before any feasibility filtering.
///
/// An empty bin yields the single bootstrap position touching the boundary
/// at polar angle 0, with `touching == (Bin, Bin)`.
pub fn raw_tangent_points(
    r: f64,
    packed: &[CircleGeom],
    bin: &CircleGeom,
    tol: Tolerance,
) -> Result<Vec<TangentPoint>> {
    let mut out = Vec::with_capacity(4 * packed.len().max(1));
    bin_contact_points(r, packed, bin, tol, &mut out)?;
    pair_contact_points(r, packed, bin, tol, f64::INFINITY, &mut out);
    Ok(out)
}

/// Positions tangent to the bin boundary and one packed circle, or the
/// bootstrap position when the bin is empty.
pub(crate) fn bin_contact_points(
    r: f64,
    packed: &[CircleGeom],
    bin: &CircleGeom,
    tol: Tolerance,
    out: &mut Vec<TangentPoint>,
) -> Result<()> {
    if r > bin.radius {
        return Err(CbppError::ItemLargerThanBin {
            radius: r,
            bin_radius: bin.radius,
        });
    }
    if packed.is_empty() {
        out.push(TangentPoint {
            point: Point::new(bin.center.x + bin.radius - r, bin.center.y),
            touching: (Contact::Bin, Contact::Bin),
        });
        return Ok(());
    }
    let deflated = CircleGeom::new(bin.center, bin.radius - r);
    let mut scratch = Vec::with_capacity(2);
    for (i, a) in packed.iter().enumerate() {
        scratch.clear();
        circle_circle_intersection_into(&CircleGeom::new(a.center, a.radius + r), &deflated, tol, &mut scratch);
        out.extend(scratch.iter().map(|&point| TangentPoint {
            point,
            touching: (Contact::Packed(i), Contact::Bin),
        }));
    }
    Ok(())
}

/// Positions tangent to two packed circles, skipping pairs whose every
/// tangent position has clearance above `max_clearance`.
///
/// A position tangent to `a` lies within `|a - c| + r_a + r` of the bin
/// center, so its clearance is at least `R - 2r - r_a - |a - c|`.
pub(crate) fn pair_contact_points(
    r: f64,
    packed: &[CircleGeom],
    bin: &CircleGeom,
    tol: Tolerance,
    max_clearance: f64,
    out: &mut Vec<TangentPoint>,
) {
    let near: Vec<usize> = (0..packed.len())
        .filter(|&i| {
            let a = &packed[i];
            bin.radius - 2.0 * r - a.radius - a.center.distance(&bin.center) <= max_clearance
        })
        .collect();
    let mut scratch = Vec::with_capacity(2);
    for (pos, &i) in near.iter().enumerate() {
        let a = &packed[i];
        let inflated_a = CircleGeom::new(a.center, a.radius + r);
        for &j in &near[pos + 1..] {
            let b = &packed[j];
            let reach = a.radius + b.radius + 2.0 * r + tol.eps;
            if a.center.distance_sq(&b.center) > reach * reach {
                continue;
            }
            scratch.clear();
            circle_circle_intersection_into(&inflated_a, &CircleGeom::new(b.center, b.radius + r), tol, &mut scratch);
            out.extend(scratch.iter().map(|&point| TangentPoint {
                point,
                touching: (Contact::Packed(i), Contact::Packed(j)),
            }));
        }
    }
}

/// Whether a circle of radius `r` at `p` fits inside `bin` without
/// overlapping any of `packed`.
pub fn is_feasible_position(
    p: &Point,
    r: f64,
    packed: &[CircleGeom],
    bin: &CircleGeom,
    tol: Tolerance,
) -> bool {
    let probe = CircleGeom::new(*p, r);
    contains(bin, &probe, tol) && !packed.iter().any(|q| overlaps(&probe, q, tol))
}

/// Tangent positions that are feasible at `tol.placement()`, with their
/// generating contacts.
pub fn tangent_points(
    r: f64,
    packed: &[CircleGeom],
    bin: &CircleGeom,
    tol: Tolerance,
) -> Result<Vec<TangentPoint>> {
    let mut pts = raw_tangent_points(r, packed, bin, tol)?;
    let strict = tol.placement();
    pts.retain(|tp| is_feasible_position(&tp.point, r, packed, bin, strict));
    Ok(pts)
}

/// Feasible center positions for a circle of radius `r` that touch two
/// objects among `packed` and the bin boundary.
pub fn tangent_candidates(
    r: f64,
    packed: &[CircleGeom],
    bin: &CircleGeom,
    tol: Tolerance,
) -> Result<Vec<Point>> {
    Ok(tangent_points(r, packed, bin, tol)?
        .into_iter()
        .map(|tp| tp.point)
        .collect())
}
