//! SVG layout drawings.
//!
//! Bins are drawn left to right, densest first, each at the same pixel
//! size. Items are filled with a color chosen by the rank of their radius
//! among the instance's distinct radii, so equal circles share a color
//! across bins. Output depends only on the solution and instance.

use std::fmt::Write as _;

use cbpp_core::model;
use cbpp_core::{Instance, Solution};

/// Pixel radius of every bin.
pub const BIN_PX: f64 = 100.0;
const MARGIN: f64 = 20.0;
const GAP: f64 = 20.0;
const LABEL_HEIGHT: f64 = 30.0;

fn palette(instance: &Instance) -> Vec<f64> {
    let mut radii: Vec<f64> = instance.items.iter().map(|i| i.radius).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    radii
}

fn fill_for(radius: f64, radii: &[f64]) -> String {
    let rank = radii.partition_point(|&r| r < radius);
    // golden-angle hue steps keep neighboring ranks apart
    let hue = (rank as f64 * 137.507_764).rem_euclid(360.0);
    format!("hsl({hue:.1},60%,65%)")
}

/// Render `solution` as an SVG document.
pub fn render_svg(solution: &Solution, instance: &Instance) -> cbpp_core::Result<String> {
    let scale = BIN_PX / instance.bin_radius;
    let mut bins: Vec<(usize, f64)> = solution
        .bins
        .iter()
        .enumerate()
        .filter(|(_, b)| !b.is_empty())
        .map(|(k, b)| model::density(b, instance).map(|d| (k, d)))
        .collect::<cbpp_core::Result<_>>()?;
    bins.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let cell = 2.0 * BIN_PX + GAP;
    let count = bins.len().max(1) as f64;
    let width = 2.0 * MARGIN + count * cell - GAP;
    let height = 2.0 * MARGIN + 2.0 * BIN_PX + LABEL_HEIGHT;
    let radii = palette(instance);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (slot, &(k, d)) in bins.iter().enumerate() {
        let left = MARGIN + slot as f64 * cell;
        let cx = left + BIN_PX;
        let cy = MARGIN + BIN_PX;
        let _ = writeln!(svg, r#"<g id="bin-{}">"#, slot + 1);
        let _ = writeln!(
            svg,
            r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="{BIN_PX:.3}" fill="none" stroke="#333333" stroke-width="1.5"/>"##
        );
        for p in &solution.bins[k].placements {
            let r = instance.radius(p.item_id)?;
            // bin-local y grows upward; SVG y grows downward
            let x = left + p.x * scale;
            let y = MARGIN + 2.0 * BIN_PX - p.y * scale;
            let _ = writeln!(
                svg,
                r##"<circle cx="{x:.3}" cy="{y:.3}" r="{:.3}" fill="{}" stroke="#222222" stroke-width="0.5"/>"##,
                r * scale,
                fill_for(r, &radii)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{cx:.3}" y="{:.3}" font-family="sans-serif" font-size="14" text-anchor="middle">{d:.2}</text>"#,
            MARGIN + 2.0 * BIN_PX + LABEL_HEIGHT - 8.0
        );
        let _ = writeln!(svg, "</g>");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
