//! Deterministic SVG output: one polygon per tile at embedded coordinates,
//! tiles sorted by (anchor, type), coordinates rounded to 6 decimals.

use crate::error::{Result, RosaError};
use crate::lattice::{Patch, Symmetry};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RenderSpec {
    pub scale: f64,
    pub stroke_width: f64,
    pub margin: f64,
    /// Fill per angle-class parameter d (cycled if shorter than ⌊n/2⌋).
    pub palette: Vec<String>,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            scale: 24.0,
            stroke_width: 0.5,
            margin: 8.0,
            palette: ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#edc948"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

fn fmt6(x: f64) -> String {
    // Normalize negative zero so output bytes are stable.
    let r = (x * 1e6).round() / 1e6;
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r:.6}")
}

/// Render a patch; byte-deterministic for identical input and spec.
pub fn render_svg(sym: &Symmetry, patch: &Patch, spec: &RenderSpec) -> Result<String> {
    if patch.tiles.is_empty() {
        return Err(RosaError::validation("empty patch"));
    }
    if patch.n != sym.n() {
        return Err(RosaError::validation("patch and symmetry orders disagree"));
    }
    let mut sorted = patch.clone();
    sorted.canonicalize();
    // Embedded quads, y negated (SVG y grows downward).
    let quads: Vec<[(f64, f64); 4]> = sorted
        .tiles
        .iter()
        .map(|t| {
            let vs = t.vertices();
            [0, 1, 2, 3].map(|i| {
                let (x, y) = sym.embed(&vs[i]);
                (x * spec.scale, -y * spec.scale)
            })
        })
        .collect();
    let mut min = (f64::INFINITY, f64::INFINITY);
    let mut max = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for q in &quads {
        for p in q {
            min.0 = min.0.min(p.0);
            min.1 = min.1.min(p.1);
            max.0 = max.0.max(p.0);
            max.1 = max.1.max(p.1);
        }
    }
    let (x0, y0) = (min.0 - spec.margin, min.1 - spec.margin);
    let w = max.0 - min.0 + 2.0 * spec.margin;
    let h = max.1 - min.1 + 2.0 * spec.margin;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">",
        fmt6(x0),
        fmt6(y0),
        fmt6(w),
        fmt6(h)
    );
    let _ = writeln!(
        out,
        "<g stroke=\"#333333\" stroke-width=\"{}\" stroke-linejoin=\"round\">",
        fmt6(spec.stroke_width)
    );
    for (tile, quad) in sorted.tiles.iter().zip(&quads) {
        let d = {
            let diff = (tile.k - tile.j) as usize;
            diff.min(sym.n() - diff)
        };
        let fill = &spec.palette[(d - 1) % spec.palette.len()];
        let pts: Vec<String> = quad.iter().map(|p| format!("{},{}", fmt6(p.0), fmt6(p.1))).collect();
        let _ = writeln!(out, "<polygon fill=\"{}\" points=\"{}\"/>", fill, pts.join(" "));
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{lattice_zero, star_patch, PlacedTile};

    #[test]
    fn svg_is_deterministic_and_counts_polygons() {
        let sym = Symmetry::new(5).unwrap();
        let star = star_patch(&sym);
        let spec = RenderSpec::default();
        let a = render_svg(&sym, &star, &spec).unwrap();
        let b = render_svg(&sym, &star, &spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.matches("<polygon").count(), star.tiles.len());
        assert!(a.starts_with("<?xml") || a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn single_tile_renders_one_polygon() {
        let sym = Symmetry::new(7).unwrap();
        let p = Patch {
            n: 7,
            tiles: vec![PlacedTile { anchor: lattice_zero(7), j: 1, k: 4 }],
        };
        let svg = render_svg(&sym, &p, &RenderSpec::default()).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 1);
    }
}
