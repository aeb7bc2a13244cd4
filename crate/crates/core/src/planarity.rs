//! Orthogonal decomposition ℝⁿ = Δ ⊕ E₀ ⊕ … ⊕ E_{⌊n/2⌋−1}, projected
//! diameters of lifted patches, and the planar / non-planar verdicts.
//!
//! A rule is planar-consistent when |λ₀| > 1 > |λ_j| for j ≥ 1 and the
//! measured E₀⊥ diameters of σ^k(prototile) stay under the closed-form window
//! bound Σ_E 2δ_E/(1−|λ_E|); non-planar evidence is growth of some E_j
//! diameter at rate ≈ |λ_j| > 1. The finite computation cannot prove
//! unboundedness — the eigenvalue criterion supplies the definitive verdict.

use crate::error::{Result, RosaError};
use crate::lattice::{lattice_zero, LatticeVector, Patch, PlacedTile, Symmetry};
use crate::spectral::{eigenvalues, EigenReport};
use crate::substitution::{apply_substitution, SubstitutionRule};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Coordinates of a lattice vector in the invariant decomposition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralCoordinates {
    /// Component along (1,…,1)/√n.
    pub delta: f64,
    /// c_j = √(2/n)·Σ_k x_k e^{i2π(2j+1)k/n}, j < ⌊n/2⌋ (isometric scaling).
    pub e_components: Vec<(f64, f64)>,
}

pub fn spectral_coords(sym: &Symmetry, v: &LatticeVector) -> SpectralCoordinates {
    let n = sym.n();
    debug_assert_eq!(v.len(), n);
    let sum: f64 = v.iter().map(|&c| c as f64).sum();
    let delta = sum / (n as f64).sqrt();
    let scale = (2.0 / n as f64).sqrt();
    let e_components = (0..sym.half())
        .map(|j| {
            let mut re = 0.0;
            let mut im = 0.0;
            for (k, &c) in v.iter().enumerate() {
                if c != 0 {
                    let a = 2.0 * PI * ((2 * j + 1) * k) as f64 / n as f64;
                    re += c as f64 * a.cos();
                    im += c as f64 * a.sin();
                }
            }
            (scale * re, scale * im)
        })
        .collect();
    SpectralCoordinates { delta, e_components }
}

/// Per-subspace diameters of a vertex set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiameterBreakdown {
    /// Diameter of the Δ-projection (an interval).
    pub delta: f64,
    /// per_plane[j] = diameter of the E_j projection (isometric norm).
    pub per_plane: Vec<f64>,
    /// Upper estimate of the E₀⊥ = Δ ⊕ E₁ ⊕ … diameter:
    /// √(delta² + Σ_{j≥1} per_plane[j]²).
    pub eperp_total: f64,
}

/// Diameter of a planar point set: convex hull + rotating calipers.
fn diameter_2d(points: &[(f64, f64)]) -> f64 {
    let hull = convex_hull(points);
    let m = hull.len();
    if m <= 1 {
        return 0.0;
    }
    if m == 2 {
        return dist(hull[0], hull[1]);
    }
    let mut best = 0.0f64;
    let mut k = 1usize;
    for i in 0..m {
        let edge = (
            hull[(i + 1) % m].0 - hull[i].0,
            hull[(i + 1) % m].1 - hull[i].1,
        );
        let area = |p: (f64, f64)| {
            edge.0 * (p.1 - hull[i].1) - edge.1 * (p.0 - hull[i].0)
        };
        while area(hull[(k + 1) % m]) > area(hull[k]) {
            k = (k + 1) % m;
        }
        best = best.max(dist(hull[i], hull[k]));
        best = best.max(dist(hull[(i + 1) % m], hull[k]));
    }
    best
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

/// Andrew's monotone chain.
fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let m = pts.len();
    if m <= 2 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * m);
    for &p in pts.iter().chain(pts.iter().rev().skip(1)) {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Per-subspace diameters of V(p); `eperp_total` excludes E₀.
pub fn eperp_diameter(sym: &Symmetry, p: &Patch) -> Result<DiameterBreakdown> {
    if p.tiles.is_empty() {
        return Err(RosaError::validation("empty patch has no diameter"));
    }
    let verts: Vec<LatticeVector> = p.vertex_set().into_iter().collect();
    Ok(vertex_breakdown(sym, &verts))
}

fn vertex_breakdown(sym: &Symmetry, verts: &[LatticeVector]) -> DiameterBreakdown {
    let h = sym.half();
    let mut deltas = Vec::with_capacity(verts.len());
    let mut planes: Vec<Vec<(f64, f64)>> = vec![Vec::with_capacity(verts.len()); h];
    for v in verts {
        let sc = spectral_coords(sym, v);
        deltas.push(sc.delta);
        for (j, &c) in sc.e_components.iter().enumerate() {
            planes[j].push(c);
        }
    }
    let dmin = deltas.iter().cloned().fold(f64::INFINITY, f64::min);
    let dmax = deltas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let delta = dmax - dmin;
    let per_plane: Vec<f64> = planes.iter().map(|pts| diameter_2d(pts)).collect();
    let eperp_sq: f64 = delta * delta
        + per_plane.iter().skip(1).map(|d| d * d).sum::<f64>();
    DiameterBreakdown { delta, per_plane, eperp_total: eperp_sq.sqrt() }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanarityReport {
    pub n: usize,
    pub edgeword: String,
    pub eigen: EigenReport,
    pub k_max: usize,
    /// diameters[d−1][k] = breakdown of σ^k(T_{0,d}) vertices, k = 0..=k_max.
    pub diameters: Vec<Vec<DiameterBreakdown>>,
    /// growth_ratios[j][k−1] = D_j(k)/D_j(k−1) where D_j(k) is the max over
    /// prototiles of diam_{E_j}(σ^k(t)) (NaN-free: 0 when undefined).
    pub growth_ratios: Vec<Vec<f64>>,
    /// Thickness surrogates δ_E = max over prototiles of diam_E(σ(t)).
    pub delta_subspace: Option<DiameterBreakdown>,
    /// Σ_E 2δ_E/(1−|λ_E|) over Δ and the contracting planes; None unless the
    /// spectrum is planar.
    pub closed_form_bound: Option<f64>,
    pub verdict: String,
    /// True if the tile budget stopped iteration before k_max.
    pub truncated_at: Option<usize>,
}

/// Measure per-subspace diameters of σ^k(t) for every prototile t and issue
/// the planarity verdict.
pub fn planarity_report(
    sym: &Symmetry,
    rule: &SubstitutionRule,
    k_max: usize,
    tile_budget: u64,
) -> Result<PlanarityReport> {
    if k_max < 1 {
        return Err(RosaError::validation("k_max must be ≥ 1"));
    }
    let h = sym.half();
    let mut diameters: Vec<Vec<DiameterBreakdown>> = Vec::with_capacity(h);
    let mut truncated_at = None;
    for d in 1..=h {
        let mut patch = Patch {
            n: sym.n(),
            tiles: vec![PlacedTile { anchor: lattice_zero(sym.n()), j: 0, k: d as u8 }],
        };
        let mut track = vec![eperp_diameter(sym, &patch)?];
        for k in 1..=k_max {
            match apply_substitution(sym, rule, &patch, tile_budget) {
                Ok(next) => patch = next,
                Err(RosaError::Budget(_)) => {
                    truncated_at = Some(truncated_at.map_or(k, |t: usize| t.min(k)));
                    break;
                }
                Err(e) => return Err(e),
            }
            track.push(eperp_diameter(sym, &patch)?);
        }
        diameters.push(track);
    }
    report_from_measurements(sym, rule, k_max, diameters, truncated_at)
}

fn report_from_measurements(
    sym: &Symmetry,
    rule: &SubstitutionRule,
    k_max: usize,
    diameters: Vec<Vec<DiameterBreakdown>>,
    truncated_at: Option<usize>,
) -> Result<PlanarityReport> {
    let eigen = eigenvalues(sym, &crate::edgeword::abelianize(sym, &rule.edgeword))?;
    let h = sym.half();
    // δ_E: max over prototiles of diam_E(σ(t)).
    let delta_subspace = if diameters.iter().all(|t| t.len() >= 2) {
        let delta = diameters.iter().map(|t| t[1].delta).fold(0.0, f64::max);
        let per_plane: Vec<f64> = (0..h)
            .map(|j| diameters.iter().map(|t| t[1].per_plane[j]).fold(0.0, f64::max))
            .collect();
        let eperp_sq =
            delta * delta + per_plane.iter().skip(1).map(|d| d * d).sum::<f64>();
        Some(DiameterBreakdown { delta, per_plane, eperp_total: eperp_sq.sqrt() })
    } else {
        None
    };
    let closed_form_bound = match (&delta_subspace, eigen.spectrum_planar()) {
        (Some(ds), true) => {
            // Δ has eigenvalue 0; planes j ≥ 1 contract.
            let mut b = 2.0 * ds.delta;
            for j in 1..h {
                b += 2.0 * ds.per_plane[j] / (1.0 - eigen.moduli[j]);
            }
            Some(b)
        }
        _ => None,
    };
    // Per-step growth of the E_j diameter D_j(k) = max over prototiles of
    // diam_{E_j}(σ^k(t)). The aggregate ratio converges to |λ_j| much faster
    // than per-prototile ratios, which carry a boundary transient at small k.
    let mut growth_ratios: Vec<Vec<f64>> = vec![Vec::new(); h];
    for j in 0..h {
        for k in 1..=k_max {
            let agg = |k: usize| -> f64 {
                diameters
                    .iter()
                    .filter(|track| track.len() > k)
                    .map(|track| track[k].per_plane[j])
                    .fold(0.0, f64::max)
            };
            let (prev, cur) = (agg(k - 1), agg(k));
            growth_ratios[j].push(if prev > 1e-9 { cur / prev } else { 0.0 });
        }
    }
    let verdict = if eigen.spectrum_planar() {
        let bound = closed_form_bound.unwrap_or(f64::INFINITY) + 1e-6;
        let under = diameters
            .iter()
            .all(|track| track.iter().all(|b| b.eperp_total <= bound));
        if under { "planar-consistent" } else { "inconclusive" }
    } else {
        // Some |λ_{j≥1}| > 1: non-planar evidence requires the matching
        // measured growth.
        let mut evidence = false;
        for j in 1..h {
            if eigen.moduli[j] > 1.0 {
                let grew = growth_ratios[j]
                    .last()
                    .map_or(false, |&r| r >= eigen.moduli[j] * 0.75);
                if grew {
                    evidence = true;
                }
            }
        }
        if evidence { "non-planar-evidence" } else { "inconclusive" }
    };
    Ok(PlanarityReport {
        n: sym.n(),
        edgeword: rule.edgeword.to_compact_string(),
        eigen,
        k_max,
        diameters,
        growth_ratios,
        delta_subspace,
        closed_form_bound,
        verdict: verdict.to_string(),
        truncated_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::billiard::find_planar_candidate;
    use crate::edgeword::subrosa_edgeword;
    use crate::lattice::lattice_zero;
    use crate::substitution::build_substitution;
    use crate::Symmetry;

    #[test]
    fn spectral_coords_are_isometric() {
        // The map ℤⁿ → Δ ⊕ E₀ ⊕ … preserves the Euclidean norm.
        let sym = Symmetry::new(7).unwrap();
        let vs: Vec<LatticeVector> = vec![
            sym.step_vector(0),
            sym.step_vector(3),
            [1, -2, 0, 3, 1, 0, -1].iter().copied().collect(),
            [5, 5, 5, 5, 5, 5, 5].iter().copied().collect(),
        ];
        for v in vs {
            let c = spectral_coords(&sym, &v);
            let direct: f64 = v.iter().map(|&x| (x as f64) * (x as f64)).sum();
            let mut split = c.delta * c.delta;
            for (re, im) in &c.e_components {
                split += re * re + im * im;
            }
            assert!((split - direct).abs() < 1e-9, "{v:?}: {split} vs {direct}");
        }
        // Constant vectors live entirely on the diagonal.
        let ones: LatticeVector = [1i32; 7].iter().copied().collect();
        let c = spectral_coords(&sym, &ones);
        assert!(c.e_components.iter().all(|(re, im)| re.abs() + im.abs() < 1e-12));
        assert!((c.delta - 7.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn single_tile_diameters() {
        let sym = Symmetry::new(5).unwrap();
        let p = Patch {
            n: 5,
            tiles: vec![crate::lattice::PlacedTile { anchor: lattice_zero(5), j: 0, k: 1 }],
        };
        let b = eperp_diameter(&sym, &p).unwrap();
        // Vertices {0, e₀, e₁, e₀+e₁}: Δ-extent 2/√5, E₁-extent of e₀−e₁ etc.
        assert!((b.delta - 2.0 / 5.0_f64.sqrt()).abs() < 1e-12);
        assert_eq!(b.per_plane.len(), 2);
        assert!(b.per_plane.iter().all(|&d| d > 0.0));
        let total = (b.delta * b.delta + b.per_plane[1] * b.per_plane[1]).sqrt();
        assert!((b.eperp_total - total).abs() < 1e-12);
    }

    #[test]
    fn subrosa5_is_planar_consistent() {
        let sym = Symmetry::new(5).unwrap();
        let rule = build_substitution(&sym, &subrosa_edgeword(&sym), 1_000_000).unwrap();
        let rep = planarity_report(&sym, &rule, 2, 1_000_000).unwrap();
        assert_eq!(rep.verdict, "planar-consistent");
        let bound = rep.closed_form_bound.unwrap();
        assert!((bound - 61.923132).abs() < 1e-3, "bound {bound}");
        assert!(rep.truncated_at.is_none());
        // E₁ diameters stay below the recursive bound at every measured k.
        for track in &rep.diameters {
            for b in track {
                assert!(b.eperp_total <= bound + 1e-6);
            }
        }
    }

    #[test]
    fn subrosa7_shows_nonplanar_growth() {
        let sym = Symmetry::new(7).unwrap();
        let rule = build_substitution(&sym, &subrosa_edgeword(&sym), 2_000_000).unwrap();
        let rep = planarity_report(&sym, &rule, 2, 2_000_000).unwrap();
        assert_eq!(rep.verdict, "non-planar-evidence");
        assert!(rep.eigen.moduli[1] > 1.0);
        let r = *rep.growth_ratios[1].last().unwrap();
        assert!((1.5..=2.5).contains(&r), "E₁ growth ratio {r}");
        assert!(rep.closed_form_bound.is_none());
    }

    #[test]
    fn planar_rosa7_is_planar_consistent() {
        let sym = Symmetry::new(7).unwrap();
        let c = find_planar_candidate(&sym, 64).unwrap();
        let rule = build_substitution(&sym, &c.edgeword, 2_000_000).unwrap();
        let rep = planarity_report(&sym, &rule, 1, 2_000_000).unwrap();
        assert_eq!(rep.verdict, "planar-consistent");
    }
}
