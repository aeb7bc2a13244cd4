//! De Bruijn multigrids G_n(γ), exact regularity checking, dualization to
//! rhombus patches, and the vertical-ray letter sequence.
//!
//! Grid i is the family of lines Re(z·ζ̄^i) + γ_i ∈ ℤ with ζ = e^{i2π/n}.
//! Intersections are enumerated in floating point; concurrency of a third
//! line is confirmed exactly: three lines (θ_t, a_t) are concurrent iff
//! Σ_cyc a_t·sin(θ_next − θ_prev) = 0, and each sine is (ζ^e − ζ^{−e})/2i, so
//! the condition becomes Φ_n(x) | P(x) for an integer polynomial P.

use crate::error::{Result, RosaError};
use crate::lattice::{Patch, PlacedTile, Symmetry};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Exact rational offset p/q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den <= 0 {
            return Err(RosaError::validation(format!("offset denominator must be positive: {num}/{den}")));
        }
        Ok(Rational { num, den })
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn ceil(self) -> i64 {
        self.num.div_euclid(self.den) + i64::from(self.num.rem_euclid(self.den) != 0)
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultigridSpec {
    pub n: usize,
    pub offsets: Vec<Rational>,
    pub radius: f64,
}

impl MultigridSpec {
    pub fn new(sym: &Symmetry, offsets: Vec<Rational>, radius: f64) -> Result<Self> {
        if offsets.len() != sym.n() {
            return Err(RosaError::validation(format!(
                "expected {} offsets, got {}",
                sym.n(),
                offsets.len()
            )));
        }
        if radius <= 0.0 {
            return Err(RosaError::validation("radius must be positive"));
        }
        Ok(MultigridSpec { n: sym.n(), offsets, radius })
    }

    pub fn uniform(sym: &Symmetry, offset: Rational, radius: f64) -> Result<Self> {
        Self::new(sym, vec![offset; sym.n()], radius)
    }
}

/// Crossing of line k_i of grid i with line k_j of grid j (i < j).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridIntersection {
    pub i: usize,
    pub ki: i64,
    pub j: usize,
    pub kj: i64,
    pub point: (f64, f64),
}

fn theta(n: usize, i: usize) -> f64 {
    2.0 * PI * i as f64 / n as f64
}

/// Signed line coordinate of z in grid i: Re(z·ζ̄^i) + γ_i.
fn line_coord(spec: &MultigridSpec, i: usize, z: (f64, f64)) -> f64 {
    let t = theta(spec.n, i);
    z.0 * t.cos() + z.1 * t.sin() + spec.offsets[i].to_f64()
}

/// All pairwise line crossings within the disk, sorted by (i, ki, j, kj).
pub fn intersections(spec: &MultigridSpec) -> Vec<GridIntersection> {
    let n = spec.n;
    let r = spec.radius;
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let (ti, tj) = (theta(n, i), theta(n, j));
            let det = (tj - ti).sin();
            debug_assert!(det.abs() > 1e-12);
            let gi = spec.offsets[i].to_f64();
            let gj = spec.offsets[j].to_f64();
            let k_range = |g: f64| {
                let lo = (-r + g).ceil() as i64;
                let hi = (r + g).floor() as i64;
                lo..=hi
            };
            for ki in k_range(gi) {
                let ai = ki as f64 - gi;
                for kj in k_range(gj) {
                    let aj = kj as f64 - gj;
                    // Solve x cosθ + y sinθ = a for both lines.
                    let x = (ai * tj.sin() - aj * ti.sin()) / det;
                    let y = (aj * ti.cos() - ai * tj.cos()) / det;
                    if x * x + y * y <= r * r {
                        out.push(GridIntersection { i, ki, j, kj, point: (x, y) });
                    }
                }
            }
        }
    }
    out.sort_by_key(|g| (g.i, g.ki, g.j, g.kj));
    out
}

/// Integer polynomial helpers for the exact backend.
fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x != 0 {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn poly_div_exact(a: &[i64], b: &[i64]) -> Vec<i64> {
    // a / b for monic b dividing a exactly (synthetic long division).
    let db = b.len() - 1;
    let mut r = a.to_vec();
    let mut q = vec![0i64; a.len() - db];
    for qi in (0..q.len()).rev() {
        let lead = r[qi + db];
        q[qi] = lead;
        if lead != 0 {
            for (k, &c) in b.iter().enumerate() {
                r[qi + k] -= lead * c;
            }
        }
    }
    debug_assert!(r.iter().all(|&c| c == 0), "division was not exact");
    q
}

/// The n-th cyclotomic polynomial, integer coefficients, monic.
pub fn cyclotomic(n: usize) -> Vec<i64> {
    if n == 1 {
        return vec![-1, 1];
    }
    // x^n − 1 divided by ∏_{d|n, d<n} Φ_d.
    let mut num = vec![0i64; n + 1];
    num[0] = -1;
    num[n] = 1;
    let mut den = vec![1i64];
    for d in 1..n {
        if n % d == 0 {
            den = poly_mul(&den, &cyclotomic(d));
        }
    }
    poly_div_exact(&num, &den)
}

/// Exact concurrency test for lines (θ_i, a_i), (θ_j, a_j), (θ_m, a_m) with
/// a_t = k_t − γ_t rational: the determinant vanishes iff
/// Σ_cyc a_t(x^{e} − x^{−e}) ≡ 0 mod Φ_n, cleared to integer coefficients.
fn concurrent_exact(spec: &MultigridSpec, lines: [(usize, i64); 3], phi: &[i64]) -> bool {
    let n = spec.n;
    let mut coeffs = vec![0i128; n];
    // Common denominator for the three a_t.
    let dens: Vec<i64> = lines.iter().map(|&(t, _)| spec.offsets[t].den).collect();
    let l = dens.iter().fold(1i64, |acc, &d| acc / gcd(acc, d) * d);
    // Cyclic sum: term for index t uses exponent (next − prev).
    for c in 0..3 {
        let (t, k) = lines[c];
        let (tn, _) = lines[(c + 1) % 3];
        let (tp, _) = lines[(c + 2) % 3];
        let a_num = (k * spec.offsets[t].den - spec.offsets[t].num) * (l / spec.offsets[t].den);
        let e = (n + tn - tp) % n;
        coeffs[e] += a_num as i128;
        coeffs[(n - e) % n] -= a_num as i128;
    }
    // Reduce mod Φ_n (monic, i128 to be safe with big k ranges).
    let phi128: Vec<i128> = phi.iter().map(|&c| c as i128).collect();
    let mut r = coeffs;
    let db = phi128.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        if lead != 0 {
            let shift = r.len() - 1 - db;
            for (kk, &c) in phi128.iter().enumerate() {
                r[shift + kk] -= lead * c;
            }
        }
        r.pop();
    }
    r.iter().all(|&c| c == 0)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

/// A point where three or more grid lines meet.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TriplePoint {
    pub point: (f64, f64),
    pub lines: Vec<(usize, i64)>,
}

/// Enumerate pairwise crossings and confirm exactly that no third line passes
/// through any of them. Empty list iff the multigrid is regular in the disk.
pub fn regularity_check(spec: &MultigridSpec) -> Vec<TriplePoint> {
    let phi = cyclotomic(spec.n);
    let mut out = Vec::new();
    for g in intersections(spec) {
        let mut extra = Vec::new();
        for m in 0..spec.n {
            if m == g.i || m == g.j {
                continue;
            }
            let t = line_coord(spec, m, g.point);
            let km = t.round() as i64;
            // Floating-point screen, then exact confirmation.
            if (t - km as f64).abs() < 1e-6
                && concurrent_exact(spec, [(g.i, g.ki), (g.j, g.kj), (m, km)], &phi)
            {
                extra.push((m, km));
            }
        }
        if !extra.is_empty() {
            let mut lines = vec![(g.i, g.ki), (g.j, g.kj)];
            lines.extend(extra);
            out.push(TriplePoint { point: g.point, lines });
        }
    }
    out
}

/// Dualize: one rhombus per crossing. The anchor is the ceil-vector of the
/// cell on the lower side of both crossing lines, minus the base cell's
/// ceil-vector (the cell containing the origin), so the patch is anchored
/// at lattice zero.
pub fn dual_tiling(sym: &Symmetry, spec: &MultigridSpec) -> Result<Patch> {
    if spec.n != sym.n() {
        return Err(RosaError::validation("spec and symmetry orders disagree"));
    }
    let triples = regularity_check(spec);
    if !triples.is_empty() {
        return Err(RosaError::validation(format!(
            "multigrid is singular: {} triple point(s), first at ({:.6}, {:.6})",
            triples.len(),
            triples[0].point.0,
            triples[0].point.1
        )));
    }
    let base: Vec<i64> = spec.offsets.iter().map(|g| g.ceil()).collect();
    let mut patch = Patch::new(spec.n);
    for g in intersections(spec) {
        let mut anchor = crate::lattice::lattice_zero(spec.n);
        for m in 0..spec.n {
            let c = if m == g.i {
                g.ki
            } else if m == g.j {
                g.kj
            } else {
                let t = line_coord(spec, m, g.point);
                let c = t.ceil();
                if (t - t.round()).abs() < 1e-9 {
                    return Err(RosaError::Internal(format!(
                        "ambiguous cell coordinate at crossing ({}, {}, {}, {})",
                        g.i, g.ki, g.j, g.kj
                    )));
                }
                c as i64
            };
            anchor[m] = (c - base[m]) as i32;
        }
        patch.tiles.push(PlacedTile { anchor, j: g.i as u8, k: g.j as u8 });
    }
    if patch.tiles.is_empty() {
        return Err(RosaError::validation("no crossings in the disk; increase radius"));
    }
    patch.canonicalize();
    Ok(patch)
}

/// Rhombus-type sequence along the vertical half-line from the origin for
/// offsets all 1/2: grids i and n−i cross on the axis at heights
/// (2k−1)/(2sin(2πi/n)), contributing letter |n−4i|.
pub fn vertical_ray_word(sym: &Symmetry, spec: &MultigridSpec, count: usize) -> Result<Vec<u8>> {
    if spec.offsets.iter().any(|&g| g != Rational { num: 1, den: 2 }) {
        return Err(RosaError::validation("vertical ray word requires all offsets = 1/2"));
    }
    let n = sym.n();
    let mut events: Vec<(f64, u8)> = Vec::with_capacity(count * sym.half());
    for i in 1..=sym.half() {
        let rate = 2.0 * (2.0 * PI * i as f64 / n as f64).sin();
        let letter = (n as i64 - 4 * i as i64).unsigned_abs() as u8;
        for k in 1..=count {
            events.push(((2 * k - 1) as f64 / rate, letter));
        }
    }
    events.sort_by(|a, b| a.partial_cmp(b).unwrap());
    events.truncate(count);
    Ok(events.into_iter().map(|(_, l)| l).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::billiard::billiard_word;
    use crate::lattice::validate_patch;

    fn half() -> Rational {
        Rational::new(1, 2).unwrap()
    }

    #[test]
    fn rational_basics() {
        let r = Rational::new(-6, 4).unwrap();
        assert!((r.to_f64() + 1.5).abs() < 1e-15);
        assert!(Rational::new(1, 0).is_err());
        assert!(Rational::new(6, -4).is_err());
        assert_eq!(Rational::new(7, 2).unwrap().ceil(), 4);
        assert_eq!(Rational::new(-7, 2).unwrap().ceil(), -3);
        assert!(Rational::new(0, 5).unwrap().is_zero());
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic(1), vec![-1, 1]);
        assert_eq!(cyclotomic(5), vec![1, 1, 1, 1, 1]);
        assert_eq!(cyclotomic(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn half_offset_pentagrid_is_regular() {
        let sym = Symmetry::new(5).unwrap();
        let spec = MultigridSpec::uniform(&sym, half(), 10.0).unwrap();
        assert!(regularity_check(&spec).is_empty());
    }

    #[test]
    fn zero_offsets_are_singular() {
        // All n lines through the origin are concurrent.
        let sym = Symmetry::new(5).unwrap();
        let spec = MultigridSpec::uniform(&sym, Rational::new(0, 1).unwrap(), 3.0).unwrap();
        let triples = regularity_check(&spec);
        assert!(!triples.is_empty());
        assert!(dual_tiling(&sym, &spec).is_err());
    }

    #[test]
    fn dual_of_half_offset_pentagrid_is_valid() {
        let sym = Symmetry::new(5).unwrap();
        let spec = MultigridSpec::uniform(&sym, half(), 6.0).unwrap();
        let patch = dual_tiling(&sym, &spec).unwrap();
        assert!(patch.tiles.len() > 200, "got {}", patch.tiles.len());
        let rep = validate_patch(&sym, &patch);
        assert!(rep.is_valid(), "{:?}", &rep.violations[..rep.violations.len().min(3)]);
    }

    #[test]
    fn ray_word_matches_billiard() {
        for n in [3usize, 5, 7] {
            let sym = Symmetry::new(n).unwrap();
            let spec = MultigridSpec::uniform(&sym, half(), 4.0).unwrap();
            let w = vertical_ray_word(&sym, &spec, 40).unwrap();
            assert_eq!(w, billiard_word(&sym, 40), "n={n}");
        }
        let sym = Symmetry::new(5).unwrap();
        let spec = MultigridSpec::uniform(&sym, half(), 4.0).unwrap();
        assert_eq!(vertical_ray_word(&sym, &spec, 7).unwrap(), vec![1, 3, 1, 3, 1, 1, 3]);
        assert!(vertical_ray_word(&sym, &spec, 0).unwrap().is_empty());
        let skew = MultigridSpec::new(
            &sym,
            vec![half(), half(), half(), half(), Rational::new(1, 3).unwrap()],
            4.0,
        )
        .unwrap();
        assert!(vertical_ray_word(&sym, &skew, 5).is_err());
    }

    #[test]
    fn intersections_lie_on_both_grids() {
        let sym = Symmetry::new(7).unwrap();
        let spec = MultigridSpec::uniform(&sym, half(), 3.0).unwrap();
        let pts = intersections(&spec);
        assert!(!pts.is_empty());
        for p in &pts {
            for (grid, k) in [(p.i, p.ki), (p.j, p.kj)] {
                let a = 2.0 * std::f64::consts::PI * grid as f64 / 7.0;
                let proj = p.point.0 * a.cos() + p.point.1 * a.sin();
                assert!((proj + 0.5 - k as f64).abs() < 1e-9);
            }
        }
    }
}
