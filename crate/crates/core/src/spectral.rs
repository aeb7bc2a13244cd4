//! Circulant expansion matrices and their closed-form spectra.
//!
//! The expansion of a pseudo-substitution with edgeword u is the circulant
//! M_φ = Σ [u]_i · M_i(n), where the elementary matrix M_i(n) is the expansion
//! of the single-letter edgeword 2i+1. All integer arithmetic is exact; the
//! spectral identities are evaluated in f64 against closed-form cosines.

use crate::error::{Result, RosaError};
use crate::lattice::{LatticeVector, Symmetry};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Circulant integer matrix circ(m₀,…,m_{n−1}): row r is the cyclic right
/// shift of the first row by r, i.e. entry (r, c) = m_{(c−r) mod n}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CirculantMatrix {
    pub n: usize,
    pub first_row: Vec<i64>,
}

impl CirculantMatrix {
    pub fn zero(n: usize) -> Self {
        CirculantMatrix { n, first_row: vec![0; n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        m.first_row[0] = 1;
        m
    }

    pub fn entry(&self, r: usize, c: usize) -> i64 {
        self.first_row[(c + self.n - r % self.n) % self.n]
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        CirculantMatrix {
            n: self.n,
            first_row: self
                .first_row
                .iter()
                .zip(&other.first_row)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, s: i64) -> Self {
        CirculantMatrix {
            n: self.n,
            first_row: self.first_row.iter().map(|a| a * s).collect(),
        }
    }

    /// Column action y = M·x on an integer vector.
    pub fn apply(&self, x: &LatticeVector) -> LatticeVector {
        debug_assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|r| {
                let mut acc: i64 = 0;
                for c in 0..self.n {
                    acc += self.entry(r, c) * x[c] as i64;
                }
                acc as i32
            })
            .collect()
    }

    /// Column action on a complex vector (pairs re/im).
    pub fn apply_complex(&self, x: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
        if x.len() != self.n {
            return Err(RosaError::validation(format!(
                "vector length {} ≠ n={}",
                x.len(),
                self.n
            )));
        }
        Ok((0..self.n)
            .map(|r| {
                let mut re = 0.0;
                let mut im = 0.0;
                for c in 0..self.n {
                    let m = self.entry(r, c) as f64;
                    re += m * x[c].0;
                    im += m * x[c].1;
                }
                (re, im)
            })
            .collect())
    }
}

/// Standard matrix–vector product (complex); exposed for the eigenvector
/// property tests.
pub fn circulant_apply(m: &CirculantMatrix, v: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    m.apply_complex(v)
}

/// Elementary matrix M_i(n): first column has (−1)^i at row fst_i = i⌈n/2⌉ mod n
/// and (−1)^{i+1} at row scd_i = −(i+1)⌈n/2⌉ mod n, zeros elsewhere.
pub fn elementary_matrix(sym: &Symmetry, i: usize) -> Result<CirculantMatrix> {
    let n = sym.n();
    if i >= sym.half() {
        return Err(RosaError::validation(format!("elementary index {i} out of range (⌊n/2⌋ = {})", sym.half())));
    }
    let ceil_half = n.div_ceil(2);
    let fst = (i * ceil_half) % n;
    let scd = (n - ((i + 1) * ceil_half) % n) % n;
    let sign: i64 = if i % 2 == 0 { 1 } else { -1 };
    let mut m = CirculantMatrix::zero(n);
    // First-column entry at row r is first_row[(n − r) mod n].
    m.first_row[(n - fst) % n] += sign;
    m.first_row[(n - scd) % n] += -sign;
    Ok(m)
}

/// M_φ = Σ ab_i · M_i(n) for an abelianized edgeword.
pub fn expansion_matrix(sym: &Symmetry, ab: &[u32]) -> Result<CirculantMatrix> {
    if ab.len() != sym.half() {
        return Err(RosaError::validation(format!(
            "abelianization length {} ≠ ⌊n/2⌋ = {}",
            ab.len(),
            sym.half()
        )));
    }
    if ab.iter().all(|&c| c == 0) {
        return Err(RosaError::validation("abelianization must not be all zero"));
    }
    let mut m = CirculantMatrix::zero(sym.n());
    for (i, &c) in ab.iter().enumerate() {
        if c != 0 {
            m = m.add(&elementary_matrix(sym, i)?.scale(c as i64));
        }
    }
    Ok(m)
}

/// Eigenvalue matrix N_n: entry (i, j) = 2cos((2i+1)(2j+1)π/(2n)), symmetric,
/// size ⌊n/2⌋ × ⌊n/2⌋.
pub fn eigenvalue_matrix(sym: &Symmetry) -> Vec<Vec<f64>> {
    let h = sym.half();
    let n = sym.n() as f64;
    (0..h)
        .map(|i| {
            (0..h)
                .map(|j| 2.0 * (((2 * i + 1) * (2 * j + 1)) as f64 * PI / (2.0 * n)).cos())
                .collect()
        })
        .collect()
}

/// Spectrum of an edgeword-derived expansion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenReport {
    pub n: usize,
    pub abelianization: Vec<u32>,
    /// λ_Δ, the eigenvalue on the diagonal line (always 0 here).
    pub lambda_delta: f64,
    /// Signed magnitudes r_j = (N_n·[u])_j; λ_j = r_j·e^{−i(2j+1)π/(2n)}.
    pub signed_magnitudes: Vec<f64>,
    /// |λ_j| = |r_j|.
    pub moduli: Vec<f64>,
}

impl EigenReport {
    /// λ_j as a complex pair.
    pub fn lambda(&self, j: usize) -> (f64, f64) {
        let phase = -((2 * j + 1) as f64) * PI / (2.0 * self.n as f64);
        (self.signed_magnitudes[j] * phase.cos(), self.signed_magnitudes[j] * phase.sin())
    }

    /// Planarity criterion on the spectrum: |λ₀| > 1 and all other moduli < 1.
    pub fn spectrum_planar(&self) -> bool {
        self.moduli[0] > 1.0 && self.moduli.iter().skip(1).all(|&m| m < 1.0)
    }
}

/// Closed-form eigenvalues λ_j = (Σ_i [u]_i·2cos((2j+1)(2i+1)π/(2n)))·e^{−i(2j+1)π/(2n)}.
pub fn eigenvalues(sym: &Symmetry, ab: &[u32]) -> Result<EigenReport> {
    if ab.len() != sym.half() {
        return Err(RosaError::validation(format!(
            "abelianization length {} ≠ ⌊n/2⌋ = {}",
            ab.len(),
            sym.half()
        )));
    }
    let nmat = eigenvalue_matrix(sym);
    let signed: Vec<f64> = (0..sym.half())
        .map(|j| (0..sym.half()).map(|i| ab[i] as f64 * nmat[i][j]).sum())
        .collect();
    // λ_Δ = row sum of M_φ = 0 for every edgeword expansion; assert exactly.
    let m = expansion_matrix(sym, ab)?;
    let row_sum: i64 = m.first_row.iter().sum();
    debug_assert_eq!(row_sum, 0, "edgeword expansions annihilate the diagonal");
    Ok(EigenReport {
        n: sym.n(),
        abelianization: ab.to_vec(),
        lambda_delta: row_sum as f64,
        moduli: signed.iter().map(|r| r.abs()).collect(),
        signed_magnitudes: signed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edgeword::{abelianize, subrosa_edgeword};
    use std::f64::consts::PI;

    fn dense(m: &CirculantMatrix) -> Vec<Vec<i64>> {
        (0..m.n).map(|r| (0..m.n).map(|c| m.entry(r, c)).collect()).collect()
    }

    #[test]
    fn explicit_elementary_matrices_n5() {
        let sym = Symmetry::new(5).unwrap();
        let m0 = elementary_matrix(&sym, 0).unwrap();
        let m1 = elementary_matrix(&sym, 1).unwrap();
        assert_eq!(
            dense(&m0),
            vec![
                vec![1, 0, 0, -1, 0],
                vec![0, 1, 0, 0, -1],
                vec![-1, 0, 1, 0, 0],
                vec![0, -1, 0, 1, 0],
                vec![0, 0, -1, 0, 1],
            ]
        );
        assert_eq!(
            dense(&m1),
            vec![
                vec![0, 1, -1, 0, 0],
                vec![0, 0, 1, -1, 0],
                vec![0, 0, 0, 1, -1],
                vec![-1, 0, 0, 0, 1],
                vec![1, -1, 0, 0, 0],
            ]
        );
        // M₅ = 4·M₀ + 2·M₁ entry for entry.
        let m5 = expansion_matrix(&sym, &[4, 2]).unwrap();
        assert_eq!(m5, m0.scale(4).add(&m1.scale(2)));
        assert_eq!(
            dense(&m5),
            vec![
                vec![4, 2, -2, -4, 0],
                vec![0, 4, 2, -2, -4],
                vec![-4, 0, 4, 2, -2],
                vec![-2, -4, 0, 4, 2],
                vec![2, -2, -4, 0, 4],
            ]
        );
    }

    #[test]
    fn diagonal_is_killed() {
        // M₀(5)·(1,1,1,1,1) = 0: λ_Δ = 0 for every expansion.
        let sym = Symmetry::new(5).unwrap();
        let m0 = elementary_matrix(&sym, 0).unwrap();
        let ones: LatticeVector = (0..5).map(|_| 1).collect();
        assert!(m0.apply(&ones).iter().all(|&c| c == 0));
    }

    #[test]
    fn row_sums_vanish_for_all_elementary() {
        for n in [3usize, 5, 7, 9, 11, 13, 15] {
            let sym = Symmetry::new(n).unwrap();
            for i in 0..sym.half() {
                let m = elementary_matrix(&sym, i).unwrap();
                let s: i64 = m.first_row.iter().sum();
                assert_eq!(s, 0, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn subrosa_moduli_table() {
        // (n, expected moduli), tolerance ±0.01.
        let table: [(usize, &[f64]); 5] = [
            (3, &[3.46]),
            (5, &[9.96, 0.90]),
            (7, &[19.69, 2.01, 0.53]),
            (9, &[32.66, 3.46, 1.09, 0.39]),
            (11, &[48.87, 5.27, 1.76, 0.76, 0.30]),
        ];
        for (n, expect) in table {
            let sym = Symmetry::new(n).unwrap();
            let ab = abelianize(&sym, &subrosa_edgeword(&sym));
            let rep = eigenvalues(&sym, &ab).unwrap();
            assert_eq!(rep.moduli.len(), expect.len());
            for (got, want) in rep.moduli.iter().zip(expect) {
                assert!((got - want).abs() <= 0.01, "n={n}: {got} vs {want}");
            }
            assert!(rep.lambda_delta.abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_matrix_action() {
        // λ_j from the N_n formula equals the action of M on the eigenvector
        // v_j = (e^{−i2π(2j+1)k/n})_k.
        for n in [5usize, 7, 9, 11] {
            let sym = Symmetry::new(n).unwrap();
            let ab = abelianize(&sym, &subrosa_edgeword(&sym));
            let m = expansion_matrix(&sym, &ab).unwrap();
            let rep = eigenvalues(&sym, &ab).unwrap();
            for j in 0..sym.half() {
                let v: Vec<(f64, f64)> = (0..n)
                    .map(|k| {
                        let a = -2.0 * PI * ((2 * j + 1) * k) as f64 / n as f64;
                        (a.cos(), a.sin())
                    })
                    .collect();
                let mv = m.apply_complex(&v).unwrap();
                let (lr, li) = rep.lambda(j);
                for k in 0..n {
                    let want = (lr * v[k].0 - li * v[k].1, lr * v[k].1 + li * v[k].0);
                    assert!(
                        (mv[k].0 - want.0).abs() < 1e-9 && (mv[k].1 - want.1).abs() < 1e-9,
                        "n={n} j={j} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn eigenvalue_matrix_orthogonality() {
        // N_n/√n is orthogonal: N_n·N_nᵀ = n·I, odd n ≤ 25.
        for n in (3..=25usize).step_by(2) {
            let sym = Symmetry::new(n).unwrap();
            let nn = eigenvalue_matrix(&sym);
            let h = sym.half();
            for i in 0..h {
                for j in 0..h {
                    let dot: f64 = (0..h).map(|k| nn[i][k] * nn[j][k]).sum();
                    let want = if i == j { n as f64 } else { 0.0 };
                    assert!((dot - want).abs() < 1e-9, "n={n} ({i},{j}): {dot}");
                }
            }
        }
    }

    #[test]
    fn cosine_sum_identity() {
        // With θ = (2j+1)π/(2(2k+1)) and C = Σ_{i<k} 4(k−i)cos((2i+1)θ):
        // C·sin²θ = cosθ, for all 0 ≤ j < k ≤ 15.
        for k in 1..=15usize {
            for j in 0..k {
                let theta = (2 * j + 1) as f64 * PI / (2.0 * (2 * k + 1) as f64);
                let c: f64 =
                    (0..k).map(|i| 4.0 * (k - i) as f64 * ((2 * i + 1) as f64 * theta).cos()).sum();
                let lhs = c * theta.sin() * theta.sin();
                assert!((lhs - theta.cos()).abs() < 1e-9, "j={j} k={k}");
            }
        }
    }

    #[test]
    fn expansion_commutes_with_rotation() {
        // Both M and the lattice rotation are polynomials in the basis shift.
        let sym = Symmetry::new(7).unwrap();
        let ab = abelianize(&sym, &subrosa_edgeword(&sym));
        let m = expansion_matrix(&sym, &ab).unwrap();
        let mut v = crate::lattice::lattice_zero(7);
        v[0] = 2;
        v[2] = -1;
        v[6] = 3;
        for r in 0..sym.dirs() as i64 {
            let a = sym.rotate_vector(&m.apply(&v), r);
            let b = m.apply(&sym.rotate_vector(&v, r));
            assert_eq!(a, b, "r={r}");
        }
    }
}
