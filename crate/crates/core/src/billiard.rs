//! The optimal frequency vector γ, the billiard word ω of the line
//! Γ_{1/2} = ⟨γ⟩ + (1/2,…,1/2), tracking points p_i, candidate edgewords
//! u_(j) = pref_j(ω)·reverse(pref_j(ω)), and the Planar Rosa candidate search.

use crate::edgeword::{abelianize, check_k1_counting, Edgeword};
use crate::error::{Result, RosaError};
use crate::lattice::Symmetry;
use crate::spectral::{eigenvalues, EigenReport};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// γ_i = cos((2i+1)π/(2n)), i < ⌊n/2⌋. The π/(2n) denominator is forced by
/// N_n·γᵀ = 2‖γ‖²e₁ᵀ (γ must span the expanding eigendirection).
pub fn gamma_vector(sym: &Symmetry) -> Vec<f64> {
    (0..sym.half())
        .map(|i| (((2 * i + 1) as f64) * PI / (2.0 * sym.n() as f64)).cos())
        .collect()
}

/// Comparison guard band for the argmin rule; ties within the band break
/// toward the smaller letter (not expected to occur for offsets 1/2).
const TIE_EPS: f64 = 1e-12;

/// Running state of the billiard word generator.
#[derive(Debug, Clone)]
pub struct BilliardState {
    gamma: Vec<f64>,
    /// Hit counts n_i per letter 2i+1; p_i in ℤ^{⌊n/2⌋}.
    pub counts: Vec<i64>,
    /// Letters emitted so far.
    pub word: Vec<u8>,
    pub tie_warnings: usize,
}

impl BilliardState {
    pub fn new(sym: &Symmetry) -> Self {
        BilliardState {
            gamma: gamma_vector(sym),
            counts: vec![0; sym.half()],
            word: Vec::new(),
            tie_warnings: 0,
        }
    }

    /// Emit the next letter: argmin over i of (n_i + 1/2)/γ_i.
    pub fn step(&mut self) -> u8 {
        let mut best = 0usize;
        let mut best_key = f64::INFINITY;
        for (i, &g) in self.gamma.iter().enumerate() {
            let key = (self.counts[i] as f64 + 0.5) / g;
            if key < best_key - TIE_EPS {
                best = i;
                best_key = key;
            } else if (key - best_key).abs() <= TIE_EPS {
                self.tie_warnings += 1; // break toward the smaller letter: keep `best`
            }
        }
        self.counts[best] += 1;
        let letter = (2 * best + 1) as u8;
        self.word.push(letter);
        letter
    }
}

/// First `length` letters of ω (positive half).
pub fn billiard_word(sym: &Symmetry, length: usize) -> Vec<u8> {
    let mut st = BilliardState::new(sym);
    for _ in 0..length {
        st.step();
    }
    st.word
}

/// Tracking point p_i ∈ ℤ^{⌊n/2⌋}: p₀ = 0 and letter 2j+1 steps basis e_j.
pub fn tracking_point(sym: &Symmetry, i: usize) -> Vec<i64> {
    let mut st = BilliardState::new(sym);
    for _ in 0..i {
        st.step();
    }
    st.counts
}

/// Euclidean distance from p_i to the line ⟨γ⟩.
pub fn tracking_distance(sym: &Symmetry, i: usize) -> f64 {
    let p = tracking_point(sym, i);
    let gamma = gamma_vector(sym);
    distance_to_gamma_line(&p, &gamma)
}

pub fn distance_to_gamma_line(p: &[i64], gamma: &[f64]) -> f64 {
    let dot: f64 = p.iter().zip(gamma).map(|(&a, &g)| a as f64 * g).sum();
    let g2: f64 = gamma.iter().map(|g| g * g).sum();
    let p2: f64 = p.iter().map(|&a| (a * a) as f64).sum();
    (p2 - dot * dot / g2).max(0.0).sqrt()
}

/// Candidate edgeword u_(j) = pref_j(ω)·reverse(pref_j(ω)).
pub fn candidate_edgeword(sym: &Symmetry, j: usize) -> Result<Edgeword> {
    if j == 0 {
        return Err(RosaError::validation("candidate exponent j must be ≥ 1"));
    }
    let mut letters = billiard_word(sym, j);
    let mut rev = letters.clone();
    rev.reverse();
    letters.extend_from_slice(&rev);
    Edgeword::new(sym, letters)
}

/// Result of the Planar Rosa candidate search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanarCandidate {
    pub j: usize,
    pub edgeword: Edgeword,
    pub eigen: EigenReport,
}

/// Smallest j ≤ j_max whose candidate edgeword has |λ₀| > 1, all other moduli
/// < 1, passes the k=1 counting condition and is 2-almost-balanced.
pub fn find_planar_candidate(sym: &Symmetry, j_max: usize) -> Result<PlanarCandidate> {
    if j_max < 1 {
        return Err(RosaError::validation("j_max must be ≥ 1"));
    }
    for j in 1..=j_max {
        let u = candidate_edgeword(sym, j)?;
        let eigen = eigenvalues(sym, &abelianize(sym, &u))?;
        if !eigen.spectrum_planar() {
            continue;
        }
        let report = check_k1_counting(sym, &u)?;
        if report.passes() {
            return Ok(PlanarCandidate { j, edgeword: u, eigen });
        }
    }
    Err(RosaError::NotFound(format!(
        "no planar candidate for n = {} with j ≤ {j_max}",
        sym.n()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        let sym = Symmetry::new(5).unwrap();
        let g = gamma_vector(&sym);
        assert_eq!(g.len(), 2);
        assert!((g[0] - (std::f64::consts::PI / 10.0).cos()).abs() < 1e-12);
        assert!((g[1] - (3.0 * std::f64::consts::PI / 10.0).cos()).abs() < 1e-12);
        // γ is the direction of the expanding eigenvector: N·γ lands on e₀
        // up to scale, so the trajectory p_i stays near the line ℝγ.
        let n = 5usize;
        let mut ng = vec![0.0; 2];
        for i in 0..2 {
            for j in 0..2 {
                let c = (2.0 * ((2 * i + 1) as f64) * ((2 * j + 1) as f64)
                    * std::f64::consts::PI
                    / (2.0 * n as f64) / 2.0)
                    .cos()
                    * 2.0;
                ng[i] += c * g[j];
            }
        }
        assert!(ng[0] > 0.0 && ng[1].abs() < 1e-9, "N·γ = {ng:?}");
    }

    #[test]
    fn billiard_word_prefixes() {
        let sym = Symmetry::new(5).unwrap();
        assert_eq!(billiard_word(&sym, 7), vec![1, 3, 1, 3, 1, 1, 3]);
        let sym3 = Symmetry::new(3).unwrap();
        assert_eq!(billiard_word(&sym3, 5), vec![1; 5]);
        for n in [5usize, 7, 9, 11] {
            let sym = Symmetry::new(n).unwrap();
            let w = billiard_word(&sym, 100);
            assert_eq!(w[0], 1, "n={n}: first letter");
            assert!(w.iter().all(|&l| l % 2 == 1 && (l as usize) < n));
        }
    }

    #[test]
    fn tracking_stays_near_gamma_line() {
        let sym = Symmetry::new(5).unwrap();
        assert_eq!(tracking_point(&sym, 0), vec![0, 0]);
        assert_eq!(tracking_distance(&sym, 0), 0.0);
        assert_eq!(tracking_point(&sym, 6), vec![4, 2]);
        assert!((tracking_distance(&sym, 6) - 0.4016).abs() < 1e-3);
        // The trajectory returns near the line infinitely often.
        let g = gamma_vector(&sym);
        let mut st = BilliardState::new(&sym);
        let mut best = f64::INFINITY;
        for _ in 0..10_000 {
            st.step();
            best = best.min(distance_to_gamma_line(&st.counts, &g));
        }
        assert!(best < 0.05, "min distance {best}");
    }

    #[test]
    fn candidate_words() {
        let sym = Symmetry::new(5).unwrap();
        assert_eq!(candidate_edgeword(&sym, 1).unwrap().to_compact_string(), "11");
        let u = candidate_edgeword(&sym, 3).unwrap();
        assert_eq!(u.to_compact_string(), "131131");
        assert!(u.is_palindrome());
        assert!(candidate_edgeword(&sym, 0).is_err());
        // [u_(j)] = 2·p_j by the fold-back construction.
        for n in [5usize, 7, 9] {
            let sym = Symmetry::new(n).unwrap();
            for j in [1usize, 3, 7, 12] {
                let u = candidate_edgeword(&sym, j).unwrap();
                let ab = crate::edgeword::abelianize(&sym, &u);
                let p = tracking_point(&sym, j);
                for i in 0..sym.half() {
                    assert_eq!(ab[i] as i64, 2 * p[i], "n={n} j={j} i={i}");
                }
            }
        }
    }

    #[test]
    fn planar_candidates_found() {
        let sym3 = Symmetry::new(3).unwrap();
        let c = find_planar_candidate(&sym3, 1).unwrap();
        assert_eq!(c.j, 1);
        assert_eq!(c.edgeword.to_compact_string(), "11");
        assert!((c.eigen.moduli[0] - 3.46).abs() < 0.01);

        let sym7 = Symmetry::new(7).unwrap();
        let c7 = find_planar_candidate(&sym7, 64).unwrap();
        assert_eq!(c7.j, 11);
        assert!(c7.eigen.moduli[0] > 1.0);
        assert!(c7.eigen.moduli[1..].iter().all(|&m| m < 1.0));
    }
}
