//! Edgeword algebra: the Sub Rosa words Σ(n), abelianization, counting
//! functions f_j / f_j⁻¹ with their ±∞ sentinels, almost-balancedness and the
//! counting-inequality tileability checks.

use crate::error::{Result, RosaError};
use crate::lattice::Symmetry;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Extended integer with ±∞ sentinels, ordered −∞ < finite < +∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Ext {
    NegInf,
    Fin(i64),
    PosInf,
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => write!(f, "-inf"),
            Ext::Fin(v) => write!(f, "{v}"),
            Ext::PosInf => write!(f, "+inf"),
        }
    }
}

/// Word over the odd letters {1, 3, …, n−2}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edgeword {
    pub n: usize,
    pub letters: Vec<u8>,
}

impl Edgeword {
    pub fn new(sym: &Symmetry, letters: Vec<u8>) -> Result<Self> {
        for &l in &letters {
            if l % 2 == 0 || (l as usize) > sym.n() - 2 {
                return Err(RosaError::validation(format!(
                    "letter {l} is not an odd rhombus type in 1..={}",
                    sym.n() - 2
                )));
            }
        }
        Ok(Edgeword { n: sym.n(), letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_palindrome(&self) -> bool {
        let m = self.letters.len();
        (0..m / 2).all(|i| self.letters[i] == self.letters[m - 1 - i])
    }

    /// Serialization: concatenated digits for n ≤ 11 (single-digit letters),
    /// "."-separated decimal letters for n ≥ 13.
    pub fn to_compact_string(&self) -> String {
        if self.n <= 11 {
            self.letters.iter().map(|l| l.to_string()).collect()
        } else {
            self.letters
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    pub fn parse(sym: &Symmetry, s: &str) -> Result<Self> {
        // Dot form is mandatory for n ≥ 13: without it, a lone two-digit
        // letter ("11") is indistinguishable from two single-digit ones.
        let letters: Vec<u8> = if sym.n() >= 13 || s.contains('.') {
            s.split('.')
                .map(|part| {
                    part.parse::<u8>().map_err(|_| {
                        RosaError::validation(format!("bad letter {part:?} in edgeword {s:?}"))
                    })
                })
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| RosaError::validation(format!("bad digit {c:?} in edgeword {s:?}")))
                })
                .collect::<Result<_>>()?
        };
        Edgeword::new(sym, letters)
    }
}

impl fmt::Display for Edgeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_compact_string())
    }
}

/// Σ(n) = s(n)·s̄(3)·s̄(5)…s̄(n−2) followed by its reverse, where
/// s(m) = 1·3·5···(m−2) and s̄ is the reversal.
pub fn subrosa_edgeword(sym: &Symmetry) -> Edgeword {
    let n = sym.n();
    let s = |m: usize| -> Vec<u8> { (0..(m - 1) / 2).map(|i| (2 * i + 1) as u8).collect() };
    let mut half: Vec<u8> = s(n);
    let mut m = 3;
    while m <= n - 2 {
        let mut rev = s(m);
        rev.reverse();
        half.extend_from_slice(&rev);
        m += 2;
    }
    let mut letters = half.clone();
    half.reverse();
    letters.extend_from_slice(&half);
    Edgeword { n, letters }
}

/// [u]: entry i counts occurrences of letter 2i+1.
pub fn abelianize(sym: &Symmetry, u: &Edgeword) -> Vec<u32> {
    let mut counts = vec![0u32; sym.half()];
    for &l in &u.letters {
        counts[(l as usize - 1) / 2] += 1;
    }
    counts
}

/// Prefix letter counts of an edgeword, extended by convention with
/// f_n ≡ 0 and f_j = −f_{2n−j} for n < j < 2n.
#[derive(Debug, Clone)]
pub struct CountingFunctions {
    n: usize,
    len: usize,
    /// prefix[c][x] = occurrences of letter 2c+1 among the first x letters.
    prefix: Vec<Vec<i64>>,
    /// positions[c][y−1] = index (1-based prefix length) of the y-th occurrence.
    positions: Vec<Vec<i64>>,
}

impl CountingFunctions {
    pub fn new(sym: &Symmetry, u: &Edgeword) -> Self {
        let h = sym.half();
        let mut prefix = vec![vec![0i64; u.len() + 1]; h];
        let mut positions = vec![Vec::new(); h];
        for (x, &l) in u.letters.iter().enumerate() {
            let c = (l as usize - 1) / 2;
            for cc in 0..h {
                prefix[cc][x + 1] = prefix[cc][x] + if cc == c { 1 } else { 0 };
            }
            positions[c].push((x + 1) as i64);
        }
        CountingFunctions { n: sym.n(), len: u.len(), prefix, positions }
    }

    pub fn word_len(&self) -> usize {
        self.len
    }

    /// f_j(x) for odd 1 ≤ j < 2n and 0 ≤ x ≤ |u|.
    pub fn f(&self, j: usize, x: usize) -> Result<i64> {
        if j % 2 == 0 || j >= 2 * self.n {
            return Err(RosaError::validation(format!("f_j: j = {j} must be odd in [1, 2n)")));
        }
        if x > self.len {
            return Err(RosaError::validation(format!("f_j: x = {x} beyond word length {}", self.len)));
        }
        if j == self.n {
            return Ok(0); // f_n ≡ 0
        }
        if j < self.n {
            Ok(self.prefix[(j - 1) / 2][x])
        } else {
            // mirror extension: f_j = −f_{2n−j}
            Ok(-self.prefix[(2 * self.n - j - 1) / 2][x])
        }
    }

    /// f_j⁻¹(y): length of the shortest prefix with f_j value y. Sentinels:
    /// +∞ when no such prefix exists, −∞ for arguments below the range,
    /// and f_j⁻¹(0) = 0 by convention. Defined here for all odd j < 2n via the
    /// same extensions as `f`.
    pub fn f_inv(&self, j: usize, y: i64) -> Result<Ext> {
        if j % 2 == 0 || j >= 2 * self.n {
            return Err(RosaError::validation(format!("f_j⁻¹: j = {j} must be odd in [1, 2n)")));
        }
        if y == 0 {
            return Ok(Ext::Fin(0));
        }
        if j == self.n {
            // f_n ≡ 0 never reaches nonzero values.
            return Ok(if y > 0 { Ext::PosInf } else { Ext::NegInf });
        }
        if j < self.n {
            if y < 0 {
                return Ok(Ext::NegInf);
            }
            let pos = &self.positions[(j - 1) / 2];
            Ok(pos.get(y as usize - 1).map(|&p| Ext::Fin(p)).unwrap_or(Ext::PosInf))
        } else {
            // f_j = −f_{2n−j} is nonincreasing: positive values unreachable,
            // negative values land where the mirror letter count reaches −y.
            if y > 0 {
                return Ok(Ext::PosInf);
            }
            let pos = &self.positions[(2 * self.n - j - 1) / 2];
            Ok(pos.get((-y) as usize - 1).map(|&p| Ext::Fin(p)).unwrap_or(Ext::NegInf))
        }
    }
}

/// Public counting entry point: f_j(x) with the extensions.
pub fn counting(sym: &Symmetry, u: &Edgeword, j: usize, x: usize) -> Result<i64> {
    CountingFunctions::new(sym, u).f(j, x)
}

/// Public inverse entry point; rejects j ≥ n (not a rhombus type).
pub fn counting_inverse(sym: &Symmetry, u: &Edgeword, j: usize, y: i64) -> Result<Ext> {
    if j >= sym.n() {
        return Err(RosaError::validation(format!("f_j⁻¹: j = {j} is not a rhombus type (j < n required)")));
    }
    CountingFunctions::new(sym, u).f_inv(j, y)
}

/// Witness of an almost-balancedness violation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceWitness {
    pub start: usize,
    pub end: usize,
    pub j1: u8,
    pub j2: u8,
    pub defect: i64,
}

/// k-almost-balanced: every factor v and letters j₁ < j₂ satisfy
/// |v|_{j₁} − |v|_{j₂} ≥ −k (asymmetric: only the lower letter may lag).
pub fn is_almost_balanced(sym: &Symmetry, u: &Edgeword, k: i64) -> (bool, Option<BalanceWitness>) {
    let cf = CountingFunctions::new(sym, u);
    let h = sym.half();
    for c1 in 0..h {
        for c2 in (c1 + 1)..h {
            // D[x] = f_{j1}(x) − f_{j2}(x); factor defect minimized by a
            // prefix-max sweep.
            let mut best_start = 0usize;
            let mut max_d = i64::MIN;
            for x in 0..=u.len() {
                let d = cf.prefix[c1][x] - cf.prefix[c2][x];
                if d > max_d {
                    max_d = d;
                    best_start = x;
                }
                if d - max_d < -k {
                    return (
                        false,
                        Some(BalanceWitness {
                            start: best_start,
                            end: x,
                            j1: (2 * c1 + 1) as u8,
                            j2: (2 * c2 + 1) as u8,
                            defect: d - max_d,
                        }),
                    );
                }
            }
        }
    }
    (true, None)
}

/// One violated counting inequality.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountingViolation {
    pub family: String,
    pub j1: u8,
    pub j2: u8,
    pub position: usize,
    pub lhs: String,
    pub rhs: String,
}

/// Report of the tileability counting checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountingReport {
    pub violations: Vec<CountingViolation>,
    pub almost_balanced_2: bool,
    pub balance_witness: Option<BalanceWitness>,
}

impl CountingReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty() && self.almost_balanced_2
    }
}

/// A strict inequality lhs < rhs in extended integers is violated unless it
/// holds; comparisons where both sides sit at the same infinity are not
/// well defined and are treated as non-violations.
fn strict_less_ok(lhs: Ext, rhs: Ext) -> bool {
    match (lhs, rhs) {
        (Ext::PosInf, Ext::PosInf) | (Ext::NegInf, Ext::NegInf) => true,
        _ => lhs < rhs,
    }
}

/// Odd letters of the alphabet {1, 3, …, n−2}.
fn odd_letters(sym: &Symmetry) -> impl Iterator<Item = usize> {
    let n = sym.n();
    (0..sym.half()).map(move |i| 2 * i + 1).filter(move |&j| j <= n - 2)
}

///// The k=1 counting condition (sufficient tileability): for every odd
/// j₁ < j₂ and every position k₁ with u_{k₁−1} = j₁,
/// f_{|j₂−2|}⁻¹∘f_{j₂}(k₁) < f_{|j₁−2|}⁻¹∘f_{j₁}(k₁). Also runs
/// is_almost_balanced(u, 2); passing both is the sufficient condition.
pub fn check_k1_counting(sym: &Symmetry, u: &Edgeword) -> Result<CountingReport> {
    if u.is_empty() {
        return Err(RosaError::validation("empty edgeword"));
    }
    let cf = CountingFunctions::new(sym, u);
    let mut violations = Vec::new();
    for j1 in odd_letters(sym) {
        for j2 in odd_letters(sym) {
            if j2 <= j1 {
                continue;
            }
            for (idx, &l) in u.letters.iter().enumerate() {
                if l as usize != j1 {
                    continue;
                }
                let k1 = idx + 1;
                let lhs = cf.f_inv(j2.abs_diff(2), cf.f(j2, k1)?)?;
                let rhs = cf.f_inv(j1.abs_diff(2), cf.f(j1, k1)?)?;
                if !strict_less_ok(lhs, rhs) {
                    violations.push(CountingViolation {
                        family: "k1counting".into(),
                        j1: j1 as u8,
                        j2: j2 as u8,
                        position: k1,
                        lhs: lhs.to_string(),
                        rhs: rhs.to_string(),
                    });
                }
            }
        }
    }
    let (balanced, witness) = is_almost_balanced(sym, u, 2);
    Ok(CountingReport { violations, almost_balanced_2: balanced, balance_witness: witness })
}

/// The four inequality families for the metatile with corner angles kπ/n and
///// (n−k)π/n: adjacent-edge inequalities for both corners and opposite-edge
/// inequalities for both corners.
pub fn derived_counting_conditions(sym: &Symmetry, u: &Edgeword, k: usize) -> Result<CountingReport> {
    if k == 0 || k >= sym.n() {
        return Err(RosaError::validation(format!("corner parameter k = {k} must satisfy 1 ≤ k < n")));
    }
    if u.is_empty() {
        return Err(RosaError::validation("empty edgeword"));
    }
    let cf = CountingFunctions::new(sym, u);
    let m = u.len();
    let mut violations = Vec::new();
    let corners = [k, sym.n() - k];
    for j1 in odd_letters(sym) {
        for j2 in odd_letters(sym) {
            if j2 <= j1 {
                continue;
            }
            for (idx, &l) in u.letters.iter().enumerate() {
                if l as usize != j1 {
                    continue;
                }
                let k1 = idx + 1;
                for (ci, &kk) in corners.iter().enumerate() {
                    let j1p = j1.abs_diff(2 * kk);
                    let j2p = j2.abs_diff(2 * kk);
                    // adjacent-edge family
                    let lhs = cf.f_inv(j2p, cf.f(j2, k1)?)?;
                    let rhs = cf.f_inv(j1p, cf.f(j1, k1)?)?;
                    if !strict_less_ok(lhs, rhs) {
                        violations.push(CountingViolation {
                            family: format!("counting_adjacent{}", ci + 1),
                            j1: j1 as u8,
                            j2: j2 as u8,
                            position: k1,
                            lhs: lhs.to_string(),
                            rhs: rhs.to_string(),
                        });
                    }
                    // opposite-edge family
                    let lhs = cf.f_inv(j2, cf.f(j2, k1)? - cf.f(j2p, m)?)?;
                    let rhs = cf.f_inv(j1, cf.f(j1, k1)? - cf.f(j1p, m)?)?;
                    if !strict_less_ok(lhs, rhs) {
                        violations.push(CountingViolation {
                            family: format!("counting_opposite{}", ci + 1),
                            j1: j1 as u8,
                            j2: j2 as u8,
                            position: k1,
                            lhs: lhs.to_string(),
                            rhs: rhs.to_string(),
                        });
                    }
                }
            }
        }
    }
    let (balanced, witness) = is_almost_balanced(sym, u, 2);
    Ok(CountingReport { violations, almost_balanced_2: balanced, balance_witness: witness })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym5() -> Symmetry {
        Symmetry::new(5).unwrap()
    }

    #[test]
    fn subrosa_words_match_table() {
        let table = [
            (3, "11"),
            (5, "131131"),
            (7, "135131131531"),
            (9, "13571315311351317531"),
            (11, "135791315317531135713513197531"),
        ];
        for (n, want) in table {
            let sym = Symmetry::new(n).unwrap();
            let u = subrosa_edgeword(&sym);
            assert_eq!(u.to_compact_string(), want, "n={n}");
            assert!(u.is_palindrome());
        }
    }

    #[test]
    fn subrosa_abelianization_is_descending_evens() {
        // [Σ(n)] = (n−1, n−3, …, 2) for odd 3 ≤ n ≤ 15.
        for n in (3..=15usize).step_by(2) {
            let sym = Symmetry::new(n).unwrap();
            let ab = abelianize(&sym, &subrosa_edgeword(&sym));
            let want: Vec<u32> = (0..sym.half()).map(|i| (n - 1 - 2 * i) as u32).collect();
            assert_eq!(ab, want, "n={n}");
        }
    }

    #[test]
    fn parse_display_roundtrip() {
        let sym = sym5();
        let u = Edgeword::parse(&sym, "131131").unwrap();
        assert_eq!(u.to_compact_string(), "131131");
        assert!(Edgeword::parse(&sym, "141").is_err()); // even letter
        assert!(Edgeword::parse(&sym, "151").is_err()); // letter ≥ n
        let sym13 = Symmetry::new(13).unwrap();
        let v = Edgeword::parse(&sym13, "1.3.11.5").unwrap();
        assert_eq!(v.letters, vec![1, 3, 11, 5]);
        assert_eq!(v.to_compact_string(), "1.3.11.5");
    }

    #[test]
    fn counting_examples() {
        let sym = sym5();
        let u = Edgeword::parse(&sym, "131131").unwrap();
        assert_eq!(counting(&sym, &u, 1, 3).unwrap(), 2); // "131" has two 1s
        assert_eq!(counting(&sym, &u, 3, 4).unwrap(), 1); // "1311" has one 3
        for x in 0..=6 {
            assert_eq!(counting(&sym, &u, 5, x).unwrap(), 0); // f_n ≡ 0
            // Mirror extension f_{2n−j} = −f_j.
            assert_eq!(
                counting(&sym, &u, 7, x).unwrap(),
                -counting(&sym, &u, 3, x).unwrap()
            );
        }
        assert!(counting(&sym, &u, 2, 1).is_err());
    }

    #[test]
    fn counting_inverse_examples() {
        let sym = sym5();
        let u = Edgeword::parse(&sym, "131131").unwrap();
        assert_eq!(counting_inverse(&sym, &u, 1, 2).unwrap(), Ext::Fin(3));
        assert_eq!(counting_inverse(&sym, &u, 3, 5).unwrap(), Ext::PosInf);
        assert_eq!(counting_inverse(&sym, &u, 1, 0).unwrap(), Ext::Fin(0));
        assert_eq!(counting_inverse(&sym, &u, 3, 0).unwrap(), Ext::Fin(0));
    }

    #[test]
    fn almost_balanced_examples() {
        let sym = sym5();
        let u = Edgeword::parse(&sym, "131131").unwrap();
        assert!(is_almost_balanced(&sym, &u, 2).0);
        let bad = Edgeword::parse(&sym, "333").unwrap();
        let (ok, witness) = is_almost_balanced(&sym, &bad, 2);
        assert!(!ok);
        let w = witness.unwrap();
        assert_eq!((w.j1, w.j2, w.defect), (1, 3, -3));
        assert!(is_almost_balanced(&sym, &bad, bad.len() as i64).0);
    }

    #[test]
    fn k1_counting_verdicts() {
        let sym = sym5();
        let pass = check_k1_counting(&sym, &subrosa_edgeword(&sym)).unwrap();
        assert!(pass.passes(), "{:?}", pass.violations);
        let fail = check_k1_counting(&sym, &Edgeword::parse(&sym, "311113").unwrap()).unwrap();
        assert!(!fail.violations.is_empty());
        // Single-letter word passes vacuously via the +∞ sentinel semantics.
        let single = check_k1_counting(&sym, &Edgeword::parse(&sym, "1").unwrap()).unwrap();
        assert!(single.violations.is_empty());
        assert!(check_k1_counting(&sym, &Edgeword { n: 5, letters: vec![] }).is_err());
    }

    #[test]
    fn derived_conditions_follow_k1() {
        let sym = sym5();
        let u = subrosa_edgeword(&sym);
        for k in 1..5 {
            let rep = derived_counting_conditions(&sym, &u, k).unwrap();
            assert!(rep.passes(), "k={k}: {:?}", rep.violations);
        }
        let bad = Edgeword::parse(&sym, "311113").unwrap();
        let any_fail = (1..5).any(|k| {
            !derived_counting_conditions(&sym, &bad, k).unwrap().violations.is_empty()
        });
        assert!(any_fail);
        assert!(derived_counting_conditions(&sym, &u, 0).is_err());
        assert!(derived_counting_conditions(&sym, &u, 5).is_err());
    }

    #[test]
    fn monotone_counting_chain_on_passing_palindromes() {
        // check_k1_counting pass ⇒ f₁(x) ≥ f₃(x) ≥ … ≥ f_{n−2}(x).
        for n in [5usize, 7, 9, 11] {
            let sym = Symmetry::new(n).unwrap();
            let u = subrosa_edgeword(&sym);
            assert!(check_k1_counting(&sym, &u).unwrap().passes());
            let cf = CountingFunctions::new(&sym, &u);
            for x in 0..=u.len() {
                for i in 0..sym.half() - 1 {
                    let a = cf.f(2 * i + 1, x).unwrap();
                    let b = cf.f(2 * i + 3, x).unwrap();
                    assert!(a >= b, "n={n} x={x} f_{}={a} < f_{}={b}", 2 * i + 1, 2 * i + 3);
                }
            }
        }
    }
}
