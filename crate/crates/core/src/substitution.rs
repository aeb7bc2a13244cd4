//! The pseudo-substitution σ_u built from a palindromic edgeword u.
//!
//! Geometrically σ_u scales each rhombus by the circulant expansion M_φ and
//! replaces it with a metatile: a necklace of |u| rhombi straddling each of
//! the four meta-edges, plus a tiling of the interior polygon. Adjacent
//! metatiles share exactly their straddling necklace rhombi (u is a
//! palindrome), so σ of an edge-to-edge patch is again edge-to-edge after
//! deduplication. Each metatile patch is centrally symmetric, which makes
//! σ well-defined on unoriented tiles and exactly equivariant under the
//! rotation by π/n and under lattice translations.

use crate::edgeword::{abelianize, Edgeword};
use crate::error::{Result, RosaError};
use crate::kenyon::{metatile_polygon, tile_polygon_symmetric};
use crate::lattice::{
    lattice_add, lattice_zero, rotate_patch, star_patch, LatticeVector, Patch, PlacedTile,
    PolygonBoundary, Symmetry, TileType,
};
use crate::spectral::{expansion_matrix, CirculantMatrix};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// The image of the representative tile S_{0,0,d} under σ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metatile {
    /// Angle-class parameter: the representative is T_{0,d}, 1 ≤ d ≤ ⌊n/2⌋.
    pub d: u8,
    /// Boundary of the interior region (inside the necklace zigzag).
    pub interior_polygon: PolygonBoundary,
    /// The 4|u| rhombi straddling the meta-edges, shared with neighbours.
    pub necklace: Vec<PlacedTile>,
    /// Centrally symmetric tiling of the interior polygon.
    pub interior: Vec<PlacedTile>,
    /// necklace ∪ interior, canonicalized.
    pub patch: Patch,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubstitutionRule {
    pub n: usize,
    pub edgeword: Edgeword,
    pub expansion: CirculantMatrix,
    /// metatiles[d−1] is the metatile of class parameter d.
    pub metatiles: Vec<Metatile>,
}

impl SubstitutionRule {
    pub fn metatile(&self, d: u8) -> &Metatile {
        &self.metatiles[d as usize - 1]
    }
}

/// Write a placed tile as rot^o(S_{0,0,d}) + τ: returns (d, o, τ = anchor).
/// The other valid orientation is o+n; σ's value does not depend on the
/// choice because metatiles are centrally symmetric.
pub fn decompose(sym: &Symmetry, tile: &PlacedTile) -> (u8, u16, LatticeVector) {
    let diff = (tile.k - tile.j) as usize;
    if 2 * diff < sym.n() {
        (diff as u8, 2 * tile.j as u16, tile.anchor.clone())
    } else {
        ((sym.n() - diff) as u8, 2 * tile.k as u16, tile.anchor.clone())
    }
}

/// Necklace rhombi along the meta-edge from scaled corner `start` in meta
/// direction q: letter t' contributes the rhombus on unit directions
/// (2q−1+t')/2 and (2q−1−t')/2, tips advancing along the meta-edge midline.
fn necklace_edge(
    sym: &Symmetry,
    u: &Edgeword,
    start: &LatticeVector,
    q: usize,
    out: &mut Vec<PlacedTile>,
) -> LatticeVector {
    let n = sym.n();
    let mut p = start.clone();
    for &letter in &u.letters {
        let tt = letter as usize;
        let a1 = (((2 * q + 4 * n - 1 + tt) % (4 * n)) / 2) % (2 * n);
        let a2 = (((2 * q + 4 * n - 1 - tt) % (4 * n)) / 2) % (2 * n);
        out.push(
            PlacedTile::from_corner(sym, &p, a1, a2).expect("necklace directions are non-parallel"),
        );
        p = lattice_add(&p, &sym.step_vector(a1));
        p = lattice_add(&p, &sym.step_vector(a2));
    }
    p
}

/// Build σ_u: expansion matrix plus one metatile per angle class. Fails with
/// a validation error if some metatile interior is not tileable (the word
/// does not satisfy the tileability conditions).
pub fn build_substitution(sym: &Symmetry, u: &Edgeword, node_budget: u64) -> Result<SubstitutionRule> {
    if u.is_empty() {
        return Err(RosaError::validation("empty edgeword"));
    }
    if !u.is_palindrome() {
        return Err(RosaError::validation("edgeword must be a palindrome"));
    }
    let expansion = expansion_matrix(sym, &abelianize(sym, u))?;
    let mut metatiles = Vec::with_capacity(sym.half());
    for d in 1..=sym.half() {
        let t = TileType::new(0, d, sym)?;
        let rep = PlacedTile { anchor: lattice_zero(sym.n()), j: 0, k: d as u8 };
        let interior_polygon = metatile_polygon(sym, u, &t)?;
        let mut necklace = Vec::with_capacity(4 * u.len());
        for (corner, q) in rep.ccw_edges(sym) {
            let scaled = expansion.apply(&corner);
            necklace_edge(sym, u, &scaled, q, &mut necklace);
        }
        // 2·center of the metatile: M_φ(e_0 + e_d).
        let mut span = lattice_zero(sym.n());
        span[0] += 1;
        span[d] += 1;
        let center2 = expansion.apply(&span);
        let verdict = tile_polygon_symmetric(sym, &interior_polygon, &center2, node_budget)?;
        if !verdict.tileable {
            return Err(RosaError::validation(format!(
                "metatile interior for class d={d} is not tileable: {:?}",
                verdict.violations
            )));
        }
        let interior = verdict.witness.expect("tileable verdict carries a witness").tiles;
        let mut patch = Patch { n: sym.n(), tiles: Vec::new() };
        patch.tiles.extend(necklace.iter().cloned());
        patch.tiles.extend(interior.iter().cloned());
        patch.canonicalize();
        metatiles.push(Metatile {
            d: d as u8,
            interior_polygon,
            necklace,
            interior,
            patch,
        });
    }
    Ok(SubstitutionRule { n: sym.n(), edgeword: u.clone(), expansion, metatiles })
}

/// Apply σ to a patch: each tile maps to M_φ·anchor + rot^o(metatile).
/// Shared necklace tiles are deduplicated by canonicalization. Errors with
/// Budget if the output would exceed `tile_budget` tiles.
pub fn apply_substitution(
    sym: &Symmetry,
    rule: &SubstitutionRule,
    patch: &Patch,
    tile_budget: u64,
) -> Result<Patch> {
    if patch.n != sym.n() || rule.n != sym.n() {
        return Err(RosaError::validation("patch, rule and symmetry orders disagree"));
    }
    let mut estimate: u64 = 0;
    for tile in &patch.tiles {
        let (d, _, _) = decompose(sym, tile);
        estimate += rule.metatile(d).patch.tiles.len() as u64;
    }
    if estimate > tile_budget {
        return Err(RosaError::Budget(format!(
            "substitution image of {} tiles would have up to {estimate} tiles (budget {tile_budget})",
            patch.tiles.len()
        )));
    }
    // Cache the rotated metatile patches per (class, orientation).
    let mut rotated: HashMap<(u8, u16), Patch> = HashMap::new();
    let mut out = Patch::new(sym.n());
    for tile in &patch.tiles {
        let (d, o, tau) = decompose(sym, tile);
        let meta = rotated
            .entry((d, o))
            .or_insert_with(|| rotate_patch(sym, &rule.metatile(d).patch, o as i64));
        let shift = rule.expansion.apply(&tau);
        out.tiles.extend(meta.translate(&shift).tiles);
    }
    out.canonicalize();
    Ok(out)
}

/// Tile census of one iteration step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationStats {
    pub k: usize,
    pub tiles: usize,
    /// counts_by_class[d−1] = tiles of angle-class parameter d.
    pub counts_by_class: Vec<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationResult {
    pub patch: Patch,
    pub stats: Vec<IterationStats>,
}

fn census(sym: &Symmetry, k: usize, patch: &Patch) -> IterationStats {
    let mut counts = vec![0u64; sym.half()];
    for t in &patch.tiles {
        let (d, _, _) = decompose(sym, t);
        counts[d as usize - 1] += 1;
    }
    IterationStats { k, tiles: patch.tiles.len(), counts_by_class: counts }
}

/// σ^k applied to the star S_n, with per-iteration statistics.
pub fn iterate_from_star(
    sym: &Symmetry,
    rule: &SubstitutionRule,
    k: usize,
    tile_budget: u64,
) -> Result<IterationResult> {
    let mut patch = star_patch(sym);
    let mut stats = vec![census(sym, 0, &patch)];
    for step in 1..=k {
        patch = apply_substitution(sym, rule, &patch, tile_budget)?;
        stats.push(census(sym, step, &patch));
    }
    Ok(IterationResult { patch, stats })
}

/// Transition matrix on angle classes: entry (d'−1, d−1) counts tiles of
/// class d' in the metatile of class d.
pub fn transition_matrix(sym: &Symmetry, rule: &SubstitutionRule) -> Vec<Vec<u64>> {
    let h = sym.half();
    let mut m = vec![vec![0u64; h]; h];
    for meta in &rule.metatiles {
        let col = meta.d as usize - 1;
        for tile in &meta.patch.tiles {
            let (dp, _, _) = decompose(sym, tile);
            m[dp as usize - 1][col] += 1;
        }
    }
    m
}

/// Primitivity order: the smallest k ≤ k_max such that σ^k(t) is guaranteed
/// to contain every prototile class in every one of its n orientations, for
/// every prototile t, *independently of how the metatile interiors were
/// tiled*. Only the necklace rhombi are canonical (they are forced by the
/// edgeword); interior witnesses are one tiling among possibly many, so the
/// certified order composes necklace occurrences across levels. Returns None
/// if no k ≤ k_max is certified. Orientation of a placed tile is the rotation
/// o mod n (o and o+n give the same unoriented rhombus).
pub fn check_primitivity(
    sym: &Symmetry,
    rule: &SubstitutionRule,
    k_max: usize,
    _tile_budget: u64,
) -> Result<Option<usize>> {
    let h = sym.half();
    let n = sym.n();
    let total = h * n;
    // reach[(d−1)·n + o] = necklace occurrences of rot^o(T_{0,d})'s metatile,
    // as a boolean row over the same state space; σ(rot^o t) = rot^o σ(t).
    let mut step = vec![vec![false; total]; total];
    for meta in &rule.metatiles {
        for tile in &meta.necklace {
            let (dp, op, _) = decompose(sym, tile);
            for o in 0..n {
                let row = (meta.d as usize - 1) * n + o;
                step[row][(dp as usize - 1) * n + (op as usize + o) % n] = true;
            }
        }
    }
    let mut reach = step.clone();
    for k in 1..=k_max {
        if reach.iter().all(|row| row.iter().all(|&b| b)) {
            return Ok(Some(k));
        }
        // reach ← reach ∘ step
        let mut next = vec![vec![false; total]; total];
        for (row, nrow) in reach.iter().zip(next.iter_mut()) {
            for (mid, &hit) in row.iter().enumerate() {
                if hit {
                    for (cell, &b) in nrow.iter_mut().zip(step[mid].iter()) {
                        *cell |= b;
                    }
                }
            }
        }
        reach = next;
    }
    Ok(None)
}
