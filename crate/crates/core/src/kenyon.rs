//! Kenyon matching (K1–K4) on unit-edge polygons, metatile interior polygons,
//! and a constructive tiler for parallelogram tilings.
//!
//! The verdict logic follows Kenyon's theorem: a simply connected unit-edge
//! polygon is tileable by parallelograms iff a matching of its boundary edges
//! exists satisfying K1 (equal type, opposite orientation), K2 (same-type
//! chains don't cross), K3 (matched edges face each other) and K4 (peripheral
//! monotonicity). The witness tiler peels corners guided by the matching's
//! chain-crossing relation, with backtracking as a safety net.

use crate::error::{Result, RosaError};
use crate::lattice::{
    lattice_add, LatticeVector, Patch, PlacedTile, PolygonBoundary, Symmetry, TileType,
};
use crate::edgeword::Edgeword;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Pairing of the polygon's boundary edges (K1+K2 unique matching).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Matching {
    /// partner[i] = index matched with edge i.
    pub partner: Vec<usize>,
    /// Basis types whose orientation runs were not cyclically contiguous
    /// (outside the guaranteed class; matching still computed, flagged).
    pub noncontiguous_types: Vec<usize>,
}

impl Matching {
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.partner.len() / 2);
        for (i, &p) in self.partner.iter().enumerate() {
            if i < p {
                out.push((i, p));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KCondition {
    K1,
    K2,
    K3,
    K4,
}

/// A violated Kenyon condition with the edge indices involved.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KViolation {
    pub condition: KCondition,
    pub edges: Vec<usize>,
    pub detail: String,
}

/// The non-crossing matchings per basis type. K1 forces equal counts of the
/// two orientations; K2 forces the matching to be non-crossing within each
/// type (same-type chains cannot cross in a tiling). When each orientation
/// forms a single cyclic run the non-crossing matching is unique; otherwise
/// several may exist and the caller tries each combination.
pub struct TypeMatchings {
    /// Per basis type: edge indices of that type in cyclic order, and all
    /// non-crossing pairings (indices into the position list).
    pub per_type: Vec<(Vec<usize>, Vec<Vec<(usize, usize)>>)>,
    pub noncontiguous_types: Vec<usize>,
}

impl TypeMatchings {
    /// Number of per-type combinations.
    pub fn combinations(&self) -> usize {
        self.per_type.iter().map(|(_, ms)| ms.len().max(1)).product()
    }

    /// Materialize the `idx`-th combination as a partner array.
    pub fn matching(&self, l: usize, mut idx: usize) -> Matching {
        let mut partner = vec![usize::MAX; l];
        for (positions, ms) in &self.per_type {
            if ms.is_empty() {
                continue;
            }
            let m = &ms[idx % ms.len()];
            idx /= ms.len();
            for &(a, b) in m {
                partner[positions[a]] = positions[b];
                partner[positions[b]] = positions[a];
            }
        }
        Matching { partner, noncontiguous_types: self.noncontiguous_types.clone() }
    }
}

/// Enumerate all non-crossing matchings for each basis type, K1 permitting.
pub fn type_matchings(sym: &Symmetry, poly: &PolygonBoundary, cap: usize) -> Result<TypeMatchings> {
    let l = poly.edges.len();
    if l == 0 {
        return Err(RosaError::validation("empty polygon"));
    }
    let mut per_type = Vec::with_capacity(sym.n());
    let mut noncontiguous = Vec::new();
    for t in 0..sym.n() {
        let mut positions = Vec::new();
        let mut signs = Vec::new();
        for (i, &d) in poly.edges.iter().enumerate() {
            let (basis, sign) = sym.step(d as usize);
            if basis == t {
                positions.push(i);
                signs.push(sign > 0);
            }
        }
        let nplus = signs.iter().filter(|&&s| s).count();
        if 2 * nplus != signs.len() {
            return Err(RosaError::validation(format!(
                "K1 impossible: type {t} has {} positive but {} negative edges",
                nplus,
                signs.len() - nplus
            )));
        }
        let runs = signs.windows(2).filter(|w| w[0] != w[1]).count()
            + usize::from(!signs.is_empty() && signs[0] != signs[signs.len() - 1]);
        if runs > 2 {
            noncontiguous.push(t);
        }
        let mut out = Vec::new();
        noncrossing_matchings(&signs, 0, signs.len(), &mut Vec::new(), &mut out, cap)?;
        per_type.push((positions, out));
    }
    Ok(TypeMatchings { per_type, noncontiguous_types: noncontiguous })
}

/// All non-crossing perfect matchings of opposite-sign elements on the
/// interval [lo, hi). A chord through the circle's first element splits the
/// rest into independent arcs, so the linear recursion covers the cyclic case.
fn noncrossing_matchings(
    signs: &[bool],
    lo: usize,
    hi: usize,
    acc: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
    cap: usize,
) -> Result<()> {
    if lo >= hi {
        if out.len() >= cap {
            return Err(RosaError::Budget(format!("more than {cap} non-crossing matchings")));
        }
        out.push(acc.clone());
        return Ok(());
    }
    let mut balance = 0i64;
    for q in (lo + 1)..hi {
        balance += if signs[q - 1] == signs[lo] { 1 } else { -1 };
        // Partner q needs the arc strictly between lo and q balanced.
        if signs[q] != signs[lo] && balance == 1 {
            acc.push((lo, q));
            // Recurse on the inner arc, then on the tail, sharing `acc`.
            collect_split(signs, lo + 1, q, q + 1, hi, acc, out, cap)?;
            acc.pop();
        }
    }
    Ok(())
}

fn collect_split(
    signs: &[bool],
    ilo: usize,
    ihi: usize,
    tlo: usize,
    thi: usize,
    acc: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
    cap: usize,
) -> Result<()> {
    // Enumerate inner-arc matchings; for each, continue into the tail.
    let mut inner = Vec::new();
    noncrossing_matchings(signs, ilo, ihi, &mut Vec::new(), &mut inner, cap)?;
    for m in inner {
        let mark = acc.len();
        acc.extend_from_slice(&m);
        noncrossing_matchings(signs, tlo, thi, acc, out, cap)?;
        acc.truncate(mark);
    }
    Ok(())
}

/// The canonical matching: first non-crossing combination per type.
pub fn unique_matching(sym: &Symmetry, poly: &PolygonBoundary) -> Result<Matching> {
    let tm = type_matchings(sym, poly, 4096)?;
    Ok(tm.matching(poly.edges.len(), 0))
}

fn unit(sym: &Symmetry, d: u16) -> (f64, f64) {
    sym.unit(d as usize)
}

fn cross(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

/// Check K3 and K4 for a K1+K2 matching. Empty list iff Kenyon matching.
pub fn verify_matching(sym: &Symmetry, poly: &PolygonBoundary, m: &Matching) -> Vec<KViolation> {
    let mut out = Vec::new();
    let l = poly.edges.len();
    // Edge midpoints in the plane.
    let mut mids = Vec::with_capacity(l);
    let (mut x, mut y) = sym.embed(&poly.base_vector());
    for &d in &poly.edges {
        let (dx, dy) = unit(sym, d);
        mids.push((x + dx / 2.0, y + dy / 2.0));
        x += dx;
        y += dy;
    }
    let pairs = m.pairs();
    // K3: matched edges must see each other — strictly positive displacement
    // along a⊥ = i·a.
    for &(p, q) in &pairs {
        let a = unit(sym, poly.edges[p]);
        let aperp = (-a.1, a.0);
        let d = (mids[q].0 - mids[p].0, mids[q].1 - mids[p].1);
        if d.0 * aperp.0 + d.1 * aperp.1 <= 1e-9 {
            out.push(KViolation {
                condition: KCondition::K3,
                edges: vec![p, q],
                detail: "paired edges do not face each other (a⊥ displacement ≤ 0)".into(),
            });
        }
    }
    // K2: same-type chains must not interleave.
    // K4: interleaved pairs {a,a'},{b,b'} of different types in cyclic order
    // a<b<a'<b' need cross(a, b) > 0 (value independent of labeling choice).
    for i in 0..pairs.len() {
        for j in (i + 1)..pairs.len() {
            let (p1, q1) = pairs[i];
            let (p2, q2) = pairs[j];
            let in1 = |x: usize| x > p1 && x < q1;
            if in1(p2) == in1(q2) {
                continue; // not interleaved
            }
            let same_type =
                sym.step(poly.edges[p1] as usize).0 == sym.step(poly.edges[p2] as usize).0;
            if same_type {
                out.push(KViolation {
                    condition: KCondition::K2,
                    edges: vec![p1, q1, p2, q2],
                    detail: "same-type chains cross".into(),
                });
                continue;
            }
            // Cyclic order p1 < b < q1 < b' with b the pair-j endpoint inside.
            let b_edge = if in1(p2) { p2 } else { q2 };
            let a = unit(sym, poly.edges[p1]);
            let b = unit(sym, poly.edges[b_edge]);
            if cross(a, b) <= 1e-9 {
                out.push(KViolation {
                    condition: KCondition::K4,
                    edges: vec![p1, q1, p2, q2],
                    detail: "interleaved chains not peripherally monotonous (a⊥·b ≤ 0)".into(),
                });
            }
        }
    }
    out
}

/// The interior polygon of the metatile of the pseudo-substitution with
/// edgeword u on prototile t, walked counterclockwise from the lattice origin.
///
/// Along a meta-edge of original direction index q (plane angle qπ/n −
/// π/(2n)), each letter t' contributes two unit edges at direction indices
/// (2q−1+t')/2 and (2q−1−t')/2 (in that order, interior on the left). Narrow
/// corners where consecutive edges retrace each other are cancelled.
pub fn metatile_polygon(sym: &Symmetry, u: &Edgeword, t: &TileType) -> Result<PolygonBoundary> {
    if !u.is_palindrome() {
        return Err(RosaError::validation("edgeword must be a palindrome"));
    }
    if u.is_empty() {
        return Err(RosaError::validation("empty edgeword"));
    }
    let n = sym.n();
    let rep = PlacedTile { anchor: crate::lattice::lattice_zero(n), j: t.j, k: t.k };
    let meta_dirs: Vec<usize> = rep.ccw_edges(sym).iter().map(|(_, d)| *d).collect();
    let mut dirs: Vec<u16> = Vec::with_capacity(8 * u.len());
    for &q in &meta_dirs {
        for &letter in &u.letters {
            let tt = letter as usize;
            let a1 = ((2 * q + 4 * n - 1 + tt) % (4 * n)) / 2;
            let a2 = ((2 * q + 4 * n - 1 - tt) % (4 * n)) / 2;
            dirs.push((a1 % (2 * n)) as u16);
            dirs.push((a2 % (2 * n)) as u16);
        }
    }
    // Cancel retracing pairs (zero-angle narrow corners), including wraparound.
    let mut base = crate::lattice::lattice_zero(n);
    let mut stack: Vec<u16> = Vec::with_capacity(dirs.len());
    for d in dirs {
        if let Some(&top) = stack.last() {
            if (top as usize + n) % (2 * n) == d as usize {
                stack.pop();
                continue;
            }
        }
        stack.push(d);
    }
    while stack.len() >= 2 {
        let f = stack[0] as usize;
        let l = *stack.last().unwrap() as usize;
        if (f + n) % (2 * n) == l {
            stack.pop();
            stack.remove(0);
            base = lattice_add(&base, &sym.step_vector(f));
        } else {
            break;
        }
    }
    let mut poly = PolygonBoundary::new(n, stack);
    poly.base = base.to_vec();
    if !poly.is_closed(sym) {
        return Err(RosaError::Internal(format!(
            "metatile polygon does not close for u={} t=({}, {})",
            u, t.j, t.k
        )));
    }
    debug_assert!(poly.signed_area(sym) > 0.0, "metatile polygon must be counterclockwise");
    Ok(poly)
}

/// Outcome of `tile_polygon`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TileabilityVerdict {
    pub tileable: bool,
    pub witness: Option<Patch>,
    pub violations: Vec<KViolation>,
    pub budget_exceeded: bool,
    pub nodes: u64,
}

/// Decide tileability via the Kenyon matching and, when it is valid,
/// construct a witness tiling by matching-guided corner peeling with
/// backtracking and memoization of failed boundary states.
pub fn tile_polygon(sym: &Symmetry, poly: &PolygonBoundary, node_budget: u64) -> Result<TileabilityVerdict> {
    tile_polygon_impl(sym, poly, None, node_budget)
}

/// Like `tile_polygon` but the witness is centrally symmetric about the point
/// c with lattice coordinates `center2`/2: every peeled tile is paired with
/// its point reflection. Requires the polygon itself to be symmetric about c.
pub fn tile_polygon_symmetric(
    sym: &Symmetry,
    poly: &PolygonBoundary,
    center2: &LatticeVector,
    node_budget: u64,
) -> Result<TileabilityVerdict> {
    tile_polygon_impl(sym, poly, Some(center2.clone()), node_budget)
}

fn tile_polygon_impl(
    sym: &Symmetry,
    poly: &PolygonBoundary,
    center2: Option<LatticeVector>,
    node_budget: u64,
) -> Result<TileabilityVerdict> {
    if poly.edges.is_empty() {
        return Err(RosaError::validation("empty polygon"));
    }
    if !poly.is_closed(sym) {
        return Err(RosaError::validation("polygon is not closed"));
    }
    if poly.signed_area(sym) <= 0.0 {
        return Err(RosaError::validation("polygon must be positively oriented"));
    }
    let tm = match type_matchings(sym, poly, 4096) {
        Ok(tm) => tm,
        Err(RosaError::Validation(msg)) => {
            return Ok(TileabilityVerdict {
                tileable: false,
                witness: None,
                violations: vec![KViolation { condition: KCondition::K1, edges: vec![], detail: msg }],
                budget_exceeded: false,
                nodes: 0,
            })
        }
        Err(e) => return Err(e),
    };
    // Try each per-type combination of non-crossing matchings (usually one):
    // tileable iff some combination satisfies K2–K4, and then Kenyon's theorem
    // guarantees matching-guided peeling terminates with a witness.
    let mut first_violations: Option<Vec<KViolation>> = None;
    let mut nodes_used = 0u64;
    for idx in 0..tm.combinations() {
        let matching = tm.matching(poly.edges.len(), idx);
        let violations = verify_matching(sym, poly, &matching);
        if !violations.is_empty() {
            first_violations.get_or_insert(violations);
            continue;
        }
        let pairs = matching.pairs();
        let nchains = pairs.len();
        let mut chain_of = vec![usize::MAX; poly.edges.len()];
        for (c, &(p, q)) in pairs.iter().enumerate() {
            chain_of[p] = c;
            chain_of[q] = c;
        }
        let state = BoundaryState {
            dirs: poly.edges.clone(),
            chains: (0..poly.edges.len()).map(|i| chain_of[i] as u32).collect(),
            base: poly.base_vector(),
        };
        let mut search = PeelSearch {
            sym: *sym,
            nchains,
            nodes: nodes_used,
            budget: node_budget,
            memo: HashSet::new(),
            tiles: Vec::new(),
            exceeded: false,
            center2: center2.clone(),
        };
        let found = search.run(state);
        nodes_used = search.nodes;
        if search.exceeded {
            return Err(RosaError::Budget(format!(
                "tiler exceeded node budget {node_budget} on a {}-edge polygon",
                poly.edges.len()
            )));
        }
        if found {
            let mut patch = Patch { n: sym.n(), tiles: search.tiles };
            patch.canonicalize();
            return Ok(TileabilityVerdict {
                tileable: true,
                witness: Some(patch),
                violations: Vec::new(),
                budget_exceeded: false,
                nodes: nodes_used,
            });
        }
        // Conditions held but peeling failed: only possible for the symmetric
        // variant when the polygon/matching lacks the requested symmetry.
        if center2.is_none() {
            return Err(RosaError::Internal(
                "valid Kenyon matching but witness search failed".into(),
            ));
        }
    }
    Ok(TileabilityVerdict {
        tileable: false,
        witness: None,
        violations: first_violations.unwrap_or_default(),
        budget_exceeded: false,
        nodes: nodes_used,
    })
}

#[derive(Clone)]
struct BoundaryState {
    dirs: Vec<u16>,
    chains: Vec<u32>,
    base: LatticeVector,
}

struct PeelSearch {
    sym: Symmetry,
    nchains: usize,
    nodes: u64,
    budget: u64,
    memo: HashSet<Vec<(u16, u32)>>,
    tiles: Vec<PlacedTile>,
    exceeded: bool,
    /// When set to 2c, every placement is mirrored through c.
    center2: Option<LatticeVector>,
}

impl PeelSearch {
    /// Boundary positions of each surviving chain's two edges.
    fn chain_positions(&self, state: &BoundaryState) -> Vec<[usize; 2]> {
        let mut pos = vec![[usize::MAX; 2]; self.nchains];
        for (i, &c) in state.chains.iter().enumerate() {
            let p = &mut pos[c as usize];
            if p[0] == usize::MAX {
                p[0] = i;
            } else {
                p[1] = i;
            }
        }
        pos
    }

    fn midpoints(&self, state: &BoundaryState) -> Vec<(f64, f64)> {
        let (mut x, mut y) = self.sym.embed(&state.base);
        state
            .dirs
            .iter()
            .map(|&d| {
                let (dx, dy) = self.sym.unit(d as usize);
                let m = (x + dx / 2.0, y + dy / 2.0);
                x += dx;
                y += dy;
                m
            })
            .collect()
    }

    /// Re-verify K2–K4 for the chains a placement just moved; conditions for
    /// all other chains held before the move and are unaffected by it. A peel
    /// that breaks the conditions leads to an untileable region (Kenyon), so
    /// it is pruned here at depth one.
    fn check_moved(&self, state: &BoundaryState, moved: &[u32]) -> bool {
        let l = state.dirs.len();
        let n = self.sym.n();
        let pos = self.chain_positions(state);
        let mids = self.midpoints(state);
        for &c in moved {
            let [e0, e1] = pos[c as usize];
            if e1 == usize::MAX {
                continue;
            }
            let (p, q) = (e0.min(e1), e0.max(e1));
            if q == p + 1 || (p == 0 && q == l - 1) {
                continue; // completed chain; the forced cancellation removes it
            }
            // K3: the partner must lie on the interior side.
            let a = self.sym.unit(state.dirs[p] as usize);
            let disp = (mids[q].0 - mids[p].0, mids[q].1 - mids[p].1);
            if disp.0 * (-a.1) + disp.1 * a.0 <= 1e-9 {
                return false;
            }
            let tc = self.sym.step(state.dirs[p] as usize).0;
            // K2/K4 versus every chain currently interleaved with c.
            for (x, &[r0, r1]) in pos.iter().enumerate() {
                if x as u32 == c || r1 == usize::MAX {
                    continue;
                }
                let inside = |e: usize| e > p && e < q;
                if inside(r0) == inside(r1) {
                    continue;
                }
                if self.sym.step(state.dirs[r0] as usize).0 == tc {
                    return false; // K2: same-type chains may not cross
                }
                let b_edge = if inside(r0) { r0 } else { r1 };
                let b = self.sym.unit(state.dirs[b_edge] as usize);
                if a.0 * b.1 - a.1 * b.0 <= 1e-9 {
                    return false; // K4
                }
            }
            debug_assert_eq!((state.dirs[p] as usize + n) % (2 * n), state.dirs[q] as usize);
        }
        true
    }

    fn run(&mut self, mut state: BoundaryState) -> bool {
        // Forced moves: cancel adjacent retracing edges of the same chain.
        loop {
            if state.dirs.is_empty() {
                return true;
            }
            let l = state.dirs.len();
            let n = self.sym.n();
            let mut cancelled = false;
            for i in 0..l {
                let j = (i + 1) % l;
                if state.chains[i] == state.chains[j]
                    && (state.dirs[i] as usize + n) % (2 * n) == state.dirs[j] as usize
                {
                    self.cancel(&mut state, i);
                    cancelled = true;
                    break;
                }
            }
            if !cancelled {
                break;
            }
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exceeded = true;
            return false;
        }
        let l = state.dirs.len();
        let n = self.sym.n();
        // Candidate corners: convex turn between edges of chains that still
        // interleave (cross ahead); most acute interior angle first.
        let pos = self.chain_positions(&state);
        let mut candidates: Vec<(usize, usize)> = Vec::new();
        for i in 0..l {
            let j = (i + 1) % l;
            let turn = (state.dirs[j] as usize + 2 * n - state.dirs[i] as usize) % (2 * n);
            if turn == 0 || turn >= n {
                continue;
            }
            let (c1, c2) = (state.chains[i] as usize, state.chains[j] as usize);
            if c1 == c2 {
                continue;
            }
            let [p, q] = pos[c1];
            let (p, q) = (p.min(q), p.max(q));
            let inside = |e: usize| e > p && e < q;
            let [r0, r1] = pos[c2];
            if inside(r0) != inside(r1) {
                candidates.push((i, turn));
            }
        }
        if candidates.is_empty() {
            return false;
        }
        candidates.sort_by_key(|&(i, turn)| (std::cmp::Reverse(turn), i));
        // The canonical key costs O(L²); only pay for it once backtracking
        // has actually produced failed states.
        if !self.memo.is_empty() && self.memo.contains(&canonical_key(&state)) {
            return false;
        }
        let tiles_mark = self.tiles.len();
        for &(i, _) in &candidates {
            let mut next = state.clone();
            let mut idx = i;
            if idx + 1 == next.dirs.len() {
                rotate_front(&self.sym, &mut next);
                idx -= 1;
            }
            let mut moved: Vec<u32> = Vec::with_capacity(4);
            let ok = if let Some(c2) = self.center2.clone() {
                self.place_pair(&mut next, idx, &c2, &mut moved)
            } else {
                moved.push(next.chains[idx]);
                moved.push(next.chains[idx + 1]);
                self.place(&mut next, idx);
                true
            };
            if ok && self.check_moved(&next, &moved) && self.run(next) {
                return true;
            }
            if self.exceeded {
                return false;
            }
            self.tiles.truncate(tiles_mark);
        }
        self.memo.insert(canonical_key(&state));
        false
    }

    /// Remove retracing edges at positions i, i+1 (mod l).
    fn cancel(&mut self, state: &mut BoundaryState, i: usize) {
        let l = state.dirs.len();
        if i + 1 < l {
            state.dirs.drain(i..=i + 1);
            state.chains.drain(i..=i + 1);
            if i == 0 {
                // First two edges retraced each other; base is unchanged.
            }
        } else {
            // Pair wraps: remove last and first; base advances past old edge 0.
            let d0 = state.dirs[0];
            state.dirs.pop();
            state.dirs.remove(0);
            state.chains.pop();
            state.chains.remove(0);
            state.base = lattice_add(&state.base, &self.sym.step_vector(d0 as usize));
        }
    }

    /// Place the rhombus at the corner between edges i and i+1 (i+1 < len)
    /// and swap the boundary edges. Returns the placed tile.
    fn place(&mut self, state: &mut BoundaryState, i: usize) -> PlacedTile {
        debug_assert!(i + 1 < state.dirs.len());
        // Start vertex of edge i.
        let mut p = state.base.clone();
        for e in 0..i {
            p = lattice_add(&p, &self.sym.step_vector(state.dirs[e] as usize));
        }
        let tile = PlacedTile::from_corner(
            &self.sym,
            &p,
            state.dirs[i + 1] as usize,
            state.dirs[i] as usize,
        )
        .expect("corner edges are non-parallel");
        self.tiles.push(tile.clone());
        state.dirs.swap(i, i + 1);
        state.chains.swap(i, i + 1);
        tile
    }

    /// Symmetric placement: place at corner i and at its point reflection
    /// through c = center2/2 (unless the tile is its own reflection). Returns
    /// false if the mirror corner cannot be located (dead candidate).
    fn place_pair(
        &mut self,
        state: &mut BoundaryState,
        i: usize,
        center2: &LatticeVector,
        moved: &mut Vec<u32>,
    ) -> bool {
        let n = self.sym.n();
        let a = state.dirs[i] as usize;
        let b = state.dirs[i + 1] as usize;
        moved.push(state.chains[i]);
        moved.push(state.chains[i + 1]);
        // Corner vertex V = start of edge i+1; the tile spans V−u(a), V, V+u(b).
        let mut v = state.base.clone();
        for e in 0..=i {
            v = lattice_add(&v, &self.sym.step_vector(state.dirs[e] as usize));
        }
        self.place(state, i);
        // Self-reflected tile: 2·center(tile) = 2V − u(a) + u(b).
        let mut tile_c2 = lattice_add(&v, &v);
        tile_c2 = crate::lattice::lattice_sub(&tile_c2, &self.sym.step_vector(a));
        tile_c2 = lattice_add(&tile_c2, &self.sym.step_vector(b));
        if &tile_c2 == center2 {
            return true;
        }
        // Mirror corner: vertex V' = 2c − V with incoming a+n, outgoing b+n.
        let vp = crate::lattice::lattice_sub(center2, &v);
        let an = ((a + n) % (2 * n)) as u16;
        let bn = ((b + n) % (2 * n)) as u16;
        let l = state.dirs.len();
        let mut cur = state.base.clone();
        let mut found = None;
        for j in 0..l {
            // cur = start of edge j; corner vertex of (j, j+1) is its end.
            let end = lattice_add(&cur, &self.sym.step_vector(state.dirs[j] as usize));
            if state.dirs[j] == an && state.dirs[(j + 1) % l] == bn && end == vp {
                found = Some(j);
                break;
            }
            cur = end;
        }
        let Some(mut j) = found else {
            debug_assert!(false, "mirror corner not found on symmetric boundary");
            return false;
        };
        if j + 1 == l {
            rotate_front(&self.sym, state);
            j -= 1;
        }
        moved.push(state.chains[j]);
        moved.push(state.chains[j + 1]);
        self.place(state, j);
        true
    }
}

/// Cyclically rotate the boundary so the old edge 0 becomes the last edge.
fn rotate_front(sym: &Symmetry, state: &mut BoundaryState) {
    let d0 = state.dirs.remove(0);
    let c0 = state.chains.remove(0);
    state.base = lattice_add(&state.base, &sym.step_vector(d0 as usize));
    state.dirs.push(d0);
    state.chains.push(c0);
}

/// Rotation-canonical form of the boundary word with chain ids relabeled by
/// first appearance; used as memo key for failed states.
fn canonical_key(state: &BoundaryState) -> Vec<(u16, u32)> {
    let l = state.dirs.len();
    let mut best: Option<Vec<(u16, u32)>> = None;
    for start in 0..l {
        let mut relabel: Vec<u32> = Vec::new();
        let mut cand = Vec::with_capacity(l);
        for off in 0..l {
            let idx = (start + off) % l;
            let c = state.chains[idx];
            let id = match relabel.iter().position(|&x| x == c) {
                Some(pos) => pos as u32,
                None => {
                    relabel.push(c);
                    (relabel.len() - 1) as u32
                }
            };
            cand.push((state.dirs[idx], id));
        }
        if best.as_ref().map_or(true, |b| cand < *b) {
            best = Some(cand);
        }
    }
    best.unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edgeword::{abelianize, subrosa_edgeword};
    use crate::lattice::{lattice_zero, validate_patch};
    use crate::spectral::{eigenvalues, expansion_matrix};
    use crate::TileType;

    #[test]
    fn unit_rhombus_matches_opposite_edges() {
        let sym = Symmetry::new(5).unwrap();
        let poly = PolygonBoundary::new(5, vec![0, 2, 5, 7]);
        let m = unique_matching(&sym, &poly).unwrap();
        assert_eq!(m.partner, vec![2, 3, 0, 1]);
        assert!(verify_matching(&sym, &poly, &m).is_empty());
        let verdict = tile_polygon(&sym, &poly, 100).unwrap();
        assert!(verdict.tileable);
        assert_eq!(verdict.witness.unwrap().tiles.len(), 1);
    }

    #[test]
    fn unbalanced_boundary_fails_k1() {
        // Edge counts per type must balance (opposite orientations pair up).
        let sym = Symmetry::new(5).unwrap();
        let poly = PolygonBoundary::new(5, vec![0, 2, 4, 6]);
        assert!(type_matchings(&sym, &poly, 64).is_err());
        let verdict = tile_polygon(&sym, &PolygonBoundary::new(5, vec![0, 2, 5, 7, 0, 5]), 100);
        // Balanced but zero-area figure never reaches the peel.
        assert!(verdict.is_err() || !verdict.unwrap().tileable);
    }

    #[test]
    fn reversed_rhombus_fails_k3() {
        // Traversing the rhombus clockwise flips every displacement, so each
        // matched pair faces away from its partner; reject before peeling.
        let sym = Symmetry::new(5).unwrap();
        let poly = PolygonBoundary::new(5, vec![0, 7, 5, 2]);
        let tm = type_matchings(&sym, &poly, 64).unwrap();
        let m = tm.matching(4, 0);
        assert!(verify_matching(&sym, &poly, &m)
            .iter()
            .any(|v| v.condition == KCondition::K3));
    }

    #[test]
    fn hexagon_has_unique_matching_and_three_tiles() {
        let sym = Symmetry::new(3).unwrap();
        let poly = PolygonBoundary::new(3, vec![0, 1, 2, 3, 4, 5]);
        let tm = type_matchings(&sym, &poly, 64).unwrap();
        assert_eq!(tm.combinations(), 1);
        assert!(tm.noncontiguous_types.is_empty());
        let verdict = tile_polygon(&sym, &poly, 100).unwrap();
        assert!(verdict.tileable);
        let w = verdict.witness.unwrap();
        assert_eq!(w.tiles.len(), 3);
        assert!(validate_patch(&sym, &w).is_valid());
    }

    #[test]
    fn noncrossing_matchings_are_enumerated() {
        let sym = Symmetry::new(5).unwrap();
        // Type 0 orientations read ++−−++−−: three non-crossing matchings.
        let poly = PolygonBoundary::new(5, vec![0, 0, 5, 5, 0, 0, 5, 5, 2, 7]);
        let tm = type_matchings(&sym, &poly, 64).unwrap();
        let per: Vec<usize> = tm.per_type.iter().map(|(_, ms)| ms.len()).collect();
        assert!(per.contains(&3), "per-type counts {per:?}");
        assert_eq!(tm.combinations(), 3);
        let dirs = sym.dirs() as u16;
        for idx in 0..tm.combinations() {
            let m = tm.matching(poly.edges.len(), idx);
            for (p, q) in m.pairs() {
                assert_eq!((poly.edges[p] + sym.n() as u16) % dirs, poly.edges[q]);
            }
        }
    }

    #[test]
    fn metatile_polygon_frozen_d1() {
        let sym = Symmetry::new(5).unwrap();
        let u = subrosa_edgeword(&sym);
        let t = TileType::new(0, 1, &sym).unwrap();
        let poly = metatile_polygon(&sym, &u, &t).unwrap();
        assert_eq!(
            poly.edges,
            vec![
                0, 9, 1, 8, 0, 9, 0, 9, 1, 8, 0, 9, 2, 1, 3, 0, 2, 1, 2, 1, 3, 0, 2, 1, 5, 4,
                6, 3, 5, 4, 5, 4, 6, 3, 5, 4, 7, 6, 8, 5, 7, 6, 7, 6, 8, 5, 7, 6
            ]
        );
        assert!(poly.is_closed(&sym));
        assert!((poly.signed_area(&sym) - 85.8312).abs() < 1e-3);
        let t2 = TileType::new(0, 2, &sym).unwrap();
        let poly2 = metatile_polygon(&sym, &u, &t2).unwrap();
        assert!((poly2.signed_area(&sym) - 49.7980).abs() < 1e-3);
        // |λ₀|²·sin(2πd/n) = interior area + half the edge-rhombus area.
        let lam0 = eigenvalues(&sym, &abelianize(&sym, &u)).unwrap().moduli[0];
        for (d, poly) in [(1usize, &poly), (2, &poly2)] {
            let inflated = lam0 * lam0 * (2.0 * std::f64::consts::PI * d as f64 / 5.0).sin();
            assert!(poly.signed_area(&sym) < inflated);
        }
    }

    #[test]
    fn metatile_requires_palindrome() {
        let sym = Symmetry::new(5).unwrap();
        let u = Edgeword::parse(&sym, "13").unwrap();
        let t = TileType::new(0, 1, &sym).unwrap();
        assert!(metatile_polygon(&sym, &u, &t).is_err());
    }

    #[test]
    fn symmetric_witnesses_for_subrosa5_metatiles() {
        let sym = Symmetry::new(5).unwrap();
        let u = subrosa_edgeword(&sym);
        let m_phi = expansion_matrix(&sym, &abelianize(&sym, &u)).unwrap();
        for d in 1..=2u8 {
            let t = TileType::new(0, d as usize, &sym).unwrap();
            let poly = metatile_polygon(&sym, &u, &t).unwrap();
            let mut e0d = lattice_zero(sym.n());
            e0d[0] += 1;
            e0d[d as usize] += 1;
            let c2 = m_phi.apply(&e0d);
            let verdict = tile_polygon_symmetric(&sym, &poly, &c2, 1_000_000).unwrap();
            assert!(verdict.tileable, "d={d}");
            let w = verdict.witness.unwrap();
            assert!(validate_patch(&sym, &w).is_valid());
            // Point reflection in c maps each unit cell to the cell anchored
            // at 2c − anchor − e_j − e_k with the same basis pair.
            let mut mirrored = w.clone();
            for tile in &mut mirrored.tiles {
                let mut a: LatticeVector =
                    c2.iter().zip(tile.anchor.iter()).map(|(x, y)| x - y).collect();
                a[tile.j as usize] -= 1;
                a[tile.k as usize] -= 1;
                tile.anchor = a;
            }
            mirrored.canonicalize();
            let mut orig = w.clone();
            orig.canonicalize();
            assert_eq!(orig, mirrored, "d={d}: witness not centrally symmetric");
        }
    }
}
