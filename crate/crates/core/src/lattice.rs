//! Directions, lifted vertices, tiles and patches.
//!
//! Everything geometric is stored in lattice (ℤⁿ) coordinates: a vertex is the
//! integer vector of its abelianized edge path from the origin, and the plane
//! picture is recovered by `embed` (v_k = e^{i2kπ/n}). Plane coordinates are
//! derived, never stored.

use crate::error::{Result, RosaError};
use serde::{Deserialize, Serialize};
use smallvec::{smallvec, SmallVec};
use std::collections::{HashMap, HashSet};

pub type Coord = i32;
/// Lifted vertex coordinate in ℤⁿ (coefficients of Σ k_i v_i).
pub type LatticeVector = SmallVec<[Coord; 12]>;

pub fn lattice_zero(n: usize) -> LatticeVector {
    smallvec![0; n]
}

pub fn lattice_add(a: &LatticeVector, b: &LatticeVector) -> LatticeVector {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b.iter()).map(|(x, y)| x + y).collect()
}

pub fn lattice_sub(a: &LatticeVector, b: &LatticeVector) -> LatticeVector {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b.iter()).map(|(x, y)| x - y).collect()
}

/// The symmetry context: n odd edge directions, 2n signed unit directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Symmetry {
    n: usize,
}

impl Symmetry {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(RosaError::validation(format!("n must be odd and ≥ 3, got {n}")));
        }
        Ok(Symmetry { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// ⌊n/2⌋: number of rhombus angle classes / eigenplanes.
    pub fn half(&self) -> usize {
        self.n / 2
    }

    /// Number of signed unit directions (2n).
    pub fn dirs(&self) -> usize {
        2 * self.n
    }

    /// Embedded unit vector e^{iπm/n} for a DirectionIndex m ∈ [0, 2n).
    pub fn unit(&self, m: usize) -> (f64, f64) {
        let a = std::f64::consts::PI * (m as f64) / (self.n as f64);
        (a.cos(), a.sin())
    }

    /// Decode a DirectionIndex into (basis index k, sign): even m = 2k is +e_k,
    /// odd m is −e_{(m+n)/2 mod n} (valid because n is odd).
    pub fn step(&self, m: usize) -> (usize, i32) {
        let m = m % self.dirs();
        if m % 2 == 0 {
            (m / 2, 1)
        } else {
            (((m + self.n) % (2 * self.n)) / 2, -1)
        }
    }

    /// Inverse of `step`.
    pub fn dir_of(&self, basis: usize, sign: i32) -> usize {
        debug_assert!(basis < self.n);
        if sign > 0 {
            2 * basis
        } else {
            (2 * basis + self.n) % (2 * self.n)
        }
    }

    /// Lattice step of a DirectionIndex as a vector.
    pub fn step_vector(&self, m: usize) -> LatticeVector {
        let (k, s) = self.step(m);
        let mut v = lattice_zero(self.n);
        v[k] = s;
        v
    }

    /// embed(v) = Σ k_i (cos(2iπ/n), sin(2iπ/n)).
    pub fn embed(&self, v: &LatticeVector) -> (f64, f64) {
        debug_assert_eq!(v.len(), self.n);
        let mut x = 0.0;
        let mut y = 0.0;
        for (i, &c) in v.iter().enumerate() {
            if c != 0 {
                let a = 2.0 * std::f64::consts::PI * (i as f64) / (self.n as f64);
                x += c as f64 * a.cos();
                y += c as f64 * a.sin();
            }
        }
        (x, y)
    }

    /// Rotation by mπ/n on lattice coordinates. One step acts on the basis as
    /// e_k ↦ −e_{(k+(n+1)/2) mod n}; m steps give sign (−1)^m and index shift
    /// m(n+1)/2 mod n.
    pub fn rotate_vector(&self, v: &LatticeVector, m: i64) -> LatticeVector {
        let n = self.n as i64;
        let m = m.rem_euclid(2 * n);
        let shift = (m * (n + 1) / 2).rem_euclid(n) as usize;
        // Each step contributes one sign flip: (−1)^m overall.
        let overall: Coord = if m % 2 == 0 { 1 } else { -1 };
        let mut out = lattice_zero(self.n);
        for (k, &c) in v.iter().enumerate() {
            out[(k + shift) % self.n] += overall * c;
        }
        out
    }
}

/// Prototile identifier T_{j,k}, 0 ≤ j < k < n: the rhombus with edge
/// directions v_j and v_k (all four orientations of that shape).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TileType {
    pub j: u8,
    pub k: u8,
}

impl TileType {
    pub fn new(j: usize, k: usize, sym: &Symmetry) -> Result<Self> {
        if j >= k || k >= sym.n() {
            return Err(RosaError::validation(format!(
                "tile type requires 0 ≤ j < k < n, got j={j}, k={k}, n={}",
                sym.n()
            )));
        }
        Ok(TileType { j: j as u8, k: k as u8 })
    }

    /// Odd angle class t: the rhombus has angles tπ/n and (n−t)π/n where
    /// t = n − 2·min(k−j, n−(k−j)).
    pub fn angle_class(&self, sym: &Symmetry) -> usize {
        let d = (self.k - self.j) as usize;
        let f = d.min(sym.n() - d);
        sym.n() - 2 * f
    }
}

/// A placed rhombus: the integer square S_{anchor,j,k} with vertex set
/// anchor + {0, e_j, e_k, e_j+e_k}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlacedTile {
    pub anchor: LatticeVector,
    pub j: u8,
    pub k: u8,
}

impl PlacedTile {
    pub fn tile_type(&self) -> TileType {
        TileType { j: self.j, k: self.k }
    }

    pub fn vertices(&self) -> [LatticeVector; 4] {
        let a = self.anchor.clone();
        let mut b = a.clone();
        b[self.j as usize] += 1;
        let mut c = b.clone();
        c[self.k as usize] += 1;
        let mut d = a.clone();
        d[self.k as usize] += 1;
        [a, b, c, d]
    }

    /// The four directed boundary edges in counterclockwise order, as
    /// (start vertex, DirectionIndex).
    pub fn ccw_edges(&self, sym: &Symmetry) -> [(LatticeVector, usize); 4] {
        let n = sym.n();
        let [a, b, c, d] = self.vertices();
        let dj = 2 * self.j as usize;
        let dk = 2 * self.k as usize;
        // cross(v_j, v_k) = sin(2π(k−j)/n) > 0 iff k−j < n/2.
        if ((self.k - self.j) as usize) < n - (self.k - self.j) as usize {
            [
                (a, dj),
                (b, dk),
                (c, (dj + n) % (2 * n)),
                (d, (dk + n) % (2 * n)),
            ]
        } else {
            [
                (a, dk),
                (d, dj),
                (c, (dk + n) % (2 * n)),
                (b, (dj + n) % (2 * n)),
            ]
        }
    }

    /// Build the tile whose vertices are {p, p+u(d1), p+u(d1)+u(d2), p+u(d2)}
    /// for signed unit directions d1, d2 (must be non-parallel).
    pub fn from_corner(sym: &Symmetry, p: &LatticeVector, d1: usize, d2: usize) -> Result<Self> {
        let (b1, s1) = sym.step(d1);
        let (b2, s2) = sym.step(d2);
        if b1 == b2 {
            return Err(RosaError::validation(format!(
                "directions {d1} and {d2} are parallel; no rhombus"
            )));
        }
        let mut anchor = p.clone();
        if s1 < 0 {
            anchor[b1] -= 1;
        }
        if s2 < 0 {
            anchor[b2] -= 1;
        }
        let (j, k) = if b1 < b2 { (b1, b2) } else { (b2, b1) };
        Ok(PlacedTile { anchor, j: j as u8, k: k as u8 })
    }
}

/// An edge-to-edge set of placed tiles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Patch {
    pub n: usize,
    pub tiles: Vec<PlacedTile>,
}

impl Patch {
    pub fn new(n: usize) -> Self {
        Patch { n, tiles: Vec::new() }
    }

    /// Distinct vertices of all tiles.
    pub fn vertex_set(&self) -> HashSet<LatticeVector> {
        let mut set = HashSet::with_capacity(self.tiles.len() + 4);
        for t in &self.tiles {
            for v in t.vertices() {
                set.insert(v);
            }
        }
        set
    }

    /// Canonical form: tiles sorted by (anchor, j, k). Used for equality up to
    /// tile order and for deterministic output.
    pub fn canonicalize(&mut self) {
        self.tiles
            .sort_by(|a, b| (&a.anchor[..], a.j, a.k).cmp(&(&b.anchor[..], b.j, b.k)));
        self.tiles.dedup();
    }

    pub fn translate(&self, by: &LatticeVector) -> Patch {
        Patch {
            n: self.n,
            tiles: self
                .tiles
                .iter()
                .map(|t| PlacedTile {
                    anchor: lattice_add(&t.anchor, by),
                    j: t.j,
                    k: t.k,
                })
                .collect(),
        }
    }
}

/// Rotate a patch by mπ/n about the origin (lattice-exact).
pub fn rotate_patch(sym: &Symmetry, p: &Patch, m: i64) -> Patch {
    let tiles = p
        .tiles
        .iter()
        .map(|t| rotate_tile(sym, t, m))
        .collect();
    Patch { n: p.n, tiles }
}

pub fn rotate_tile(sym: &Symmetry, t: &PlacedTile, m: i64) -> PlacedTile {
    // Rotate the anchor vertex and the two edge steps; re-anchor at the new
    // minimal corner.
    let p = sym.rotate_vector(&t.anchor, m);
    let d1 = ((2 * t.j as i64 + m).rem_euclid(2 * sym.n() as i64)) as usize;
    let d2 = ((2 * t.k as i64 + m).rem_euclid(2 * sym.n() as i64)) as usize;
    PlacedTile::from_corner(sym, &p, d1, d2).expect("rotation preserves non-parallel directions")
}

/// Closed counterclockwise unit-edge polygon. `edges` are DirectionIndex
/// values; the walk starts at `base` (lattice coordinates).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolygonBoundary {
    pub n: usize,
    pub edges: Vec<u16>,
    #[serde(default, skip_serializing_if = "base_is_zero")]
    pub base: Vec<Coord>,
}

fn base_is_zero(v: &Vec<Coord>) -> bool {
    v.iter().all(|&c| c == 0)
}

impl PolygonBoundary {
    pub fn new(n: usize, edges: Vec<u16>) -> Self {
        PolygonBoundary { n, edges, base: vec![0; n] }
    }

    pub fn base_vector(&self) -> LatticeVector {
        if self.base.is_empty() {
            lattice_zero(self.n)
        } else {
            self.base.iter().copied().collect()
        }
    }

    /// Walk vertices v_0 = base, v_{i+1} = v_i + step(edges[i]).
    pub fn vertices(&self, sym: &Symmetry) -> Vec<LatticeVector> {
        let mut out = Vec::with_capacity(self.edges.len());
        let mut cur = self.base_vector();
        for &e in &self.edges {
            out.push(cur.clone());
            cur = lattice_add(&cur, &sym.step_vector(e as usize));
        }
        out
    }

    /// Lattice sum of all steps; zero iff closed.
    pub fn closure_defect(&self, sym: &Symmetry) -> LatticeVector {
        let mut sum = lattice_zero(self.n);
        for &e in &self.edges {
            sum = lattice_add(&sum, &sym.step_vector(e as usize));
        }
        sum
    }

    pub fn is_closed(&self, sym: &Symmetry) -> bool {
        self.closure_defect(sym).iter().all(|&c| c == 0)
    }

    /// Signed embedded area (shoelace); positive for counterclockwise.
    pub fn signed_area(&self, sym: &Symmetry) -> f64 {
        let mut area = 0.0;
        let (mut x, mut y) = sym.embed(&self.base_vector());
        for &e in &self.edges {
            let (dx, dy) = sym.unit(e as usize);
            let (nx, ny) = (x + dx, y + dy);
            area += x * ny - nx * y;
            x = nx;
            y = ny;
        }
        0.5 * area
    }
}

/// Validity report for a patch; empty violation list iff all invariants hold.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ValidityReport {
    pub violations: Vec<String>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

const SNAP: f64 = 1e7;

fn snap_point(p: (f64, f64)) -> (i64, i64) {
    ((p.0 * SNAP).round() as i64, (p.1 * SNAP).round() as i64)
}

/// Check edge-to-edge-ness, overlaps, connectivity and simple-connectivity.
pub fn validate_patch(sym: &Symmetry, patch: &Patch) -> ValidityReport {
    let mut rep = ValidityReport::default();
    if patch.n != sym.n() {
        rep.violations.push(format!("patch n={} does not match symmetry n={}", patch.n, sym.n()));
        return rep;
    }
    for t in &patch.tiles {
        if t.anchor.len() != sym.n() {
            rep.violations.push(format!("anchor length {} ≠ n={}", t.anchor.len(), sym.n()));
            return rep;
        }
        if t.j >= t.k || (t.k as usize) >= sym.n() {
            rep.violations.push(format!("bad tile type ({}, {})", t.j, t.k));
            return rep;
        }
    }
    if patch.tiles.is_empty() {
        rep.violations.push("empty patch".into());
        return rep;
    }
    // Duplicates.
    let mut seen = HashSet::with_capacity(patch.tiles.len());
    for t in &patch.tiles {
        if !seen.insert((t.anchor.clone(), t.j, t.k)) {
            rep.violations.push(format!("duplicate tile ({:?}, {}, {})", t.anchor, t.j, t.k));
        }
    }
    // Embedded coincidence of distinct lattice vertices is an overlap error.
    let mut embed_map: HashMap<(i64, i64), LatticeVector> = HashMap::new();
    for v in patch.vertex_set() {
        let key = snap_point(sym.embed(&v));
        if let Some(prev) = embed_map.get(&key) {
            if *prev != v {
                rep.violations
                    .push(format!("distinct lattice vertices {:?} and {:?} embed coincidently", prev, v));
            }
        } else {
            embed_map.insert(key, v);
        }
    }
    // Pairwise geometry via a spatial hash on embedded centroids (all tiles
    // have diameter ≤ 2).
    let polys: Vec<[(f64, f64); 4]> = patch
        .tiles
        .iter()
        .map(|t| {
            let vs = t.vertices();
            [
                sym.embed(&vs[0]),
                sym.embed(&vs[1]),
                sym.embed(&vs[2]),
                sym.embed(&vs[3]),
            ]
        })
        .collect();
    let cell = |p: (f64, f64)| ((p.0 / 2.0).floor() as i64, (p.1 / 2.0).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, poly) in polys.iter().enumerate() {
        let cx = (poly[0].0 + poly[2].0) / 2.0;
        let cy = (poly[0].1 + poly[2].1) / 2.0;
        grid.entry(cell((cx, cy))).or_default().push(i);
    }
    let mut overlap_count = 0usize;
    let mut e2e_count = 0usize;
    for (&(gx, gy), ids) in &grid {
        for dx in -1..=1i64 {
            for dy in -1..=1i64 {
                let Some(other) = grid.get(&(gx + dx, gy + dy)) else { continue };
                for &i in ids {
                    for &j in other {
                        if j <= i {
                            continue;
                        }
                        if convex_quads_overlap(&polys[i], &polys[j]) {
                            overlap_count += 1;
                            if overlap_count <= 5 {
                                rep.violations.push(format!("tiles {i} and {j} overlap"));
                            }
                        } else if !edge_to_edge_ok(&polys[i], &polys[j]) {
                            e2e_count += 1;
                            if e2e_count <= 5 {
                                rep.violations.push(format!("tiles {i} and {j} meet but not edge-to-edge"));
                            }
                        }
                    }
                }
            }
        }
    }
    if overlap_count > 5 {
        rep.violations.push(format!("... {overlap_count} overlapping pairs total"));
    }
    if e2e_count > 5 {
        rep.violations.push(format!("... {e2e_count} non-edge-to-edge pairs total"));
    }
    // Connectivity through shared vertices (regions may pinch at a point;
    // large substitution images also touch themselves at isolated boundary
    // vertices, so no simple-connectivity requirement is imposed).
    let mut vertex_owner: HashMap<LatticeVector, usize> = HashMap::new();
    let mut dsu = Dsu::new(patch.tiles.len());
    for (i, t) in patch.tiles.iter().enumerate() {
        for v in t.vertices() {
            if let Some(&other) = vertex_owner.get(&v) {
                dsu.union(i, other);
            } else {
                vertex_owner.insert(v, i);
            }
        }
    }
    let root = dsu.find(0);
    if (1..patch.tiles.len()).any(|i| dsu.find(i) != root) {
        rep.violations.push("patch is not connected".into());
    }
    rep
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

const GEOM_EPS: f64 = 1e-7;

/// Strict interior overlap of two convex quadrilaterals (separating axis).
fn convex_quads_overlap(a: &[(f64, f64); 4], b: &[(f64, f64); 4]) -> bool {
    for quad in [a, b] {
        for i in 0..4 {
            let p = quad[i];
            let q = quad[(i + 1) % 4];
            let axis = (q.1 - p.1, p.0 - q.0); // outward-agnostic normal
            let proj = |poly: &[(f64, f64); 4]| {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for v in poly {
                    let d = v.0 * axis.0 + v.1 * axis.1;
                    lo = lo.min(d);
                    hi = hi.max(d);
                }
                (lo, hi)
            };
            let (alo, ahi) = proj(a);
            let (blo, bhi) = proj(b);
            if ahi <= blo + GEOM_EPS || bhi <= alo + GEOM_EPS {
                return false;
            }
        }
    }
    true
}

/// Non-overlapping tiles meet edge-to-edge iff no vertex of one lies in the
/// relative interior of an edge of the other.
fn edge_to_edge_ok(a: &[(f64, f64); 4], b: &[(f64, f64); 4]) -> bool {
    for (verts, edges) in [(a, b), (b, a)] {
        for v in verts {
            for i in 0..4 {
                let p = edges[i];
                let q = edges[(i + 1) % 4];
                let (ux, uy) = (q.0 - p.0, q.1 - p.1);
                let len2 = ux * ux + uy * uy;
                let t = ((v.0 - p.0) * ux + (v.1 - p.1) * uy) / len2;
                let cross = (v.0 - p.0) * uy - (v.1 - p.1) * ux;
                if cross.abs() < GEOM_EPS && t > GEOM_EPS && t < 1.0 - GEOM_EPS {
                    // On the segment, strictly between endpoints; fine only if
                    // it coincides with an endpoint geometrically (excluded by t).
                    return false;
                }
            }
        }
    }
    true
}

/// Boundary of a valid simply connected patch as a counterclockwise polygon.
pub fn boundary_polygon(sym: &Symmetry, patch: &Patch) -> Result<PolygonBoundary> {
    if patch.tiles.is_empty() {
        return Err(RosaError::validation("empty patch has no boundary"));
    }
    // Interior edges appear once in each direction and cancel.
    let mut directed: HashMap<(LatticeVector, usize), ()> = HashMap::new();
    for t in &patch.tiles {
        for (start, dir) in t.ccw_edges(sym) {
            let end = lattice_add(&start, &sym.step_vector(dir));
            let rev = (end.clone(), (dir + sym.n()) % sym.dirs());
            if directed.remove(&rev).is_none() {
                directed.insert((start, dir), ());
            }
        }
    }
    // Index remaining edges by start vertex and walk. Pinch vertices (several
    // outgoing boundary edges) are traversed Euler-style: take the outgoing
    // edge spanning the largest interior sector from the reversed incoming
    // direction, which detours through the other lobe and returns.
    let mut by_start: HashMap<LatticeVector, Vec<usize>> = HashMap::new();
    let edges: Vec<(LatticeVector, usize)> = directed.into_keys().collect();
    for (i, (s, _)) in edges.iter().enumerate() {
        by_start.entry(s.clone()).or_default().push(i);
    }
    let start = edges
        .iter()
        .map(|(s, _)| s.clone())
        .min_by(|a, b| a.as_slice().cmp(b.as_slice()))
        .unwrap();
    let dirs2n = sym.dirs();
    let mut used = vec![false; edges.len()];
    let mut walk = Vec::with_capacity(edges.len());
    let mut cur = start.clone();
    let mut incoming: Option<usize> = None;
    loop {
        let Some(ids) = by_start.get(&cur) else {
            return Err(RosaError::validation("open boundary walk (patch not closed)"));
        };
        let next = ids
            .iter()
            .copied()
            .filter(|&i| !used[i])
            .min_by_key(|&i| match incoming {
                // Largest sector from outgoing to reversed incoming, i.e.
                // smallest key on the negated gap; ties cannot occur since
                // outgoing directions at a vertex are distinct.
                Some(inc) => {
                    let rev = (inc + sym.n()) % dirs2n;
                    dirs2n - 1 - (rev + dirs2n - edges[i].1) % dirs2n
                }
                None => edges[i].1,
            });
        let Some(id) = next else {
            if cur == start {
                break;
            }
            return Err(RosaError::validation("open boundary walk (patch not closed)"));
        };
        used[id] = true;
        let (s, d) = &edges[id];
        walk.push(*d as u16);
        incoming = Some(*d);
        cur = lattice_add(s, &sym.step_vector(*d));
        if cur == start && used.iter().all(|&u| u) {
            break;
        }
        if walk.len() > edges.len() {
            return Err(RosaError::Internal("boundary walk does not close".into()));
        }
    }
    if walk.len() != edges.len() {
        return Err(RosaError::validation("patch boundary has multiple cycles (not simply connected)"));
    }
    let mut poly = PolygonBoundary::new(sym.n(), walk);
    poly.base = start.to_vec();
    Ok(poly)
}

/// The star S_n: corolla of 2n rhombi of angle π/n around the origin vertex.
pub fn star_patch(sym: &Symmetry) -> Patch {
    let zero = lattice_zero(sym.n());
    let tiles = (0..sym.dirs())
        .map(|m| {
            PlacedTile::from_corner(sym, &zero, m, (m + 1) % sym.dirs())
                .expect("adjacent directions are never parallel")
        })
        .collect();
    Patch { n: sym.n(), tiles }
}
