use rosa_core::edgeword::{subrosa_edgeword, Edgeword};
use rosa_core::kenyon::{metatile_polygon, tile_polygon};
use rosa_core::lattice::{boundary_polygon, rotate_patch, star_patch, validate_patch};
use rosa_core::substitution::{apply_substitution, build_substitution};
use rosa_core::{Symmetry, TileType};

#[test]
fn subrosa5_metatile_polygon_closes() {
    let sym = Symmetry::new(5).unwrap();
    let u = subrosa_edgeword(&sym);
    assert_eq!(u.to_compact_string(), "131131");
    for d in 1..=2 {
        let t = TileType::new(0, d, &sym).unwrap();
        let poly = metatile_polygon(&sym, &u, &t).unwrap();
        assert!(poly.is_closed(&sym));
        assert!(poly.signed_area(&sym) > 0.0);
        let verdict = tile_polygon(&sym, &poly, 1_000_000).unwrap();
        assert!(verdict.tileable, "d={d} interior should tile");
        let witness = verdict.witness.unwrap();
        let rep = validate_patch(&sym, &witness);
        assert!(rep.is_valid(), "witness invalid: {:?}", rep.violations);
        let tile_area: f64 = witness
            .tiles
            .iter()
            .map(|t| {
                let d = t.j.abs_diff(t.k) as usize;
                (2.0 * std::f64::consts::PI * d as f64 / 5.0).sin().abs()
            })
            .sum();
        assert!((tile_area - poly.signed_area(&sym)).abs() < 1e-6);
        let back = boundary_polygon(&sym, &witness).unwrap();
        assert_eq!(back.edges.len(), poly.edges.len());
        let canon = |e: &[u16]| {
            (0..e.len())
                .map(|r| e.iter().cycle().skip(r).take(e.len()).copied().collect::<Vec<_>>())
                .min()
                .unwrap()
        };
        assert_eq!(canon(&back.edges), canon(&poly.edges));
    }
}

#[test]
fn subrosa5_rule_applies_to_star() {
    let sym = Symmetry::new(5).unwrap();
    let u = subrosa_edgeword(&sym);
    let rule = build_substitution(&sym, &u, 1_000_000).unwrap();
    let star = star_patch(&sym);
    let image = apply_substitution(&sym, &rule, &star, 2_000_000).unwrap();
    assert!(image.tiles.len() > 500, "got {}", image.tiles.len());
    let rep = validate_patch(&sym, &image);
    assert!(rep.is_valid(), "sigma(star) invalid: {:?}", &rep.violations[..rep.violations.len().min(5)]);
    // Exact rotation equivariance.
    let lhs = apply_substitution(&sym, &rule, &rotate_patch(&sym, &star, 1), 2_000_000).unwrap();
    let rhs = rotate_patch(&sym, &image, 1);
    let mut rhs = rhs;
    rhs.canonicalize();
    assert_eq!(lhs, rhs);
}

#[test]
fn hexagon_tiles() {
    let sym = Symmetry::new(3).unwrap();
    let poly = rosa_core::PolygonBoundary::new(3, vec![0, 1, 2, 3, 4, 5]);
    assert!(poly.is_closed(&sym));
    let verdict = tile_polygon(&sym, &poly, 10_000).unwrap();
    assert!(verdict.tileable);
    assert_eq!(verdict.witness.unwrap().tiles.len(), 3);
}

#[test]
fn planar5_equals_subrosa5() {
    let sym = Symmetry::new(5).unwrap();
    let c = rosa_core::billiard::find_planar_candidate(&sym, 10).unwrap();
    assert_eq!(c.j, 3);
    assert_eq!(c.edgeword.to_compact_string(), "131131");
    let _ = Edgeword::parse(&sym, "131131").unwrap();
}
