//! Command-line front-end. Exit codes: 0 success, 2 validation/parse error,
//! 3 budget exhausted, 4 not found, 1 internal.

use clap::{Args, Parser, Subcommand};
use rosa_core::billiard::find_planar_candidate;
use rosa_core::edgeword::{abelianize, subrosa_edgeword, Edgeword};
use rosa_core::error::{Result, RosaError};
use rosa_core::kenyon::{metatile_polygon, tile_polygon};
use rosa_core::lattice::validate_patch;
use rosa_core::multigrid::{dual_tiling, regularity_check, MultigridSpec, Rational};
use rosa_core::planarity::planarity_report;
use rosa_core::render::{render_svg, RenderSpec};
use rosa_core::spectral::eigenvalues;
use rosa_core::substitution::{apply_substitution, build_substitution, iterate_from_star};
use rosa_core::{Patch, PolygonBoundary, Symmetry, TileType};
use std::fs;
use std::path::PathBuf;

const DEFAULT_BUDGET: u64 = 2_000_000;

#[derive(Parser)]
#[command(name = "rosa", about = "2n-fold rhombus substitution tiling toolkit", version)]
struct Cli {
    /// Tile/node budget; overrides the ROSA_BUDGET environment variable.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Reserved: logged for reproducibility of tie-break diagnostics.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print eigenvalue moduli of an edgeword expansion (2 decimals).
    Eigenvalues(EigenArgs),
    /// Print the Sub Rosa edgeword Σ(n).
    Subrosa(RangeArgs),
    /// Find the Planar Rosa candidate edgeword; optionally run the pipeline.
    Candidate(CandidateArgs),
    /// Build a substitution rule and write it as JSON.
    Build(BuildArgs),
    /// Apply a substitution to a patch JSON file.
    Apply(ApplyArgs),
    /// Iterate the substitution on the star S_n.
    Iterate(IterateArgs),
    /// Planarity report for a rule.
    Planarity(PlanarityArgs),
    /// Kenyon tileability of metatile interiors or an explicit polygon.
    Tileability(TileabilityArgs),
    /// De Bruijn multigrid: regularity and dual tiling.
    Multigrid(MultigridArgs),
    /// Render a patch JSON file to SVG.
    Render(RenderArgs),
}

#[derive(Args)]
struct EigenArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    edgeword: Option<String>,
    /// Use Σ(n) as the edgeword.
    #[arg(long)]
    subrosa: bool,
    /// Inclusive odd range like 3..11 (implies --subrosa).
    #[arg(long)]
    range: Option<String>,
}

#[derive(Args)]
struct RangeArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    range: Option<String>,
}

#[derive(Args)]
struct CandidateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 64)]
    max_j: usize,
    /// Run build → iterate → planarity when set.
    #[arg(long)]
    iters: Option<usize>,
    /// Directory for patch.json / report.json.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    edgeword: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ApplyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    edgeword: String,
    /// Input patch JSON.
    #[arg(long)]
    patch: PathBuf,
    #[arg(long, default_value_t = 1)]
    iters: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IterateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    edgeword: String,
    #[arg(long, default_value_t = 1)]
    iters: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct PlanarityArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    edgeword: String,
    #[arg(long, default_value_t = 2)]
    iters: usize,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct TileabilityArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    edgeword: Option<String>,
    /// Polygon JSON {"n": int, "edges": [dir, ...]}.
    #[arg(long)]
    polygon: Option<PathBuf>,
}

#[derive(Args)]
struct MultigridArgs {
    #[arg(long)]
    n: usize,
    /// Offset as p/q (applied to all n grids).
    #[arg(long, default_value = "1/2")]
    offset: String,
    #[arg(long, default_value_t = 6.0)]
    radius: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Only report regularity.
    #[arg(long)]
    check_only: bool,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    patch: PathBuf,
    #[arg(long)]
    svg: PathBuf,
    #[arg(long, default_value_t = 24.0)]
    scale: f64,
}

fn main() {
    let cli = Cli::parse();
    let budget = cli
        .budget
        .or_else(|| std::env::var("ROSA_BUDGET").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(DEFAULT_BUDGET);
    if let Some(seed) = cli.seed {
        eprintln!("note: --seed {seed} recorded (tie-breaks are deterministic)");
    }
    match run(cli.cmd, budget) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn parse_range(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| RosaError::validation(format!("bad range {s:?}; expected A..B")))?;
    let lo: usize = a.trim().parse().map_err(|_| RosaError::validation(format!("bad range start {a:?}")))?;
    let hi: usize = b.trim().parse().map_err(|_| RosaError::validation(format!("bad range end {b:?}")))?;
    Ok((lo, hi))
}

fn parse_offset(s: &str) -> Result<Rational> {
    if let Some((p, q)) = s.split_once('/') {
        let num = p.trim().parse().map_err(|_| RosaError::validation(format!("bad offset {s:?}")))?;
        let den = q.trim().parse().map_err(|_| RosaError::validation(format!("bad offset {s:?}")))?;
        Rational::new(num, den)
    } else {
        let num = s.trim().parse().map_err(|_| RosaError::validation(format!("bad offset {s:?}")))?;
        Rational::new(num, 1)
    }
}

fn write_out(path: &PathBuf, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, contents)?;
    Ok(())
}

fn moduli_line(sym: &Symmetry, u: &Edgeword) -> Result<String> {
    let report = eigenvalues(sym, &abelianize(sym, u))?;
    Ok(report
        .moduli
        .iter()
        .map(|m| format!("{m:.2}"))
        .collect::<Vec<_>>()
        .join(" "))
}

fn run(cmd: Cmd, budget: u64) -> Result<()> {
    match cmd {
        Cmd::Eigenvalues(a) => {
            if let Some(range) = a.range {
                let (lo, hi) = parse_range(&range)?;
                for n in (lo..=hi).filter(|n| n % 2 == 1) {
                    let sym = Symmetry::new(n)?;
                    let u = subrosa_edgeword(&sym);
                    println!("n={n} {}", moduli_line(&sym, &u)?);
                }
                return Ok(());
            }
            let n = a.n.ok_or_else(|| RosaError::validation("--n required without --range"))?;
            let sym = Symmetry::new(n)?;
            let u = if a.subrosa {
                subrosa_edgeword(&sym)
            } else {
                let w = a
                    .edgeword
                    .ok_or_else(|| RosaError::validation("need --edgeword or --subrosa"))?;
                Edgeword::parse(&sym, &w)?
            };
            println!("{}", moduli_line(&sym, &u)?);
            Ok(())
        }
        Cmd::Subrosa(a) => {
            if let Some(range) = a.range {
                let (lo, hi) = parse_range(&range)?;
                for n in (lo..=hi).filter(|n| n % 2 == 1) {
                    let sym = Symmetry::new(n)?;
                    println!("n={n} {}", subrosa_edgeword(&sym));
                }
                return Ok(());
            }
            let n = a.n.ok_or_else(|| RosaError::validation("--n required without --range"))?;
            let sym = Symmetry::new(n)?;
            println!("{}", subrosa_edgeword(&sym));
            Ok(())
        }
        Cmd::Candidate(a) => {
            let sym = Symmetry::new(a.n)?;
            let cand = find_planar_candidate(&sym, a.max_j)?;
            println!("j={} edgeword={}", cand.j, cand.edgeword);
            println!("moduli {}", moduli_line(&sym, &cand.edgeword)?);
            if let Some(iters) = a.iters {
                let rule = build_substitution(&sym, &cand.edgeword, budget)?;
                let result = iterate_from_star(&sym, &rule, iters, budget)?;
                let report = planarity_report(&sym, &rule, iters.max(1), budget)?;
                println!("tiles={} verdict={}", result.patch.tiles.len(), report.verdict);
                if let Some(dir) = a.out {
                    fs::create_dir_all(&dir)?;
                    write_out(&dir.join("patch.json"), &serde_json::to_string(&result.patch)?)?;
                    write_out(&dir.join("report.json"), &serde_json::to_string_pretty(&report)?)?;
                }
                if let Some(svg) = a.svg {
                    write_out(&svg, &render_svg(&sym, &result.patch, &RenderSpec::default())?)?;
                }
            }
            Ok(())
        }
        Cmd::Build(a) => {
            let sym = Symmetry::new(a.n)?;
            let u = Edgeword::parse(&sym, &a.edgeword)?;
            let rule = build_substitution(&sym, &u, budget)?;
            println!(
                "built rule: n={} edgeword={} metatiles={}",
                a.n,
                u,
                rule.metatiles.iter().map(|m| m.patch.tiles.len().to_string()).collect::<Vec<_>>().join(",")
            );
            if let Some(out) = a.out {
                write_out(&out, &serde_json::to_string(&rule)?)?;
            }
            Ok(())
        }
        Cmd::Apply(a) => {
            let sym = Symmetry::new(a.n)?;
            let u = Edgeword::parse(&sym, &a.edgeword)?;
            let rule = build_substitution(&sym, &u, budget)?;
            let mut patch: Patch = serde_json::from_str(&fs::read_to_string(&a.patch)?)?;
            for _ in 0..a.iters {
                patch = apply_substitution(&sym, &rule, &patch, budget)?;
            }
            println!("tiles={}", patch.tiles.len());
            if let Some(out) = a.out {
                write_out(&out, &serde_json::to_string(&patch)?)?;
            }
            Ok(())
        }
        Cmd::Iterate(a) => {
            let sym = Symmetry::new(a.n)?;
            let u = Edgeword::parse(&sym, &a.edgeword)?;
            let rule = build_substitution(&sym, &u, budget)?;
            let result = iterate_from_star(&sym, &rule, a.iters, budget)?;
            for s in &result.stats {
                println!(
                    "k={} tiles={} by_class={}",
                    s.k,
                    s.tiles,
                    s.counts_by_class.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
                );
            }
            if let Some(out) = a.out {
                write_out(&out, &serde_json::to_string(&result.patch)?)?;
            }
            if let Some(svg) = a.svg {
                write_out(&svg, &render_svg(&sym, &result.patch, &RenderSpec::default())?)?;
            }
            Ok(())
        }
        Cmd::Planarity(a) => {
            let sym = Symmetry::new(a.n)?;
            let u = Edgeword::parse(&sym, &a.edgeword)?;
            let rule = build_substitution(&sym, &u, budget)?;
            let report = planarity_report(&sym, &rule, a.iters, budget)?;
            println!("verdict={}", report.verdict);
            if let Some(b) = report.closed_form_bound {
                println!("window_bound={b:.6}");
            }
            if let Some(path) = a.report {
                write_out(&path, &serde_json::to_string_pretty(&report)?)?;
            }
            Ok(())
        }
        Cmd::Tileability(a) => {
            let sym = Symmetry::new(a.n)?;
            if let Some(path) = a.polygon {
                let poly: PolygonBoundary = serde_json::from_str(&fs::read_to_string(&path)?)?;
                let v = tile_polygon(&sym, &poly, budget)?;
                println!(
                    "tileable={} tiles={} violations={}",
                    v.tileable,
                    v.witness.as_ref().map_or(0, |w| w.tiles.len()),
                    v.violations.len()
                );
                return Ok(());
            }
            let w = a
                .edgeword
                .ok_or_else(|| RosaError::validation("need --edgeword or --polygon"))?;
            let u = Edgeword::parse(&sym, &w)?;
            for d in 1..=sym.half() {
                let t = TileType::new(0, d, &sym)?;
                let poly = metatile_polygon(&sym, &u, &t)?;
                let v = tile_polygon(&sym, &poly, budget)?;
                println!(
                    "d={d} edges={} tileable={} tiles={}",
                    poly.edges.len(),
                    v.tileable,
                    v.witness.as_ref().map_or(0, |w| w.tiles.len())
                );
            }
            Ok(())
        }
        Cmd::Multigrid(a) => {
            let sym = Symmetry::new(a.n)?;
            let offset = parse_offset(&a.offset)?;
            let spec = MultigridSpec::uniform(&sym, offset, a.radius)?;
            let triples = regularity_check(&spec);
            if !triples.is_empty() {
                println!("singular: {} triple point(s)", triples.len());
                if a.check_only {
                    return Ok(());
                }
                return Err(RosaError::validation("multigrid is singular; cannot dualize"));
            }
            println!("regular");
            if a.check_only {
                return Ok(());
            }
            let patch = dual_tiling(&sym, &spec)?;
            let report = validate_patch(&sym, &patch);
            println!("tiles={} valid={}", patch.tiles.len(), report.is_valid());
            if let Some(out) = a.out {
                write_out(&out, &serde_json::to_string(&patch)?)?;
            }
            if let Some(svg) = a.svg {
                write_out(&svg, &render_svg(&sym, &patch, &RenderSpec::default())?)?;
            }
            Ok(())
        }
        Cmd::Render(a) => {
            let patch: Patch = serde_json::from_str(&fs::read_to_string(&a.patch)?)?;
            let sym = Symmetry::new(patch.n)?;
            let spec = RenderSpec { scale: a.scale, ..RenderSpec::default() };
            write_out(&a.svg, &render_svg(&sym, &patch, &spec)?)?;
            println!("wrote {} ({} tiles)", a.svg.display(), patch.tiles.len());
            Ok(())
        }
    }
}
