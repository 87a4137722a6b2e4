mod error;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use error::CliError;
use unlk::deformations::{bifurcation, continue_c, default_grid, slope_check, BifurcationDiagram, Family, TrackOptions, DEFAULT_TRACK_TOL};
use unlk::ingest::{contour_tree, ingest, parse_grid, IngestOptions, DEFAULT_MAX_DEN};
use unlk::model::{parse_model, to_json, Model, ModelDocument, PlaneTreeDoc};
use unlk::morse_tree::{nu_forest, nu_oracle_capped, nu_recursive, spectrum, validate_tree, PlaneTree};
use unlk::rational::{fmt_q, parse_q, QStr, Q};
use unlk::reeb_surface::{core_graph, disk_tree, heavy, nu_surface, superheavy, validate_surface, zeta, zeta_scan, Cell, SurfaceReebGraph};
use unlk::report::{
    bifurcation_svg, parse_bifurcation_csv, spectrum_rows, to_json_pretty, write_bifurcation_csv, write_spectrum_csv, CounterexampleJson,
    DecompositionReport,
};
use unlk::sphere::{c_simple_bump, capped_orbits, counterexample};

/// Action spectra and unlinked-set invariants of model Hamiltonians.
///
/// Models are JSON documents tagged by `kind`. Rationals are written as
/// "p/q" strings. Exit codes: 1 malformed input, 2 validation failure,
/// 3 computation error, 4 oracle mismatch. UNLK_THREADS caps the worker pool.
#[derive(Parser, Debug)]
#[command(name = "unlk", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check a model and print its diagnostics.
    Validate { file: PathBuf },
    /// Spectrum CSV of a plane tree, or of every disk of a surface graph.
    Spectrum {
        file: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// The invariant of a plane tree or surface graph.
    Nu {
        file: PathBuf,
        /// Use the exhaustive subset oracle instead of the recursion.
        #[arg(long, conflicts_with = "both")]
        oracle: bool,
        /// Compute both and fail with exit code 4 if they differ.
        #[arg(long)]
        both: bool,
        /// Largest number of negative fixed points the oracle accepts.
        #[arg(long, default_value_t = 20)]
        cap: usize,
    },
    /// Quasi-state value of a surface graph.
    Zeta {
        file: PathBuf,
        /// Also locate the value by scanning thresholds and print both.
        #[arg(long)]
        scan: bool,
        /// Number of evenly spaced scan thresholds.
        #[arg(long, default_value_t = 16)]
        samples: usize,
        /// Print the core/disk decomposition as JSON instead.
        #[arg(long, conflicts_with = "scan")]
        decomposition: bool,
    },
    /// Heaviness of a set of Reeb graph cells.
    Heavy {
        file: PathBuf,
        /// Cells as `v:ID` or `e:ID`; bare IDs name a vertex if one exists, else an edge.
        #[arg(long, required = true, num_args = 1.., value_delimiter = ',')]
        cells: Vec<String>,
    },
    /// Track the spectrum of a family and write the bifurcation CSV.
    Bifurcate {
        file: PathBuf,
        #[command(flatten)]
        track: Track,
        #[command(flatten)]
        out: Out,
        /// Also write the diagram as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Check sampled slopes against this rate.
        #[arg(long)]
        rate: Option<f64>,
    },
    /// Continue a spectral value along a family.
    ContinueC {
        file: PathBuf,
        /// Starting value at the first sample.
        #[arg(long, allow_hyphen_values = true)]
        c0: String,
        #[command(flatten)]
        track: Track,
        #[command(flatten)]
        out: Out,
    },
    /// Spectral value of a simple bump on the sphere.
    #[command(args_conflicts_with_subcommands = true)]
    Sphere {
        #[command(subcommand)]
        cmd: Option<SphereCmd>,
        file: Option<PathBuf>,
        /// Also list capped orbits with caps in `-M..=M`, as CSV.
        #[arg(long, value_name = "M")]
        orbits: Option<i64>,
    },
    /// Contour tree and profiles from a scalar grid (CSV, binary or JSON).
    IngestGrid {
        file: PathBuf,
        /// Levels sampled per edge.
        #[arg(long, default_value_t = 256)]
        levels: usize,
        /// Drop features whose level span is below this.
        #[arg(long)]
        prune: Option<f64>,
        /// Denominator used when rounding to rationals.
        #[arg(long, default_value_t = DEFAULT_MAX_DEN)]
        max_den: u64,
        #[command(flatten)]
        out: Out,
    },
    /// Render a bifurcation CSV as SVG polylines.
    Svg {
        #[arg(long)]
        diagram: PathBuf,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Subcommand, Debug)]
enum SphereCmd {
    /// The two-bump construction and its report.
    Counterexample {
        #[arg(long, default_value = "1/10")]
        zbeta: String,
        #[arg(long, default_value = "1/100")]
        delta: String,
    },
}

#[derive(Args, Debug)]
struct Out {
    /// Write here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Track {
    /// Number of intervals of the uniform sigma grid.
    #[arg(long, default_value_t = 64)]
    steps: usize,
    /// Values closer than this are treated as equal.
    #[arg(long, default_value_t = DEFAULT_TRACK_TOL)]
    tol: f64,
}

fn emit(out: &Out, text: &str) -> Result<(), CliError> {
    match &out.out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Compute(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Model, CliError> {
    Ok(parse_model(&read(path)?)?)
}

fn rational(s: &str) -> Result<Q, CliError> {
    parse_q(s).map_err(|e| CliError::Malformed(format!("{s:?}: {e}")))
}

fn expect_surface(m: Model) -> Result<SurfaceReebGraph, CliError> {
    match m {
        Model::Surface(g) => Ok(g),
        other => Err(CliError::Malformed(format!("expected a surface model, got {}", other.kind()))),
    }
}

fn expect_family(m: Model) -> Result<Family, CliError> {
    match m {
        Model::Family(f) => Ok(f),
        other => Err(CliError::Malformed(format!("expected a family model, got {}", other.kind()))),
    }
}

fn tree_diagnostics(t: &PlaneTree, label: &str, out: &mut Vec<String>) {
    out.extend(validate_tree(t).into_iter().map(|d| format!("{label}: {d:?}")));
}

fn validate(file: &Path) -> Result<(), CliError> {
    let m = load(file)?;
    let mut diags = Vec::new();
    match &m {
        Model::PlaneTree(t) => tree_diagnostics(t, "plane_tree", &mut diags),
        Model::Surface(g) => diags.extend(validate_surface(g).into_iter().map(|d| format!("surface: {d:?}"))),
        Model::Sphere(_) => {}
        Model::Family(Family::Linear { from, to }) => {
            tree_diagnostics(from, "from", &mut diags);
            tree_diagnostics(to, "to", &mut diags);
        }
        Model::Family(Family::Special { inside, .. }) => {
            for (i, t) in inside.iter().enumerate() {
                tree_diagnostics(t, &format!("inside[{i}]"), &mut diags);
            }
        }
        Model::Family(Family::Shift { base, .. }) => tree_diagnostics(base, "model", &mut diags),
        Model::Grid(g) => {
            contour_tree(g)?;
        }
    }
    if diags.is_empty() {
        println!("ok {}", m.kind());
        Ok(())
    } else {
        Err(CliError::Validation(format!("{} failed validation\n{}", m.kind(), diags.join("\n"))))
    }
}

fn spectrum_cmd(file: &Path, out: &Out) -> Result<(), CliError> {
    let rows = match load(file)? {
        Model::PlaneTree(t) => spectrum_rows(&t, &spectrum(&t)?, ""),
        Model::Surface(g) => {
            let mut rows = Vec::new();
            for d in core_graph(&g)?.disks {
                let t = disk_tree(&g, &d)?;
                let prefix = format!("{}/", g.edges[d.root_edge].id);
                rows.extend(spectrum_rows(&t, &spectrum(&t)?, &prefix));
            }
            rows
        }
        other => return Err(CliError::Malformed(format!("expected a plane_tree or surface model, got {}", other.kind()))),
    };
    emit(out, &write_spectrum_csv(&rows)?)
}

fn nu_cmd(file: &Path, oracle: bool, both: bool, cap: usize) -> Result<(), CliError> {
    match load(file)? {
        Model::PlaneTree(t) => {
            if both {
                let r = nu_recursive(&t)?;
                let o = nu_oracle_capped(&t, cap)?;
                let line = format!("recursive={} oracle={}", fmt_q(&r), fmt_q(&o));
                if r != o {
                    return Err(CliError::Mismatch(line));
                }
                println!("{line}");
            } else if oracle {
                println!("{}", fmt_q(&nu_oracle_capped(&t, cap)?));
            } else {
                println!("{}", fmt_q(&nu_recursive(&t)?));
            }
        }
        Model::Surface(g) => {
            if oracle || both {
                let r = nu_surface(&g)?;
                let mut o: Option<Q> = None;
                for d in core_graph(&g)?.disks {
                    let v = &d.boundary_level + nu_oracle_capped(&disk_tree(&g, &d)?, cap)?;
                    o = Some(o.map_or(v.clone(), |b: Q| b.max(v)));
                }
                let o = o.expect("nu_surface found disks");
                if both {
                    let line = format!("recursive={} oracle={}", fmt_q(&r), fmt_q(&o));
                    if r != o {
                        return Err(CliError::Mismatch(line));
                    }
                    println!("{line}");
                } else {
                    println!("{}", fmt_q(&o));
                }
            } else {
                println!("{}", fmt_q(&nu_surface(&g)?));
            }
        }
        other => return Err(CliError::Malformed(format!("expected a plane_tree or surface model, got {}", other.kind()))),
    }
    Ok(())
}

fn zeta_cmd(file: &Path, scan: bool, samples: usize, decomposition: bool) -> Result<(), CliError> {
    let g = expect_surface(load(file)?)?;
    if decomposition {
        let d = core_graph(&g)?;
        print!("{}", to_json_pretty(&DecompositionReport::new(&g, &d)));
        return Ok(());
    }
    let z = zeta(&g)?;
    if !scan {
        println!("{}", fmt_q(&z));
        return Ok(());
    }
    let levels: Vec<&Q> = g.vertices.iter().map(|v| &v.level).collect();
    let lo = levels.iter().min().map(|l| (*l).clone() - Q::from_integer(1.into())).unwrap_or_default();
    let hi = levels.iter().max().map(|l| (*l).clone()).unwrap_or_default();
    let n = samples.max(2);
    let ts: Vec<Q> = (0..n).map(|i| &lo + (&hi - &lo) * Q::new((i as i64).into(), ((n - 1) as i64).into())).collect();
    let s = zeta_scan(&g, &ts)?;
    let coarse = if s.coarse { " coarse" } else { "" };
    let line = format!("zeta={} scan={}{coarse}", fmt_q(&z), fmt_q(&s.value));
    if s.value != z {
        return Err(CliError::Mismatch(line));
    }
    println!("{line}");
    Ok(())
}

fn parse_cell(g: &SurfaceReebGraph, s: &str) -> Result<Cell, CliError> {
    if let Some(id) = s.strip_prefix("v:") {
        return Ok(Cell::Vertex(id.into()));
    }
    if let Some(id) = s.strip_prefix("e:") {
        return Ok(Cell::Edge(id.into()));
    }
    if g.vertices.iter().any(|v| v.id == s) {
        Ok(Cell::Vertex(s.into()))
    } else if g.edges.iter().any(|e| e.id == s) {
        Ok(Cell::Edge(s.into()))
    } else {
        Err(CliError::Malformed(format!("unknown cell {s:?}")))
    }
}

fn heavy_cmd(file: &Path, cells: &[String]) -> Result<(), CliError> {
    let g = expect_surface(load(file)?)?;
    let cells = cells.iter().map(|c| parse_cell(&g, c)).collect::<Result<Vec<_>, _>>()?;
    println!("heavy={} superheavy={}", heavy(&g, &cells)?, superheavy(&g, &cells)?);
    Ok(())
}

fn diagram(file: &Path, track: &Track) -> Result<BifurcationDiagram, CliError> {
    let f = expect_family(load(file)?)?;
    if track.steps == 0 {
        return Err(CliError::Malformed("--steps must be positive".into()));
    }
    Ok(bifurcation(&f, &default_grid(track.steps + 1), TrackOptions { tol: track.tol, ..Default::default() })?)
}

fn bifurcate_cmd(file: &Path, track: &Track, out: &Out, svg: Option<&Path>, rate: Option<f64>) -> Result<(), CliError> {
    let d = diagram(file, track)?;
    emit(out, &write_bifurcation_csv(&d.branches))?;
    if let Some(p) = svg {
        fs::write(p, bifurcation_svg(&d.branches)).map_err(|e| CliError::Compute(format!("{}: {e}", p.display())))?;
    }
    if let Some(h) = rate {
        let r = slope_check(&d, h, 1e-6);
        let msg = format!("min_slope={:.16e} bound={:.16e}", r.min_slope, r.bound);
        if !r.pass {
            return Err(CliError::Compute(format!("deformations: slope check failed: {msg}")));
        }
        eprintln!("{msg}");
    }
    Ok(())
}

fn continue_cmd(file: &Path, c0: &str, track: &Track, out: &Out) -> Result<(), CliError> {
    let c0: f64 = c0
        .parse()
        .ok()
        .filter(|x: &f64| x.is_finite())
        .or_else(|| parse_q(c0).ok().map(|q| unlk::rational::to_f64(&q)))
        .ok_or_else(|| CliError::Malformed(format!("--c0 {c0:?} is not a number")))?;
    let d = diagram(file, track)?;
    let path = continue_c(&d, c0, track.tol.max(1e-9))?;
    let mut text = String::from("sigma,c\n");
    for (s, c) in path {
        text.push_str(&format!("{s:.16e},{c:.16e}\n"));
    }
    emit(out, &text)
}

fn sphere_cmd(cmd: Option<&SphereCmd>, file: Option<&Path>, orbits: Option<i64>) -> Result<(), CliError> {
    if let Some(SphereCmd::Counterexample { zbeta, delta }) = cmd {
        let r = counterexample(&rational(zbeta)?, &rational(delta)?)?;
        print!("{}", to_json_pretty(&CounterexampleJson::from(&r)));
        return Ok(());
    }
    let file = file.ok_or_else(|| CliError::Malformed("sphere needs a model file or the counterexample subcommand".into()))?;
    let hp = match load(file)? {
        Model::Sphere(h) => h,
        other => return Err(CliError::Malformed(format!("expected a sphere model, got {}", other.kind()))),
    };
    if let Some(m) = orbits {
        if m < 0 {
            return Err(CliError::Malformed("--orbits must be non-negative".into()));
        }
        let mut text = String::from("z,k,m,action,cz_index\n");
        for o in capped_orbits(&hp, -m..=m)? {
            text.push_str(&format!("{},{},{},{},{}\n", fmt_q(&o.z), o.k, o.m, fmt_q(&o.action), o.cz_index));
        }
        print!("{text}");
        return Ok(());
    }
    let b = c_simple_bump(&hp)?;
    let q = |x: &Q| QStr(x.clone());
    let doc = json!({
        "c": q(&b.c),
        "delta": q(&b.delta),
        "z_beta": q(&b.z_beta),
        "z_alpha": q(&b.z_alpha),
        "candidates": {
            "south": q(&b.candidates[0]),
            "beta": q(&b.candidates[1]),
            "alpha": q(&b.candidates[2]),
            "north": q(&b.candidates[3]),
        },
        "warnings": b.warnings,
    });
    print!("{}", to_json_pretty(&doc));
    Ok(())
}

fn ingest_cmd(file: &Path, levels: usize, prune: Option<f64>, max_den: u64, out: &Out) -> Result<(), CliError> {
    let data = read(file)?;
    let grid = if data.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'{') {
        match parse_model(&data)? {
            Model::Grid(g) => g,
            other => return Err(CliError::Malformed(format!("expected a grid model, got {}", other.kind()))),
        }
    } else {
        parse_grid(&data)?
    };
    if max_den == 0 {
        return Err(CliError::Malformed("--max-den must be positive".into()));
    }
    let r = ingest(&grid, IngestOptions { n_levels: levels, prune, max_den })?;
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    let nu = nu_forest(&r.trees)?;
    eprintln!("extrema={} saddles={} trees={} nu={}", r.extrema, r.saddles, r.trees.len(), fmt_q(&nu));
    let text = match r.trees.as_slice() {
        [t] => to_json(&Model::PlaneTree(t.clone())),
        ts => {
            let docs: Vec<ModelDocument> = ts.iter().map(|t| ModelDocument::PlaneTree(PlaneTreeDoc::from_tree(t))).collect();
            to_json_pretty(&docs)
        }
    };
    emit(out, &text)
}

fn svg_cmd(diagram: &Path, out: &Out) -> Result<(), CliError> {
    let branches = parse_bifurcation_csv(&read(diagram)?)?;
    emit(out, &bifurcation_svg(&branches))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.cmd {
        Cmd::Validate { file } => validate(file),
        Cmd::Spectrum { file, out } => spectrum_cmd(file, out),
        Cmd::Nu { file, oracle, both, cap } => nu_cmd(file, *oracle, *both, *cap),
        Cmd::Zeta { file, scan, samples, decomposition } => zeta_cmd(file, *scan, *samples, *decomposition),
        Cmd::Heavy { file, cells } => heavy_cmd(file, cells),
        Cmd::Bifurcate { file, track, out, svg, rate } => bifurcate_cmd(file, track, out, svg.as_deref(), *rate),
        Cmd::ContinueC { file, c0, track, out } => continue_cmd(file, c0, track, out),
        Cmd::Sphere { cmd, file, orbits } => sphere_cmd(cmd.as_ref(), file.as_deref(), *orbits),
        Cmd::IngestGrid { file, levels, prune, max_den, out } => ingest_cmd(file, *levels, *prune, *max_den, out),
        Cmd::Svg { diagram, out } => svg_cmd(diagram, out),
    }
}

fn init_threads() {
    if let Some(n) = std::env::var("UNLK_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_threads();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let CliError::Mismatch(line) = &e {
                println!("{line}");
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
