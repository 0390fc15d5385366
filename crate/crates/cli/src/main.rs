//! `sector-lab`: command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on bad
//! input (unparsable files, unknown representations, unsupported groups).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sector_lab::complex::io::to_text;
use sector_lab::complex::{star_region, ConfigComplex};
use sector_lab::cover::{
    amenability_report, ball_elements, build_cover, decomposition_report, non_l2_representation, verify_gauge_commutes,
    CoverExtent, GramForm,
};
use sector_lab::error::Error;
use sector_lab::holonomy::{
    cocycle_from_rep, equivalence_fingerprint, homotopy_check, ls_check, verify_cocycle, UnitaryRep,
};
use sector_lab::linalg::{c64, CMatrix};
use sector_lab::pi1::Pi1Presentation;
use sector_lab::repfile::resolve_rep;
use sector_lab::scenario::{list_presets, preset, run, write_atomic, ComplexSpec, Scenario};
use sector_lab::sectors::{spectrum, twisted_laplacian};

#[derive(Parser)]
#[command(name = "sector-lab", version, about = "Quantum sectors on combinatorial configuration spaces")]
struct Cli {
    /// Numerical tolerance for pass/fail checks (overrides scenario values).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomised checks (overrides scenario values).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for report files; reports go to stdout when unset.
    #[arg(long, global = true, env = "SECTOR_LAB_OUT")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Complex arguments take a file path or a shorthand such as `cycle:8`,
/// `quotient:8:4`, `grid:7x7:holes=1,1,2,2`, `present:a,b;a2,b2,(ab)3` or
/// `two-particle:cycle:5`.
#[derive(Subcommand)]
enum Command {
    /// Print the canonical text form of a complex.
    Build {
        #[arg(long)]
        preset: String,
    },
    /// Fundamental group presentation.
    Pi1 {
        complex: String,
        /// Base vertex id (or index).
        #[arg(long)]
        base: Option<String>,
    },
    /// Cocycle, homotopy, local-triviality and fingerprint checks.
    Holonomy {
        complex: String,
        /// `trivial[:d]`, `theta:t1,…`, `irrep:i` or a representation file.
        #[arg(long)]
        rep: String,
        #[arg(long, value_delimiter = ',', default_value = "cocycle,homotopy,ls,fingerprint")]
        check: Vec<Check>,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        fingerprint_len: usize,
    },
    /// Twisted Laplacian spectrum of one sector.
    Spectrum {
        complex: String,
        #[arg(long, default_value = "trivial")]
        rep: String,
        /// Number of lowest eigenvalues; all when unset.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Build the universal cover (whole or a ball) and check the gauge action.
    Cover {
        complex: String,
        #[arg(long, conflicts_with = "full")]
        radius: Option<usize>,
        #[arg(long)]
        full: bool,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Lowest cover eigenvalues to report.
        #[arg(long, default_value_t = 20)]
        k: usize,
    },
    /// Split the full-cover spectrum into sectors (finite groups).
    Decompose { complex: String },
    /// Kesten spectral radius estimates and the amenability verdict.
    Amenability {
        complex: String,
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<usize>>,
    },
    /// Represented model from a Gram form on a finite support.
    Nonl2 {
        complex: String,
        #[arg(long)]
        rep: String,
        /// Word radius of the support; the whole group when unset.
        #[arg(long)]
        support: Option<usize>,
        #[arg(long, value_enum, default_value_t = Form::Vector)]
        form: Form,
    },
    /// Run a scenario file or built-in preset.
    Run { scenario: String },
    /// List built-in scenarios.
    Presets,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Check {
    Cocycle,
    Homotopy,
    Ls,
    Fingerprint,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Form {
    Vector,
    Trace,
}

type CliResult<T> = Result<T, Error>;

struct Output {
    name: String,
    json: Value,
    csv: Option<String>,
    passed: bool,
}

enum Report {
    /// Plain text written as-is (`--out` gets `<file>`).
    Text { file: &'static str, text: String },
    Data(Output),
    /// Files already written under `--out`.
    Written { passed: bool },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(report) => match emit(&cli, &report) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(cli: &Cli, report: &Report) -> CliResult<bool> {
    let out = match report {
        Report::Written { passed } => return Ok(*passed),
        Report::Text { file, text } => {
            match &cli.out {
                Some(dir) => {
                    let path = dir.join(file);
                    write_atomic(&path, text.as_bytes())?;
                    eprintln!("wrote {}", path.display());
                }
                None => print!("{text}"),
            }
            return Ok(true);
        }
        Report::Data(out) => out,
    };
    let json = serde_json::to_string_pretty(&out.json)? + "\n";
    match &cli.out {
        Some(dir) => {
            let path = dir.join(format!("{}.json", out.name));
            write_atomic(&path, json.as_bytes())?;
            eprintln!("wrote {}", path.display());
            if let Some(csv) = &out.csv {
                let path = dir.join(format!("{}.csv", out.name));
                write_atomic(&path, csv.as_bytes())?;
                eprintln!("wrote {}", path.display());
            }
        }
        None => match (cli.format, &out.csv) {
            (Format::Csv, Some(csv)) => print!("{csv}"),
            (Format::Csv, None) => {
                return Err(Error::InvalidParameter(format!("{} has no CSV output", out.name)));
            }
            (Format::Json, _) => print!("{json}"),
        },
    }
    Ok(out.passed)
}

fn load_complex(arg: &str) -> CliResult<ConfigComplex> {
    let path = Path::new(arg);
    if path.exists() {
        return ComplexSpec::File { path: path.to_path_buf() }.build(None);
    }
    ComplexSpec::from_shorthand(arg)
        .map_err(|_| Error::InvalidParameter(format!("{arg:?} is neither a file nor a complex shorthand")))?
        .build(None)
}

fn load(arg: &str) -> CliResult<(ConfigComplex, Pi1Presentation)> {
    let complex = load_complex(arg)?;
    let pres = Pi1Presentation::compute(&complex, 0)?;
    Ok((complex, pres))
}

fn matrix_json(m: &CMatrix) -> Value {
    json!((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn csv_rows(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

fn spectrum_csv(values: &[f64], multiplets: &[(f64, usize)]) -> String {
    // multiplicity of the cluster each eigenvalue belongs to
    let mut mult = Vec::with_capacity(values.len());
    for &(_, m) in multiplets {
        mult.extend(std::iter::repeat_n(m, m));
    }
    csv_rows(
        "index,eigenvalue,multiplicity",
        values.iter().enumerate().map(|(i, v)| format!("{i},{v:.15e},{}", mult.get(i).copied().unwrap_or(1))),
    )
}

fn execute(cli: &Cli) -> CliResult<Report> {
    let seed = cli.seed.unwrap_or(0);
    let tol = cli.tol.unwrap_or(1e-10);
    match &cli.command {
        Command::Build { preset } => {
            let complex = ComplexSpec::from_shorthand(preset)?.build(None)?;
            Ok(Report::Text { file: "complex.txt", text: to_text(&complex) })
        }
        Command::Pi1 { complex, base } => {
            let c = load_complex(complex)?;
            let base = match base {
                None => 0,
                Some(id) => c
                    .vertex_by_id(id)
                    .or_else(|| id.parse().ok().filter(|&i: &usize| i < c.num_vertices()))
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown vertex {id:?}")))?,
            };
            let pres = Pi1Presentation::compute(&c, base)?;
            let names = pres.generator_names();
            let backend = pres.backend().ok();
            let json = json!({
                "base": c.vertices()[base].id,
                "generators": names,
                "relators": pres.simplified().relators.iter()
                    .map(|r| sector_lab::group::word::format_word(r, &names)).collect::<Vec<_>>(),
                "chords": pres.chords().len(),
                "betti": c.betti1(),
                "backend_guess": pres.backend_guess(),
                "order": backend.and_then(|b| b.order()),
            });
            Ok(Report::Data(Output { name: "pi1".into(), json, csv: None, passed: true }))
        }
        Command::Holonomy { complex, rep, check, trials, fingerprint_len } => {
            let (c, pres) = load(complex)?;
            let rep = resolve_rep(rep, &pres)?;
            let conn = cocycle_from_rep(&c, &pres, &rep)?;
            let mut report = serde_json::Map::new();
            let mut passed = true;
            let names = pres.generator_names();
            let holonomies: serde_json::Map<String, Value> = (0..pres.num_generators())
                .map(|g| Ok((names[g].clone(), matrix_json(&conn.transport(&pres.generator_loop(&c, g)?)?))))
                .collect::<CliResult<_>>()?;
            report.insert("generator_holonomies".into(), Value::Object(holonomies));
            let (fixed, _) = conn.tree_gauge(&c, &pres)?;
            let chords: serde_json::Map<String, Value> = pres
                .chords()
                .iter()
                .map(|&e| (c.edges()[e].id.clone(), matrix_json(fixed.forward(e))))
                .collect();
            report.insert("tree_gauge_chords".into(), Value::Object(chords));
            if check.contains(&Check::Cocycle) {
                let r = verify_cocycle(&c, &conn, *trials, seed, cli.tol.unwrap_or(1e-12))?;
                passed &= r.passed();
                report.insert("cocycle".into(), serde_json::to_value(&r)?);
            }
            if check.contains(&Check::Homotopy) {
                let r = homotopy_check(&c, &pres, &conn, 50, seed, tol)?;
                passed &= r.passed();
                report.insert("homotopy".into(), serde_json::to_value(&r)?);
            }
            if check.contains(&Check::Ls) {
                let base = pres.base();
                let region = star_region(&c, base, 1)?;
                if region.small {
                    let r = ls_check(&c, &conn, &region, tol)?;
                    passed &= r.trivial;
                    report.insert(
                        "ls".into(),
                        json!({"region_vertices": region.vertices.len(), "trivial": r.trivial, "max_defect": r.max_defect}),
                    );
                } else {
                    report.insert("ls".into(), json!({"skipped": "radius-1 star is not simply connected"}));
                }
            }
            if check.contains(&Check::Fingerprint) {
                let fp = equivalence_fingerprint(&c, &pres, &conn, *fingerprint_len)?;
                report.insert("fingerprint".into(), json!(fp.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()));
            }
            report.insert("passed".into(), json!(passed));
            Ok(Report::Data(Output { name: "holonomy".into(), json: Value::Object(report), csv: None, passed }))
        }
        Command::Spectrum { complex, rep, k } => {
            let (c, pres) = load(complex)?;
            let rep = resolve_rep(rep, &pres)?;
            let conn = cocycle_from_rep(&c, &pres, &rep)?;
            let s = spectrum(&twisted_laplacian(&c, &conn)?, *k)?;
            let csv = spectrum_csv(&s.values, &s.multiplets);
            let json = json!({
                "vertices": c.num_vertices(),
                "rep_dim": rep.dim(),
                "operator_dim": c.num_vertices() * rep.dim(),
                "spectrum": s,
            });
            Ok(Report::Data(Output { name: "spectrum".into(), json, csv: Some(csv), passed: true }))
        }
        Command::Cover { complex, radius, full, trials, k } => {
            let (c, pres) = load(complex)?;
            let extent = match (radius, full) {
                (Some(r), _) => CoverExtent::Ball(*r),
                (None, true) => CoverExtent::Full,
                (None, false) => match pres.backend()?.order() {
                    Some(_) => CoverExtent::Full,
                    None => CoverExtent::Ball(4),
                },
            };
            let cover = build_cover(&c, &pres, extent)?;
            let gauge = verify_gauge_commutes(&cover, *trials, seed)?;
            let defects = cover.covering_defects();
            let s = spectrum(&cover.laplacian()?, Some(*k))?;
            let passed = defects == 0 && gauge.passed();
            let json = json!({
                "extent": format!("{extent:?}"),
                "elements": cover.elements().len(),
                "vertices": cover.num_vertices(),
                "interior_vertices": cover.interior_count(),
                "boundary_vertices": cover.boundary_count(),
                "lifted_edges": cover.lifted_edges().len(),
                "covering_defects": defects,
                "gauge": gauge,
                "spectrum": s,
                "passed": passed,
            });
            Ok(Report::Data(Output { name: "cover".into(), json, csv: Some(spectrum_csv(&s.values, &s.multiplets)), passed }))
        }
        Command::Decompose { complex } => {
            let (c, pres) = load(complex)?;
            let d = decomposition_report(&c, &pres, cli.tol.unwrap_or(1e-8))?;
            let csv = csv_rows(
                "index,cover,sectors",
                d.cover_spectrum.iter().zip(&d.predicted).enumerate().map(|(i, (a, b))| format!("{i},{a:.15e},{b:.15e}")),
            );
            let passed = d.passed();
            Ok(Report::Data(Output { name: "decompose".into(), json: serde_json::to_value(&d)?, csv: Some(csv), passed }))
        }
        Command::Amenability { complex, radii } => {
            let (_, pres) = load(complex)?;
            let r = amenability_report(pres.backend()?, radii.as_deref())?;
            let csv = csv_rows(
                "radius,ball_size,estimate",
                r.estimates.iter().map(|e| format!("{},{},{:.15e}", e.radius, e.ball_size, e.estimate)),
            );
            let passed = r.monotone;
            Ok(Report::Data(Output { name: "amenability".into(), json: serde_json::to_value(&r)?, csv: Some(csv), passed }))
        }
        Command::Nonl2 { complex, rep, support, form } => {
            let (c, pres) = load(complex)?;
            let backend = pres.backend()?;
            if support.is_none() && backend.order().is_none() {
                return Err(Error::InvalidParameter("--support is required for infinite groups".into()));
            }
            let rep: UnitaryRep = resolve_rep(rep, &pres)?;
            let gram = match form {
                Form::Trace => GramForm::Trace,
                Form::Vector => {
                    let mut v = nalgebra::DVector::zeros(rep.dim());
                    v[0] = c64(1.0, 0.0);
                    GramForm::Vector(v)
                }
            };
            let (elements, _) = ball_elements(backend, *support);
            let r = non_l2_representation(&rep, &gram, &elements, &c, &pres, tol)?;
            let passed = r.passed();
            Ok(Report::Data(Output { name: "nonl2".into(), json: serde_json::to_value(&r)?, csv: None, passed }))
        }
        Command::Run { scenario } => {
            let path = Path::new(scenario);
            let mut s = if path.exists() { Scenario::from_file(path)? } else { preset(scenario)? };
            if let Some(seed) = cli.seed {
                s.seed = seed;
            }
            if let Some(t) = cli.tol {
                let tl = &mut s.tolerances;
                for v in [&mut tl.cocycle, &mut tl.holonomy, &mut tl.spectrum, &mut tl.decomposition, &mut tl.conjugacy, &mut tl.nonl2] {
                    *v = t;
                }
            }
            let out = run(&s)?;
            for a in &out.assertions {
                eprintln!("{} {}", if a.passed { "pass" } else { "FAIL" }, a.name);
            }
            if let Some(dir) = &cli.out {
                for p in out.write(dir)? {
                    eprintln!("wrote {}", p.display());
                }
                return Ok(Report::Written { passed: out.passed });
            }
            let csv = (!out.spectra.is_empty()).then(|| out.spectra_csv()).transpose()?;
            Ok(Report::Data(Output { name: "summary".into(), json: out.summary(), csv, passed: out.passed }))
        }
        Command::Presets => {
            let list: Vec<Value> =
                list_presets().iter().map(|p| json!({"name": p.name, "description": p.description})).collect();
            let csv = csv_rows("name,description", list_presets().iter().map(|p| format!("{},\"{}\"", p.name, p.description)));
            Ok(Report::Data(Output { name: "presets".into(), json: json!(list), csv: Some(csv), passed: true }))
        }
    }
}
