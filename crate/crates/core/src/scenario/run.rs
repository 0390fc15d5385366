//! Scenario execution.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::{Scenario, Step, Tolerances};
use crate::complex::{star_region, ConfigComplex, Region};
use crate::cover::{
    amenability_report, ball_elements, build_cover, conjugacy_check, decomposition_report, non_l2_representation,
    verify_gauge_commutes, CoverExtent, GramForm,
};
use crate::error::{Error, Result};
use crate::group::characters::CharacterTable;
use crate::group::word::format_word;
use crate::group::GroupBackend;
use crate::holonomy::{
    cocycle_from_rep, homotopy_check, ls_check, topological_operator, verify_cocycle, FlatConnection, GaugeField,
    UnitaryRep,
};
use crate::linalg::{c64, max_sorted_gap};
use crate::pi1::{PathWord, Pi1Presentation};
use crate::repfile::resolve_rep;
use crate::sectors::{sector_compare, spectrum, twisted_laplacian};

/// One checked claim in a summary.
#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    /// `closed-form`, `brute-force` or `cross-module`.
    pub oracle: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// One eigenvalue of one computed spectrum.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRow {
    pub label: String,
    pub theta: Option<f64>,
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub name: String,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
    pub steps: Vec<(String, Value)>,
    pub spectra: Vec<SpectrumRow>,
    pub info: Value,
}

impl RunOutput {
    pub fn summary(&self) -> Value {
        json!({
            "scenario": self.name,
            "passed": self.passed,
            "info": self.info,
            "assertions": self.assertions,
            "steps": self.steps.iter().map(|(s, r)| json!({"step": s, "report": r})).collect::<Vec<_>>(),
        })
    }

    /// Pretty JSON with sorted keys.
    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.summary())? + "\n")
    }

    pub fn spectra_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.spectra {
            w.serialize(row).map_err(|e| Error::NumericalFailure(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::NumericalFailure(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

struct Context<'a> {
    complex: ConfigComplex,
    pres: Pi1Presentation,
    reps: Vec<(String, UnitaryRep)>,
    tol: Tolerances,
    seed: u64,
    scenario: &'a Scenario,
    assertions: Vec<Assertion>,
    spectra: Vec<SpectrumRow>,
}

impl Context<'_> {
    fn push(&mut self, name: String, passed: bool, value: Option<f64>, tolerance: Option<f64>, oracle: &str) {
        self.assertions.push(Assertion { name, passed, value, tolerance, oracle: oracle.into(), error: None });
    }

    /// `value ≤ tol`; NaN fails.
    fn at_most(&mut self, name: impl Into<String>, value: f64, tol: f64, oracle: &str) {
        self.push(name.into(), value <= tol, Some(value), Some(tol), oracle);
    }

    fn at_least(&mut self, name: impl Into<String>, value: f64, bound: f64, oracle: &str) {
        self.push(name.into(), value >= bound, Some(value), Some(bound), oracle);
    }

    fn holds(&mut self, name: impl Into<String>, ok: bool, oracle: &str) {
        self.push(name.into(), ok, None, None, oracle);
    }

    fn backend(&self) -> Result<&GroupBackend> {
        self.pres.backend()
    }

    fn record_spectrum(&mut self, label: &str, theta: Option<f64>, values: &[f64]) {
        for (index, &value) in values.iter().enumerate() {
            self.spectra.push(SpectrumRow { label: label.to_string(), theta, index, value });
        }
    }
}

/// Runs every step. Configuration problems (unbuildable complex, unknown
/// representation, steps the group cannot support) are returned as
/// errors before any step runs; errors inside a step become failed
/// assertions.
pub fn run(scenario: &Scenario) -> Result<RunOutput> {
    let complex = scenario.complex.build(None)?;
    let pres = Pi1Presentation::compute(&complex, scenario.base_vertex)?;
    let reps = scenario
        .reps
        .iter()
        .map(|spec| Ok((spec.clone(), resolve_rep(spec, &pres)?)))
        .collect::<Result<Vec<_>>>()?;
    let finite = pres.backend().ok().and_then(|b| b.order()).is_some();
    for step in &scenario.steps {
        match step {
            Step::CoverDecompose | Step::IdenticalParticles if !finite => {
                return Err(Error::UnsupportedGroup(format!(
                    "step {} needs a finite fundamental group, got {}",
                    step.name(),
                    pres.backend_guess()
                )));
            }
            Step::Nonl2 { support_radius: None, .. } if !finite => {
                return Err(Error::InvalidParameter("nonl2 on an infinite group needs support_radius".into()));
            }
            Step::Nonl2 { form, rep, .. } => {
                if form != "vector" && form != "trace" {
                    return Err(Error::InvalidParameter(format!("unknown Gram form {form:?}")));
                }
                resolve_rep(rep, &pres)?;
            }
            Step::Spectrum { theta_sweep: Some(_), .. } if pres.num_generators() != 1 => {
                return Err(Error::InvalidParameter("theta_sweep needs a one-generator group".into()));
            }
            _ => {}
        }
    }
    let info = json!({
        "description": scenario.description,
        "seed": scenario.seed,
        "vertices": complex.num_vertices(),
        "edges": complex.num_edges(),
        "faces": complex.num_faces(),
        "reps": scenario.reps,
    });
    let mut ctx = Context {
        complex,
        pres,
        reps,
        tol: scenario.tolerances,
        seed: scenario.seed,
        scenario,
        assertions: Vec::new(),
        spectra: Vec::new(),
    };
    let mut steps = Vec::new();
    for step in &scenario.steps {
        let report = match run_step(&mut ctx, step) {
            Ok(v) => v,
            Err(e) => {
                ctx.assertions.push(Assertion {
                    name: format!("{}.completed", step.name()),
                    passed: false,
                    value: None,
                    tolerance: None,
                    oracle: "none".into(),
                    error: Some(e.to_string()),
                });
                json!({"error": e.to_string()})
            }
        };
        steps.push((step.name().to_string(), report));
    }
    let passed = ctx.assertions.iter().all(|a| a.passed);
    Ok(RunOutput { name: scenario.name.clone(), passed, assertions: ctx.assertions, steps, spectra: ctx.spectra, info })
}

fn run_step(ctx: &mut Context<'_>, step: &Step) -> Result<Value> {
    match step {
        Step::Pi1 => pi1_step(ctx),
        Step::HolonomyChecks { cocycle_trials, homotopy_pairs } => holonomy_step(ctx, *cocycle_trials, *homotopy_pairs),
        Step::Spectrum { theta_sweep, random_gauges, gauge_dims, distinct_spectra, fingerprint_len } => {
            spectrum_step(ctx, *theta_sweep, *random_gauges, gauge_dims, *distinct_spectra, *fingerprint_len)
        }
        Step::CoverDecompose => cover_step(ctx),
        Step::Amenability { radii, expect_amenable } => amenability_step(ctx, radii.as_deref(), *expect_amenable),
        Step::Nonl2 { rep, form, support_radius, expect_quotient_dim, expect_all_ones } => {
            nonl2_step(ctx, rep, form, *support_radius, *expect_quotient_dim, *expect_all_ones)
        }
        Step::IdenticalParticles => particles_step(ctx),
    }
}

fn face_loop(complex: &ConfigComplex, pres: &Pi1Presentation, face: usize) -> Result<PathWord> {
    let boundary = complex.faces()[face].boundary.clone();
    let s = complex.source(boundary[0]);
    let to = pres.delta(complex, s)?;
    to.then(&PathWord::new(complex, s, boundary)?)?.then(&to.reversed())
}

fn pi1_step(ctx: &mut Context<'_>) -> Result<Value> {
    let names = ctx.pres.generator_names();
    let backend = ctx.pres.backend().ok().cloned();
    ctx.holds("pi1.backend-available", backend.is_some(), "cross-module");
    let mut violations = 0usize;
    if let Some(b) = &backend {
        for f in 0..ctx.complex.num_faces() {
            let lasso = face_loop(&ctx.complex, &ctx.pres, f)?;
            if ctx.pres.beta(&lasso)? != b.identity() {
                violations += 1;
            }
        }
        ctx.at_most("pi1.face-relators-trivial", violations as f64, 0.0, "brute-force");
    }
    Ok(json!({
        "generators": names,
        "chords": ctx.pres.chords().len(),
        "face_relators": ctx.pres.relators().len(),
        "relators": ctx.pres.simplified().relators.iter().map(|r| format_word(r, &names)).collect::<Vec<_>>(),
        "backend": ctx.pres.backend_guess(),
        "order": backend.as_ref().and_then(|b| b.order()),
        "betti1": ctx.complex.betti1(),
    }))
}

/// The radius-1 star at the base when it is small, otherwise the base
/// vertex on its own.
fn small_region(complex: &ConfigComplex, base: usize) -> Result<Region> {
    let star = star_region(complex, base, 1)?;
    if star.small {
        return Ok(star);
    }
    Ok(Region { center: base, radius: 0, vertices: vec![base], edges: Vec::new(), faces: Vec::new(), small: true })
}

fn rep_list(ctx: &Context<'_>) -> Vec<(String, UnitaryRep)> {
    if ctx.reps.is_empty() {
        vec![("trivial".to_string(), UnitaryRep::trivial(ctx.pres.generator_names(), 1))]
    } else {
        ctx.reps.clone()
    }
}

fn holonomy_step(ctx: &mut Context<'_>, trials: usize, pairs: usize) -> Result<Value> {
    let mut reports = serde_json::Map::new();
    let region = small_region(&ctx.complex, ctx.pres.base())?;
    for (label, rep) in rep_list(ctx) {
        let conn = cocycle_from_rep(&ctx.complex, &ctx.pres, &rep)?;
        let cocycle = verify_cocycle(&ctx.complex, &conn, trials, ctx.seed, ctx.tol.cocycle)?;
        ctx.at_most(format!("holonomy.cocycle[{label}]"), cocycle.max_deviation, ctx.tol.cocycle, "brute-force");
        ctx.at_most(format!("holonomy.flatness[{label}]"), cocycle.max_face_defect, ctx.tol.holonomy, "brute-force");
        let homotopy = homotopy_check(&ctx.complex, &ctx.pres, &conn, pairs, ctx.seed, ctx.tol.holonomy)?;
        ctx.at_most(format!("holonomy.homotopy[{label}]"), homotopy.max_deviation, ctx.tol.holonomy, "cross-module");
        ctx.at_most(
            format!("holonomy.homotopy-classes[{label}]"),
            homotopy.backend_mismatches as f64,
            0.0,
            "cross-module",
        );
        let mut topo = 0.0f64;
        for g in 0..ctx.pres.num_generators() {
            let walk = ctx.pres.generator_loop(&ctx.complex, g)?;
            topo = topo.max(topological_operator(&ctx.complex, &conn, &walk, &region)?.defect);
        }
        ctx.at_most(format!("holonomy.topological-operator[{label}]"), topo, ctx.tol.holonomy, "cross-module");
        let ls = ls_check(&ctx.complex, &conn, &region, ctx.tol.holonomy)?;
        ctx.holds(format!("holonomy.local-triviality[{label}]"), ls.trivial, "brute-force");
        reports.insert(
            label,
            json!({
                "cocycle": cocycle,
                "homotopy": homotopy,
                "topological_operator_defect": topo,
                "local_triviality_defect": ls.max_defect,
                "region_vertices": region.vertices.len(),
            }),
        );
    }
    Ok(Value::Object(reports))
}

fn ab_closed_form(n: usize, theta: f64) -> Vec<f64> {
    let mut v: Vec<f64> =
        (0..n).map(|k| 2.0 - 2.0 * (std::f64::consts::TAU * (k as f64 + theta) / n as f64).cos()).collect();
    v.sort_by(f64::total_cmp);
    v
}

fn spectrum_step(
    ctx: &mut Context<'_>,
    theta_sweep: Option<usize>,
    random_gauges: usize,
    gauge_dims: &[usize],
    distinct_spectra: bool,
    fingerprint_len: usize,
) -> Result<Value> {
    let mut report = serde_json::Map::new();
    let reps = rep_list(ctx);
    let cmp = sector_compare(&ctx.complex, &ctx.pres, &reps, fingerprint_len, ctx.tol.fingerprint)?;
    for s in &cmp.sectors {
        ctx.record_spectrum(&s.label, None, &s.spectrum);
    }
    for p in &cmp.pairs {
        let pair = format!("{}|{}", cmp.sectors[p.first].label, cmp.sectors[p.second].label);
        ctx.holds(format!("spectrum.fingerprints-differ[{pair}]"), p.fingerprints_differ, "cross-module");
        if distinct_spectra {
            let gap = p.spectral_gap.unwrap_or(f64::INFINITY);
            ctx.at_least(format!("spectrum.spectra-differ[{pair}]"), gap, ctx.tol.spectrum, "cross-module");
        }
    }
    if let Some(gap) = cmp.max_gap_to_untwisted {
        ctx.at_most("spectrum.uniqueness", gap, ctx.tol.spectrum, "cross-module");
    }
    report.insert("sectors".into(), serde_json::to_value(&cmp)?);

    if let Some(m) = theta_sweep {
        let names = ctx.pres.generator_names();
        let mut sweep = Vec::with_capacity(m);
        for k in 0..m {
            let theta = k as f64 / m as f64;
            let conn = cocycle_from_rep(&ctx.complex, &ctx.pres, &UnitaryRep::character(names.clone(), &[theta])?)?;
            let values = spectrum(&twisted_laplacian(&ctx.complex, &conn)?, None)?.values;
            ctx.record_spectrum("sweep", Some(theta), &values);
            sweep.push(values);
        }
        let mut symmetry = 0.0f64;
        for k in 0..m {
            symmetry = symmetry.max(max_sorted_gap(&sweep[k], &sweep[(m - k) % m]).unwrap_or(f64::INFINITY));
        }
        ctx.at_most("spectrum.theta-symmetry", symmetry, ctx.tol.spectrum, "cross-module");
        let shifted = cocycle_from_rep(&ctx.complex, &ctx.pres, &UnitaryRep::character(names, &[1.0 + 1.0 / m as f64])?)?;
        let shifted = spectrum(&twisted_laplacian(&ctx.complex, &shifted)?, None)?.values;
        let period = if m > 1 { max_sorted_gap(&shifted, &sweep[1]).unwrap_or(f64::INFINITY) } else { 0.0 };
        ctx.at_most("spectrum.theta-periodicity", period, ctx.tol.spectrum, "cross-module");
        if let Some(n) = ctx.scenario.complex.cycle_length() {
            let worst = (0..m)
                .map(|k| max_sorted_gap(&sweep[k], &ab_closed_form(n, k as f64 / m as f64)).unwrap_or(f64::INFINITY))
                .fold(0.0, f64::max);
            ctx.at_most("spectrum.closed-form", worst, ctx.tol.spectrum, "closed-form");
        }
        report.insert("theta_sweep".into(), json!(m));
    }

    if random_gauges > 0 {
        let base = spectrum(&twisted_laplacian(&ctx.complex, &FlatConnection::trivial(&ctx.complex, 1))?, None)?.values;
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let mut worst = 0.0f64;
        let dims = if gauge_dims.is_empty() { vec![1] } else { gauge_dims.to_vec() };
        for i in 0..random_gauges {
            let d = dims[i % dims.len()];
            let gauge = GaugeField::random(ctx.complex.num_vertices(), d, &mut rng);
            let conn = FlatConnection::trivial(&ctx.complex, d).gauge_transform(&ctx.complex, &gauge)?;
            let values = spectrum(&twisted_laplacian(&ctx.complex, &conn)?, None)?.values;
            let copies: Vec<f64> = base.iter().flat_map(|&v| std::iter::repeat_n(v, d)).collect();
            worst = worst.max(max_sorted_gap(&values, &copies).unwrap_or(f64::INFINITY));
        }
        let name = if cmp.simply_connected { "spectrum.uniqueness-random" } else { "spectrum.gauge-invariance" };
        ctx.at_most(name, worst, ctx.tol.spectrum, "cross-module");
        report.insert("random_gauges".into(), json!({"count": random_gauges, "max_gap": worst}));
    }
    Ok(Value::Object(report))
}

fn cover_step(ctx: &mut Context<'_>) -> Result<Value> {
    let cover = build_cover(&ctx.complex, &ctx.pres, CoverExtent::Full)?;
    ctx.at_most("cover.covering-map", cover.covering_defects() as f64, 0.0, "brute-force");
    let gauge = verify_gauge_commutes(&cover, 1000, ctx.seed)?;
    ctx.at_most("cover.gauge-commutes", gauge.violations as f64, 0.0, "brute-force");
    ctx.at_most("cover.left-right-commute", gauge.left_right_violations as f64, 0.0, "brute-force");
    let d = decomposition_report(&ctx.complex, &ctx.pres, ctx.tol.decomposition)?;
    ctx.at_most("cover.projectors", d.projectors.max_defect(), 1e-10, "brute-force");
    ctx.at_most("cover.multiset-identity", d.multiset_gap, ctx.tol.decomposition, "cross-module");
    for b in &d.blocks {
        ctx.at_most(format!("cover.block[{}]", b.irrep), b.gap.max(b.invariance_defect), ctx.tol.decomposition, "cross-module");
    }
    let g = ctx.backend()?.to_finite().expect("finite backend checked before running");
    let table = CharacterTable::for_group(&g)?;
    let conj = conjugacy_check(&g, &table, ctx.tol.conjugacy);
    ctx.at_most("cover.conjugacy", conj.max_defect, ctx.tol.conjugacy, "cross-module");
    ctx.record_spectrum("cover", None, &d.cover_spectrum);
    Ok(json!({
        "cover_vertices": cover.num_vertices(),
        "lifted_edges": cover.lifted_edges().len(),
        "gauge": gauge,
        "decomposition": d,
        "conjugacy_max_defect": conj.max_defect,
    }))
}

fn amenability_step(ctx: &mut Context<'_>, radii: Option<&[usize]>, expect: Option<bool>) -> Result<Value> {
    let backend = ctx.backend()?.clone();
    let r = amenability_report(&backend, radii)?;
    if let Some(e) = expect {
        ctx.holds("amenability.verdict", r.amenable == e, "closed-form");
    }
    ctx.holds("amenability.monotone", r.monotone, "brute-force");
    if backend.order().is_some() {
        ctx.holds("amenability.finite-exact", r.exact == Some(1.0), "brute-force");
    }
    if let (Some(last), Some(reference)) = (r.estimates.iter().max_by_key(|e| e.radius), r.reference) {
        match &backend {
            GroupBackend::Free { rank } if *rank >= 2 => {
                if last.radius >= 10 {
                    ctx.at_most("amenability.trivial-sector-excluded", last.estimate, 0.9, "closed-form");
                }
                if last.radius >= 12 {
                    let rel = (last.estimate - reference).abs() / reference;
                    ctx.at_most("amenability.kesten-reference", rel, 0.05, "closed-form");
                }
            }
            _ if last.radius >= 20 => ctx.at_least("amenability.kesten-near-one", last.estimate, 0.98, "closed-form"),
            _ => {}
        }
    }
    Ok(serde_json::to_value(&r)?)
}

fn nonl2_step(
    ctx: &mut Context<'_>,
    rep: &str,
    form: &str,
    support_radius: Option<usize>,
    expect_dim: Option<usize>,
    expect_all_ones: bool,
) -> Result<Value> {
    let rep = resolve_rep(rep, &ctx.pres)?;
    let gram = if form == "trace" {
        GramForm::Trace
    } else {
        let mut v = DVector::zeros(rep.dim());
        v[0] = c64(1.0, 0.0);
        GramForm::Vector(v)
    };
    let (support, _) = ball_elements(ctx.backend()?, support_radius);
    let r = non_l2_representation(&rep, &gram, &support, &ctx.complex, &ctx.pres, ctx.tol.nonl2)?;
    ctx.holds("nonl2.actions", r.passed(), "cross-module");
    if let Some(d) = expect_dim {
        ctx.at_most("nonl2.quotient-dim", (r.quotient_dim as f64 - d as f64).abs(), 0.0, "closed-form");
    }
    if expect_all_ones {
        ctx.at_most("nonl2.all-ones-gram", r.all_ones_defect, 0.0, "closed-form");
    }
    if let Some(u) = r.right_unitarity_defect {
        ctx.at_most("nonl2.right-unitary", u, ctx.tol.nonl2, "cross-module");
    }
    Ok(serde_json::to_value(&r)?)
}

fn statistics_label(table: &CharacterTable, i: usize) -> &'static str {
    let chars = &table.characters[i];
    if table.dims[i] > 1 {
        "parastatistics"
    } else if chars.iter().all(|z| (z - c64(1.0, 0.0)).norm() < 1e-12) {
        "bosonic"
    } else if chars.iter().all(|z| z.im.abs() < 1e-12 && (z.re.abs() - 1.0).abs() < 1e-12) {
        "fermionic"
    } else {
        "anyonic"
    }
}

fn particles_step(ctx: &mut Context<'_>) -> Result<Value> {
    let (table, reps) = UnitaryRep::irreducibles(&ctx.pres)?;
    let order = ctx.backend()?.order().expect("finite backend checked before running");
    let sum_sq: usize = table.dims.iter().map(|d| d * d).sum();
    ctx.at_most("particles.sum-of-squares", (sum_sq as f64 - order as f64).abs(), 0.0, "closed-form");
    ctx.at_most(
        "particles.irreps-equal-classes",
        (table.num_irreps() as f64 - table.classes.len() as f64).abs(),
        0.0,
        "closed-form",
    );
    let labelled: Vec<(String, UnitaryRep)> =
        reps.into_iter().enumerate().map(|(i, r)| (format!("irrep:{i}"), r)).collect();
    let cmp = sector_compare(&ctx.complex, &ctx.pres, &labelled, 6, ctx.tol.fingerprint)?;
    let distinct = cmp.pairs.iter().all(|p| p.fingerprints_differ);
    ctx.holds("particles.sectors-inequivalent", distinct, "cross-module");
    let sectors: Vec<Value> = (0..table.num_irreps())
        .map(|i| {
            json!({
                "irrep": i,
                "dim": table.dims[i],
                "statistics": statistics_label(&table, i),
                "ground_energy": cmp.sectors[i].min_eigenvalue,
            })
        })
        .collect();
    Ok(json!({"group_order": order, "sectors": sectors}))
}
