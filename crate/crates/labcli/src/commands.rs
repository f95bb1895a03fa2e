use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use polyext::agler::{agler_feasible, schur_agler_norm, AglerDecomposition, AglerOutcome, DualKernel, PolyPickData, SchurAglerNorm};
use polyext::balance::scan_balanced_pairs;
use polyext::disk::{BlaschkeProduct, DiskPoint, PolyPoint};
use polyext::experiments::{
    circle_image_test, exg1_reproduce, exg1_witness, extension_vs_vn, ClosureOptions, ExtensionOutcome, ShellGap,
};
use polyext::operators::{build_tuple_from_kernel, AndoTuple, VnOptions, TUPLE_TOL};
use polyext::pick::{is_extremal, minimal_norm, schur_construct};
use polyext::poly::MultiPoly;
use polyext::variety::{uniqueness_coincidence_check, AlgebraicVariety, DirectionOutcome, RetractStatus};
use serde_json::{json, Value};

use crate::output::{cmat, complex_header, cvec, cx, emit, to_canonical, Csv};
use crate::problem::{
    complex, load_variety, matrix, poly_data, poly_from_terms, poly_points, DiskPickPayload, ExperimentPayload, Kind, Pair,
    PolyPickPayload, ProblemFile, Term, TuplePayload, VarietyPayload,
};
use crate::CliError;

fn shells_json(shells: &[ShellGap]) -> Value {
    Value::Array(
        shells
            .iter()
            .map(|s| json!({"k": s.k, "radius": s.radius, "eta": s.eta, "gap": s.gap, "midpoint": s.midpoint}))
            .collect(),
    )
}

fn norm_json(n: &SchurAglerNorm) -> Value {
    json!({"value": n.value, "lower": n.lower, "caveat_flag": n.caveat()})
}

fn point_json(p: &PolyPoint) -> Value {
    cvec(p.coords())
}

fn data_json(data: &PolyPickData) -> Value {
    json!({
        "nodes": Value::Array(data.nodes().iter().map(point_json).collect()),
        "targets": cvec(data.targets()),
    })
}

fn terms_json(p: &MultiPoly) -> Value {
    Value::Array(p.terms().iter().map(|(e, c)| json!({"exp": e, "coef": cx(*c)})).collect())
}

fn tuple_file(t: &AndoTuple) -> Value {
    json!({
        "version": 1,
        "kind": "tuple",
        "seed": 0,
        "payload": {
            "nodes": Value::Array(t.nodes().iter().map(point_json).collect()),
            "kernel": cmat(t.kernel()),
            "matrices": Value::Array(t.matrices().iter().map(cmat).collect()),
        },
    })
}

fn write_report(dir: &Path, report: &Value, text: &str, json_stdout: bool) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    let body = to_canonical(report);
    std::fs::write(dir.join("report.json"), &body)?;
    std::fs::write(dir.join("report.txt"), text)?;
    emit(None, if json_stdout { &body } else { text })?;
    Ok(())
}

/// Primal decomposition at the top of the bracket, dual kernel just below it.
fn poly_certificates(data: &PolyPickData, norm: &SchurAglerNorm) -> Value {
    let primal = [norm.value, norm.value * (1.0 + 1e-6)].into_iter().find_map(|t| match agler_feasible(data, t) {
        Ok(AglerOutcome::Feasible(dec)) => Some(dec),
        _ => None,
    });
    let dual = (norm.lower > 0.0)
        .then_some([norm.lower, norm.lower * (1.0 - 1e-4)])
        .into_iter()
        .flatten()
        .find_map(|t| match agler_feasible(data, t) {
            Ok(AglerOutcome::Infeasible(k)) => Some((t, k)),
            _ => None,
        });
    json!({
        "primal": primal.map(|d| json!({"t": d.t, "gammas": Value::Array(d.gammas.iter().map(cmat).collect())})),
        "dual": dual.map(|(t, k)| json!({"t": t, "kernel": cmat(&k.k), "violation": k.violation})),
    })
}

fn check_disk_certificate(data: &polyext::pick::DiskPickData, b: &BlaschkeProduct, tol: f64) -> Result<f64, CliError> {
    let mut worst = 0.0f64;
    for (z, w) in data.nodes().iter().zip(data.targets()) {
        worst = worst.max((b.eval(*z)? - w).norm());
    }
    if worst > tol {
        return Err(CliError::Core(polyext::error::Error::ContractViolation(format!("interpolant misses the data by {worst:e}"))));
    }
    Ok(worst)
}

fn check_poly_certificate(data: &PolyPickData, cert: &Value) -> Result<(), CliError> {
    let bad = |m: String| CliError::Core(polyext::error::Error::ContractViolation(m));
    if let Some(p) = cert.get("primal").filter(|v| !v.is_null()) {
        let t = p["t"].as_f64().ok_or_else(|| CliError::Input("primal certificate needs `t`".into()))?;
        let gammas: Vec<Vec<Vec<Pair>>> = serde_json::from_value(p["gammas"].clone()).map_err(|e| CliError::Input(e.to_string()))?;
        let gammas = gammas.iter().map(|g| matrix(g)).collect::<Result<Vec<_>, _>>()?;
        AglerDecomposition { gammas, t }.verify(data)?;
    }
    if let Some(d) = cert.get("dual").filter(|v| !v.is_null()) {
        let t = d["t"].as_f64().ok_or_else(|| CliError::Input("dual certificate needs `t`".into()))?;
        let violation = d["violation"].as_f64().unwrap_or(f64::NAN);
        let rows: Vec<Vec<Pair>> = serde_json::from_value(d["kernel"].clone()).map_err(|e| CliError::Input(e.to_string()))?;
        let k = DualKernel::new(matrix(&rows)?, violation)?;
        let form = k.tested_form_min_eigenvalue(data, t);
        if form >= 0.0 {
            return Err(bad(format!("dual kernel does not separate at t = {t}: form eigenvalue {form:e}")));
        }
    }
    Ok(())
}

pub fn pick_solve(input: &Path, out: Option<&Path>, tol: f64) -> Result<(), CliError> {
    let file = ProblemFile::read(input)?;
    file.expect(&[Kind::DiskPick, Kind::PolyPick])?;
    let problem = serde_json::to_value(&file).expect("problem file serializes");
    let doc = match file.kind {
        Kind::DiskPick => {
            let data = file.payload::<DiskPickPayload>()?.data()?;
            let norm = minimal_norm(&data)?;
            let b = schur_construct(&data)?;
            let residual = check_disk_certificate(&data, &b, tol)?;
            json!({
                "problem": problem,
                "result": {"minimal_norm": norm, "extremal": is_extremal(&data)},
                "certificate": {
                    "interpolant": {"zeros": cvec(&b.zeros), "unimodular_constant": cx(b.unimodular_constant), "scale": b.scale},
                    "max_residual": residual,
                },
            })
        }
        _ => {
            let data = file.payload::<PolyPickPayload>()?.data()?;
            let norm = schur_agler_norm(&data)?;
            let cert = poly_certificates(&data, &norm);
            check_poly_certificate(&data, &cert)?;
            json!({
                "problem": problem,
                "result": {"sa_norm": norm.value, "lower": norm.lower, "caveat_flag": norm.caveat()},
                "certificate": cert,
            })
        }
    };
    emit(out, &to_canonical(&doc))?;
    Ok(())
}

pub fn check(input: &Path, json_stdout: bool) -> Result<(), CliError> {
    let text = std::fs::read_to_string(input).map_err(|e| CliError::Input(format!("{}: {e}", input.display())))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("malformed JSON: {e}")))?;
    let kind = if let Some(cert) = doc.get("certificate") {
        let file: ProblemFile =
            serde_json::from_value(doc["problem"].clone()).map_err(|e| CliError::Input(format!("invalid embedded problem: {e}")))?;
        match file.kind {
            Kind::DiskPick => {
                let data = file.payload::<DiskPickPayload>()?.data()?;
                let ip = &cert["interpolant"];
                let zeros: Vec<Pair> = serde_json::from_value(ip["zeros"].clone()).map_err(|e| CliError::Input(e.to_string()))?;
                let c: Pair = serde_json::from_value(ip["unimodular_constant"].clone()).map_err(|e| CliError::Input(e.to_string()))?;
                let scale = ip["scale"].as_f64().ok_or_else(|| CliError::Input("interpolant needs `scale`".into()))?;
                let b = BlaschkeProduct::new(zeros.into_iter().map(complex).collect(), complex(c), scale)?;
                check_disk_certificate(&data, &b, 1e-7)?;
            }
            Kind::PolyPick => check_poly_certificate(&file.payload::<PolyPickPayload>()?.data()?, cert)?,
            other => return Err(CliError::Input(format!("no certificates for kind {}", other.as_str()))),
        }
        file.kind
    } else {
        let file = ProblemFile::parse(&text)?;
        match file.kind {
            Kind::DiskPick => drop(file.payload::<DiskPickPayload>()?.data()?),
            Kind::PolyPick => drop(file.payload::<PolyPickPayload>()?.data()?),
            Kind::Variety => drop(file.payload::<VarietyPayload>()?.variety()?),
            Kind::Experiment => {
                let p = file.payload::<ExperimentPayload>()?;
                p.variety.variety()?;
                poly_data(&p.nodes, &p.targets)?;
            }
            Kind::Tuple => check_tuple(&file.payload::<TuplePayload>()?)?,
        }
        file.kind
    };
    let msg = if json_stdout { to_canonical(&json!({"kind": kind.as_str(), "valid": true})) } else { format!("{}: valid\n", kind.as_str()) };
    emit(None, &msg)?;
    Ok(())
}

/// Rebuilds the tuple from kernel and nodes; the stored matrices must match exactly.
fn check_tuple(p: &TuplePayload) -> Result<(), CliError> {
    let nodes = poly_points(&p.nodes)?;
    let kernel = DualKernel::new(matrix(&p.kernel)?, f64::NAN)?;
    let tuple = build_tuple_from_kernel(&kernel, &nodes)?;
    tuple.check_invariants(TUPLE_TOL)?;
    if p.matrices.len() != tuple.dim() {
        return Err(CliError::Input(format!("expected {} matrices, found {}", tuple.dim(), p.matrices.len())));
    }
    for (j, (stored, rebuilt)) in p.matrices.iter().zip(tuple.matrices()).enumerate() {
        if matrix(stored)? != *rebuilt {
            return Err(CliError::Core(polyext::error::Error::ContractViolation(format!("stored T_{} differs from the rebuilt one", j + 1))));
        }
    }
    Ok(())
}

fn points_csv(points: impl Iterator<Item = ([Complex64; 3], Option<f64>)>, extra: Option<&str>) -> String {
    let mut header: Vec<String> = complex_header(3);
    header.extend(extra.map(String::from));
    let refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&refs);
    for (z, e) in points {
        let mut row: Vec<f64> = z.iter().flat_map(|c| [c.re, c.im]).collect();
        row.extend(e);
        csv.row(&row);
    }
    csv.into_string()
}

fn triple(p: &PolyPoint) -> [Complex64; 3] {
    [p.coord(0), p.coord(1), p.coord(2)]
}

fn require_tridisk(v: &AlgebraicVariety) -> Result<(), CliError> {
    if v.dim() != 3 {
        return Err(CliError::Input(format!("variety commands work in the tridisk, got d = {}", v.dim())));
    }
    Ok(())
}

pub fn variety_sample(input: &str, out: Option<&Path>, resolution: usize, seed: u64, json_out: bool) -> Result<(), CliError> {
    let v = load_variety(input)?;
    require_tridisk(&v)?;
    let pts = v.sample(resolution, seed)?;
    let text = if json_out {
        to_canonical(&json!({"resolution": resolution, "seed": seed, "points": Value::Array(pts.iter().map(point_json).collect())}))
    } else {
        points_csv(pts.iter().map(|p| (triple(p), None)), None)
    };
    emit(out, &text)?;
    Ok(())
}

pub fn variety_graph(input: &str, out: Option<&Path>, pair: (usize, usize), resolution: usize, json_out: bool) -> Result<(), CliError> {
    let v = load_variety(input)?;
    require_tridisk(&v)?;
    let ext = v.extract_graph(pair, resolution)?;
    let mut points = Vec::new();
    for (&(a, b), roots) in ext.domain_samples.iter().zip(&ext.values) {
        for (sheet, &r) in roots.iter().enumerate() {
            let mut z = [Complex64::new(0.0, 0.0); 3];
            z[pair.0] = a;
            z[pair.1] = b;
            z[ext.dependent] = r;
            points.push((z, sheet));
        }
    }
    let text = if json_out {
        to_canonical(&json!({
            "pair": [pair.0, pair.1],
            "dependent": ext.dependent,
            "resolution": resolution,
            "single_sheeted": ext.single_sheeted,
            "sup_modulus": ext.sup_modulus,
            "max_residual": ext.max_residual,
            "grid_points": ext.domain_samples.len(),
            "domain_points": ext.domain_mask().iter().filter(|&&m| m).count(),
            "points": Value::Array(points.iter().map(|(z, s)| json!({"z": cvec(z), "sheet": s})).collect()),
        }))
    } else {
        points_csv(points.iter().map(|(z, s)| (*z, Some(*s as f64))), Some("sheet"))
    };
    emit(out, &text)?;
    Ok(())
}

fn outcome_json(o: &DirectionOutcome) -> Value {
    match o {
        DirectionOutcome::Graph { sup_modulus } => json!({"type": "graph", "sup_modulus": sup_modulus}),
        DirectionOutcome::MultiSheeted { point, roots } => {
            json!({"type": "multi_sheeted", "point": cvec(&[point.0, point.1]), "roots": cvec(roots)})
        }
        DirectionOutcome::Escapes { point, roots } => json!({"type": "escapes", "point": cvec(&[point.0, point.1]), "roots": cvec(roots)}),
        DirectionOutcome::Degenerate => json!({"type": "degenerate"}),
        DirectionOutcome::Ambiguous { reason } => json!({"type": "ambiguous", "reason": reason}),
    }
}

pub fn variety_retract(input: &str, out: Option<&Path>, resolution: usize, margin: f64) -> Result<(), CliError> {
    let v = load_variety(input)?;
    require_tridisk(&v)?;
    let verdict = v.retract_check(resolution, margin)?;
    let direction = |d: &polyext::variety::DirectionReport| {
        json!({"pair": [d.pair.0, d.pair.1], "dependent": d.dependent, "outcome": outcome_json(&d.outcome)})
    };
    let doc = json!({
        "status": verdict.status.as_str(),
        "resolution": verdict.resolution,
        "margin": verdict.margin,
        "directions": Value::Array(verdict.directions.iter().map(direction).collect()),
        "witness": verdict.witness().map(direction),
    });
    emit(out, &to_canonical(&doc))?;
    if verdict.status == RetractStatus::Inconclusive {
        return Err(CliError::Undecided("retract test inconclusive at this resolution".into()));
    }
    Ok(())
}

pub fn variety_scan(input: &str, out: Option<&Path>, resolution: usize, seed: u64, tol: f64, limit: usize) -> Result<(), CliError> {
    let v = load_variety(input)?;
    require_tridisk(&v)?;
    let pts = v.sample(resolution, seed)?;
    let found = scan_balanced_pairs(&pts, tol);
    let pairs: Vec<Value> = found
        .iter()
        .take(limit)
        .map(|((i, j), rep)| {
            json!({
                "indices": [i, j],
                "n": rep.n,
                "permutation": rep.permutation,
                "rho_values": rep.rho_values,
                "l": point_json(&pts[*i]),
                "m": point_json(&pts[*j]),
            })
        })
        .collect();
    let doc = json!({"samples": pts.len(), "count": found.len(), "tol": tol, "pairs": pairs});
    emit(out, &to_canonical(&doc))?;
    Ok(())
}

pub fn exg1(m: f64, resolution: usize, dir: &Path, json_out: bool) -> Result<(), CliError> {
    let r = exg1_reproduce(m, resolution)?;
    let report = json!({
        "experiment": "exg1",
        "m": r.m,
        "search_resolution": r.search_resolution,
        "zeta": r.zeta,
        "xi": r.xi,
        "eq_ex_lhs": r.eq_ex_lhs,
        "eq_ex_rhs": r.eq_ex_rhs,
        "slack": r.slack(),
        "data": data_json(&r.data),
        "sa_norm": norm_json(&r.sa_norm),
        "circle_gap": r.circle_gap,
        "shells": shells_json(&r.shells),
        "verdict": r.verdict.as_str(),
    });
    let mut text = String::new();
    writeln!(text, "exg1: z3 = z1 + z2, m = {}", r.m).ok();
    writeln!(text, "witness pair: zeta = {:.6}, xi = {:.6} (grid {})", r.zeta, r.xi, r.search_resolution).ok();
    writeln!(text, "rho(psi(zeta), psi(xi)) = {:.9} < rho(zeta, xi) = {:.9}, slack {:.3e}", r.eq_ex_lhs, r.eq_ex_rhs, r.slack()).ok();
    writeln!(text, "schur-agler norm of the 3-point problem: {:.9} (lower {:.9})", r.sa_norm.value, r.sa_norm.lower).ok();
    if let Some(c) = r.sa_norm.caveat() {
        writeln!(text, "caveat: {c}").ok();
    }
    for s in &r.shells {
        writeln!(text, "shell k = {} (r = {}, eta = {:.2e}): omitted arc {:.4}", s.k, s.radius, s.eta, s.gap).ok();
    }
    writeln!(text, "verdict: {}", r.verdict.as_str()).ok();
    write_report(dir, &report, &text, json_out)
}

pub struct ExtVsVnRun {
    pub input: Option<PathBuf>,
    pub m: f64,
    pub scale: f64,
    pub resolution: usize,
    pub samples: usize,
    pub seed: u64,
}

pub fn ext_vs_vn(run: &ExtVsVnRun, dir: &Path, json_out: bool) -> Result<(), CliError> {
    let (variety, data) = match &run.input {
        Some(path) => {
            let file = ProblemFile::read(path)?;
            file.expect(&[Kind::Experiment])?;
            let p = file.payload::<ExperimentPayload>()?;
            (p.variety.variety()?, poly_data(&p.nodes, &p.targets)?)
        }
        None => {
            let w = exg1_witness(run.m, run.resolution)?;
            (polyext::variety::builtin_v0(), w.data.scaled(Complex64::new(run.scale, 0.0)))
        }
    };
    let vn = VnOptions { samples: run.samples, seed: run.seed, ..VnOptions::default() };
    let r = extension_vs_vn(&variety, &data, data.targets(), &vn)?;
    let mut text = String::new();
    writeln!(text, "ext-vs-vn: {} nodes in d = {}", data.len(), data.dim()).ok();
    writeln!(text, "schur-agler norm: {:.9} (lower {:.9})", r.sa_norm.value, r.sa_norm.lower).ok();
    let outcome = match &r.outcome {
        ExtensionOutcome::ExtensionConsistent(dec) => {
            let scaled = data.with_targets(data.targets().iter().map(|w| w / dec.t).collect())?;
            let residual = dec.reconstruction_residual(&scaled);
            writeln!(text, "outcome: extension_consistent (decomposition at t = {:.9}, residual {:.2e})", dec.t, residual).ok();
            json!({"type": "extension_consistent", "t": dec.t, "residual": residual, "min_eigenvalue": dec.min_eigenvalue(),
                   "gammas": Value::Array(dec.gammas.iter().map(cmat).collect())})
        }
        ExtensionOutcome::VonNeumannViolation(w) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("tuple.json"), to_canonical(&tuple_file(&w.tuple)))?;
            let res = w.tuple.residuals();
            writeln!(text, "outcome: von_neumann_violation").ok();
            writeln!(text, "||f(T)|| = {:.9}, squared lower bound {:.9}", w.f_norm, w.lower_bound_sq).ok();
            writeln!(
                text,
                "von Neumann check over {} polynomials: max ratio {:.9} ({})",
                w.report.samples, w.report.max_ratio, w.report.worst_function
            )
            .ok();
            writeln!(text, "tuple written to tuple.json").ok();
            json!({
                "type": "von_neumann_violation",
                "f_norm": w.f_norm,
                "lower_bound_sq": w.lower_bound_sq,
                "kernel_violation": w.kernel.violation,
                "residuals": {"commutation": res.commutation, "eigenvectors": res.eigenvectors, "gram": res.gram},
                "vn": {"max_ratio": w.report.max_ratio, "worst_function": w.report.worst_function,
                       "samples": w.report.samples, "grid_resolution": w.report.grid_resolution},
            })
        }
    };
    let report = json!({"experiment": "ext-vs-vn", "data": data_json(&data), "sa_norm": norm_json(&r.sa_norm), "outcome": outcome});
    write_report(dir, &report, &text, json_out)
}

fn default_circle_problem() -> Result<(AlgebraicVariety, MultiPoly, PolyPickData), CliError> {
    let h = MultiPoly::monomial(vec![1, 1], Complex64::new(1.0, 0.0));
    let v = AlgebraicVariety::graph_of(&h, 2)?;
    let nodes = vec![PolyPoint::origin(3), PolyPoint::from_reals(&[0.5, 0.3, 0.15])?];
    let data = PolyPickData::new(nodes, vec![Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)])?;
    Ok((v, MultiPoly::variable(3, 0), data))
}

pub fn circle_image(input: Option<&Path>, dir: &Path, json_out: bool) -> Result<(), CliError> {
    let (variety, phi, data) = match input {
        Some(path) => {
            let file = ProblemFile::read(path)?;
            file.expect(&[Kind::Experiment])?;
            let p = file.payload::<ExperimentPayload>()?;
            let terms: &[Term] = p.phi.as_deref().ok_or_else(|| CliError::Input("circle-image needs `phi`".into()))?;
            (p.variety.variety()?, poly_from_terms(3, terms)?, poly_data(&p.nodes, &p.targets)?)
        }
        None => default_circle_problem()?,
    };
    let r = circle_image_test(&variety, &phi, &data, &ClosureOptions::default())?;
    let report = json!({
        "experiment": "circle-image",
        "phi": terms_json(&phi),
        "data": data_json(&data),
        "sa_norm": norm_json(&r.sa_norm),
        "is_extremal_evidence": r.is_extremal_evidence,
        "omitted_arc": r.omitted_arc,
        "shells": shells_json(&r.shells),
        "implication": r.implication,
    });
    let mut text = String::new();
    writeln!(text, "circle-image: schur-agler norm {:.9}, extremal evidence {}", r.sa_norm.value, r.is_extremal_evidence).ok();
    for s in &r.shells {
        writeln!(text, "shell k = {}: omitted arc {:.4}", s.k, s.gap).ok();
    }
    writeln!(text, "{}", r.implication).ok();
    write_report(dir, &report, &text, json_out)
}

pub fn uniqueness_fit(abc: [Complex64; 3], samples: usize, seed: u64, dir: &Path, json_out: bool) -> Result<(), CliError> {
    let [a, b, g] = abc.map(DiskPoint::new);
    let fit = uniqueness_coincidence_check(a?, b?, g?, samples, seed)?;
    let v = fit.variety()?;
    let report = json!({
        "experiment": "uniqueness-fit",
        "alpha": cx(abc[0]),
        "beta": cx(abc[1]),
        "gamma": cx(abc[2]),
        "samples": samples,
        "seed": seed,
        "omega": cx(fit.omega),
        "a": cx(fit.a),
        "b": cx(fit.b),
        "residual": fit.residual,
        "holdout_residual": fit.holdout_residual,
        "generator": terms_json(&v.generators()[0]),
    });
    let mut text = String::new();
    writeln!(text, "uniqueness-fit: alpha = {}, beta = {}, gamma = {}", abc[0], abc[1], abc[2]).ok();
    writeln!(text, "z3 (1 + conj(B) z1 + conj(A) z2) = omega (A z1 + B z2 + z1 z2)").ok();
    writeln!(text, "omega = {:.9}, A = {:.9}, B = {:.9}", fit.omega, fit.a, fit.b).ok();
    writeln!(text, "residual {:.3e} on {} samples, {:.3e} on holdout", fit.residual, samples, fit.holdout_residual).ok();
    write_report(dir, &report, &text, json_out)
}
