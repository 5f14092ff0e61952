//! Batch front end: one JSON document in, one canonical JSON report out.
//!
//! Exit codes: 0 success, 1 refusal or property violation, 2 invalid input.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::charvar::TorsionCharacter;
use crate::conic::{conic_certificate, linearity_check, AnalyticLocus, ConicOutcome, Verdict, WeightedAction};
use crate::exact::{Cyclo, IntMatrix, Poly};
use crate::loci::{fitting_locus, scan_torsion, shape_check, shape_check_complex, FittingIdeal, ShapeVerdict, TwistedComplex};
use crate::padic::{self, Unramified, UnramifiedField};
use crate::tate::{newton_polygon, scalar_from_json, AnalyticSeries, PolyDisc, TateError};
use crate::torsion::{self, solve, BinomialSystem, CertificateStatus, PipelineAction, TorsionCoset, TorsionError, TorsionPointCertificate};

pub const COMMANDS: &[&str] = &[
    "teichmuller",
    "exp",
    "log",
    "strassmann",
    "newton",
    "conic-check",
    "linearity-check",
    "solve-binomial",
    "enumerate-torsion",
    "find-torsion",
    "verify",
    "cohomology",
    "jumping-scan",
    "fitting",
    "shape-check",
];

/// Run parameters that do not belong to the input document; fields of the
/// document with the same meaning take precedence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Params {
    pub precision: i64,
    pub order_bound: i64,
    pub seed: u64,
    pub jobs: usize,
}

impl Default for Params {
    fn default() -> Params {
        Params { precision: 20, order_bound: 6, seed: 0, jobs: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Option<Value>,
    pub code: i32,
    pub diagnostic: Option<String>,
}

impl Outcome {
    fn ok(report: Value) -> Outcome {
        Outcome { report: Some(report), code: 0, diagnostic: None }
    }

    fn refused(report: Value, why: impl Into<String>) -> Outcome {
        Outcome { report: Some(report), code: 1, diagnostic: Some(why.into()) }
    }

    fn invalid(why: impl Into<String>) -> Outcome {
        Outcome { report: None, code: 2, diagnostic: Some(why.into()) }
    }
}

struct Invalid(String);

impl<E: std::fmt::Display> From<E> for Invalid {
    fn from(e: E) -> Invalid {
        Invalid(e.to_string())
    }
}

type Res<T> = Result<T, Invalid>;

fn invalid<T>(msg: impl Into<String>) -> Res<T> {
    Err(Invalid(msg.into()))
}

struct Doc<'a> {
    v: &'a Value,
    params: &'a Params,
}

impl<'a> Doc<'a> {
    fn get(&self, key: &str) -> Res<&'a Value> {
        match self.v.get(key) {
            Some(x) => Ok(x),
            None => invalid(format!("missing field {key:?}")),
        }
    }

    fn u64(&self, key: &str) -> Res<u64> {
        self.get(key)?.as_u64().map_or_else(|| invalid(format!("{key} must be a non-negative integer")), Ok)
    }

    fn u64_or(&self, key: &str, default: u64) -> Res<u64> {
        if self.v.get(key).is_some() { self.u64(key) } else { Ok(default) }
    }

    fn precision(&self) -> Res<i64> {
        let n = match self.v.get("prec") {
            Some(x) => x.as_i64().map_or_else(|| invalid("prec must be an integer"), Ok)?,
            None => self.params.precision,
        };
        if n < 1 {
            return invalid("precision must be positive");
        }
        Ok(n)
    }

    fn order_bound(&self) -> Res<i64> {
        let m = match self.v.get("order_bound") {
            Some(x) => x.as_i64().map_or_else(|| invalid("order_bound must be an integer"), Ok)?,
            None => self.params.order_bound,
        };
        if m < 1 {
            return invalid("order bound must be positive");
        }
        Ok(m)
    }

    fn field(&self) -> Res<Arc<UnramifiedField>> {
        let p = self.u64("p")?;
        let f = self.u64_or("f", 1)?;
        Ok(UnramifiedField::new(p, f as u32)?)
    }

    fn int_list(&self, key: &str) -> Res<Vec<i64>> {
        int_list(self.get(key)?)
    }
}

fn int_list(v: &Value) -> Res<Vec<i64>> {
    v.as_array()
        .map_or_else(|| invalid("expected a list of integers"), Ok)?
        .iter()
        .map(|x| x.as_i64().map_or_else(|| invalid("expected an integer"), Ok))
        .collect()
}

fn int_matrix(v: &Value, n: usize) -> Res<IntMatrix> {
    let rows = v
        .as_array()
        .map_or_else(|| invalid("matrix must be a list of rows"), Ok)?
        .iter()
        .map(int_list)
        .collect::<Res<Vec<_>>>()?;
    if rows.len() != n {
        return invalid(format!("matrix must have {n} rows"));
    }
    Ok(IntMatrix::from_rows(&rows, n)?)
}

fn scalar_list(v: &Value, field: &Arc<UnramifiedField>, prec: i64) -> Res<Vec<Unramified>> {
    v.as_array()
        .map_or_else(|| invalid("expected a list of scalars"), Ok)?
        .iter()
        .map(|x| scalar_from_json(x, field, prec).map_err(Invalid::from))
        .collect()
}

fn polys(v: &Value, nvars: usize) -> Res<Vec<Poly>> {
    v.as_array()
        .map_or_else(|| invalid("expected a list of polynomials"), Ok)?
        .iter()
        .map(|p| Poly::from_json(p, nvars).map_err(Invalid::from))
        .collect()
}

/// Executes one job. Never panics on malformed input.
pub fn run(command: &str, input: &Value, params: &Params) -> Outcome {
    let doc = Doc { v: input, params };
    let res = match command {
        "teichmuller" => teichmuller(&doc),
        "exp" | "log" => exp_log(&doc, command == "exp"),
        "strassmann" => strassmann(&doc),
        "newton" => newton(&doc),
        "conic-check" => conic_check(&doc),
        "linearity-check" => linearity(&doc),
        "solve-binomial" => solve_binomial(&doc),
        "enumerate-torsion" => enumerate(&doc),
        "find-torsion" => find_torsion(&doc),
        "verify" => verify(&doc),
        "cohomology" => cohomology(&doc),
        "jumping-scan" => jumping_scan(&doc),
        "fitting" => fitting(&doc),
        "shape-check" => shape(&doc),
        _ => invalid(format!("unknown subcommand {command:?}")),
    };
    res.unwrap_or_else(|Invalid(msg)| Outcome::invalid(msg))
}

fn teichmuller(d: &Doc) -> Res<Outcome> {
    let field = d.field()?;
    let prec = d.precision()?;
    let digits: Vec<u64> = match d.get("xi")? {
        Value::Number(n) => vec![n.as_u64().map_or_else(|| invalid("xi must be a residue"), Ok)?],
        v => int_list(v)?.into_iter().map(|x| x.rem_euclid(field.prime() as i64) as u64).collect(),
    };
    let xi = field.residue(&digits);
    let w = padic::teichmuller(&xi, prec)?;
    Ok(Outcome::ok(json!({"value_digits": w.to_json()["unit_digits"]})))
}

fn exp_log(d: &Doc, is_exp: bool) -> Res<Outcome> {
    let field = d.field()?;
    let prec = d.precision()?;
    let x = scalar_from_json(d.get("x")?, &field, prec)?;
    let y = if is_exp { padic::exp(&x, prec)? } else { padic::log(&x, prec)? };
    Ok(Outcome::ok(json!({"value": y.to_json()})))
}

fn strassmann(d: &Doc) -> Res<Outcome> {
    let prec = d.precision()?;
    let g = AnalyticSeries::from_json(d.get("series")?, prec)?;
    if g.disc().dim() != 1 {
        return invalid("strassmann needs a one-variable series");
    }
    match g.strassmann_count() {
        Ok(n) => Ok(Outcome::ok(json!({
            "strassmann_count": n,
            "gauss_valuation": g.gauss_valuation(),
            "effective_tail": g.effective_tail(),
        }))),
        Err(e @ TateError::IndistinguishableFromZero) => {
            Ok(Outcome::refused(json!({"refused": e.to_string(), "effective_tail": g.effective_tail()}), e.to_string()))
        }
        Err(e) => invalid(e.to_string()),
    }
}

fn newton(d: &Doc) -> Res<Outcome> {
    let field = d.field()?;
    let prec = d.precision()?;
    let coeffs = scalar_list(d.get("coeffs")?, &field, prec)?;
    let m = match d.v.get("radius_exp") {
        Some(x) => x.as_i64().map_or_else(|| invalid("radius_exp must be an integer"), Ok)?,
        None => 0,
    };
    let poly = newton_polygon(&coeffs)?;
    let mut out = poly.to_json();
    out["roots_in_disc"] = json!(poly.roots_in_disc(m));
    out["radius_exp"] = json!(m);
    Ok(Outcome::ok(out))
}

fn locus_and_action(d: &Doc, key: &str) -> Res<(AnalyticLocus, WeightedAction, i64)> {
    let prec = d.precision()?;
    let field = d.field()?;
    let weights: Vec<u32> = d
        .int_list("weights")?
        .into_iter()
        .map(|w| if w >= 1 { Ok(w as u32) } else { invalid("weights must be positive") })
        .collect::<Res<_>>()?;
    let n = weights.len();
    if n == 0 {
        return invalid("at least one coordinate is needed");
    }
    let m = match d.v.get("radius_exp") {
        Some(x) => x.as_i64().filter(|&m| m >= 0).map_or_else(|| invalid("radius_exp must be a non-negative integer"), Ok)?,
        None => padic::exp_disc_min(field.prime()),
    };
    let disc = PolyDisc::new(&field, n, m);
    let locus = AnalyticLocus::from_polys(disc, polys(d.get(key)?, n)?, prec)?;
    let alpha = scalar_from_json(d.get("alpha")?, &field, prec)?;
    Ok((locus, WeightedAction::new(weights, alpha)?, prec))
}

fn conic_check(d: &Doc) -> Res<Outcome> {
    let (locus, action, prec) = locus_and_action(d, "equations")?;
    let x = scalar_list(d.get("point")?, locus.disc().field(), prec)?;
    let k = match d.v.get("k") {
        Some(v) => Some(v.as_u64().map_or_else(|| invalid("k must be a non-negative integer"), Ok)? as usize),
        None => None,
    };
    Ok(match conic_certificate(&locus, &action, &x, k)? {
        ConicOutcome::Certified(c) => Outcome::ok(json!({"certificate": c.to_json()})),
        ConicOutcome::Refused(r) => Outcome::refused(json!({"refusal": r.to_json()}), "orbit leaves the locus"),
    })
}

fn cyclo_points(v: Option<&Value>, n: usize) -> Res<Vec<Vec<Cyclo>>> {
    let Some(v) = v else { return Ok(Vec::new()) };
    v.as_array()
        .map_or_else(|| invalid("points must be a list"), Ok)?
        .iter()
        .map(|pt| {
            let coords = pt
                .as_array()
                .map_or_else(|| invalid("a point is a list of coordinates"), Ok)?
                .iter()
                .map(|c| Cyclo::from_json(c).map_err(Invalid::from))
                .collect::<Res<Vec<_>>>()?;
            if coords.len() != n { invalid("point has the wrong dimension") } else { Ok(coords) }
        })
        .collect()
}

fn linearity(d: &Doc) -> Res<Outcome> {
    let (locus, action, prec) = locus_and_action(d, "equations")?;
    let upper = action.upper_coordinates().len();
    if upper == 0 {
        return invalid("the action has no coordinates of weight other than 1");
    }
    let s2_disc = PolyDisc::new(locus.disc().field(), upper, locus.disc().radius_exp());
    let s2_polys = match d.v.get("s2") {
        Some(v) => polys(v, upper)?,
        None => Vec::new(),
    };
    let s2 = AnalyticLocus::from_polys(s2_disc, s2_polys, prec)?;
    let samples = d.u64_or("samples", 16)? as usize;
    let seed = d.u64_or("seed", d.params.seed)?;
    let extra = cyclo_points(d.v.get("points"), locus.dim())?;
    let r = linearity_check(&locus, &action, &s2, samples, seed, &extra)?;
    let report = r.to_json();
    Ok(match r.verdict {
        Verdict::FailsAt(_) => Outcome::refused(report, "locus is not contained in its tangent space"),
        _ => Outcome::ok(report),
    })
}

fn system(v: &Value) -> Res<BinomialSystem> {
    Ok(BinomialSystem::from_json(v)?)
}

fn system_field(d: &Doc) -> Res<BinomialSystem> {
    // the system may be the document itself or sit under "system"
    match d.v.get("system") {
        Some(s) => system(s),
        None => system(d.v),
    }
}

fn solve_binomial(d: &Doc) -> Res<Outcome> {
    let sys = system_field(d)?;
    let cosets = solve(&sys);
    Ok(Outcome::ok(json!({
        "dim": sys.dim(),
        "cosets": cosets.iter().map(TorsionCoset::to_json).collect::<Vec<_>>(),
    })))
}

fn point_json(t: &[crate::exact::Frac]) -> Value {
    json!(t.iter().map(|x| x.to_string()).collect::<Vec<_>>())
}

fn enumerate(d: &Doc) -> Res<Outcome> {
    let m = d.order_bound()?;
    let cosets = match d.v.get("coset") {
        Some(c) => {
            let ambient = d.u64("ambient")? as usize;
            vec![TorsionCoset::from_json(c, ambient)?]
        }
        None => solve(&system_field(d)?),
    };
    let mut out = Vec::new();
    for c in &cosets {
        let pts = c.enumerate_torsion(m);
        out.push(json!({
            "coset": c.to_json(),
            "count": pts.len(),
            "points": pts.iter().map(|t| point_json(t)).collect::<Vec<_>>(),
        }));
    }
    Ok(Outcome::ok(json!({"order_bound": m, "components": out})))
}

fn pipeline_action(d: &Doc, sys: &BinomialSystem) -> Res<(PipelineAction, u64, i64)> {
    let n = sys.dim();
    let prec = d.precision()?;
    let p = d.u64("p")?;
    let field = UnramifiedField::new(p, 1)?;
    let lattice = match d.v.get("lattice_action") {
        Some(v) => int_matrix(v, n)?,
        None => IntMatrix::identity(n),
    };
    let weights: Vec<u32> = match d.v.get("weights") {
        Some(v) => int_list(v)?
            .into_iter()
            .map(|w| if w >= 1 { Ok(w as u32) } else { invalid("weights must be positive") })
            .collect::<Res<_>>()?,
        None => vec![1; n],
    };
    let alpha = match d.v.get("alpha") {
        Some(v) => scalar_from_json(v, &field, prec)?,
        None => Unramified::from_int(&field, &(1 + num_bigint::BigInt::from(p).pow(padic::exp_disc_min(p) as u32)), prec),
    };
    Ok((PipelineAction { lattice, weighted: WeightedAction::new(weights, alpha)? }, p, prec))
}

fn find_torsion(d: &Doc) -> Res<Outcome> {
    let sys = system_field(d)?;
    let (action, p, prec) = pipeline_action(d, &sys)?;
    match torsion::torsion_certificate_pipeline(&sys, &action, p, prec) {
        Ok(certs) => {
            let report = json!({"certificates": certs.iter().map(TorsionPointCertificate::to_json).collect::<Vec<_>>()});
            if certs.iter().any(|c| matches!(c.status, CertificateStatus::Failed(_))) {
                Ok(Outcome::refused(report, "a component failed its certificate"))
            } else {
                Ok(Outcome::ok(report))
            }
        }
        Err(e @ TorsionError::HypothesisViolation(_)) => {
            Ok(Outcome::refused(json!({"refused": e.to_string()}), e.to_string()))
        }
        Err(e) => invalid(e.to_string()),
    }
}

/// Re-validates the report of an earlier job from its input.
fn verify(d: &Doc) -> Res<Outcome> {
    let command = d.get("command")?.as_str().map_or_else(|| invalid("command must be a string"), Ok)?;
    let input = d.get("input")?;
    let report = d.get("report")?;
    let inner = Doc { v: input, params: d.params };
    let checks: Vec<(String, bool)> = match command {
        "find-torsion" => {
            let sys = system_field(&inner)?;
            let (action, _, _) = pipeline_action(&inner, &sys)?;
            let certs = report.get("certificates").and_then(Value::as_array).map_or_else(|| invalid("report has no certificates"), Ok)?;
            let mut out = Vec::new();
            // the certificates must cover every point of order dividing M on the solution set
            for (i, c) in certs.iter().enumerate() {
                let cert = TorsionPointCertificate::from_json(c, sys.dim())?;
                for k in torsion::verify(&cert, &sys, &action) {
                    out.push((format!("certificate {i}: {}", k.name), k.passed));
                }
            }
            out.push(("certificate count".into(), certs.len() == solve(&sys).len()));
            out
        }
        "conic-check" => verify_conic(&inner, report)?,
        "solve-binomial" => {
            let sys = system_field(&inner)?;
            let cosets = report
                .get("cosets")
                .and_then(Value::as_array)
                .map_or_else(|| invalid("report has no cosets"), Ok)?
                .iter()
                .map(|c| TorsionCoset::from_json(c, sys.dim()).map_err(Invalid::from))
                .collect::<Res<Vec<_>>>()?;
            let m = inner.order_bound()?.max(12);
            let grid = crate::loci::torsion_grid(sys.dim(), m);
            vec![(
                format!("membership agrees with substitution on all {} points of order dividing {m}", grid.len()),
                grid.iter().all(|t| sys.satisfied_by(t) == (cosets.iter().filter(|c| c.contains(t)).count() == 1)),
            )]
        }
        _ => return invalid(format!("nothing to verify for {command:?}")),
    };
    let passed = checks.iter().all(|(_, ok)| *ok);
    let report = json!({
        "checks": checks.iter().map(|(n, ok)| json!({"check": n, "passed": ok})).collect::<Vec<_>>(),
        "passed": passed,
    });
    Ok(if passed { Outcome::ok(report) } else { Outcome::refused(report, "verification failed") })
}

/// Direct evaluation of every equation at `α^n·x`, plus a root count of each
/// orbit restriction from its Newton polygon.
fn verify_conic(d: &Doc, report: &Value) -> Res<Vec<(String, bool)>> {
    let (locus, action, prec) = locus_and_action(d, "equations")?;
    let cert = report.get("certificate").map_or_else(|| invalid("report holds no certificate"), Ok)?;
    let field = locus.disc().field().clone();
    let x = scalar_list(cert.get("point").map_or_else(|| invalid("certificate has no point"), Ok)?, &field, prec)?;
    let k = cert.get("k").and_then(Value::as_u64).map_or_else(|| invalid("certificate has no k"), Ok)? as usize;
    let mut checks = vec![("point inside the disc".to_string(), locus.disc().contains(&x))];
    let mut beta = Unramified::one(&field, prec);
    let mut on_orbit = true;
    for _ in 0..=k {
        let y = action.act(&beta, &x);
        on_orbit &= locus.equations().iter().all(|f| f.eval(&y).map(|v| v.is_zero()).unwrap_or(false));
        beta = beta.mul_ref(action.alpha());
    }
    checks.push((format!("equations vanish at {} orbit points", k + 1), on_orbit));
    let mut bounded = true;
    for f in locus.equations() {
        let g = f.restrict_to_orbit(&x, action.weights())?;
        if g.is_indistinguishable_from_zero() {
            continue;
        }
        let deg = g.terms().map(|(j, _)| j[0] as usize).max().unwrap_or(0);
        let mut coeffs = vec![Unramified::zero(&field, g.effective_tail()); deg + 1];
        for (j, c) in g.terms() {
            coeffs[j[0] as usize] = c.clone();
        }
        // roots in the closed unit disc, all visible terms counted
        bounded &= newton_polygon(&coeffs).map(|np| np.roots_in_disc(0) as usize <= k).unwrap_or(true);
    }
    checks.push(("zero count of each restriction at most k".into(), bounded));
    Ok(checks)
}

fn complex(d: &Doc) -> Res<TwistedComplex> {
    Ok(TwistedComplex::from_json(d.get("complex")?)?)
}

fn cohomology(d: &Doc) -> Res<Outcome> {
    let c = complex(d)?;
    let t = TorsionCharacter::from_json(d.get("character")?)?;
    if !t.torsion.is_empty() {
        return invalid("twisting uses free characters only");
    }
    let h = c.specialize(&t.free)?;
    Ok(Outcome::ok(json!({"character": point_json(&t.free), "h": h, "euler_characteristic": c.euler_characteristic()})))
}

fn degree_threshold(d: &Doc) -> Res<(usize, usize)> {
    Ok((d.u64("i")? as usize, d.u64_or("j", 0)? as usize))
}

fn jumping_scan(d: &Doc) -> Res<Outcome> {
    let c = complex(d)?;
    let (i, j) = degree_threshold(d)?;
    let s = scan_torsion(&c, i, j, d.order_bound()?, d.params.jobs)?;
    let report = s.to_json();
    Ok(if s.euler_consistent { Outcome::ok(report) } else { Outcome::refused(report, "Euler characteristic varies across characters") })
}

fn fitting(d: &Doc) -> Res<Outcome> {
    let c = complex(d)?;
    let (i, j) = degree_threshold(d)?;
    let f = fitting_locus(&c, i, j)?;
    Ok(match f {
        FittingIdeal::Generators(_) => Outcome::ok(f.to_json()),
        FittingIdeal::SizeLimitExceeded { .. } => Outcome::refused(f.to_json(), "size limit exceeded"),
    })
}

fn shape(d: &Doc) -> Res<Outcome> {
    let verdict = if d.v.get("complex").is_some() {
        let c = complex(d)?;
        let (i, j) = degree_threshold(d)?;
        shape_check_complex(&c, i, j, d.order_bound()?, d.params.jobs)?
    } else {
        let n = d.u64("vars")? as usize;
        shape_check(&polys(d.get("generators")?, n)?, n, None)
    };
    let report = verdict.to_json();
    Ok(match verdict {
        ShapeVerdict::Confirmed { scan_agrees: Some(false), .. } => Outcome::refused(report, "scan disagrees with the coset decomposition"),
        _ => Outcome::ok(report),
    })
}

/// The demo suite: each job is a subcommand and its input.
pub const DEMO: &[(&str, &str, &str)] = &[
    ("teichmuller-5", "teichmuller", include_str!("../demo/teichmuller.json")),
    ("teichmuller-9", "teichmuller", include_str!("../demo/teichmuller_f2.json")),
    ("exp-5", "exp", include_str!("../demo/exp.json")),
    ("log-5", "log", include_str!("../demo/log.json")),
    ("strassmann", "strassmann", include_str!("../demo/strassmann.json")),
    ("newton", "newton", include_str!("../demo/newton.json")),
    ("conic-accept", "conic-check", include_str!("../demo/conic_accept.json")),
    ("conic-refuse", "conic-check", include_str!("../demo/conic_refuse.json")),
    ("linearity-parabola", "linearity-check", include_str!("../demo/linearity.json")),
    ("solve-binomial", "solve-binomial", include_str!("../demo/solve.json")),
    ("enumerate-torsion", "enumerate-torsion", include_str!("../demo/enumerate.json")),
    ("find-torsion", "find-torsion", include_str!("../demo/find_torsion.json")),
    ("cohomology-torus", "cohomology", include_str!("../demo/cohomology.json")),
    ("scan-torus", "jumping-scan", include_str!("../demo/scan_torus.json")),
    ("scan-wedge", "jumping-scan", include_str!("../demo/scan_wedge.json")),
    ("fitting-torus", "fitting", include_str!("../demo/fitting.json")),
    ("shape-torus", "shape-check", include_str!("../demo/shape_torus.json")),
    ("shape-plane", "shape-check", include_str!("../demo/shape_plane.json")),
];

/// Runs every demo job, then re-validates the certificate-producing ones.
pub fn run_demo(params: &Params) -> Value {
    let mut out = serde_json::Map::new();
    for (name, command, text) in DEMO {
        let input: Value = serde_json::from_str(text).expect("demo inputs are valid JSON");
        let o = run(command, &input, params);
        if matches!(*command, "find-torsion" | "conic-check" | "solve-binomial") && o.code == 0 {
            let job = json!({"command": command, "input": input, "report": o.report.clone().unwrap_or(Value::Null)});
            let v = run("verify", &job, params);
            out.insert(format!("{name}/verify"), json!({"exit_code": v.code, "report": v.report}));
        }
        out.insert(name.to_string(), json!({"exit_code": o.code, "report": o.report}));
    }
    Value::Object(out)
}

/// Sorted-key JSON with a trailing newline.
pub fn canonical(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}
