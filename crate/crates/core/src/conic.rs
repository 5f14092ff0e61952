//! Weighted homothety actions on polydiscs, conic certificates, tangent
//! spaces at the origin and the linearity test.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::charvar::{cyclo_to_padic, CharError};
use crate::exact::cyclotomic::{kernel, rank};
use crate::exact::{Cyclo, Poly};
use crate::padic::Unramified;
use crate::tate::{check_alpha, vanish_certificate, AnalyticSeries, PolyDisc, RefusalReason, TateError, VanishCertificate, VanishOutcome};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConicError {
    #[error("equation {0} does not vanish at the point")]
    NotOnLocus(usize),
    #[error("the origin is not on the locus")]
    NotThroughOrigin,
    #[error("operation needs exact polynomial equations")]
    NotExact,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Tate(#[from] TateError),
    #[error(transparent)]
    Char(#[from] CharError),
}

/// `β·x = (β^{w_1} x_1, …, β^{w_d} x_d)` together with a fixed `α` of
/// infinite order.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedAction {
    weights: Vec<u32>,
    alpha: Unramified,
}

impl WeightedAction {
    pub fn new(weights: Vec<u32>, alpha: Unramified) -> Result<WeightedAction, ConicError> {
        if weights.is_empty() || weights.iter().any(|&w| w == 0) {
            return Err(TateError::BadWeights.into());
        }
        check_alpha(&alpha)?;
        Ok(WeightedAction { weights, alpha })
    }

    /// Weight 1 on the first `d1` coordinates, weight 2 on the next `d2`.
    pub fn split(d1: usize, d2: usize, alpha: Unramified) -> Result<WeightedAction, ConicError> {
        WeightedAction::new([vec![1; d1], vec![2; d2]].concat(), alpha)
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn alpha(&self) -> &Unramified {
        &self.alpha
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn act(&self, beta: &Unramified, x: &[Unramified]) -> Vec<Unramified> {
        x.iter()
            .zip(&self.weights)
            .map(|(xi, &w)| beta.pow(w as i64).expect("non-negative power").mul_ref(xi))
            .collect()
    }

    /// Coordinates grouped by weight.
    pub fn weight_classes(&self) -> BTreeMap<u32, Vec<usize>> {
        let mut out: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, &w) in self.weights.iter().enumerate() {
            out.entry(w).or_default().push(i);
        }
        out
    }

    /// Coordinates of the factor that `q` projects to: every weight other
    /// than 1.
    pub fn upper_coordinates(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.weights[i] != 1).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({"weights": self.weights, "alpha": self.alpha.to_json()})
    }
}

/// Common zero set of finitely many series on a disc, optionally with the
/// exact polynomials they came from.
#[derive(Clone, Debug)]
pub struct AnalyticLocus {
    disc: PolyDisc,
    equations: Vec<AnalyticSeries>,
    exact: Option<Vec<Poly>>,
}

impl AnalyticLocus {
    pub fn from_series(disc: PolyDisc, equations: Vec<AnalyticSeries>) -> AnalyticLocus {
        assert!(equations.iter().all(|f| *f.disc() == disc), "equations live on another disc");
        AnalyticLocus { disc, equations, exact: None }
    }

    /// Polynomial equations with rational or root-of-unity coefficients.
    pub fn from_polys(disc: PolyDisc, polys: Vec<Poly>, prec: i64) -> Result<AnalyticLocus, ConicError> {
        let mut equations = Vec::with_capacity(polys.len());
        for f in &polys {
            if f.nvars() != disc.dim() {
                return Err(ConicError::Dimension(format!("equation in {} variables on a {}-disc", f.nvars(), disc.dim())));
            }
            if !f.is_polynomial() {
                return Err(ConicError::Dimension("negative exponents are not allowed on a disc".into()));
            }
            let mut terms = Vec::new();
            for (e, c) in f.terms() {
                let j: Vec<u32> = e.iter().map(|&x| x as u32).collect();
                terms.push((j, cyclo_to_padic(c, disc.field(), prec)?));
            }
            equations.push(AnalyticSeries::new(disc.clone(), terms, prec));
        }
        Ok(AnalyticLocus { disc, equations, exact: Some(polys) })
    }

    pub fn disc(&self) -> &PolyDisc {
        &self.disc
    }

    pub fn dim(&self) -> usize {
        self.disc.dim()
    }

    pub fn equations(&self) -> &[AnalyticSeries] {
        &self.equations
    }

    pub fn exact(&self) -> Option<&[Poly]> {
        self.exact.as_deref()
    }

    /// Every equation vanishes at `x` at its precision.
    pub fn contains(&self, x: &[Unramified]) -> Result<bool, ConicError> {
        for f in &self.equations {
            if !f.eval(x)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConicCertificate {
    pub point: Vec<Unramified>,
    pub k: usize,
    pub per_equation: Vec<VanishCertificate>,
}

impl ConicCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "point": self.point.iter().map(Unramified::to_json).collect::<Vec<_>>(),
            "k": self.k,
            "equations": self.per_equation.iter().map(VanishCertificate::to_json).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConicRefusal {
    pub equation: usize,
    pub reason: RefusalReason,
    /// `α^n · x` for a refusal at a concrete orbit point.
    pub orbit_point: Option<Vec<Unramified>>,
}

impl ConicRefusal {
    pub fn to_json(&self) -> Value {
        let mut v = json!({"equation": self.equation, "reason": self.reason.to_json()});
        if let Some(pt) = &self.orbit_point {
            v["orbit_point"] = Value::Array(pt.iter().map(Unramified::to_json).collect());
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConicOutcome {
    Certified(ConicCertificate),
    Refused(ConicRefusal),
}

/// Checks that the whole orbit `{β·x : |β| ≤ 1}` stays on `locus`. With `k`
/// unset, the largest Strassmann count of the orbit restrictions is used.
pub fn conic_certificate(
    locus: &AnalyticLocus,
    action: &WeightedAction,
    x: &[Unramified],
    k: Option<usize>,
) -> Result<ConicOutcome, ConicError> {
    if action.dim() != locus.dim() || x.len() != locus.dim() {
        return Err(ConicError::Dimension("action, locus and point must share a dimension".into()));
    }
    for (i, f) in locus.equations.iter().enumerate() {
        if !f.eval(x)?.is_zero() {
            return Err(ConicError::NotOnLocus(i));
        }
    }
    let restrictions = locus
        .equations
        .iter()
        .map(|f| f.restrict_to_orbit(x, action.weights()))
        .collect::<Result<Vec<_>, _>>()?;
    let k = match k {
        Some(k) => k,
        None => restrictions
            .iter()
            .filter(|g| !g.is_indistinguishable_from_zero())
            .map(|g| g.strassmann_count())
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .max()
            .unwrap_or(0),
    };
    let mut per_equation = Vec::with_capacity(restrictions.len());
    for (i, g) in restrictions.iter().enumerate() {
        match vanish_certificate(g, action.alpha(), k)? {
            VanishOutcome::Certified(c) => per_equation.push(c),
            VanishOutcome::Refused(reason) => {
                let orbit_point = match &reason {
                    RefusalReason::NonzeroValue { point, .. } => Some(action.act(point, x)),
                    _ => None,
                };
                return Ok(ConicOutcome::Refused(ConicRefusal { equation: i, reason, orbit_point }));
            }
        }
    }
    Ok(ConicOutcome::Certified(ConicCertificate { point: x.to_vec(), k, per_equation }))
}

fn exact_equations(locus: &AnalyticLocus) -> Result<&[Poly], ConicError> {
    locus.exact().ok_or(ConicError::NotExact)
}

fn jacobian_at_zero(polys: &[Poly]) -> Result<Vec<Vec<Cyclo>>, ConicError> {
    if polys.iter().any(|f| !f.constant_term().is_zero()) {
        return Err(ConicError::NotThroughOrigin);
    }
    Ok(polys.iter().map(Poly::gradient_at_zero).collect())
}

/// Kernel of the Jacobian at the origin.
pub fn tangent_space_at_zero(locus: &AnalyticLocus) -> Result<Vec<Vec<Cyclo>>, ConicError> {
    let j = jacobian_at_zero(exact_equations(locus)?)?;
    Ok(kernel(&j, locus.dim()))
}

/// Derivative at `β = 0` of `β ↦ β·x`, computed from the orbit polynomials.
pub fn orbit_differential_at_zero(weights: &[u32], x: &[Cyclo]) -> Vec<Cyclo> {
    weights
        .iter()
        .zip(x)
        .map(|(&w, xi)| Poly::monomial(vec![w as i64], xi.clone()).gradient_at_zero()[0].clone())
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Conclusion {
    Holds,
    FailsAt(Vec<Cyclo>),
    Undetermined(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Holds,
    FailsAt(Vec<Cyclo>),
    Undetermined(String),
    HypothesesNotMet(String),
}

/// Every intermediate quantity of the linearity test.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearityReport {
    pub sigma_stable: Option<bool>,
    pub maps_into_s2: Option<bool>,
    pub smooth: bool,
    pub tangent_basis: Vec<Vec<Cyclo>>,
    pub eigen_dims: BTreeMap<u32, usize>,
    pub splitting_holds: bool,
    pub target_tangent_dim: usize,
    pub surjective: bool,
    pub samples_checked: usize,
    pub conclusion: Conclusion,
    pub verdict: Verdict,
}

fn point_json(pt: &[Cyclo]) -> Value {
    Value::Array(pt.iter().map(Cyclo::to_json).collect())
}

impl LinearityReport {
    pub fn to_json(&self) -> Value {
        let conclusion = |c: &Conclusion| match c {
            Conclusion::Holds => json!({"kind": "holds"}),
            Conclusion::FailsAt(pt) => json!({"kind": "fails", "point": point_json(pt)}),
            Conclusion::Undetermined(r) => json!({"kind": "undetermined", "reason": r}),
        };
        let verdict = match &self.verdict {
            Verdict::Holds => json!({"kind": "holds"}),
            Verdict::FailsAt(pt) => json!({"kind": "fails", "point": point_json(pt)}),
            Verdict::Undetermined(r) => json!({"kind": "undetermined", "reason": r}),
            Verdict::HypothesesNotMet(r) => json!({"kind": "hypotheses_not_met", "reason": r}),
        };
        json!({
            "sigma_stable": self.sigma_stable,
            "maps_into_s2": self.maps_into_s2,
            "smooth": self.smooth,
            "tangent_basis": self.tangent_basis.iter().map(|v| point_json(v)).collect::<Vec<_>>(),
            "eigen_dims": self.eigen_dims.iter().map(|(w, d)| (w.to_string(), json!(d))).collect::<serde_json::Map<_, _>>(),
            "splitting_holds": self.splitting_holds,
            "target_tangent_dim": self.target_tangent_dim,
            "surjective": self.surjective,
            "samples_checked": self.samples_checked,
            "conclusion": conclusion(&self.conclusion),
            "verdict": verdict,
        })
    }
}

/// `x_k = h_k(free variables)` for each equation, if the equations have that
/// shape: each solved variable occurs in a single equation, linearly, with a
/// constant coefficient.
fn graph_form(polys: &[Poly], n: usize) -> Option<Vec<(usize, Poly)>> {
    let mut used = vec![false; n];
    let mut out = Vec::new();
    let occurs = |f: &Poly, k: usize| f.terms().any(|(e, _)| e[k] != 0);
    for (i, f) in polys.iter().enumerate() {
        if !f.is_polynomial() {
            return None;
        }
        let pick = (0..n).find(|&k| {
            if used[k] {
                return false;
            }
            let mut e = vec![0i64; n];
            e[k] = 1;
            let c = f.coefficient(&e);
            !c.is_zero()
                && f.terms().filter(|(ex, _)| ex[k] != 0).count() == 1
                && polys.iter().enumerate().all(|(j, g)| j == i || !occurs(g, k))
        })?;
        used[pick] = true;
        let mut e = vec![0i64; n];
        e[pick] = 1;
        let c = f.coefficient(&e);
        let rest = f.sub(&Poly::monomial(e, c.clone()));
        let h = rest.scale(&c.inv().expect("nonzero").neg());
        out.push((pick, h));
    }
    Some(out)
}

fn substitution_images(graph: &[(usize, Poly)], n: usize) -> Vec<Poly> {
    let mut images: Vec<Poly> = (0..n).map(|j| Poly::var(n, j)).collect();
    for (k, h) in graph {
        images[*k] = h.clone();
    }
    images
}

fn rat(n: &BigInt) -> Cyclo {
    Cyclo::from_rational(BigRational::from_integer(n.clone()))
}

fn eval_images(images: &[Poly], free: &[Cyclo]) -> Vec<Cyclo> {
    images.iter().map(|h| h.eval(free).expect("polynomial images")).collect()
}

/// Decides whether a σ-stable locus through 0, smooth there and with
/// surjective tangent projection, is contained in its tangent space.
///
/// `s2` lives on the coordinates of weight other than 1, in order.
/// `extra_points` are caller-supplied exact points of the locus, used when
/// the equations are not in graph form.
pub fn linearity_check(
    locus: &AnalyticLocus,
    action: &WeightedAction,
    s2: &AnalyticLocus,
    samples: usize,
    seed: u64,
    extra_points: &[Vec<Cyclo>],
) -> Result<LinearityReport, ConicError> {
    let n = locus.dim();
    if action.dim() != n {
        return Err(ConicError::Dimension("action and locus differ in dimension".into()));
    }
    let upper = action.upper_coordinates();
    if s2.dim() != upper.len().max(1) && !(upper.is_empty() && s2.equations().is_empty()) {
        return Err(ConicError::Dimension("S2 must live on the weight-2 factor".into()));
    }
    let polys = exact_equations(locus)?;
    let s2_polys = exact_equations(s2)?;
    let jac = jacobian_at_zero(polys)?;
    let jac2 = jacobian_at_zero(s2_polys)?;

    let smooth = rank(&jac) == polys.len();
    let tangent_basis = kernel(&jac, n);

    let mut eigen_dims = BTreeMap::new();
    for (w, idx) in action.weight_classes() {
        let sub: Vec<Vec<Cyclo>> = jac.iter().map(|row| idx.iter().map(|&i| row[i].clone()).collect()).collect();
        eigen_dims.insert(w, kernel(&sub, idx.len()).len());
    }
    let splitting_holds = eigen_dims.values().sum::<usize>() == tangent_basis.len();

    let target_tangent_dim = kernel(&jac2, upper.len()).len();
    let projected: Vec<Vec<Cyclo>> =
        tangent_basis.iter().map(|v| upper.iter().map(|&i| v[i].clone()).collect()).collect();
    let surjective = rank(&projected) == target_tangent_dim;

    // sample points of the locus
    let graph = graph_form(polys, n);
    let mut points: Vec<Vec<Cyclo>> = Vec::new();
    let scale = BigInt::from(locus.disc().prime()).pow(locus.disc().radius_exp() as u32);
    if let Some(g) = &graph {
        let images = substitution_images(g, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let free: Vec<Cyclo> = (0..n).map(|_| rat(&(&scale * rng.gen_range(-50i64..=50)))).collect();
            points.push(eval_images(&images, &free));
        }
    }
    for pt in extra_points {
        if pt.len() != n {
            return Err(ConicError::Dimension("sample point has the wrong length".into()));
        }
        for (i, f) in polys.iter().enumerate() {
            if !f.eval(pt).map_err(|_| ConicError::NotOnLocus(i))?.is_zero() {
                return Err(ConicError::NotOnLocus(i));
            }
        }
        points.push(pt.clone());
    }

    let weights = action.weights();
    let sigma_stable = if polys.iter().all(|f| f.is_weighted_homogeneous(weights)) {
        Some(true)
    } else if points.is_empty() {
        None
    } else {
        // stable under an α of infinite order iff stable under every β, i.e.
        // each weighted-homogeneous component vanishes along the orbit
        Some(points.iter().all(|pt| {
            polys.iter().all(|f| f.weighted_components(weights).values().all(|c| c.eval(pt).map_or(false, |v| v.is_zero())))
        }))
    };
    let maps_into_s2 = if s2_polys.is_empty() {
        Some(true)
    } else if points.is_empty() {
        None
    } else {
        Some(points.iter().all(|pt| {
            let q: Vec<Cyclo> = upper.iter().map(|&i| pt[i].clone()).collect();
            s2_polys.iter().all(|f| f.eval(&q).map_or(false, |v| v.is_zero()))
        }))
    };

    let linear_forms: Vec<Poly> = jac
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .fold(Poly::zero(n), |acc, (j, c)| acc.add(&Poly::var(n, j).scale(c)))
        })
        .collect();
    let conclusion = match &graph {
        Some(g) => {
            let images = substitution_images(g, n);
            let residues: Vec<Poly> = linear_forms.iter().map(|l| l.substitute(&images)).collect();
            match residues.iter().find(|r| !r.is_zero()) {
                None => Conclusion::Holds,
                Some(r) => {
                    let free = nonvanishing_point(r, &scale);
                    Conclusion::FailsAt(eval_images(&images, &free))
                }
            }
        }
        None => {
            let bad = points
                .iter()
                .find(|pt| linear_forms.iter().any(|l| !l.eval(pt).map_or(true, |v| v.is_zero())));
            match bad {
                Some(pt) => Conclusion::FailsAt(pt.clone()),
                None => Conclusion::Undetermined(format!(
                    "equations are not in graph form; {} caller points agree",
                    points.len()
                )),
            }
        }
    };

    let verdict = if !smooth {
        Verdict::HypothesesNotMet(format!(
            "Jacobian at 0 has rank {} but there are {} equations",
            rank(&jac),
            polys.len()
        ))
    } else if sigma_stable == Some(false) {
        Verdict::HypothesesNotMet("locus is not stable under the action".into())
    } else if maps_into_s2 == Some(false) {
        Verdict::HypothesesNotMet("projection of the locus leaves S2".into())
    } else if !splitting_holds {
        Verdict::HypothesesNotMet("tangent space does not split into weight spaces".into())
    } else if !surjective {
        Verdict::HypothesesNotMet("tangent projection onto S2 is not surjective".into())
    } else {
        match &conclusion {
            Conclusion::Holds => Verdict::Holds,
            Conclusion::FailsAt(pt) => Verdict::FailsAt(pt.clone()),
            Conclusion::Undetermined(r) => Verdict::Undetermined(r.clone()),
        }
    };

    Ok(LinearityReport {
        sigma_stable,
        maps_into_s2,
        smooth,
        tangent_basis,
        eigen_dims,
        splitting_holds,
        target_tangent_dim,
        surjective,
        samples_checked: points.len(),
        conclusion,
        verdict,
    })
}

/// A point of the grid `scale·{1..=deg+1}^n` where the nonzero polynomial
/// `r` does not vanish; the grid is large enough that one exists.
fn nonvanishing_point(r: &Poly, scale: &BigInt) -> Vec<Cyclo> {
    let n = r.nvars();
    let side = r.total_degree().max(0) as usize + 1;
    let total = side.pow(n as u32);
    for idx in 0..total {
        let mut k = idx;
        let pt: Vec<Cyclo> = (0..n)
            .map(|_| {
                let c = (k % side) as i64 + 1;
                k /= side;
                rat(&(scale * c))
            })
            .collect();
        if !r.eval(&pt).expect("polynomial").is_zero() {
            return pt;
        }
    }
    unreachable!("a nonzero polynomial of degree < side cannot vanish on the whole grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::poly::int_poly;
    use crate::padic::{Padic, UnramifiedField};
    use proptest::prelude::*;

    fn int(p: u64, n: i64, prec: i64) -> Unramified {
        Padic::from_int(p, n, prec).into_inner()
    }

    fn setup(p: u64, d: usize, m: i64) -> PolyDisc {
        PolyDisc::new(&UnramifiedField::new(p, 1).unwrap(), d, m)
    }

    fn action(p: u64, weights: Vec<u32>) -> WeightedAction {
        WeightedAction::new(weights, int(p, 1 + p as i64, 30)).unwrap()
    }

    #[test]
    fn homogeneous_locus_is_conic() {
        let disc = setup(5, 2, 1);
        let s = AnalyticLocus::from_polys(disc, vec![int_poly(2, &[(1, &[0, 1]), (-1, &[2, 0])])], 30).unwrap();
        let a = action(5, vec![1, 2]);
        let x = [int(5, 10, 30), int(5, 100, 30)];
        assert!(matches!(conic_certificate(&s, &a, &x, None), Ok(ConicOutcome::Certified(_))));
        let origin = setup(5, 2, 1);
        let z = AnalyticLocus::from_polys(origin, vec![int_poly(2, &[(1, &[1, 0])]), int_poly(2, &[(1, &[0, 1])])], 30).unwrap();
        let zero = [Unramified::zero(a.alpha().field(), 30), Unramified::zero(a.alpha().field(), 30)];
        assert!(matches!(conic_certificate(&z, &a, &zero, Some(0)), Ok(ConicOutcome::Certified(_))));
    }

    #[test]
    fn diagonal_is_not_conic() {
        let disc = setup(5, 2, 1);
        let s = AnalyticLocus::from_polys(disc, vec![int_poly(2, &[(1, &[0, 1]), (-1, &[1, 0])])], 30).unwrap();
        let a = action(5, vec![1, 2]);
        let c = int(5, 15, 30);
        match conic_certificate(&s, &a, &[c.clone(), c.clone()], None).unwrap() {
            ConicOutcome::Refused(r) => {
                let pt = r.orbit_point.expect("concrete point");
                assert!(!s.contains(&pt).unwrap());
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            conic_certificate(&s, &a, &[c.clone(), int(5, 5, 30)], None),
            Err(ConicError::NotOnLocus(0))
        );
    }

    #[test]
    fn tangent_spaces() {
        let disc = setup(3, 2, 1);
        let parabola = AnalyticLocus::from_polys(disc.clone(), vec![int_poly(2, &[(1, &[0, 1]), (-1, &[2, 0])])], 20).unwrap();
        assert_eq!(tangent_space_at_zero(&parabola).unwrap(), vec![vec![Cyclo::one(), Cyclo::zero()]]);
        let all = AnalyticLocus::from_polys(disc.clone(), vec![], 20).unwrap();
        assert_eq!(tangent_space_at_zero(&all).unwrap().len(), 2);
        let pt = AnalyticLocus::from_polys(disc.clone(), vec![int_poly(2, &[(1, &[1, 0])]), int_poly(2, &[(1, &[0, 1])])], 20).unwrap();
        assert!(tangent_space_at_zero(&pt).unwrap().is_empty());
        let off = AnalyticLocus::from_polys(disc, vec![int_poly(2, &[(1, &[1, 0]), (-1, &[0, 0])])], 20).unwrap();
        assert_eq!(tangent_space_at_zero(&off), Err(ConicError::NotThroughOrigin));
    }

    #[test]
    fn parabola_is_not_linear() {
        let disc = setup(3, 2, 1);
        let s = AnalyticLocus::from_polys(disc, vec![int_poly(2, &[(1, &[0, 1]), (-1, &[2, 0])])], 20).unwrap();
        let s2 = AnalyticLocus::from_polys(setup(3, 1, 1), vec![], 20).unwrap();
        let r = linearity_check(&s, &action(3, vec![1, 2]), &s2, 5, 1, &[]).unwrap();
        assert_eq!(r.sigma_stable, Some(true));
        assert!(r.smooth);
        assert!(!r.surjective);
        match &r.conclusion {
            Conclusion::FailsAt(pt) => assert_eq!(pt[1], pt[0].mul(&pt[0])),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(r.verdict, Verdict::HypothesesNotMet(_)));
    }

    #[test]
    fn coordinate_loci_are_linear() {
        let s2 = AnalyticLocus::from_polys(setup(3, 1, 1), vec![], 20).unwrap();
        let s = AnalyticLocus::from_polys(setup(3, 2, 1), vec![int_poly(2, &[(1, &[1, 0])])], 20).unwrap();
        let r = linearity_check(&s, &action(3, vec![1, 2]), &s2, 5, 1, &[]).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        // the x2-axis inside (x1, x2, x3) with S2 its image {x3 = 0}
        let s = AnalyticLocus::from_polys(setup(5, 3, 1), vec![int_poly(3, &[(1, &[1, 0, 0])]), int_poly(3, &[(1, &[0, 0, 1])])], 20).unwrap();
        let s2 = AnalyticLocus::from_polys(setup(5, 2, 1), vec![int_poly(2, &[(1, &[0, 1])])], 20).unwrap();
        let r = linearity_check(&s, &action(5, vec![1, 2, 2]), &s2, 5, 1, &[]).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.eigen_dims.get(&2), Some(&1));
    }

    #[test]
    fn singular_locus_fails_hypotheses() {
        let s = AnalyticLocus::from_polys(setup(3, 2, 1), vec![int_poly(2, &[(1, &[2, 0]), (-1, &[0, 3])])], 20).unwrap();
        let s2 = AnalyticLocus::from_polys(setup(3, 1, 1), vec![], 20).unwrap();
        let r = linearity_check(&s, &action(3, vec![1, 2]), &s2, 3, 1, &[]).unwrap();
        assert!(!r.smooth);
        assert!(matches!(r.verdict, Verdict::HypothesesNotMet(_)));
    }

    #[test]
    fn orbit_differential_keeps_weight_one_part() {
        let x = vec![Cyclo::from_int(3), Cyclo::from_int(5), Cyclo::from_int(-2)];
        assert_eq!(
            orbit_differential_at_zero(&[1, 2, 1], &x),
            vec![Cyclo::from_int(3), Cyclo::zero(), Cyclo::from_int(-2)]
        );
    }

    proptest! {
        #[test]
        fn weighted_homogeneous_scaling(c1 in -5i64..5, c2 in -5i64..5, b in 1i64..1000, x1 in 1i64..100, x2 in 1i64..100) {
            // f = c1·x2 + c2·x1^2 has weighted degree 2 for weights (1,2)
            let f = int_poly(2, &[(c1, &[0, 1]), (c2, &[2, 0])]);
            let beta = Cyclo::from_int(b);
            let x = [Cyclo::from_int(x1), Cyclo::from_int(x2)];
            let bx = [beta.mul(&x[0]), beta.pow(2).mul(&x[1])];
            prop_assert_eq!(f.eval(&bx).unwrap(), beta.pow(2).mul(&f.eval(&x).unwrap()));
        }

        #[test]
        fn certified_orbits_stay_on_the_locus(c in 1i64..200, b in prop::collection::vec(0i64..10_000, 10)) {
            let disc = setup(7, 2, 1);
            let f = int_poly(2, &[(1, &[0, 1]), (-3, &[2, 0])]);
            let s = AnalyticLocus::from_polys(disc, vec![f], 30).unwrap();
            let a = action(7, vec![1, 2]);
            let x = [int(7, 7 * c, 30), int(7, 3 * 49 * c * c, 30)];
            let ConicOutcome::Certified(_) = conic_certificate(&s, &a, &x, None).unwrap() else {
                return Err(TestCaseError::fail("expected a certificate"));
            };
            for beta in b {
                let pt = a.act(&Padic::from_int_mod(7, &BigInt::from(beta), 30).into_inner(), &x);
                prop_assert!(s.equations()[0].eval(&pt).unwrap().is_zero());
            }
        }
    }
}
