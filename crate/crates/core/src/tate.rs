//! Truncated power series on closed polydiscs `|x_i − y_i| ≤ p^{−m}` with a
//! tail bound, Strassmann counts, Newton polygons and vanishing
//! certificates along weighted orbits.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::One;
use serde_json::{json, Value};

use crate::padic::{exp_disc_min, PadicError, Unramified, UnramifiedField};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TateError {
    #[error("point outside the disc")]
    OutsideDisc,
    #[error("series indistinguishable from zero at this precision")]
    IndistinguishableFromZero,
    #[error("zero polynomial has no Newton polygon")]
    ZeroPolynomial,
    #[error("alpha fails the non-root-of-unity criterion: {0}")]
    AlphaCriterion(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("orbit restriction needs a disc centred at 0")]
    NotCentred,
    #[error("weights must be positive")]
    BadWeights,
    #[error("invalid series: {0}")]
    Parse(String),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// Closed polydisc of radius `p^{−m}` around `center`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyDisc {
    field: Arc<UnramifiedField>,
    center: Vec<Unramified>,
    radius_exp: i64,
}

impl PolyDisc {
    /// Disc centred at the origin.
    pub fn new(field: &Arc<UnramifiedField>, dim: usize, radius_exp: i64) -> PolyDisc {
        assert!(dim >= 1, "disc dimension must be positive");
        assert!(radius_exp >= 0, "radius exponent must be non-negative");
        PolyDisc { field: field.clone(), center: vec![Unramified::zero(field, i64::MAX / 4); dim], radius_exp }
    }

    pub fn with_center(field: &Arc<UnramifiedField>, center: Vec<Unramified>, radius_exp: i64) -> PolyDisc {
        assert!(!center.is_empty(), "disc dimension must be positive");
        assert!(radius_exp >= 0, "radius exponent must be non-negative");
        PolyDisc { field: field.clone(), center, radius_exp }
    }

    pub fn field(&self) -> &Arc<UnramifiedField> {
        &self.field
    }

    pub fn prime(&self) -> u64 {
        self.field.prime()
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn radius_exp(&self) -> i64 {
        self.radius_exp
    }

    pub fn center(&self) -> &[Unramified] {
        &self.center
    }

    pub fn is_centred_at_zero(&self) -> bool {
        self.center.iter().all(Unramified::is_zero)
    }

    /// Radius strictly below `p^{−1/(p−1)}`, so that exp and log apply.
    pub fn is_exp_disc(&self) -> bool {
        self.radius_exp >= exp_disc_min(self.prime())
    }

    pub fn contains(&self, x: &[Unramified]) -> bool {
        x.len() == self.dim()
            && x.iter().zip(&self.center).all(|(a, c)| a.sub_ref(c).valuation_bound() >= self.radius_exp)
    }

    fn to_json(&self) -> Value {
        let mut v = json!({
            "p": self.prime(),
            "f": self.field.degree(),
            "dim": self.dim(),
            "radius_exp": self.radius_exp,
        });
        if !self.is_centred_at_zero() {
            v["center"] = Value::Array(self.center.iter().map(Unramified::to_json).collect());
        }
        v
    }

    fn from_json(v: &Value) -> Result<PolyDisc, TateError> {
        let bad = |m: &str| TateError::Parse(m.to_string());
        let p = v.get("p").and_then(Value::as_u64).ok_or_else(|| bad("disc needs p"))?;
        let f = v.get("f").and_then(Value::as_u64).unwrap_or(1) as u32;
        let field = UnramifiedField::new(p, f)?;
        let m = v.get("radius_exp").and_then(Value::as_i64).unwrap_or(0);
        if m < 0 {
            return Err(bad("radius_exp must be non-negative"));
        }
        match v.get("center") {
            Some(Value::Array(c)) => {
                let center = c.iter().map(Unramified::from_json).collect::<Result<Vec<_>, _>>()?;
                if center.is_empty() {
                    return Err(bad("empty center"));
                }
                Ok(PolyDisc::with_center(&field, center, m))
            }
            _ => {
                let dim = v.get("dim").and_then(Value::as_u64).filter(|&d| d >= 1).ok_or_else(|| bad("disc needs dim"))?;
                Ok(PolyDisc::new(&field, dim as usize, m))
            }
        }
    }
}

/// Finite part of a power series in `x − center` plus a tail exponent: every
/// omitted term satisfies `|a_J| ρ^{|J|} ≤ p^{−tail}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticSeries {
    disc: PolyDisc,
    terms: BTreeMap<Vec<u32>, Unramified>,
    tail: i64,
}

fn degree(j: &[u32]) -> i64 {
    j.iter().map(|&x| x as i64).sum()
}

impl AnalyticSeries {
    pub fn new(
        disc: PolyDisc,
        terms: impl IntoIterator<Item = (Vec<u32>, Unramified)>,
        tail: i64,
    ) -> AnalyticSeries {
        let mut s = AnalyticSeries { disc, terms: BTreeMap::new(), tail };
        for (j, c) in terms {
            assert_eq!(j.len(), s.disc.dim(), "exponent length mismatch");
            s.add_term(j, c);
        }
        s
    }

    /// Polynomial with integer coefficients, known exactly up to `prec`.
    pub fn from_ints(disc: PolyDisc, terms: &[(i64, &[u32])], prec: i64) -> AnalyticSeries {
        let field = disc.field.clone();
        AnalyticSeries::new(
            disc,
            terms.iter().map(|&(c, j)| (j.to_vec(), Unramified::from_int(&field, &BigInt::from(c), prec))),
            prec,
        )
    }

    fn add_term(&mut self, j: Vec<u32>, c: Unramified) {
        let c = match self.terms.remove(&j) {
            Some(old) => old.add_ref(&c),
            None => c,
        };
        self.terms.insert(j, c);
    }

    pub fn disc(&self) -> &PolyDisc {
        &self.disc
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Unramified)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, j: &[u32]) -> Option<&Unramified> {
        self.terms.get(j)
    }

    pub fn tail(&self) -> i64 {
        self.tail
    }

    /// Tail exponent after folding in the precision of the stored
    /// coefficients.
    pub fn effective_tail(&self) -> i64 {
        let m = self.disc.radius_exp;
        self.terms
            .iter()
            .map(|(j, c)| c.abs_precision().saturating_add(m * degree(j)))
            .fold(self.tail, i64::min)
    }

    /// `v(a_J) + m|J|` for the terms that are visible above the tail.
    fn orders(&self) -> impl Iterator<Item = (&Vec<u32>, i64)> {
        let m = self.disc.radius_exp;
        let t = self.effective_tail();
        self.terms
            .iter()
            .filter_map(move |(j, c)| c.valuation().map(|v| (j, v + m * degree(j))))
            .filter(move |&(_, o)| o < t)
    }

    /// `−log_p` of the Gauss norm, if it is visible above the tail.
    pub fn gauss_valuation(&self) -> Option<i64> {
        self.orders().map(|(_, o)| o).min()
    }

    pub fn is_indistinguishable_from_zero(&self) -> bool {
        self.gauss_valuation().is_none()
    }

    fn check_same_disc(&self, other: &AnalyticSeries) {
        assert!(self.disc == other.disc, "series on different discs");
    }

    pub fn add(&self, other: &AnalyticSeries) -> AnalyticSeries {
        self.check_same_disc(other);
        let mut out = self.clone();
        out.tail = self.tail.min(other.tail);
        for (j, c) in &other.terms {
            out.add_term(j.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> AnalyticSeries {
        AnalyticSeries {
            disc: self.disc.clone(),
            terms: self.terms.iter().map(|(j, c)| (j.clone(), c.neg_ref())).collect(),
            tail: self.tail,
        }
    }

    pub fn sub(&self, other: &AnalyticSeries) -> AnalyticSeries {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &AnalyticSeries) -> AnalyticSeries {
        self.check_same_disc(other);
        // |f| ≤ p^{−g_f}; the unknown parts contribute at most the cross terms
        let gf = self.gauss_valuation().unwrap_or(self.effective_tail());
        let gg = other.gauss_valuation().unwrap_or(other.effective_tail());
        let tail = (self.tail + gg).min(other.tail + gf).min(self.tail + other.tail);
        let mut out = AnalyticSeries { disc: self.disc.clone(), terms: BTreeMap::new(), tail };
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let j = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(j, ca.mul_ref(cb));
            }
        }
        out
    }

    /// Value at `x`, truncated to the precision the tail bound guarantees.
    pub fn eval(&self, x: &[Unramified]) -> Result<Unramified, TateError> {
        if x.len() != self.disc.dim() {
            return Err(TateError::Dimension(format!("point has {} coordinates, disc has {}", x.len(), self.disc.dim())));
        }
        if !self.disc.contains(x) {
            return Err(TateError::OutsideDisc);
        }
        let t = self.effective_tail();
        let shifted: Vec<Unramified> = x.iter().zip(&self.disc.center).map(|(a, c)| a.sub_ref(c)).collect();
        let field = self.disc.field.clone();
        let mut acc = Unramified::zero(&field, t);
        for (j, c) in &self.terms {
            let mut term = c.clone();
            for (xi, &k) in shifted.iter().zip(j) {
                if k > 0 {
                    term = term.mul_ref(&xi.pow(k as i64)?);
                }
            }
            acc = acc.add_ref(&term);
        }
        Ok(acc.truncate(t))
    }

    /// `g(β) = f(β^{w_1} x_1, …, β^{w_d} x_d)` as a series on the closed unit
    /// disc in β.
    pub fn restrict_to_orbit(&self, x: &[Unramified], weights: &[u32]) -> Result<AnalyticSeries, TateError> {
        if !self.disc.is_centred_at_zero() {
            return Err(TateError::NotCentred);
        }
        if weights.len() != self.disc.dim() || x.len() != self.disc.dim() {
            return Err(TateError::Dimension("weights and point must match the disc".into()));
        }
        if weights.iter().any(|&w| w == 0) {
            return Err(TateError::BadWeights);
        }
        if !self.disc.contains(x) {
            return Err(TateError::OutsideDisc);
        }
        let field = self.disc.field.clone();
        let line = PolyDisc::new(&field, 1, 0);
        let mut out = AnalyticSeries { disc: line, terms: BTreeMap::new(), tail: self.effective_tail() };
        for (j, c) in &self.terms {
            let k: u32 = j.iter().zip(weights).map(|(a, w)| a * w).sum();
            let mut term = c.clone();
            for (xi, &e) in x.iter().zip(j) {
                if e > 0 {
                    term = term.mul_ref(&xi.pow(e as i64)?);
                }
            }
            out.add_term(vec![k], term);
        }
        Ok(out)
    }

    /// Univariate only: the largest index attaining the Gauss norm.
    pub fn strassmann_count(&self) -> Result<usize, TateError> {
        if self.disc.dim() != 1 {
            return Err(TateError::Dimension("Strassmann count needs a univariate series".into()));
        }
        let min = self.gauss_valuation().ok_or(TateError::IndistinguishableFromZero)?;
        let n = self
            .orders()
            .filter(|&(_, o)| o == min)
            .map(|(j, _)| j[0] as usize)
            .max()
            .expect("minimum is attained");
        Ok(n)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "disc": self.disc.to_json(),
            "terms": self.terms.iter().map(|(j, c)| json!({"exp": j, "coeff": c.to_json()})).collect::<Vec<_>>(),
            "tail_exp": self.tail,
        })
    }

    /// Parses a series; `default_prec` applies to integer/rational coefficient
    /// shorthands and to a missing `tail_exp`.
    pub fn from_json(v: &Value, default_prec: i64) -> Result<AnalyticSeries, TateError> {
        let bad = |m: &str| TateError::Parse(m.to_string());
        let disc = PolyDisc::from_json(v.get("disc").ok_or_else(|| bad("series needs a disc"))?)?;
        let tail = v.get("tail_exp").and_then(Value::as_i64).unwrap_or(default_prec);
        let arr = v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("series needs terms"))?;
        let mut terms = Vec::new();
        for t in arr {
            let exp: Vec<u32> = t
                .get("exp")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("term needs exp"))?
                .iter()
                .map(|e| e.as_u64().map(|x| x as u32).ok_or_else(|| bad("exponents must be non-negative integers")))
                .collect::<Result<_, _>>()?;
            if exp.len() != disc.dim() {
                return Err(bad("exponent length differs from disc dimension"));
            }
            let c = t.get("coeff").ok_or_else(|| bad("term needs coeff"))?;
            terms.push((exp, scalar_from_json(c, disc.field(), default_prec)?));
        }
        Ok(AnalyticSeries::new(disc, terms, tail))
    }
}

/// Scalar from either the full serialisation or an integer / "a/b" shorthand.
pub fn scalar_from_json(v: &Value, field: &Arc<UnramifiedField>, prec: i64) -> Result<Unramified, TateError> {
    let x = match v {
        Value::Object(_) => Unramified::from_json(v)?,
        Value::Number(n) => {
            let n = n.as_i64().ok_or_else(|| TateError::Parse(format!("bad integer {n}")))?;
            Unramified::from_int(field, &BigInt::from(n), prec)
        }
        Value::String(s) => {
            let r = crate::exact::cyclotomic::parse_rational(s).map_err(|e| TateError::Parse(e.to_string()))?;
            Unramified::from_rational(field, &r, prec)
        }
        _ => return Err(TateError::Parse(format!("bad scalar {v}"))),
    };
    if x.prime() != field.prime() {
        return Err(TateError::Parse("scalar prime differs from disc prime".into()));
    }
    if x.degree() == field.degree() {
        Ok(x)
    } else if x.degree() == 1 {
        Ok(x.embed(field))
    } else {
        Err(TateError::Parse("scalar field differs from disc field".into()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonSegment {
    pub slope: Ratio<i64>,
    pub length: u64,
}

/// Lower convex hull of `(i, v(a_i))` after the zero root at the origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub zero_order: u64,
    pub segments: Vec<NewtonSegment>,
}

impl NewtonPolygon {
    /// Roots (with multiplicity, in an algebraic closure) of valuation at
    /// least `m`, counting the root 0.
    pub fn roots_in_disc(&self, m: i64) -> u64 {
        self.zero_order
            + self
                .segments
                .iter()
                .filter(|s| s.slope <= Ratio::from_integer(-m))
                .map(|s| s.length)
                .sum::<u64>()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "zero_order": self.zero_order,
            "segments": self.segments.iter().map(|s| json!({
                "slope": if *s.slope.denom() == 1 { s.slope.numer().to_string() } else { format!("{}/{}", s.slope.numer(), s.slope.denom()) },
                "length": s.length,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Newton polygon of `Σ a_i T^i`; coefficients that are zero to their
/// precision are treated as absent.
pub fn newton_polygon(coeffs: &[Unramified]) -> Result<NewtonPolygon, TateError> {
    let pts: Vec<(i64, i64)> =
        coeffs.iter().enumerate().filter_map(|(i, c)| c.valuation().map(|v| (i as i64, v))).collect();
    if pts.is_empty() {
        return Err(TateError::ZeroPolynomial);
    }
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &q in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b when it lies on or above the chord a–q
            let cross = (b.0 - a.0) as i128 * (q.1 - a.1) as i128 - (b.1 - a.1) as i128 * (q.0 - a.0) as i128;
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(q);
    }
    let segments = hull
        .windows(2)
        .map(|w| NewtonSegment { slope: Ratio::new(w[1].1 - w[0].1, w[1].0 - w[0].0), length: (w[1].0 - w[0].0) as u64 })
        .collect();
    Ok(NewtonPolygon { zero_order: pts[0].0 as u64, segments })
}

/// Evidence that a univariate series vanishes identically on the closed
/// unit disc: it vanishes at `α^n` for `n = 0..=k` and its finite part is
/// zero at precision `precision`.
#[derive(Clone, Debug, PartialEq)]
pub struct VanishCertificate {
    pub k: usize,
    pub alpha: Unramified,
    pub precision: i64,
    pub values: Vec<Unramified>,
}

impl VanishCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "k": self.k,
            "alpha": self.alpha.to_json(),
            "precision": self.precision,
            "values": self.values.iter().map(Unramified::to_json).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RefusalReason {
    /// `g(α^n) ≠ 0`.
    NonzeroValue { n: usize, point: Unramified, value: Unramified },
    /// All sampled values vanish but the series has a visible term and at
    /// most `k` zeros: the data is inconsistent at this precision.
    InsufficientPrecision { strassmann: usize },
    /// All sampled values vanish but `k` is below the Strassmann bound.
    BoundTooSmall { strassmann: usize },
}

impl RefusalReason {
    pub fn to_json(&self) -> Value {
        match self {
            RefusalReason::NonzeroValue { n, point, value } => json!({
                "kind": "nonzero_value", "n": n, "point": point.to_json(), "value": value.to_json(),
            }),
            RefusalReason::InsufficientPrecision { strassmann } => {
                json!({"kind": "insufficient_precision", "strassmann": strassmann})
            }
            RefusalReason::BoundTooSmall { strassmann } => json!({"kind": "k_below_strassmann_bound", "strassmann": strassmann}),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum VanishOutcome {
    Certified(VanishCertificate),
    Refused(RefusalReason),
}

/// Unit `α ≡ 1 mod p` (mod 4 for p = 2) with `α ≠ 1` at its precision; such an
/// α has infinite order.
pub fn check_alpha(alpha: &Unramified) -> Result<(), TateError> {
    if !alpha.is_unit() {
        return Err(TateError::AlphaCriterion("alpha is not a unit".into()));
    }
    let d = alpha.sub_ref(&Unramified::one(alpha.field(), alpha.rel_precision()));
    if d.is_zero() {
        return Err(TateError::AlphaCriterion("alpha equals 1 at working precision".into()));
    }
    if d.valuation_bound() < exp_disc_min(alpha.prime()) {
        return Err(TateError::AlphaCriterion(format!(
            "alpha must be congruent to 1 mod {}",
            alpha.prime().pow(exp_disc_min(alpha.prime()) as u32)
        )));
    }
    Ok(())
}

pub fn vanish_certificate(g: &AnalyticSeries, alpha: &Unramified, k: usize) -> Result<VanishOutcome, TateError> {
    check_alpha(alpha)?;
    if g.disc().dim() != 1 {
        return Err(TateError::Dimension("vanishing certificates need a univariate series".into()));
    }
    let one = Unramified::one(alpha.field(), alpha.rel_precision());
    let mut point = one;
    let mut values = Vec::with_capacity(k + 1);
    for n in 0..=k {
        if n > 0 {
            point = point.mul_ref(alpha);
        }
        let value = g.eval(std::slice::from_ref(&point))?;
        if !value.is_zero() {
            return Ok(VanishOutcome::Refused(RefusalReason::NonzeroValue { n, point, value }));
        }
        values.push(value);
    }
    if g.is_indistinguishable_from_zero() {
        return Ok(VanishOutcome::Certified(VanishCertificate {
            k,
            alpha: alpha.clone(),
            precision: g.effective_tail(),
            values,
        }));
    }
    let strassmann = g.strassmann_count()?;
    if strassmann <= k {
        Ok(VanishOutcome::Refused(RefusalReason::InsufficientPrecision { strassmann }))
    } else {
        Ok(VanishOutcome::Refused(RefusalReason::BoundTooSmall { strassmann }))
    }
}

/// The constant series 1 on `disc`.
pub fn one_series(disc: &PolyDisc, prec: i64) -> AnalyticSeries {
    let f = disc.field().clone();
    AnalyticSeries::new(disc.clone(), [(vec![0; disc.dim()], Unramified::from_int(&f, &BigInt::one(), prec))], prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Padic;
    use proptest::prelude::*;

    fn qp(p: u64) -> Arc<UnramifiedField> {
        UnramifiedField::new(p, 1).unwrap()
    }

    fn int(p: u64, n: i64, prec: i64) -> Unramified {
        Padic::from_int(p, n, prec).into_inner()
    }

    #[test]
    fn constant_and_quadratic_evaluation() {
        let k = qp(5);
        let disc = PolyDisc::new(&k, 1, 1);
        let c = AnalyticSeries::from_ints(disc.clone(), &[(3, &[0])], 20);
        assert!(c.eval(&[int(5, 25, 20)]).unwrap().congruent(&int(5, 3, 20)));
        let f = AnalyticSeries::from_ints(disc, &[(1, &[2]), (-5, &[0])], 20);
        let y = f.eval(&[int(5, 5, 20)]).unwrap();
        assert!(y.congruent(&int(5, 20, 20)));
        assert_eq!(y.valuation(), Some(1));
        assert_eq!(f.eval(&[int(5, 1, 20)]), Err(TateError::OutsideDisc));
    }

    #[test]
    fn orbit_restrictions() {
        let k = qp(3);
        let disc = PolyDisc::new(&k, 2, 1);
        let x = [int(3, 3, 20), int(3, 3, 20)];
        // x2 − x1 along weights (1,2) at (c, c): c β^2 − c β
        let f = AnalyticSeries::from_ints(disc.clone(), &[(1, &[0, 1]), (-1, &[1, 0])], 20);
        let g = f.restrict_to_orbit(&x, &[1, 2]).unwrap();
        assert!(g.coefficient(&[2]).unwrap().congruent(&int(3, 3, 20)));
        assert!(g.coefficient(&[1]).unwrap().congruent(&int(3, -3, 20)));
        // x2 − x1^2 is weighted homogeneous of degree 2
        let h = AnalyticSeries::from_ints(disc, &[(1, &[0, 1]), (-1, &[2, 0])], 20);
        let g = h.restrict_to_orbit(&x, &[1, 2]).unwrap();
        assert_eq!(g.terms().count(), 1);
        assert!(g.coefficient(&[2]).unwrap().congruent(&int(3, 3 - 9, 20)));
    }

    #[test]
    fn strassmann_examples() {
        let k = qp(5);
        let line = PolyDisc::new(&k, 1, 0);
        assert_eq!(AnalyticSeries::from_ints(line.clone(), &[(1, &[0])], 10).strassmann_count(), Ok(0));
        let f = AnalyticSeries::from_ints(line.clone(), &[(1, &[2]), (-5, &[0])], 10);
        assert_eq!(f.strassmann_count(), Ok(2));
        let g = AnalyticSeries::from_ints(line.clone(), &[(5, &[1]), (-1, &[0])], 10);
        assert_eq!(g.strassmann_count(), Ok(0));
        let z = AnalyticSeries::new(line, [(vec![3], Unramified::zero(&k, 10))], 10);
        assert_eq!(z.strassmann_count(), Err(TateError::IndistinguishableFromZero));
    }

    #[test]
    fn newton_examples() {
        let c = |xs: &[i64]| xs.iter().map(|&n| Padic::from_int_mod(5, &BigInt::from(n), 20).into_inner()).collect::<Vec<_>>();
        let np = newton_polygon(&c(&[-5, 1])).unwrap();
        assert_eq!(np.segments, vec![NewtonSegment { slope: Ratio::from_integer(-1), length: 1 }]);
        let np = newton_polygon(&c(&[125, 5, 0, 1])).unwrap();
        assert_eq!(
            np.segments,
            vec![
                NewtonSegment { slope: Ratio::from_integer(-2), length: 1 },
                NewtonSegment { slope: Ratio::new(-1, 2), length: 2 }
            ]
        );
        let np = newton_polygon(&c(&[-5, 0, 1])).unwrap();
        assert_eq!(np.segments, vec![NewtonSegment { slope: Ratio::new(-1, 2), length: 2 }]);
        assert_eq!(np.roots_in_disc(0), 2);
        assert_eq!(newton_polygon(&c(&[0, 0])), Err(TateError::ZeroPolynomial));
        let np = newton_polygon(&c(&[0, 0, 3, 1])).unwrap();
        assert_eq!(np.zero_order, 2);
        assert_eq!(np.roots_in_disc(0), 3);
    }

    #[test]
    fn vanish_examples() {
        let k = qp(5);
        let line = PolyDisc::new(&k, 1, 0);
        let alpha = int(5, 6, 20);
        let zero = AnalyticSeries::new(line.clone(), [], 20);
        assert!(matches!(vanish_certificate(&zero, &alpha, 0), Ok(VanishOutcome::Certified(_))));
        let g = AnalyticSeries::from_ints(line.clone(), &[(1, &[1]), (-1, &[2])], 20);
        match vanish_certificate(&g, &alpha, 3).unwrap() {
            VanishOutcome::Refused(RefusalReason::NonzeroValue { n, .. }) => assert_eq!(n, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert!(vanish_certificate(&g, &int(5, 2, 20), 3).is_err());
        assert!(vanish_certificate(&g, &int(5, 1, 20), 3).is_err());
        assert!(vanish_certificate(&g, &int(2, 3, 20), 3).is_err());
    }

    #[test]
    fn json_round_trip() {
        let k = qp(7);
        let f = AnalyticSeries::from_ints(PolyDisc::new(&k, 2, 1), &[(1, &[0, 1]), (-3, &[2, 0])], 12);
        assert_eq!(AnalyticSeries::from_json(&f.to_json(), 5).unwrap(), f);
    }

    fn random_poly(p: u64) -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec((0u32..4, -20i64..20), 1..8).prop_map(move |cs| {
            cs.into_iter().map(|(e, u)| u * (p as i64).pow(e)).collect()
        })
    }

    proptest! {
        #[test]
        fn strassmann_is_additive(a in random_poly(3), b in random_poly(3)) {
            let k = qp(3);
            let line = PolyDisc::new(&k, 1, 0);
            let mk = |cs: &[i64]| AnalyticSeries::new(line.clone(), cs.iter().enumerate().map(|(i, &c)| (vec![i as u32], int(3, c, 30))), 30);
            let (f, h) = (mk(&a), mk(&b));
            prop_assume!(!f.is_indistinguishable_from_zero() && !h.is_indistinguishable_from_zero());
            prop_assert_eq!(f.mul(&h).strassmann_count().unwrap(), f.strassmann_count().unwrap() + h.strassmann_count().unwrap());
        }

        #[test]
        fn product_evaluates_to_product(a in random_poly(5), b in random_poly(5), x in -50i64..50) {
            let k = qp(5);
            let disc = PolyDisc::new(&k, 1, 1);
            let mk = |cs: &[i64]| AnalyticSeries::new(disc.clone(), cs.iter().enumerate().map(|(i, &c)| (vec![i as u32], int(5, c, 25))), 25);
            let (f, h) = (mk(&a), mk(&b));
            let pt = [int(5, 5 * x, 25)];
            let lhs = f.mul(&h).eval(&pt).unwrap();
            let rhs = f.eval(&pt).unwrap().mul_ref(&h.eval(&pt).unwrap());
            prop_assert!(lhs.congruent(&rhs));
        }

        #[test]
        fn restriction_is_a_ring_map(a in random_poly(3), b in random_poly(3), x1 in 1i64..30, x2 in 1i64..30) {
            let k = qp(3);
            let disc = PolyDisc::new(&k, 2, 1);
            let mk = |cs: &[i64]| AnalyticSeries::new(disc.clone(), cs.iter().enumerate().map(|(i, &c)| (vec![(i % 3) as u32, (i / 3) as u32], int(3, c, 25))), 25);
            let (f, h) = (mk(&a), mk(&b));
            let pt = [int(3, 3 * x1, 25), int(3, 9 * x2, 25)];
            let w = [1, 2];
            let lhs = f.mul(&h).restrict_to_orbit(&pt, &w).unwrap();
            let rhs = f.restrict_to_orbit(&pt, &w).unwrap().mul(&h.restrict_to_orbit(&pt, &w).unwrap());
            prop_assert!(lhs.sub(&rhs).is_indistinguishable_from_zero());
            let lhs = f.add(&h).restrict_to_orbit(&pt, &w).unwrap();
            let rhs = f.restrict_to_orbit(&pt, &w).unwrap().add(&h.restrict_to_orbit(&pt, &w).unwrap());
            prop_assert!(lhs.sub(&rhs).is_indistinguishable_from_zero());
        }

        #[test]
        fn newton_agrees_with_strassmann(a in random_poly(5)) {
            let k = qp(5);
            let coeffs: Vec<Unramified> = a.iter().map(|&c| Padic::from_int_mod(5, &BigInt::from(c), 30).into_inner()).collect();
            prop_assume!(coeffs.iter().any(|c| !c.is_zero()));
            let np = newton_polygon(&coeffs).unwrap();
            let g = AnalyticSeries::new(PolyDisc::new(&k, 1, 0), coeffs.iter().enumerate().map(|(i, c)| (vec![i as u32], c.clone())), 30);
            prop_assert_eq!(np.roots_in_disc(0), g.strassmann_count().unwrap() as u64);
        }
    }
}
