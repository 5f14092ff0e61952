//! Sparse Laurent polynomials with cyclotomic coefficients.
//!
//! The same type serves ordinary polynomials (all exponents non-negative);
//! operations that only make sense there say so.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use super::cyclotomic::CyclotomicField;
use super::{Cyclo, ExactError, Frac};

#[derive(Clone, PartialEq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<i64>, Cyclo>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Poly {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Cyclo) -> Poly {
        Poly::monomial(vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Poly {
        Poly::constant(nvars, Cyclo::one())
    }

    pub fn monomial(exp: Vec<i64>, c: Cyclo) -> Poly {
        let nvars = exp.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Poly { nvars, terms }
    }

    /// The variable `t_i`.
    pub fn var(nvars: usize, i: usize) -> Poly {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly::monomial(e, Cyclo::one())
    }

    /// `c_a t^a + c_b t^b`.
    pub fn binomial(a: Vec<i64>, ca: Cyclo, b: Vec<i64>, cb: Cyclo) -> Poly {
        Poly::monomial(a, ca).add(&Poly::monomial(b, cb))
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<i64>, Cyclo)>) -> Poly {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length mismatch");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<i64>, c: Cyclo) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(x) => {
                let s = x.add(&c);
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Cyclo)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero constant (no variables).
    pub fn as_constant(&self) -> Option<&Cyclo> {
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().expect("one term");
            if e.iter().all(|&x| x == 0) {
                return Some(c);
            }
        }
        None
    }

    pub fn coefficient(&self, e: &[i64]) -> Cyclo {
        self.terms.get(e).cloned().unwrap_or_else(Cyclo::zero)
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x >= 0))
    }

    pub fn total_degree(&self) -> i64 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = Poly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.mul(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &Cyclo) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x.mul(c));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::one(self.nvars), |acc, _| acc.mul(self))
    }

    /// Multiplies by the monomial `t^shift`.
    pub fn shift(&self, shift: &[i64]) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Removes the largest monomial factor (a unit of the Laurent ring), so
    /// that every variable has minimum exponent zero.
    pub fn strip_monomial(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mins: Vec<i64> = (0..self.nvars)
            .map(|i| self.terms.keys().map(|e| e[i]).min().expect("nonempty"))
            .collect();
        self.shift(&mins.iter().map(|x| -x).collect::<Vec<_>>())
    }

    /// Scales so that the lex-leading coefficient is 1.
    pub fn monic(&self) -> Poly {
        match self.terms.values().next_back() {
            Some(c) => self.scale(&c.inv().expect("nonzero coefficient")),
            None => self.clone(),
        }
    }

    /// Normal form up to units of the Laurent ring: monomial factor removed and
    /// lex-leading coefficient 1.
    pub fn unit_normal(&self) -> Poly {
        self.strip_monomial().monic()
    }

    /// Exact quotient in the Laurent ring, if `divisor` divides `self`.
    pub fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(self.clone());
        }
        let g = self.strip_monomial();
        let h = divisor.strip_monomial();
        let (lh_e, lh_c) = h.terms.iter().next_back().expect("nonzero divisor");
        let lh_inv = lh_c.inv().expect("nonzero");
        let mut r = g.clone();
        let mut q = Poly::zero(self.nvars);
        while let Some((le, lc)) = r.terms.iter().next_back() {
            if le.iter().zip(lh_e).any(|(a, b)| a < b) {
                return None;
            }
            let e: Vec<i64> = le.iter().zip(lh_e).map(|(a, b)| a - b).collect();
            let c = lc.mul(&lh_inv);
            let t = Poly::monomial(e, c);
            r = r.sub(&t.mul(&h));
            q = q.add(&t);
        }
        // undo the monomial normalisation of the dividend
        let shift_g: Vec<i64> = self.min_exponents();
        let shift_h: Vec<i64> = divisor.min_exponents();
        let s: Vec<i64> = shift_g.iter().zip(&shift_h).map(|(a, b)| a - b).collect();
        Some(q.shift(&s))
    }

    fn min_exponents(&self) -> Vec<i64> {
        (0..self.nvars)
            .map(|i| self.terms.keys().map(|e| e[i]).min().unwrap_or(0))
            .collect()
    }

    /// Value at the torsion point `t_i = exp(2πi·point_i)`, computed in `field`
    /// (whose conductor must be a multiple of the point's order and of every
    /// coefficient's conductor).
    pub fn eval_torsion(&self, point: &[Frac], field: &Arc<CyclotomicField>) -> Cyclo {
        assert_eq!(point.len(), self.nvars, "point dimension mismatch");
        let m = field.conductor() as i64;
        let steps: Vec<i64> = point
            .iter()
            .map(|t| t.numerator_over(m).expect("field conductor must be a multiple of the point order"))
            .collect();
        let mut rational = vec![BigRational::zero(); m as usize];
        let mut other = field.zero();
        for (e, c) in &self.terms {
            let k = e
                .iter()
                .zip(&steps)
                .fold(0i128, |acc, (&a, &s)| acc + a as i128 * s as i128)
                .rem_euclid(m as i128) as usize;
            match c.as_rational() {
                Some(r) => rational[k] += r,
                None => other = other.add(&c.lift(field).mul(&field.zeta_pow(k as i64))),
            }
        }
        field.from_powers(rational).add(&other)
    }

    /// Value at an arbitrary point; negative exponents invert coordinates.
    pub fn eval(&self, point: &[Cyclo]) -> Result<Cyclo, ExactError> {
        assert_eq!(point.len(), self.nvars, "point dimension mismatch");
        let mut acc = Cyclo::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k >= 0 {
                    t = t.mul(&x.pow(k as u64));
                } else {
                    t = t.mul(&x.inv()?.pow((-k) as u64));
                }
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    /// Substitutes polynomials for the variables (non-negative exponents only).
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.nvars, "substitution arity mismatch");
        assert!(self.is_polynomial(), "substitution into a Laurent polynomial");
        let n = images.first().map_or(0, |p| p.nvars);
        let mut out = Poly::zero(n);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(n, c.clone());
            for (img, &k) in images.iter().zip(e) {
                t = t.mul(&img.pow(k as u32));
            }
            out = out.add(&t);
        }
        out
    }

    /// Linear coefficients `∂f/∂x_i (0)`.
    pub fn gradient_at_zero(&self) -> Vec<Cyclo> {
        (0..self.nvars)
            .map(|i| {
                let mut e = vec![0; self.nvars];
                e[i] = 1;
                self.coefficient(&e)
            })
            .collect()
    }

    pub fn constant_term(&self) -> Cyclo {
        self.coefficient(&vec![0; self.nvars])
    }

    /// Splits into weighted-homogeneous components `⟨w, e⟩ = k`.
    pub fn weighted_components(&self, weights: &[u32]) -> BTreeMap<i64, Poly> {
        let mut out: BTreeMap<i64, Poly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let k: i64 = e.iter().zip(weights).map(|(a, &w)| a * w as i64).sum();
            out.entry(k)
                .or_insert_with(|| Poly::zero(self.nvars))
                .add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn is_weighted_homogeneous(&self, weights: &[u32]) -> bool {
        self.weighted_components(weights).len() <= 1
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(e, c)| json!({ "coeff": c.to_json(), "exp": e }))
                .collect(),
        )
    }

    pub fn from_json(v: &Value, nvars: usize) -> Result<Poly, ExactError> {
        let arr = v
            .as_array()
            .ok_or_else(|| ExactError::Parse("polynomial must be a list of terms".into()))?;
        let mut p = Poly::zero(nvars);
        for t in arr {
            let exp: Vec<i64> = t
                .get("exp")
                .and_then(Value::as_array)
                .ok_or_else(|| ExactError::Parse("term needs an exp list".into()))?
                .iter()
                .map(|x| x.as_i64().ok_or_else(|| ExactError::Parse("exponent must be an integer".into())))
                .collect::<Result<_, _>>()?;
            if exp.len() != nvars {
                return Err(ExactError::Parse(format!(
                    "term has {} exponents, expected {nvars}",
                    exp.len()
                )));
            }
            let c = Cyclo::from_json(t.get("coeff").unwrap_or(&Value::from(1)))?;
            p.add_term(exp, c);
        }
        Ok(p)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k != 0)
                    .map(|(i, &k)| if k == 1 { format!("t{}", i + 1) } else { format!("t{}^{}", i + 1, k) })
                    .collect();
                format!("({:?}){}{}", c, if mono.is_empty() { "" } else { "*" }, mono.join("*"))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `t^e − 1` style helper used by the built-in complexes: `Σ c·t^e` from
/// integer coefficients.
pub fn int_poly(nvars: usize, terms: &[(i64, &[i64])]) -> Poly {
    Poly::from_terms(
        nvars,
        terms.iter().map(|&(c, e)| (e.to_vec(), Cyclo::from_rational(BigRational::from_integer(BigInt::from(c))))),
    )
}
