//! Exact arithmetic in cyclotomic fields `Q(ζ_m)`.
//!
//! Elements are rational polynomials reduced modulo the m-th cyclotomic
//! polynomial. Values living in different fields are lifted to the field of
//! the lcm of their conductors before combining.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::{ExactError, Frac};

/// `Q(ζ_m)` together with its defining polynomial.
#[derive(Debug, PartialEq, Eq)]
pub struct CyclotomicField {
    conductor: u64,
    /// Monic Φ_m, coefficients from the constant term up.
    modulus: Vec<BigInt>,
}

impl CyclotomicField {
    pub fn new(m: u64) -> Arc<CyclotomicField> {
        assert!(m >= 1, "cyclotomic conductor must be positive");
        Arc::new(CyclotomicField { conductor: m, modulus: cyclotomic_polynomial(m) })
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[BigInt] {
        &self.modulus
    }

    pub fn zero(self: &Arc<Self>) -> Cyclo {
        Cyclo { field: self.clone(), coeffs: vec![BigRational::zero(); self.degree()] }
    }

    pub fn one(self: &Arc<Self>) -> Cyclo {
        self.rational(BigRational::one())
    }

    pub fn rational(self: &Arc<Self>, r: BigRational) -> Cyclo {
        let mut z = self.zero();
        z.coeffs[0] = r;
        z
    }

    /// `ζ_m^k`.
    pub fn zeta_pow(self: &Arc<Self>, k: i64) -> Cyclo {
        let m = self.conductor as i64;
        let e = k.rem_euclid(m) as usize;
        let mut c = vec![BigRational::zero(); e + 1];
        c[e] = BigRational::one();
        Cyclo::reduce(self, c)
    }

    /// Builds `Σ c_k ζ^k` from an unreduced coefficient list.
    pub fn from_powers(self: &Arc<Self>, coeffs: Vec<BigRational>) -> Cyclo {
        Cyclo::reduce(self, coeffs)
    }
}

/// Φ_m = Π_{d | m} (x^d − 1)^{μ(m/d)}, formed by multiplying the factors with
/// μ = +1 and dividing exactly by those with μ = −1.
pub fn cyclotomic_polynomial(m: u64) -> Vec<BigInt> {
    let mut num = vec![BigInt::one()];
    let mut den = vec![BigInt::one()];
    for d in 1..=m {
        if m % d != 0 {
            continue;
        }
        let mu = mobius(m / d);
        if mu == 0 {
            continue;
        }
        let mut f = vec![BigInt::zero(); d as usize + 1];
        f[0] = -BigInt::one();
        f[d as usize] = BigInt::one();
        if mu > 0 {
            num = int_poly_mul(&num, &f);
        } else {
            den = int_poly_mul(&den, &f);
        }
    }
    int_poly_exact_div(&num, &den)
}

fn mobius(mut n: u64) -> i32 {
    let mut mu = 1;
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            n /= q;
            if n % q == 0 {
                return 0;
            }
            mu = -mu;
        }
        q += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

fn int_poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact division by a monic (up to sign) polynomial.
fn int_poly_exact_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dl = den.len();
    let lead = den[dl - 1].clone();
    let mut q = vec![BigInt::zero(); rem.len() + 1 - dl];
    for k in (0..q.len()).rev() {
        let c = &rem[k + dl - 1] / &lead;
        for (j, dj) in den.iter().enumerate() {
            rem[k + j] -= &c * dj;
        }
        q[k] = c;
    }
    debug_assert!(rem.iter().all(|x| x.is_zero()), "inexact cyclotomic division");
    q
}

/// An element of `Q(ζ_m)`.
#[derive(Clone)]
pub struct Cyclo {
    field: Arc<CyclotomicField>,
    coeffs: Vec<BigRational>,
}

impl Cyclo {
    /// A rational number, living in `Q = Q(ζ_1)`.
    pub fn from_rational(r: BigRational) -> Cyclo {
        CyclotomicField::new(1).rational(r)
    }

    pub fn from_int(n: i64) -> Cyclo {
        Cyclo::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Cyclo {
        Cyclo::from_int(0)
    }

    pub fn one() -> Cyclo {
        Cyclo::from_int(1)
    }

    /// The root of unity `exp(2πi·t)`.
    pub fn root_of_unity(t: Frac) -> Cyclo {
        CyclotomicField::new(t.den() as u64).zeta_pow(t.num())
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn conductor(&self) -> u64 {
        self.field.conductor
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    fn reduce(field: &Arc<CyclotomicField>, mut c: Vec<BigRational>) -> Cyclo {
        let n = field.degree();
        let md = &field.modulus;
        while c.len() > n {
            let top = c.pop().expect("nonempty");
            if top.is_zero() {
                continue;
            }
            let base = c.len() - n;
            for (j, mj) in md.iter().take(n).enumerate() {
                c[base + j] -= &top * BigRational::from_integer(mj.clone());
            }
        }
        c.resize(n, BigRational::zero());
        Cyclo { field: field.clone(), coeffs: c }
    }

    /// Re-expresses `self` inside `Q(ζ_M)` for a multiple `M` of its conductor.
    pub fn lift(&self, target: &Arc<CyclotomicField>) -> Cyclo {
        let m = self.field.conductor;
        if m == target.conductor {
            return self.clone();
        }
        assert!(target.conductor % m == 0, "cannot embed Q(ζ_{m}) into Q(ζ_{})", target.conductor);
        let step = (target.conductor / m) as usize;
        let mut c = vec![BigRational::zero(); step * self.coeffs.len().max(1)];
        for (k, x) in self.coeffs.iter().enumerate() {
            c[k * step] = x.clone();
        }
        Cyclo::reduce(target, c)
    }

    fn align(&self, other: &Cyclo) -> (Cyclo, Cyclo) {
        let (a, b) = (self.field.conductor, other.field.conductor);
        if a == b {
            return (self.clone(), other.clone());
        }
        if b % a == 0 {
            return (self.lift(&other.field), other.clone());
        }
        if a % b == 0 {
            return (self.clone(), other.lift(&self.field));
        }
        let f = CyclotomicField::new(a.lcm(&b));
        (self.lift(&f), other.lift(&f))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|x| x.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|x| x.is_zero())
    }

    /// The value as a rational number when it lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.coeffs[1..].iter().all(|x| x.is_zero()).then(|| self.coeffs[0].clone())
    }

    pub fn add(&self, other: &Cyclo) -> Cyclo {
        if Arc::ptr_eq(&self.field, &other.field) || self.field.conductor == other.field.conductor {
            let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
            return Cyclo { field: self.field.clone(), coeffs };
        }
        let (a, b) = self.align(other);
        a.add(&b)
    }

    pub fn neg(&self) -> Cyclo {
        Cyclo { field: self.field.clone(), coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn sub(&self, other: &Cyclo) -> Cyclo {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Cyclo) -> Cyclo {
        if self.field.conductor != other.field.conductor {
            let (a, b) = self.align(other);
            return a.mul(&b);
        }
        if self.is_zero() || other.is_zero() {
            return self.field.zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        Cyclo::reduce(&self.field, out)
    }

    pub fn scale(&self, r: &BigRational) -> Cyclo {
        Cyclo { field: self.field.clone(), coeffs: self.coeffs.iter().map(|a| a * r).collect() }
    }

    pub fn pow(&self, mut e: u64) -> Cyclo {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in `Q[x]`.
    pub fn inv(&self) -> Result<Cyclo, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let modulus: Vec<BigRational> =
            self.field.modulus.iter().map(|c| BigRational::from_integer(c.clone())).collect();
        let (g, s) = rat_poly_ext_gcd(&trim(self.coeffs.clone()), &modulus);
        // g is a nonzero constant because Φ_m is irreducible
        debug_assert_eq!(g.len(), 1);
        let inv_g = g[0].recip();
        let coeffs = s.into_iter().map(|c| c * &inv_g).collect();
        Ok(Cyclo::reduce(&self.field, coeffs))
    }

    pub fn div(&self, other: &Cyclo) -> Result<Cyclo, ExactError> {
        Ok(self.mul(&other.inv()?))
    }

    /// Galois conjugate `ζ ↦ ζ^k` for `gcd(k, m) = 1`.
    pub fn galois(&self, k: i64) -> Cyclo {
        let m = self.field.conductor as i64;
        assert_eq!(k.gcd(&m), 1, "Galois exponent must be a unit mod m");
        let mut out = vec![BigRational::zero(); m.max(1) as usize];
        for (i, x) in self.coeffs.iter().enumerate() {
            let e = ((i as i64) * k).rem_euclid(m.max(1)) as usize;
            out[e] += x;
        }
        Cyclo::reduce(&self.field, out)
    }

    /// If `self` is a root of unity, its exponent in Q/Z.
    pub fn root_of_unity_exponent(&self) -> Option<Frac> {
        let m = self.field.conductor as i64;
        let n = m.lcm(&2);
        let big = CyclotomicField::new(n as u64);
        let x = self.lift(&big);
        if !x.pow(n as u64).is_one() {
            return None;
        }
        (0..n).find(|&k| big.zeta_pow(k) == x).map(|k| Frac::new(k, n))
    }

    pub fn to_json(&self) -> Value {
        if let Some(r) = self.as_rational() {
            return Value::String(rat_to_string(&r));
        }
        if let Some(t) = self.root_of_unity_exponent() {
            return json!({ "root": t.to_string() });
        }
        json!({
            "m": self.field.conductor,
            "coeffs": self.coeffs.iter().map(rat_to_string).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Cyclo, ExactError> {
        match v {
            Value::String(s) => Ok(Cyclo::from_rational(parse_rational(s)?)),
            Value::Number(n) => {
                let i = n.as_i64().ok_or_else(|| ExactError::Parse(format!("not an integer: {n}")))?;
                Ok(Cyclo::from_int(i))
            }
            Value::Object(map) => {
                if let Some(r) = map.get("root") {
                    let s = r.as_str().ok_or_else(|| ExactError::Parse("root must be a string".into()))?;
                    return Ok(Cyclo::root_of_unity(s.parse()?));
                }
                let m = map
                    .get("m")
                    .and_then(Value::as_u64)
                    .filter(|&m| m >= 1)
                    .ok_or_else(|| ExactError::Parse("cyclotomic value needs a conductor m".into()))?;
                let coeffs = map
                    .get("coeffs")
                    .and_then(Value::as_array)
                    .ok_or_else(|| ExactError::Parse("cyclotomic value needs coeffs".into()))?
                    .iter()
                    .map(|c| {
                        c.as_str()
                            .ok_or_else(|| ExactError::Parse("coefficient must be a string".into()))
                            .and_then(parse_rational)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(CyclotomicField::new(m).from_powers(coeffs))
            }
            _ => Err(ExactError::Parse(format!("not a coefficient: {v}"))),
        }
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Cyclo) -> bool {
        let (a, b) = self.align(other);
        a.coeffs == b.coeffs
    }
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

pub fn rat_to_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, ExactError> {
    let s = s.trim();
    let bad = || ExactError::Parse(format!("not a rational number: {s:?}"));
    let (a, b) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let a: BigInt = a.parse().map_err(|_| bad())?;
    let b: BigInt = b.parse().map_err(|_| bad())?;
    if b.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(a, b))
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.len() > 1 && p.last().is_some_and(|x| x.is_zero()) {
        p.pop();
    }
    p
}

fn rat_poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (vec![BigRational::zero()], r);
    }
    let lead_inv = b[b.len() - 1].recip();
    let mut q = vec![BigRational::zero(); r.len() + 1 - b.len()];
    while r.len() >= b.len() && !(r.len() == 1 && r[0].is_zero()) {
        let shift = r.len() - b.len();
        let c = &r[r.len() - 1] * &lead_inv;
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] -= &c * bj;
        }
        q[shift] = c;
        r.pop();
        r = trim(r);
        if r.is_empty() {
            r.push(BigRational::zero());
        }
    }
    (q, r)
}

fn rat_poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn rat_poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let z = BigRational::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
}

/// Returns `(g, s)` with `s·a ≡ g (mod b)`.
fn rat_poly_ext_gcd(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let (mut r0, mut r1) = (trim(a.to_vec()), trim(b.to_vec()));
    let (mut s0, mut s1) = (vec![BigRational::one()], vec![BigRational::zero()]);
    while !(r1.len() == 1 && r1[0].is_zero()) {
        let (q, r) = rat_poly_divrem(&r0, &r1);
        let s = rat_poly_sub(&s0, &rat_poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    (r0, s0)
}

/// Rank of a matrix by fraction-free elimination: rows are combined as
/// `piv·row_i − a_ik·row_k`, never dividing.
pub fn rank(matrix: &[Vec<Cyclo>]) -> usize {
    let mut a: Vec<Vec<Cyclo>> = matrix.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let piv = a[r][c].clone();
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in c..cols {
                let v = piv.mul(&a[i][j]).sub(&f.mul(&a[r][j]));
                a[i][j] = v;
            }
            normalize_row(&mut a[i][c..]);
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Divides a row by the positive content of a nonzero rational entry, which
/// keeps fraction-free elimination from blowing up on rational inputs.
fn normalize_row(row: &mut [Cyclo]) {
    let Some(lead) = row.iter().find(|x| !x.is_zero()) else { return };
    let Some(r) = lead.as_rational() else { return };
    let s = r.abs().recip();
    for x in row.iter_mut() {
        *x = x.scale(&s);
    }
}

/// Basis of the right kernel `{v : A v = 0}` by Gauss–Jordan elimination.
pub fn kernel(matrix: &[Vec<Cyclo>], cols: usize) -> Vec<Vec<Cyclo>> {
    let mut a: Vec<Vec<Cyclo>> = matrix.to_vec();
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].inv().expect("nonzero pivot");
        for j in 0..cols {
            a[r][j] = a[r][j].mul(&inv);
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let v = a[i][j].sub(&f.mul(&a[r][j]));
                    a[i][j] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Cyclo::zero(); cols];
            v[free] = Cyclo::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = a[row][free].neg();
            }
            v
        })
        .collect()
}
