//! Finite-precision elements of the unramified extension `Q_{p^f}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use super::residue::{ResidueElement, UnramifiedField};
use super::PadicError;

#[derive(Clone, PartialEq, Eq)]
enum Repr {
    /// Known to be zero modulo `p^abs_prec`.
    Zero { abs_prec: i64 },
    /// `p^v · (unit + O(p^rel_prec))`, some coefficient of `unit` prime to p.
    Unit { v: i64, unit: Vec<BigInt>, rel_prec: i64 },
}

/// Element of `Q_{p^f}` in relative-precision form.
///
/// Equality (`==`) is structural: same valuation, precision and digits. Use
/// [`Unramified::congruent`] to compare cosets at their common precision.
#[derive(Clone)]
pub struct Unramified {
    field: Arc<UnramifiedField>,
    repr: Repr,
}

pub(crate) fn p_pow(p: u64, k: i64) -> BigInt {
    debug_assert!(k >= 0);
    BigInt::from(p).pow(k as u32)
}

/// p-adic valuation of a nonzero integer.
pub(crate) fn int_valuation(x: &BigInt, p: u64) -> i64 {
    debug_assert!(!x.is_zero());
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    loop {
        let (q, r) = y.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        y = q;
        v += 1;
    }
}

fn modp(x: &BigInt, m: &BigInt) -> BigInt {
    x.mod_floor(m)
}

impl Unramified {
    pub fn field(&self) -> &Arc<UnramifiedField> {
        &self.field
    }

    pub fn prime(&self) -> u64 {
        self.field.prime()
    }

    pub fn degree(&self) -> u32 {
        self.field.degree()
    }

    pub fn zero(field: &Arc<UnramifiedField>, abs_prec: i64) -> Unramified {
        Unramified { field: field.clone(), repr: Repr::Zero { abs_prec } }
    }

    pub fn one(field: &Arc<UnramifiedField>, rel_prec: i64) -> Unramified {
        Unramified::from_int(field, &BigInt::one(), rel_prec)
    }

    /// `p^shift · Σ c_i x^i` where the `c_i` are known modulo `p^digits`.
    pub(crate) fn from_parts(
        field: &Arc<UnramifiedField>,
        shift: i64,
        coeffs: &[BigInt],
        digits: i64,
    ) -> Unramified {
        let p = field.prime();
        if digits <= 0 {
            return Unramified::zero(field, shift + digits.max(0));
        }
        let m = p_pow(p, digits);
        let red: Vec<BigInt> = coeffs.iter().map(|c| modp(c, &m)).collect();
        let w = red.iter().filter(|c| !c.is_zero()).map(|c| int_valuation(c, p)).min();
        let Some(w) = w else {
            return Unramified::zero(field, shift + digits);
        };
        let rel = digits - w;
        let pw = p_pow(p, w);
        let mr = p_pow(p, rel);
        let mut unit: Vec<BigInt> = red.iter().map(|c| modp(&(c / &pw), &mr)).collect();
        unit.resize(field.degree() as usize, BigInt::zero());
        Unramified { field: field.clone(), repr: Repr::Unit { v: shift + w, unit, rel_prec: rel } }
    }

    pub fn from_int(field: &Arc<UnramifiedField>, n: &BigInt, rel_prec: i64) -> Unramified {
        assert!(rel_prec >= 1, "relative precision must be positive");
        if n.is_zero() {
            return Unramified::zero(field, rel_prec);
        }
        let v = int_valuation(n, field.prime());
        let unit = n / p_pow(field.prime(), v);
        Unramified::from_parts(field, v, &[unit], rel_prec)
    }

    pub fn from_rational(field: &Arc<UnramifiedField>, r: &BigRational, rel_prec: i64) -> Unramified {
        assert!(rel_prec >= 1, "relative precision must be positive");
        if r.is_zero() {
            return Unramified::zero(field, rel_prec);
        }
        let p = field.prime();
        let (a, b) = (r.numer(), r.denom());
        let va = int_valuation(a, p);
        let vb = int_valuation(b, p);
        let m = p_pow(p, rel_prec);
        let ua = a / p_pow(p, va);
        let ub = b / p_pow(p, vb);
        let inv = ub.mod_floor(&m).extended_gcd(&m).x;
        let u = modp(&(ua * inv), &m);
        Unramified::from_parts(field, va - vb, &[u], rel_prec)
    }

    /// Element with the given integral coefficients on `1, x, …`, known
    /// modulo `p^abs_prec`.
    pub fn from_coeffs(field: &Arc<UnramifiedField>, coeffs: &[BigInt], abs_prec: i64) -> Unramified {
        let mut c = coeffs.to_vec();
        reduce_mod_modulus(field, &mut c);
        Unramified::from_parts(field, 0, &c, abs_prec)
    }

    /// Lift of a residue to a unit with the given relative precision.
    pub fn lift_residue(xi: &ResidueElement, rel_prec: i64) -> Unramified {
        let c: Vec<BigInt> = xi.coeffs().iter().map(|&x| BigInt::from(x)).collect();
        Unramified::from_parts(xi.field(), 0, &c, rel_prec)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    /// `None` for an element that is zero to its precision.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Unit { v, .. } => Some(*v),
        }
    }

    /// Valuation, with zero-to-precision elements reporting their absolute
    /// precision (a lower bound).
    pub fn valuation_bound(&self) -> i64 {
        match &self.repr {
            Repr::Zero { abs_prec } => *abs_prec,
            Repr::Unit { v, .. } => *v,
        }
    }

    pub fn abs_precision(&self) -> i64 {
        match &self.repr {
            Repr::Zero { abs_prec } => *abs_prec,
            Repr::Unit { v, rel_prec, .. } => v + rel_prec,
        }
    }

    pub fn rel_precision(&self) -> i64 {
        match &self.repr {
            Repr::Zero { .. } => 0,
            Repr::Unit { rel_prec, .. } => *rel_prec,
        }
    }

    /// Unit part coefficients (empty for zero).
    pub fn unit_coeffs(&self) -> &[BigInt] {
        match &self.repr {
            Repr::Zero { .. } => &[],
            Repr::Unit { unit, .. } => unit,
        }
    }

    /// True when the value is divisible by `p^n` as far as its precision says.
    pub fn is_zero_to(&self, n: i64) -> bool {
        match &self.repr {
            Repr::Zero { .. } => true,
            Repr::Unit { v, .. } => *v >= n,
        }
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    /// `p^{-v}` as an exact rational (`0` for zero).
    pub fn abs_value(&self) -> BigRational {
        match self.valuation() {
            None => BigRational::zero(),
            Some(v) if v >= 0 => BigRational::new(BigInt::one(), p_pow(self.prime(), v)),
            Some(v) => BigRational::from_integer(p_pow(self.prime(), -v)),
        }
    }

    /// Drops precision to at most `abs_prec`.
    pub fn truncate(&self, abs_prec: i64) -> Unramified {
        match &self.repr {
            Repr::Zero { abs_prec: a } => Unramified::zero(&self.field, (*a).min(abs_prec)),
            Repr::Unit { v, unit, rel_prec } => {
                let digits = (*rel_prec).min(abs_prec - v);
                Unramified::from_parts(&self.field, *v, unit, digits)
            }
        }
    }

    /// Integral coefficient vector of `p^shift`-scaled value, as a list of
    /// `BigInt`s valid modulo `p^(abs_prec - shift)`.
    pub(crate) fn scaled_coeffs(&self, shift: i64) -> Vec<BigInt> {
        match &self.repr {
            Repr::Zero { .. } => vec![BigInt::zero(); self.degree() as usize],
            Repr::Unit { v, unit, .. } => {
                let k = v - shift;
                assert!(k >= 0, "scaling below the valuation");
                let pk = p_pow(self.prime(), k);
                unit.iter().map(|c| c * &pk).collect()
            }
        }
    }

    /// Coefficients on the basis `1, x, …, x^{f−1}` as elements of `Q_p`.
    pub fn coefficients(&self) -> Vec<super::Padic> {
        let base = UnramifiedField::new(self.prime(), 1).expect("valid prime");
        let abs = self.abs_precision();
        match &self.repr {
            Repr::Zero { abs_prec } => {
                (0..self.degree()).map(|_| super::Padic::from_unramified(Unramified::zero(&base, *abs_prec))).collect()
            }
            Repr::Unit { v, unit, .. } => unit
                .iter()
                .map(|c| super::Padic::from_unramified(Unramified::from_parts(&base, *v, &[c.clone()], abs - v)))
                .collect(),
        }
    }

    fn coerce(&self, other: &Unramified) -> (Unramified, Unramified) {
        if *self.field == *other.field {
            return (self.clone(), other.clone());
        }
        assert_eq!(self.prime(), other.prime(), "mixing different primes");
        if self.degree() == 1 {
            (self.embed(&other.field), other.clone())
        } else if other.degree() == 1 {
            (self.clone(), other.embed(&self.field))
        } else {
            panic!("mixing incompatible unramified fields {:?} and {:?}", self.field, other.field)
        }
    }

    /// Embeds an element of `Q_p` into a larger unramified field.
    pub fn embed(&self, target: &Arc<UnramifiedField>) -> Unramified {
        assert_eq!(self.degree(), 1, "only Q_p embeds canonically");
        assert_eq!(self.prime(), target.prime());
        let repr = match &self.repr {
            Repr::Zero { abs_prec } => Repr::Zero { abs_prec: *abs_prec },
            Repr::Unit { v, unit, rel_prec } => {
                let mut u = unit.clone();
                u.resize(target.degree() as usize, BigInt::zero());
                Repr::Unit { v: *v, unit: u, rel_prec: *rel_prec }
            }
        };
        Unramified { field: target.clone(), repr }
    }

    pub fn add_ref(&self, other: &Unramified) -> Unramified {
        if *self.field != *other.field {
            let (a, b) = self.coerce(other);
            return a.add_ref(&b);
        }
        let abs = self.abs_precision().min(other.abs_precision());
        let live: Vec<&Unramified> = [self, other]
            .into_iter()
            .filter(|x| x.valuation().is_some_and(|v| v < abs))
            .collect();
        let Some(vmin) = live.iter().filter_map(|x| x.valuation()).min() else {
            return Unramified::zero(&self.field, abs);
        };
        let mut sum = vec![BigInt::zero(); self.degree() as usize];
        for x in live {
            for (s, c) in sum.iter_mut().zip(x.scaled_coeffs(vmin)) {
                *s += c;
            }
        }
        Unramified::from_parts(&self.field, vmin, &sum, abs - vmin)
    }

    pub fn neg_ref(&self) -> Unramified {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Unit { v, unit, rel_prec } => {
                let neg: Vec<BigInt> = unit.iter().map(|c| -c).collect();
                Unramified::from_parts(&self.field, *v, &neg, *rel_prec)
            }
        }
    }

    pub fn sub_ref(&self, other: &Unramified) -> Unramified {
        self.add_ref(&other.neg_ref())
    }

    pub fn mul_ref(&self, other: &Unramified) -> Unramified {
        if *self.field != *other.field {
            let (a, b) = self.coerce(other);
            return a.mul_ref(&b);
        }
        match (&self.repr, &other.repr) {
            (Repr::Zero { abs_prec: a }, Repr::Zero { abs_prec: b }) => Unramified::zero(&self.field, a + b),
            (Repr::Zero { abs_prec }, Repr::Unit { v, .. }) | (Repr::Unit { v, .. }, Repr::Zero { abs_prec }) => {
                Unramified::zero(&self.field, abs_prec + v)
            }
            (Repr::Unit { v: v1, unit: u1, rel_prec: r1 }, Repr::Unit { v: v2, unit: u2, rel_prec: r2 }) => {
                let rel = (*r1).min(*r2);
                let m = p_pow(self.prime(), rel);
                let prod = mul_mod_modulus(&self.field, u1, u2, &m);
                Unramified::from_parts(&self.field, v1 + v2, &prod, rel)
            }
        }
    }

    /// Multiplicative inverse; fails on zero-to-precision.
    pub fn inv(&self) -> Result<Unramified, PadicError> {
        let Repr::Unit { v, unit, rel_prec } = &self.repr else {
            return Err(PadicError::NotInvertible);
        };
        let inv = unit_inverse(&self.field, unit, *rel_prec);
        Ok(Unramified::from_parts(&self.field, -v, &inv, *rel_prec))
    }

    pub fn div_ref(&self, other: &Unramified) -> Result<Unramified, PadicError> {
        Ok(self.mul_ref(&other.inv()?))
    }

    /// Integer power (negative exponents invert).
    pub fn pow(&self, e: i64) -> Result<Unramified, PadicError> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        Ok(self.pow_big(&BigInt::from(e)))
    }

    pub fn pow_big(&self, e: &BigInt) -> Unramified {
        assert!(!e.is_negative(), "negative exponent");
        let one = match &self.repr {
            Repr::Zero { .. } => Unramified::one(&self.field, 1),
            Repr::Unit { rel_prec, .. } => Unramified::one(&self.field, *rel_prec),
        };
        if e.is_zero() {
            return one;
        }
        let bits = e.bits();
        let mut acc = one;
        for i in (0..bits).rev() {
            acc = acc.mul_ref(&acc);
            if e.bit(i) {
                acc = acc.mul_ref(self);
            }
        }
        acc
    }

    /// Residue class mod p for integral elements.
    pub fn residue(&self) -> Option<ResidueElement> {
        match &self.repr {
            Repr::Zero { abs_prec } if *abs_prec >= 1 => Some(self.field.residue(&[])),
            Repr::Zero { .. } => None,
            Repr::Unit { v, unit, .. } => {
                if *v > 0 {
                    Some(self.field.residue(&[]))
                } else if *v == 0 {
                    let p = BigInt::from(self.prime());
                    let c: Vec<u64> =
                        unit.iter().map(|x| x.mod_floor(&p).to_u64().expect("digit fits")).collect();
                    Some(self.field.residue(&c))
                } else {
                    None
                }
            }
        }
    }

    /// Same coset at the common precision.
    pub fn congruent(&self, other: &Unramified) -> bool {
        self.sub_ref(other).is_zero()
    }

    /// Base-p digits of the unit part, little-endian, `rel_prec` digits per
    /// coefficient.
    pub fn unit_digits(&self) -> Vec<Vec<u64>> {
        let p = self.prime();
        match &self.repr {
            Repr::Zero { .. } => Vec::new(),
            Repr::Unit { unit, rel_prec, .. } => unit.iter().map(|c| digits(c, p, *rel_prec)).collect(),
        }
    }

    /// Canonical serialisation. For `f = 1` the digits form a flat list; for
    /// `f > 1` there is one digit list per basis coefficient.
    pub fn to_json(&self) -> Value {
        let (p, f) = (self.prime(), self.degree());
        match &self.repr {
            Repr::Zero { abs_prec } => json!({
                "p": p, "f": f, "v": "zero", "unit_digits": [], "rel_prec": 0, "abs_prec": abs_prec,
            }),
            Repr::Unit { v, rel_prec, .. } => {
                let d = self.unit_digits();
                let digits = if f == 1 { json!(d[0]) } else { json!(d) };
                json!({ "p": p, "f": f, "v": v, "unit_digits": digits, "rel_prec": rel_prec })
            }
        }
    }

    pub fn from_json(value: &Value) -> Result<Unramified, PadicError> {
        let bad = |m: &str| PadicError::Parse(format!("{m} in scalar {value}"));
        let p = value.get("p").and_then(Value::as_u64).ok_or_else(|| bad("missing p"))?;
        let f = value.get("f").and_then(Value::as_u64).unwrap_or(1) as u32;
        let field = UnramifiedField::new(p, f)?;
        let v = value.get("v").ok_or_else(|| bad("missing v"))?;
        if v.as_str() == Some("zero") {
            let abs = value
                .get("abs_prec")
                .or_else(|| value.get("rel_prec"))
                .and_then(Value::as_i64)
                .ok_or_else(|| bad("missing abs_prec"))?;
            return Ok(Unramified::zero(&field, abs));
        }
        let v = v.as_i64().ok_or_else(|| bad("v must be an integer or \"zero\""))?;
        let rel = value
            .get("rel_prec")
            .and_then(Value::as_i64)
            .filter(|&r| r >= 1)
            .ok_or_else(|| bad("rel_prec must be a positive integer"))?;
        let raw = value.get("unit_digits").and_then(Value::as_array).ok_or_else(|| bad("missing unit_digits"))?;
        let lists: Vec<Vec<u64>> = if f == 1 && raw.iter().all(Value::is_u64) {
            vec![raw.iter().filter_map(Value::as_u64).collect()]
        } else {
            raw.iter()
                .map(|l| {
                    l.as_array()
                        .map(|a| a.iter().filter_map(Value::as_u64).collect())
                        .ok_or_else(|| bad("unit_digits must be digit lists"))
                })
                .collect::<Result<_, _>>()?
        };
        if lists.len() != f as usize || lists.iter().flatten().any(|&d| d >= p) {
            return Err(bad("malformed unit_digits"));
        }
        let coeffs: Vec<BigInt> = lists.iter().map(|l| from_digits(l, p)).collect();
        let x = Unramified::from_parts(&field, v, &coeffs, rel);
        if x.valuation() != Some(v) {
            return Err(bad("unit part divisible by p"));
        }
        Ok(x)
    }
}

pub fn digits(c: &BigInt, p: u64, n: i64) -> Vec<u64> {
    let pb = BigInt::from(p);
    let mut x = c.mod_floor(&p_pow(p, n));
    (0..n)
        .map(|_| {
            let (q, r) = x.div_rem(&pb);
            x = q;
            r.to_u64().expect("digit fits")
        })
        .collect()
}

fn from_digits(d: &[u64], p: u64) -> BigInt {
    d.iter().rev().fold(BigInt::zero(), |acc, &x| acc * p + x)
}

/// Reduces a coefficient list modulo the field's monic modulus (no modular
/// reduction of the coefficients themselves).
pub(crate) fn reduce_mod_modulus(field: &UnramifiedField, c: &mut Vec<BigInt>) {
    let f = field.degree() as usize;
    let md = field.modulus();
    while c.len() > f {
        let top = c.pop().expect("nonempty");
        if top.is_zero() {
            continue;
        }
        let base = c.len() - f;
        for (j, &mj) in md.iter().take(f).enumerate() {
            if mj != 0 {
                c[base + j] -= &top * mj;
            }
        }
    }
    c.resize(f, BigInt::zero());
}

pub(crate) fn mul_mod_modulus(field: &UnramifiedField, a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    reduce_mod_modulus(field, &mut out);
    out.iter().map(|c| c.mod_floor(m)).collect()
}

/// Newton iteration `y ← y(2 − a·y)` from the residue inverse.
fn unit_inverse(field: &Arc<UnramifiedField>, unit: &[BigInt], rel_prec: i64) -> Vec<BigInt> {
    let p = field.prime();
    let pb = BigInt::from(p);
    let res: Vec<u64> = unit.iter().map(|x| x.mod_floor(&pb).to_u64().expect("digit")).collect();
    let r_inv = field.residue(&res).inv().expect("unit has nonzero residue");
    let mut y: Vec<BigInt> = r_inv.coeffs().iter().map(|&x| BigInt::from(x)).collect();
    let mut prec = 1;
    while prec < rel_prec {
        prec = (2 * prec).min(rel_prec);
        let m = p_pow(p, prec);
        let ay = mul_mod_modulus(field, unit, &y, &m);
        let mut two_minus: Vec<BigInt> = ay.iter().map(|c| -c).collect();
        two_minus[0] += 2;
        y = mul_mod_modulus(field, &y, &two_minus, &m);
    }
    let m = p_pow(p, rel_prec);
    y.iter().map(|c| c.mod_floor(&m)).collect()
}

impl fmt::Debug for Unramified {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Zero { abs_prec } => write!(f, "O({}^{})", self.prime(), abs_prec),
            Repr::Unit { v, unit, rel_prec } => {
                write!(f, "{}^{}·{:?} + O({}^{})", self.prime(), v, unit, self.prime(), v + rel_prec)
            }
        }
    }
}

impl PartialEq for Unramified {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.repr == other.repr
    }
}

impl Eq for Unramified {}

macro_rules! forward_ops {
    ($t:ty) => {
        impl Add for &$t {
            type Output = $t;
            fn add(self, rhs: &$t) -> $t {
                self.add_ref(rhs)
            }
        }
        impl Sub for &$t {
            type Output = $t;
            fn sub(self, rhs: &$t) -> $t {
                self.sub_ref(rhs)
            }
        }
        impl Mul for &$t {
            type Output = $t;
            fn mul(self, rhs: &$t) -> $t {
                self.mul_ref(rhs)
            }
        }
        impl Neg for &$t {
            type Output = $t;
            fn neg(self) -> $t {
                self.neg_ref()
            }
        }
    };
}

forward_ops!(Unramified);
pub(crate) use forward_ops;

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(p: u64) -> Arc<UnramifiedField> {
        UnramifiedField::new(p, 1).unwrap()
    }

    #[test]
    fn cancellation_loses_precision() {
        let k = qp(5);
        let b = Unramified::from_int(&k, &BigInt::from(1), 10);
        // 26 known mod 5^3: the difference 25 keeps one digit
        let a = Unramified::from_int(&k, &BigInt::from(26), 3);
        let d = &a - &b;
        assert_eq!(d.valuation(), Some(2));
        assert_eq!(d.rel_precision(), 1);
        // 1 + 5^3 known mod 5^3 cancels completely
        let a = Unramified::from_int(&k, &BigInt::from(126), 3);
        let d = &a - &b;
        assert!(d.is_zero());
        assert_eq!(d.abs_precision(), 3);
    }

    #[test]
    fn inverse_in_extension() {
        let k = UnramifiedField::new(3, 2).unwrap();
        let x = Unramified::from_coeffs(&k, &[BigInt::from(2), BigInt::from(7)], 12);
        let y = x.inv().unwrap();
        let one = &x * &y;
        assert!(one.congruent(&Unramified::one(&k, 12)));
    }

    #[test]
    fn json_round_trip() {
        let k = UnramifiedField::new(5, 2).unwrap();
        let x = Unramified::from_parts(&k, -2, &[BigInt::from(7), BigInt::from(30)], 4);
        assert_eq!(Unramified::from_json(&x.to_json()).unwrap(), x);
        let z = Unramified::zero(&k, 9);
        assert_eq!(Unramified::from_json(&z.to_json()).unwrap(), z);
    }
}
