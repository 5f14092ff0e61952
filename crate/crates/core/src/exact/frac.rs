//! Elements of Q/Z, used for torsion points and root-of-unity exponents.
//!
//! A value `a/b` stands for the root of unity `exp(2πi·a/b)`; all arithmetic
//! happens on the exponent, so nothing transcendental is ever evaluated.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ExactError;

/// A reduced fraction in `[0, 1)`.
/// Ordered by value.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Frac {
    num: i64,
    den: i64,
}

impl PartialOrd for Frac {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frac {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl Frac {
    pub const ZERO: Frac = Frac { num: 0, den: 1 };

    pub fn new(num: i64, den: i64) -> Frac {
        assert!(den != 0, "Q/Z value with zero denominator");
        let (mut num, mut den) = (num as i128, den as i128);
        if den < 0 {
            num = -num;
            den = -den;
        }
        let num = num.rem_euclid(den);
        let g = num.gcd(&den);
        Frac {
            num: (num / g) as i64,
            den: (den / g) as i64,
        }
    }

    pub fn from_ratio(r: Ratio<i64>) -> Frac {
        Frac::new(*r.numer(), *r.denom())
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    /// Multiplicative order of the associated root of unity.
    pub fn order(&self) -> i64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn add(&self, other: &Frac) -> Frac {
        let l = self.den.lcm(&other.den);
        let a = self.num as i128 * (l / self.den) as i128 + other.num as i128 * (l / other.den) as i128;
        Frac::new((a % l as i128) as i64, l)
    }

    pub fn neg(&self) -> Frac {
        Frac::new(-self.num, self.den)
    }

    pub fn sub(&self, other: &Frac) -> Frac {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: i64) -> Frac {
        let n = (self.num as i128 * k as i128).rem_euclid(self.den as i128);
        Frac::new(n as i64, self.den)
    }

    /// Exponent `k` with `self = k / m`; requires `den | m`.
    pub fn numerator_over(&self, m: i64) -> Option<i64> {
        if m % self.den != 0 {
            return None;
        }
        Some(self.num * (m / self.den))
    }

    /// Dot product `<v, t>` in Q/Z.
    pub fn dot(v: &[i64], t: &[Frac]) -> Frac {
        v.iter()
            .zip(t)
            .fold(Frac::ZERO, |acc, (&c, x)| acc.add(&x.scale(c)))
    }

    /// Least common multiple of the denominators.
    pub fn common_order(values: &[Frac]) -> i64 {
        values.iter().fold(1i64, |acc, x| acc.lcm(&x.den))
    }
}

impl fmt::Display for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Frac {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ExactError::Parse(format!("not a fraction: {s:?}"));
        match s.split_once('/') {
            Some((a, b)) => {
                let a: i64 = a.trim().parse().map_err(|_| bad())?;
                let b: i64 = b.trim().parse().map_err(|_| bad())?;
                if b == 0 {
                    return Err(bad());
                }
                Ok(Frac::new(a, b))
            }
            None => {
                let a: i64 = s.parse().map_err(|_| bad())?;
                Ok(Frac::new(a, 1))
            }
        }
    }
}

impl Serialize for Frac {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Frac {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
