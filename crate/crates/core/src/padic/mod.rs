//! p-adic numbers at finite precision: `Q_p`, its unramified extensions,
//! Teichmüller lifts, exp and log.

mod analytic;
mod residue;
mod unramified;

use std::ops::{Add, Deref, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde_json::Value;

pub use analytic::{exp, exp_disc_min, log, teichmuller};
pub use residue::{is_prime, prime_factors, ResidueElement, UnramifiedField};
pub use unramified::{digits, Unramified};
pub(crate) use unramified::p_pow;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PadicError {
    #[error("{0} is not a prime")]
    InvalidPrime(u64),
    #[error("unsupported extension degree {0}")]
    InvalidDegree(u32),
    #[error("not invertible at this precision")]
    NotInvertible,
    #[error("outside exp disc")]
    OutsideExpDisc,
    #[error("outside log disc")]
    OutsideLogDisc,
    #[error("zero residue has no Teichmüller lift")]
    ZeroResidue,
    #[error("invalid scalar: {0}")]
    Parse(String),
}

/// Element of `Q_p`: an [`Unramified`] of degree one.
#[derive(Clone, PartialEq, Eq)]
pub struct Padic(Unramified);

impl Padic {
    pub fn from_unramified(x: Unramified) -> Padic {
        assert_eq!(x.degree(), 1, "not an element of Q_p");
        Padic(x)
    }

    fn base(p: u64) -> Arc<UnramifiedField> {
        UnramifiedField::new(p, 1).expect("valid prime")
    }

    /// `n` with relative precision `rel_prec`.
    pub fn from_int(p: u64, n: i64, rel_prec: i64) -> Padic {
        Padic(Unramified::from_int(&Padic::base(p), &BigInt::from(n), rel_prec))
    }

    pub fn from_bigint(p: u64, n: &BigInt, rel_prec: i64) -> Padic {
        Padic(Unramified::from_int(&Padic::base(p), n, rel_prec))
    }

    /// The integer `n` known modulo `p^abs_prec`.
    pub fn from_int_mod(p: u64, n: &BigInt, abs_prec: i64) -> Padic {
        Padic(Unramified::from_coeffs(&Padic::base(p), std::slice::from_ref(n), abs_prec))
    }

    pub fn from_rational(p: u64, r: &BigRational, rel_prec: i64) -> Padic {
        Padic(Unramified::from_rational(&Padic::base(p), r, rel_prec))
    }

    pub fn zero(p: u64, abs_prec: i64) -> Padic {
        Padic(Unramified::zero(&Padic::base(p), abs_prec))
    }

    pub fn into_inner(self) -> Unramified {
        self.0
    }

    pub fn as_unramified(&self) -> &Unramified {
        &self.0
    }

    /// Unit part as an integer in `[0, p^rel_prec)` (zero for zero).
    pub fn unit(&self) -> BigInt {
        self.0.unit_coeffs().first().cloned().unwrap_or_default()
    }

    /// Representative in `[0, p^abs_prec)` for integral elements.
    pub fn to_integer(&self) -> Option<BigInt> {
        let v = self.0.valuation_bound();
        if v < 0 {
            return None;
        }
        let abs = self.0.abs_precision();
        Some((self.unit() * p_pow(self.prime(), v)).mod_floor(&p_pow(self.prime(), abs)))
    }

    pub fn add_ref(&self, o: &Padic) -> Padic {
        Padic(self.0.add_ref(&o.0))
    }

    pub fn sub_ref(&self, o: &Padic) -> Padic {
        Padic(self.0.sub_ref(&o.0))
    }

    pub fn mul_ref(&self, o: &Padic) -> Padic {
        Padic(self.0.mul_ref(&o.0))
    }

    pub fn neg_ref(&self) -> Padic {
        Padic(self.0.neg_ref())
    }

    pub fn inv(&self) -> Result<Padic, PadicError> {
        self.0.inv().map(Padic)
    }

    pub fn pow(&self, e: i64) -> Result<Padic, PadicError> {
        self.0.pow(e).map(Padic)
    }

    pub fn truncate(&self, abs_prec: i64) -> Padic {
        Padic(self.0.truncate(abs_prec))
    }

    pub fn from_json(v: &Value) -> Result<Padic, PadicError> {
        let x = Unramified::from_json(v)?;
        if x.degree() != 1 {
            return Err(PadicError::Parse("expected an element of Q_p".into()));
        }
        Ok(Padic(x))
    }
}

impl Deref for Padic {
    type Target = Unramified;
    fn deref(&self) -> &Unramified {
        &self.0
    }
}

impl std::fmt::Debug for Padic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

unramified::forward_ops!(Padic);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cancellation_to_zero() {
        let x = Padic::from_int(5, 5, 6);
        let y = Padic::from_int(5, -5, 3);
        let s = &x + &y;
        assert!(s.is_zero());
        assert_eq!(s.abs_precision(), 4);
    }

    #[test]
    fn square_of_two() {
        let x = Padic::from_int(5, 2, 8);
        let y = &x * &x;
        assert_eq!(y.valuation(), Some(0));
        assert_eq!(y.to_integer(), Some(BigInt::from(4)));
    }

    proptest! {
        #[test]
        fn inverse_of_three_times_unit(k in 0i64..1_000_000, m in 1i64..30) {
            let x = Padic::from_bigint(3, &(BigInt::from(3) * (1 + 3 * k)), m);
            let y = x.inv().unwrap();
            prop_assert_eq!(y.valuation(), Some(-1));
            let one = &x * &y;
            prop_assert!(one.congruent(&Padic::from_int(3, 1, m)));
            prop_assert_eq!(one.rel_precision(), m);
        }

        #[test]
        fn ultrametric(a in -10_000i64..10_000, b in -10_000i64..10_000, p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            prop_assume!(a != 0 && b != 0);
            let x = Padic::from_int(p, a, 20);
            let y = Padic::from_int(p, b, 20);
            let vx = x.valuation().unwrap();
            let vy = y.valuation().unwrap();
            let s = &x + &y;
            if vx != vy {
                prop_assert_eq!(s.valuation(), Some(vx.min(vy)));
            } else {
                prop_assert!(s.valuation_bound() >= vx);
            }
            prop_assert_eq!((&x * &y).valuation(), Some(vx + vy));
            prop_assert_eq!((&x * &y).abs_value(), x.abs_value() * y.abs_value());
        }

        #[test]
        fn truncation_matches_lower_precision(a in 1i64..1_000_000_000, b in 1i64..1_000_000_000, m in 1i64..12) {
            let lo = |n| (Padic::from_int(7, a, n), Padic::from_int(7, b, n));
            let (x1, y1) = lo(m);
            let (x2, y2) = lo(2 * m);
            prop_assert_eq!(&x1 * &y1, (&x2 * &y2).truncate((&x1 * &y1).abs_precision()));
            prop_assert_eq!(x1.inv().unwrap(), x2.inv().unwrap().truncate(x1.inv().unwrap().abs_precision()));
            let s1 = &x1 + &y1;
            prop_assert!(s1.congruent(&(&x2 + &y2)));
        }
    }
}
