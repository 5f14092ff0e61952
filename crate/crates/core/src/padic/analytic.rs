use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::residue::{ResidueElement, UnramifiedField};
use super::unramified::{int_valuation, mul_mod_modulus, p_pow};
use super::{PadicError, Unramified};

/// Smallest valuation accepted by `exp` and by `log` (for `x − 1`).
pub fn exp_disc_min(p: u64) -> i64 {
    if p == 2 {
        2
    } else {
        1
    }
}

fn pow_mod(field: &UnramifiedField, base: &[BigInt], mut e: BigInt, m: &BigInt) -> Vec<BigInt> {
    let mut acc = vec![BigInt::zero(); base.len()];
    acc[0] = BigInt::one();
    let mut b = base.to_vec();
    let two = BigInt::from(2);
    while !e.is_zero() {
        if e.is_odd() {
            acc = mul_mod_modulus(field, &acc, &b, m);
        }
        b = mul_mod_modulus(field, &b, &b, m);
        e /= &two;
    }
    acc
}

fn inv_mod(a: &BigInt, m: &BigInt) -> BigInt {
    a.extended_gcd(m).x.mod_floor(m)
}

/// Teichmüller lift of a nonzero residue: the `(q−1)`-th root of unity
/// congruent to it, known modulo `p^prec`.
pub fn teichmuller(xi: &ResidueElement, prec: i64) -> Result<Unramified, PadicError> {
    if xi.is_zero() {
        return Err(PadicError::ZeroResidue);
    }
    assert!(prec >= 1, "precision must be positive");
    let field = xi.field();
    let m = p_pow(field.prime(), prec);
    let q = BigInt::from(field.residue_size());
    let mut t: Vec<BigInt> = xi.coeffs().iter().map(|&c| BigInt::from(c)).collect();
    loop {
        let next = pow_mod(field, &t, q.clone(), &m);
        if next == t {
            break;
        }
        t = next;
    }
    Ok(Unramified::from_coeffs(field, &t, prec))
}

/// `Σ x^j / j!` to absolute precision `min(n, abs_prec(x))`.
pub fn exp(x: &Unramified, n: i64) -> Result<Unramified, PadicError> {
    let field = x.field().clone();
    let p = field.prime();
    let target = n.min(x.abs_precision());
    if x.valuation_bound() < exp_disc_min(p) {
        return Err(PadicError::OutsideExpDisc);
    }
    if target <= 0 {
        return Ok(Unramified::zero(&field, 0));
    }
    let mut sum = vec![BigInt::zero(); field.degree() as usize];
    sum[0] = BigInt::one();
    let Some(v) = x.valuation() else {
        return Ok(Unramified::from_coeffs(&field, &sum, target));
    };
    let m = p_pow(p, target);
    let powers = power_table(p, target);
    let u = x.unit_coeffs().to_vec();
    let mut upow = sum.clone();
    // Σ x^j/j! = num / den with den the unit part of J!, so that a single
    // inverse is needed
    let mut num = sum;
    let mut den = BigInt::one();
    let mut fact_val = 0i64;
    let pm1 = p as i64 - 1;
    let mut j = 0i64;
    while j * v * pm1 - (j - 1) < target * pm1 {
        j += 1;
        let jb = BigInt::from(j);
        let vj = int_valuation(&jb, p);
        fact_val += vj;
        let unit = jb / &powers[vj as usize];
        den = (den * &unit).mod_floor(&m);
        upow = mul_mod_modulus(&field, &upow, &u, &m);
        let e = j * v - fact_val;
        for (s, c) in num.iter_mut().zip(&upow) {
            let mut t = &*s * &unit;
            if e < target {
                t += c * &powers[e as usize];
            }
            *s = t.mod_floor(&m);
        }
    }
    let inv = inv_mod(&den, &m);
    let sum: Vec<BigInt> = num.iter().map(|c| (c * &inv).mod_floor(&m)).collect();
    Ok(Unramified::from_coeffs(&field, &sum, target))
}

fn power_table(p: u64, n: i64) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = BigInt::one();
    for _ in 0..=n {
        out.push(acc.clone());
        acc *= p;
    }
    out
}

/// `Σ (−1)^{k+1} (x−1)^k / k` to absolute precision `min(n, abs_prec(x))`.
pub fn log(x: &Unramified, n: i64) -> Result<Unramified, PadicError> {
    let field = x.field().clone();
    let p = field.prime();
    let y = x.sub_ref(&Unramified::one(&field, x.rel_precision().max(1)));
    let target = n.min(y.abs_precision());
    if y.valuation_bound() < exp_disc_min(p) {
        return Err(PadicError::OutsideLogDisc);
    }
    let Some(w) = y.valuation() else {
        return Ok(Unramified::zero(&field, target));
    };
    if target <= w {
        return Ok(Unramified::zero(&field, target));
    }
    let m = p_pow(p, target);
    let powers = power_table(p, target);
    let u = y.unit_coeffs().to_vec();
    let mut upow = vec![BigInt::zero(); field.degree() as usize];
    upow[0] = BigInt::one();
    // running fraction num / den over the product of the unit parts of k
    let mut num = vec![BigInt::zero(); field.degree() as usize];
    let mut den = BigInt::one();
    let done = |k: i64| {
        let gap = k * w - target;
        gap >= 0 && (gap >= 63 || (p as u128).checked_pow(gap as u32).map_or(true, |x| x >= k as u128))
    };
    let mut k = 0i64;
    while k == 0 || !done(k) {
        k += 1;
        upow = mul_mod_modulus(&field, &upow, &u, &m);
        let kb = BigInt::from(k);
        let vk = int_valuation(&kb, p);
        let e = k * w - vk;
        if e < target {
            let unit = kb / &powers[vk as usize];
            let mut scale = &powers[e as usize] * &den;
            if k % 2 == 0 {
                scale = -scale;
            }
            for (s, c) in num.iter_mut().zip(&upow) {
                *s = (&*s * &unit + c * &scale).mod_floor(&m);
            }
            den = (den * unit).mod_floor(&m);
        }
    }
    let inv = inv_mod(&den, &m);
    let sum: Vec<BigInt> = num.iter().map(|c| (c * &inv).mod_floor(&m)).collect();
    Ok(Unramified::from_coeffs(&field, &sum, target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Padic;
    use proptest::prelude::*;

    fn int(p: u64, n: i64, prec: i64) -> Unramified {
        Padic::from_int_mod(p, &BigInt::from(n), prec).into_inner()
    }

    #[test]
    fn teichmuller_of_two_mod_25() {
        let k = UnramifiedField::new(5, 1).unwrap();
        let w = teichmuller(&k.residue(&[2]), 2).unwrap();
        assert_eq!(w, int(5, 7, 2));
        // 7^4 = 2401 ≡ 1 mod 25
        assert_eq!(w.pow(4).unwrap(), int(5, 1, 2));
        let one = teichmuller(&k.residue(&[1]), 30).unwrap();
        assert_eq!(one, int(5, 1, 30));
        assert!(teichmuller(&k.residue(&[0]), 3).is_err());
    }

    #[test]
    fn teichmuller_generator_order_in_q9() {
        let k = UnramifiedField::new(3, 2).unwrap();
        let w = teichmuller(&k.generator(), 25).unwrap();
        let one = Unramified::one(&k, 25);
        assert_eq!(w.pow(8).unwrap(), one);
        assert_ne!(w.pow(4).unwrap(), one);
    }

    #[test]
    fn teichmuller_is_multiplicative_on_small_fields() {
        for (p, f) in [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (7, 2)] {
            let k = UnramifiedField::new(p, f).unwrap();
            let lifts: Vec<(ResidueElement, Unramified)> =
                k.nonzero_residues().map(|x| (x.clone(), teichmuller(&x, 12).unwrap())).collect();
            for (a, wa) in &lifts {
                for (b, wb) in &lifts {
                    let ab = teichmuller(&a.mul(b), 12).unwrap();
                    assert_eq!(&(wa * wb), &ab, "p={p} f={f}");
                }
            }
        }
    }

    #[test]
    fn exp_of_five() {
        let e = exp(&int(5, 5, 10), 4).unwrap();
        assert_eq!(e, int(5, 456, 4));
        assert_eq!(log(&e, 4).unwrap(), int(5, 5, 4));
        assert_eq!(exp(&Unramified::zero(&UnramifiedField::new(5, 1).unwrap(), 9), 9).unwrap(), int(5, 1, 9));
        assert_eq!(log(&int(7, 1, 9), 9).unwrap(), Unramified::zero(&UnramifiedField::new(7, 1).unwrap(), 9));
    }

    #[test]
    fn exp_partial_sum_oracle() {
        // 1 + 5 + 25/2 + 125/6 mod 5^4, computed with plain modular inverses
        let m = 625i64;
        let inv = |a: i64| (1..m).find(|b| (a * b) % m == 1).unwrap();
        let expect = (1 + 5 + 25 * inv(2) + 125 * inv(6)) % m;
        assert_eq!(expect, 456);
    }

    #[test]
    fn disc_checks() {
        assert_eq!(exp(&int(5, 2, 5), 5), Err(PadicError::OutsideExpDisc));
        assert_eq!(exp(&int(2, 2, 5), 5), Err(PadicError::OutsideExpDisc));
        assert!(exp(&int(2, 4, 8), 8).is_ok());
        assert_eq!(log(&int(5, 2, 5), 5), Err(PadicError::OutsideLogDisc));
        assert_eq!(log(&int(2, 3, 5), 5), Err(PadicError::OutsideLogDisc));
    }

    #[test]
    fn exp_log_in_extension() {
        let k = UnramifiedField::new(3, 2).unwrap();
        let x = Unramified::from_coeffs(&k, &[BigInt::from(3), BigInt::from(6)], 20);
        let e = exp(&x, 20).unwrap();
        assert!(e.sub_ref(&Unramified::one(&k, 20)).valuation_bound() >= 1);
        assert_eq!(log(&e, 20).unwrap(), x);
    }

    fn admissible(p: u64) -> impl Strategy<Value = Unramified> {
        let lo = exp_disc_min(p);
        (lo..4i64, 1i64..i64::MAX / 4).prop_map(move |(v, u)| {
            Padic::from_bigint(p, &(p_pow(p, v) * u), 30).into_inner().truncate(30)
        })
    }

    proptest! {
        #[test]
        fn log_inverts_exp(x in admissible(3)) {
            prop_assert_eq!(log(&exp(&x, 30).unwrap(), 30).unwrap(), x.truncate(30));
        }

        #[test]
        fn exp_homomorphism_p2(x in admissible(2), y in admissible(2)) {
            let lhs = exp(&x.add_ref(&y), 30).unwrap();
            let rhs = exp(&x, 30).unwrap().mul_ref(&exp(&y, 30).unwrap());
            prop_assert!(lhs.congruent(&rhs));
        }

        #[test]
        fn log_of_square(x in admissible(5)) {
            let z = exp(&x, 30).unwrap();
            let two = int(5, 2, 30);
            prop_assert_eq!(log(&z.mul_ref(&z), 30).unwrap(), two.mul_ref(&log(&z, 30).unwrap()).truncate(30));
        }

        #[test]
        fn exp_precision_doubling(x in admissible(7)) {
            let lo = exp(&x, 10).unwrap();
            let hi = exp(&x, 20).unwrap();
            prop_assert_eq!(lo, hi.truncate(10));
        }
    }
}
