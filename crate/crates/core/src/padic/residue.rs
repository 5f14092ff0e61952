//! Finite fields `F_{p^f}` and the deterministic modulus shared with the
//! unramified extension `Q_{p^f}`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use super::PadicError;

/// The unramified extension of degree `f`, described by its modulus.
///
/// The modulus is the smallest monic irreducible of degree `f` over `F_p`,
/// ordered lexicographically by `(c_{f-1}, …, c_0)`; the integer polynomial
/// with the same coefficients in `[0, p)` defines `Q_{p^f}`.
pub struct UnramifiedField {
    p: u64,
    f: u32,
    modulus: Vec<u64>,
    generator: OnceLock<Vec<u64>>,
}

impl UnramifiedField {
    pub fn new(p: u64, f: u32) -> Result<Arc<UnramifiedField>, PadicError> {
        if p < 2 || !is_prime(p) {
            return Err(PadicError::InvalidPrime(p));
        }
        if f == 0 {
            return Err(PadicError::InvalidDegree(f));
        }
        let q = (p as u128).checked_pow(f).filter(|&q| q < (1u128 << 62));
        if q.is_none() {
            return Err(PadicError::InvalidDegree(f));
        }
        Ok(Arc::new(UnramifiedField {
            p,
            f,
            modulus: smallest_irreducible(p, f),
            generator: OnceLock::new(),
        }))
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.f
    }

    /// Residue field size `p^f`.
    pub fn residue_size(&self) -> u64 {
        self.p.pow(self.f)
    }

    /// Monic modulus, coefficients from the constant term up (length f+1).
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// The first element (in base-p enumeration order) generating `F_q^×`.
    pub fn generator(self: &Arc<Self>) -> ResidueElement {
        let coeffs = self
            .generator
            .get_or_init(|| {
                let q = self.residue_size();
                let factors = prime_factors(q - 1);
                (1..q)
                    .map(|k| self.digits_of(k))
                    .find(|c| {
                        let x = ResidueElement { field: self.clone(), coeffs: c.clone() };
                        factors.iter().all(|&l| !x.pow((q - 1) / l).is_one())
                    })
                    .expect("multiplicative group of a finite field is cyclic")
            })
            .clone();
        ResidueElement { field: self.clone(), coeffs }
    }

    fn digits_of(&self, mut k: u64) -> Vec<u64> {
        (0..self.f)
            .map(|_| {
                let d = k % self.p;
                k /= self.p;
                d
            })
            .collect()
    }

    /// Residue element from its coefficient list (reduced mod p, padded).
    pub fn residue(self: &Arc<Self>, coeffs: &[u64]) -> ResidueElement {
        let mut c: Vec<u64> = coeffs.iter().map(|x| x % self.p).collect();
        c = fp_poly_rem(&c, &self.modulus, self.p);
        c.resize(self.f as usize, 0);
        ResidueElement { field: self.clone(), coeffs: c }
    }

    /// All nonzero residues, in base-p enumeration order.
    pub fn nonzero_residues(self: &Arc<Self>) -> impl Iterator<Item = ResidueElement> + '_ {
        (1..self.residue_size()).map(move |k| ResidueElement { field: self.clone(), coeffs: self.digits_of(k) })
    }
}

impl PartialEq for UnramifiedField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.f == other.f
    }
}

impl Eq for UnramifiedField {}

impl fmt::Debug for UnramifiedField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q_{{{}^{}}}", self.p, self.f)
    }
}

/// Element of `F_{p^f}`, coefficients relative to `1, x, …, x^{f−1}`.
#[derive(Clone)]
pub struct ResidueElement {
    field: Arc<UnramifiedField>,
    coeffs: Vec<u64>,
}

impl ResidueElement {
    pub fn field(&self) -> &Arc<UnramifiedField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    pub fn one(field: &Arc<UnramifiedField>) -> ResidueElement {
        field.residue(&[1])
    }

    pub fn mul(&self, other: &ResidueElement) -> ResidueElement {
        let p = self.field.p;
        let prod = fp_poly_mul(&self.coeffs, &other.coeffs, p);
        self.field.residue(&prod)
    }

    pub fn pow(&self, mut e: u64) -> ResidueElement {
        let mut base = self.clone();
        let mut acc = ResidueElement::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self) -> Result<ResidueElement, PadicError> {
        if self.is_zero() {
            return Err(PadicError::NotInvertible);
        }
        Ok(self.pow(self.field.residue_size() - 2))
    }

    /// Multiplicative order; `None` for zero.
    pub fn order(&self) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let mut n = self.field.residue_size() - 1;
        for l in prime_factors(n) {
            while n % l == 0 && self.pow(n / l).is_one() {
                n /= l;
            }
        }
        Some(n)
    }
}

impl PartialEq for ResidueElement {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.coeffs == other.coeffs
    }
}

impl Eq for ResidueElement {}

impl fmt::Debug for ResidueElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} in F_{}^{}", self.coeffs, self.field.p, self.field.f)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn fp_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(x, y, p)) % p;
        }
    }
    fp_trim(out)
}

fn fp_inv(a: u64, p: u64) -> u64 {
    // p prime
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    r
}

fn fp_poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let m = fp_trim(m.to_vec());
    let mut r = fp_trim(a.to_vec());
    let lead_inv = fp_inv(*m.last().expect("nonzero modulus"), p);
    while r.len() >= m.len() {
        let c = mulmod(*r.last().expect("nonempty"), lead_inv, p);
        let shift = r.len() - m.len();
        for (j, &mj) in m.iter().enumerate() {
            r[shift + j] = (r[shift + j] + p - mulmod(c, mj, p)) % p;
        }
        r = fp_trim(r);
    }
    r
}

fn fp_poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (fp_trim(a.to_vec()), fp_trim(b.to_vec()));
    while !b.is_empty() {
        let r = fp_poly_rem(&a, &b, p);
        a = std::mem::replace(&mut b, r);
    }
    a
}

fn fp_poly_powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = fp_poly_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_poly_rem(&fp_poly_mul(&acc, &b, p), m, p);
        }
        b = fp_poly_rem(&fp_poly_mul(&b, &b, p), m, p);
        e >>= 1;
    }
    acc
}

/// Ben-Or: a monic g of degree f is irreducible iff gcd(x^{p^i} − x, g) = 1
/// for every i ≤ f/2.
fn is_irreducible(g: &[u64], p: u64) -> bool {
    let f = g.len() - 1;
    let mut xp = vec![0u64, 1];
    for _ in 1..=f / 2 {
        xp = fp_poly_powmod(&xp, p, g, p);
        let mut h = xp.clone();
        h.resize(h.len().max(2), 0);
        h[1] = (h[1] + p - 1) % p;
        let d = fp_poly_gcd(&h, g, p);
        if d.len() != 1 {
            return false;
        }
    }
    true
}

fn smallest_irreducible(p: u64, f: u32) -> Vec<u64> {
    let total = p.pow(f);
    for k in 0..total {
        let mut g: Vec<u64> = Vec::with_capacity(f as usize + 1);
        let mut r = k;
        for _ in 0..f {
            g.push(r % p);
            r /= p;
        }
        g.push(1);
        if is_irreducible(&g, p) {
            return g;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_moduli() {
        assert_eq!(UnramifiedField::new(5, 1).unwrap().modulus(), &[0, 1]);
        // x^2 + 1 is irreducible mod 3
        assert_eq!(UnramifiedField::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
        // x^2 + x + 1 is the only irreducible quadratic mod 2
        assert_eq!(UnramifiedField::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        // mod 5 the squares are 1, 4 so x^2 + 2 is irreducible
        assert_eq!(UnramifiedField::new(5, 2).unwrap().modulus(), &[2, 0, 1]);
    }

    #[test]
    fn generator_has_full_order() {
        for (p, f) in [(2, 1), (2, 2), (3, 2), (5, 2), (7, 1), (13, 2)] {
            let k = UnramifiedField::new(p, f).unwrap();
            let g = k.generator();
            assert_eq!(g.order(), Some(k.residue_size() - 1));
        }
    }

    #[test]
    fn residue_group_is_cyclic_of_order_q_minus_1() {
        let k = UnramifiedField::new(3, 2).unwrap();
        for x in k.nonzero_residues() {
            assert!(x.pow(8).is_one());
            assert!(x.mul(&x.inv().unwrap()).is_one());
        }
        assert_eq!(k.nonzero_residues().count(), 8);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(UnramifiedField::new(4, 1).is_err());
        assert!(UnramifiedField::new(5, 0).is_err());
    }
}
