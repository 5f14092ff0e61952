//! Finitely generated abelian groups, their torsion characters and their
//! continuous p-adic characters.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::exact::intmat::{smith_normal_form, SmithForm};
use crate::exact::{Cyclo, ExactError, Frac, IntMatrix};
use crate::padic::{self, PadicError, ResidueElement, Unramified, UnramifiedField};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CharError {
    #[error("Teichmüller part nontrivial")]
    TeichmullerPartNontrivial,
    #[error("coordinate outside the disc")]
    OutsideDisc,
    #[error("p-power torsion requires ramified coefficients: unsupported")]
    PPowerTorsion,
    #[error("value is not a unit")]
    NotUnit,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// `Z^rank ⊕ ⊕ Z/m_j` with `m_1 | m_2 | …`, each `m_j ≥ 2`.
#[derive(Clone, Debug)]
pub struct FgAbGroup {
    rank: usize,
    invariants: Vec<i64>,
    smith: Option<SmithForm>,
}

impl FgAbGroup {
    pub fn free(rank: usize) -> FgAbGroup {
        FgAbGroup { rank, invariants: Vec::new(), smith: None }
    }

    pub fn new(rank: usize, invariants: Vec<i64>) -> Result<FgAbGroup, CharError> {
        if invariants.iter().any(|&m| m < 2) || invariants.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(CharError::Shape("invariant factors must be ≥ 2 and form a divisibility chain".into()));
        }
        Ok(FgAbGroup { rank, invariants, smith: None })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn invariants(&self) -> &[i64] {
        &self.invariants
    }

    /// Witnesses `U·R·W = D` when built from relations.
    pub fn smith(&self) -> Option<&SmithForm> {
        self.smith.as_ref()
    }

    pub fn num_generators(&self) -> usize {
        self.rank + self.invariants.len()
    }

    pub fn to_json(&self) -> Value {
        json!({"rank": self.rank, "invariants": self.invariants})
    }
}

/// The group `Z^n / (row span of R)`, `n` the number of columns.
pub fn smith_decompose(relations: &IntMatrix) -> FgAbGroup {
    let s = smith_normal_form(relations);
    let factors = s.invariant_factors();
    FgAbGroup {
        rank: relations.cols() - s.rank,
        invariants: factors.into_iter().filter(|&d| d != 1).collect(),
        smith: Some(s),
    }
}

/// Character with values in roots of unity, stored as exponents in Q/Z.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TorsionCharacter {
    pub free: Vec<Frac>,
    pub torsion: Vec<Frac>,
}

impl TorsionCharacter {
    pub fn new(group: &FgAbGroup, free: Vec<Frac>, torsion: Vec<Frac>) -> Result<TorsionCharacter, CharError> {
        if free.len() != group.rank || torsion.len() != group.invariants.len() {
            return Err(CharError::Shape("character does not match the group".into()));
        }
        for (t, &m) in torsion.iter().zip(&group.invariants) {
            if m % t.den() != 0 {
                return Err(CharError::Shape(format!("value {t} on a generator of order {m}")));
            }
        }
        Ok(TorsionCharacter { free, torsion })
    }

    /// Character of `Z^d` only.
    pub fn on_free(free: Vec<Frac>) -> TorsionCharacter {
        TorsionCharacter { free, torsion: Vec::new() }
    }

    pub fn trivial(group: &FgAbGroup) -> TorsionCharacter {
        TorsionCharacter { free: vec![Frac::ZERO; group.rank], torsion: vec![Frac::ZERO; group.invariants.len()] }
    }

    pub fn values(&self) -> Vec<Frac> {
        self.free.iter().chain(&self.torsion).copied().collect()
    }

    pub fn order(&self) -> i64 {
        Frac::common_order(&self.values())
    }

    pub fn is_trivial(&self) -> bool {
        self.values().iter().all(Frac::is_zero)
    }

    pub fn mul(&self, other: &TorsionCharacter) -> TorsionCharacter {
        let add = |a: &[Frac], b: &[Frac]| a.iter().zip(b).map(|(x, y)| x.add(y)).collect();
        TorsionCharacter { free: add(&self.free, &other.free), torsion: add(&self.torsion, &other.torsion) }
    }

    pub fn pow(&self, n: i64) -> TorsionCharacter {
        TorsionCharacter {
            free: self.free.iter().map(|x| x.scale(n)).collect(),
            torsion: self.torsion.iter().map(|x| x.scale(n)).collect(),
        }
    }

    /// Coordinates as exact roots of unity.
    pub fn char_point(&self) -> CharPoint {
        CharPoint::Exact(self.values().into_iter().map(Cyclo::root_of_unity).collect())
    }

    pub fn to_json(&self) -> Value {
        let s = |v: &[Frac]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        json!({"free": s(&self.free), "torsion": s(&self.torsion)})
    }

    pub fn from_json(v: &Value) -> Result<TorsionCharacter, CharError> {
        let list = |key: &str| -> Result<Vec<Frac>, CharError> {
            match v.get(key) {
                None => Ok(Vec::new()),
                Some(Value::Array(a)) => a
                    .iter()
                    .map(|x| match x {
                        Value::String(s) => s.parse::<Frac>().map_err(CharError::from),
                        Value::Number(n) => n
                            .as_i64()
                            .map(|k| Frac::new(k, 1))
                            .ok_or_else(|| CharError::Shape(format!("bad value {n}"))),
                        _ => Err(CharError::Shape(format!("bad character value {x}"))),
                    })
                    .collect(),
                Some(_) => Err(CharError::Shape(format!("{key} must be a list"))),
            }
        };
        Ok(TorsionCharacter { free: list("free")?, torsion: list("torsion")? })
    }
}

/// Point of the character variety: one coordinate per generator.
#[derive(Clone, Debug, PartialEq)]
pub enum CharPoint {
    Exact(Vec<Cyclo>),
    Padic(Vec<Unramified>),
}

impl CharPoint {
    pub fn mul(&self, other: &CharPoint) -> CharPoint {
        match (self, other) {
            (CharPoint::Exact(a), CharPoint::Exact(b)) => CharPoint::Exact(a.iter().zip(b).map(|(x, y)| x.mul(y)).collect()),
            (CharPoint::Padic(a), CharPoint::Padic(b)) => {
                CharPoint::Padic(a.iter().zip(b).map(|(x, y)| x.mul_ref(y)).collect())
            }
            _ => panic!("mixing exact and p-adic character points"),
        }
    }

    pub fn inv(&self) -> Result<CharPoint, CharError> {
        Ok(match self {
            CharPoint::Exact(a) => CharPoint::Exact(a.iter().map(Cyclo::inv).collect::<Result<_, _>>()?),
            CharPoint::Padic(a) => CharPoint::Padic(a.iter().map(Unramified::inv).collect::<Result<_, _>>()?),
        })
    }

    pub fn is_identity(&self) -> bool {
        match self {
            CharPoint::Exact(a) => a.iter().all(Cyclo::is_one),
            CharPoint::Padic(a) => a.iter().all(|x| x.congruent(&Unramified::one(x.field(), x.rel_precision().max(1)))),
        }
    }
}

/// Continuous character with values in the units of `Q_{p^f}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuousCharacter {
    pub field: Arc<UnramifiedField>,
    pub free: Vec<Unramified>,
    pub torsion: Vec<Unramified>,
}

impl ContinuousCharacter {
    pub fn new(
        field: &Arc<UnramifiedField>,
        free: Vec<Unramified>,
        torsion: Vec<Unramified>,
    ) -> Result<ContinuousCharacter, CharError> {
        let lift = |x: Unramified| if x.degree() == field.degree() { x } else { x.embed(field) };
        let free: Vec<Unramified> = free.into_iter().map(lift).collect();
        let torsion: Vec<Unramified> = torsion.into_iter().map(lift).collect();
        if free.iter().chain(&torsion).any(|x| !x.is_unit()) {
            return Err(CharError::NotUnit);
        }
        Ok(ContinuousCharacter { field: field.clone(), free, torsion })
    }

    pub fn prime(&self) -> u64 {
        self.field.prime()
    }

    pub fn values(&self) -> impl Iterator<Item = &Unramified> {
        self.free.iter().chain(&self.torsion)
    }

    /// Associated residue character.
    pub fn residue(&self) -> Vec<ResidueElement> {
        self.values().map(|x| x.residue().expect("unit values")).collect()
    }

    pub fn has_trivial_residue(&self) -> bool {
        self.residue().iter().all(ResidueElement::is_one)
    }

    fn map(&self, f: impl Fn(&Unramified) -> Unramified) -> ContinuousCharacter {
        ContinuousCharacter {
            field: self.field.clone(),
            free: self.free.iter().map(&f).collect(),
            torsion: self.torsion.iter().map(&f).collect(),
        }
    }

    pub fn mul(&self, other: &ContinuousCharacter) -> ContinuousCharacter {
        let zip = |a: &[Unramified], b: &[Unramified]| a.iter().zip(b).map(|(x, y)| x.mul_ref(y)).collect();
        ContinuousCharacter {
            field: self.field.clone(),
            free: zip(&self.free, &other.free),
            torsion: zip(&self.torsion, &other.torsion),
        }
    }

    pub fn inv(&self) -> ContinuousCharacter {
        self.map(|x| x.inv().expect("unit values"))
    }

    pub fn char_point(&self) -> CharPoint {
        CharPoint::Padic(self.values().cloned().collect())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "free": self.free.iter().map(Unramified::to_json).collect::<Vec<_>>(),
            "torsion": self.torsion.iter().map(Unramified::to_json).collect::<Vec<_>>(),
        })
    }
}

/// `χ ↦ χ^n`, values raised exactly.
pub fn char_pow(chi: &ContinuousCharacter, n: i64) -> ContinuousCharacter {
    chi.map(|x| x.pow(n).expect("unit values"))
}

/// `(χ(γ_i) − 1)` on the free generators, for a character with trivial
/// residue whose values lie within `p^{−m}` of 1.
pub fn phi_coordinates(chi: &ContinuousCharacter, m: i64) -> Result<Vec<Unramified>, CharError> {
    if !chi.has_trivial_residue() {
        return Err(CharError::TeichmullerPartNontrivial);
    }
    let coords: Vec<Unramified> =
        chi.free.iter().map(|x| x.sub_ref(&Unramified::one(&chi.field, x.rel_precision()))).collect();
    if coords.iter().any(|c| c.valuation_bound() < m) {
        return Err(CharError::OutsideDisc);
    }
    Ok(coords)
}

/// Componentwise logarithm on the free generators.
pub fn char_log(chi: &ContinuousCharacter, prec: i64) -> Result<Vec<Unramified>, CharError> {
    if chi.torsion.iter().any(|x| !x.congruent(&Unramified::one(&chi.field, x.rel_precision()))) {
        return Err(CharError::TeichmullerPartNontrivial);
    }
    chi.free.iter().map(|x| padic::log(x, prec).map_err(|_| CharError::OutsideDisc)).collect()
}

/// Inverse of [`char_log`]: the character with free values `exp(ℓ_i)` and
/// trivial torsion values.
pub fn char_exp(
    field: &Arc<UnramifiedField>,
    coords: &[Unramified],
    torsion_gens: usize,
    prec: i64,
) -> Result<ContinuousCharacter, CharError> {
    let free = coords
        .iter()
        .map(|l| padic::exp(l, prec).map_err(|_| CharError::OutsideDisc))
        .collect::<Result<Vec<_>, _>>()?;
    ContinuousCharacter::new(field, free, vec![Unramified::one(field, prec); torsion_gens])
}

/// `χ = [χ̄] · χ₁` with `[χ̄]` the Teichmüller lift of the residue character
/// and `χ₁ ≡ 1 mod p`.
pub fn decompose_teichmuller(chi: &ContinuousCharacter) -> (ContinuousCharacter, ContinuousCharacter) {
    let teich = chi.map(|x| {
        padic::teichmuller(&x.residue().expect("unit values"), x.rel_precision()).expect("nonzero residue")
    });
    let pro_p = chi.mul(&teich.inv());
    (teich, pro_p)
}

/// Multiplicative order of `p` modulo `n` (`n ≥ 1`, coprime to `p`).
pub fn residue_degree(p: u64, n: u64) -> u32 {
    if n == 1 {
        return 1;
    }
    let mut x = p % n;
    let mut f = 1;
    while x != 1 {
        x = ((x as u128 * p as u128) % n as u128) as u64;
        f += 1;
    }
    f
}

/// `exp(2πi·t)` realised as `ω^{t·(q−1)}`, `ω` the Teichmüller lift of the
/// field's fixed generator; needs `den(t) | q − 1`.
pub fn root_of_unity(field: &Arc<UnramifiedField>, t: Frac, prec: i64) -> Result<Unramified, CharError> {
    let q1 = field.residue_size() - 1;
    let k = t.numerator_over(q1 as i64).ok_or(CharError::PPowerTorsion)?;
    if k == 0 {
        return Ok(Unramified::one(field, prec));
    }
    let xi = field.generator().pow(k as u64);
    Ok(padic::teichmuller(&xi, prec)?)
}

/// Image of an exact cyclotomic number under the embedding fixed by
/// [`root_of_unity`].
pub fn cyclo_to_padic(c: &Cyclo, field: &Arc<UnramifiedField>, prec: i64) -> Result<Unramified, CharError> {
    if let Some(r) = c.as_rational() {
        return Ok(if num_traits::Zero::is_zero(&r) {
            Unramified::zero(field, prec)
        } else {
            Unramified::from_rational(field, &r, prec)
        });
    }
    let m = c.conductor() as i64;
    let mut acc = Unramified::zero(field, prec);
    for (i, a) in c.coeffs().iter().enumerate() {
        if num_traits::Zero::is_zero(a) {
            continue;
        }
        let z = root_of_unity(field, Frac::new(i as i64, m), prec)?;
        acc = acc.add_ref(&z.mul_ref(&Unramified::from_rational(field, a, prec)));
    }
    Ok(acc)
}

/// Realises a torsion character of order prime to `p` over the smallest
/// `Q_{p^f}` containing its values.
pub fn embed_torsion(t: &TorsionCharacter, p: u64, prec: i64) -> Result<ContinuousCharacter, CharError> {
    let n = t.order() as u64;
    if n % p == 0 {
        return Err(CharError::PPowerTorsion);
    }
    let field = UnramifiedField::new(p, residue_degree(p, n))?;
    let conv = |v: &[Frac]| v.iter().map(|&x| root_of_unity(&field, x, prec)).collect::<Result<Vec<_>, _>>();
    ContinuousCharacter::new(&field, conv(&t.free)?, conv(&t.torsion)?)
}

/// Order of a root of unity in `Q_{p^f}` with order prime to `p`.
pub fn teichmuller_order(x: &Unramified) -> Option<u64> {
    x.residue()?.order()
}

/// `n` such that `p^n` is the largest power dividing `k`.
pub fn p_part(k: i64, p: u64) -> u32 {
    let mut k = k.unsigned_abs();
    let mut e = 0;
    while k > 0 && k % p == 0 {
        k /= p;
        e += 1;
    }
    e
}

/// Smallest `n` with `|χ(γ)^{p^n} − 1| ≤ p^{−m}` for all free generators.
pub fn contraction_exponent(chi: &ContinuousCharacter, m: i64) -> Option<u32> {
    let p = chi.prime();
    let mut cur = chi.clone();
    for n in 0..64 {
        let ok = cur.free.iter().all(|x| x.sub_ref(&Unramified::one(&chi.field, x.rel_precision())).valuation_bound() >= m);
        if ok {
            return Some(n);
        }
        cur = char_pow(&cur, p as i64);
    }
    None
}
