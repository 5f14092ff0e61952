//! Cohomology of rank-one local systems on finite cochain complexes of free
//! `Z[t^±]`-modules, jumping loci, and determinantal equations for them.

use num_integer::Integer;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::exact::cyclotomic::rank;
use crate::exact::{Cyclo, CyclotomicField, ExactError, Frac, Poly};
use crate::torsion::{solve, BinomialSystem, TorsionCoset};

/// Largest matrix side for symbolic minors.
pub const MINOR_SIZE_CAP: usize = 6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LociError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("differentials do not compose to zero at degree {0}")]
    NotAComplex(usize),
    #[error("invalid complex: {0}")]
    Invalid(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

type PolyMatrix = Vec<Vec<Poly>>;

/// `C^0 → C^1 → … → C^k`, with `D^i` an `n_{i+1} × n_i` matrix acting on
/// column vectors.
#[derive(Clone, Debug)]
pub struct TwistedComplex {
    nvars: usize,
    dims: Vec<usize>,
    differentials: Vec<PolyMatrix>,
}

fn mat_mul(a: &PolyMatrix, b: &PolyMatrix, nvars: usize, inner: usize) -> PolyMatrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Poly::zero(nvars), |acc, k| acc.add(&row[k].mul(&b[k][j]))))
                .collect()
        })
        .collect()
}

impl TwistedComplex {
    pub fn new(nvars: usize, dims: Vec<usize>, differentials: Vec<PolyMatrix>) -> Result<TwistedComplex, LociError> {
        if dims.len() != differentials.len() + 1 {
            return Err(LociError::Shape(format!("{} modules but {} differentials", dims.len(), differentials.len())));
        }
        for (i, d) in differentials.iter().enumerate() {
            if d.len() != dims[i + 1] || d.iter().any(|r| r.len() != dims[i]) {
                return Err(LociError::Shape(format!("D^{i} must be {} x {}", dims[i + 1], dims[i])));
            }
            if d.iter().flatten().any(|p| p.nvars() != nvars) {
                return Err(LociError::Shape(format!("D^{i} has entries in the wrong number of variables")));
            }
        }
        for i in 0..differentials.len().saturating_sub(1) {
            let prod = mat_mul(&differentials[i + 1], &differentials[i], nvars, dims[i + 1]);
            if prod.iter().flatten().any(|p| !p.is_zero()) {
                return Err(LociError::NotAComplex(i));
            }
        }
        Ok(TwistedComplex { nvars, dims, differentials })
    }

    fn loop_entry(nvars: usize, i: usize) -> Poly {
        Poly::var(nvars, i).sub(&Poly::one(nvars))
    }

    pub fn circle() -> TwistedComplex {
        TwistedComplex::wedge(1)
    }

    /// Bouquet of `n` circles: one vertex, `n` loops.
    pub fn wedge(n: usize) -> TwistedComplex {
        let d0 = (0..n).map(|i| vec![Self::loop_entry(n, i)]).collect();
        TwistedComplex::new(n, vec![1, n], vec![d0]).expect("valid complex")
    }

    pub fn torus() -> TwistedComplex {
        TwistedComplex::surface(1)
    }

    /// Closed orientable surface of genus `g` with its minimal cell structure;
    /// the top differential comes from the Fox derivatives of the product of
    /// commutators, abelianised.
    pub fn surface(g: usize) -> TwistedComplex {
        let n = 2 * g;
        let d0 = (0..n).map(|i| vec![Self::loop_entry(n, i)]).collect();
        let mut top = Vec::with_capacity(n);
        for k in 0..g {
            let (a, b) = (2 * k, 2 * k + 1);
            top.push(Self::loop_entry(n, b).neg());
            top.push(Self::loop_entry(n, a));
        }
        TwistedComplex::new(n, vec![1, n, 1], vec![d0, vec![top]]).expect("valid complex")
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn differentials(&self) -> &[PolyMatrix] {
        &self.differentials
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims.iter().enumerate().map(|(i, &n)| if i % 2 == 0 { n as i64 } else { -(n as i64) }).sum()
    }

    fn conductor(&self) -> u64 {
        self.differentials
            .iter()
            .flatten()
            .flatten()
            .flat_map(|p| p.terms().map(|(_, c)| c.conductor()).collect::<Vec<_>>())
            .fold(1, |a, b| a.lcm(&b))
    }

    /// `h^i` of the complex twisted by the character `t`.
    pub fn specialize(&self, t: &[Frac]) -> Result<Vec<usize>, LociError> {
        if t.len() != self.nvars {
            return Err(LociError::Shape(format!("character has {} values, complex has {} variables", t.len(), self.nvars)));
        }
        let m = (Frac::common_order(t) as u64).lcm(&self.conductor());
        let field = CyclotomicField::new(m);
        let ranks: Vec<usize> = self
            .differentials
            .iter()
            .map(|d| {
                let vals: Vec<Vec<Cyclo>> = d.iter().map(|row| row.iter().map(|p| p.eval_torsion(t, &field)).collect()).collect();
                rank(&vals)
            })
            .collect();
        Ok((0..self.dims.len())
            .map(|i| {
                let out = ranks.get(i).copied().unwrap_or(0);
                let inc = if i > 0 { ranks[i - 1] } else { 0 };
                self.dims[i] - out - inc
            })
            .collect())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vars": self.nvars,
            "dims": self.dims,
            "matrices": self.differentials.iter().map(|d| d.iter().map(|r| r.iter().map(Poly::to_json).collect::<Vec<_>>()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    /// Reads `{"vars", "matrices", "dims"?}` or `{"builtin": name, ...}`.
    pub fn from_json(v: &Value) -> Result<TwistedComplex, LociError> {
        let bad = |m: String| LociError::Invalid(m);
        if let Some(name) = v.get("builtin") {
            let count = |k: &str| v.get(k).and_then(Value::as_u64).map(|x| x as usize);
            return match name.as_str() {
                Some("circle") => Ok(TwistedComplex::circle()),
                Some("torus") => Ok(TwistedComplex::torus()),
                Some("wedge") => Ok(TwistedComplex::wedge(count("n").ok_or_else(|| bad("wedge needs n".into()))?)),
                Some("surface") => Ok(TwistedComplex::surface(count("genus").ok_or_else(|| bad("surface needs genus".into()))?)),
                _ => Err(bad(format!("unknown built-in complex {name}"))),
            };
        }
        let nvars = v.get("vars").and_then(Value::as_u64).ok_or_else(|| bad("complex needs vars".into()))? as usize;
        let mats = v.get("matrices").and_then(Value::as_array).ok_or_else(|| bad("complex needs matrices".into()))?;
        let mut differentials = Vec::new();
        for m in mats {
            let rows = m.as_array().ok_or_else(|| bad("matrix must be a list of rows".into()))?;
            let d: PolyMatrix = rows
                .iter()
                .map(|r| {
                    r.as_array()
                        .ok_or_else(|| bad("row must be a list of entries".into()))?
                        .iter()
                        .map(|e| Poly::from_json(e, nvars).map_err(LociError::from))
                        .collect()
                })
                .collect::<Result<_, _>>()?;
            differentials.push(d);
        }
        let dims = match v.get("dims") {
            Some(d) => d
                .as_array()
                .ok_or_else(|| bad("dims must be a list".into()))?
                .iter()
                .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| bad("dims must be integers".into())))
                .collect::<Result<Vec<_>, _>>()?,
            None => {
                let first = differentials.first().ok_or_else(|| bad("complex without differentials needs dims".into()))?;
                let mut dims = vec![first.first().map_or(0, Vec::len)];
                dims.extend(differentials.iter().map(Vec::len));
                dims
            }
        };
        TwistedComplex::new(nvars, dims, differentials)
    }
}

/// All characters of order dividing `m` on `d` generators, lexicographic.
pub fn torsion_grid(d: usize, m: i64) -> Vec<Vec<Frac>> {
    let total = (m as usize).pow(d as u32);
    (0..total)
        .map(|mut idx| {
            let mut t = vec![Frac::ZERO; d];
            for slot in t.iter_mut().rev() {
                *slot = Frac::new((idx % m as usize) as i64, m);
                idx /= m as usize;
            }
            t
        })
        .collect()
}

fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    if jobs == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool")
        .install(f)
}

/// Cohomology at every character of order dividing `m`, in grid order.
/// `jobs = 0` uses the global pool.
pub fn scan_profiles(c: &TwistedComplex, m: i64, jobs: usize) -> Result<Vec<(Vec<Frac>, Vec<usize>)>, LociError> {
    assert!(m >= 1, "order bound must be positive");
    let grid = torsion_grid(c.nvars, m);
    with_jobs(jobs, || {
        grid.into_par_iter()
            .map(|t| c.specialize(&t).map(|h| (t, h)))
            .collect::<Result<Vec<_>, _>>()
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JumpingLocusSample {
    pub degree: usize,
    pub threshold: usize,
    pub order_bound: i64,
    pub scanned: usize,
    pub hits: Vec<(Vec<Frac>, Vec<usize>)>,
    pub euler_characteristic: i64,
    pub euler_consistent: bool,
}

impl JumpingLocusSample {
    pub fn hit_points(&self) -> Vec<Vec<Frac>> {
        self.hits.iter().map(|(t, _)| t.clone()).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "i": self.degree,
            "j": self.threshold,
            "order_bound": self.order_bound,
            "scanned": self.scanned,
            "hits": self.hits.iter().map(|(t, h)| json!({
                "character": t.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                "h": h,
            })).collect::<Vec<_>>(),
            "euler_characteristic": self.euler_characteristic,
            "euler_consistent": self.euler_consistent,
        })
    }
}

/// Characters of order dividing `m` with `h^i > j`.
pub fn scan_torsion(c: &TwistedComplex, i: usize, j: usize, m: i64, jobs: usize) -> Result<JumpingLocusSample, LociError> {
    if i >= c.dims.len() {
        return Err(LociError::Shape(format!("no degree {i} in a complex of length {}", c.dims.len())));
    }
    let profiles = scan_profiles(c, m, jobs)?;
    let chi = c.euler_characteristic();
    let euler_consistent = profiles.iter().all(|(_, h)| {
        h.iter().enumerate().map(|(k, &x)| if k % 2 == 0 { x as i64 } else { -(x as i64) }).sum::<i64>() == chi
    });
    let scanned = profiles.len();
    let hits = profiles.into_iter().filter(|(_, h)| h[i] > j).collect();
    Ok(JumpingLocusSample { degree: i, threshold: j, order_bound: m, scanned, hits, euler_characteristic: chi, euler_consistent })
}

#[derive(Clone, Debug, PartialEq)]
pub enum FittingIdeal {
    /// Generators of an ideal with the same zero set; empty means the zero ideal.
    Generators(Vec<Poly>),
    SizeLimitExceeded { rows: usize, cols: usize },
}

impl FittingIdeal {
    pub fn to_json(&self) -> Value {
        match self {
            FittingIdeal::Generators(g) => json!({"generators": g.iter().map(Poly::to_json).collect::<Vec<_>>()}),
            FittingIdeal::SizeLimitExceeded { rows, cols } => json!({
                "refused": "size limit exceeded",
                "rows": rows,
                "cols": cols,
                "cap": MINOR_SIZE_CAP,
            }),
        }
    }
}

fn det(m: &[Vec<Poly>], nvars: usize) -> Poly {
    match m.len() {
        0 => Poly::one(nvars),
        1 => m[0][0].clone(),
        n => {
            let mut acc = Poly::zero(nvars);
            for c in 0..n {
                if m[0][c].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Poly>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(k, _)| k != c).map(|(_, p)| p.clone()).collect())
                    .collect();
                let term = m[0][c].mul(&det(&minor, nvars));
                acc = if c % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out.extend(subsets(n - 1, k));
    out.sort();
    out
}

fn push_unique(v: &mut Vec<Poly>, p: Poly) {
    if !v.contains(&p) {
        v.push(p);
    }
}

/// Removes repeated factors drawn from `pool`; the zero set is unchanged.
fn reduce_powers(g: &Poly, pool: &[Poly]) -> Poly {
    let mut g = g.clone();
    for f in pool {
        let sq = f.mul(f);
        while let Some(q) = g.exact_div(&sq) {
            g = q.mul(f);
        }
    }
    g.unit_normal()
}

/// Equations for `{t : h^i(t) > j}`: the minors of size `n_i − j` of
/// `diag(D^i, D^{i−1})`, cleaned up without changing their common zeros.
pub fn fitting_locus(c: &TwistedComplex, i: usize, j: usize) -> Result<FittingIdeal, LociError> {
    if i >= c.dims.len() {
        return Err(LociError::Shape(format!("no degree {i} in a complex of length {}", c.dims.len())));
    }
    let n = c.nvars;
    let ni = c.dims[i];
    let empty = PolyMatrix::new();
    let out = c.differentials.get(i).unwrap_or(&empty);
    let inc = if i > 0 { &c.differentials[i - 1] } else { &empty };
    let (r1, c1) = (c.dims.get(i + 1).copied().unwrap_or(0), ni);
    let (r2, c2) = (ni, if i > 0 { c.dims[i - 1] } else { 0 });
    let (rows, cols) = (r1 + r2, c1 + c2);
    if ni <= j {
        return Ok(FittingIdeal::Generators(vec![Poly::one(n)]));
    }
    let size = ni - j;
    if size > rows.min(cols) {
        return Ok(FittingIdeal::Generators(Vec::new()));
    }
    if rows.max(cols) > MINOR_SIZE_CAP {
        return Ok(FittingIdeal::SizeLimitExceeded { rows, cols });
    }
    let mut block = vec![vec![Poly::zero(n); cols]; rows];
    for (a, row) in out.iter().enumerate() {
        for (b, p) in row.iter().enumerate() {
            block[a][b] = p.clone();
        }
    }
    for (a, row) in inc.iter().enumerate() {
        for (b, p) in row.iter().enumerate() {
            block[r1 + a][c1 + b] = p.clone();
        }
    }
    let mut pool: Vec<Poly> = Vec::new();
    for p in block.iter().flatten().filter(|p| p.num_terms() > 1) {
        push_unique(&mut pool, p.unit_normal());
    }
    let mut gens: Vec<Poly> = Vec::new();
    for rs in subsets(rows, size) {
        for cs in subsets(cols, size) {
            let sub: Vec<Vec<Poly>> = rs.iter().map(|&r| cs.iter().map(|&k| block[r][k].clone()).collect()).collect();
            let d = det(&sub, n);
            if !d.is_zero() {
                push_unique(&mut gens, reduce_powers(&d, &pool));
            }
        }
    }
    if gens.iter().any(|g| g.num_terms() == 1) {
        return Ok(FittingIdeal::Generators(vec![Poly::one(n)]));
    }
    // a multiple of another generator adds nothing
    let all = gens;
    let kept = all
        .iter()
        .enumerate()
        .filter(|&(a, g)| !all.iter().enumerate().any(|(b, h)| b != a && h.num_terms() <= g.num_terms() && h != g && g.exact_div(h).is_some()))
        .map(|(_, g)| g.clone())
        .collect();
    Ok(FittingIdeal::Generators(kept))
}

#[derive(Clone, Debug, PartialEq)]
pub enum ShapeVerdict {
    Confirmed { cosets: Vec<TorsionCoset>, scan_agrees: Option<bool> },
    Undetermined { reason: String, evidence: Option<JumpingLocusSample> },
}

impl ShapeVerdict {
    pub fn to_json(&self) -> Value {
        match self {
            ShapeVerdict::Confirmed { cosets, scan_agrees } => json!({
                "verdict": "shape confirmed",
                "cosets": cosets.iter().map(TorsionCoset::to_json).collect::<Vec<_>>(),
                "scan_agrees": scan_agrees,
            }),
            ShapeVerdict::Undetermined { reason, evidence } => json!({
                "verdict": "shape undetermined",
                "reason": reason,
                "evidence": evidence.as_ref().map(JumpingLocusSample::to_json),
            }),
        }
    }
}

/// `c₁t^a + c₂t^b` with `−c₂/c₁` a root of unity, as the equation
/// `t^{a−b} = −c₂/c₁`.
fn as_binomial(p: &Poly) -> Option<(Vec<i64>, Frac)> {
    let terms: Vec<_> = p.terms().collect();
    if terms.len() != 2 {
        return None;
    }
    let (a, c1) = terms[0];
    let (b, c2) = terms[1];
    let ratio = c2.neg().div(c1).ok()?;
    let e = ratio.root_of_unity_exponent()?;
    Some((a.iter().zip(b).map(|(x, y)| x - y).collect(), e))
}

/// Decides whether the zero set of `gens` is a finite union of torsion
/// translated subtori; a scan, when supplied, is compared point by point.
pub fn shape_check(gens: &[Poly], nvars: usize, evidence: Option<&JumpingLocusSample>) -> ShapeVerdict {
    if gens.iter().any(|g| g.num_terms() == 1) {
        return ShapeVerdict::Confirmed {
            cosets: Vec::new(),
            scan_agrees: evidence.map(|e| e.hits.is_empty()),
        };
    }
    let mut eqs = Vec::new();
    for g in gens {
        match as_binomial(g) {
            Some(eq) => eqs.push(eq),
            None => {
                return ShapeVerdict::Undetermined {
                    reason: "non-binomial generators".into(),
                    evidence: evidence.cloned(),
                }
            }
        }
    }
    let sys = BinomialSystem::new(nvars, eqs).expect("binomials have nonzero exponent differences");
    let cosets = solve(&sys);
    let scan_agrees = evidence.map(|e| {
        let mut listed: Vec<Vec<Frac>> = cosets.iter().flat_map(|c| c.enumerate_torsion(e.order_bound)).collect();
        listed.sort();
        listed == e.hit_points()
    });
    ShapeVerdict::Confirmed { cosets, scan_agrees }
}

/// Fitting equations, torsion scan and shape check in one go.
pub fn shape_check_complex(c: &TwistedComplex, i: usize, j: usize, m: i64, jobs: usize) -> Result<ShapeVerdict, LociError> {
    let sample = scan_torsion(c, i, j, m, jobs)?;
    Ok(match fitting_locus(c, i, j)? {
        FittingIdeal::Generators(g) => shape_check(&g, c.nvars, Some(&sample)),
        FittingIdeal::SizeLimitExceeded { .. } => ShapeVerdict::Undetermined {
            reason: "size limit exceeded".into(),
            evidence: Some(sample),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::poly::int_poly;
    use proptest::prelude::*;

    fn f(a: i64, b: i64) -> Frac {
        Frac::new(a, b)
    }

    #[test]
    fn circle_cohomology() {
        let c = TwistedComplex::circle();
        assert_eq!(c.specialize(&[Frac::ZERO]).unwrap(), vec![1, 1]);
        assert_eq!(c.specialize(&[f(1, 3)]).unwrap(), vec![0, 0]);
        assert!(c.specialize(&[Frac::ZERO, Frac::ZERO]).is_err());
    }

    #[test]
    fn torus_cohomology_and_scan() {
        let c = TwistedComplex::torus();
        assert_eq!(c.specialize(&[Frac::ZERO, Frac::ZERO]).unwrap(), vec![1, 2, 1]);
        let s = scan_torsion(&c, 1, 0, 6, 2).unwrap();
        assert_eq!(s.scanned, 36);
        assert_eq!(s.hit_points(), vec![vec![Frac::ZERO, Frac::ZERO]]);
        assert!(s.euler_consistent);
        for (t, h) in scan_profiles(&c, 6, 1).unwrap() {
            if t.iter().any(|x| !x.is_zero()) {
                assert_eq!(h, vec![0, 0, 0]);
            }
        }
    }

    #[test]
    fn wedge_scan() {
        let c = TwistedComplex::wedge(3);
        let s = scan_torsion(&c, 1, 2, 6, 0).unwrap();
        assert_eq!(s.hit_points(), vec![vec![Frac::ZERO; 3]]);
        assert_eq!(s.hits[0].1, vec![1, 3]);
        assert!(s.euler_consistent);
        assert_eq!(s.euler_characteristic, -2);
        assert!(scan_torsion(&c, 1, 3, 4, 0).unwrap().hits.is_empty());
    }

    #[test]
    fn surfaces_are_complexes() {
        let c = TwistedComplex::surface(2);
        assert_eq!(c.specialize(&[Frac::ZERO; 4]).unwrap(), vec![1, 4, 1]);
        assert_eq!(c.specialize(&[f(1, 2), Frac::ZERO, Frac::ZERO, Frac::ZERO]).unwrap(), vec![0, 2, 0]);
        let bad = vec![vec![vec![int_poly(1, &[(1, &[1])])]], vec![vec![int_poly(1, &[(1, &[0])])]]];
        assert_eq!(TwistedComplex::new(1, vec![1, 1, 1], bad).unwrap_err(), LociError::NotAComplex(0));
    }

    #[test]
    fn fitting_examples() {
        let x1 = int_poly(1, &[(1, &[1]), (-1, &[0])]);
        assert_eq!(fitting_locus(&TwistedComplex::circle(), 0, 0).unwrap(), FittingIdeal::Generators(vec![x1]));
        let FittingIdeal::Generators(g) = fitting_locus(&TwistedComplex::torus(), 1, 0).unwrap() else { panic!() };
        assert_eq!(g.len(), 2);
        assert!(g.contains(&int_poly(2, &[(1, &[1, 0]), (-1, &[0, 0])])));
        assert!(g.contains(&int_poly(2, &[(1, &[0, 1]), (-1, &[0, 0])])));
        assert_eq!(fitting_locus(&TwistedComplex::torus(), 1, 2).unwrap(), FittingIdeal::Generators(vec![Poly::one(2)]));
        assert!(matches!(fitting_locus(&TwistedComplex::wedge(6), 1, 0).unwrap(), FittingIdeal::SizeLimitExceeded { .. }));
    }

    #[test]
    fn shape_examples() {
        let v = shape_check_complex(&TwistedComplex::torus(), 1, 0, 6, 0).unwrap();
        let ShapeVerdict::Confirmed { cosets, scan_agrees } = v else { panic!() };
        assert_eq!(cosets.len(), 1);
        assert_eq!(cosets[0].dim(), 0);
        assert_eq!(cosets[0].translate(), &[Frac::ZERO, Frac::ZERO]);
        assert_eq!(scan_agrees, Some(true));
        let ShapeVerdict::Confirmed { cosets, .. } = shape_check(&[int_poly(2, &[(1, &[1, 1]), (-1, &[0, 0])])], 2, None) else { panic!() };
        assert_eq!(cosets.len(), 1);
        assert_eq!(cosets[0].dim(), 1);
        let v = shape_check(&[int_poly(2, &[(1, &[1, 0]), (1, &[0, 1]), (-2, &[0, 0])])], 2, None);
        assert!(matches!(v, ShapeVerdict::Undetermined { ref reason, .. } if reason == "non-binomial generators"));
    }

    #[test]
    fn json_round_trip() {
        let c = TwistedComplex::surface(1);
        let back = TwistedComplex::from_json(&c.to_json()).unwrap();
        assert_eq!(back.to_json(), c.to_json());
        let w = TwistedComplex::from_json(&json!({"builtin": "wedge", "n": 2})).unwrap();
        assert_eq!(w.dims(), &[1, 2]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn galois_conjugates_agree(a in 0i64..12, b in 0i64..12, k in prop::sample::select(vec![1i64, 5, 7, 11])) {
            let c = TwistedComplex::surface(1);
            let t = vec![f(a, 12), f(b, 12)];
            let tk: Vec<Frac> = t.iter().map(|x| x.scale(k)).collect();
            prop_assert_eq!(c.specialize(&t).unwrap(), c.specialize(&tk).unwrap());
        }

        #[test]
        fn fitting_zero_set_matches_scan(n in 1usize..=3, j in 0usize..3, m in 1i64..=4) {
            let c = TwistedComplex::wedge(n);
            let FittingIdeal::Generators(g) = fitting_locus(&c, 1, j).unwrap() else { unreachable!() };
            let field = CyclotomicField::new(m as u64);
            for (t, h) in scan_profiles(&c, m, 0).unwrap() {
                let vanish = g.iter().all(|p| p.eval_torsion(&t, &field).is_zero());
                prop_assert_eq!(vanish, h[1] > j);
            }
        }
    }
}
