//! Dense integer matrices: Smith and Hermite normal forms with witnesses.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};

use super::ExactError;

/// Row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Builds from rows; an empty slice gives a `0 x cols` matrix.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Result<IntMatrix, ExactError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(ExactError::Shape(format!(
                    "row of length {} in a matrix with {} columns",
                    r.len(),
                    cols
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(IntMatrix { rows: rows.len(), cols, data })
    }

    pub fn diagonal(entries: &[i64]) -> IntMatrix {
        let mut m = IntMatrix::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut s: i128 = 0;
                for k in 0..self.cols {
                    s += self[(i, k)] as i128 * other[(k, j)] as i128;
                }
                out[(i, j)] = narrow(s);
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|j| narrow((0..self.rows).map(|i| v[i] as i128 * self[(i, j)] as i128).sum()))
            .collect()
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| narrow((0..self.cols).map(|j| self[(i, j)] as i128 * v[j] as i128).sum()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Determinant by Bareiss elimination.
    pub fn determinant(&self) -> i64 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> = (0..n)
            .map(|i| self.row(i).iter().map(|&x| x as i128).collect())
            .collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        narrow(sign * a[n - 1][n - 1])
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.determinant().abs() == 1
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix, ExactError> {
        if !self.is_unimodular() {
            return Err(ExactError::NotUnimodular);
        }
        let n = self.rows;
        let mut a: Vec<Vec<Ratio<i128>>> = (0..n)
            .map(|i| {
                let mut r: Vec<Ratio<i128>> =
                    self.row(i).iter().map(|&x| Ratio::from_integer(x as i128)).collect();
                r.extend((0..n).map(|j| if i == j { Ratio::one() } else { Ratio::zero() }));
                r
            })
            .collect();
        for k in 0..n {
            let piv = (k..n).find(|&i| !a[i][k].is_zero()).expect("unimodular matrix is invertible");
            a.swap(piv, k);
            let inv = a[k][k].recip();
            for x in a[k].iter_mut() {
                *x *= inv;
            }
            for i in 0..n {
                if i != k && !a[i][k].is_zero() {
                    let f = a[i][k];
                    for j in 0..2 * n {
                        let t = a[k][j] * f;
                        a[i][j] -= t;
                    }
                }
            }
        }
        let mut out = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let x = a[i][n + j];
                debug_assert!(x.is_integer());
                out[(i, j)] = narrow(x.to_integer());
            }
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        smith_normal_form(self).rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: i64) {
        for j in 0..self.cols {
            let v = self[(dst, j)] as i128 + k as i128 * self[(src, j)] as i128;
            self[(dst, j)] = narrow(v);
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: i64) {
        for i in 0..self.rows {
            let v = self[(i, dst)] as i128 + k as i128 * self[(i, src)] as i128;
            self[(i, dst)] = narrow(v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)];
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

fn narrow(x: i128) -> i64 {
    i64::try_from(x).expect("integer overflow in lattice computation")
}

/// `left * input * right == diag`, with `left`, `right` unimodular and the
/// nonzero diagonal entries positive and forming a divisibility chain.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diag: IntMatrix,
    pub left: IntMatrix,
    pub right: IntMatrix,
    pub rank: usize,
}

impl SmithForm {
    /// Nonzero diagonal entries, in order.
    pub fn invariant_factors(&self) -> Vec<i64> {
        (0..self.rank).map(|i| self.diag[(i, i)]).collect()
    }
}

pub fn smith_normal_form(input: &IntMatrix) -> SmithForm {
    let (m, n) = (input.rows, input.cols);
    let mut a = input.clone();
    let mut left = IntMatrix::identity(m);
    let mut right = IntMatrix::identity(n);
    let mut rank = 0;
    for k in 0..m.min(n) {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in k..m {
                for j in k..n {
                    let x = a[(i, j)];
                    if x != 0 && best.map_or(true, |(bi, bj)| x.abs() < a[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return SmithForm { diag: a, left, right, rank };
            };
            a.swap_rows(k, pi);
            left.swap_rows(k, pi);
            a.swap_cols(k, pj);
            right.swap_cols(k, pj);

            let piv = a[(k, k)];
            let mut dirty = false;
            for i in k + 1..m {
                let q = Integer::div_floor(&a[(i, k)], &piv);
                if q != 0 {
                    a.add_row(i, k, -q);
                    left.add_row(i, k, -q);
                }
                dirty |= a[(i, k)] != 0;
            }
            for j in k + 1..n {
                let q = Integer::div_floor(&a[(k, j)], &piv);
                if q != 0 {
                    a.add_col(j, k, -q);
                    right.add_col(j, k, -q);
                }
                dirty |= a[(k, j)] != 0;
            }
            if dirty {
                continue;
            }
            let bad_row = (k + 1..m).find(|&i| (k + 1..n).any(|j| a[(i, j)] % piv != 0));
            if let Some(i) = bad_row {
                a.add_row(k, i, 1);
                left.add_row(k, i, 1);
                continue;
            }
            break;
        }
        if a[(k, k)] < 0 {
            a.negate_row(k);
            left.negate_row(k);
        }
        rank += 1;
    }
    SmithForm { diag: a, left, right, rank }
}

/// Row-style Hermite normal form `transform * input == hnf`.
///
/// Zero rows of the result are dropped, so `hnf` has `rank` rows; pivots are
/// positive and entries above each pivot lie in `[0, pivot)`.
#[derive(Clone, Debug)]
pub struct HermiteForm {
    pub hnf: IntMatrix,
    pub transform: IntMatrix,
    pub pivots: Vec<usize>,
}

pub fn hermite_normal_form(input: &IntMatrix) -> HermiteForm {
    let (m, n) = (input.rows, input.cols);
    let mut a = input.clone();
    let mut t = IntMatrix::identity(m);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        loop {
            let best = (r..m)
                .filter(|&i| a[(i, c)] != 0)
                .min_by_key(|&i| a[(i, c)].abs());
            let Some(bi) = best else { break };
            a.swap_rows(r, bi);
            t.swap_rows(r, bi);
            let piv = a[(r, c)];
            let mut done = true;
            for i in r + 1..m {
                let q = Integer::div_floor(&a[(i, c)], &piv);
                if q != 0 {
                    a.add_row(i, r, -q);
                    t.add_row(i, r, -q);
                }
                done &= a[(i, c)] == 0;
            }
            if done {
                break;
            }
        }
        if a[(r, c)] == 0 {
            continue;
        }
        if a[(r, c)] < 0 {
            a.negate_row(r);
            t.negate_row(r);
        }
        let piv = a[(r, c)];
        for i in 0..r {
            let q = Integer::div_floor(&a[(i, c)], &piv);
            if q != 0 {
                a.add_row(i, r, -q);
                t.add_row(i, r, -q);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let hnf = IntMatrix::from_rows(&a.to_rows()[..r], n).expect("consistent shape");
    HermiteForm { hnf, transform: t, pivots }
}

/// Integer coefficients expressing `v` in the rows of a Hermite basis, if `v`
/// lies in the lattice they span.
pub fn lattice_coordinates(h: &HermiteForm, v: &[i64]) -> Option<Vec<i64>> {
    let mut rest: Vec<i64> = v.to_vec();
    let mut coords = Vec::with_capacity(h.pivots.len());
    for (i, &c) in h.pivots.iter().enumerate() {
        let piv = h.hnf[(i, c)];
        if rest[c] % piv != 0 {
            return None;
        }
        let q = rest[c] / piv;
        for (j, x) in rest.iter_mut().enumerate() {
            *x = narrow(*x as i128 - q as i128 * h.hnf[(i, j)] as i128);
        }
        coords.push(q);
    }
    rest.iter().all(|&x| x == 0).then_some(coords)
}

/// True when `Z^n / rowspan` is torsion-free.
pub fn is_saturated(basis: &IntMatrix) -> bool {
    let s = smith_normal_form(basis);
    s.invariant_factors().iter().all(|&d| d == 1)
}

pub fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), cols).unwrap()
    }

    #[test]
    fn smith_of_coprime_diagonal() {
        let s = smith_normal_form(&m(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.invariant_factors(), vec![1, 6]);
    }

    #[test]
    fn smith_of_rank_one() {
        let r = m(&[&[2, 4], &[4, 8]]);
        let s = smith_normal_form(&r);
        assert_eq!(s.invariant_factors(), vec![2]);
        assert_eq!(s.left.mul(&r).mul(&s.right), s.diag);
    }

    #[test]
    fn hermite_example() {
        let h = hermite_normal_form(&m(&[&[4, 6], &[2, 1]]));
        assert_eq!(h.hnf.to_rows(), vec![vec![2, 1], vec![0, 4]]);
        assert_eq!(lattice_coordinates(&h, &[2, 5]), Some(vec![1, 1]));
        assert_eq!(lattice_coordinates(&h, &[1, 0]), None);
    }

    #[test]
    fn inverse_and_determinant() {
        let u = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(u.determinant(), 1);
        let inv = u.inverse_unimodular().unwrap();
        assert_eq!(u.mul(&inv), IntMatrix::identity(2));
        assert!(m(&[&[2, 0], &[0, 1]]).inverse_unimodular().is_err());
    }

    proptest! {
        #[test]
        fn smith_witnesses_hold(entries in proptest::collection::vec(-9i64..10, 12), rows in 1usize..4) {
            let cols = 12 / rows.max(1);
            let cols = cols.min(4);
            let data: Vec<Vec<i64>> = (0..rows).map(|i| entries[i * cols..(i + 1) * cols].to_vec()).collect();
            let r = IntMatrix::from_rows(&data, cols).unwrap();
            let s = smith_normal_form(&r);
            prop_assert_eq!(s.left.mul(&r).mul(&s.right), s.diag.clone());
            prop_assert!(s.left.is_unimodular());
            prop_assert!(s.right.is_unimodular());
            let f = s.invariant_factors();
            for w in f.windows(2) {
                prop_assert_eq!(w[1] % w[0], 0);
            }
            for i in 0..rows {
                for j in 0..cols {
                    if i != j || i >= s.rank {
                        prop_assert_eq!(s.diag[(i, j)], 0);
                    }
                }
            }
        }

        #[test]
        fn hermite_is_canonical(entries in proptest::collection::vec(-9i64..10, 9)) {
            let data: Vec<Vec<i64>> = (0..3).map(|i| entries[i * 3..(i + 1) * 3].to_vec()).collect();
            let r = IntMatrix::from_rows(&data, 3).unwrap();
            let h = hermite_normal_form(&r);
            prop_assert_eq!(h.hnf.rows(), r.rank());
            // same lattice: every input row is expressible, and vice versa
            for row in r.to_rows() {
                prop_assert!(lattice_coordinates(&h, &row).is_some());
            }
            prop_assert!(h.transform.is_unimodular());
        }
    }
}
