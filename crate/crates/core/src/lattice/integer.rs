//! Arbitrary-precision integer matrices with Smith and Hermite normal forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{Field, Matrix, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntegerMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn scalar(n: usize, s: i64) -> Self {
        let mut m = IntegerMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::from(s);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        Ok(IntegerMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<i64>], rows: usize) -> Result<Self> {
        let mut m = IntegerMatrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    found: c.len(),
                });
            }
            for (i, &x) in c.iter().enumerate() {
                m.data[i * cols.len() + j] = BigInt::from(x);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_i64_rows(&self) -> Result<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j).to_i64().ok_or(Error::Overflow))
                    .collect()
            })
            .collect()
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntegerMatrix {
        let mut t = IntegerMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn to_rational(&self) -> Matrix {
        Matrix::from_rows(
            (0..self.rows)
                .map(|i| {
                    (0..self.cols)
                        .map(|j| Rat::from_integer(self.get(i, j).clone()))
                        .collect()
                })
                .collect(),
            self.cols,
        )
        .expect("rectangular")
    }

    /// Determinant of a square matrix (fraction-free via rationals).
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.to_rational();
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return BigInt::zero();
            };
            if p != c {
                for j in 0..n {
                    let a = m.get(p, j).clone();
                    let b = m.get(c, j).clone();
                    m.set(p, j, b);
                    m.set(c, j, a);
                }
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det *= &piv;
            for i in c + 1..n {
                let f = m.get(i, c) / &piv;
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(i, j) - &f * m.get(c, j);
                    m.set(i, j, v);
                }
            }
        }
        det.to_integer()
    }

    /// Inverse of a unimodular matrix.
    pub fn unimodular_inverse(&self) -> Option<IntegerMatrix> {
        let inv = self.to_rational().inverse(Field::Rational)?;
        let mut out = IntegerMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let q = inv.get(i, j);
                if !q.is_integer() {
                    return None;
                }
                out.set(i, j, q.to_integer());
            }
        }
        Some(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(dst, j) + f * self.get(src, j);
            self.set(dst, j, v);
        }
    }

    /// col[dst] += f * col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, dst) + f * self.get(i, src);
            self.set(i, dst, v);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self.get(r, j);
            self.set(r, j, v);
        }
    }
}

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal, `d_i | d_{i+1}`.
#[derive(Debug, Clone)]
pub struct SnfDecomposition {
    pub u: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SnfDecomposition {
    /// Diagonal entries `d_1 | d_2 | ...` (trailing zeros included).
    pub fn elementary_divisors(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.elementary_divisors().iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form(a: &IntegerMatrix) -> SnfDecomposition {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntegerMatrix::identity(m);
    let mut v = IntegerMatrix::identity(n);

    for t in 0..m.min(n) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let pivot = (t..m)
            .flat_map(|i| (t..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !d.get(i, j).is_zero())
            .min_by_key(|&(i, j)| d.get(i, j).abs());
        let Some((pi, pj)) = pivot else { break };
        if pi != t {
            d.swap_rows(pi, t);
            u.swap_rows(pi, t);
        }
        if pj != t {
            d.swap_cols(pj, t);
            v.swap_cols(pj, t);
        }

        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = -d.get(i, t).div_floor(d.get(t, t));
                d.add_row(i, t, &q);
                u.add_row(i, t, &q);
                if !d.get(i, t).is_zero() {
                    d.swap_rows(i, t);
                    u.swap_rows(i, t);
                    dirty = true;
                }
            }
            for j in t + 1..n {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = -d.get(t, j).div_floor(d.get(t, t));
                d.add_col(j, t, &q);
                v.add_col(j, t, &q);
                if !d.get(t, j).is_zero() {
                    d.swap_cols(j, t);
                    v.swap_cols(j, t);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let offending = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d.get(i, j).is_multiple_of(d.get(t, t))));
            match offending {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SnfDecomposition { u, d, v }
}

/// Row-style Hermite normal form: `U * A = H` with `U` unimodular, `H` in
/// echelon form with positive pivots and entries above each pivot reduced
/// into `[0, pivot)`. Returns `(H, U, pivot columns)`.
pub fn hermite_normal_form(a: &IntegerMatrix) -> (IntegerMatrix, IntegerMatrix, Vec<usize>) {
    let (m, n) = (a.rows, a.cols);
    let mut h = a.clone();
    let mut u = IntegerMatrix::identity(m);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        // Euclid down column c on rows r..m
        loop {
            let best = (r..m)
                .filter(|&i| !h.get(i, c).is_zero())
                .min_by_key(|&i| h.get(i, c).abs());
            let Some(b) = best else { break };
            if b != r {
                h.swap_rows(b, r);
                u.swap_rows(b, r);
            }
            let mut done = true;
            for i in r + 1..m {
                if h.get(i, c).is_zero() {
                    continue;
                }
                let q = -h.get(i, c).div_floor(h.get(r, c));
                h.add_row(i, r, &q);
                u.add_row(i, r, &q);
                if !h.get(i, c).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        if h.get(r, c).is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = -h.get(i, c).div_floor(h.get(r, c));
            if !q.is_zero() {
                h.add_row(i, r, &q);
                u.add_row(i, r, &q);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (h, u, pivots)
}
