//! Base fields and dense matrices over them.
//!
//! Scalars are stored as [`BigRational`] for both supported fields. Over
//! `F_p` every stored value is an integer in `[0, p)`; [`Field::normalize`]
//! is the only way values enter a matrix, so that invariant holds everywhere.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// The coefficient field `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[derive(Default)]
pub enum Field {
    #[default]
    Rational,
    Prime(u64),
}


impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "Fp:{p}"),
        }
    }
}

impl std::str::FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Q" {
            return Ok(Field::Rational);
        }
        let p = s
            .strip_prefix("Fp:")
            .ok_or_else(|| Error::Parse(format!("unknown field {s:?}, expected Q or Fp:<p>")))?;
        let p: u64 = p
            .parse()
            .map_err(|_| Error::Parse(format!("bad prime in field {s:?}")))?;
        Field::prime(p)
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl Field {
    /// `F_p` for a prime `p <= 97`.
    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) || p > 97 {
            return Err(Error::Parse(format!("F_p requires a prime p <= 97, got {p}")));
        }
        Ok(Field::Prime(p))
    }

    pub fn zero(&self) -> Rat {
        Rat::zero()
    }

    pub fn one(&self) -> Rat {
        Rat::one()
    }

    pub fn from_i64(&self, v: i64) -> Rat {
        self.normalize(Rat::from_integer(BigInt::from(v)))
    }

    /// Map an arbitrary rational into the field's canonical representation.
    ///
    /// Panics over `F_p` when the denominator is divisible by `p`.
    pub fn normalize(&self, q: Rat) -> Rat {
        match self {
            Field::Rational => q,
            Field::Prime(p) => {
                let p = BigInt::from(*p);
                let num = q.numer().mod_floor(&p);
                let den = q.denom().mod_floor(&p);
                assert!(!den.is_zero(), "denominator vanishes in F_p");
                let inv = mod_inverse(&den, &p);
                Rat::from_integer((num * inv).mod_floor(&p))
            }
        }
    }

    pub fn add(&self, a: &Rat, b: &Rat) -> Rat {
        self.normalize(a + b)
    }

    pub fn sub(&self, a: &Rat, b: &Rat) -> Rat {
        self.normalize(a - b)
    }

    pub fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        self.normalize(a * b)
    }

    pub fn neg(&self, a: &Rat) -> Rat {
        self.normalize(-a)
    }

    pub fn inv(&self, a: &Rat) -> Rat {
        assert!(!a.is_zero(), "inverse of zero");
        match self {
            Field::Rational => a.recip(),
            Field::Prime(p) => {
                let p = BigInt::from(*p);
                Rat::from_integer(mod_inverse(a.numer(), &p))
            }
        }
    }
}

fn mod_inverse(a: &BigInt, p: &BigInt) -> BigInt {
    let e = a.extended_gcd(p);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(p)
}

/// Dense row-major matrix with rational storage.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    /// Build from rows; every row must have length `cols`.
    pub fn from_rows(rows: Vec<Vec<Rat>>, cols: usize) -> Result<Self> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix { rows: r, cols, data })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>], cols: usize, field: Field) -> Result<Self> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
                .collect(),
            cols,
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix, field: Field) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = &out.data[i * out.cols + j] + a * b;
                    out.data[i * out.cols + j] = v;
                }
            }
        }
        if field != Field::Rational {
            for v in &mut out.data {
                *v = field.normalize(std::mem::take(v));
            }
        }
        out
    }

    pub fn apply(&self, v: &[Rat], field: Field) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let s = self.row(i).iter().zip(v).fold(Rat::zero(), |acc, (a, b)| acc + a * b);
                field.normalize(s)
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix, field: Field) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| field.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Matrix, field: Field) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| field.sub(a, b))
                .collect(),
        }
    }

    /// Stack `blocks` vertically (all with equal column count).
    pub fn vstack(blocks: &[&Matrix], cols: usize) -> Matrix {
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols);
            rows += b.rows;
            data.extend(b.data.iter().cloned());
        }
        Matrix { rows, cols, data }
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&self, field: Field) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = field.inv(m.get(r, c));
            for j in 0..m.cols {
                let v = field.mul(m.get(r, j), &inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    if m.get(r, j).is_zero() {
                        continue;
                    }
                    let v = field.sub(m.get(i, j), &(&f * m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self, field: Field) -> usize {
        self.rref(field).1.len()
    }

    /// Basis of `{x : A x = 0}` as the columns of the returned matrix.
    pub fn nullspace(&self, field: Field) -> Matrix {
        let (r, pivots) = self.rref(field);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Matrix::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            basis.set(f, k, Rat::one());
            for (i, &p) in pivots.iter().enumerate() {
                basis.set(p, k, field.neg(r.get(i, f)));
            }
        }
        basis
    }

    /// Some solution of `A x = b`, if one exists.
    pub fn solve(&self, b: &[Rat], field: Field) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref(field);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.get(i, self.cols).clone();
        }
        Some(x)
    }

    /// Inverse of a square matrix, if invertible.
    pub fn inverse(&self, field: Field) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rat::one());
        }
        let (r, pivots) = aug.rref(field);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    /// Columns selected by index.
    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &c) in cols.iter().enumerate() {
                m.set(i, k, self.get(i, c).clone());
            }
        }
        m
    }

    pub fn entries(&self) -> &[Rat] {
        &self.data
    }

    /// `s * self`.
    pub fn scale(&self, s: &Rat, field: Field) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| field.mul(a, s)).collect(),
        }
    }

    /// Copy `block` into `self` with its top-left corner at `(i0, j0)`.
    pub fn set_block(&mut self, i0: usize, j0: usize, block: &Matrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(i0 + i, j0 + j, block.get(i, j).clone());
            }
        }
    }

    /// The `rows x cols` sub-block starting at `(i0, j0)`.
    pub fn block(&self, i0: usize, j0: usize, rows: usize, cols: usize) -> Matrix {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, self.get(i0 + i, j0 + j).clone());
            }
        }
        m
    }

    /// Place `blocks` side by side (all with equal row count).
    pub fn hstack(blocks: &[&Matrix], rows: usize) -> Matrix {
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zeros(rows, cols);
        let mut j0 = 0;
        for b in blocks {
            assert_eq!(b.rows, rows);
            m.set_block(0, j0, b);
            j0 += b.cols;
        }
        m
    }

    /// Kronecker product `self ⊗ other`; basis of `V ⊗ W` ordered with the
    /// `W` index fastest.
    pub fn kron(&self, other: &Matrix, field: Field) -> Matrix {
        let mut m = Matrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let v = field.mul(a, other.get(k, l));
                        m.set(i * other.rows + k, j * other.cols + l, v);
                    }
                }
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn from_columns(cols: &[Vec<Rat>], rows: usize) -> Matrix {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    /// Basis of the column space (a subset of the columns).
    pub fn column_space(&self, field: Field) -> Matrix {
        let (_, pivots) = self.rref(field);
        self.select_cols(&pivots)
    }

    /// Do the column spaces of `self` and `other` coincide?
    pub fn same_column_space(&self, other: &Matrix, field: Field) -> bool {
        assert_eq!(self.rows, other.rows);
        let r = self.rank(field);
        r == other.rank(field) && Matrix::hstack(&[self, other], self.rows).rank(field) == r
    }

    pub fn is_invertible(&self, field: Field) -> bool {
        self.rows == self.cols && self.rank(field) == self.rows
    }
}

/// A linear quotient `V / W` with an explicit projection.
///
/// The quotient basis is the set of non-pivot coordinates of the row-reduced
/// relation matrix, so the projection is deterministic.
#[derive(Debug, Clone)]
pub struct Quotient {
    /// `dim(V/W) x dim(V)`
    pub projection: Matrix,
    /// `dim(V) x dim(V/W)`: lifts each quotient basis vector to `V`.
    pub section: Matrix,
}

impl Quotient {
    /// `relations` has one relation per row, each of length `ambient`.
    pub fn new(relations: &Matrix, ambient: usize, field: Field) -> Quotient {
        assert_eq!(relations.cols(), ambient);
        let (r, pivots) = relations.rref(field);
        let free: Vec<usize> = (0..ambient).filter(|c| !pivots.contains(c)).collect();
        let mut projection = Matrix::zeros(free.len(), ambient);
        let mut section = Matrix::zeros(ambient, free.len());
        for (k, &f) in free.iter().enumerate() {
            projection.set(k, f, Rat::one());
            section.set(f, k, Rat::one());
        }
        // A pivot coordinate equals minus the free part of its relation row.
        for (i, &p) in pivots.iter().enumerate() {
            for (k, &f) in free.iter().enumerate() {
                let v = field.neg(r.get(i, f));
                projection.set(k, p, v);
            }
        }
        Quotient { projection, section }
    }

    pub fn dim(&self) -> usize {
        self.projection.rows()
    }
}

/// Parse `"p/q"` or `"p"` into a rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rat(q: &Rat) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rat_to_i64(q: &Rat) -> Option<i64> {
    if q.is_integer() {
        q.numer().to_i64()
    } else {
        None
    }
}

pub fn is_nonneg(q: &Rat) -> bool {
    !q.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::prime(7).unwrap();
        assert_eq!(f.mul(&r(3), &r(5)), r(1));
        assert_eq!(f.inv(&r(3)), r(5));
        assert_eq!(f.normalize(Rat::new(1.into(), 2.into())), r(4));
        assert!(Field::prime(9).is_err());
        assert!(Field::prime(101).is_err());
    }

    #[test]
    fn nullspace_and_solve() {
        let f = Field::Rational;
        let a = Matrix::from_i64_rows(&[vec![1, 2, 3], vec![2, 4, 6]], 3, f).unwrap();
        let ns = a.nullspace(f);
        assert_eq!(ns.cols(), 2);
        assert!(a.mul(&ns, f).is_zero());
        let x = a.solve(&[r(1), r(2)], f).unwrap();
        assert_eq!(a.apply(&x, f), vec![r(1), r(2)]);
        assert!(a.solve(&[r(1), r(3)], f).is_none());
    }

    #[test]
    fn quotient_projection_kills_relations() {
        let f = Field::Rational;
        let rel = Matrix::from_i64_rows(&[vec![1, -1, 0]], 3, f).unwrap();
        let q = Quotient::new(&rel, 3, f);
        assert_eq!(q.dim(), 2);
        assert!(q.projection.mul(&rel.transpose(), f).is_zero());
        let id = q.projection.mul(&q.section, f);
        assert_eq!(id, Matrix::identity(2));
    }

    #[test]
    fn field_parsing() {
        assert_eq!("Q".parse::<Field>().unwrap(), Field::Rational);
        assert_eq!("Fp:5".parse::<Field>().unwrap(), Field::Prime(5));
        assert!("F".parse::<Field>().is_err());
    }
}
