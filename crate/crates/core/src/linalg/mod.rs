//! Exact integer and rational matrix kernel.
//!
//! Nothing in here touches floating point. Square integer matrices are
//! [`IntMatrix`]; rectangular integer and rational matrices are plain
//! `Vec<Vec<_>>` row lists, which is what the lattice code works with.

mod hnf;
pub mod rational;
pub mod short_vectors;
mod snf;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::IntPoly;

pub use hnf::{hermite_normal_form, hnf_basis, hnf_rows, HermiteForm};
pub(crate) use hnf::{solve_upper, solve_upper_int};
pub use snf::{smith_normal_form, SnfResult};

/// Dense square matrix of arbitrary-precision integers, row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntMatrix {
    n: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(n: usize, data: Vec<BigInt>) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch("matrix dimension must be positive".into()));
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(IntMatrix { n, data })
    }

    pub fn from_rows<T: Clone + Into<BigInt>>(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch("matrix is not square".into()));
            }
            data.extend(row.iter().cloned().map(Into::into));
        }
        Self::new(n, data)
    }

    /// Shorthand for small literal matrices in tests and examples.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        Self::from_rows(&rows).expect("square literal matrix")
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn zero(n: usize) -> Self {
        IntMatrix { n, data: vec![BigInt::zero(); n * n] }
    }

    pub fn scalar(n: usize, c: &BigInt) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.data[i * n + i] = c.clone();
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                data.push(self.get(i, j).clone());
            }
        }
        IntMatrix { n, data }
    }

    /// `I - self`.
    pub fn one_minus(&self) -> Self {
        &IntMatrix::identity(self.n) - self
    }

    /// Gcd of all entries (0 for the zero matrix).
    pub fn content(&self) -> BigInt {
        gcd_all(self.data.iter())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn trace(&self) -> BigInt {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        IntMatrix { n: self.n, data: self.data.iter().map(|x| x * c).collect() }
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Evaluate a polynomial at this matrix (Horner).
    pub fn eval_poly(&self, p: &IntPoly) -> Self {
        let mut acc = IntMatrix::zero(self.n);
        for c in p.coeffs().iter().rev() {
            acc = &(&acc * self) + &IntMatrix::scalar(self.n, c);
        }
        acc
    }

    /// Characteristic polynomial `det(tI - self)` via Faddeev–LeVerrier.
    pub fn charpoly(&self) -> IntPoly {
        let rows = self.rows();
        IntPoly::new(rational::faddeev_leverrier(&rows))
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> IntMatrix {
        let n = self.n;
        let mut data = Vec::with_capacity((n - 1) * (n - 1));
        for i in (0..n).filter(|&i| i != skip_row) {
            for j in (0..n).filter(|&j| j != skip_col) {
                data.push(self.get(i, j).clone());
            }
        }
        IntMatrix { n: n - 1, data }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl<'a> Mul<&'a IntMatrix> for &'a IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut data = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * rhs.get(k, j);
                }
            }
        }
        IntMatrix { n, data }
    }
}

impl<'a> Add<&'a IntMatrix> for &'a IntMatrix {
    type Output = IntMatrix;

    fn add(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        IntMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a IntMatrix> for &'a IntMatrix {
    type Output = IntMatrix;

    fn sub(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        IntMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &IntMatrix {
    type Output = IntMatrix;

    fn neg(self) -> IntMatrix {
        IntMatrix { n: self.n, data: self.data.iter().map(|a| -a).collect() }
    }
}

pub(crate) fn gcd_all<'a>(it: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    let mut g = BigInt::zero();
    for x in it {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                break;
            }
        }
    }
    g
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn determinant(a: &IntMatrix) -> BigInt {
    let n = a.n;
    let mut m = a.rows();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Cofactor matrix: entry `(i, j)` is `(-1)^(i+j)` times the minor obtained
/// by deleting row `i` and column `j`. By convention the cofactor matrix of
/// a 1×1 matrix is `[1]`, which keeps `A·Cof(A)ᵗ = det(A)·I` true.
pub fn cofactor_matrix(a: &IntMatrix) -> IntMatrix {
    let n = a.n;
    if n == 1 {
        return IntMatrix::identity(1);
    }
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let d = determinant(&a.minor(i, j));
            data.push(if (i + j) % 2 == 0 { d } else { -d });
        }
    }
    IntMatrix { n, data }
}

/// `τ(A)`: gcd of the entries of the cofactor matrix.
pub fn tau(a: &IntMatrix) -> BigInt {
    cofactor_matrix(a).content()
}

pub fn is_unimodular(u: &IntMatrix) -> bool {
    determinant(u).abs().is_one()
}

/// Inverse of a unimodular matrix, `None` if `|det| != 1`.
pub fn unimodular_inverse(u: &IntMatrix) -> Option<IntMatrix> {
    let d = determinant(u);
    if !d.abs().is_one() {
        return None;
    }
    // A⁻¹ = Cof(A)ᵗ / det(A)
    Some(cofactor_matrix(u).transpose().scale(&d))
}
