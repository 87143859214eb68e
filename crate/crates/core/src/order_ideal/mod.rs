//! The number field `K = Q[t]/(f)`, its orders and fractional ideals.
//!
//! Elements are coordinate vectors in the power basis `1, α, …, α^{n-1}`.
//! The field itself is passed explicitly to every operation; elements and
//! lattices carry no back-reference to it.

mod equivalence;
mod lattice;
mod order;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::rational::{self, QRows};
use crate::linalg::IntMatrix;
use crate::poly::{is_irreducible, IntPoly};
use crate::weil::{real_weil_polynomial, WeilContext};

pub use equivalence::{Equivalence, EquivalenceOracle, SearchLimits};
pub use lattice::IdealLattice;
pub use order::OrderDesc;

/// Element of `K` in the power basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElement {
    pub coeffs: Vec<BigRational>,
}

impl FieldElement {
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        FieldElement { coeffs }
    }

    pub fn from_ints(coeffs: &[BigInt]) -> Self {
        FieldElement { coeffs: coeffs.iter().cloned().map(BigRational::from_integer).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

/// `K = Q[t]/(f)` for a monic irreducible `f`, optionally with the CM
/// involution `α ↦ q/α` of a Weil polynomial.
#[derive(Clone, Debug)]
pub struct NumberField {
    f: IntPoly,
    n: usize,
    /// `α^k` reduced mod `f`, integer coordinates, for `k < 2n - 1`.
    powers: Vec<Vec<BigInt>>,
    /// `Tr(α^k)` for `k < 2n - 1`.
    power_traces: Vec<BigInt>,
    trace_inverse: QRows,
    q: Option<BigInt>,
    /// Rows: coordinates of `conj(α^k)`.
    conj_rows: Option<QRows>,
}

impl NumberField {
    pub fn new(f: &IntPoly) -> Result<Self> {
        if !f.is_monic() {
            return Err(Error::NotMonic);
        }
        let n = f.degree();
        if n == 0 {
            return Err(Error::InvalidParameter("field polynomial must have positive degree".into()));
        }
        if !is_irreducible(f)? {
            return Err(Error::InvalidParameter(format!("{f} is reducible")));
        }
        let mut powers = Vec::with_capacity(2 * n - 1);
        let mut cur = vec![BigInt::zero(); n];
        cur[0] = BigInt::one();
        for _ in 0..2 * n - 1 {
            powers.push(cur.clone());
            // multiply by α: shift up, then substitute α^n = -Σ f_i α^i
            let top = cur[n - 1].clone();
            for i in (1..n).rev() {
                cur[i] = cur[i - 1].clone();
            }
            cur[0] = BigInt::zero();
            if !top.is_zero() {
                for (i, c) in cur.iter_mut().enumerate() {
                    *c -= &top * f.coeff(i);
                }
            }
        }
        // Newton sums give Tr(α^k)
        let mut power_traces = Vec::with_capacity(2 * n - 1);
        let companion_trace = |v: &Vec<BigInt>, pw: &Vec<Vec<BigInt>>| -> BigInt {
            // Tr(x) = Σ_j coefficient of α^j in x·α^j
            let mut t = BigInt::zero();
            for j in 0..n {
                for (i, xi) in v.iter().enumerate() {
                    if !xi.is_zero() {
                        t += xi * &pw[i + j][j];
                    }
                }
            }
            t
        };
        for k in 0..2 * n - 1 {
            let mut e = vec![BigInt::zero(); n];
            if k < n {
                e[k] = BigInt::one();
            } else {
                e = powers[k].clone();
            }
            power_traces.push(companion_trace(&e, &powers));
        }
        let tmat: QRows = (0..n)
            .map(|i| (0..n).map(|j| BigRational::from_integer(power_traces[i + j].clone())).collect())
            .collect();
        let trace_inverse = rational::inverse(&tmat).ok_or_else(|| Error::Internal("singular trace form".into()))?;
        Ok(NumberField { f: f.clone(), n, powers, power_traces, trace_inverse, q: None, conj_rows: None })
    }

    /// Field of a Weil polynomial, with complex conjugation `α ↦ q/α`.
    pub fn with_conjugation(f: &IntPoly, q: &BigInt) -> Result<Self> {
        let mut k = Self::new(f)?;
        let q_over_alpha = k.scale(&k.inverse(&k.alpha())?, &BigRational::from_integer(q.clone()));
        let mut rows = Vec::with_capacity(k.n);
        let mut cur = k.one();
        for _ in 0..k.n {
            rows.push(cur.coeffs.clone());
            cur = k.mul(&cur, &q_over_alpha);
        }
        k.q = Some(q.clone());
        k.conj_rows = Some(rows);
        Ok(k)
    }

    pub fn from_context(ctx: &WeilContext) -> Result<Self> {
        Self::with_conjugation(&ctx.f, &ctx.q)
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn poly(&self) -> &IntPoly {
        &self.f
    }

    pub fn q(&self) -> Option<&BigInt> {
        self.q.as_ref()
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { coeffs: vec![BigRational::zero(); self.n] }
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    pub fn from_int(&self, c: i64) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[0] = BigRational::from_integer(c.into());
        e
    }

    pub fn alpha(&self) -> FieldElement {
        if self.n == 1 {
            return FieldElement::from_ints(&[-self.f.coeff(0)]);
        }
        let mut e = self.zero();
        e.coeffs[1] = BigRational::one();
        e
    }

    /// `q/α`; requires the CM structure.
    pub fn q_over_alpha(&self) -> Result<FieldElement> {
        let q = self.q.as_ref().ok_or_else(|| Error::InvalidParameter("field has no q".into()))?;
        Ok(self.scale(&self.inverse(&self.alpha())?, &BigRational::from_integer(q.clone())))
    }

    /// Reduce an arbitrary polynomial in α.
    pub fn from_poly(&self, p: &IntPoly) -> FieldElement {
        let mut acc = self.zero();
        let mut pw = self.one();
        let a = self.alpha();
        for c in p.coeffs() {
            if !c.is_zero() {
                acc = self.add(&acc, &self.scale(&pw, &BigRational::from_integer(c.clone())));
            }
            pw = self.mul(&pw, &a);
        }
        acc
    }

    pub fn add(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        FieldElement { coeffs: x.coeffs.iter().zip(&y.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        FieldElement { coeffs: x.coeffs.iter().zip(&y.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self, x: &FieldElement) -> FieldElement {
        FieldElement { coeffs: x.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, x: &FieldElement, c: &BigRational) -> FieldElement {
        FieldElement { coeffs: x.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        FieldElement { coeffs: self.mul_coords(&x.coeffs, &y.coeffs) }
    }

    pub(crate) fn mul_coords(&self, x: &[BigRational], y: &[BigRational]) -> Vec<BigRational> {
        let n = self.n;
        let mut raw = vec![BigRational::zero(); 2 * n - 1];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if !b.is_zero() {
                    raw[i + j] += a * b;
                }
            }
        }
        let mut out: Vec<BigRational> = raw[..n].to_vec();
        for (k, c) in raw.iter().enumerate().skip(n) {
            if c.is_zero() {
                continue;
            }
            for (o, p) in out.iter_mut().zip(&self.powers[k]) {
                if !p.is_zero() {
                    *o += c * BigRational::from_integer(p.clone());
                }
            }
        }
        out
    }

    /// Product of integer coordinate vectors (exact, no denominators).
    pub(crate) fn mul_int(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let n = self.n;
        let mut raw = vec![BigInt::zero(); 2 * n - 1];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if !b.is_zero() {
                    raw[i + j] += a * b;
                }
            }
        }
        let mut out: Vec<BigInt> = raw[..n].to_vec();
        for (k, c) in raw.iter().enumerate().skip(n) {
            if c.is_zero() {
                continue;
            }
            for (o, p) in out.iter_mut().zip(&self.powers[k]) {
                if !p.is_zero() {
                    *o += c * p;
                }
            }
        }
        out
    }

    /// Matrix of multiplication by `x` acting on coordinate columns:
    /// column `j` holds the coordinates of `x·α^j`.
    pub fn mul_matrix(&self, x: &FieldElement) -> QRows {
        let n = self.n;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![BigRational::zero(); n];
            e[j] = BigRational::one();
            cols.push(self.mul_coords(&x.coeffs, &e));
        }
        rational::transpose(&cols)
    }

    /// Integer multiplication matrix of an integral coordinate vector.
    pub(crate) fn mul_matrix_int(&self, x: &[BigInt]) -> IntMatrix {
        let n = self.n;
        let mut data = vec![BigInt::zero(); n * n];
        for j in 0..n {
            let mut e = vec![BigInt::zero(); n];
            e[j] = BigInt::one();
            let col = self.mul_int(x, &e);
            for (i, c) in col.into_iter().enumerate() {
                data[i * n + j] = c;
            }
        }
        IntMatrix::new(n, data).expect("square")
    }

    pub fn inverse(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = self.mul_matrix(x);
        let inv = rational::inverse(&m).ok_or_else(|| Error::Internal("singular multiplication map".into()))?;
        // x·y = 1  ⇔  M_x·y = e_0
        Ok(FieldElement { coeffs: inv.iter().map(|row| row[0].clone()).collect() })
    }

    pub fn trace(&self, x: &FieldElement) -> BigRational {
        x.coeffs
            .iter()
            .zip(&self.power_traces)
            .map(|(c, t)| c * BigRational::from_integer(t.clone()))
            .sum()
    }

    /// `Tr(x·y)` from coordinates, without forming the product.
    pub(crate) fn trace_pairing(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        let mut s = BigRational::zero();
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if !b.is_zero() {
                    s += a * b * BigRational::from_integer(self.power_traces[i + j].clone());
                }
            }
        }
        s
    }

    pub(crate) fn trace_inverse(&self) -> &QRows {
        &self.trace_inverse
    }

    pub fn norm(&self, x: &FieldElement) -> BigRational {
        rational::determinant(&self.mul_matrix(x))
    }

    /// Characteristic polynomial of multiplication by `x`, constant first.
    pub fn charpoly(&self, x: &FieldElement) -> Vec<BigRational> {
        rational::faddeev_leverrier(&self.mul_matrix(x))
    }

    /// `x` is an algebraic integer.
    pub fn is_integral(&self, x: &FieldElement) -> bool {
        self.charpoly(x).iter().all(|c| c.is_integer())
    }

    /// Complex conjugation `α ↦ q/α`, when available.
    pub fn conj(&self, x: &FieldElement) -> Option<FieldElement> {
        self.conj_rows.as_ref().map(|rows| FieldElement { coeffs: rational::vec_mul(&x.coeffs, rows) })
    }

    pub(crate) fn conj_coords(&self, x: &[BigRational]) -> Option<Vec<BigRational>> {
        self.conj_rows.as_ref().map(|rows| rational::vec_mul(x, rows))
    }

    pub fn has_conjugation(&self) -> bool {
        self.conj_rows.is_some()
    }

    /// `β = α + q/α`, generator of the maximal real subfield.
    pub fn real_generator(&self) -> Result<FieldElement> {
        Ok(self.add(&self.alpha(), &self.q_over_alpha()?))
    }

    /// Minimal polynomial of `α + q/α` (degree `n/2`).
    pub fn real_polynomial(&self) -> Option<IntPoly> {
        self.q.as_ref().map(|q| real_weil_polynomial(&self.f, q))
    }

    /// Discriminant of the power basis, `disc(f)`.
    pub fn poly_discriminant(&self) -> BigInt {
        let n = self.n;
        let t: QRows = (0..n)
            .map(|i| (0..n).map(|j| BigRational::from_integer(self.power_traces[i + j].clone())).collect())
            .collect();
        rational::determinant(&t).to_integer()
    }
}
