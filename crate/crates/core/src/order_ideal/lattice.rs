use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{FieldElement, NumberField};
use crate::error::{Error, Result};
use crate::linalg::rational::{self, common_denominator, QRows};
use crate::linalg::{gcd_all, hnf_basis, solve_upper, solve_upper_int};

/// Full-rank lattice in `K`, stored canonically as `(1/d)·H` with `H` the
/// integer Hermite form and `gcd(content(H), d) = 1`. Two lattices are
/// equal as sets exactly when their stored data are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IdealLattice {
    denominator: BigInt,
    hnf: Vec<Vec<BigInt>>,
}

impl IdealLattice {
    /// Lattice spanned by `(1/d)·rows`; any number of generators.
    pub fn from_int_rows(rows: Vec<Vec<BigInt>>, d: BigInt, n: usize) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("expected rows of length {n}")));
        }
        let mut h = hnf_basis(rows, n);
        if h.len() < n {
            return Err(Error::DegenerateLattice);
        }
        let mut d = d;
        if d.is_negative() {
            d = -d;
        }
        let g = gcd_all(h.iter().flatten()).gcd(&d);
        if !g.is_one() {
            for x in h.iter_mut().flatten() {
                *x /= &g;
            }
            d /= &g;
        }
        Ok(IdealLattice { denominator: d, hnf: h })
    }

    pub fn from_rows(rows: &[Vec<BigRational>]) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if n == 0 {
            return Err(Error::DegenerateLattice);
        }
        let d = common_denominator(rows.iter().flatten());
        let ints = rows.iter().map(|r| r.iter().map(|x| (x * &d).to_integer()).collect()).collect();
        Self::from_int_rows(ints, d, n)
    }

    pub fn from_elements(elems: &[FieldElement]) -> Result<Self> {
        let rows: QRows = elems.iter().map(|e| e.coeffs.clone()).collect();
        Self::from_rows(&rows)
    }

    /// `Z^n`, i.e. `Z[α]` in the power basis.
    pub fn standard(n: usize) -> Self {
        let hnf = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from((i == j) as i32)).collect())
            .collect();
        IdealLattice { denominator: BigInt::one(), hnf }
    }

    pub fn dim(&self) -> usize {
        self.hnf.len()
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    /// Integer Hermite form `H`; the basis is `H / denominator`.
    pub fn hnf(&self) -> &[Vec<BigInt>] {
        &self.hnf
    }

    pub fn basis(&self) -> QRows {
        self.hnf
            .iter()
            .map(|r| r.iter().map(|x| BigRational::new(x.clone(), self.denominator.clone())).collect())
            .collect()
    }

    pub fn basis_elements(&self) -> Vec<FieldElement> {
        self.basis().into_iter().map(FieldElement::new).collect()
    }

    /// Lattice is contained in `Z^n` (integral in the power basis).
    pub fn is_integral_coords(&self) -> bool {
        self.denominator.is_one()
    }

    /// Covolume relative to `Z^n`.
    pub fn covolume(&self) -> BigRational {
        let n = self.dim();
        let num: BigInt = (0..n).map(|i| self.hnf[i][i].clone()).product();
        let den = num_traits::pow(self.denominator.clone(), n);
        BigRational::new(num, den)
    }

    /// Integer coordinates of `x` in the canonical basis, if `x ∈ self`.
    pub fn coordinates(&self, x: &[BigRational]) -> Option<Vec<BigInt>> {
        let mut v = Vec::with_capacity(x.len());
        for c in x {
            let y = c * BigRational::from_integer(self.denominator.clone());
            if !y.is_integer() {
                return None;
            }
            v.push(y.to_integer());
        }
        solve_upper_int(&self.hnf, &v)
    }

    /// Rational coordinates of any `x ∈ K`.
    pub fn rational_coordinates(&self, x: &[BigRational]) -> Vec<BigRational> {
        let d = BigRational::from_integer(self.denominator.clone());
        let scaled: Vec<BigRational> = x.iter().map(|c| c * &d).collect();
        solve_upper(&self.hnf, &scaled)
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        self.coordinates(x).is_some()
    }

    pub fn contains_element(&self, x: &FieldElement) -> bool {
        self.contains(&x.coeffs)
    }

    pub fn is_subset_of(&self, other: &IdealLattice) -> bool {
        // (1/d)·H ⊆ (1/e)·G  ⇔  (e/d)·H has integer coordinates in G
        self.basis().iter().all(|r| other.contains(r))
    }

    pub fn scale_rational(&self, c: &BigRational) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::DegenerateLattice);
        }
        let rows = self.hnf.iter().map(|r| r.iter().map(|x| x * c.numer()).collect()).collect();
        Self::from_int_rows(rows, &self.denominator * c.denom(), self.dim())
    }

    pub fn sum(&self, other: &IdealLattice) -> Result<Self> {
        let d = self.denominator.lcm(&other.denominator);
        let fa = &d / &self.denominator;
        let fb = &d / &other.denominator;
        let mut rows: Vec<Vec<BigInt>> = self.hnf.iter().map(|r| r.iter().map(|x| x * &fa).collect()).collect();
        rows.extend(other.hnf.iter().map(|r| r.iter().map(|x| x * &fb).collect::<Vec<_>>()));
        Self::from_int_rows(rows, d, self.dim())
    }

    /// Row-major listing used in reports: `(denominator, H)`.
    pub fn to_parts(&self) -> (BigInt, Vec<Vec<BigInt>>) {
        (self.denominator.clone(), self.hnf.clone())
    }
}

impl NumberField {
    /// `x·a`.
    pub fn lattice_mul_element(&self, a: &IdealLattice, x: &FieldElement) -> Result<IdealLattice> {
        if x.is_zero() {
            return Err(Error::DegenerateLattice);
        }
        let rows: QRows = a.basis().iter().map(|r| self.mul_coords(r, &x.coeffs)).collect();
        IdealLattice::from_rows(&rows)
    }

    /// `x·a ⊆ a`.
    pub fn is_stable(&self, a: &IdealLattice, x: &FieldElement) -> bool {
        a.basis().iter().all(|r| a.contains(&self.mul_coords(r, &x.coeffs)))
    }

    /// Lattice generated by all products `a_i·b_j`.
    pub fn ideal_product(&self, a: &IdealLattice, b: &IdealLattice) -> Result<IdealLattice> {
        let n = self.degree();
        let mut rows = Vec::with_capacity(n * n);
        for x in a.hnf() {
            for y in b.hnf() {
                rows.push(self.mul_int(x, y));
            }
        }
        IdealLattice::from_int_rows(rows, a.denominator() * b.denominator(), n)
    }

    pub fn ideal_sum(&self, a: &IdealLattice, b: &IdealLattice) -> Result<IdealLattice> {
        a.sum(b)
    }

    /// Trace dual `{x : Tr(x·a) ⊆ Z}`.
    pub fn trace_dual(&self, a: &IdealLattice) -> Result<IdealLattice> {
        // basis rows of the dual: (B⁻¹)ᵀ·T⁻¹ with B = H/d
        let b = a.basis();
        let binv = rational::inverse(&b).ok_or(Error::DegenerateLattice)?;
        let rows = rational::mul(&rational::transpose(&binv), self.trace_inverse());
        IdealLattice::from_rows(&rows)
    }

    pub fn ideal_intersection(&self, a: &IdealLattice, b: &IdealLattice) -> Result<IdealLattice> {
        let s = self.trace_dual(a)?.sum(&self.trace_dual(b)?)?;
        self.trace_dual(&s)
    }

    /// `(a : b) = {x : x·b ⊆ a}`, computed as `(b·a^∨)^∨`.
    pub fn ideal_quotient(&self, a: &IdealLattice, b: &IdealLattice) -> Result<IdealLattice> {
        let ad = self.trace_dual(a)?;
        self.trace_dual(&self.ideal_product(b, &ad)?)
    }

    /// Variant of [`NumberField::ideal_quotient`] reusing a precomputed `a^∨`.
    pub(crate) fn quotient_with_dual(&self, a_dual: &IdealLattice, b: &IdealLattice) -> Result<IdealLattice> {
        self.trace_dual(&self.ideal_product(b, a_dual)?)
    }

    /// `[sup : sub]` generalised to any pair: `covol(sub) / covol(sup)`.
    pub fn lattice_index(&self, sub: &IdealLattice, sup: &IdealLattice) -> BigRational {
        sub.covolume() / sup.covolume()
    }

    /// Discriminant `det(Tr(b_i·b_j))` of a lattice.
    pub fn lattice_discriminant(&self, a: &IdealLattice) -> BigRational {
        let b = a.basis();
        let n = b.len();
        let gram: QRows = (0..n)
            .map(|i| (0..n).map(|j| self.trace_pairing(&b[i], &b[j])).collect())
            .collect();
        rational::determinant(&gram)
    }
}
