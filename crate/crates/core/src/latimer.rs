//! Ideal classes of `Z[α]` versus integer matrices with characteristic
//! polynomial `f`, in both directions.
//!
//! Matrices act on column vectors. For a lattice with basis `b_1..b_n`,
//! the matrix `A` of multiplication by α satisfies `α·b_j = Σ_i A_ij·b_i`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::rational::{self, QRows};
use crate::linalg::{is_unimodular, IntMatrix};
use crate::order_ideal::{Equivalence, EquivalenceOracle, FieldElement, IdealLattice, NumberField};
use crate::poly::IntPoly;

/// A conjugacy class of integer matrices, given by one representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixClass {
    pub rep: IntMatrix,
    pub charpoly: IntPoly,
    /// Ideal the representative was read off from, if any.
    pub ideal: Option<IdealLattice>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conjugacy {
    /// `B = U·A·U⁻¹` with `U` unimodular.
    Conjugate(IntMatrix),
    NotConjugate,
    Indeterminate,
}

/// Matrix of multiplication by α on the canonical basis of `a`.
pub fn ideal_to_matrix(k: &NumberField, a: &IdealLattice) -> Result<MatrixClass> {
    let m = alpha_matrix_on_basis(k, &a.basis()).ok_or(Error::NotAlphaStable)?;
    let charpoly = m.charpoly();
    if &charpoly != k.poly() {
        return Err(Error::Internal("multiplication matrix has the wrong characteristic polynomial".into()));
    }
    Ok(MatrixClass { rep: m, charpoly, ideal: Some(a.clone()) })
}

/// Column-convention matrix of α on the rows of `basis`, if integral.
fn alpha_matrix_on_basis(k: &NumberField, basis: &QRows) -> Option<IntMatrix> {
    let alpha = k.alpha();
    let inv = rational::inverse(basis)?;
    // row i: coordinates of α·b_i in the basis
    let images: QRows = basis.iter().map(|r| k.mul_coords(r, &alpha.coeffs)).collect();
    let coords = rational::mul(&images, &inv);
    if !coords.iter().all(|r| rational::is_integral_row(r)) {
        return None;
    }
    let rows: Vec<Vec<BigInt>> = rational::transpose(&coords)
        .into_iter()
        .map(|r| r.into_iter().map(|x| x.to_integer()).collect())
        .collect();
    IntMatrix::from_rows(&rows).ok()
}

/// The ideal `{c ∈ K : c(M)·v0 ∈ Z^n}` together with its raw basis, on
/// which α acts by exactly `M`.
fn pullback(k: &NumberField, m: &IntMatrix, v0: &[BigInt]) -> Result<(IdealLattice, QRows)> {
    let n = k.degree();
    if m.dim() != n || v0.len() != n {
        return Err(Error::DimensionMismatch(format!("expected dimension {n}")));
    }
    if &m.charpoly() != k.poly() {
        return Err(Error::CharpolyMismatch);
    }
    if v0.iter().all(Zero::is_zero) {
        return Err(Error::ZeroVector);
    }
    // P has columns M^k·v0; c ↦ c(M)·v0 is c ↦ P·c
    let mut cols = Vec::with_capacity(n);
    let mut v = v0.to_vec();
    for _ in 0..n {
        cols.push(v.iter().cloned().map(BigRational::from_integer).collect::<Vec<_>>());
        v = m.mul_vec(&v);
    }
    let p = rational::transpose(&cols);
    let pinv = rational::inverse(&p).ok_or(Error::DegenerateLattice)?;
    // basis elements: columns of P⁻¹
    let raw = rational::transpose(&pinv);
    let lattice = IdealLattice::from_rows(&raw)?;
    Ok((lattice, raw))
}

/// Inverse direction: the fractional ideal attached to `M` and `v0`.
pub fn matrix_to_ideal(k: &NumberField, m: &IntMatrix, v0: &[BigInt]) -> Result<IdealLattice> {
    let (lattice, raw) = pullback(k, m, v0)?;
    // round trip: the canonical basis differs from the raw one by a
    // unimodular change, so the two α-matrices must be conjugate by it
    let canonical = lattice.basis();
    let a = alpha_matrix_on_basis(k, &canonical).ok_or(Error::NotAlphaStable)?;
    let w = basis_change(&canonical, &raw).ok_or_else(|| Error::Internal("basis change is not integral".into()))?;
    if !is_unimodular(&w) || (&w * m) != (&a * &w) {
        return Err(Error::Internal("matrix/ideal round trip failed".into()));
    }
    Ok(lattice)
}

/// [`matrix_to_ideal`] with `v0 = e_1`, falling back to `e_2`, … when the
/// solve degenerates.
pub fn matrix_to_ideal_default(k: &NumberField, m: &IntMatrix) -> Result<IdealLattice> {
    let n = k.degree();
    let mut last = Error::DegenerateLattice;
    for i in 0..n {
        let mut v0 = vec![BigInt::zero(); n];
        v0[i] = BigInt::one();
        match matrix_to_ideal(k, m, &v0) {
            Err(Error::DegenerateLattice) => last = Error::DegenerateLattice,
            r => return r,
        }
    }
    Err(last)
}

/// Integer `W` with `W·(coords in `from`) = coords in `to`` for the same
/// lattice, i.e. `from_j = Σ_i W_ij to_i` (column convention).
fn basis_change(to: &QRows, from: &QRows) -> Option<IntMatrix> {
    let inv = rational::inverse(to)?;
    let coords = rational::mul(from, &inv);
    if !coords.iter().all(|r| rational::is_integral_row(r)) {
        return None;
    }
    let rows: Vec<Vec<BigInt>> = rational::transpose(&coords)
        .into_iter()
        .map(|r| r.into_iter().map(|x| x.to_integer()).collect())
        .collect();
    IntMatrix::from_rows(&rows).ok()
}

/// Decide whether `B = U·A·U⁻¹` for some unimodular `U`, returning a
/// verified `U` when it exists.
pub fn matrices_conjugate(k: &NumberField, a: &IntMatrix, b: &IntMatrix) -> Result<Conjugacy> {
    let mut oracle = EquivalenceOracle::new(k);
    matrices_conjugate_with(&mut oracle, a, b)
}

pub fn matrices_conjugate_with(oracle: &mut EquivalenceOracle<'_>, a: &IntMatrix, b: &IntMatrix) -> Result<Conjugacy> {
    let k = oracle.field();
    if &a.charpoly() != k.poly() || &b.charpoly() != k.poly() {
        return Err(Error::CharpolyMismatch);
    }
    if a == b {
        return Ok(Conjugacy::Conjugate(IntMatrix::identity(a.dim())));
    }
    let e1: Vec<BigInt> = (0..a.dim()).map(|i| BigInt::from((i == 0) as i32)).collect();
    let (ia, raw_a) = pullback(k, a, &e1)?;
    let (ib, raw_b) = pullback(k, b, &e1)?;
    match oracle.equivalent(&ia, &ib)? {
        Equivalence::Equivalent(x) => {
            let u = conjugator(k, &x, &raw_a, &raw_b)?;
            if is_unimodular(&u) && (b * &u) == (&u * a) {
                Ok(Conjugacy::Conjugate(u))
            } else {
                Err(Error::Internal("reconstructed conjugator failed verification".into()))
            }
        }
        Equivalence::NotEquivalent => Ok(Conjugacy::NotConjugate),
        Equivalence::Indeterminate(_) => Ok(Conjugacy::Indeterminate),
    }
}

/// Matrix of `c ↦ x·c` from the raw basis of `a` to the raw basis of `b`.
fn conjugator(k: &NumberField, x: &FieldElement, raw_a: &QRows, raw_b: &QRows) -> Result<IntMatrix> {
    let images: QRows = raw_a.iter().map(|r| k.mul_coords(r, &x.coeffs)).collect();
    basis_change(raw_b, &images).ok_or_else(|| Error::Internal("witness does not map a onto b".into()))
}

/// Companion matrix of a monic polynomial (column convention, so that it
/// is the α-matrix of `Z[α]` in the power basis).
pub fn companion(f: &IntPoly) -> IntMatrix {
    let n = f.degree();
    let mut m = IntMatrix::zero(n);
    for i in 1..n {
        m.set(i, i - 1, BigInt::one());
    }
    for i in 0..n {
        m.set(i, n - 1, -f.coeff(i));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::rat;

    fn field(desc: &[i64], q: i64) -> NumberField {
        NumberField::with_conjugation(&IntPoly::from_i64_descending(desc), &BigInt::from(q)).unwrap()
    }

    #[test]
    fn ideal_to_matrix_examples() {
        let k = field(&[1, 1, 2], 2);
        let o = k.equation_order().lattice;
        let m = ideal_to_matrix(&k, &o).unwrap();
        assert_eq!(m.rep, IntMatrix::from_i64(&[&[0, -2], &[1, -1]]));
        assert_eq!(m.rep, companion(k.poly()));
        let three = o.scale_rational(&rat(3)).unwrap();
        assert_eq!(ideal_to_matrix(&k, &three).unwrap().rep, m.rep);
    }

    #[test]
    fn not_alpha_stable() {
        let k = field(&[1, 1, 2], 2);
        let a = IdealLattice::from_rows(&[vec![rat(1), rat(0)], vec![rat(0), rat(2)]]).unwrap();
        assert_eq!(ideal_to_matrix(&k, &a), Err(Error::NotAlphaStable));
    }

    #[test]
    fn matrix_to_ideal_examples() {
        let k = field(&[1, -2, 5], 5);
        let c = companion(k.poly());
        let e1 = vec![BigInt::one(), BigInt::zero()];
        assert_eq!(matrix_to_ideal(&k, &c, &e1).unwrap(), k.equation_order().lattice);
        let m = IntMatrix::from_i64(&[&[1, -2], &[2, 1]]);
        let a = matrix_to_ideal(&k, &m, &e1).unwrap();
        let r = k.multiplicator_ring(&a).unwrap();
        assert_eq!(k.discriminant(&r), BigInt::from(-4));
        let bad = IntMatrix::from_i64(&[&[0, -3], &[1, -1]]);
        assert_eq!(matrix_to_ideal(&k, &bad, &e1), Err(Error::CharpolyMismatch));
        assert_eq!(matrix_to_ideal(&k, &m, &[BigInt::zero(), BigInt::zero()]), Err(Error::ZeroVector));
    }

    #[test]
    fn conjugacy_examples() {
        let k = field(&[1, -2, 5], 5);
        let c = companion(k.poly());
        let m = IntMatrix::from_i64(&[&[1, -2], &[2, 1]]);
        assert_eq!(matrices_conjugate(&k, &c, &c).unwrap(), Conjugacy::Conjugate(IntMatrix::identity(2)));
        assert_eq!(matrices_conjugate(&k, &c, &m).unwrap(), Conjugacy::NotConjugate);
        let u0 = IntMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let u0inv = IntMatrix::from_i64(&[&[1, -1], &[-1, 2]]);
        let b = &(&u0 * &m) * &u0inv;
        match matrices_conjugate(&k, &m, &b).unwrap() {
            Conjugacy::Conjugate(u) => assert_eq!(&b * &u, &u * &m),
            other => panic!("{other:?}"),
        }
    }
}
