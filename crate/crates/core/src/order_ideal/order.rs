use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{FieldElement, IdealLattice, NumberField};
use crate::error::{Error, Result};
use crate::linalg::hnf_basis;
use crate::linalg::rational::common_denominator;

/// An order of `K`: a lattice containing 1 and closed under
/// multiplication, with the ring generators it was built from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderDesc {
    pub lattice: IdealLattice,
    /// Ring generators; together with 1 they generate the order as a ring.
    pub generators: Vec<FieldElement>,
}

impl OrderDesc {
    pub fn contains(&self, x: &FieldElement) -> bool {
        self.lattice.contains_element(x)
    }

    /// `self ⊆ other`.
    pub fn is_suborder_of(&self, other: &OrderDesc) -> bool {
        self.lattice.is_subset_of(&other.lattice)
    }
}

impl NumberField {
    /// `Z[α]`, the lattice `Z^n` itself.
    pub fn equation_order(&self) -> OrderDesc {
        OrderDesc { lattice: IdealLattice::standard(self.degree()), generators: vec![self.alpha()] }
    }

    /// `Z[α, q/α]`.
    pub fn frobenius_order(&self) -> Result<OrderDesc> {
        self.ring_closure(&[self.alpha(), self.q_over_alpha()?])
    }

    /// Smallest order containing the given algebraic integers.
    pub fn ring_closure(&self, generators: &[FieldElement]) -> Result<OrderDesc> {
        let n = self.degree();
        for g in generators {
            if !self.is_integral(g) {
                return Err(Error::NotOrderGenerator);
            }
        }
        // span{1}, grown by multiplying with each generator until stable;
        // integrality bounds the chain, so the loop terminates
        let mut denom = BigInt::one();
        let mut rows: Vec<Vec<BigInt>> = vec![(0..n).map(|i| BigInt::from((i == 0) as i32)).collect()];
        loop {
            let current: Vec<Vec<BigRational>> = rows
                .iter()
                .map(|r| r.iter().map(|x| BigRational::new(x.clone(), denom.clone())).collect())
                .collect();
            let mut all = current.clone();
            for r in &current {
                for g in generators {
                    all.push(self.mul_coords(r, &g.coeffs));
                }
            }
            let d = common_denominator(all.iter().flatten());
            let ints: Vec<Vec<BigInt>> =
                all.iter().map(|r| r.iter().map(|x| (x * &d).to_integer()).collect()).collect();
            let h = hnf_basis(ints, n);
            let next: Vec<Vec<BigRational>> = h
                .iter()
                .map(|r| r.iter().map(|x| BigRational::new(x.clone(), d.clone())).collect())
                .collect();
            if next == current {
                break;
            }
            // keep the representation compact
            let d2 = common_denominator(next.iter().flatten());
            rows = next.iter().map(|r| r.iter().map(|x| (x * &d2).to_integer()).collect()).collect();
            denom = d2;
        }
        if rows.len() < n {
            return Err(Error::DegenerateLattice);
        }
        let lattice = IdealLattice::from_int_rows(rows, denom, n)?;
        let order = OrderDesc { lattice, generators: generators.to_vec() };
        self.verify_order(&order)?;
        Ok(order)
    }

    /// Check `1 ∈ O` and `O·O ⊆ O`.
    pub fn verify_order(&self, o: &OrderDesc) -> Result<()> {
        if !o.lattice.contains_element(&self.one()) {
            return Err(Error::Internal("order does not contain 1".into()));
        }
        let prod = self.ideal_product(&o.lattice, &o.lattice)?;
        if prod != o.lattice {
            return Err(Error::Internal("order is not closed under multiplication".into()));
        }
        Ok(())
    }

    /// Wrap a lattice known to be a ring; the basis serves as generators.
    pub fn order_from_lattice(&self, lattice: IdealLattice) -> Result<OrderDesc> {
        let generators = lattice.basis_elements();
        let o = OrderDesc { lattice, generators };
        self.verify_order(&o)?;
        Ok(o)
    }

    /// `(a : a)`.
    pub fn multiplicator_ring(&self, a: &IdealLattice) -> Result<OrderDesc> {
        let ring = self.ideal_quotient(a, a)?;
        self.order_from_lattice(ring)
    }

    /// `a` is closed under multiplication by every generator of `o`.
    pub fn is_ideal_of(&self, a: &IdealLattice, o: &OrderDesc) -> bool {
        o.generators.iter().all(|g| self.is_stable(a, g))
    }

    pub fn discriminant(&self, o: &OrderDesc) -> BigInt {
        let d = self.lattice_discriminant(&o.lattice);
        debug_assert!(d.is_integer());
        d.to_integer()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::rat;
    use crate::poly::IntPoly;

    fn field(desc: &[i64], q: i64) -> NumberField {
        NumberField::with_conjugation(&IntPoly::from_i64_descending(desc), &BigInt::from(q)).unwrap()
    }

    #[test]
    fn closures() {
        let k = field(&[1, 1, 2], 2);
        let za = k.ring_closure(&[k.alpha()]).unwrap();
        assert_eq!(za.lattice, IdealLattice::standard(2));
        let fr = k.frobenius_order().unwrap();
        assert_eq!(fr.lattice, za.lattice);
        assert_eq!(k.discriminant(&za), BigInt::from(-7));

        let k4 = field(&[1, -1, -1, -2, 4], 2);
        assert_eq!(k4.ring_closure(&[k4.alpha()]).unwrap().lattice, IdealLattice::standard(4));
        let fr4 = k4.frobenius_order().unwrap();
        assert!(IdealLattice::standard(4).is_subset_of(&fr4.lattice));
        assert!(k4.is_stable(&fr4.lattice, &k4.q_over_alpha().unwrap()));
    }

    #[test]
    fn sigma_extends_the_order() {
        // f = t^2 - 2t + 5: σ_2 = 4/(2(1-α)) generates the maximal order
        let k = field(&[1, -2, 5], 5);
        let one_minus = k.sub(&k.one(), &k.alpha());
        let sigma = k.scale(&k.inverse(&one_minus).unwrap(), &rat(2));
        let big = k.ring_closure(&[k.alpha(), k.q_over_alpha().unwrap(), sigma]).unwrap();
        let za = k.equation_order();
        assert_eq!(k.lattice_index(&big.lattice, &za.lattice), BigRational::new(1.into(), 2.into()));
        assert_eq!(k.discriminant(&big), BigInt::from(-4));
    }

    #[test]
    fn rejects_non_integral_generator() {
        let k = field(&[1, 1, 2], 2);
        let half = k.scale(&k.alpha(), &BigRational::new(1.into(), 2.into()));
        assert_eq!(k.ring_closure(&[half]), Err(Error::NotOrderGenerator));
    }

    #[test]
    fn multiplicator_rings() {
        let k = field(&[1, -2, 5], 5);
        let za = k.equation_order();
        assert_eq!(k.multiplicator_ring(&za.lattice).unwrap().lattice, za.lattice);
        // a = (2, 1 + α) is an ideal of Z[α] whose multiplicator ring is Z[i]
        let a = IdealLattice::from_rows(&[vec![rat(2), rat(0)], vec![rat(1), rat(1)]]).unwrap();
        assert!(k.is_ideal_of(&a, &za));
        let r = k.multiplicator_ring(&a).unwrap();
        assert_eq!(k.discriminant(&r), BigInt::from(-4));
        let x = k.from_int(3);
        let xa = k.lattice_mul_element(&a, &x).unwrap();
        assert_eq!(k.multiplicator_ring(&xa).unwrap().lattice, r.lattice);
    }
}
