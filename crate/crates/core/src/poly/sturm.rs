//! Sturm sequences with exact sign evaluation at points `c·√q`.
//!
//! Used to decide whether every root of a real polynomial lies in the
//! closed interval `[-2√q, 2√q]` without any floating point.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::QPoly;

pub fn sturm_sequence(p: &QPoly) -> Vec<QPoly> {
    let mut seq = vec![p.clone()];
    let d = p.derivative();
    if d.is_zero() {
        return seq;
    }
    seq.push(d);
    loop {
        let n = seq.len();
        let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(r.neg());
    }
    seq
}

/// A point `c·√q` with rational `c` and positive integer `q`.
#[derive(Clone, Debug)]
pub struct ScaledSqrt {
    pub c: BigRational,
    pub q: BigInt,
}

impl ScaledSqrt {
    fn sqrt_q(&self) -> Option<BigInt> {
        let s = self.q.sqrt();
        (&s * &s == self.q).then_some(s)
    }

    /// Value as a rational when `q` is a perfect square.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.sqrt_q().map(|s| &self.c * BigRational::from_integer(s))
    }
}

/// Sign of `p(c·√q)`, exactly.
pub fn sign_at(p: &QPoly, x: &ScaledSqrt) -> Ordering {
    if let Some(r) = x.as_rational() {
        return p.eval(&r).cmp(&BigRational::zero());
    }
    // p(c√q) = A + B√q, split by parity of the exponent
    let q = BigRational::from_integer(x.q.clone());
    let mut a = BigRational::zero();
    let mut b = BigRational::zero();
    let mut c_pow = BigRational::from_integer(1.into());
    let mut q_pow = BigRational::from_integer(1.into());
    for (k, coeff) in p.coeffs().iter().enumerate() {
        if k > 0 {
            c_pow = &c_pow * &x.c;
            if k % 2 == 0 {
                q_pow = &q_pow * &q;
            }
        }
        let term = coeff * &c_pow * &q_pow;
        if k % 2 == 0 {
            a += term;
        } else {
            b += term;
        }
    }
    sign_of_sum(&a, &b, &q)
}

/// Sign of `a + b·√q` for non-square `q`.
fn sign_of_sum(a: &BigRational, b: &BigRational, q: &BigRational) -> Ordering {
    let sa = a.cmp(&BigRational::zero());
    let sb = b.cmp(&BigRational::zero());
    match (sa, sb) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (x, y) if x == y => x,
        _ => {
            // opposite signs: compare a² with b²·q
            let lhs = a * a;
            let rhs = b * b * q;
            match lhs.cmp(&rhs) {
                Ordering::Greater => sa,
                Ordering::Less => sb,
                Ordering::Equal => Ordering::Equal,
            }
        }
    }
}

fn variations(seq: &[QPoly], x: &ScaledSqrt) -> usize {
    let signs: Vec<Ordering> = seq.iter().map(|p| sign_at(p, x)).filter(|s| *s != Ordering::Equal).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots of `p` in the closed interval
/// `[-scale·√q, scale·√q]`.
pub fn distinct_roots_in_symmetric_interval(p: &QPoly, scale: &BigRational, q: &BigInt) -> usize {
    if p.degree() == 0 {
        return 0;
    }
    let mut sf = p.square_free_part();
    let hi = ScaledSqrt { c: scale.clone(), q: q.clone() };
    let lo = ScaledSqrt { c: -scale.clone(), q: q.clone() };
    let mut at_endpoints = 0;
    match hi.as_rational() {
        Some(h) => {
            for e in [h.clone(), -h] {
                if sf.eval(&e).is_zero() {
                    at_endpoints += 1;
                    let lin = QPoly::new(vec![-e, BigRational::from_integer(1.into())]);
                    sf = sf.div_rem(&lin).0;
                }
            }
        }
        None => {
            if sign_at(&sf, &hi) == Ordering::Equal {
                // conjugate endpoints are roots together: divide by x² - scale²·q
                at_endpoints += 2;
                let c0 = -(scale * scale * BigRational::from_integer(q.clone()));
                let quad = QPoly::new(vec![c0, BigRational::zero(), BigRational::from_integer(1.into())]);
                sf = sf.div_rem(&quad).0;
            }
        }
    }
    if sf.degree() == 0 {
        return at_endpoints;
    }
    let seq = sturm_sequence(&sf);
    let inside = variations(&seq, &lo) - variations(&seq, &hi);
    at_endpoints + inside
}
