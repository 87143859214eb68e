//! Irreducibility over Q for small-degree monic integer polynomials.
//!
//! Square-free test, then factor-degree patterns modulo several primes
//! (distinct-degree factorization), then an exhaustive Kronecker-style
//! search for integer factors of the degrees that survived.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::IntPoly;
use crate::error::{Error, Result};
use crate::linalg::rational;

pub const MAX_IRREDUCIBILITY_DEGREE: usize = 8;

const PRIMES: [u64; 30] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113,
];

/// Exact irreducibility verdict over Q for a monic integer polynomial of
/// degree at most [`MAX_IRREDUCIBILITY_DEGREE`].
pub fn is_irreducible(f: &IntPoly) -> Result<bool> {
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    let n = f.degree();
    if n > MAX_IRREDUCIBILITY_DEGREE {
        return Err(Error::Capability(format!(
            "irreducibility test supports degree <= {MAX_IRREDUCIBILITY_DEGREE}, got {n}"
        )));
    }
    if n == 0 {
        return Ok(false);
    }
    if n == 1 {
        return Ok(true);
    }
    let fq = f.to_rational();
    if fq.gcd(&fq.derivative()).degree() > 0 {
        return Ok(false);
    }
    let mut candidates: BTreeSet<usize> = (1..n).collect();
    let mut used = 0;
    for &p in PRIMES.iter() {
        let fp = ModPoly::reduce(f, p);
        if fp.degree() != n || !fp.is_square_free() {
            continue;
        }
        let sums = subset_sums(&fp.factor_degrees());
        candidates.retain(|d| sums.contains(d));
        used += 1;
        if candidates.is_empty() {
            return Ok(true);
        }
        if used >= 12 {
            break;
        }
    }
    for d in candidates.into_iter().filter(|&d| 2 * d <= n) {
        if find_factor_of_degree(f, d).is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn subset_sums(degrees: &[usize]) -> BTreeSet<usize> {
    let mut sums = BTreeSet::from([0]);
    for &d in degrees {
        let next: Vec<usize> = sums.iter().map(|s| s + d).collect();
        sums.extend(next);
    }
    sums
}

/// Dense polynomial over F_p, constant term first, always trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
struct ModPoly {
    p: u64,
    c: Vec<u64>,
}

impl ModPoly {
    fn new(p: u64, mut c: Vec<u64>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        ModPoly { p, c }
    }

    fn reduce(f: &IntPoly, p: u64) -> Self {
        let pb = BigInt::from(p);
        let c = f
            .coeffs()
            .iter()
            .map(|x| {
                let r = ((x % &pb) + &pb) % &pb;
                r.to_u64().expect("residue fits")
            })
            .collect();
        Self::new(p, c)
    }

    fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    fn inv(&self, a: u64) -> u64 {
        pow_mod(a, self.p - 2, self.p)
    }

    fn sub(&self, o: &ModPoly) -> ModPoly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| {
                let a = self.c.get(i).copied().unwrap_or(0);
                let b = o.c.get(i).copied().unwrap_or(0);
                (a + self.p - b) % self.p
            })
            .collect();
        ModPoly::new(self.p, c)
    }

    fn mul(&self, o: &ModPoly) -> ModPoly {
        if self.is_zero() || o.is_zero() {
            return ModPoly::new(self.p, vec![]);
        }
        let mut c = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = (c[i + j] + a * b) % self.p;
            }
        }
        ModPoly::new(self.p, c)
    }

    fn div_rem(&self, d: &ModPoly) -> (ModPoly, ModPoly) {
        let p = self.p;
        let mut r = self.c.clone();
        if r.len() < d.c.len() {
            return (ModPoly::new(p, vec![]), self.clone());
        }
        let dd = d.degree();
        let lc_inv = self.inv(*d.c.last().expect("nonzero divisor"));
        let mut q = vec![0u64; r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = r[i + dd] * lc_inv % p;
            if c == 0 {
                continue;
            }
            for (j, dc) in d.c.iter().enumerate() {
                r[i + j] = (r[i + j] + p - c * dc % p) % p;
            }
            q[i] = c;
        }
        r.truncate(dd);
        (ModPoly::new(p, q), ModPoly::new(p, r))
    }

    fn rem(&self, d: &ModPoly) -> ModPoly {
        self.div_rem(d).1
    }

    fn gcd(&self, o: &ModPoly) -> ModPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }

    fn derivative(&self) -> ModPoly {
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, x)| (i as u64 % self.p) * x % self.p)
            .collect();
        ModPoly::new(self.p, c)
    }

    fn is_square_free(&self) -> bool {
        self.gcd(&self.derivative()).degree() == 0
    }

    fn pow_mod(&self, mut e: u64, m: &ModPoly) -> ModPoly {
        let mut base = self.rem(m);
        let mut acc = ModPoly::new(self.p, vec![1]);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    /// Degrees of the irreducible factors of a square-free polynomial.
    fn factor_degrees(&self) -> Vec<usize> {
        let x = ModPoly::new(self.p, vec![0, 1]);
        let mut rest = self.clone();
        let mut h = x.clone();
        let mut degrees = Vec::new();
        let mut i = 1;
        while 2 * i <= rest.degree() {
            h = h.pow_mod(self.p, &rest);
            let g = rest.gcd(&h.sub(&x));
            if g.degree() > 0 {
                degrees.extend(std::iter::repeat_n(i, g.degree() / i));
                rest = rest.div_rem(&g).0;
                h = h.rem(&rest);
            }
            i += 1;
        }
        if rest.degree() > 0 {
            degrees.push(rest.degree());
        }
        degrees
    }
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    acc
}

fn signed_divisors(n: i128) -> Vec<i128> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1i128;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small.iter().flat_map(|&d| [d, -d]).collect()
}

/// Monic integer factor of degree `d`, found by interpolating through
/// every admissible choice of values at `d` sample points.
fn find_factor_of_degree(f: &IntPoly, d: usize) -> Option<IntPoly> {
    // sample points where f is nonzero and has few divisors
    let mut pts: Vec<(usize, i128, i128)> = (-30i64..=30)
        .filter_map(|x| {
            let v = f.eval(&BigInt::from(x)).to_i128()?;
            (v != 0 && v.abs() < 1_000_000_000_000).then(|| (signed_divisors(v).len(), x as i128, v))
        })
        .collect();
    pts.sort();
    pts.truncate(d);
    if pts.len() < d {
        return None;
    }
    let divs: Vec<Vec<i128>> = pts.iter().map(|&(_, _, v)| signed_divisors(v)).collect();
    // Vandermonde system for the non-leading coefficients
    let vander: Vec<Vec<BigRational>> = pts
        .iter()
        .map(|&(_, x, _)| (0..d).map(|k| rational::rat((x as i64).pow(k as u32))).collect())
        .collect();
    let vinv = rational::inverse(&vander)?;
    let mut idx = vec![0usize; d];
    loop {
        let rhs: Vec<BigRational> = (0..d)
            .map(|i| {
                let x = pts[i].1 as i64;
                rational::rat(divs[i][idx[i]] as i64) - rational::rat(x.pow(d as u32))
            })
            .collect();
        let b = rational::mul_vec(&vinv, &rhs);
        if b.iter().all(|c| c.is_integer()) {
            let mut coeffs: Vec<BigInt> = b.into_iter().map(|c| c.to_integer()).collect();
            coeffs.push(BigInt::from(1));
            let g = IntPoly::new(coeffs);
            let (_, r) = f.to_rational().div_rem(&g.to_rational());
            if r.is_zero() {
                return Some(g);
            }
        }
        // odometer
        let mut k = 0;
        loop {
            if k == d {
                return None;
            }
            idx[k] += 1;
            if idx[k] < divs[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn irr(desc: &[i64]) -> bool {
        is_irreducible(&IntPoly::from_i64_descending(desc)).unwrap()
    }

    #[test]
    fn examples() {
        assert!(irr(&[1, 1, 2]));
        // (t^2 + t + 2)^2
        assert!(!irr(&[1, 2, 5, 4, 4]));
        assert!(!irr(&[1, -4, 4]));
        assert!(irr(&[1, -2, 5]));
    }

    #[test]
    fn reducible_mod_every_prime_but_irreducible() {
        // t^4 + 1 splits modulo every prime
        assert!(irr(&[1, 0, 0, 0, 1]));
        // t^4 - 10t^2 + 1, minimal polynomial of sqrt2 + sqrt3
        assert!(irr(&[1, 0, -10, 0, 1]));
        // (t^2 - 2)(t^2 - 3) splits the same way but is reducible
        assert!(!irr(&[1, 0, -5, 0, 6]));
    }

    #[test]
    fn higher_degree() {
        // (t^3 + 2t + 7)(t^5 - t + 3)
        let a = IntPoly::from_i64_descending(&[1, 0, 2, 7]);
        let b = IntPoly::from_i64_descending(&[1, 0, 0, 0, -1, 3]);
        assert!(!is_irreducible(&a.mul(&b)).unwrap());
        // cyclotomic Φ_15 has degree 8
        assert!(irr(&[1, -1, 0, 1, -1, 1, 0, -1, 1]));
        let nine = IntPoly::from_i64_descending(&[1, 0, 0, 0, 0, 0, 0, 0, 0, 1]);
        assert!(matches!(is_irreducible(&nine), Err(Error::Capability(_))));
    }

    #[test]
    fn factor_search_finds_quadratic() {
        let g = find_factor_of_degree(&IntPoly::from_i64_descending(&[1, 0, -5, 0, 6]), 2).unwrap();
        assert!(g == IntPoly::from_i64_descending(&[1, 0, -2]) || g == IntPoly::from_i64_descending(&[1, 0, -3]));
    }
}
