//! q-Weil polynomials: validation, ordinariness, irreducibility and
//! enumeration of small isogeny-class contexts.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::{is_irreducible, sturm, IntPoly, MAX_IRREDUCIBILITY_DEGREE};

/// Largest `q` accepted by [`enumerate_weil_contexts`] unless the filter
/// raises it.
pub const DEFAULT_Q_CAP: u64 = 16;

/// A validated `(q, g, f)` triple. `f` is always monic of degree `2g`;
/// the flags record what was found, not what was asked for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeilContext {
    pub p: u64,
    pub r: u32,
    pub q: BigInt,
    pub g: usize,
    pub f: IntPoly,
    pub is_weil: bool,
    /// Only set for Weil polynomials.
    pub is_ordinary: bool,
    pub is_irreducible: bool,
}

impl WeilContext {
    /// All three hypotheses of the classification pipeline hold.
    pub fn is_ordinary_simple(&self) -> bool {
        self.is_weil && self.is_ordinary && self.is_irreducible
    }

    pub fn point_count(&self) -> BigInt {
        point_count(&self.f)
    }

    /// `q^g`, the determinant of every Frobenius matrix.
    pub fn q_pow_g(&self) -> BigInt {
        Pow::pow(&self.q, self.g as u32)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `Some((p, r))` when `q = p^r` with `p` prime and `r ≥ 1`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut r = 0;
    let mut m = q;
    while m.is_multiple_of(p) {
        m /= p;
        r += 1;
    }
    (m == 1).then_some((p, r))
}

/// Build a context from a highest-degree-first coefficient list.
pub fn make_context(p: u64, r: u32, g: usize, coefficients: &[BigInt]) -> Result<WeilContext> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if r == 0 || g == 0 {
        return Err(Error::InvalidParameter("r and g must be positive".into()));
    }
    if coefficients.len() != 2 * g + 1 {
        return Err(Error::WrongDegree { expected: 2 * g, found: coefficients.len().saturating_sub(1) });
    }
    if !coefficients[0].is_one() {
        return Err(Error::NotMonic);
    }
    if 2 * g > MAX_IRREDUCIBILITY_DEGREE {
        return Err(Error::Capability(format!("dimension g = {g} is beyond the supported range")));
    }
    let q: BigInt = Pow::pow(&BigInt::from(p), r);
    let f = IntPoly::from_descending(coefficients);
    let is_weil = validate_weil(&f, &q);
    let is_ordinary = is_weil && is_ordinary(&f, p);
    let is_irreducible = is_irreducible(&f)?;
    Ok(WeilContext { p, r, q, g, f, is_weil, is_ordinary, is_irreducible })
}

pub fn make_context_i64(p: u64, r: u32, g: usize, coefficients: &[i64]) -> Result<WeilContext> {
    let c: Vec<BigInt> = coefficients.iter().map(|&x| BigInt::from(x)).collect();
    make_context(p, r, g, &c)
}

/// Why a polynomial failed [`check_weil`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeilViolation {
    OddDegree,
    NotMonic,
    ConstantTerm,
    FunctionalEquation,
    RootSize,
}

impl WeilViolation {
    pub fn code(self) -> &'static str {
        match self {
            WeilViolation::OddDegree => "odd_degree",
            WeilViolation::NotMonic => "not_monic",
            WeilViolation::ConstantTerm => "constant_term",
            WeilViolation::FunctionalEquation => "functional_equation",
            WeilViolation::RootSize => "root_size",
        }
    }
}

/// Exact check that every complex root of `f` has absolute value `√q`.
pub fn check_weil(f: &IntPoly, q: &BigInt) -> std::result::Result<(), WeilViolation> {
    let n = f.degree();
    if n == 0 || n % 2 == 1 {
        return Err(WeilViolation::OddDegree);
    }
    if !f.is_monic() {
        return Err(WeilViolation::NotMonic);
    }
    let g = n / 2;
    if f.coeff(0) != Pow::pow(q, g as u32) {
        return Err(WeilViolation::ConstantTerm);
    }
    // roots closed under α ↦ q/α: a_{g-k} = q^k·a_{g+k}
    for k in 1..=g {
        let qk: BigInt = Pow::pow(q, k as u32);
        if f.coeff(g - k) != qk * f.coeff(g + k) {
            return Err(WeilViolation::FunctionalEquation);
        }
    }
    let h = real_weil_polynomial(f, q);
    let sf = h.to_rational().square_free_part();
    let two = BigRational::from_integer(2.into());
    if sturm::distinct_roots_in_symmetric_interval(&sf, &two, q) != sf.degree() {
        return Err(WeilViolation::RootSize);
    }
    Ok(())
}

pub fn validate_weil(f: &IntPoly, q: &BigInt) -> bool {
    check_weil(f, q).is_ok()
}

/// The degree-`g` polynomial `h` with `f(t) = t^g·h(t + q/t)`.
///
/// Assumes `f` satisfies the functional equation.
pub fn real_weil_polynomial(f: &IntPoly, q: &BigInt) -> IntPoly {
    let g = f.degree() / 2;
    // P_k(s) = t^k + (q/t)^k as a polynomial in s = t + q/t
    let mut p_prev = IntPoly::from_i64_ascending(&[2]);
    let mut p_cur = IntPoly::from_i64_ascending(&[0, 1]);
    let s = p_cur.clone();
    let mut h = IntPoly::new(vec![f.coeff(g)]);
    for k in 1..=g {
        if k > 1 {
            let next = sub(&s.mul(&p_cur), &p_prev.mul(&IntPoly::new(vec![q.clone()])));
            p_prev = std::mem::replace(&mut p_cur, next);
        }
        h = add(&h, &p_cur.mul(&IntPoly::new(vec![f.coeff(g + k)])));
    }
    h
}

fn add(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let n = a.coeffs().len().max(b.coeffs().len());
    IntPoly::new((0..n).map(|i| a.coeff(i) + b.coeff(i)).collect())
}

fn sub(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let n = a.coeffs().len().max(b.coeffs().len());
    IntPoly::new((0..n).map(|i| a.coeff(i) - b.coeff(i)).collect())
}

/// Middle coefficient coprime to `p`. Meaningful for Weil polynomials,
/// where it is equivalent to half of the roots being `p`-adic units.
pub fn is_ordinary(f: &IntPoly, p: u64) -> bool {
    let g = f.degree() / 2;
    f.coeff(g).gcd(&BigInt::from(p)).is_one()
}

pub fn point_count(f: &IntPoly) -> BigInt {
    f.eval(&BigInt::one())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeilFilter {
    pub require_ordinary: bool,
    pub require_irreducible: bool,
    pub q_cap: u64,
}

impl WeilFilter {
    pub const ALL: WeilFilter = WeilFilter { require_ordinary: false, require_irreducible: false, q_cap: DEFAULT_Q_CAP };
    pub const ORDINARY: WeilFilter = WeilFilter { require_ordinary: true, require_irreducible: false, q_cap: DEFAULT_Q_CAP };
    pub const ORDINARY_SIMPLE: WeilFilter =
        WeilFilter { require_ordinary: true, require_irreducible: true, q_cap: DEFAULT_Q_CAP };

    fn accepts(&self, c: &WeilContext) -> bool {
        c.is_weil && (!self.require_ordinary || c.is_ordinary) && (!self.require_irreducible || c.is_irreducible)
    }
}

impl Default for WeilFilter {
    fn default() -> Self {
        WeilFilter::ALL
    }
}

/// Every Weil polynomial for `(q = p^r, g)` passing the filter, sorted
/// lexicographically by the highest-degree-first coefficient list.
///
/// Only the free coefficients `a_1..a_g` are searched (within the bounds
/// `|a_i| ≤ C(2g, i)·q^{i/2}`); the rest are forced by `a_{2g-k} = q^k·a_k`,
/// which every Weil polynomial satisfies.
pub fn enumerate_weil_contexts(p: u64, r: u32, g: usize, filter: WeilFilter) -> Result<Vec<WeilContext>> {
    if !(1..=2).contains(&g) {
        return Err(Error::Capability(format!("enumeration supports g in {{1, 2}}, got {g}")));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if r == 0 {
        return Err(Error::InvalidParameter("r must be positive".into()));
    }
    let q = p
        .checked_pow(r)
        .filter(|&q| q <= filter.q_cap)
        .ok_or_else(|| Error::Capability(format!("q = {p}^{r} exceeds the cap {}", filter.q_cap)))?;
    let qb = BigInt::from(q);
    let n = 2 * g;
    // |a_i| ≤ C(n, i)·q^{i/2}  ⇔  a_i² ≤ C(n, i)²·q^i
    let bound = |i: usize| -> i64 {
        let c = binomial(n, i) as u128;
        let sq = c * c * (q as u128).pow(i as u32);
        sq.sqrt() as i64
    };
    let ranges: Vec<(i64, i64)> = (1..=g).map(|i| (-bound(i), bound(i))).collect();
    let mut out = Vec::new();
    let mut free = ranges.iter().map(|r| r.0).collect::<Vec<_>>();
    loop {
        let mut desc = vec![BigInt::zero(); n + 1];
        desc[0] = BigInt::one();
        for (i, &a) in free.iter().enumerate() {
            desc[i + 1] = BigInt::from(a);
        }
        // desc[n - k] = q^{g-k}... coefficient of t^k for k < g is q^{g-k}·a_{2g-k}
        for k in 0..g {
            let qk: BigInt = Pow::pow(&qb, (g - k) as u32);
            desc[n - k] = qk * &desc[k];
        }
        let f = IntPoly::from_descending(&desc);
        if validate_weil(&f, &qb) {
            let ctx = make_context(p, r, g, &desc)?;
            if filter.accepts(&ctx) {
                out.push(ctx);
            }
        }
        // odometer, last coefficient fastest
        let mut i = g;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if free[i] < ranges[i].1 {
                free[i] += 1;
                break;
            }
            free[i] = ranges[i].0;
        }
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Convenience for tests and reports: the coefficient list as `i64`s,
/// highest degree first.
pub fn descending_i64(f: &IntPoly) -> Option<Vec<i64>> {
    f.to_descending().iter().map(|c| c.to_i64()).collect()
}

/// Parse "1,-2,5" (highest degree first).
pub fn parse_coefficients(s: &str) -> Result<Vec<BigInt>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("invalid coefficient {:?}", t.trim())))
        })
        .collect()
}

/// `true` when `q` is a perfect square.
pub fn is_square(q: &BigInt) -> bool {
    !q.is_negative() && {
        let s = q.sqrt();
        &s * &s == *q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, r: u32, g: usize, c: &[i64]) -> WeilContext {
        make_context_i64(p, r, g, c).unwrap()
    }

    #[test]
    fn context_examples() {
        let a = ctx(2, 1, 1, &[1, 1, 2]);
        assert!(a.is_weil && a.is_ordinary && a.is_irreducible);
        let b = ctx(5, 1, 1, &[1, -2, 5]);
        assert!(b.is_weil && b.is_ordinary && b.is_irreducible);
        let c = ctx(2, 1, 1, &[1, 0, 2]);
        assert!(c.is_weil && !c.is_ordinary);
    }

    #[test]
    fn context_errors() {
        assert_eq!(make_context_i64(4, 1, 1, &[1, 1, 2]), Err(Error::NotPrime(4)));
        assert_eq!(make_context_i64(2, 1, 1, &[1, 1]), Err(Error::WrongDegree { expected: 2, found: 1 }));
        assert_eq!(make_context_i64(2, 1, 1, &[2, 1, 2]), Err(Error::NotMonic));
    }

    #[test]
    fn weil_examples() {
        let q2 = BigInt::from(2);
        assert!(validate_weil(&IntPoly::from_i64_descending(&[1, 1, 2]), &q2));
        assert!(validate_weil(&IntPoly::from_i64_descending(&[1, -2, 5]), &BigInt::from(5)));
        assert!(!validate_weil(&IntPoly::from_i64_descending(&[1, -5, 2]), &q2));
        assert_eq!(check_weil(&IntPoly::from_i64_descending(&[1, 1, 3]), &q2), Err(WeilViolation::ConstantTerm));
        // q = 4: t^2 ± 4t + 4 has the double root ∓2, on the boundary
        assert!(validate_weil(&IntPoly::from_i64_descending(&[1, 4, 4]), &BigInt::from(4)));
        assert!(!validate_weil(&IntPoly::from_i64_descending(&[1, 5, 4]), &BigInt::from(4)));
    }

    #[test]
    fn real_polynomial() {
        // t^4 + t^3 + 2t^2 + 2t + 4 = t^2·((s^2 - 4) + s + 2)
        let f = IntPoly::from_i64_descending(&[1, 1, 2, 2, 4]);
        let h = real_weil_polynomial(&f, &BigInt::from(2));
        assert_eq!(h, IntPoly::from_i64_descending(&[1, 1, -2]));
    }

    #[test]
    fn ordinariness_and_point_count() {
        assert!(is_ordinary(&IntPoly::from_i64_descending(&[1, 1, 2]), 2));
        assert!(!is_ordinary(&IntPoly::from_i64_descending(&[1, 0, 2]), 2));
        assert!(!is_ordinary(&IntPoly::from_i64_descending(&[1, 1, 2, 2, 4]), 2));
        assert_eq!(point_count(&IntPoly::from_i64_descending(&[1, 1, 2])), BigInt::from(4));
        assert_eq!(point_count(&IntPoly::from_i64_descending(&[1, -2, 5])), BigInt::from(4));
        assert_eq!(point_count(&IntPoly::from_i64_descending(&[1, 3, 4])), BigInt::from(8));
    }

    #[test]
    fn enumeration_q2() {
        let all = enumerate_weil_contexts(2, 1, 1, WeilFilter::ALL).unwrap();
        let a1: Vec<i64> = all.iter().map(|c| descending_i64(&c.f).unwrap()[1]).collect();
        assert_eq!(a1, vec![-2, -1, 0, 1, 2]);
        let os = enumerate_weil_contexts(2, 1, 1, WeilFilter::ORDINARY_SIMPLE).unwrap();
        let a1: Vec<i64> = os.iter().map(|c| descending_i64(&c.f).unwrap()[1]).collect();
        assert_eq!(a1, vec![-1, 1]);
        for c in enumerate_weil_contexts(3, 1, 1, WeilFilter::ORDINARY).unwrap() {
            assert!(c.f.coeff(1).gcd(&BigInt::from(3)).is_one());
        }
    }

    #[test]
    fn enumeration_limits() {
        assert!(matches!(enumerate_weil_contexts(2, 1, 3, WeilFilter::ALL), Err(Error::Capability(_))));
        assert!(matches!(enumerate_weil_contexts(2, 5, 1, WeilFilter::ALL), Err(Error::Capability(_))));
    }

    #[test]
    fn quartic_enumeration_is_weil_and_symmetric() {
        let list = enumerate_weil_contexts(2, 1, 2, WeilFilter::ORDINARY_SIMPLE).unwrap();
        assert!(!list.is_empty());
        for c in &list {
            assert!(c.is_ordinary_simple());
            assert_eq!(c.f.coeff(0), BigInt::from(4));
            assert!(c.point_count().is_positive());
        }
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
    }
}
