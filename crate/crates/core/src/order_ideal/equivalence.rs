//! Deciding whether two fractional ideals differ by a scalar.
//!
//! Any `x` with `x·a = b` lies in `c = (b : a)` and has `|N(x)| = N0` with
//! `N0 = covol(b) / covol(a)`, the minimum of `|N|` on `c \ {0}`. The search
//! enumerates `c` inside an ellipsoid of a positive definite trace form,
//! exactly, so that an empty search is a proof of inequivalence whenever the
//! ellipsoid provably contains a witness if one exists:
//!
//! * degree 2 (imaginary quadratic): `Tr(x·x̄) = 2·N(x)`, so the ellipsoid
//!   `Tr(x·x̄) ≤ 2·N0` is exact;
//! * degree 4 (quartic CM): witnesses form an orbit under a real unit `η`
//!   of the multiplicator ring, which lets the ratio `|x_1|²/|x_2|²` of the
//!   two complex absolute values be normalised into a bounded range. That
//!   range is covered by windows, each searched with a weighted form
//!   `Tr(θ·x·x̄)` whose bound on the window is explicit.
//!
//! Anything else falls back to a bounded search that can only report
//! `Indeterminate` on failure.

use std::collections::HashMap;
use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{FieldElement, IdealLattice, NumberField};
use crate::error::Result;
use crate::linalg::rational::QRows;
use crate::linalg::short_vectors::{enumerate, is_positive_definite, Enumeration};
use crate::linalg::{determinant, hnf_rows};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Equivalence {
    /// `x·a = b` for the contained `x`.
    Equivalent(FieldElement),
    NotEquivalent,
    /// The search budget ran out; the payload is the last form bound tried.
    Indeterminate(BigRational),
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Equivalent(_))
    }

    pub fn is_definitive(&self) -> bool {
        !matches!(self, Equivalence::Indeterminate(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchLimits {
    /// Fincke–Pohst nodes per equivalence query.
    pub max_nodes: u64,
    /// Width of one window in `ln(|x_1|²/|x_2|²)`.
    pub window_width: f64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_nodes: 4_000_000, window_width: 2.0 }
    }
}

/// Unit data for the real suborder of one multiplicator ring.
#[derive(Clone, Debug)]
struct RealUnit {
    /// `|ln((η_1/η_2)²)|`: the orbit step of the log ratio.
    log_step: f64,
}

/// Reusable equivalence tester; caches unit computations per ring.
pub struct EquivalenceOracle<'k> {
    k: &'k NumberField,
    limits: SearchLimits,
    units: HashMap<IdealLattice, Option<RealUnit>>,
    /// Real roots `β_1 < β_2` of the minimal polynomial of `α + q/α`.
    real_roots: Option<[f64; 2]>,
    beta: Option<FieldElement>,
}

impl<'k> EquivalenceOracle<'k> {
    pub fn new(k: &'k NumberField) -> Self {
        Self::with_limits(k, SearchLimits::default())
    }

    pub fn with_limits(k: &'k NumberField, limits: SearchLimits) -> Self {
        let mut real_roots = None;
        let mut beta = None;
        if k.degree() == 4 && k.has_conjugation() {
            if let (Some(h), Ok(b)) = (k.real_polynomial(), k.real_generator()) {
                let a = h.coeff(1).to_f64().unwrap_or(f64::NAN);
                let c = h.coeff(0).to_f64().unwrap_or(f64::NAN);
                let disc = a * a - 4.0 * c;
                if disc > 0.0 {
                    let s = disc.sqrt();
                    real_roots = Some([(-a - s) / 2.0, (-a + s) / 2.0]);
                    beta = Some(b);
                }
            }
        }
        EquivalenceOracle { k, limits, units: HashMap::new(), real_roots, beta }
    }

    pub fn field(&self) -> &'k NumberField {
        self.k
    }

    /// Full test, including the multiplicator-ring short-circuit.
    pub fn equivalent(&mut self, a: &IdealLattice, b: &IdealLattice) -> Result<Equivalence> {
        let ra = self.k.multiplicator_ring(a)?;
        let rb = self.k.multiplicator_ring(b)?;
        if ra.lattice != rb.lattice {
            return Ok(Equivalence::NotEquivalent);
        }
        let b_dual = self.k.trace_dual(b)?;
        self.equivalent_same_ring(a, b, &b_dual, &ra.lattice)
    }

    /// Test for ideals already known to share the multiplicator ring `ring`.
    /// `b_dual` is the trace dual of `b`.
    pub fn equivalent_same_ring(
        &mut self,
        a: &IdealLattice,
        b: &IdealLattice,
        b_dual: &IdealLattice,
        ring: &IdealLattice,
    ) -> Result<Equivalence> {
        let k = self.k;
        let c = k.quotient_with_dual(b_dual, a)?;
        let n0 = b.covolume() / a.covolume();
        let basis = c.basis();
        let mut budget = self.limits.max_nodes;

        if k.has_conjugation() && k.degree() == 2 {
            let gram = self.weighted_gram(&basis, None);
            let bound = &n0 * BigRational::from_integer(2.into());
            return Ok(match self.search(&c, &gram, &bound, &n0, a, b, &mut budget) {
                Search::Found(x) => Equivalence::Equivalent(x),
                Search::Exhausted => Equivalence::NotEquivalent,
                Search::OutOfBudget => Equivalence::Indeterminate(bound),
            });
        }

        if k.degree() == 4 && self.real_roots.is_some() {
            if let Some(unit) = self.real_unit(ring) {
                return Ok(self.windowed_search(&c, &basis, &n0, a, b, unit.log_step, &mut budget));
            }
        }
        Ok(self.heuristic_search(&c, &basis, &n0, a, b, &mut budget))
    }

    fn windowed_search(
        &self,
        c: &IdealLattice,
        basis: &QRows,
        n0: &BigRational,
        a: &IdealLattice,
        b: &IdealLattice,
        log_step: f64,
        budget: &mut u64,
    ) -> Equivalence {
        let [b1, b2] = self.real_roots.expect("quartic CM field");
        let n0f = n0.to_f64().unwrap_or(f64::INFINITY);
        let half = log_step / 2.0 + 1e-9;
        let windows = ((2.0 * half) / self.limits.window_width).ceil().max(1.0) as usize;
        let width = 2.0 * half / windows as f64;
        let mut last_bound = BigRational::zero();
        let mut truncated = false;
        for w in 0..windows {
            let lo = -half + w as f64 * width;
            let hi = lo + width;
            let center = (lo + hi) / 2.0;
            // θ = u + vβ with θ_1/θ_2 ≈ e^{-center}
            let tau = (-center).exp();
            let v = (tau - 1.0) / (b1 - b2);
            let u = tau - v * b1;
            let (ur, vr) = (dyadic(u), dyadic(v));
            let (uf, vf) = (ur.to_f64().unwrap_or(0.0), vr.to_f64().unwrap_or(0.0));
            let (t1, t2) = (uf + vf * b1, uf + vf * b2);
            if !(t1 > 0.0 && t2 > 0.0) {
                return self.heuristic_search(c, basis, n0, a, b, budget);
            }
            let theta = self.theta_element(&ur, &vr);
            let gram = self.weighted_gram(basis, Some(&theta));
            if !is_positive_definite(&gram) {
                return self.heuristic_search(c, basis, n0, a, b, budget);
            }
            // Tr(θ x x̄) = 2(θ_1 r_1 + θ_2 r_2) with r_1 r_2 = N0, r_1/r_2 = ρ;
            // convex in √ρ, so the window maximum sits at an endpoint
            let edge = |lr: f64| {
                let s = lr.exp().sqrt();
                t1 * s + t2 / s
            };
            let rf = 2.0 * n0f.sqrt() * edge(lo - 1e-9).max(edge(hi + 1e-9)) * (1.0 + 1e-6);
            let Some(bound) = BigRational::from_f64(rf) else {
                return Equivalence::Indeterminate(last_bound);
            };
            last_bound = bound.clone();
            match self.search(c, &gram, &bound, n0, a, b, budget) {
                Search::Found(x) => return Equivalence::Equivalent(x),
                Search::Exhausted => {}
                Search::OutOfBudget => {
                    truncated = true;
                    break;
                }
            }
        }
        if truncated {
            Equivalence::Indeterminate(last_bound)
        } else {
            Equivalence::NotEquivalent
        }
    }

    /// Bounded search with growing radius; never certifies inequivalence.
    fn heuristic_search(
        &self,
        c: &IdealLattice,
        basis: &QRows,
        n0: &BigRational,
        a: &IdealLattice,
        b: &IdealLattice,
        budget: &mut u64,
    ) -> Equivalence {
        let n = self.k.degree();
        let gram = if self.k.has_conjugation() {
            self.weighted_gram(basis, None)
        } else {
            (0..n)
                .map(|i| (0..n).map(|j| BigRational::from_integer(BigInt::from((i == j) as i32))).collect())
                .collect()
        };
        let mut bound = BigRational::zero();
        for k in 0..4u32 {
            // Tr(x x̄) ≥ n·N^{2/n}; start there and widen
            let base = if self.k.has_conjugation() {
                let nf = n0.to_f64().unwrap_or(1.0);
                BigRational::from_f64(n as f64 * nf.powf(2.0 / n as f64) * 1.0001).unwrap_or_else(BigRational::one)
            } else {
                BigRational::from_integer(BigInt::from(n))
            };
            bound = base * BigRational::from_integer(Pow::pow(BigInt::from(4), k));
            match self.search(c, &gram, &bound, n0, a, b, budget) {
                Search::Found(x) => return Equivalence::Equivalent(x),
                Search::Exhausted => {}
                Search::OutOfBudget => break,
            }
        }
        Equivalence::Indeterminate(bound)
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        &self,
        c: &IdealLattice,
        gram: &QRows,
        bound: &BigRational,
        n0: &BigRational,
        a: &IdealLattice,
        b: &IdealLattice,
        budget: &mut u64,
    ) -> Search {
        let k = self.k;
        let n = k.degree();
        let h = c.hnf();
        let d = c.denominator();
        // |N(x)| = |det M_X| / d^n for x = X/d
        let target = n0 * BigRational::from_integer(Pow::pow(d, n as u32));
        if !target.is_integer() {
            // every x ∈ c has |N(X)| integral, so no witness exists
            return Search::Exhausted;
        }
        let target = target.to_integer();
        let mut found = None;
        let (outcome, used) = enumerate(gram, bound, *budget, |z| {
            if z.iter().all(Zero::is_zero) {
                return ControlFlow::Continue(());
            }
            let mut x = vec![BigInt::zero(); n];
            for (zi, row) in z.iter().zip(h) {
                if zi.is_zero() {
                    continue;
                }
                for (xj, hj) in x.iter_mut().zip(row) {
                    *xj += zi * hj;
                }
            }
            let norm = determinant(&k.mul_matrix_int(&x));
            if norm.abs() != target {
                return ControlFlow::Continue(());
            }
            let elem = FieldElement::new(x.iter().map(|v| BigRational::new(v.clone(), d.clone())).collect());
            match k.lattice_mul_element(a, &elem) {
                Ok(xa) if xa == *b => {
                    found = Some(elem);
                    ControlFlow::Break(())
                }
                _ => ControlFlow::Continue(()),
            }
        });
        *budget = budget.saturating_sub(used);
        match outcome {
            Enumeration::Stopped => Search::Found(found.expect("witness recorded")),
            Enumeration::Complete => Search::Exhausted,
            Enumeration::Truncated => Search::OutOfBudget,
        }
    }

    /// Gram matrix of `Tr(θ·x·ȳ)` on the given basis (`θ = 1` if `None`).
    fn weighted_gram(&self, basis: &QRows, theta: Option<&FieldElement>) -> QRows {
        let k = self.k;
        let n = basis.len();
        let left: Vec<Vec<BigRational>> = basis
            .iter()
            .map(|r| match theta {
                Some(t) => k.mul_coords(r, &t.coeffs),
                None => r.clone(),
            })
            .collect();
        let right: Vec<Vec<BigRational>> =
            basis.iter().map(|r| k.conj_coords(r).expect("conjugation available")).collect();
        let mut g = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let v = k.trace_pairing(&left[i], &right[j]);
                g[j][i] = v.clone();
                g[i][j] = v;
            }
        }
        g
    }

    fn theta_element(&self, u: &BigRational, v: &BigRational) -> FieldElement {
        let k = self.k;
        let beta = self.beta.as_ref().expect("quartic CM field");
        k.add(&k.scale(&k.one(), u), &k.scale(beta, v))
    }

    fn real_unit(&mut self, ring: &IdealLattice) -> Option<RealUnit> {
        if let Some(u) = self.units.get(ring) {
            return u.clone();
        }
        let u = self.compute_real_unit(ring);
        self.units.insert(ring.clone(), u.clone());
        u
    }

    /// A nontrivial unit of `O ∩ K⁺` via the Pell equation.
    fn compute_real_unit(&self, ring: &IdealLattice) -> Option<RealUnit> {
        let k = self.k;
        let [b1, b2] = self.real_roots?;
        let beta = self.beta.as_ref()?;
        let basis = ring.basis();
        let n = basis.len();
        // integer kernel of z ↦ conj(Σ z_i b_i) - Σ z_i b_i
        let rows: QRows = basis
            .iter()
            .map(|r| {
                let c = k.conj_coords(r).expect("conjugation");
                c.iter().zip(r).map(|(x, y)| x - y).collect()
            })
            .collect();
        let den = crate::linalg::rational::common_denominator(rows.iter().flatten());
        let ints: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|x| (x * &den).to_integer()).collect()).collect();
        let (h, u) = hnf_rows(&ints, n);
        let kernel: Vec<&Vec<BigInt>> = u.iter().skip(h.len()).collect();
        if kernel.len() != 2 {
            return None;
        }
        // real elements w = s + tβ; lattice in (t, s) coordinates
        let j = (1..n).find(|&j| !beta.coeffs[j].is_zero())?;
        let mut ts_rows = Vec::new();
        for z in &kernel {
            let mut w = vec![BigRational::zero(); n];
            for (zi, row) in z.iter().zip(&basis) {
                for (wj, bj) in w.iter_mut().zip(row) {
                    *wj += BigRational::from_integer(zi.clone()) * bj;
                }
            }
            let t = &w[j] / &beta.coeffs[j];
            let s = &w[0] - &t * &beta.coeffs[0];
            ts_rows.push(vec![t, s]);
        }
        let plane = IdealLattice::from_rows(&ts_rows).ok()?;
        let pb = plane.basis();
        let (t0, s0) = (pb[0][0].clone(), pb[0][1].clone());
        if pb[1][1] != BigRational::one() {
            return None;
        }
        // ω = s0 + t0·β with β² + aβ + c = 0
        let hpoly = k.real_polynomial()?;
        let a = BigRational::from_integer(hpoly.coeff(1));
        let c = BigRational::from_integer(hpoly.coeff(0));
        let two = BigRational::from_integer(2.into());
        let trace = &two * &s0 - &t0 * &a;
        let norm = &s0 * &s0 - &a * &s0 * &t0 + &c * &t0 * &t0;
        if !trace.is_integer() || !norm.is_integer() {
            return None;
        }
        let (tr, nm) = (trace.to_integer(), norm.to_integer());
        let disc = &tr * &tr - BigInt::from(4) * &nm;
        let (x, y) = pell(&disc)?;
        // η = x + y√D = (x - yT) + 2y·ω
        let ux = BigRational::from_integer(&x - &y * &tr) + &two * BigRational::from_integer(y.clone()) * &s0;
        let vx = &two * BigRational::from_integer(y) * &t0;
        let (uf, vf) = (ux.to_f64()?, vx.to_f64()?);
        let (e1, e2) = (uf + vf * b1, uf + vf * b2);
        let step = (2.0 * (e1.abs().ln() - e2.abs().ln())).abs();
        (step.is_finite() && step > 0.0).then_some(RealUnit { log_step: step })
    }
}

enum Search {
    Found(FieldElement),
    Exhausted,
    OutOfBudget,
}

/// Nearest rational with denominator `2^20`.
fn dyadic(x: f64) -> BigRational {
    let scale = (1u64 << 20) as f64;
    let num = BigInt::from_f64((x * scale).round()).unwrap_or_default();
    BigRational::new(num, BigInt::from(1u64 << 20))
}

/// Smallest nontrivial solution of `x² - D·y² = ±1` (continued fraction of
/// `√D`); `None` for square or nonpositive `D`.
pub(crate) fn pell(d: &BigInt) -> Option<(BigInt, BigInt)> {
    if !d.is_positive() {
        return None;
    }
    let a0 = d.sqrt();
    if &a0 * &a0 == *d {
        return None;
    }
    let (mut m, mut den, mut a) = (BigInt::zero(), BigInt::one(), a0.clone());
    let (mut p_prev, mut p) = (BigInt::one(), a0.clone());
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    loop {
        let v = &p * &p - d * &q * &q;
        if v.abs().is_one() {
            return Some((p, q));
        }
        m = &den * &a - &m;
        den = (d - &m * &m) / &den;
        a = (&a0 + &m) / &den;
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
}

impl NumberField {
    /// One-off equivalence test with default limits.
    pub fn ideal_equivalent(&self, a: &IdealLattice, b: &IdealLattice) -> Result<Equivalence> {
        EquivalenceOracle::new(self).equivalent(a, b)
    }
}
