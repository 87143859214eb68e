//! Exact Fincke–Pohst enumeration of lattice points inside an ellipsoid.
//!
//! The quadratic form is given by a positive definite rational Gram matrix;
//! every comparison against the bound is exact, so the enumeration is
//! complete: each integer vector `z` with `zᵀ·G·z ≤ bound` is visited once.

use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::rational::QRows;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Enumeration {
    /// Every point in the ellipsoid was visited.
    Complete,
    /// The visitor asked to stop.
    Stopped,
    /// The node budget ran out before the enumeration finished.
    Truncated,
}

/// `G = Lᵀ·D·L` with unit upper-triangular `L`, stored as `q[i][i] = D_i`
/// and `q[i][j] = L_ij` for `j > i`. `None` if `G` is not positive definite.
fn ldl(gram: &QRows) -> Option<QRows> {
    let n = gram.len();
    let mut q = gram.clone();
    for i in 0..n {
        if !q[i][i].is_positive() {
            return None;
        }
        for j in i + 1..n {
            q[j][i] = q[i][j].clone();
            q[i][j] = &q[i][j] / &q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                let t = &q[k][i] * &q[i][l];
                q[k][l] -= t;
            }
        }
    }
    Some(q)
}

pub fn is_positive_definite(gram: &QRows) -> bool {
    ldl(gram).is_some()
}

/// Visit all integer vectors `z` (including zero) with `zᵀ·G·z ≤ bound`.
/// Returns the outcome and the number of tree nodes used.
///
/// The tree walk runs in floating point with a relative slack, and every
/// leaf is re-checked exactly, so the visited set is exactly the ellipsoid
/// as long as rounding stays below the slack (it does by many orders of
/// magnitude for the small, well-conditioned forms used here).
///
/// Panics if `gram` is not positive definite.
pub fn enumerate<F>(gram: &QRows, bound: &BigRational, max_nodes: u64, mut visit: F) -> (Enumeration, u64)
where
    F: FnMut(&[BigInt]) -> ControlFlow<()>,
{
    let q = ldl(gram).expect("Gram matrix must be positive definite");
    let n = q.len();
    if n == 0 || bound.is_negative() {
        return (Enumeration::Complete, 0);
    }
    let qf: Vec<Vec<f64>> = q.iter().map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()).collect();
    let bf = bound.to_f64().unwrap_or(f64::INFINITY);
    // exact leaf test on the integer-scaled form
    let den = super::rational::common_denominator(gram.iter().flatten().chain(std::iter::once(bound)));
    let gi: Vec<Vec<BigInt>> = gram.iter().map(|r| r.iter().map(|x| (x * &den).to_integer()).collect()).collect();
    let bi = (bound * BigRational::from_integer(den)).to_integer();
    let mut walk = Walk {
        q: &qf,
        slack: bf * 1e-7 + 1e-12,
        z: vec![0i64; n],
        zb: vec![BigInt::zero(); n],
        nodes: 0,
        max_nodes,
        gi: &gi,
        bi: &bi,
    };
    let outcome = match walk.recurse(n - 1, bf, &mut visit) {
        ControlFlow::Continue(()) => Enumeration::Complete,
        ControlFlow::Break(stop) => stop,
    };
    (outcome, walk.nodes.min(max_nodes))
}

struct Walk<'a> {
    q: &'a [Vec<f64>],
    slack: f64,
    z: Vec<i64>,
    zb: Vec<BigInt>,
    nodes: u64,
    max_nodes: u64,
    gi: &'a [Vec<BigInt>],
    bi: &'a BigInt,
}

impl Walk<'_> {
    fn leaf_ok(&mut self) -> bool {
        let n = self.z.len();
        for (b, &x) in self.zb.iter_mut().zip(&self.z) {
            *b = BigInt::from(x);
        }
        let mut s = BigInt::zero();
        for i in 0..n {
            if self.z[i] == 0 {
                continue;
            }
            let mut row = BigInt::zero();
            for j in 0..n {
                if self.z[j] != 0 {
                    row += &self.gi[i][j] * &self.zb[j];
                }
            }
            s += row * &self.zb[i];
        }
        &s <= self.bi
    }

    fn recurse<F>(&mut self, i: usize, remaining: f64, visit: &mut F) -> ControlFlow<Enumeration>
    where
        F: FnMut(&[BigInt]) -> ControlFlow<()>,
    {
        let n = self.q.len();
        // center: z_i should be close to -Σ_{j>i} L_ij z_j
        let mut center = 0.0;
        for j in i + 1..n {
            center -= self.q[i][j] * self.z[j] as f64;
        }
        let d = self.q[i][i];
        let radius = ((remaining + self.slack).max(0.0) / d).sqrt();
        if !radius.is_finite() || radius > 1e15 {
            return ControlFlow::Break(Enumeration::Truncated);
        }
        let lo = (center - radius).ceil() as i64;
        let hi = (center + radius).floor() as i64;
        // closest values first so that early stops find short vectors
        let mut order: Vec<i64> = (lo..=hi).collect();
        order.sort_by(|a, b| (*a as f64 - center).abs().total_cmp(&(*b as f64 - center).abs()));
        for x in order {
            let t = x as f64 - center;
            let c = d * t * t;
            if c > remaining + self.slack {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return ControlFlow::Break(Enumeration::Truncated);
            }
            self.z[i] = x;
            if i == 0 {
                if self.leaf_ok() && visit(&self.zb).is_break() {
                    return ControlFlow::Break(Enumeration::Stopped);
                }
            } else {
                self.recurse(i - 1, remaining - c, visit)?;
            }
        }
        self.z[i] = 0;
        ControlFlow::Continue(())
    }
}

/// Largest integer `k ≥ 0` with `k² ≤ x` for a nonnegative rational `x`.
pub fn isqrt_floor(x: &BigRational) -> BigInt {
    let fl = x.floor().to_integer();
    if fl.is_negative() {
        return BigInt::zero();
    }
    fl.sqrt()
}
