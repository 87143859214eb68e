use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// Smith normal form `S = U·A·V` together with its transforms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// Diagonal of `S`: nonnegative, each dividing the next.
    pub invariant_factors: Vec<BigInt>,
}

impl SnfResult {
    /// Invariant factors different from 1, i.e. the cyclic factors of the
    /// cokernel `Zⁿ / A·Zⁿ` (a 0 stands for a free factor `Z`).
    pub fn nontrivial_factors(&self) -> Vec<BigInt> {
        self.invariant_factors.iter().filter(|d| *d != &BigInt::from(1)).cloned().collect()
    }
}

struct Work {
    n: usize,
    s: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.s.swap(i, j);
        self.u.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in 0..self.n {
            self.s[r].swap(i, j);
            self.v[r].swap(i, j);
        }
    }

    /// row_i += c·row_j
    fn add_row(&mut self, i: usize, j: usize, c: &BigInt) {
        for k in 0..self.n {
            let t = c * &self.s[j][k];
            self.s[i][k] += t;
            let t = c * &self.u[j][k];
            self.u[i][k] += t;
        }
    }

    /// col_i += c·col_j
    fn add_col(&mut self, i: usize, j: usize, c: &BigInt) {
        for r in 0..self.n {
            let t = c * &self.s[r][j];
            self.s[r][i] += t;
            let t = c * &self.v[r][j];
            self.v[r][i] += t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for k in 0..self.n {
            self.s[i][k] = -&self.s[i][k];
            self.u[i][k] = -&self.u[i][k];
        }
    }

    /// Smallest nonzero |entry| in the trailing block, row-major tie-break.
    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.n {
            for j in t..self.n {
                let x = &self.s[i][j];
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.s[bi][bj].abs() <= x.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }
}

fn to_matrix(rows: Vec<Vec<BigInt>>) -> IntMatrix {
    IntMatrix::from_rows(&rows).expect("square")
}

/// Smith normal form by iterated gcd elimination with deterministic pivot
/// choice (smallest nonzero absolute value, then row-major order).
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let n = a.dim();
    let mut w = Work {
        n,
        s: a.rows(),
        u: IntMatrix::identity(n).rows(),
        v: IntMatrix::identity(n).rows(),
    };
    'outer: for t in 0..n {
        loop {
            let Some((pi, pj)) = w.pivot(t) else {
                break 'outer;
            };
            if pi != t {
                w.swap_rows(pi, t);
            }
            if pj != t {
                w.swap_cols(pj, t);
            }
            let mut clean = true;
            for i in t + 1..n {
                if w.s[i][t].is_zero() {
                    continue;
                }
                let q = w.s[i][t].div_floor(&w.s[t][t]);
                w.add_row(i, t, &-q);
                clean &= w.s[i][t].is_zero();
            }
            for j in t + 1..n {
                if w.s[t][j].is_zero() {
                    continue;
                }
                let q = w.s[t][j].div_floor(&w.s[t][t]);
                w.add_col(j, t, &-q);
                clean &= w.s[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let p = w.s[t][t].clone();
            let bad = (t + 1..n).find(|&i| (t + 1..n).any(|j| !w.s[i][j].is_multiple_of(&p)));
            match bad {
                Some(i) => w.add_row(t, i, &BigInt::from(1)),
                None => break,
            }
        }
        if w.s[t][t].is_negative() {
            w.negate_row(t);
        }
    }
    let invariant_factors = (0..n).map(|i| w.s[i][i].clone()).collect();
    SnfResult { s: to_matrix(w.s), u: to_matrix(w.u), v: to_matrix(w.v), invariant_factors }
}
