use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::rational::common_denominator;
use super::IntMatrix;
use crate::error::{Error, Result};

/// Canonical Hermite form of a full-rank rational square matrix.
///
/// `h` is the upper-triangular Hermite form of `denominator·A`, with
/// positive diagonal and entries above each pivot reduced into
/// `[0, pivot)`; `u` is unimodular with `u·(denominator·A) = h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteForm {
    pub h: IntMatrix,
    pub u: IntMatrix,
    pub denominator: BigInt,
}

/// Row-style Hermite normal form of an arbitrary integer row list.
///
/// Returns the nonzero rows of the echelon form (pivot columns strictly
/// increasing, pivots positive, entries above a pivot in `[0, pivot)`) and
/// the unimodular transform `u` (`k×k`, with the zero rows of `u·A` last).
pub fn hnf_rows(rows: &[Vec<BigInt>], ncols: usize) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    hnf_impl(rows.to_vec(), ncols, true)
}

/// Nonzero rows of the Hermite form, without the transform.
pub fn hnf_basis(rows: Vec<Vec<BigInt>>, ncols: usize) -> Vec<Vec<BigInt>> {
    hnf_impl(rows, ncols, false).0
}

fn hnf_impl(mut a: Vec<Vec<BigInt>>, ncols: usize, track: bool) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let k = a.len();
    let mut u: Vec<Vec<BigInt>> = if track {
        (0..k)
            .map(|i| (0..k).map(|j| BigInt::from((i == j) as i32)).collect())
            .collect()
    } else {
        Vec::new()
    };

    fn axpy(rows: &mut [Vec<BigInt>], dst: usize, src: usize, c: &BigInt) {
        let (d, s) = if dst < src {
            let (lo, hi) = rows.split_at_mut(src);
            (&mut lo[dst], &hi[0])
        } else {
            let (lo, hi) = rows.split_at_mut(dst);
            (&mut hi[0], &lo[src])
        };
        for (x, y) in d.iter_mut().zip(s.iter()) {
            if !y.is_zero() {
                *x += c * y;
            }
        }
    }

    let mut r = 0;
    for col in 0..ncols {
        if r == k {
            break;
        }
        loop {
            let piv = (r..k)
                .filter(|&i| !a[i][col].is_zero())
                .min_by(|&i, &j| a[i][col].abs().cmp(&a[j][col].abs()).then(i.cmp(&j)));
            let Some(p) = piv else { break };
            a.swap(p, r);
            if track {
                u.swap(p, r);
            }
            let mut done = true;
            for i in r + 1..k {
                if a[i][col].is_zero() {
                    continue;
                }
                let q = -a[i][col].div_floor(&a[r][col]);
                axpy(&mut a, i, r, &q);
                if track {
                    axpy(&mut u, i, r, &q);
                }
                done &= a[i][col].is_zero();
            }
            if done {
                break;
            }
        }
        if a[r][col].is_zero() {
            continue;
        }
        if a[r][col].is_negative() {
            for x in a[r].iter_mut() {
                *x = -&*x;
            }
            if track {
                for x in u[r].iter_mut() {
                    *x = -&*x;
                }
            }
        }
        for i in 0..r {
            if a[i][col].is_zero() {
                continue;
            }
            let q = -a[i][col].div_floor(&a[r][col]);
            axpy(&mut a, i, r, &q);
            if track {
                axpy(&mut u, i, r, &q);
            }
        }
        r += 1;
    }
    a.truncate(r);
    (a, u)
}

/// Hermite normal form of a square rational matrix after clearing its
/// common denominator. Rank-deficient input is rejected.
pub fn hermite_normal_form(a: &[Vec<BigRational>]) -> Result<HermiteForm> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) || n == 0 {
        return Err(Error::DimensionMismatch("hermite_normal_form expects a square matrix".into()));
    }
    let denominator = common_denominator(a.iter().flatten());
    let cleared: Vec<Vec<BigInt>> = a
        .iter()
        .map(|r| r.iter().map(|x| (x * &denominator).to_integer()).collect())
        .collect();
    let (h, u) = hnf_rows(&cleared, n);
    if h.len() < n {
        return Err(Error::DegenerateLattice);
    }
    Ok(HermiteForm {
        h: IntMatrix::from_rows(&h)?,
        u: IntMatrix::from_rows(&u)?,
        denominator,
    })
}

/// Solve `c·H = v` for an upper-triangular full-rank `H` (rows are basis
/// vectors). Returns the coordinate row `c`.
pub(crate) fn solve_upper(h: &[Vec<BigInt>], v: &[BigRational]) -> Vec<BigRational> {
    let n = h.len();
    let mut rem: Vec<BigRational> = v.to_vec();
    let mut c = vec![BigRational::zero(); n];
    for i in 0..n {
        if rem[i].is_zero() {
            continue;
        }
        let ci = &rem[i] / BigRational::from_integer(h[i][i].clone());
        for j in i..n {
            if !h[i][j].is_zero() {
                rem[j] -= &ci * BigRational::from_integer(h[i][j].clone());
            }
        }
        c[i] = ci;
    }
    c
}

/// Integer variant: `Some(c)` if `v` lies in the row lattice of `H`.
pub(crate) fn solve_upper_int(h: &[Vec<BigInt>], v: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = h.len();
    let mut rem: Vec<BigInt> = v.to_vec();
    let mut c = vec![BigInt::zero(); n];
    for i in 0..n {
        if rem[i].is_zero() {
            continue;
        }
        let (q, r) = rem[i].div_rem(&h[i][i]);
        if !r.is_zero() {
            return None;
        }
        for j in i..n {
            if !h[i][j].is_zero() {
                rem[j] -= &q * &h[i][j];
            }
        }
        c[i] = q;
    }
    Some(c)
}
