//! Dense exact-rational matrix helpers on row lists.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Zero};

pub type QRows = Vec<Vec<BigRational>>;

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn to_rat_rows(rows: &[Vec<BigInt>]) -> QRows {
    rows.iter()
        .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
        .collect()
}

pub fn identity(n: usize) -> QRows {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect()
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> QRows {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = BigRational::zero();
                    for (k, x) in row.iter().enumerate() {
                        if !x.is_zero() && !b[k][j].is_zero() {
                            s += x * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Row vector times matrix.
pub fn vec_mul(v: &[BigRational], b: &[Vec<BigRational>]) -> Vec<BigRational> {
    let cols = b.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| {
            let mut s = BigRational::zero();
            for (k, x) in v.iter().enumerate() {
                if !x.is_zero() && !b[k][j].is_zero() {
                    s += x * &b[k][j];
                }
            }
            s
        })
        .collect()
}

/// Matrix times column vector.
pub fn mul_vec(a: &[Vec<BigRational>], v: &[BigRational]) -> Vec<BigRational> {
    a.iter()
        .map(|row| row.iter().zip(v).filter(|(x, _)| !x.is_zero()).map(|(x, y)| x * y).sum())
        .collect()
}

/// Gauss–Jordan inverse, `None` when singular.
pub fn inverse(a: &[Vec<BigRational>]) -> Option<QRows> {
    let n = a.len();
    let mut m: QRows = a.to_vec();
    let mut inv = identity(n);
    for col in 0..n {
        let piv = (col..n).find(|&i| !m[i][col].is_zero())?;
        m.swap(piv, col);
        inv.swap(piv, col);
        let p = m[col][col].clone();
        for j in 0..n {
            m[col][j] = &m[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for i in 0..n {
            if i != col && !m[i][col].is_zero() {
                let factor = m[i][col].clone();
                for j in 0..n {
                    let t = &factor * &m[col][j];
                    m[i][j] -= t;
                    let t = &factor * &inv[col][j];
                    inv[i][j] -= t;
                }
            }
        }
    }
    Some(inv)
}

pub fn determinant(a: &[Vec<BigRational>]) -> BigRational {
    let n = a.len();
    let mut m: QRows = a.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&i| !m[i][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for i in col + 1..n {
            if m[i][col].is_zero() {
                continue;
            }
            let factor = &m[i][col] / &p;
            for j in col..n {
                let t = &factor * &m[col][j];
                m[i][j] -= t;
            }
        }
    }
    det
}

/// Characteristic polynomial `det(tI - A)`, coefficients ascending, via
/// Faddeev–LeVerrier. Over the integers every division is exact.
pub fn faddeev_leverrier<T>(a: &[Vec<T>]) -> Vec<T>
where
    T: Num + Clone + FromPrimitive,
{
    let n = a.len();
    let mut coeffs = vec![T::zero(); n + 1];
    coeffs[n] = T::one();
    let mut m: Vec<Vec<T>> = vec![vec![T::zero(); n]; n];
    for k in 1..=n {
        // M_k = A·M_{k-1} + c_{n-k+1}·I
        let mut next = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            for l in 0..n {
                if a[i][l].is_zero() {
                    continue;
                }
                for j in 0..n {
                    next[i][j] = next[i][j].clone() + a[i][l].clone() * m[l][j].clone();
                }
            }
            next[i][i] = next[i][i].clone() + coeffs[n - k + 1].clone();
        }
        m = next;
        let mut tr = T::zero();
        for i in 0..n {
            for l in 0..n {
                tr = tr + a[i][l].clone() * m[l][i].clone();
            }
        }
        let kk = T::from_usize(k).expect("small integer");
        coeffs[n - k] = T::zero() - tr / kk;
    }
    coeffs
}

/// Least common multiple of all denominators.
pub fn common_denominator<'a>(it: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    use num_integer::Integer;
    it.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn is_integral_row(v: &[BigRational]) -> bool {
    v.iter().all(|x| x.is_integer())
}
