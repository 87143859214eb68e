//! Ideal class monoid of an order by bounded-index enumeration of integral
//! ideals followed by deduplication up to equivalence.
//!
//! Integral ideals are generated one composition step at a time: if
//! `b ⊂ c` are O-modules with `c/b` simple, then `ℓc ⊆ b` for the prime ℓ
//! under `c/b`, so `b/ℓc` is an O-stable subspace of `c/ℓc`. Walking
//! stable subspaces from `O` reaches every integral ideal of bounded
//! index without scanning all sublattices.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::rational::{self, QRows};
use crate::order_ideal::{Equivalence, EquivalenceOracle, FieldElement, IdealLattice, NumberField, OrderDesc};
use crate::weil::is_prime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Completeness {
    Certified,
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IcmClass {
    /// Integral representative, canonical among those found first by index.
    pub ideal: IdealLattice,
    pub multiplicator_ring: IdealLattice,
    /// `[O : ideal]`.
    pub index: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IcmResult {
    pub order: OrderDesc,
    pub classes: Vec<IcmClass>,
    pub index_bound: u64,
    /// Bound above which no new class can appear.
    pub certified_bound: u64,
    pub completeness: Completeness,
    /// Pairs `(candidate, class)` the equivalence search could not decide.
    /// The candidate was kept as its own class.
    pub indeterminate_pairs: Vec<(IdealLattice, usize)>,
}

impl IcmResult {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// Upper bound for 4/π used in the Minkowski constant.
fn four_over_pi_upper() -> BigRational {
    BigRational::new(127_324.into(), 100_000.into())
}

/// Every class of fractional O-ideals contains an integral ideal of index
/// at most the returned value.
///
/// For a class `[I]` pick a short `x ∈ (O:I)`; then `xI ⊆ O` and
/// `[O:xI] ≤ M_K·|N(z)|/√|disc O|` for any nonzero `z` with `z·O^∨ ⊆ O`,
/// where `M_K` is the Minkowski constant. `f'(α)` is always such a `z`.
pub fn certified_index_bound(k: &NumberField, o: &OrderDesc) -> Result<u64> {
    let n = k.degree();
    let o_dual = k.trace_dual(&o.lattice)?;
    let conductor_like = k.quotient_with_dual(&o_dual, &o_dual)?;
    let mut candidates = conductor_like.basis_elements();
    candidates.push(k.from_poly(&k.poly().derivative()));
    let mut best: Option<BigRational> = None;
    for z in &candidates {
        if z.is_zero() {
            continue;
        }
        debug_assert!(conductor_like.contains_element(z));
        let nz = k.norm(z).abs();
        if best.as_ref().is_none_or(|b| &nz < b) {
            best = Some(nz);
        }
    }
    let norm = best.ok_or(Error::DegenerateLattice)?;
    let mut nfact = BigInt::one();
    for i in 2..=n {
        nfact *= i;
    }
    let r2 = n / 2;
    let mut m = BigRational::new(nfact, BigInt::from(n).pow(n as u32));
    for _ in 0..r2 {
        m *= four_over_pi_upper();
    }
    let disc = k.discriminant(o).abs();
    let x = (&m * &norm) * (&m * &norm) / BigRational::from_integer(disc);
    let b = x.floor().to_integer().sqrt();
    b.to_u64().ok_or_else(|| Error::Capability(format!("index bound {b} is out of range")))
}

fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| is_prime(p)).collect()
}

/// Integer matrix (rows = coordinates of `g·b_j` in the basis) of each
/// generator on the lattice with basis rows `basis`.
fn action_matrices(k: &NumberField, basis: &QRows, gens: &[FieldElement]) -> Result<Vec<Vec<Vec<BigInt>>>> {
    let inv = rational::inverse(basis).ok_or(Error::DegenerateLattice)?;
    gens.iter()
        .map(|g| {
            let images: QRows = basis.iter().map(|r| k.mul_coords(r, &g.coeffs)).collect();
            let coords = rational::mul(&images, &inv);
            if !coords.iter().all(|r| rational::is_integral_row(r)) {
                return Err(Error::Internal("lattice is not stable under an order generator".into()));
            }
            Ok(coords.into_iter().map(|r| r.into_iter().map(|x| x.to_integer()).collect()).collect())
        })
        .collect()
}

fn reduce_mod(m: &[Vec<BigInt>], l: u64) -> Vec<Vec<u64>> {
    let lb = BigInt::from(l);
    m.iter().map(|r| r.iter().map(|x| x.mod_floor(&lb).to_u64().unwrap_or(0)).collect()).collect()
}

/// All `dim`-dimensional subspaces `U ⊆ F_l^n` (as reduced row echelon
/// bases) with `G·u ∈ U` for every `G` in `mats` and `u ∈ U`, where
/// `(G·u)_i = Σ_j G[i][j]·u_j`.
fn stable_subspaces(mats: &[Vec<Vec<u64>>], n: usize, dim: usize, l: u64) -> Vec<Vec<Vec<u64>>> {
    if dim == 1 && !mats.is_empty() {
        return stable_lines(mats, n, l);
    }
    let mut out = Vec::new();
    for pivots in combinations(n, dim) {
        // free slots: (row, col) with col > pivot(row), col not a pivot
        let mut slots = Vec::new();
        for (r, &p) in pivots.iter().enumerate() {
            for c in p + 1..n {
                if !pivots.contains(&c) {
                    slots.push((r, c));
                }
            }
        }
        let mut vals = vec![0u64; slots.len()];
        loop {
            let mut rows = vec![vec![0u64; n]; dim];
            for (r, &p) in pivots.iter().enumerate() {
                rows[r][p] = 1;
            }
            for (s, &(r, c)) in slots.iter().enumerate() {
                rows[r][c] = vals[s];
            }
            if is_stable_subspace(mats, &rows, &pivots, l) {
                out.push(rows);
            }
            // odometer
            let mut i = 0;
            loop {
                if i == vals.len() {
                    break;
                }
                vals[i] += 1;
                if vals[i] < l {
                    break;
                }
                vals[i] = 0;
                i += 1;
            }
            if i == vals.len() {
                break;
            }
        }
    }
    out
}

/// Common eigenlines: every line lies in an eigenspace of the first matrix.
fn stable_lines(mats: &[Vec<Vec<u64>>], n: usize, l: u64) -> Vec<Vec<Vec<u64>>> {
    let mut out = Vec::new();
    for lambda in 0..l {
        let shifted: Vec<Vec<u64>> = (0..n)
            .map(|i| (0..n).map(|j| (mats[0][i][j] + if i == j { l - lambda } else { 0 }) % l).collect())
            .collect();
        let space = kernel(&rref(shifted, l), n, l);
        if space.is_empty() {
            continue;
        }
        // lines of the eigenspace, by RREF coefficient vectors
        let e = space.len();
        for lead in 0..e {
            let mut coeffs = vec![0u64; e - lead - 1];
            loop {
                let mut v = space[lead].clone();
                for (t, &c) in coeffs.iter().enumerate() {
                    for j in 0..n {
                        v[j] = (v[j] + c * space[lead + 1 + t][j]) % l;
                    }
                }
                let p = v.iter().position(|&x| x != 0).expect("independent kernel basis");
                let inv = inv_mod(v[p], l);
                for x in v.iter_mut() {
                    *x = *x * inv % l;
                }
                let rows = vec![v];
                if is_stable_subspace(&mats[1..], &rows, &[p], l) {
                    out.push(rows);
                }
                let mut i = 0;
                while i < coeffs.len() {
                    coeffs[i] += 1;
                    if coeffs[i] < l {
                        break;
                    }
                    coeffs[i] = 0;
                    i += 1;
                }
                if i == coeffs.len() {
                    break;
                }
            }
        }
    }
    out
}

fn inv_mod(a: u64, l: u64) -> u64 {
    let e = BigInt::from(a).extended_gcd(&BigInt::from(l));
    e.x.mod_floor(&BigInt::from(l)).to_u64().unwrap_or(0)
}

/// Reduced row echelon form over F_l, zero rows dropped.
fn rref(mut m: Vec<Vec<u64>>, l: u64) -> Vec<Vec<u64>> {
    let n = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        let inv = inv_mod(m[r][c], l);
        for x in m[r].iter_mut() {
            *x = *x * inv % l;
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..n {
                    m[i][j] = (m[i][j] + (l - f) * m[r][j]) % l;
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

fn is_stable_subspace(mats: &[Vec<Vec<u64>>], rows: &[Vec<u64>], pivots: &[usize], l: u64) -> bool {
    let n = rows.first().map_or(0, Vec::len);
    for g in mats {
        for u in rows {
            let mut v: Vec<u64> = (0..n).map(|i| (0..n).fold(0u64, |acc, j| (acc + g[i][j] * u[j]) % l)).collect();
            for (r, &p) in pivots.iter().enumerate() {
                let c = v[p];
                if c != 0 {
                    for j in 0..n {
                        v[j] = (v[j] + (l - c) * rows[r][j]) % l;
                    }
                }
            }
            if v.iter().any(|&x| x != 0) {
                return false;
            }
        }
    }
    true
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Null space of a reduced row echelon matrix over F_l.
fn kernel(rows: &[Vec<u64>], n: usize, l: u64) -> Vec<Vec<u64>> {
    let pivots: Vec<usize> = rows.iter().map(|r| r.iter().position(|&x| x != 0).unwrap_or(n)).collect();
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut v = vec![0u64; n];
            v[f] = 1;
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = (l - rows[r][f] % l) % l;
            }
            v
        })
        .collect()
}

/// All O-submodules of `O` (integral ideals) of index at most `bound`,
/// with their indices, sorted by index and then canonical form.
pub fn integral_ideals(k: &NumberField, o: &OrderDesc, bound: u64) -> Result<Vec<(IdealLattice, u64)>> {
    let n = k.degree();
    let primes = primes_up_to(bound);
    let mut seen: BTreeSet<(u64, IdealLattice)> = BTreeSet::new();
    seen.insert((1, o.lattice.clone()));
    let mut queue = vec![(o.lattice.clone(), 1u64)];
    while let Some((c, idx)) = queue.pop() {
        let basis = c.basis();
        let actions = action_matrices(k, &basis, &o.generators)?;
        for &l in &primes {
            if idx.saturating_mul(l) > bound {
                break;
            }
            // W = U^⊥ satisfies W·A ⊆ W exactly when A·U ⊆ U
            let mats: Vec<Vec<Vec<u64>>> = actions.iter().map(|m| reduce_mod(m, l)).collect();
            let mut step = l;
            for codim in 1..=n {
                if idx.saturating_mul(step) > bound {
                    break;
                }
                for u in stable_subspaces(&mats, n, codim, l) {
                    let w = kernel(&u, n, l);
                    let lq = BigRational::from_integer(l.into());
                    let mut gens: QRows = basis.iter().map(|r| r.iter().map(|x| x * &lq).collect()).collect();
                    for v in &w {
                        let lifted: Vec<BigRational> = v.iter().map(|&x| BigRational::from_integer(x.into())).collect();
                        gens.push(rational::vec_mul(&lifted, &basis));
                    }
                    let sub = IdealLattice::from_rows(&gens)?;
                    let sub_idx = idx * step;
                    if seen.insert((sub_idx, sub.clone())) {
                        queue.push((sub, sub_idx));
                    }
                }
                step = step.saturating_mul(l);
            }
        }
    }
    Ok(seen.into_iter().map(|(i, a)| (a, i)).collect())
}

/// Reference enumeration: every Hermite-form sublattice of `O` with
/// determinant at most `bound` that is stable under the ring generators.
/// Exponential in the dimension; meant for cross-checking.
pub fn integral_ideals_exhaustive(k: &NumberField, o: &OrderDesc, bound: u64) -> Result<Vec<(IdealLattice, u64)>> {
    let n = k.degree();
    let basis = o.lattice.basis();
    let mut out = BTreeSet::new();
    let mut diag = vec![1u64; n];
    fn diagonals(i: usize, rem: u64, diag: &mut Vec<u64>, acc: &mut Vec<Vec<u64>>) {
        if i == diag.len() {
            acc.push(diag.clone());
            return;
        }
        for d in 1..=rem {
            diag[i] = d;
            diagonals(i + 1, rem / d, diag, acc);
        }
    }
    let mut shapes = Vec::new();
    diagonals(0, bound, &mut diag, &mut shapes);
    for d in shapes {
        // free entries H[i][j], i < j, range 0..d[j]
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let mut vals = vec![0u64; slots.len()];
        loop {
            let mut h = vec![vec![0u64; n]; n];
            for i in 0..n {
                h[i][i] = d[i];
            }
            for (s, &(i, j)) in slots.iter().enumerate() {
                h[i][j] = vals[s];
            }
            let rows: QRows = h
                .iter()
                .map(|r| {
                    let v: Vec<BigRational> = r.iter().map(|&x| BigRational::from_integer(x.into())).collect();
                    rational::vec_mul(&v, &basis)
                })
                .collect();
            let sub = IdealLattice::from_rows(&rows)?;
            if o.generators.iter().all(|g| k.is_stable(&sub, g)) {
                out.insert((d.iter().product::<u64>(), sub));
            }
            let mut s = 0;
            loop {
                if s == vals.len() {
                    break;
                }
                vals[s] += 1;
                if vals[s] < d[slots[s].1] {
                    break;
                }
                vals[s] = 0;
                s += 1;
            }
            if s == vals.len() {
                break;
            }
        }
    }
    Ok(out.into_iter().map(|(i, a)| (a, i)).collect())
}

/// Enumerate `ICM(O)`. With `index_bound = None` the certified bound is
/// used.
pub fn enumerate_icm(k: &NumberField, o: &OrderDesc, index_bound: Option<u64>) -> Result<IcmResult> {
    let mut oracle = EquivalenceOracle::new(k);
    enumerate_icm_with(&mut oracle, o, index_bound)
}

pub fn enumerate_icm_with(oracle: &mut EquivalenceOracle<'_>, o: &OrderDesc, index_bound: Option<u64>) -> Result<IcmResult> {
    let k = oracle.field();
    if index_bound == Some(0) {
        return Err(Error::InvalidParameter("index bound must be positive".into()));
    }
    k.verify_order(o)?;
    let certified_bound = certified_index_bound(k, o)?.max(1);
    let bound = index_bound.unwrap_or(certified_bound);
    let candidates = integral_ideals(k, o, bound)?;

    struct Rep {
        class: usize,
        dual: IdealLattice,
    }
    let mut classes: Vec<IcmClass> = Vec::new();
    let mut buckets: HashMap<(IdealLattice, IdealLattice), Vec<Rep>> = HashMap::new();
    let mut indeterminate_pairs = Vec::new();
    for (a, index) in candidates {
        let ring = k.multiplicator_ring(&a)?.lattice;
        let dual = k.trace_dual(&a)?;
        // a·a^∨ is unchanged by scaling a
        let key = (ring.clone(), k.ideal_product(&a, &dual)?);
        let reps = buckets.entry(key).or_default();
        let mut found = false;
        let mut undecided = Vec::new();
        for rep in reps.iter() {
            match oracle.equivalent_same_ring(&a, &classes[rep.class].ideal, &rep.dual, &ring)? {
                Equivalence::Equivalent(_) => {
                    found = true;
                    break;
                }
                Equivalence::NotEquivalent => {}
                Equivalence::Indeterminate(_) => undecided.push(rep.class),
            }
        }
        if found {
            continue;
        }
        for c in undecided {
            indeterminate_pairs.push((a.clone(), c));
        }
        reps.push(Rep { class: classes.len(), dual });
        classes.push(IcmClass { ideal: a, multiplicator_ring: ring, index });
    }
    let completeness = if bound >= certified_bound && indeterminate_pairs.is_empty() {
        Completeness::Certified
    } else {
        Completeness::Heuristic
    };
    Ok(IcmResult {
        order: o.clone(),
        classes,
        index_bound: bound,
        certified_bound,
        completeness,
        indeterminate_pairs,
    })
}

/// `σ_ℓ = f(1)/(ℓ(1 − α))`.
pub fn sigma(k: &NumberField, l: u64) -> Result<FieldElement> {
    let f1 = k.poly().eval(&BigInt::one());
    if !is_prime(l) {
        return Err(Error::NotPrime(l));
    }
    if f1.is_zero() || !(&f1 % BigInt::from(l)).is_zero() {
        return Err(Error::NotPointCountDivisor);
    }
    let one_minus = k.sub(&k.one(), &k.alpha());
    let inv = k.inverse(&one_minus)?;
    Ok(k.scale(&inv, &BigRational::new(f1, BigInt::from(l))))
}

/// Classes whose representative is stable under `σ_ℓ`.
pub fn refine_by_sigma(k: &NumberField, result: &IcmResult, l: u64) -> Result<Vec<IdealLattice>> {
    let s = sigma(k, l)?;
    let mut out = Vec::new();
    for c in &result.classes {
        let stable = k.is_stable(&c.ideal, &s);
        let in_ring = c.multiplicator_ring.contains_element(&s);
        if stable != in_ring {
            return Err(Error::Internal("σ-stability disagrees with multiplicator-ring membership".into()));
        }
        if stable {
            out.push(c.ideal.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::IntPoly;

    fn field(desc: &[i64], q: i64) -> NumberField {
        NumberField::with_conjugation(&IntPoly::from_i64_descending(desc), &BigInt::from(q)).unwrap()
    }

    #[test]
    fn worked_examples() {
        let k = field(&[1, 1, 2], 2);
        let o = k.frobenius_order().unwrap();
        let r = enumerate_icm(&k, &o, None).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.completeness, Completeness::Certified);
        assert!(refine_by_sigma(&k, &r, 2).unwrap().is_empty());

        let k = field(&[1, -2, 5], 5);
        let o = k.frobenius_order().unwrap();
        let r = enumerate_icm(&k, &o, None).unwrap();
        assert_eq!(r.len(), 2);
        let discs: BTreeSet<BigInt> = r
            .classes
            .iter()
            .map(|c| k.discriminant(&k.order_from_lattice(c.multiplicator_ring.clone()).unwrap()))
            .collect();
        assert_eq!(discs, [BigInt::from(-16), BigInt::from(-4)].into_iter().collect());
        let kept = refine_by_sigma(&k, &r, 2).unwrap();
        assert_eq!(kept.len(), 1);
        let ring = k.multiplicator_ring(&kept[0]).unwrap();
        assert_eq!(k.discriminant(&ring), BigInt::from(-4));
    }

    #[test]
    fn bound_errors() {
        let k = field(&[1, 1, 2], 2);
        let o = k.frobenius_order().unwrap();
        assert!(matches!(enumerate_icm(&k, &o, Some(0)), Err(Error::InvalidParameter(_))));
        let r = enumerate_icm(&k, &o, Some(1)).unwrap();
        assert_eq!(r.classes[0].ideal, o.lattice);
        assert_eq!(refine_by_sigma(&k, &r, 3), Err(Error::NotPointCountDivisor));
        assert_eq!(refine_by_sigma(&k, &r, 4), Err(Error::NotPrime(4)));
    }

    #[test]
    fn walk_matches_exhaustive_enumeration() {
        for (desc, q, bound) in [
            (vec![1, -2, 5], 5, 30),
            (vec![1, 1, 2], 2, 30),
            (vec![1, 0, 9], 9, 40),
            (vec![1, -1, -1, -2, 4], 2, 12),
        ] {
            let k = field(&desc, q);
            let o = k.frobenius_order().unwrap();
            let walk = integral_ideals(&k, &o, bound).unwrap();
            let brute = integral_ideals_exhaustive(&k, &o, bound).unwrap();
            assert_eq!(walk, brute, "{desc:?}");
        }
    }

    #[test]
    fn classes_are_monotone_in_the_bound() {
        let k = field(&[1, 0, 9], 9);
        let o = k.frobenius_order().unwrap();
        let full = enumerate_icm(&k, &o, None).unwrap();
        let mut prev = 0;
        for b in 1..=full.certified_bound.max(1) + 3 {
            let r = enumerate_icm(&k, &o, Some(b)).unwrap();
            assert!(r.len() >= prev);
            prev = r.len();
        }
        assert_eq!(prev, full.len());
    }
}
