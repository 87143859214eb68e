//! Cyclicity of the rational-point groups across an isogeny class.
//!
//! A Frobenius matrix `M` (characteristic polynomial `f`) belongs to
//! `m_{f,c}` when `q^{g-1} | τ(M)` and `gcd(τ(1 - M), f(1)) ≥ c`. Every
//! variety in the class gives a member of `m_{f,1}`, and the non-cyclic
//! ones are exactly those in `m_{f,2}`. The Smith form of `1 - M`
//! (the group of rational points) serves as an independent oracle.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Refusal, Result};
use crate::icm::{enumerate_icm_with, refine_by_sigma, Completeness};
use crate::latimer::{ideal_to_matrix, matrix_to_ideal_default, MatrixClass};
use crate::linalg::{cofactor_matrix, determinant, smith_normal_form, tau, IntMatrix};
use crate::order_ideal::{EquivalenceOracle, IdealLattice, NumberField};
use crate::weil::{is_prime, WeilContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Cyclic,
    NotCyclic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicityReport {
    pub class_ref: MatrixClass,
    pub multiplicator_ring: IdealLattice,
    pub tau_m: BigInt,
    pub tau_one_minus_m: BigInt,
    pub gcd_with_point_count: BigInt,
    pub in_m_f_1: bool,
    pub in_m_f_2: bool,
    /// Diagonal of the Smith form of `1 - M`.
    pub invariant_factors: Vec<BigInt>,
    /// Nontrivial invariant factors: the rational-point group is their
    /// product of cyclic groups.
    pub group: Vec<BigInt>,
    pub verdict: Verdict,
    pub oracle_agrees: bool,
    /// `τ(1 - M) = 0`, where the gcd convention `gcd(0, n) = n` applies.
    pub gcd_zero: bool,
}

/// Cross-check of σ_ℓ-stability against `ℓ | τ(1 - M)` for one prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaCheck {
    pub ell: u64,
    /// Class indices kept by [`refine_by_sigma`].
    pub stable: Vec<usize>,
    /// Class indices with `ℓ | τ(1 - M)`.
    pub divisible: Vec<usize>,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationSummary {
    pub total: usize,
    pub cyclic: usize,
    pub not_cyclic: usize,
    pub completeness: Completeness,
    pub index_bound: u64,
    pub certified_bound: u64,
    pub indeterminate_pairs: usize,
    pub oracle_agreement: bool,
    pub sigma_agreement: bool,
    pub gcd_zero_events: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsogenyClassReport {
    pub q: BigInt,
    pub g: usize,
    /// Descending coefficients of `f`.
    pub coefficients: Vec<BigInt>,
    pub point_count: BigInt,
    pub reports: Vec<CyclicityReport>,
    pub sigma_checks: Vec<SigmaCheck>,
    pub summary: ClassificationSummary,
}

fn check_charpoly(m: &IntMatrix, ctx: &WeilContext) -> Result<()> {
    if m.dim() != ctx.f.degree() || m.charpoly() != ctx.f {
        return Err(Error::CharpolyMismatch);
    }
    Ok(())
}

fn divides(d: &BigInt, n: &BigInt) -> bool {
    if d.is_zero() {
        n.is_zero()
    } else {
        (n % d).is_zero()
    }
}

/// `M ∈ m_{f,c}` for `c ∈ {1, 2}`.
pub fn membership(m: &IntMatrix, ctx: &WeilContext, c: u32) -> Result<bool> {
    check_charpoly(m, ctx)?;
    if c != 1 && c != 2 {
        return Err(Error::InvalidParameter(format!("c must be 1 or 2, got {c}")));
    }
    let qg1: BigInt = Pow::pow(&ctx.q, (ctx.g - 1) as u32);
    let g = tau(&m.one_minus()).gcd(&ctx.point_count());
    Ok(divides(&qg1, &tau(m)) && g >= BigInt::from(c))
}

/// Whether `q·M⁻¹` is integral, after checking that the two equivalent
/// routes (`q^{g-1} | τ(M)`, and `q/α`-stability of the ideal attached to
/// `M`) agree.
pub fn q_stability_check(m: &IntMatrix, ctx: &WeilContext) -> Result<bool> {
    check_charpoly(m, ctx)?;
    let k = NumberField::from_context(ctx)?;
    q_stability_in(&k, m, ctx)
}

fn q_stability_in(k: &NumberField, m: &IntMatrix, ctx: &WeilContext) -> Result<bool> {
    // M⁻¹ = Cof(M)ᵗ / det(M)
    let det = determinant(m);
    if det.is_zero() {
        return Err(Error::Internal("singular Frobenius matrix".into()));
    }
    let cof = cofactor_matrix(m);
    let by_inverse = cof.entries().iter().all(|x| ((&ctx.q * x) % &det).is_zero());
    let qg1: BigInt = Pow::pow(&ctx.q, (ctx.g - 1) as u32);
    let by_tau = divides(&qg1, &tau(m));
    let a = matrix_to_ideal_default(k, m)?;
    let by_ideal = k.is_stable(&a, &k.q_over_alpha()?);
    if by_inverse != by_tau || by_tau != by_ideal {
        return Err(Error::Internal(format!(
            "q-stability routes disagree: inverse {by_inverse}, tau {by_tau}, ideal {by_ideal}"
        )));
    }
    Ok(by_inverse)
}

/// Smith form of `1 - M` and whether the group it describes is cyclic.
pub fn group_structure_oracle(m: &IntMatrix, ctx: &WeilContext) -> Result<(Vec<BigInt>, bool)> {
    check_charpoly(m, ctx)?;
    let snf = smith_normal_form(&m.one_minus());
    let factors = snf.invariant_factors.clone();
    // all but the largest factor are 1
    let n = factors.len();
    let cyclic = factors[..n.saturating_sub(1)].iter().all(One::is_one);
    Ok((factors, cyclic))
}

fn report_for(k: &NumberField, class: MatrixClass, ring: IdealLattice, ctx: &WeilContext) -> Result<CyclicityReport> {
    let m = class.rep.clone();
    let f1 = ctx.point_count();
    // structural identities; a failure here is a kernel bug
    if determinant(&m) != ctx.q_pow_g() {
        return Err(Error::Internal("det(M) ≠ q^g".into()));
    }
    let one_minus = m.one_minus();
    if determinant(&one_minus) != f1 {
        return Err(Error::Internal("det(1 - M) ≠ f(1)".into()));
    }
    if !m.eval_poly(&ctx.f).is_zero() {
        return Err(Error::Internal("f(M) ≠ 0".into()));
    }
    let tau_m = tau(&m);
    let tau_1m = tau(&one_minus);
    if !divides(&tau_1m, &f1) {
        return Err(Error::Internal("τ(1 - M) does not divide f(1)".into()));
    }
    let gcd = tau_1m.gcd(&f1);
    let in1 = membership(&m, ctx, 1)?;
    let in2 = membership(&m, ctx, 2)?;
    if !q_stability_in(k, &m, ctx)? || !in1 {
        return Err(Error::Internal("class representative is not in m_{f,1}".into()));
    }
    let (factors, oracle_cyclic) = group_structure_oracle(&m, ctx)?;
    let product = factors.iter().fold(BigInt::one(), |acc, x| acc * x);
    if product != f1.abs() {
        return Err(Error::Internal("invariant factors do not multiply to f(1)".into()));
    }
    let verdict = if in2 { Verdict::NotCyclic } else { Verdict::Cyclic };
    let group = factors.iter().filter(|x| !x.is_one()).cloned().collect();
    Ok(CyclicityReport {
        class_ref: class,
        multiplicator_ring: ring,
        tau_m,
        gcd_with_point_count: gcd,
        gcd_zero: tau_1m.is_zero(),
        tau_one_minus_m: tau_1m,
        in_m_f_1: in1,
        in_m_f_2: in2,
        invariant_factors: factors,
        group,
        oracle_agrees: oracle_cyclic == (verdict == Verdict::Cyclic),
        verdict,
    })
}

fn prime_divisors(n: &BigInt) -> Vec<u64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = 2u64;
    while BigInt::from(p) * BigInt::from(p) <= n {
        let pb = BigInt::from(p);
        if (&n % &pb).is_zero() {
            out.push(p);
            while (&n % &pb).is_zero() {
                n /= &pb;
            }
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push(u64::try_from(&n).unwrap_or(u64::MAX));
    }
    out
}

/// Refuse contexts outside the hypotheses of the classification.
pub fn check_hypotheses(ctx: &WeilContext) -> Result<()> {
    if !ctx.is_weil {
        return Err(Error::Refused(Refusal::NotWeil));
    }
    if !ctx.is_ordinary {
        return Err(Error::Refused(Refusal::NotOrdinary));
    }
    if !ctx.is_irreducible {
        return Err(Error::Refused(Refusal::NotIrreducible));
    }
    Ok(())
}

/// Classify every variety in the isogeny class of `ctx`.
pub fn classify_isogeny_class(ctx: &WeilContext, index_bound: Option<u64>) -> Result<IsogenyClassReport> {
    check_hypotheses(ctx)?;
    let k = NumberField::from_context(ctx)?;
    let mut oracle = EquivalenceOracle::new(&k);
    let o = k.frobenius_order()?;
    let icm = enumerate_icm_with(&mut oracle, &o, index_bound)?;

    let mut reports = Vec::with_capacity(icm.len());
    for class in &icm.classes {
        let mc = ideal_to_matrix(&k, &class.ideal)?;
        reports.push(report_for(&k, mc, class.multiplicator_ring.clone(), ctx)?);
    }

    let f1 = ctx.point_count();
    let mut sigma_checks = Vec::new();
    for ell in prime_divisors(&f1) {
        if !is_prime(ell) {
            continue;
        }
        let kept = refine_by_sigma(&k, &icm, ell)?;
        let stable: Vec<usize> =
            icm.classes.iter().enumerate().filter(|(_, c)| kept.contains(&c.ideal)).map(|(i, _)| i).collect();
        let ellb = BigInt::from(ell);
        let divisible: Vec<usize> = reports
            .iter()
            .enumerate()
            .filter(|(_, r)| (&r.tau_one_minus_m % &ellb).is_zero())
            .map(|(i, _)| i)
            .collect();
        let agrees = stable == divisible;
        sigma_checks.push(SigmaCheck { ell, stable, divisible, agrees });
    }

    let cyclic = reports.iter().filter(|r| r.verdict == Verdict::Cyclic).count();
    let summary = ClassificationSummary {
        total: reports.len(),
        cyclic,
        not_cyclic: reports.len() - cyclic,
        completeness: icm.completeness,
        index_bound: icm.index_bound,
        certified_bound: icm.certified_bound,
        indeterminate_pairs: icm.indeterminate_pairs.len(),
        oracle_agreement: reports.iter().all(|r| r.oracle_agrees),
        sigma_agreement: sigma_checks.iter().all(|s| s.agrees),
        gcd_zero_events: reports.iter().filter(|r| r.gcd_zero).count(),
    };
    Ok(IsogenyClassReport {
        q: ctx.q.clone(),
        g: ctx.g,
        coefficients: ctx.f.to_descending(),
        point_count: f1,
        reports,
        sigma_checks,
        summary,
    })
}

/// `σ_ℓ`-stability of the ideal of `M` for a prime `ℓ | f(1)`, computed
/// directly from the matrix: `ℓ | τ(1 - M)`.
pub fn sigma_divides(m: &IntMatrix, ell: u64) -> bool {
    (tau(&m.one_minus()) % BigInt::from(ell)).is_zero()
}

/// Rational `q·M⁻¹`, for display.
pub fn q_inverse(m: &IntMatrix, q: &BigInt) -> Vec<Vec<BigRational>> {
    let det = determinant(m);
    let cof = cofactor_matrix(m).transpose();
    cof.rows()
        .into_iter()
        .map(|r| r.into_iter().map(|x| BigRational::new(q * x, det.clone())).collect())
        .collect()
}
