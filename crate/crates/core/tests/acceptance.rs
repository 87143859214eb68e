//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cyclav::cyclicity::membership;
use cyclav::ingest::{cross_validate, load_fixture};
use cyclav::latimer::{ideal_to_matrix, matrices_conjugate, matrix_to_ideal_default};
use cyclav::linalg::{cofactor_matrix, determinant, is_unimodular, smith_normal_form, tau, unimodular_inverse};
use cyclav::weil::{enumerate_weil_contexts, WeilFilter};
use cyclav::{
    classify_isogeny_class, refine_by_sigma, BigInt, Conjugacy, Equivalence, IntMatrix, IsogenyClassReport,
    NumberField, Verdict, WeilContext,
};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/classes.jsonl");

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

struct Classified {
    ctx: WeilContext,
    report: IsogenyClassReport,
}

fn corpus() -> Vec<WeilContext> {
    let mut out = Vec::new();
    for (p, r) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
        out.extend(enumerate_weil_contexts(p, r, 1, WeilFilter::ORDINARY_SIMPLE).expect("g = 1 enumeration"));
    }
    for p in [2, 3] {
        out.extend(enumerate_weil_contexts(p, 1, 2, WeilFilter::ORDINARY_SIMPLE).expect("g = 2 enumeration"));
    }
    out
}

fn classify_corpus() -> (Vec<Classified>, Vec<String>, Duration) {
    let start = Instant::now();
    let results: Vec<_> = corpus()
        .into_par_iter()
        .map(|ctx| {
            let r = classify_isogeny_class(&ctx, None);
            (ctx, r)
        })
        .collect();
    let mut ok = Vec::new();
    let mut errors = Vec::new();
    for (ctx, r) in results {
        match r {
            Ok(report) => ok.push(Classified { ctx, report }),
            Err(e) => errors.push(format!("q={} f={}: {e}", ctx.q, ctx.f)),
        }
    }
    (ok, errors, start.elapsed())
}

fn divides(d: &BigInt, n: &BigInt) -> bool {
    if d.is_zero() {
        n.is_zero()
    } else {
        (n % d).is_zero()
    }
}

fn criterion_1(corpus: &[Classified], errors: &[String], elapsed: Duration) -> Outcome {
    let g1 = corpus.iter().filter(|c| c.ctx.g == 1).count();
    let g2 = corpus.iter().filter(|c| c.ctx.g == 2).count();
    let mut classes = 0;
    let mut disagreements = 0;
    for c in corpus {
        let f1 = c.ctx.point_count();
        for r in &c.report.reports {
            classes += 1;
            let m = &r.class_ref.rep;
            let gcd = tau(&m.one_minus()).gcd(&f1);
            let snf = smith_normal_form(&m.one_minus());
            let n = snf.invariant_factors.len();
            let second = &snf.invariant_factors[n - 2];
            if (gcd >= BigInt::from(2)) != (second > &BigInt::one()) {
                disagreements += 1;
            }
        }
    }
    let pass = errors.is_empty() && disagreements == 0 && g2 >= 10 && elapsed < Duration::from_secs(600);
    let mut detail = format!(
        "{g1} quadratic + {g2} quartic contexts, {classes} classes, {disagreements} disagreements, {:.1}s",
        elapsed.as_secs_f64()
    );
    if !errors.is_empty() {
        detail.push_str(&format!(", {} failed contexts: {}", errors.len(), errors.join("; ")));
    }
    Outcome::new(pass, detail)
}

fn criterion_2(corpus: &[Classified]) -> Outcome {
    let find = |desc: &[i64]| {
        corpus.iter().find(|c| c.ctx.f.to_descending() == desc.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())
    };
    let mut problems = Vec::new();
    match find(&[1, -2, 5]) {
        Some(c) => {
            let mut seen: Vec<(Verdict, Vec<BigInt>, BigInt)> = c
                .report
                .reports
                .iter()
                .map(|r| (r.verdict, r.group.clone(), r.tau_one_minus_m.clone()))
                .collect();
            seen.sort_by(|a, b| a.2.cmp(&b.2));
            let b = |x: i64| BigInt::from(x);
            let want = vec![
                (Verdict::Cyclic, vec![b(4)], b(1)),
                (Verdict::NotCyclic, vec![b(2), b(2)], b(2)),
            ];
            if seen != want {
                problems.push(format!("t^2-2t+5 gave {seen:?}"));
            }
        }
        None => problems.push("t^2-2t+5 missing from corpus".into()),
    }
    match find(&[1, 1, 2]) {
        Some(c) => {
            let r = &c.report.reports;
            if r.len() != 1 || r[0].verdict != Verdict::Cyclic || r[0].group != vec![BigInt::from(4)] {
                problems.push(format!("t^2+t+2 gave {} classes", r.len()));
            }
        }
        None => problems.push("t^2+t+2 missing from corpus".into()),
    }
    if problems.is_empty() {
        Outcome::new(true, "q=5: {Z/4, (Z/2)^2} with tau(1-M) {1, 2}; q=2: one class, Z/4")
    } else {
        Outcome::new(false, problems.join("; "))
    }
}

fn criterion_3(corpus: &[Classified]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut checked, mut failures) = ([0usize; 2], Vec::new());
    let mut indeterminate = [0usize; 2];
    let mut pairs = [0usize; 2];
    for c in corpus {
        let k = NumberField::from_context(&c.ctx).expect("field");
        let gi = c.ctx.g - 1;
        // dedupe comparisons made while building the class list
        indeterminate[gi] += c.report.summary.indeterminate_pairs;
        let total = c.report.reports.len();
        pairs[gi] += total * total.saturating_sub(1) / 2;
        for r in &c.report.reports {
            checked[gi] += 1;
            let a = r.class_ref.ideal.as_ref().expect("classes carry their ideal");
            // ideal -> matrix -> ideal
            let m = ideal_to_matrix(&k, a).expect("ideal_to_matrix").rep;
            let back = matrix_to_ideal_default(&k, &m).expect("matrix_to_ideal");
            pairs[gi] += 1;
            match k.ideal_equivalent(a, &back) {
                Ok(Equivalence::Equivalent(_)) => {}
                Ok(Equivalence::Indeterminate(_)) => indeterminate[gi] += 1,
                other => failures.push(format!("q={} f={}: ideal round trip gave {other:?}", c.ctx.q, c.ctx.f)),
            }
            // matrix -> ideal -> matrix, starting from a scrambled representative
            let u = random_unimodular(&mut rng, m.dim(), 5);
            let ui = unimodular_inverse(&u).expect("unimodular");
            let scrambled = &(&u * &m) * &ui;
            let ideal = matrix_to_ideal_default(&k, &scrambled).expect("matrix_to_ideal");
            let m2 = ideal_to_matrix(&k, &ideal).expect("ideal_to_matrix").rep;
            pairs[gi] += 1;
            match matrices_conjugate(&k, &scrambled, &m2) {
                Ok(Conjugacy::Conjugate(w)) => {
                    if !(is_unimodular(&w) && &m2 * &w == &w * &scrambled) {
                        failures.push(format!("q={} f={}: certificate fails", c.ctx.q, c.ctx.f));
                    }
                }
                Ok(Conjugacy::Indeterminate) => indeterminate[gi] += 1,
                other => failures.push(format!("q={} f={}: matrix round trip gave {other:?}", c.ctx.q, c.ctx.f)),
            }
        }
    }
    let ratio = indeterminate[1] as f64 / pairs[1].max(1) as f64;
    let pass = failures.is_empty() && indeterminate[0] == 0 && ratio < 0.10;
    let mut detail = format!(
        "g=1: {} classes, {} indeterminate; g=2: {} classes, {}/{} indeterminate pairs ({:.1}%)",
        checked[0],
        indeterminate[0],
        checked[1],
        indeterminate[1],
        pairs[1],
        100.0 * ratio
    );
    if !failures.is_empty() {
        detail.push_str(&format!("; failures: {}", failures.join("; ")));
    }
    Outcome::new(pass, detail)
}

fn criterion_4(corpus: &[Classified]) -> Outcome {
    let mut failures = Vec::new();
    let (mut classes, mut sigma_sets) = (0, 0);
    for c in corpus {
        let k = NumberField::from_context(&c.ctx).expect("field");
        let q = &c.ctx.q;
        let qg1 = num_traits::pow(q.clone(), c.ctx.g - 1);
        let q_over_alpha = k.q_over_alpha().expect("q/alpha");
        for r in &c.report.reports {
            classes += 1;
            let m = &r.class_ref.rep;
            let det = determinant(m);
            let by_inverse = cofactor_matrix(m).entries().iter().all(|x| divides(&det, &(q * x)));
            let by_tau = divides(&qg1, &tau(m));
            let ideal = matrix_to_ideal_default(&k, m).expect("matrix_to_ideal");
            let by_ideal = k.is_stable(&ideal, &q_over_alpha);
            if !(by_inverse == by_tau && by_tau == by_ideal) {
                failures.push(format!("q={} f={}: {by_inverse}/{by_tau}/{by_ideal}", c.ctx.q, c.ctx.f));
            }
        }
        // rebuild the class list and check each prime of f(1) directly
        let o = k.frobenius_order().expect("order");
        let icm = cyclav::enumerate_icm(&k, &o, None).expect("icm");
        let f1 = c.ctx.point_count().abs();
        for ell in (2..=f1.to_string().parse::<u64>().unwrap_or(0)).filter(|l| is_prime(*l)) {
            if !(&f1 % BigInt::from(ell)).is_zero() {
                continue;
            }
            sigma_sets += 1;
            let kept: BTreeSet<_> = refine_by_sigma(&k, &icm, ell).expect("refine").into_iter().collect();
            let divisible: BTreeSet<_> = icm
                .classes
                .iter()
                .filter(|cl| {
                    let m = ideal_to_matrix(&k, &cl.ideal).expect("matrix").rep;
                    (tau(&m.one_minus()) % BigInt::from(ell)).is_zero()
                })
                .map(|cl| cl.ideal.clone())
                .collect();
            if kept != divisible {
                failures.push(format!("q={} f={} ell={ell}: sigma sets differ", c.ctx.q, c.ctx.f));
            }
        }
    }
    let detail = format!("{classes} classes agree on all three routes, {sigma_sets} (context, ell) set equalities");
    if failures.is_empty() {
        Outcome::new(true, detail)
    } else {
        Outcome::new(false, format!("{detail}; failures: {}", failures.join("; ")))
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn criterion_5(corpus: &[Classified]) -> Outcome {
    let mut failures = Vec::new();
    let mut classes = 0;
    for c in corpus {
        let f1 = c.ctx.point_count();
        let qg = num_traits::pow(c.ctx.q.clone(), c.ctx.g);
        for r in &c.report.reports {
            classes += 1;
            let m = &r.class_ref.rep;
            let one_minus = m.one_minus();
            let factors = smith_normal_form(&one_minus).invariant_factors;
            let product = factors.iter().fold(BigInt::one(), |acc, x| acc * x);
            let checks = [
                ("det(M) = q^g", determinant(m) == qg),
                ("det(I-M) = f(1)", determinant(&one_minus) == f1),
                ("tau(I-M) | f(1)", divides(&tau(&one_minus), &f1)),
                ("prod invariant factors = f(1)", product == f1.abs()),
                ("f(M) = 0", m.eval_poly(&c.ctx.f).is_zero()),
            ];
            for (name, ok) in checks {
                if !ok {
                    failures.push(format!("q={} f={}: {name}", c.ctx.q, c.ctx.f));
                }
            }
        }
    }
    if failures.is_empty() {
        Outcome::new(true, format!("{classes} classes, 5 identities each"))
    } else {
        Outcome::new(false, failures.join("; "))
    }
}

/// Product of random elementary operations, rejecting any step that would
/// push an entry above `bound` in absolute value.
fn random_unimodular(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> IntMatrix {
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    let steps = rng.gen_range(1..=3 * n);
    let mut done = 0;
    let mut attempts = 0;
    while done < steps && attempts < 200 {
        attempts += 1;
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        let mut next = u.clone();
        match rng.gen_range(0..3) {
            0 if i != j => {
                let c = rng.gen_range(-2i64..=2);
                for col in 0..n {
                    next[i][col] += c * u[j][col];
                }
            }
            1 if i != j => next.swap(i, j),
            2 => next[i].iter_mut().for_each(|x| *x = -*x),
            _ => continue,
        }
        if next.iter().flatten().all(|x| x.abs() <= bound) {
            u = next;
            done += 1;
        }
    }
    IntMatrix::from_rows(&u).expect("square")
}

fn criterion_6(corpus: &[Classified]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let reps: Vec<(&WeilContext, &IntMatrix)> =
        corpus.iter().flat_map(|c| c.report.reports.iter().map(move |r| (&c.ctx, &r.class_ref.rep))).collect();
    let mut failures = 0;
    let pairs = 1200;
    for t in 0..pairs {
        let (ctx, m) = reps[t % reps.len()];
        let u = random_unimodular(&mut rng, m.dim(), 5);
        if !is_unimodular(&u) || u.entries().iter().any(|x| x.abs() > BigInt::from(5)) {
            failures += 1;
            continue;
        }
        let ui = unimodular_inverse(&u).expect("unimodular");
        let m2 = &(&u * m) * &ui;
        let invariants = |m: &IntMatrix| {
            (
                tau(m),
                tau(&m.one_minus()),
                membership(m, ctx, 1).expect("membership"),
                membership(m, ctx, 2).expect("membership"),
                smith_normal_form(&m.one_minus()).invariant_factors,
            )
        };
        if invariants(m) != invariants(&m2) {
            failures += 1;
        }
    }
    Outcome::new(failures == 0, format!("{pairs} (M, U) pairs, {failures} mismatches"))
}

fn criterion_7() -> Outcome {
    let mut failures = Vec::new();
    for (p, r) in [(2u64, 1u32), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
        let q = p.pow(r) as i64;
        for (filter, ordinary, simple) in [
            (WeilFilter::ALL, false, false),
            (WeilFilter::ORDINARY, true, false),
            (WeilFilter::ORDINARY_SIMPLE, true, true),
        ] {
            let got: BTreeSet<i64> = enumerate_weil_contexts(p, r, 1, filter)
                .expect("enumeration")
                .iter()
                .map(|c| {
                    let d = c.f.to_descending();
                    assert_eq!(d[2], BigInt::from(q));
                    d[1].to_string().parse().unwrap()
                })
                .collect();
            // brute force over every integer a with a^2 <= 4q
            let want: BTreeSet<i64> = (-2 * q..=2 * q)
                .filter(|a| a * a <= 4 * q)
                .filter(|a| !ordinary || a % p as i64 != 0)
                .filter(|a| !simple || a * a != 4 * q)
                .collect();
            if got != want {
                failures.push(format!("q={q} {filter:?}: got {got:?}, want {want:?}"));
            }
        }
    }
    if failures.is_empty() {
        Outcome::new(true, "q in {2,3,4,5,7,8,9}, three filters each")
    } else {
        Outcome::new(false, failures.join("; "))
    }
}

fn criterion_8() -> Outcome {
    let run = || -> Result<(usize, usize, String), String> {
        let fx = load_fixture(std::path::Path::new(FIXTURE)).map_err(|e| e.to_string())?;
        let report = cross_validate(&fx.records);
        Ok((fx.records.len(), report.mismatches.len() + fx.rejected.len(), report.to_text()))
    };
    match (run(), run()) {
        (Ok((n, bad, a)), Ok((_, _, b))) => {
            let pass = n == 20 && bad == 0 && a == b;
            Outcome::new(pass, format!("{n} records, {bad} mismatches or rejections, identical reports: {}", a == b))
        }
        (Err(e), _) | (_, Err(e)) => Outcome::new(false, e),
    }
}

fn main() -> ExitCode {
    let (corpus, errors, elapsed) = classify_corpus();
    let outcomes = [
        ("oracle equivalence", criterion_1(&corpus, &errors, elapsed)),
        ("worked examples", criterion_2(&corpus)),
        ("matrix/ideal round trips", criterion_3(&corpus)),
        ("q-stability and sigma routes", criterion_4(&corpus)),
        ("structural identities", criterion_5(&corpus)),
        ("conjugacy invariance", criterion_6(&corpus)),
        ("Hasse completeness", criterion_7()),
        ("fixture cross-validation", criterion_8()),
    ];
    let mut all = true;
    for (i, (name, o)) in outcomes.iter().enumerate() {
        all &= o.pass;
        println!("criterion {} {name}: {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
