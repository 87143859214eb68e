use cyclav::ingest::{parse_fixture, render_fixture, ExternalClassRecord};
use cyclav::latimer::{companion, matrix_to_ideal_default};
use cyclav::linalg::{is_unimodular, unimodular_inverse};
use cyclav::weil::{enumerate_weil_contexts, validate_weil, WeilFilter};
use cyclav::{classify_isogeny_class, BigInt, IdealLattice, IntMatrix, NumberField, Verdict, WeilContext};
use num_integer::Integer;
use num_traits::One;
use proptest::prelude::*;

fn quadratic_contexts() -> Vec<WeilContext> {
    [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1)]
        .iter()
        .flat_map(|&(p, r)| enumerate_weil_contexts(p, r, 1, WeilFilter::ORDINARY_SIMPLE).unwrap())
        .collect()
}

fn unimodular(ops: &[(usize, usize, i64)], n: usize) -> IntMatrix {
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    for &(i, j, c) in ops {
        let (i, j) = (i % n, j % n);
        if i != j {
            for col in 0..n {
                u[i][col] += c * u[j][col];
            }
        }
    }
    IntMatrix::from_rows(&u).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn report_invariants(idx in 0usize..64) {
        let ctxs = quadratic_contexts();
        let ctx = &ctxs[idx % ctxs.len()];
        let rep = classify_isogeny_class(ctx, None).unwrap();
        prop_assert_eq!(rep.summary.total, rep.reports.len());
        prop_assert_eq!(rep.summary.cyclic + rep.summary.not_cyclic, rep.summary.total);
        for r in &rep.reports {
            prop_assert!(!r.in_m_f_2 || r.in_m_f_1);
            prop_assert_eq!(r.verdict == Verdict::NotCyclic, r.in_m_f_2);
            prop_assert!(r.oracle_agrees);
            prop_assert_eq!(&r.class_ref.charpoly, &ctx.f);
        }
    }

    #[test]
    fn conjugate_matrices_give_equivalent_ideals(
        idx in 0usize..64,
        ops in proptest::collection::vec((0usize..2, 0usize..2, -3i64..=3), 0..6),
    ) {
        let ctxs = quadratic_contexts();
        let ctx = &ctxs[idx % ctxs.len()];
        let k = NumberField::from_context(ctx).unwrap();
        let m = companion(&ctx.f);
        let u = unimodular(&ops, 2);
        prop_assert!(is_unimodular(&u));
        let m2 = &(&u * &m) * &unimodular_inverse(&u).unwrap();
        let a = matrix_to_ideal_default(&k, &m).unwrap();
        let b = matrix_to_ideal_default(&k, &m2).unwrap();
        prop_assert!(k.ideal_equivalent(&a, &b).unwrap().is_equivalent());
    }

    #[test]
    fn ideal_lattice_is_canonical(
        entries in proptest::collection::vec(-9i64..=9, 4),
        d in 1i64..=12,
        ops in proptest::collection::vec((0usize..2, 0usize..2, -4i64..=4), 0..6),
    ) {
        let rows: Vec<Vec<BigInt>> = entries.chunks(2).map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let Ok(a) = IdealLattice::from_int_rows(rows.clone(), BigInt::from(d), 2) else { return Ok(()) };
        let u = unimodular(&ops, 2);
        let moved: Vec<Vec<BigInt>> = (0..2)
            .map(|i| (0..2).map(|j| (0..2).map(|k| u.get(i, k) * &rows[k][j]).sum()).collect())
            .collect();
        let b = IdealLattice::from_int_rows(moved, BigInt::from(-d), 2).unwrap();
        prop_assert_eq!(&a, &b);
        let content = a.hnf().iter().flatten().fold(BigInt::from(0), |g, x| g.gcd(x));
        prop_assert!(content.gcd(a.denominator()).is_one());
    }

    #[test]
    fn fixture_text_round_trips(
        a in -4i64..=4,
        ordinary in proptest::option::of(any::<bool>()),
        count in proptest::option::of(0i64..30),
    ) {
        let rec = ExternalClassRecord {
            label: format!("1.5.{a}"),
            q: 5,
            g: 1,
            poly: vec![BigInt::from(5), BigInt::from(a), BigInt::one()],
            is_ordinary_claimed: ordinary,
            point_count_claimed: count.map(BigInt::from),
        };
        let text = render_fixture(std::slice::from_ref(&rec));
        let parsed = parse_fixture(&text).unwrap();
        prop_assert!(parsed.rejected.is_empty());
        prop_assert_eq!(&parsed.records[0], &rec);
        prop_assert_eq!(render_fixture(&parsed.records), text);
    }
}

#[test]
fn enumerated_polynomials_satisfy_the_functional_equation() {
    for (p, g) in [(2u64, 1usize), (3, 1), (2, 2), (3, 2)] {
        for ctx in enumerate_weil_contexts(p, 1, g, WeilFilter::ALL).unwrap() {
            assert!(validate_weil(&ctx.f, &ctx.q));
            let n = 2 * g;
            for k in 0..g {
                let qk = num_traits::pow(ctx.q.clone(), g - k);
                assert_eq!(ctx.f.coeff(k), qk * ctx.f.coeff(n - k), "{}", ctx.f);
            }
        }
    }
}
