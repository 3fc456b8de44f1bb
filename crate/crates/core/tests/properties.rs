use ergolab::experiments::growth_row;
use ergolab::lpspace::{apply_a_pow, apply_a_pow_exact, p_norm, pow_norm, Exponent, SeqFunction};
use ergolab::mc::{agrees, alpha_index, mc_apply_a, RngSeed};
use ergolab::numeric::fmt_sig17;
use ergolab::weights::{alpha_pow_exact, alpha_pow_log, tail_exact, tail_pow_bound, ExactRational, Limits};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn weight_subadditivity(n in 1u64..40, m in 1u64..40, j in 0u64..600) {
        prop_assert!(alpha_pow_exact(n + m, j) <= &alpha_pow_exact(n, j) + &alpha_pow_exact(m, j));
    }

    #[test]
    fn normalized_monotonicity(n in 1u64..60, j in 0u64..600) {
        prop_assert!(alpha_pow_exact(n + 1, j).div_u64(n + 1) <= alpha_pow_exact(n, j).div_u64(n));
    }

    #[test]
    fn log_backend_agrees(n in 1u64..200, j in 0u64..1800) {
        let exact = alpha_pow_exact(n, j).to_f64();
        let log = alpha_pow_log(n, j).value();
        prop_assert!((log - exact).abs() <= 1e-9 * exact);
    }

    #[test]
    fn pointwise_tail_bound(n in 1u64..30, j in 0u64..300) {
        // alpha^n_j ≤ n alpha_j summed over j ≥ J
        let tail: ExactRational = (j..j + 50).map(|i| alpha_pow_exact(n, i)).sum();
        prop_assert!(tail <= tail_pow_bound(n, j));
        prop_assert!(tail_exact(j + 1) < tail_exact(j));
    }

    #[test]
    fn norm_upper_bound(values in prop::collection::vec(-2.0f64..2.0, 1..40), p in 1.05f64..5.0, n in 0u64..13) {
        let f = SeqFunction::finite_table(values).unwrap();
        let p = Exponent::new(p).unwrap();
        let len = f.support_end().unwrap();
        let lhs = pow_norm(&f, p, n, len, len).unwrap().upper;
        let rhs = ((n + 1) as f64).powf(p.recip()) * p_norm(&f, p, len).unwrap().upper;
        prop_assert!(lhs <= rhs * (1.0 + 1e-9), "{} > {}", lhs, rhs);
    }

    #[test]
    fn float_enclosure_contains_exact(values in prop::collection::vec(0.0f64..1.0, 1..30), n in 0u64..10, k in 0u64..30) {
        let f = SeqFunction::finite_table(values).unwrap();
        let exact = apply_a_pow_exact(&f, n, k, &Limits::default()).unwrap().to_f64();
        let e = apply_a_pow(&f, n, k, 64).unwrap();
        prop_assert!(e.lower - 1e-12 <= exact && exact <= e.upper + 1e-12);
    }

    #[test]
    fn indicator_enclosure_contains_exact(m in 0u64..200, n in 1u64..8, k in 0u64..50) {
        let f = SeqFunction::indicator_ge(m);
        let exact = apply_a_pow_exact(&f, n, k, &Limits::default()).unwrap().to_f64();
        let e = apply_a_pow(&f, n, k, 512).unwrap();
        prop_assert!(e.lower - 1e-12 <= exact && exact <= e.upper + 1e-12);
    }

    #[test]
    fn power_growth_monotone_in_n(beta in 0.01f64..0.45, k in 0u64..50, n in 0u64..24) {
        let f = SeqFunction::power_growth(beta).unwrap();
        let a = apply_a_pow(&f, n, k, 1 << 14).unwrap();
        let b = apply_a_pow(&f, n + 1, k, 1 << 14).unwrap();
        prop_assert!(b.lower >= a.lower - a.width() - b.width());
        prop_assert!(a.lower <= a.upper);
    }

    #[test]
    fn inverse_cdf_is_monotone(u in 0u64..(1 << 53), v in 0u64..(1 << 53)) {
        let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
        prop_assert!(alpha_index(lo) <= alpha_index(hi));
    }

    #[test]
    fn sig17_round_trips(x in prop::num::f64::NORMAL) {
        prop_assert_eq!(fmt_sig17(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn growth_rows_respect_sandwich(n in 1u64..40, p in 1.1f64..4.0) {
        let row = growth_row(Exponent::new(p).unwrap(), n, &Limits::default()).unwrap();
        prop_assert!(row.ratio > 0.0 && row.ratio <= row.upper_bound * (1.0 + 1e-9));
    }
}

#[test]
fn monte_carlo_rerun_rate() {
    let cases = [
        (SeqFunction::indicator_ge(1), 1u64, 1u64 << 10),
        (SeqFunction::finite_table(vec![1.0]).unwrap(), 2, 1 << 10),
        (SeqFunction::power_growth(0.2).unwrap(), 4, 1 << 24),
    ];
    for (f, n, truncation) in &cases {
        let exact = apply_a_pow(f, *n, 0, *truncation).unwrap();
        let passes = (0..100u64)
            .filter(|&s| agrees(&mc_apply_a(f, *n, 0, 100_000, RngSeed::new(1000 + s)).unwrap(), &exact))
            .count();
        assert!(passes >= 99, "{}: {passes}/100", f.label());
    }
}
