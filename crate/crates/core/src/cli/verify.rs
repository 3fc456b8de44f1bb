//! Invariant suites behind `ergolab verify`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::Verdict;
use crate::error::Result;
use crate::experiments::{
    blowup_curve, growth_curve, lower_bound_probe, maximal_growth, normalized_decay_check,
    pointwise_divergence, sato_checks, sato_norm_growth,
};
use crate::lpspace::{
    apply_a_pow, apply_a_pow_exact, barycenter_residual, cesaro_a_exact, cesaro_t, contraction_bound_check,
    p_norm, pow_norm, Exponent, SeqFunction,
};
use crate::mc::{agrees, cross_check, mc_apply_a, RngSeed};
use crate::weights::{
    alpha_exact, alpha_pow_exact, alpha_pow_exact_table, alpha_pow_log, asymptotic_constant,
    convolve, pgf_check, scaled_weight, tail_exact, AlphaPowStream, ExactRational, Limits,
    WeightTable,
};

/// Relative backend-agreement tolerance.
pub const BACKEND_TOLERANCE: f64 = 1e-9;
/// Relative tolerance on the operator-norm bound.
pub const NORM_BOUND_TOLERANCE: f64 = 1e-9;
/// Required share of passing reruns in the Monte Carlo rerun check.
pub const MC_RERUN_RATE: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Core,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Added to every float-path weight in the backend-agreement check.
    pub perturb: f64,
    pub seed: u64,
    pub mc_trials: u64,
    pub mc_reruns: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            perturb: 0.0,
            seed: 42,
            mc_trials: 100_000,
            mc_reruns: 100,
        }
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<Vec<Verdict>> {
    let limits = Limits::from_env()?;
    let mut out = vec![
        exact_table(),
        closed_form_vs_convolution(6, 200),
        weight_subadditivity(24, 400),
        normalized_monotonicity(20, 200),
        tail_identity(300),
        pgf_identity()?,
        backend_agreement(opts.perturb),
        asymptotic(),
        barycenter()?,
        operator_subadditivity(10, 20, &limits)?,
        normalized_decrease(12, 20, &limits)?,
        cesaro_consistency(&limits)?,
        normalized_decay()?,
    ];
    out.extend(sato()?);
    if suite == Suite::All {
        out.push(norm_upper_bound(opts.seed, 100, 12)?);
        out.push(contraction()?);
        for p in [1.25, 2.0, 3.0] {
            out.extend(growth(p, &limits)?);
        }
        out.extend(blowup()?);
        out.extend(divergence()?);
        out.extend(maximal()?);
        out.extend(probe()?);
        out.extend(monte_carlo(opts)?);
    }
    Ok(out)
}

fn fmt_e(x: f64) -> String {
    format!("{x:.3e}")
}

fn r(n: u64, d: u64) -> ExactRational {
    ExactRational::from_u64s(n, d)
}

pub fn exact_table() -> Verdict {
    let cases = [
        (1, 0, r(1, 2)),
        (1, 1, r(1, 8)),
        (1, 2, r(1, 16)),
        (1, 3, r(5, 128)),
        (2, 0, r(1, 4)),
        (2, 1, r(1, 8)),
        (2, 2, r(5, 64)),
        (3, 2, r(9, 128)),
    ];
    let bad: Vec<String> = cases
        .iter()
        .filter(|(n, j, v)| alpha_pow_exact(*n, *j) != *v)
        .map(|(n, j, _)| format!("({n},{j})"))
        .collect();
    Verdict::new("exact_table", bad.is_empty(), bad.join(" "))
}

fn alpha_table(len: usize) -> WeightTable<ExactRational> {
    WeightTable {
        n: 1,
        weights: (0..len as u64).map(alpha_exact).collect(),
        tail_bound: tail_exact(len as u64),
    }
}

pub fn closed_form_vs_convolution(n_max: u64, j_max: u64) -> Verdict {
    let base = alpha_table(j_max as usize + 1);
    let mut power = base.clone();
    let mut mismatches = 0;
    for n in 1..=n_max {
        if n > 1 {
            power = convolve(&power, &base);
        }
        mismatches += (0..=j_max)
            .filter(|&j| power.weights[j as usize] != alpha_pow_exact(n, j))
            .count();
    }
    Verdict::new(
        "closed_form_vs_convolution",
        mismatches == 0,
        format!("n <= {n_max}, j <= {j_max}, {mismatches} mismatches"),
    )
}

pub fn weight_subadditivity(sum_max: u64, j_max: u64) -> Verdict {
    let tables: Vec<Vec<ExactRational>> = (0..=sum_max)
        .map(|n| {
            if n == 0 {
                Vec::new()
            } else {
                alpha_pow_exact_table(n, j_max as usize + 1)
            }
        })
        .collect();
    let mut failures = 0;
    for n in 1..sum_max {
        for m in 1..=sum_max - n {
            for j in 0..=j_max as usize {
                if tables[(n + m) as usize][j] > &tables[n as usize][j] + &tables[m as usize][j] {
                    failures += 1;
                }
            }
        }
    }
    Verdict::new(
        "weight_subadditivity",
        failures == 0,
        format!("n + m <= {sum_max}, j <= {j_max}, {failures} failures"),
    )
}

pub fn normalized_monotonicity(n_max: u64, j_max: u64) -> Verdict {
    let tables: Vec<Vec<ExactRational>> = (1..=n_max + 1)
        .map(|n| alpha_pow_exact_table(n, j_max as usize + 1))
        .collect();
    let mut failures = 0;
    for n in 1..=n_max {
        for j in 0..=j_max as usize {
            let next = tables[n as usize][j].div_u64(n + 1);
            if next > tables[n as usize - 1][j].div_u64(n) {
                failures += 1;
            }
        }
    }
    Verdict::new(
        "normalized_monotonicity",
        failures == 0,
        format!("n <= {n_max}, j <= {j_max}, {failures} failures"),
    )
}

pub fn tail_identity(j_max: u64) -> Verdict {
    let mut partial = ExactRational::zero();
    let mut failures = 0;
    for big_j in 0..=j_max {
        if &partial + &tail_exact(big_j) != ExactRational::one() {
            failures += 1;
        }
        partial = partial + alpha_exact(big_j);
    }
    Verdict::new(
        "tail_identity",
        failures == 0,
        format!("J <= {j_max}, {failures} failures"),
    )
}

pub fn pgf_identity() -> Result<Verdict> {
    let mut ok = true;
    let mut worst = 0.0f64;
    for x in [0.0, 0.25, 0.5, 0.9, 0.99] {
        let c = pgf_check(x, 2000)?;
        ok &= c.gap >= -1e-12 && c.gap <= c.tail_bound + 1e-12;
        worst = worst.max(c.gap.abs());
    }
    Ok(Verdict::new(
        "generating_function",
        ok,
        format!("max gap {}", fmt_e(worst)),
    ))
}

pub fn backend_agreement(perturb: f64) -> Verdict {
    let mut worst = 0.0f64;
    for n in [1u64, 2, 5, 10, 50] {
        let stream: Vec<f64> = AlphaPowStream::new(n).take(2001 - n as usize).collect();
        for j in [0u64, 1, 17, 500, 750, 1000, 1500, 2000 - n] {
            let exact = alpha_pow_exact(n, j).to_f64();
            for float in [alpha_pow_log(n, j).value(), stream[j as usize]] {
                let rel = ((float + perturb) - exact).abs() / exact;
                worst = worst.max(rel);
            }
        }
    }
    Verdict::new(
        "backend_agreement",
        worst <= BACKEND_TOLERANCE,
        format!("max relative difference {}", fmt_e(worst)),
    )
}

pub fn asymptotic() -> Verdict {
    let v = scaled_weight(1_000_000);
    let rel = (v - asymptotic_constant()).abs() / asymptotic_constant();
    Verdict::new(
        "asymptotic_constant",
        rel <= 0.01,
        format!("alpha_k k^1.5 = {v:.9} at k = 1e6, relative gap {}", fmt_e(rel)),
    )
}

fn bounded_functions() -> Vec<SeqFunction> {
    vec![
        SeqFunction::indicator_ge(1),
        SeqFunction::indicator_ge(5),
        SeqFunction::window(0, 1).expect("valid window"),
        SeqFunction::window(3, 9).expect("valid window"),
        SeqFunction::finite_table(vec![1.0, 0.5, 0.25, 0.0, 2.0]).expect("valid table"),
    ]
}

pub fn barycenter() -> Result<Verdict> {
    let mut worst = 0.0f64;
    for f in bounded_functions() {
        for k in [0, 1, 7, 20] {
            worst = worst.max(barycenter_residual(&f, k, 1000)?.abs());
        }
    }
    Ok(Verdict::new(
        "barycenter_residual",
        worst == 0.0,
        format!("max residual {}", fmt_e(worst)),
    ))
}

pub fn operator_subadditivity(sum_max: u64, k_max: u64, limits: &Limits) -> Result<Verdict> {
    let mut failures = 0;
    for f in bounded_functions() {
        for k in 0..=k_max {
            let vals = (0..=sum_max)
                .map(|n| apply_a_pow_exact(&f, n, k, limits))
                .collect::<Result<Vec<_>>>()?;
            for n in 1..sum_max {
                for m in 1..=sum_max - n {
                    if vals[(n + m) as usize] > &vals[n as usize] + &vals[m as usize] {
                        failures += 1;
                    }
                }
            }
        }
    }
    Ok(Verdict::new(
        "operator_subadditivity",
        failures == 0,
        format!("n + m <= {sum_max}, k <= {k_max}, {failures} failures"),
    ))
}

pub fn normalized_decrease(n_max: u64, k_max: u64, limits: &Limits) -> Result<Verdict> {
    let mut failures = 0;
    for f in bounded_functions() {
        for k in 0..=k_max {
            for n in 1..=n_max {
                let a = apply_a_pow_exact(&f, n, k, limits)?.div_u64(n);
                let b = apply_a_pow_exact(&f, n + 1, k, limits)?.div_u64(n + 1);
                if b > a {
                    failures += 1;
                }
            }
        }
    }
    Ok(Verdict::new(
        "normalized_decrease",
        failures == 0,
        format!("n <= {n_max}, k <= {k_max}, {failures} failures"),
    ))
}

pub fn cesaro_consistency(limits: &Limits) -> Result<Verdict> {
    let mut ok = true;
    let mut worst = 0.0f64;
    for f in bounded_functions() {
        for k in 0..10 {
            ok &= Some(cesaro_a_exact(&f, 1, k, limits)?) == f.eval_exact(k);
            for n in 1..12 {
                let lhs = (n + 1) as f64 * cesaro_t(&f, n + 1, k)? - n as f64 * cesaro_t(&f, n, k)?;
                worst = worst.max((lhs - f.eval(k + n)).abs());
            }
        }
    }
    ok &= worst <= 1e-12;
    Ok(Verdict::new(
        "cesaro_consistency",
        ok,
        format!("max telescoping error {}", fmt_e(worst)),
    ))
}

pub fn sato() -> Result<Vec<Verdict>> {
    let c = sato_checks(1.0, 100)?;
    let c_half = sato_checks(0.5, 100)?;
    let g = sato_norm_growth(0.5, Exponent::new(2.0)?, 100)?;
    Ok(vec![
        Verdict::new(
            "sato_closed_form",
            c.closed_form_ok && c_half.closed_form_ok,
            "n <= 100",
        ),
        Verdict::new(
            "sato_subadditivity",
            c.subadditive_ok && c.corner_equality_ok && c_half.subadditive_ok && c_half.corner_equality_ok,
            "entrywise, corner with equality",
        ),
        Verdict::new(
            "sato_norm_growth",
            g.strictly_increasing && g.lower_bound_ok,
            format!("||A^100 e2||_2 = {:.6}", g.rows[100].1),
        ),
    ])
}

pub fn normalized_decay() -> Result<Verdict> {
    let d = normalized_decay_check(Exponent::new(2.0)?, 10_000)?;
    Ok(Verdict::new(
        "normalized_decay",
        d.strictly_decreasing,
        format!("(n+1)^(1/p)/n = {} at n = 1e4", fmt_e(d.rows.last().expect("rows").1)),
    ))
}

/// Uniform in `[-1, 1)` from 53 random bits.
fn signed_unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

pub fn random_table(rng: &mut ChaCha8Rng) -> SeqFunction {
    let len = 1 + (rng.next_u64() % 40) as usize;
    let values = (0..len).map(|_| signed_unit(rng)).collect();
    SeqFunction::finite_table(values).expect("finite values")
}

/// `||A^n f||_p ≤ (n+1)^{1/p} ||f||_p` on seeded random tables.
pub fn norm_upper_bound(seed: u64, tables: usize, n_max: u64) -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..tables {
        let f = random_table(&mut rng);
        let len = f.support_end().expect("finite support");
        for p in [1.1, 1.5, 2.0, 3.0] {
            let p = Exponent::new(p)?;
            let fnorm = p_norm(&f, p, len)?.upper;
            for n in 0..=n_max {
                let lhs = pow_norm(&f, p, n, len, len)?.upper;
                let rhs = ((n + 1) as f64).powf(p.recip()) * fnorm;
                if rhs > 0.0 {
                    worst = worst.max(lhs / rhs - 1.0);
                }
            }
        }
    }
    Ok(Verdict::new(
        "norm_upper_bound",
        worst <= NORM_BOUND_TOLERANCE,
        format!("{tables} tables, n <= {n_max}, max excess {}", fmt_e(worst)),
    ))
}

pub fn contraction() -> Result<Verdict> {
    let c = contraction_bound_check(&SeqFunction::power_growth(0.1)?, Exponent::new(2.0)?, 1 << 14, 1 << 14)?;
    Ok(Verdict::new(
        "contraction_bound",
        c.ok,
        format!("||Af|| <= {:.6}, 2^(1/p)||f|| >= {:.6}", c.lhs, c.rhs),
    ))
}

pub fn growth(p: f64, limits: &Limits) -> Result<Vec<Verdict>> {
    let c = growth_curve(Exponent::new(p)?, 32, limits)?;
    Ok(vec![
        Verdict::new(format!("growth_sandwich_p{p}"), c.sandwich_ok, "R(n) <= (n+1)^(1/p)"),
        Verdict::new(
            format!("growth_slope_p{p}"),
            c.slope_ok,
            format!(
                "slope {:.6} over n in [{}, {}], 1/p = {:.6}",
                c.slope,
                c.fit_range.0,
                c.fit_range.1,
                1.0 / p
            ),
        ),
    ])
}

pub fn blowup() -> Result<Vec<Verdict>> {
    let p = Exponent::new(2.0)?;
    let c = blowup_curve(p, p.witness_beta(), 32, 1 << 20)?;
    let factors: Vec<String> = c
        .growth_factors
        .iter()
        .map(|(n, g)| format!("E({})/E({n}) = {g:.4}", 4 * n))
        .collect();
    Ok(vec![
        Verdict::new("blowup_increasing", c.strictly_increasing, "n <= 32"),
        Verdict::new("blowup_factor", c.growth_ok, factors.join(", ")),
    ])
}

pub fn divergence() -> Result<Vec<Verdict>> {
    let mut monotone = true;
    for k in [0, 5] {
        let d = pointwise_divergence(&SeqFunction::power_growth(0.2)?, k, 32, 1 << 20)?;
        monotone &= d.monotone;
    }
    // the witness exponent at p = 4/3; at beta ≤ 1/4 the factor 16^beta stays below 2
    let d = pointwise_divergence(&SeqFunction::power_growth(0.3)?, 0, 32, 1 << 20)?;
    Ok(vec![
        Verdict::new("divergence_monotone", monotone, "beta = 0.2, k in {0, 5}, n <= 32"),
        Verdict::new(
            "divergence_doubling",
            d.doubles,
            format!("beta = 0.3: A^32 f(0) / A^8 f(0) = {:.4}", d.growth_factor),
        ),
    ])
}

pub fn maximal() -> Result<Vec<Verdict>> {
    let g = maximal_growth(Exponent::new(2.0)?, &[4, 16, 64, 256], 4)?;
    let ratios: Vec<String> = g.rows.iter().map(|r| format!("{:.4}", r.ratio)).collect();
    Ok(vec![
        Verdict::new("maximal_increasing", g.strictly_increasing, ratios.join(" ")),
        Verdict::new(
            "maximal_growth",
            g.growth_ok,
            g.growth_factors
                .iter()
                .map(|(m, f)| format!("m = {m}: {f:.4}"))
                .collect::<Vec<_>>()
                .join(", "),
        ),
    ])
}

pub fn probe() -> Result<Vec<Verdict>> {
    let r = lower_bound_probe(1.0, 12, 2000)?;
    let half = r.min_half_grid.expect("nMax/2 grid is nonempty");
    Ok(vec![
        Verdict::new("probe_positive", r.positive, format!("min {:.6}", r.min_observed)),
        Verdict::new(
            "probe_stable",
            r.stable,
            format!("min at nMax = 12: {:.6}, at nMax = 6: {half:.6}", r.min_observed),
        ),
    ])
}

pub fn monte_carlo(opts: &VerifyOptions) -> Result<Vec<Verdict>> {
    let cases = mc_cases()?;
    let mut out = Vec::new();
    let p0 = cross_check(&cases[1].0, 2, 0, 10_000, RngSeed::new(opts.seed), cases[1].1)?;
    out.push(Verdict::new(
        "mc_p_s2_zero",
        p0.ok,
        format!("{:.5} +- {:.5}", p0.estimate.mean, p0.estimate.half_width),
    ));
    let mut all_ok = true;
    let mut min_rate = 1.0f64;
    for (f, truncation, n) in &cases {
        let exact = apply_a_pow(f, *n, 0, *truncation)?;
        all_ok &= agrees(&mc_apply_a(f, *n, 0, opts.mc_trials, RngSeed::new(opts.seed))?, &exact);
        let mut passes = 0;
        for i in 0..opts.mc_reruns {
            let est = mc_apply_a(f, *n, 0, opts.mc_trials, RngSeed::new(opts.seed + 1 + i))?;
            passes += usize::from(agrees(&est, &exact));
        }
        if opts.mc_reruns > 0 {
            min_rate = min_rate.min(passes as f64 / opts.mc_reruns as f64);
        }
    }
    out.push(Verdict::new("mc_cross_checks", all_ok, "three cases"));
    out.push(Verdict::new(
        "mc_rerun_agreement",
        min_rate >= MC_RERUN_RATE,
        format!("lowest pass rate {min_rate:.2} over {} reruns", opts.mc_reruns),
    ));
    let f = &cases[2].0;
    let a = mc_apply_a(f, 4, 0, 10_000, RngSeed::new(opts.seed))?;
    let b = mc_apply_a(f, 4, 0, 10_000, RngSeed::new(opts.seed))?;
    out.push(Verdict::new(
        "mc_determinism",
        a.mean.to_bits() == b.mean.to_bits() && a.half_width.to_bits() == b.half_width.to_bits(),
        "",
    ));
    Ok(out)
}

/// `(f, truncation, n)` for the three cross-check expectations.
pub fn mc_cases() -> Result<Vec<(SeqFunction, u64, u64)>> {
    Ok(vec![
        (SeqFunction::indicator_ge(1), 1 << 10, 1),
        (SeqFunction::finite_table(vec![1.0])?, 1 << 10, 2),
        (SeqFunction::power_growth(0.2)?, 1 << 24, 4),
    ])
}
