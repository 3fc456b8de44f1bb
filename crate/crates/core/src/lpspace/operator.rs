//! `A^n f(k) = sum_j alpha^n_j f(j + k) = E f(S_n + k)`, the translation `T`
//! and Cesàro means of both.

use super::{Enclosure, SeqFunction, SeqKind};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::weights::{
    alpha_exact, alpha_pow_exact_table, tail_pow_bound, tail_pow_bound_f64, AlphaPowStream,
    Backend, ExactRational, Limits, ASYMPTOTIC_CONSTANT,
};

/// Truncation used when a caller has no opinion.
pub const DEFAULT_TRUNCATION: u64 = 1 << 20;

/// Upper bound on `sum_{j ≥ J} alpha^n_j (j + k)^beta` for `J ≥ 1`, `beta < 1/2`,
/// from `alpha^n_j ≤ n alpha_j ≤ n c j^{-3/2}` and `(j + k)^beta ≤ j^beta (1 + k/J)^beta`.
pub fn power_tail_bound(n: u64, beta: f64, k: u64, truncation: u64) -> f64 {
    debug_assert!(truncation >= 1 && beta < 0.5);
    let j = truncation as f64;
    let shift = (1.0 + k as f64 / j).powf(beta);
    shift * n as f64 * ASYMPTOTIC_CONSTANT * (j - 0.5).powf(beta - 0.5) / (0.5 - beta)
}

/// `sum_{j ≥ J} c j^{s - 3/2} ≤ c (J - 1/2)^{s - 1/2} / (1/2 - s)` for `s < 1/2`, `J ≥ 1`.
pub fn weighted_power_tail(s: f64, truncation: u64) -> f64 {
    debug_assert!(truncation >= 1 && s < 0.5);
    ASYMPTOTIC_CONSTANT * (truncation as f64 - 0.5).powf(s - 0.5) / (0.5 - s)
}

fn check_summable(f: &SeqFunction) -> Result<()> {
    match f.beta() {
        Some(beta) if beta >= 0.5 => Err(Error::NotSummable { beta }),
        _ => Ok(()),
    }
}

/// Encloses `A^n f(k)` with the log backend, truncated at `J`.
pub fn apply_a_pow(f: &SeqFunction, n: u64, k: u64, truncation: u64) -> Result<Enclosure> {
    apply_a_pow_with(f, n, k, truncation, Backend::Log, &Limits::default())
}

/// Encloses `A^n f(k)` by the partial sum over `j < J` plus a tail bound.
///
/// For bounded `f` the lower end is the partial sum itself (shifted down by
/// the negative part of `f` when `f` changes sign). For
/// [`SeqKind::PowerGrowth`] the lower end also credits the omitted mass at
/// `f(J + k)`, which is valid because `f` is nondecreasing.
pub fn apply_a_pow_with(
    f: &SeqFunction,
    n: u64,
    k: u64,
    truncation: u64,
    backend: Backend,
    limits: &Limits,
) -> Result<Enclosure> {
    if n == 0 {
        return Ok(Enclosure::point(f.eval(k)));
    }
    check_summable(f)?;
    limits.check_truncation(truncation)?;
    if f.beta().is_some() && truncation == 0 {
        return Err(Error::InvalidParameter(
            "power-growth sums need a truncation J >= 1".into(),
        ));
    }
    // terms with j + k past the support vanish
    let terms = match f.support_end() {
        Some(end) => truncation.min(end.saturating_sub(k)),
        None => truncation,
    };
    let exhausted = terms < truncation;

    let (partial, remaining) = match backend {
        Backend::Log => {
            let mut acc = CompensatedSum::new();
            let mut mass = CompensatedSum::new();
            for (j, w) in AlphaPowStream::new(n).take(terms as usize).enumerate() {
                acc.add(w * f.eval(j as u64 + k));
                mass.add(w);
            }
            let slack = 4.0 * terms as f64 * f64::EPSILON;
            let remaining_upper = tail_pow_bound_f64(n, truncation).min(1.0 - mass.value() + slack);
            let remaining_lower = (1.0 - mass.value() - slack).max(0.0);
            (acc.value(), (remaining_lower, remaining_upper.max(0.0)))
        }
        Backend::Exact => {
            if terms > 0 {
                limits.check_exact(n, terms - 1)?;
            }
            let weights = alpha_pow_exact_table(n, terms as usize);
            let mass: ExactRational = weights.iter().sum();
            let complement = ExactRational::one()
                .checked_sub(&mass)
                .expect("partial mass of a probability exceeds 1");
            let remaining = complement.min(tail_pow_bound(n, truncation)).to_f64();
            let partial = if f.is_exact() {
                weights
                    .iter()
                    .enumerate()
                    .map(|(j, w)| w * &f.eval_exact(j as u64 + k).expect("exact-valued"))
                    .sum::<ExactRational>()
                    .to_f64()
            } else {
                weights
                    .iter()
                    .enumerate()
                    .map(|(j, w)| w.to_f64() * f.eval(j as u64 + k))
                    .collect::<CompensatedSum>()
                    .value()
            };
            (partial, (remaining, remaining))
        }
    };

    if exhausted {
        return Ok(Enclosure::point(partial));
    }
    let (remaining_lower, remaining_upper) = remaining;
    Ok(match f.kind() {
        SeqKind::PowerGrowth { beta } => {
            let upper = partial + power_tail_bound(n, *beta, k, truncation);
            let lower = partial + f.eval(truncation + k) * remaining_lower;
            Enclosure::new(lower, upper.max(lower))
        }
        _ => {
            let (pos, neg) = f
                .signed_sup_from(truncation + k)
                .expect("bounded kinds have finite sups");
            Enclosure::new(partial - neg * remaining_upper, partial + pos * remaining_upper)
        }
    })
}

/// `A^n f(k)` exactly, for nonnegative rational-valued `f`.
pub fn apply_a_pow_exact(
    f: &SeqFunction,
    n: u64,
    k: u64,
    limits: &Limits,
) -> Result<ExactRational> {
    if !f.is_exact() {
        return Err(Error::NotExact("a power-growth or signed function"));
    }
    if n == 0 {
        return Ok(f.eval_exact(k).expect("exact-valued"));
    }
    let weights = |len: u64| -> Result<Vec<ExactRational>> {
        if len > 0 {
            limits.check_exact(n, len - 1)?;
        }
        Ok(alpha_pow_exact_table(n, len as usize))
    };
    Ok(match f.kind() {
        SeqKind::IndicatorGe { m } => {
            if k >= *m {
                ExactRational::one()
            } else {
                // P(S_n ≥ m - k) = 1 - P(S_n < m - k)
                let below: ExactRational = weights(m - k)?.iter().sum();
                ExactRational::one()
                    .checked_sub(&below)
                    .expect("partial mass of a probability exceeds 1")
            }
        }
        SeqKind::IndicatorWindow { start, end } => {
            if *end <= k {
                ExactRational::zero()
            } else {
                let lo = start.saturating_sub(k) as usize;
                weights(end - k)?[lo..].iter().sum()
            }
        }
        SeqKind::FiniteTable(values) => {
            let len = (values.len() as u64).saturating_sub(k);
            weights(len)?
                .iter()
                .enumerate()
                .map(|(j, w)| w * &f.eval_exact(j as u64 + k).expect("exact-valued"))
                .sum()
        }
        SeqKind::PowerGrowth { .. } => unreachable!("rejected above"),
    })
}

/// The translation `T f(k) = f(k + 1)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Translation;

impl Translation {
    /// `T^s f(k) = f(k + s)`.
    pub fn apply_pow(&self, f: &SeqFunction, s: u64, k: u64) -> f64 {
        f.eval(k + s)
    }

    pub fn apply_pow_exact(&self, f: &SeqFunction, s: u64, k: u64) -> Option<ExactRational> {
        f.eval_exact(k + s)
    }
}

fn check_count(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("Cesàro mean needs n >= 1".into()));
    }
    Ok(())
}

/// `M_n(T) f(k) = (1/n) sum_{j<n} f(j + k)`.
pub fn cesaro_t(f: &SeqFunction, n: u64, k: u64) -> Result<f64> {
    check_count(n)?;
    let sum: CompensatedSum = (0..n).map(|j| Translation.apply_pow(f, j, k)).collect();
    Ok(sum.value() / n as f64)
}

/// Encloses `(1/n) sum_{j<n} A^j f(k)`.
pub fn cesaro_a(f: &SeqFunction, n: u64, k: u64, truncation: u64) -> Result<Enclosure> {
    check_count(n)?;
    let mut total = Enclosure::point(0.0);
    for j in 0..n {
        total = total + apply_a_pow(f, j, k, truncation)?;
    }
    Ok(total.scale(1.0 / n as f64))
}

pub fn cesaro_a_exact(f: &SeqFunction, n: u64, k: u64, limits: &Limits) -> Result<ExactRational> {
    check_count(n)?;
    let mut total = ExactRational::zero();
    for j in 0..n {
        total = total + apply_a_pow_exact(f, j, k, limits)?;
    }
    Ok(total.div_u64(n))
}

/// `|A f(k)|_J - sum_{j<J} alpha_j T^j f(k)|`, the first term from the exact
/// `alpha^1` table and the second from the barycenter of translations.
pub fn barycenter_residual(f: &SeqFunction, k: u64, truncation: u64) -> Result<f64> {
    if !f.is_exact() {
        return Err(Error::NotExact("a power-growth or signed function"));
    }
    let limits = Limits::default();
    let through_a = apply_a_pow_with(f, 1, k, truncation, Backend::Exact, &limits)?.lower;
    let barycenter: ExactRational = (0..truncation)
        .map(|j| {
            &alpha_exact(j)
                * &Translation
                    .apply_pow_exact(f, j, k)
                    .expect("exact-valued")
        })
        .sum();
    Ok((through_a - barycenter.to_f64()).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: u64, d: u64) -> ExactRational {
        ExactRational::from_u64s(n, d)
    }

    fn table(v: &[f64]) -> SeqFunction {
        SeqFunction::finite_table(v.to_vec()).unwrap()
    }

    #[test]
    fn exact_applications() {
        let limits = Limits::default();
        let ge1 = SeqFunction::indicator_ge(1);
        assert_eq!(apply_a_pow_exact(&ge1, 1, 1, &limits).unwrap(), r(1, 1));
        assert_eq!(apply_a_pow_exact(&ge1, 1, 0, &limits).unwrap(), r(1, 2));
        assert_eq!(apply_a_pow_exact(&table(&[1.0]), 2, 0, &limits).unwrap(), r(1, 4));
        assert!(apply_a_pow_exact(&SeqFunction::power_growth(0.2).unwrap(), 1, 0, &limits).is_err());
    }

    #[test]
    fn float_path_brackets_exact_value() {
        let limits = Limits::default();
        for f in [
            SeqFunction::indicator_ge(7),
            SeqFunction::window(2, 9).unwrap(),
            table(&[0.5, 0.0, 2.0, 1.0]),
        ] {
            for n in 0..6 {
                for k in 0..5 {
                    let exact = apply_a_pow_exact(&f, n, k, &limits).unwrap().to_f64();
                    for j in [3, 40] {
                        let e = apply_a_pow(&f, n, k, j).unwrap();
                        assert!(
                            e.lower <= exact * (1.0 + 1e-12) && exact <= e.upper * (1.0 + 1e-12),
                            "{f:?} n={n} k={k} J={j}: {e:?} vs {exact}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn power_growth_enclosure_contains_long_sum() {
        let f = SeqFunction::power_growth(0.2).unwrap();
        let coarse = apply_a_pow(&f, 3, 2, 1 << 10).unwrap();
        let fine = apply_a_pow(&f, 3, 2, 1 << 18).unwrap();
        assert!(coarse.lower <= fine.lower && fine.upper <= coarse.upper);
        assert!(fine.width() < coarse.width());
        assert!(matches!(
            apply_a_pow(&SeqFunction::power_growth(0.5).unwrap(), 1, 0, 10),
            Err(Error::NotSummable { .. })
        ));
    }

    #[test]
    fn signed_table_tail() {
        let f = table(&[1.0, -1.0, 1.0, -1.0, 1.0, -1.0]);
        let e = apply_a_pow(&f, 2, 0, 2).unwrap();
        let exact: f64 = AlphaPowStream::new(2)
            .take(6)
            .enumerate()
            .map(|(j, w)| w * f.eval(j as u64))
            .sum();
        assert!(e.contains(exact), "{e:?} vs {exact}");
    }

    #[test]
    fn cesaro_examples() {
        let f = SeqFunction::window(1, 2).unwrap();
        assert_eq!(cesaro_t(&f, 2, 0).unwrap(), 0.5);
        let f = SeqFunction::window(4, 8).unwrap();
        assert_eq!(cesaro_t(&f, 4, 4).unwrap(), 1.0);
        let g = table(&[3.0, 1.0]);
        assert_eq!(cesaro_t(&g, 1, 1).unwrap(), 1.0);
        assert!(cesaro_t(&g, 0, 1).is_err());

        let limits = Limits::default();
        assert_eq!(cesaro_a_exact(&table(&[1.0]), 2, 0, &limits).unwrap(), r(3, 4));
        assert_eq!(
            cesaro_a_exact(&SeqFunction::indicator_ge(1), 3, 0, &limits).unwrap(),
            r(5, 12)
        );
        let e = cesaro_a(&SeqFunction::indicator_ge(1), 3, 0, 64).unwrap();
        assert!(e.contains(5.0 / 12.0) || (e.lower - 5.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn barycenter_examples() {
        assert_eq!(barycenter_residual(&SeqFunction::indicator_ge(2), 0, 16).unwrap(), 0.0);
        assert_eq!(barycenter_residual(&table(&[0.0, 1.0]), 0, 4).unwrap(), 0.0);
        assert_eq!(
            barycenter_residual(&SeqFunction::window(1, 3).unwrap(), 1, 8).unwrap(),
            0.0
        );
    }
}
