//! Enclosures of `||f||_p = (sum_k alpha_k |f(k)|^p)^{1/p}` and of `||A^n f||_p`.

use rayon::prelude::*;

use super::operator::{apply_a_pow, weighted_power_tail};
use super::{Enclosure, Exponent, SeqFunction, SeqKind};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::weights::{tail_exact, tail_f64, AlphaPowStream, Limits};

/// Geometric spacing of the k-grid used for nondecreasing unbounded `A^n f`.
const GRID_RATIO: f64 = 1.02;
/// Indices below this are evaluated one by one.
const GRID_DENSE: u64 = 64;

fn check_in_lp(f: &SeqFunction, p: Exponent) -> Result<()> {
    match f.beta() {
        Some(beta) if beta * p.value() >= 0.5 => Err(Error::NotInLp {
            beta_p: beta * p.value(),
        }),
        _ => Ok(()),
    }
}

/// `T(a) - T(b)` as a float, exactly rounded when small enough.
fn window_mass(start: u64, end: u64) -> f64 {
    if end <= Limits::default().exact_index_limit() {
        tail_exact(start)
            .checked_sub(&tail_exact(end))
            .expect("tails decrease")
            .to_f64()
    } else {
        tail_f64(start) - tail_f64(end)
    }
}

/// Encloses `||f||_p`, truncating the k-sum at `K` where `f` has infinite support.
pub fn p_norm(f: &SeqFunction, p: Exponent, truncation: u64) -> Result<Enclosure> {
    check_in_lp(f, p)?;
    let pv = p.value();
    let pth = match f.kind() {
        SeqKind::IndicatorGe { m } => Enclosure::point(tail_f64(*m)),
        SeqKind::IndicatorWindow { start, end } => Enclosure::point(window_mass(*start, *end)),
        SeqKind::FiniteTable(values) => {
            let sum: CompensatedSum = AlphaPowStream::new(1)
                .zip(values)
                .map(|(w, v)| w * v.abs().powf(pv))
                .collect();
            Enclosure::point(sum.value())
        }
        SeqKind::PowerGrowth { beta } => {
            let s = beta * pv;
            let cutoff = truncation.max(1);
            let sum: CompensatedSum = AlphaPowStream::new(1)
                .take(cutoff as usize)
                .enumerate()
                .skip(1)
                .map(|(k, w)| w * (k as f64).powf(s))
                .collect();
            Enclosure::from_partial(sum.value(), weighted_power_tail(s, cutoff))
        }
    };
    Ok(pth.root(pv))
}

/// Grid `0, 1, ..., GRID_DENSE, then geometric` up to and including `end`.
fn k_grid(end: u64) -> Vec<u64> {
    let mut grid: Vec<u64> = (0..=GRID_DENSE.min(end)).collect();
    let mut k = GRID_DENSE as f64;
    while let Some(&last) = grid.last() {
        if last >= end {
            break;
        }
        k *= GRID_RATIO;
        let next = (k.ceil() as u64).max(last + 1).min(end);
        grid.push(next);
    }
    grid
}

/// Encloses `||A^n f||_p`.
///
/// Finite-support and bounded functions are summed term by term over
/// `k < K`. For nondecreasing unbounded `f` the map `k ↦ A^n f(k)` is
/// nondecreasing too, so a geometric grid brackets each block
/// `[k_i, k_{i+1})` by its endpoint values.
pub fn pow_norm(
    f: &SeqFunction,
    p: Exponent,
    n: u64,
    k_truncation: u64,
    j_truncation: u64,
) -> Result<Enclosure> {
    if n == 0 {
        return p_norm(f, p, k_truncation);
    }
    check_in_lp(f, p)?;
    let pv = p.value();
    let pth = match f.kind() {
        SeqKind::PowerGrowth { beta } => {
            let cutoff = k_truncation.max(GRID_DENSE + 1);
            let grid = k_grid(cutoff);
            let values = grid
                .par_iter()
                .map(|&k| apply_a_pow(f, n, k, j_truncation))
                .collect::<Result<Vec<_>>>()?;
            let mut lower = CompensatedSum::new();
            let mut upper = CompensatedSum::new();
            let weights: Vec<f64> = AlphaPowStream::new(1).take(GRID_DENSE as usize).collect();
            for (i, pair) in grid.windows(2).enumerate() {
                let (a, b) = (pair[0], pair[1]);
                if b == a + 1 && a < GRID_DENSE {
                    let v = values[i].abs_pow(pv);
                    lower.add(weights[a as usize] * v.lower);
                    upper.add(weights[a as usize] * v.upper);
                } else {
                    let mass = tail_f64(a) - tail_f64(b);
                    lower.add(mass * values[i].abs_pow(pv).lower);
                    upper.add(mass * values[i + 1].abs_pow(pv).upper);
                }
            }
            // k ≥ K: k^beta ≤ A^n f(k) ≤ k^beta + E S_n^beta
            let s = beta * pv;
            let mean = apply_a_pow(f, n, 0, j_truncation)?.upper;
            let spread = (1.0 + mean / (cutoff as f64).powf(*beta)).powf(pv);
            let tail_hi = spread * weighted_power_tail(s, cutoff);
            let tail_lo = (cutoff as f64).powf(s) * tail_f64(cutoff);
            Enclosure::new(lower.value() + tail_lo, upper.value() + tail_hi)
        }
        _ => {
            // A^n f vanishes past the support; for IndicatorGe(m) it equals 1 from m on
            let (end, tail) = match f.kind() {
                SeqKind::IndicatorGe { m } => {
                    if k_truncation >= *m {
                        (*m, Enclosure::point(tail_f64(*m)))
                    } else {
                        (k_truncation, Enclosure::new(0.0, tail_f64(k_truncation)))
                    }
                }
                _ => {
                    let support = f.support_end().expect("bounded kinds here have finite support");
                    if k_truncation >= support {
                        (support, Enclosure::point(0.0))
                    } else {
                        let sup = f.sup_abs().unwrap_or(0.0).powf(pv);
                        (k_truncation, Enclosure::new(0.0, sup * tail_f64(k_truncation)))
                    }
                }
            };
            let values = (0..end)
                .into_par_iter()
                .map(|k| apply_a_pow(f, n, k, j_truncation))
                .collect::<Result<Vec<_>>>()?;
            let mut lower = CompensatedSum::new();
            let mut upper = CompensatedSum::new();
            for (w, v) in AlphaPowStream::new(1).zip(&values) {
                let v = v.abs_pow(pv);
                lower.add(w * v.lower);
                upper.add(w * v.upper);
            }
            Enclosure::new(lower.value(), upper.value()) + tail
        }
    };
    Ok(pth.root(pv))
}

/// Outcome of checking `||A f||_p ≤ 2^{1/p} ||f||_p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionCheck {
    /// Upper end of `||A f||_p`.
    pub lhs: f64,
    /// `2^{1/p}` times the lower end of `||f||_p`.
    pub rhs: f64,
    pub ok: bool,
}

/// Relative tolerance for the contraction comparison.
pub const CONTRACTION_TOLERANCE: f64 = 1e-9;

pub fn contraction_bound_check(
    f: &SeqFunction,
    p: Exponent,
    k_truncation: u64,
    j_truncation: u64,
) -> Result<ContractionCheck> {
    let lhs = pow_norm(f, p, 1, k_truncation, j_truncation)?.upper;
    let rhs = 2f64.powf(p.recip()) * p_norm(f, p, k_truncation)?.lower;
    Ok(ContractionCheck {
        lhs,
        rhs,
        ok: lhs <= rhs * (1.0 + CONTRACTION_TOLERANCE),
    })
}
