//! The maximal function of translation Cesàro means on the window
//! `g_m = 1[m ≤ k < 2m]`.
//!
//! For `k < m` the average `M_n(T) g_m(k)` peaks at `n = 2m - k` with value
//! `m / (2m - k)`, while `||g_m||_p^p = T(m) - T(2m) ~ m^{-1/2}`. The ratio of
//! the maximal function's norm to `||g_m||_p` therefore grows like `m^{1/(2p)}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lpspace::{Exponent, SeqFunction};
use crate::numeric::CompensatedSum;
use crate::weights::{tail_exact, tail_f64, AlphaPowStream, Limits};

/// Required factor in `ratio(4m) ≥ MAXIMAL_GROWTH · ratio(m)`.
pub const MAXIMAL_GROWTH: f64 = 1.15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaximalRatio {
    pub m: u64,
    pub horizon: u64,
    /// `||sup_{n ≤ N} M_n(T) g_m||_p`.
    pub norm_maximal: f64,
    pub norm_g: f64,
    pub ratio: f64,
    /// Largest averaging length at which some supremum was attained.
    pub argmax_n: u64,
}

/// `sup_{1 ≤ n ≤ N} M_n(T) g(k)` as a reduced pair `(hits, n)`, found by
/// scanning every `n` with a running hit count.
pub fn maximal_average(g: &SeqFunction, k: u64, horizon: u64) -> (u64, u64) {
    let mut best = (0u64, 1u64);
    let mut hits = 0u64;
    for n in 1..=horizon {
        if g.eval(k + n - 1) != 0.0 {
            hits += 1;
        }
        // hits/n > best.0/best.1
        if hits * best.1 > best.0 * n {
            best = (hits, n);
        }
    }
    best
}

pub fn maximal_ratio_t(m: u64, p: Exponent, horizon: u64) -> Result<MaximalRatio> {
    if m == 0 {
        return Err(Error::InvalidParameter("window scale m must be >= 1".into()));
    }
    if horizon < 2 * m {
        return Err(Error::InvalidParameter(format!(
            "horizon N = {horizon} must be >= 2m = {}",
            2 * m
        )));
    }
    let pv = p.value();
    let g = SeqFunction::window(m, 2 * m)?;
    // the maximal function vanishes for k ≥ 2m
    let mut sum = CompensatedSum::new();
    let mut argmax_n = 0;
    for (k, w) in AlphaPowStream::new(1).take(2 * m as usize).enumerate() {
        let (hits, n) = maximal_average(&g, k as u64, horizon);
        if hits > 0 {
            argmax_n = argmax_n.max(n);
            sum.add(w * (hits as f64 / n as f64).powf(pv));
        }
    }
    let g_pth = if 2 * m <= Limits::default().exact_index_limit() {
        tail_exact(m)
            .checked_sub(&tail_exact(2 * m))
            .expect("tails decrease")
            .to_f64()
    } else {
        tail_f64(m) - tail_f64(2 * m)
    };
    let norm_maximal = sum.value().powf(p.recip());
    let norm_g = g_pth.powf(p.recip());
    Ok(MaximalRatio {
        m,
        horizon,
        norm_maximal,
        norm_g,
        ratio: norm_maximal / norm_g,
        argmax_n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximalGrowth {
    pub p: f64,
    pub rows: Vec<MaximalRatio>,
    pub strictly_increasing: bool,
    /// `(m, ratio(4m) / ratio(m))` for grid pairs with `m ≥ 16`.
    pub growth_factors: Vec<(u64, f64)>,
    pub growth_ok: bool,
}

/// Ratios over a grid of scales with horizon `N = horizon_factor · m`.
pub fn maximal_growth(p: Exponent, m_grid: &[u64], horizon_factor: u64) -> Result<MaximalGrowth> {
    if m_grid.is_empty() {
        return Err(Error::InvalidParameter("empty m grid".into()));
    }
    let rows = m_grid
        .iter()
        .map(|&m| maximal_ratio_t(m, p, horizon_factor * m))
        .collect::<Result<Vec<_>>>()?;
    let strictly_increasing = rows.windows(2).all(|w| w[1].ratio > w[0].ratio);
    let growth_factors: Vec<(u64, f64)> = rows
        .iter()
        .filter(|r| r.m >= 16)
        .filter_map(|r| {
            rows.iter()
                .find(|s| s.m == 4 * r.m)
                .map(|s| (r.m, s.ratio / r.ratio))
        })
        .collect();
    let growth_ok = growth_factors.iter().all(|(_, g)| *g >= MAXIMAL_GROWTH);
    Ok(MaximalGrowth {
        p: p.value(),
        rows,
        strictly_increasing,
        growth_factors,
        growth_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Exponent {
        Exponent::new(2.0).unwrap()
    }

    #[test]
    fn hand_enumerated_case() {
        let r = maximal_ratio_t(1, p2(), 4).unwrap();
        assert!((r.ratio - 2f64.sqrt()).abs() < 1e-14, "{r:?}");
        assert!((r.norm_maximal - 0.5).abs() < 1e-15);
    }

    #[test]
    fn closed_form_supremum() {
        // for k < m the best average is m / (2m - k), for m ≤ k < 2m it is 1
        for m in [3u64, 10, 37] {
            let g = SeqFunction::window(m, 2 * m).unwrap();
            for k in 0..2 * m {
                let (hits, n) = maximal_average(&g, k, 4 * m);
                if k < m {
                    assert_eq!(hits * (2 * m - k), m * n, "m={m} k={k}");
                } else {
                    assert_eq!(hits, n);
                }
            }
        }
    }

    #[test]
    fn horizon_4m_is_exhaustive() {
        for m in [1u64, 2, 5, 16] {
            let a = maximal_ratio_t(m, p2(), 4 * m).unwrap();
            let b = maximal_ratio_t(m, p2(), 8 * m).unwrap();
            assert_eq!(a.ratio, b.ratio);
            assert!(a.argmax_n <= 2 * m);
            assert!(a.ratio >= 1.0);
        }
        assert!(maximal_ratio_t(4, p2(), 7).is_err());
    }

    #[test]
    fn grid_growth() {
        let g = maximal_growth(p2(), &[4, 16, 64], 4).unwrap();
        assert!(g.strictly_increasing);
        assert_eq!(g.growth_factors.len(), 1);
        assert!(g.growth_ok);
    }
}
