use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::weights::{alpha_exact, alpha_pow_exact, alpha_pow_log, ExactRational, Limits};

/// Largest admissible drop of the minimum when `nMax` doubles.
pub const STABILITY_FACTOR: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRow {
    pub n: u64,
    /// Index of the smallest ratio at this `n`.
    pub j: u64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub c0: f64,
    pub n_max: u64,
    pub j_max: u64,
    pub admissible_pairs: u64,
    pub min_observed: f64,
    /// Minimum over `n ≤ nMax/2`, when that grid is nonempty.
    pub min_half_grid: Option<f64>,
    pub positive: bool,
    pub stable: bool,
    pub rows: Vec<ProbeRow>,
}

/// `alpha^n_j / (n alpha_j)` in exact arithmetic.
pub fn probe_ratio_exact(n: u64, j: u64, limits: &Limits) -> Result<ExactRational> {
    if n == 0 {
        return Err(Error::InvalidParameter("probe ratio needs n >= 1".into()));
    }
    limits.check_exact(n, j)?;
    let den = alpha_exact(j).mul_u64(n);
    Ok(alpha_pow_exact(n, j)
        .checked_div(&den)
        .expect("alpha_j is positive"))
}

fn probe_ratio_log(n: u64, j: u64) -> f64 {
    (alpha_pow_log(n, j).ln() - (n as f64).ln() - alpha_pow_log(1, j).ln()).exp()
}

/// Scans `{(n, j): 2 ≤ n ≤ nMax, 1 ≤ j ≤ jMax, c0 j ≥ n²}` for the smallest
/// `alpha^n_j / (n alpha_j)`.
pub fn lower_bound_probe(c0: f64, n_max: u64, j_max: u64) -> Result<ProbeReport> {
    if !(c0.is_finite() && c0 >= 1.0) {
        return Err(Error::InvalidParameter(format!("c0 = {c0} must be >= 1")));
    }
    let per_n: Vec<(ProbeRow, u64)> = (2..=n_max)
        .into_par_iter()
        .filter_map(|n| {
            let first = (((n * n) as f64 / c0).ceil() as u64).max(1);
            // float guard for non-integral c0
            let first = (first.saturating_sub(1)..=first)
                .find(|&j| j >= 1 && c0 * j as f64 >= (n * n) as f64)
                .unwrap_or(first);
            if first > j_max {
                return None;
            }
            let mut best = ProbeRow {
                n,
                j: first,
                ratio: f64::INFINITY,
            };
            for j in first..=j_max {
                let r = probe_ratio_log(n, j);
                if r < best.ratio {
                    best = ProbeRow { n, j, ratio: r };
                }
            }
            Some((best, j_max - first + 1))
        })
        .collect();
    if per_n.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let rows: Vec<ProbeRow> = per_n.iter().map(|(r, _)| *r).collect();
    let admissible_pairs = per_n.iter().map(|(_, c)| c).sum();
    let min_of = |cap: u64| {
        rows.iter()
            .filter(|r| r.n <= cap)
            .map(|r| r.ratio)
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.min(r))))
    };
    let min_observed = min_of(n_max).expect("nonempty");
    let min_half_grid = min_of(n_max / 2);
    let stable = min_half_grid.is_none_or(|h| min_observed >= STABILITY_FACTOR * h);
    Ok(ProbeReport {
        c0,
        n_max,
        j_max,
        admissible_pairs,
        min_observed,
        min_half_grid,
        positive: min_observed > 0.0,
        stable,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_grid_point() {
        let limits = Limits::default();
        assert_eq!(
            probe_ratio_exact(2, 4, &limits).unwrap(),
            ExactRational::from_u64s(3, 4)
        );
        for j in 0..20 {
            assert_eq!(probe_ratio_exact(1, j, &limits).unwrap(), ExactRational::one());
        }
        assert!((probe_ratio_log(2, 4) - 0.75).abs() < 1e-14);
    }

    #[test]
    fn log_matches_exact_ratios() {
        let limits = Limits::default();
        for n in [2u64, 5, 12] {
            for j in [n * n, 100, 777] {
                let e = probe_ratio_exact(n, j, &limits).unwrap().to_f64();
                assert!((probe_ratio_log(n, j) - e).abs() <= 1e-12 * e);
            }
        }
    }

    #[test]
    fn small_probe() {
        let r = lower_bound_probe(1.0, 6, 400).unwrap();
        assert_eq!(r.rows.len(), 5);
        assert!(r.positive && r.stable);
        assert!(r.rows.iter().all(|row| row.j >= row.n * row.n));
        assert_eq!(r.admissible_pairs, (2..=6u64).map(|n| 400 - n * n + 1).sum::<u64>());
        assert!(matches!(lower_bound_probe(1.0, 12, 3), Err(Error::EmptyGrid)));
        assert!(lower_bound_probe(0.5, 6, 400).is_err());
    }
}
