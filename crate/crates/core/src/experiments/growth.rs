use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lpspace::Exponent;
use crate::numeric::{ols_slope, CompensatedSum, ROUNDING_SLACK};
use crate::weights::{tail_f64, AlphaPowStream, Limits};

/// Relative slack on the sandwich `R(n) ≤ (n+1)^{1/p}`.
pub const SANDWICH_TOLERANCE: f64 = 1e-9;
/// Admissible slope band, as multiples of `1/p`.
pub const SLOPE_BAND: (f64, f64) = (0.85, 1.15);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: u64,
    /// `||f_n||_p = T(n²)^{1/p}`.
    pub norm_fn: f64,
    /// Lower bound on `||A^n f_n||_p`.
    pub norm_an_fn_lower: f64,
    /// `norm_an_fn_lower / norm_fn`, a lower bound on `||A^n||_p`.
    pub ratio: f64,
    /// `(n+1)^{1/p}`, the upper bound on `||A^n||_p`.
    pub upper_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthCurve {
    pub p: f64,
    pub rows: Vec<GrowthRow>,
    /// Least-squares slope of `ln R(n)` against `ln n` over `fit_range`.
    pub slope: f64,
    pub fit_range: (u64, u64),
    /// `min_n R(n) / n^{1/p}`, the empirical constant in `||A^n|| ≥ C n^{1/p}`.
    pub empirical_constant: f64,
    pub sandwich_ok: bool,
    pub slope_ok: bool,
}

/// The witness `f_n = 1[k ≥ n²]`.
pub fn witness_fn(n: u64) -> Result<crate::lpspace::SeqFunction> {
    if n == 0 {
        return Err(Error::InvalidParameter("witness index n must be >= 1".into()));
    }
    Ok(crate::lpspace::SeqFunction::indicator_ge(n * n))
}

/// One row: `||A^n f_n||_p^p ≥ sum_{k<n²} alpha_k P(S_n ≥ n² - k)^p`, the
/// probabilities coming from prefix sums of `alpha^n`.
pub fn growth_row(p: Exponent, n: u64, limits: &Limits) -> Result<GrowthRow> {
    let pv = p.value();
    let threshold = n * n;
    limits.check_truncation(threshold)?;
    // prefix[i] = P(S_n < i)
    let mut prefix = Vec::with_capacity(threshold as usize + 1);
    let mut acc = CompensatedSum::new();
    prefix.push(0.0);
    for w in AlphaPowStream::new(n).take(threshold as usize) {
        acc.add(w);
        prefix.push(acc.value());
    }
    let slack = 4.0 * threshold as f64 * f64::EPSILON;
    let mut sum = CompensatedSum::new();
    for (k, w) in AlphaPowStream::new(1).take(threshold as usize).enumerate() {
        let p_hit = (1.0 - prefix[threshold as usize - k] - slack).max(0.0);
        sum.add(w * p_hit.powf(pv));
    }
    let lower_pth = sum.value() * (1.0 - ROUNDING_SLACK);
    let fn_pth = tail_f64(threshold);
    let norm_fn = fn_pth.powf(p.recip());
    let norm_an_fn_lower = lower_pth.powf(p.recip());
    Ok(GrowthRow {
        n,
        norm_fn,
        norm_an_fn_lower,
        ratio: (lower_pth / fn_pth).powf(p.recip()),
        upper_bound: ((n + 1) as f64).powf(p.recip()),
    })
}

pub fn growth_curve(p: Exponent, n_max: u64, limits: &Limits) -> Result<GrowthCurve> {
    if n_max < 8 {
        return Err(Error::InvalidParameter(format!(
            "growth curve needs nMax >= 8, got {n_max}"
        )));
    }
    limits.check_truncation(n_max * n_max)?;
    let rows = (1..=n_max)
        .into_par_iter()
        .map(|n| growth_row(p, n, limits))
        .collect::<Result<Vec<_>>>()?;
    let fit_range = ((n_max / 4).max(2), n_max);
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.n >= fit_range.0 && r.n <= fit_range.1)
        .map(|r| ((r.n as f64).ln(), r.ratio.ln()))
        .unzip();
    let slope = ols_slope(&xs, &ys).expect("fit window has several points");
    let sandwich_ok = rows.iter().all(|r| {
        r.norm_fn > 0.0
            && r.norm_an_fn_lower > 0.0
            && r.ratio > 0.0
            && r.ratio <= r.upper_bound * (1.0 + SANDWICH_TOLERANCE)
    });
    let empirical_constant = rows
        .iter()
        .map(|r| r.ratio / (r.n as f64).powf(p.recip()))
        .fold(f64::INFINITY, f64::min);
    let slope_ok = slope >= SLOPE_BAND.0 * p.recip() && slope <= SLOPE_BAND.1 * p.recip();
    Ok(GrowthCurve {
        p: p.value(),
        rows,
        slope,
        fit_range,
        empirical_constant,
        sandwich_ok,
        slope_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpspace::{apply_a_pow_exact, SeqKind};
    use crate::weights::{alpha_exact, tail_exact, ExactRational};

    #[test]
    fn witnesses() {
        for (n, m) in [(1, 1), (2, 4), (3, 9)] {
            assert_eq!(*witness_fn(n).unwrap().kind(), SeqKind::IndicatorGe { m });
        }
        assert!(witness_fn(0).is_err());
    }

    #[test]
    fn witness_norms_are_exact_tails() {
        let p = Exponent::new(2.0).unwrap();
        let limits = Limits::default();
        let r1 = growth_row(p, 1, &limits).unwrap();
        assert!((r1.norm_fn.powi(2) - 0.5).abs() < 1e-15);
        let r2 = growth_row(p, 2, &limits).unwrap();
        assert!((r2.norm_fn.powi(2) - 35.0 / 128.0).abs() < 1e-15);
    }

    #[test]
    fn row_matches_exact_lower_sum() {
        // sum_{k<n²} alpha_k (A^n f_n(k))^2 evaluated in exact arithmetic
        let p = Exponent::new(2.0).unwrap();
        let limits = Limits::default();
        for n in 1..=5u64 {
            let f = witness_fn(n).unwrap();
            let mut exact = ExactRational::zero();
            for k in 0..n * n {
                let v = apply_a_pow_exact(&f, n, k, &limits).unwrap();
                exact = exact + &alpha_exact(k) * &(&v * &v);
            }
            let row = growth_row(p, n, &limits).unwrap();
            let expected = (exact.to_f64() / tail_exact(n * n).to_f64()).sqrt();
            assert!(
                (row.ratio - expected).abs() <= 1e-11 * expected,
                "n={n}: {} vs {expected}",
                row.ratio
            );
        }
    }

    #[test]
    fn curve_at_p2() {
        let curve = growth_curve(Exponent::new(2.0).unwrap(), 32, &Limits::default()).unwrap();
        assert!(curve.sandwich_ok);
        assert!((0.425..=0.575).contains(&curve.slope), "slope {}", curve.slope);
        assert_eq!(curve.fit_range, (8, 32));
        assert!(curve.empirical_constant > 0.0);
        assert!(growth_curve(Exponent::new(2.0).unwrap(), 7, &Limits::default()).is_err());
    }
}
