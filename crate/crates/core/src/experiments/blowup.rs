use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lpspace::{apply_a_pow, Exponent, SeqFunction};

/// Required factor in `E_lower(4n) ≥ BLOWUP_FACTOR · E_lower(n)`.
pub const BLOWUP_FACTOR: f64 = 1.3;
/// Required factor between the last row and the row at `nMax/4`.
pub const DIVERGENCE_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlowupRow {
    pub n: u64,
    /// Lower end of `E f(S_n)`.
    pub e_lower: f64,
    pub e_upper: f64,
    /// `alpha_0^{1/p} E_lower`, a lower bound on `||A^n f||_p`.
    pub norm_lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupCurve {
    pub p: f64,
    pub beta: f64,
    pub truncation: u64,
    pub rows: Vec<BlowupRow>,
    pub strictly_increasing: bool,
    /// Checked pairs `(n, E_lower(4n) / E_lower(n))`.
    pub growth_factors: Vec<(u64, f64)>,
    pub growth_ok: bool,
}

/// `E f(S_n)` for `f(k) = k^beta`, `n = 0..=nMax`, with the norm lower bound
/// `||A^n f||_p^p ≥ alpha_0 (E f(S_n))^p`.
pub fn blowup_curve(p: Exponent, beta: f64, n_max: u64, truncation: u64) -> Result<BlowupCurve> {
    if beta * p.value() >= 0.5 {
        return Err(Error::NotInLp {
            beta_p: beta * p.value(),
        });
    }
    if beta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "blow-up exponent beta = {beta} must be positive"
        )));
    }
    let f = SeqFunction::power_growth(beta)?;
    let alpha0_root = 0.5f64.powf(p.recip());
    let rows = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let e = apply_a_pow(&f, n, 0, truncation)?;
            Ok(BlowupRow {
                n,
                e_lower: e.lower,
                e_upper: e.upper,
                norm_lower: alpha0_root * e.lower,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let strictly_increasing = rows.windows(2).all(|w| w[1].e_lower > w[0].e_lower);
    let growth_factors: Vec<(u64, f64)> = [2u64, 4, 8]
        .into_iter()
        .filter(|n| 4 * n <= n_max)
        .map(|n| (n, rows[4 * n as usize].e_lower / rows[n as usize].e_lower))
        .collect();
    let growth_ok = growth_factors.iter().all(|(_, g)| *g >= BLOWUP_FACTOR);
    Ok(BlowupCurve {
        p: p.value(),
        beta,
        truncation,
        rows,
        strictly_increasing,
        growth_factors,
        growth_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Divergence {
    pub k: u64,
    /// `(n, lower end of A^n f(k))`.
    pub rows: Vec<(u64, f64)>,
    pub monotone: bool,
    /// Last row divided by the row at `nMax / 4`.
    pub growth_factor: f64,
    pub doubles: bool,
}

/// `A^n f(k)` along `n` for a power-growth `f`: the sequence is nondecreasing
/// and unbounded, so `A^n f` converges at no point.
pub fn pointwise_divergence(
    f: &SeqFunction,
    k: u64,
    n_max: u64,
    truncation: u64,
) -> Result<Divergence> {
    match f.beta() {
        Some(beta) if beta > 0.0 && beta < 0.5 => {}
        _ => {
            return Err(Error::InvalidParameter(
                "pointwise divergence needs k^beta with 0 < beta < 1/2".into(),
            ))
        }
    }
    if n_max < 4 {
        return Err(Error::InvalidParameter("divergence run needs nMax >= 4".into()));
    }
    let rows = (0..=n_max)
        .into_par_iter()
        .map(|n| Ok((n, apply_a_pow(f, n, k, truncation)?.lower)))
        .collect::<Result<Vec<_>>>()?;
    let monotone = rows.windows(2).all(|w| w[1].1 >= w[0].1);
    let quarter = rows[(n_max / 4) as usize].1;
    let last = rows[n_max as usize].1;
    let growth_factor = last / quarter;
    Ok(Divergence {
        k,
        rows,
        monotone,
        growth_factor,
        doubles: growth_factor >= DIVERGENCE_FACTOR,
    })
}
