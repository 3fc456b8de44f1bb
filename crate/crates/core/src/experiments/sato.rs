use serde::Serialize;

use crate::error::{Error, Result};
use crate::lpspace::Exponent;
use crate::weights::ExactRational;

/// 2×2 matrix with exact nonnegative entries, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatoMatrix {
    pub entries: [[ExactRational; 2]; 2],
}

impl SatoMatrix {
    pub fn identity() -> Self {
        SatoMatrix {
            entries: [
                [ExactRational::one(), ExactRational::zero()],
                [ExactRational::zero(), ExactRational::one()],
            ],
        }
    }

    /// `[[1, a], [0, 1]] = I + B` with `B² = 0`.
    pub fn generator(a: &ExactRational) -> Self {
        SatoMatrix {
            entries: [
                [ExactRational::one(), a.clone()],
                [ExactRational::zero(), ExactRational::one()],
            ],
        }
    }

    pub fn mul(&self, rhs: &SatoMatrix) -> SatoMatrix {
        let e = |i: usize, j: usize| {
            &(&self.entries[i][0] * &rhs.entries[0][j]) + &(&self.entries[i][1] * &rhs.entries[1][j])
        };
        SatoMatrix {
            entries: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
        }
    }

    pub fn add(&self, rhs: &SatoMatrix) -> SatoMatrix {
        let e = |i: usize, j: usize| &self.entries[i][j] + &rhs.entries[i][j];
        SatoMatrix {
            entries: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
        }
    }

    pub fn entrywise_le(&self, rhs: &SatoMatrix) -> bool {
        (0..2).all(|i| (0..2).all(|j| self.entries[i][j] <= rhs.entries[i][j]))
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        let e = |i: usize, j: usize| self.entries[i][j].to_f64();
        [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
    }
}

fn exact_positive(a: f64) -> Result<ExactRational> {
    match ExactRational::from_f64(a) {
        Some(r) if a > 0.0 => Ok(r),
        _ => Err(Error::InvalidParameter(format!(
            "matrix parameter a = {a} must be a positive real"
        ))),
    }
}

/// Closed form `[[1, n a], [0, 1]]`.
pub fn sato_power(n: u64, a: f64) -> Result<SatoMatrix> {
    Ok(SatoMatrix::generator(&exact_positive(a)?.mul_u64(n)))
}

/// `n`-fold product of the generator.
pub fn sato_power_by_product(n: u64, a: f64) -> Result<SatoMatrix> {
    let g = SatoMatrix::generator(&exact_positive(a)?);
    Ok((0..n).fold(SatoMatrix::identity(), |acc, _| acc.mul(&g)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SatoChecks {
    pub n_max: u64,
    /// Closed form equals the repeated product for every `n ≤ nMax`.
    pub closed_form_ok: bool,
    /// `A^{n+m} ≤ A^n + A^m` entrywise for `n, m ≤ nMax`.
    pub subadditive_ok: bool,
    /// The corner entry satisfies the inequality with equality.
    pub corner_equality_ok: bool,
}

pub fn sato_checks(a: f64, n_max: u64) -> Result<SatoChecks> {
    let g = SatoMatrix::generator(&exact_positive(a)?);
    let mut powers = vec![SatoMatrix::identity()];
    for n in 1..=2 * n_max {
        let next = powers[n as usize - 1].mul(&g);
        powers.push(next);
    }
    let mut closed_form_ok = true;
    for n in 0..=n_max {
        closed_form_ok &= powers[n as usize] == sato_power(n, a)?;
    }
    let mut subadditive_ok = true;
    let mut corner_equality_ok = true;
    for n in 0..=n_max as usize {
        for m in 0..=n_max as usize {
            let sum = powers[n].add(&powers[m]);
            subadditive_ok &= powers[n + m].entrywise_le(&sum);
            corner_equality_ok &= powers[n + m].entries[0][1] == sum.entries[0][1];
        }
    }
    Ok(SatoChecks {
        n_max,
        closed_form_ok,
        subadditive_ok,
        corner_equality_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SatoGrowth {
    pub a: f64,
    pub p: f64,
    /// `(n, ||A^n e_2||_p)`.
    pub rows: Vec<(u64, f64)>,
    pub strictly_increasing: bool,
    /// `||A^n e_2||_p ≥ n a` on every row.
    pub lower_bound_ok: bool,
}

/// `A^n e_2 = (n a, 1)`, so `||A^n e_2||_p = ((n a)^p + 1)^{1/p}`.
pub fn sato_norm_growth(a: f64, p: Exponent, n_max: u64) -> Result<SatoGrowth> {
    exact_positive(a)?;
    let pv = p.value();
    let rows: Vec<(u64, f64)> = (0..=n_max)
        .map(|n| {
            let v = sato_power(n, a).expect("validated").to_f64();
            let x = v[0][1];
            let y = v[1][1];
            (n, (x.powf(pv) + y.powf(pv)).powf(p.recip()))
        })
        .collect();
    let strictly_increasing = rows.windows(2).all(|w| w[1].1 > w[0].1);
    let lower_bound_ok = rows.iter().all(|&(n, norm)| norm >= n as f64 * a);
    Ok(SatoGrowth {
        a,
        p: pv,
        rows,
        strictly_increasing,
        lower_bound_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedDecay {
    pub p: f64,
    /// `(n, (n+1)^{1/p} / n)`.
    pub rows: Vec<(u64, f64)>,
    pub strictly_decreasing: bool,
}

/// The upper bound `||A^n||_p ≤ (n+1)^{1/p}` divided by `n`.
pub fn normalized_decay_check(p: Exponent, n_max: u64) -> Result<NormalizedDecay> {
    if n_max < 2 {
        return Err(Error::InvalidParameter(format!(
            "decay check needs nMax >= 2, got {n_max}"
        )));
    }
    let rows: Vec<(u64, f64)> = (1..=n_max)
        .map(|n| (n, ((n + 1) as f64).powf(p.recip()) / n as f64))
        .collect();
    let strictly_decreasing = rows.windows(2).all(|w| w[1].1 < w[0].1);
    Ok(NormalizedDecay {
        p: p.value(),
        rows,
        strictly_decreasing,
    })
}
