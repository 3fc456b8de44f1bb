//! The law `alpha` with generating function `(1 - sqrt(1 - x)) / x`, its
//! convolution powers and their tails.
//!
//! `alpha^n_j = n / (2(j + n)) · 2^(1 - 2j - n) · C(2j + n - 1, j)`. Every such
//! weight is a ballot number divided by `2^(2j + n)`, so the exact backend is
//! cheap up to a few thousand indices. Beyond that the log backend takes over.

mod exact;
mod log;
mod table;

pub use exact::ExactRational;
pub use log::{bd0, ln_central_tail, ln_fair_binomial, stirlerr, LogWeight};
pub use table::{build_table, convolve, Table, Weight, WeightTable};

use std::f64::consts::{LN_2, PI};

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// `lim_k alpha_k k^{3/2} = 1 / (2 sqrt(pi))`.
pub const ASYMPTOTIC_CONSTANT: f64 = 0.282_094_791_773_878_14;

/// Upper envelope `alpha_k ≤ ASYMPTOTIC_CONSTANT · k^{-3/2}` for `k ≥ 1`,
/// from `C(2k, k) 4^-k ≤ 1 / sqrt(pi k)`.
pub fn alpha_envelope(k: u64) -> f64 {
    debug_assert!(k >= 1);
    ASYMPTOTIC_CONSTANT * (k as f64).powf(-1.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Exact,
    Log,
}

/// Ceilings on truncation indices and on exact-rational sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest truncation index any routine may request.
    pub max_j: u64,
    /// Largest denominator bit size (`2j + n`, rounded up) for the exact backend.
    pub max_exact_bits: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_j: 1 << 26,
            max_exact_bits: 4000,
        }
    }
}

impl Limits {
    pub const ENV_MAX_J: &'static str = "ERGOLAB_MAX_J";
    pub const ENV_MAX_EXACT_BITS: &'static str = "ERGOLAB_MAX_EXACT_BITS";

    /// Defaults overridden by `ERGOLAB_MAX_J` / `ERGOLAB_MAX_EXACT_BITS`.
    pub fn from_env() -> Result<Self> {
        let mut limits = Limits::default();
        for (var, slot) in [
            (Self::ENV_MAX_J, &mut limits.max_j),
            (Self::ENV_MAX_EXACT_BITS, &mut limits.max_exact_bits),
        ] {
            if let Ok(raw) = std::env::var(var) {
                *slot = raw.trim().parse().map_err(|_| {
                    Error::InvalidParameter(format!("{var}={raw:?} is not an unsigned integer"))
                })?;
            }
        }
        Ok(limits)
    }

    /// Largest `j + n` served by the exact backend.
    pub fn exact_index_limit(&self) -> u64 {
        self.max_exact_bits / 2
    }

    pub fn check_exact(&self, n: u64, j: u64) -> Result<()> {
        if n + j > self.exact_index_limit() {
            return Err(Error::ResourceLimit {
                what: "exact backend index j + n",
                requested: n + j,
                limit: self.exact_index_limit(),
            });
        }
        Ok(())
    }

    pub fn check_truncation(&self, j: u64) -> Result<()> {
        if j > self.max_j {
            return Err(Error::ResourceLimit {
                what: "truncation index J",
                requested: j,
                limit: self.max_j,
            });
        }
        Ok(())
    }
}

/// `C(n, k)` by the multiplicative running product.
fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc *= BigUint::from(n - k + i);
        acc /= BigUint::from(i);
    }
    acc
}

/// `alpha_j = C_j / 2^(2j+1)` with `C_j` the j-th Catalan number.
pub fn alpha_exact(j: u64) -> ExactRational {
    alpha_pow_exact(1, j)
}

/// `alpha^n_j` from the closed form, evaluated directly (no recurrence).
pub fn alpha_pow_exact(n: u64, j: u64) -> ExactRational {
    assert!(n >= 1, "convolution power must be >= 1");
    let c = binomial(2 * j + n - 1, j);
    let numerator = c * BigUint::from(n);
    let denominator = BigUint::from(j + n) << (2 * j + n) as usize;
    ExactRational::new(numerator, denominator)
}

/// `alpha^n_j` for `j < len`, by the ratio recurrence
/// `alpha^n_{j+1} / alpha^n_j = (2j+n+1)(2j+n) / (4(j+1)(j+n+1))`
/// carried on the integer numerators over `2^(2j+n)`.
pub fn alpha_pow_exact_table(n: u64, len: usize) -> Vec<ExactRational> {
    assert!(n >= 1, "convolution power must be >= 1");
    let mut out = Vec::with_capacity(len);
    let mut numer = BigUint::one();
    for j in 0..len as u64 {
        out.push(ExactRational::new(
            numer.clone(),
            BigUint::one() << (2 * j + n) as usize,
        ));
        numer *= BigUint::from((2 * j + n + 1) * (2 * j + n));
        numer /= BigUint::from((j + 1) * (j + n + 1));
    }
    out
}

/// `ln alpha^n_j` via log-binomial differences.
pub fn alpha_pow_log(n: u64, j: u64) -> LogWeight {
    assert!(n >= 1, "convolution power must be >= 1");
    if j == 0 {
        return LogWeight::from_ln(-(n as f64) * LN_2);
    }
    let (nf, jf) = (n as f64, j as f64);
    let ln = nf.ln() - (jf + nf).ln() - LN_2 + ln_fair_binomial(2.0 * jf + nf - 1.0, jf);
    LogWeight::from_ln(ln)
}

/// Streams `alpha^n_0, alpha^n_1, ...` as floats: ratio recurrence, re-anchored
/// to [`alpha_pow_log`] every [`AlphaPowStream::ANCHOR`] steps.
#[derive(Debug, Clone)]
pub struct AlphaPowStream {
    n: u64,
    j: u64,
    current: f64,
}

impl AlphaPowStream {
    pub const ANCHOR: u64 = 1024;

    pub fn new(n: u64) -> Self {
        assert!(n >= 1, "convolution power must be >= 1");
        AlphaPowStream {
            n,
            j: 0,
            current: alpha_pow_log(n, 0).value(),
        }
    }
}

impl Iterator for AlphaPowStream {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        let (n, j) = (self.n, self.j);
        let out = self.current;
        let next = j + 1;
        self.current = if next % Self::ANCHOR == 0 {
            alpha_pow_log(n, next).value()
        } else {
            let (jf, nf) = (j as f64, n as f64);
            out * ((2.0 * jf + nf + 1.0) * (2.0 * jf + nf))
                / (4.0 * (jf + 1.0) * (jf + nf + 1.0))
        };
        self.j = next;
        Some(out)
    }
}

/// `T(J) = sum_{j ≥ J} alpha_j = C(2J, J) 4^-J`.
pub fn tail_exact(j: u64) -> ExactRational {
    ExactRational::new(binomial(2 * j, j), BigUint::one() << (2 * j) as usize)
}

pub fn tail_log(j: u64) -> LogWeight {
    LogWeight::from_ln(ln_central_tail(j as f64))
}

/// `T(J)` as a float, exact below the default exact ceiling.
pub fn tail_f64(j: u64) -> f64 {
    if j <= Limits::default().exact_index_limit() {
        tail_exact(j).to_f64()
    } else {
        tail_log(j).value()
    }
}

/// `min(1, n T(J))`, bounding `sum_{j ≥ J} alpha^n_j` since `alpha^n_j ≤ n alpha_j`.
pub fn tail_pow_bound(n: u64, j: u64) -> ExactRational {
    tail_exact(j).mul_u64(n).min(ExactRational::one())
}

pub fn tail_pow_bound_f64(n: u64, j: u64) -> f64 {
    (n as f64 * tail_f64(j)).min(1.0)
}

/// Partial sum, closed form and gap of the generating function at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgfCheck {
    pub partial_sum: f64,
    pub closed_form: f64,
    pub gap: f64,
    /// `T(J)`, which bounds the gap.
    pub tail_bound: f64,
}

/// Compares `sum_{j<J} alpha_j x^j` against `(1 - sqrt(1 - x)) / x`.
pub fn pgf_check(x: f64, terms: u64) -> Result<PgfCheck> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!(
            "generating function argument {x} outside [0, 1)"
        )));
    }
    // (1 - s)/x with x = 1 - s^2 equals 1/(1 + s): no cancellation, 1/2 at x = 0
    let closed_form = 1.0 / (1.0 + (1.0 - x).sqrt());
    let mut acc = CompensatedSum::new();
    let mut power = 1.0;
    for w in AlphaPowStream::new(1).take(terms as usize) {
        acc.add(w * power);
        power *= x;
        if power == 0.0 {
            break;
        }
    }
    let partial_sum = acc.value();
    Ok(PgfCheck {
        partial_sum,
        closed_form,
        gap: closed_form - partial_sum,
        tail_bound: tail_f64(terms),
    })
}

/// `alpha_k k^{3/2}` from the log backend.
pub fn scaled_weight(k: u64) -> f64 {
    (alpha_pow_log(1, k).ln() + 1.5 * (k as f64).ln()).exp()
}

/// Reference value `1 / (2 sqrt(pi))` computed from `pi`.
pub fn asymptotic_constant() -> f64 {
    0.5 / PI.sqrt()
}
