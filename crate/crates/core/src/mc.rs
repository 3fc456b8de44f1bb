//! Monte Carlo estimates of `E f(S_n + k)`.
//!
//! Draws from `alpha` use an inverse CDF on 53-bit uniforms: an exact
//! threshold table for the first 1024 indices and a log-domain inversion of
//! `T(J) = C(2J, J) 4^-J` beyond. Every estimate is split into
//! [`MC_BLOCKS`] blocks; block `b` draws from ChaCha8 seeded with `seed` on
//! stream `b`, so results do not depend on thread scheduling.

use std::sync::LazyLock;

use num_bigint::BigUint;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lpspace::{apply_a_pow, Enclosure, SeqFunction, SeqKind};
use crate::weights::{ln_central_tail, tail_exact};

/// Indices covered by the exact threshold table.
pub const TABLE_LEN: usize = 1024;
pub const MC_BLOCKS: u64 = 32;
/// Median-of-means is used from this growth exponent on.
pub const MOM_THRESHOLD: f64 = 0.25;

const UNIFORM_BITS: u32 = 53;

/// `tau_j = ceil(CDF(j) 2^53)`; a draw `U` maps to the first `j` with `U < tau_j`.
static THRESHOLDS: LazyLock<Vec<u64>> = LazyLock::new(|| {
    (0..TABLE_LEN as u64)
        .map(|j| {
            // ceil((1 - T(j+1)) 2^53) = 2^53 - floor(T(j+1) 2^53)
            let t = tail_exact(j + 1);
            let scaled: BigUint = (t.numerator() << UNIFORM_BITS as usize) / t.denominator();
            let floor: u64 = scaled.try_into().expect("below 2^53");
            (1u64 << UNIFORM_BITS) - floor
        })
        .collect()
});

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RngSeed {
    pub seed: u64,
}

impl RngSeed {
    pub fn new(seed: u64) -> Self {
        RngSeed { seed }
    }

    pub fn sampler(self, stream: u64) -> Sampler {
        Sampler::new(self, stream)
    }
}

/// A generator owned by one strand of execution.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: RngSeed, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.seed);
        rng.set_stream(stream);
        Sampler { rng }
    }

    /// Uniform integer in `[0, 2^53)`.
    pub fn uniform(&mut self) -> u64 {
        self.rng.next_u64() >> (64 - UNIFORM_BITS)
    }

    pub fn sample_alpha(&mut self) -> u64 {
        alpha_index(self.uniform())
    }

    /// `S_n`, saturating at `u64::MAX`.
    pub fn walk(&mut self, n: u64) -> u64 {
        (0..n).fold(0u64, |s, _| s.saturating_add(self.sample_alpha()))
    }
}

/// Inverse CDF of `alpha` at the uniform `u / 2^53`.
pub fn alpha_index(u: u64) -> u64 {
    debug_assert!(u < 1 << UNIFORM_BITS);
    let table = &*THRESHOLDS;
    if u < table[TABLE_LEN - 1] {
        return table.partition_point(|&t| t <= u) as u64;
    }
    // v = P(X ≥ j) level: answer is the first j with T(j+1) < v
    let v = ((1u64 << UNIFORM_BITS) - u) as f64 / (1u64 << UNIFORM_BITS) as f64;
    tail_index(v.ln())
}

fn tail_index(ln_v: f64) -> u64 {
    let below = |j: u64| ln_central_tail(j as f64 + 1.0) < ln_v;
    // T(j) ~ 1/sqrt(pi j)
    let guess = 1.0 / (std::f64::consts::PI * (2.0 * ln_v).exp());
    if guess >= 2f64.powi(62) {
        return u64::MAX;
    }
    let mut lo = ((guess * 0.5) as u64).max(TABLE_LEN as u64 - 1);
    while lo > TABLE_LEN as u64 - 1 && below(lo) {
        lo = (lo / 2).max(TABLE_LEN as u64 - 1);
    }
    let mut hi = (guess * 2.0) as u64 + 2;
    while !below(hi) {
        if hi >= 1 << 62 {
            return u64::MAX;
        }
        hi *= 2;
    }
    // below(lo) is false (or lo is the table edge), below(hi) is true
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum McMethod {
    Mean,
    MedianOfMeans,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    /// One standard error for `Mean`; a robust dispersion of the block means
    /// scaled the same way for `MedianOfMeans`.
    pub half_width: f64,
    pub trials: u64,
    pub method: McMethod,
}

/// Estimates `E f(S_n + k)` from `trials` independent walks.
pub fn mc_apply_a(
    f: &SeqFunction,
    n: u64,
    k: u64,
    trials: u64,
    seed: RngSeed,
) -> Result<McEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let method = match f.kind() {
        SeqKind::PowerGrowth { beta } if *beta >= 0.5 => {
            return Err(Error::HeavyTailUnreliable { beta: *beta })
        }
        SeqKind::PowerGrowth { beta } if *beta >= MOM_THRESHOLD => McMethod::MedianOfMeans,
        _ => McMethod::Mean,
    };
    let blocks = MC_BLOCKS.min(trials);
    // (count, sum, sum of squares) per block
    let stats: Vec<(u64, f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = trials / blocks + u64::from(b < trials % blocks);
            let mut sampler = seed.sampler(b);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let x = f.eval(sampler.walk(n).saturating_add(k));
                s += x;
                s2 += x * x;
            }
            (count, s, s2)
        })
        .collect();
    let est = match method {
        McMethod::Mean => {
            let total: f64 = stats.iter().map(|s| s.1).sum();
            let total2: f64 = stats.iter().map(|s| s.2).sum();
            let t = trials as f64;
            let mean = total / t;
            let var = if trials > 1 {
                ((total2 - t * mean * mean) / (t - 1.0)).max(0.0)
            } else {
                0.0
            };
            McEstimate {
                mean,
                half_width: (var / t).sqrt(),
                trials,
                method,
            }
        }
        McMethod::MedianOfMeans => {
            let means: Vec<f64> = stats.iter().map(|s| s.1 / s.0 as f64).collect();
            let med = median(&means);
            let dev: Vec<f64> = means.iter().map(|m| (m - med).abs()).collect();
            // MAD -> sigma of a block mean, then the standard error of a median
            let sigma_block = 1.4826 * median(&dev);
            McEstimate {
                mean: med,
                half_width: 1.2533 * sigma_block / (means.len() as f64).sqrt(),
                trials,
                method,
            }
        }
    };
    Ok(est)
}

/// An estimate next to the certified enclosure of the same expectation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossCheck {
    pub estimate: McEstimate,
    pub exact: Enclosure,
    /// Distance from the estimate to the enclosure is at most 3 half-widths.
    pub ok: bool,
}

pub fn cross_check(
    f: &SeqFunction,
    n: u64,
    k: u64,
    trials: u64,
    seed: RngSeed,
    truncation: u64,
) -> Result<CrossCheck> {
    let exact = apply_a_pow(f, n, k, truncation)?;
    let estimate = mc_apply_a(f, n, k, trials, seed)?;
    Ok(CrossCheck {
        estimate,
        exact,
        ok: agrees(&estimate, &exact),
    })
}

/// Distance from the estimate to the enclosure is at most 3 half-widths.
pub fn agrees(estimate: &McEstimate, exact: &Enclosure) -> bool {
    let distance = (exact.lower - estimate.mean).max(estimate.mean - exact.upper).max(0.0);
    distance <= 3.0 * estimate.half_width
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{alpha_exact, tail_f64};

    const HALF: u64 = 1 << 52;

    #[test]
    fn inverse_cdf_boundaries() {
        assert_eq!(alpha_index(0), 0);
        assert_eq!(alpha_index(HALF - 1), 0);
        assert_eq!(alpha_index(HALF), 1);
        // CDF(1) = 5/8
        let five_eighths = 5 * (1u64 << 50);
        assert_eq!(alpha_index(five_eighths - 1), 1);
        assert_eq!(alpha_index(five_eighths), 2);
    }

    #[test]
    fn tail_inversion_continues_the_table() {
        let table = &*THRESHOLDS;
        let edge = table[TABLE_LEN - 1];
        assert_eq!(alpha_index(edge - 1), TABLE_LEN as u64 - 1);
        assert_eq!(alpha_index(edge), TABLE_LEN as u64);
        let mut last = 0;
        for u in [edge, edge + 1000, (1 << 53) - (1 << 30), (1 << 53) - 5, (1 << 53) - 1] {
            let j = alpha_index(u);
            assert!(j >= last);
            last = j;
        }
        // v = 2^-53 lies beyond u64
        assert_eq!(alpha_index((1 << 53) - 1), u64::MAX);
        // the returned index is the first with T(j+1) < v
        let u = (1u64 << 53) - (1 << 33);
        let v = (1u64 << 33) as f64 / (1u64 << 53) as f64;
        let j = alpha_index(u);
        assert!(ln_central_tail(j as f64 + 1.0) < v.ln());
        assert!(ln_central_tail(j as f64) >= v.ln());
    }

    #[test]
    fn deterministic_streams() {
        let draw = |seed, stream| -> Vec<u64> {
            let mut s = RngSeed::new(seed).sampler(stream);
            (0..100).map(|_| s.sample_alpha()).collect()
        };
        assert_eq!(draw(7, 0), draw(7, 0));
        assert_ne!(draw(7, 0), draw(7, 1));
        assert_ne!(draw(7, 0), draw(8, 0));
        let f = SeqFunction::power_growth(0.2).unwrap();
        let a = mc_apply_a(&f, 3, 1, 5000, RngSeed::new(1)).unwrap();
        let b = mc_apply_a(&f, 3, 1, 5000, RngSeed::new(1)).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.half_width.to_bits(), b.half_width.to_bits());
    }

    #[test]
    fn zero_frequency() {
        let mut s = RngSeed::new(11).sampler(0);
        let zeros = (0..100_000).filter(|_| s.sample_alpha() == 0).count();
        assert!((zeros as f64 / 1e5 - 0.5).abs() < 0.005);
        assert_eq!(s.walk(0), 0);
    }

    #[test]
    fn chi_square_against_exact_weights() {
        let draws = 100_000u64;
        let mut counts = [0u64; 65];
        let mut s = RngSeed::new(2024).sampler(0);
        for _ in 0..draws {
            counts[s.walk(1).min(64) as usize] += 1;
        }
        let mut chi2 = 0.0;
        for (j, &c) in counts.iter().enumerate() {
            let p = if j < 64 { alpha_exact(j as u64).to_f64() } else { tail_f64(64) };
            let e = p * draws as f64;
            chi2 += (c as f64 - e).powi(2) / e;
        }
        // 0.999 quantile of chi-square with 64 degrees of freedom
        assert!(chi2 < 104.716, "chi2 = {chi2}");
    }

    #[test]
    fn upper_tail_frequency() {
        let draws = 1_000_000u64;
        let mut s = RngSeed::new(99).sampler(3);
        let hits = (0..draws).filter(|_| s.sample_alpha() >= 100).count() as f64;
        let p = tail_f64(100);
        let sigma = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((hits / draws as f64 - p).abs() <= 3.0 * sigma);
    }

    #[test]
    fn estimates() {
        let a = mc_apply_a(&SeqFunction::indicator_ge(1), 1, 0, 100_000, RngSeed::new(5)).unwrap();
        assert_eq!(a.method, McMethod::Mean);
        assert!((a.mean - 0.5).abs() <= 3.0 * a.half_width);
        assert!(a.half_width < 0.002);
        let t = SeqFunction::finite_table(vec![1.0]).unwrap();
        let b = mc_apply_a(&t, 2, 0, 10_000, RngSeed::new(6)).unwrap();
        assert!((b.mean - 0.25).abs() <= 0.013);
        let heavy = SeqFunction::power_growth(0.3).unwrap();
        let c = mc_apply_a(&heavy, 2, 0, 1000, RngSeed::new(6)).unwrap();
        assert_eq!(c.method, McMethod::MedianOfMeans);
        assert!(c.half_width >= 0.0);
        let x = cross_check(&t, 2, 0, 10_000, RngSeed::new(42), 1 << 10).unwrap();
        assert_eq!(x.exact.mid(), 0.25);
        assert!(x.ok);
        assert!(matches!(
            mc_apply_a(&SeqFunction::power_growth(0.5).unwrap(), 1, 0, 10, RngSeed::new(0)),
            Err(Error::HeavyTailUnreliable { .. })
        ));
    }
}
