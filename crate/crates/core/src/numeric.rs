//! Small floating-point helpers shared across modules.

/// Relative rounding allowance applied to floating accumulations. It is not
/// a certified bound, only the documented working precision of float sums.
pub const ROUNDING_SLACK: f64 = 1e-12;

/// Neumaier (improved Kahan) compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Ordinary least squares slope of `ys` against `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Formats a float with 17 significant digits, in plain decimal notation for
/// moderate exponents and scientific notation otherwise.
pub fn fmt_sig17(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        // the rounding in `format!` may have carried into a new digit
        trim_fraction(&s)
    } else {
        let s = format!("{:.16e}", x);
        match s.split_once('e') {
            Some((mantissa, e)) => format!("{}e{}", trim_fraction(mantissa), e),
            None => s,
        }
    }
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = CompensatedSum::new();
        acc.add(1.0);
        for _ in 0..1000 {
            acc.add(1e-16);
        }
        acc.add(-1.0);
        assert!((acc.value() - 1e-13).abs() < 1e-20);
    }

    #[test]
    fn slope_of_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 * x + 3.0).collect();
        assert!((ols_slope(&xs, &ys).unwrap() - 0.5).abs() < 1e-15);
        assert!(ols_slope(&[1.0], &[1.0]).is_none());
    }

    #[test]
    fn sig17_round_trips() {
        for &x in &[0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-9, 123456.789, 6.02e23, 0.5] {
            let s = fmt_sig17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_sig17(0.5), "0.5");
        assert_eq!(fmt_sig17(0.0), "0");
    }
}
