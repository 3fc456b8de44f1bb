use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

/// Nonnegative arbitrary-precision rational in reduced form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactRational(Ratio<BigUint>);

impl ExactRational {
    pub fn new(numerator: BigUint, denominator: BigUint) -> Self {
        assert!(!denominator.is_zero(), "zero denominator");
        ExactRational(Ratio::new(numerator, denominator))
    }

    pub fn from_u64s(numerator: u64, denominator: u64) -> Self {
        Self::new(BigUint::from(numerator), BigUint::from(denominator))
    }

    pub fn zero() -> Self {
        ExactRational(Ratio::zero())
    }

    pub fn one() -> Self {
        ExactRational(Ratio::one())
    }

    /// Exact value of a finite, nonnegative float.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() || x < 0.0 {
            return None;
        }
        if x == 0.0 {
            return Some(Self::zero());
        }
        let bits = x.to_bits();
        let exponent = ((bits >> 52) & 0x7ff) as i64;
        let fraction = bits & ((1u64 << 52) - 1);
        let (mantissa, exp2) = if exponent == 0 {
            (fraction, -1074)
        } else {
            (fraction | (1u64 << 52), exponent - 1075)
        };
        let m = BigUint::from(mantissa);
        Some(if exp2 >= 0 {
            Self::new(m << exp2 as usize, BigUint::one())
        } else {
            Self::new(m, BigUint::one() << (-exp2) as usize)
        })
    }

    pub fn numerator(&self) -> &BigUint {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigUint {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// `self - other`, or `None` if the result would be negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if self.0 < other.0 {
            None
        } else {
            Some(ExactRational(&self.0 - &other.0))
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn mul_u64(&self, k: u64) -> Self {
        ExactRational(&self.0 * Ratio::from_integer(BigUint::from(k)))
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            None
        } else {
            Some(ExactRational(&self.0 / &other.0))
        }
    }

    pub fn div_u64(&self, k: u64) -> Self {
        assert!(k != 0, "division by zero");
        ExactRational(&self.0 / Ratio::from_integer(BigUint::from(k)))
    }

    /// Nearest-ish `f64` (truncated to 64 significant bits before rounding).
    pub fn to_f64(&self) -> f64 {
        let (mantissa, exp2) = top_bits(self.numerator(), self.denominator());
        match mantissa {
            None => 0.0,
            Some(m) => scale_pow2(m as f64, exp2),
        }
    }

    /// Natural logarithm; `-inf` for zero. Accurate for values far outside
    /// the `f64` range.
    pub fn ln(&self) -> f64 {
        let (mantissa, exp2) = top_bits(self.numerator(), self.denominator());
        match mantissa {
            None => f64::NEG_INFINITY,
            Some(m) => (m as f64).ln() + exp2 as f64 * std::f64::consts::LN_2,
        }
    }

    /// Canonical `num/den` rendering, always with a slash.
    pub fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.numerator(), self.denominator())
    }
}

/// Returns `(q, e)` with `num/den ≈ q · 2^e` and `q` carrying 64 significant bits.
fn top_bits(num: &BigUint, den: &BigUint) -> (Option<u64>, i64) {
    if num.is_zero() {
        return (None, 0);
    }
    let shift = 64 + den.bits() as i64 - num.bits() as i64;
    let q = if shift >= 0 {
        (num << shift as usize).div_floor(den)
    } else {
        num.div_floor(&(den << (-shift) as usize))
    };
    // q has 64 or 65 bits; keep 64
    let extra = q.bits().saturating_sub(64);
    let q = (q >> extra as usize).to_u64().expect("64 significant bits");
    (Some(q), extra as i64 - shift)
}

fn scale_pow2(x: f64, e: i64) -> f64 {
    // split the scaling so that intermediate powers stay representable
    let mut x = x;
    let mut e = e;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

impl PartialOrd for ExactRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactRational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl Add for ExactRational {
    type Output = ExactRational;
    fn add(self, rhs: Self) -> Self {
        ExactRational(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a ExactRational> for &'a ExactRational {
    type Output = ExactRational;
    fn add(self, rhs: &ExactRational) -> ExactRational {
        ExactRational(&self.0 + &rhs.0)
    }
}

impl Mul for ExactRational {
    type Output = ExactRational;
    fn mul(self, rhs: Self) -> Self {
        ExactRational(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a ExactRational> for &'a ExactRational {
    type Output = ExactRational;
    fn mul(self, rhs: &ExactRational) -> ExactRational {
        ExactRational(&self.0 * &rhs.0)
    }
}

impl std::iter::Sum for ExactRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ExactRational::zero(), |a, b| a + b)
    }
}

impl<'a> std::iter::Sum<&'a ExactRational> for ExactRational {
    fn sum<I: Iterator<Item = &'a ExactRational>>(iter: I) -> Self {
        iter.fold(ExactRational::zero(), |a, b| &a + b)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator(), self.denominator())
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_on_construction() {
        let r = ExactRational::from_u64s(6, 8);
        assert_eq!(r.to_fraction_string(), "3/4");
        assert_eq!(ExactRational::one().to_fraction_string(), "1/1");
    }

    #[test]
    fn float_conversions() {
        assert_eq!(ExactRational::from_u64s(1, 3).to_f64(), 1.0 / 3.0);
        assert_eq!(ExactRational::from_u64s(5, 128).to_f64(), 5.0 / 128.0);
        let x = 0.1f64;
        assert_eq!(ExactRational::from_f64(x).unwrap().to_f64(), x);
        assert!(ExactRational::from_f64(-1.0).is_none());
        // 2^-5000 underflows f64 but its log does not
        let tiny = ExactRational::new(BigUint::one(), BigUint::one() << 5000usize);
        assert_eq!(tiny.to_f64(), 0.0);
        let expected = -5000.0 * std::f64::consts::LN_2;
        assert!((tiny.ln() - expected).abs() < 1e-12 * expected.abs());
    }

    #[test]
    fn checked_sub_refuses_negative() {
        let a = ExactRational::from_u64s(1, 2);
        let b = ExactRational::from_u64s(5, 8);
        assert!(a.checked_sub(&b).is_none());
        assert_eq!(b.checked_sub(&a).unwrap(), ExactRational::from_u64s(1, 8));
    }
}
