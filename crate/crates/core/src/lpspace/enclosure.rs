use std::ops::Add;

use serde::Serialize;

/// A closed interval `[lower, upper]` bracketing a real quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Enclosure {
    pub lower: f64,
    pub upper: f64,
}

impl Enclosure {
    pub fn new(lower: f64, upper: f64) -> Self {
        debug_assert!(lower <= upper, "inverted enclosure [{lower}, {upper}]");
        Enclosure { lower, upper }
    }

    pub fn point(x: f64) -> Self {
        Enclosure { lower: x, upper: x }
    }

    /// Nonnegative partial sum plus a certified bound on the omitted terms.
    pub fn from_partial(partial: f64, tail_bound: f64) -> Self {
        Enclosure::new(partial, partial + tail_bound)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn scale(self, c: f64) -> Self {
        if c >= 0.0 {
            Enclosure::new(c * self.lower, c * self.upper)
        } else {
            Enclosure::new(c * self.upper, c * self.lower)
        }
    }

    /// Image under `x ↦ |x|^p`, `p > 0`.
    pub fn abs_pow(self, p: f64) -> Self {
        if self.lower >= 0.0 {
            Enclosure::new(self.lower.powf(p), self.upper.powf(p))
        } else if self.upper <= 0.0 {
            Enclosure::new((-self.upper).powf(p), (-self.lower).powf(p))
        } else {
            Enclosure::new(0.0, self.lower.abs().max(self.upper).powf(p))
        }
    }

    /// Image under `x ↦ x^(1/p)` for a nonnegative interval.
    pub fn root(self, p: f64) -> Self {
        Enclosure::new(self.lower.max(0.0).powf(1.0 / p), self.upper.max(0.0).powf(1.0 / p))
    }
}

impl Add for Enclosure {
    type Output = Enclosure;
    fn add(self, rhs: Enclosure) -> Enclosure {
        Enclosure::new(self.lower + rhs.lower, self.upper + rhs.upper)
    }
}
