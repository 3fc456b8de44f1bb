use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::ExactRational;

/// The exponent `p` of `l^p(N, alpha)`, restricted to `1 < p < ∞`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Exponent(f64);

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p > 1.0 {
            Ok(Exponent(p))
        } else {
            Err(Error::InvalidParameter(format!(
                "exponent p = {p} must satisfy 1 < p < inf"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn recip(self) -> f64 {
        1.0 / self.0
    }

    /// The growth exponent `2 / (5p)` of the divergence witness `k^{2/(5p)}`.
    pub fn witness_beta(self) -> f64 {
        2.0 / (5.0 * self.0)
    }
}

impl TryFrom<f64> for Exponent {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        Exponent::new(p)
    }
}

impl From<Exponent> for f64 {
    fn from(p: Exponent) -> f64 {
        p.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeqKind {
    /// `k ↦ k^beta`, with value 0 at `k = 0`.
    PowerGrowth { beta: f64 },
    /// `k ↦ 1[k ≥ m]`.
    IndicatorGe { m: u64 },
    /// `k ↦ 1[start ≤ k < end]`.
    IndicatorWindow { start: u64, end: u64 },
    /// `k ↦ values[k]`, zero past the end.
    FiniteTable(Vec<f64>),
}

/// A function on `N` described symbolically, so that sums against `alpha^n`
/// can be truncated with certified tails.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqFunction {
    kind: SeqKind,
}

impl SeqFunction {
    pub fn power_growth(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "growth exponent {beta} must be finite and >= 0"
            )));
        }
        Ok(SeqFunction {
            kind: SeqKind::PowerGrowth { beta },
        })
    }

    pub fn indicator_ge(m: u64) -> Self {
        SeqFunction {
            kind: SeqKind::IndicatorGe { m },
        }
    }

    pub fn window(start: u64, end: u64) -> Result<Self> {
        if start > end {
            return Err(Error::InvalidParameter(format!(
                "window [{start}, {end}) has start > end"
            )));
        }
        Ok(SeqFunction {
            kind: SeqKind::IndicatorWindow { start, end },
        })
    }

    pub fn finite_table(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "finite table entry {bad} is not finite"
            )));
        }
        Ok(SeqFunction {
            kind: SeqKind::FiniteTable(values),
        })
    }

    pub fn kind(&self) -> &SeqKind {
        &self.kind
    }

    pub fn eval(&self, k: u64) -> f64 {
        match &self.kind {
            SeqKind::PowerGrowth { beta } => {
                if k == 0 {
                    0.0
                } else {
                    (k as f64).powf(*beta)
                }
            }
            SeqKind::IndicatorGe { m } => indicator(k >= *m),
            SeqKind::IndicatorWindow { start, end } => indicator(*start <= k && k < *end),
            SeqKind::FiniteTable(values) => values.get(k as usize).copied().unwrap_or(0.0),
        }
    }

    /// Exact value, for kinds that take nonnegative rational values.
    pub fn eval_exact(&self, k: u64) -> Option<ExactRational> {
        match &self.kind {
            SeqKind::PowerGrowth { .. } => None,
            SeqKind::FiniteTable(values) => match values.get(k as usize) {
                Some(v) => ExactRational::from_f64(*v),
                None => Some(ExactRational::zero()),
            },
            _ => Some(if self.eval(k) == 1.0 {
                ExactRational::one()
            } else {
                ExactRational::zero()
            }),
        }
    }

    /// Whether [`eval_exact`](Self::eval_exact) is defined everywhere.
    pub fn is_exact(&self) -> bool {
        match &self.kind {
            SeqKind::PowerGrowth { .. } => false,
            SeqKind::FiniteTable(values) => values.iter().all(|v| *v >= 0.0),
            _ => true,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match &self.kind {
            SeqKind::FiniteTable(values) => values.iter().all(|v| *v >= 0.0),
            _ => true,
        }
    }

    pub fn is_nondecreasing(&self) -> bool {
        matches!(
            self.kind,
            SeqKind::PowerGrowth { .. } | SeqKind::IndicatorGe { .. }
        )
    }

    /// First index past which the function vanishes identically.
    pub fn support_end(&self) -> Option<u64> {
        match &self.kind {
            SeqKind::IndicatorWindow { end, .. } => Some(*end),
            SeqKind::FiniteTable(values) => Some(values.len() as u64),
            _ => None,
        }
    }

    /// `sup |f|`, or `None` when unbounded.
    pub fn sup_abs(&self) -> Option<f64> {
        match &self.kind {
            SeqKind::PowerGrowth { beta } if *beta > 0.0 => None,
            SeqKind::FiniteTable(values) => Some(values.iter().fold(0.0, |a, v| a.max(v.abs()))),
            _ => Some(1.0),
        }
    }

    /// `(sup f⁺, sup f⁻)` over indices `≥ from`, for bounded kinds.
    pub fn signed_sup_from(&self, from: u64) -> Option<(f64, f64)> {
        match &self.kind {
            SeqKind::PowerGrowth { beta } if *beta > 0.0 => None,
            SeqKind::FiniteTable(values) => {
                let rest = values.get(from as usize..).unwrap_or(&[]);
                Some(rest.iter().fold((0.0f64, 0.0f64), |(pos, neg), v| {
                    (pos.max(*v), neg.max(-*v))
                }))
            }
            SeqKind::IndicatorWindow { end, .. } if from >= *end => Some((0.0, 0.0)),
            _ => Some((1.0, 0.0)),
        }
    }

    /// The growth exponent for [`SeqKind::PowerGrowth`].
    pub fn beta(&self) -> Option<f64> {
        match self.kind {
            SeqKind::PowerGrowth { beta } => Some(beta),
            _ => None,
        }
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        match &self.kind {
            SeqKind::PowerGrowth { beta } => format!("power:{beta}"),
            SeqKind::IndicatorGe { m } => format!("ge:{m}"),
            SeqKind::IndicatorWindow { start, end } => format!("window:{start}:{end}"),
            SeqKind::FiniteTable(values) => format!(
                "table:{}",
                values
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
        }
    }
}

impl std::str::FromStr for SeqFunction {
    type Err = Error;

    /// Parses `power:BETA`, `ge:M`, `window:A:B`, or `table:V0,V1,...`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse function {s:?}"));
        let (tag, rest) = s.split_once(':').ok_or_else(bad)?;
        match tag {
            "power" => SeqFunction::power_growth(rest.parse().map_err(|_| bad())?),
            "ge" => Ok(SeqFunction::indicator_ge(rest.parse().map_err(|_| bad())?)),
            "window" => {
                let (a, b) = rest.split_once(':').ok_or_else(bad)?;
                SeqFunction::window(a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?)
            }
            "table" => {
                let values = rest
                    .split(',')
                    .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                SeqFunction::finite_table(values)
            }
            _ => Err(bad()),
        }
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pointwise_values() {
        assert_eq!(SeqFunction::indicator_ge(4).eval(3), 0.0);
        assert_eq!(SeqFunction::indicator_ge(4).eval(4), 1.0);
        let f = SeqFunction::power_growth(0.2).unwrap();
        assert!((f.eval(32) - 2.0).abs() < 1e-15);
        assert_eq!(f.eval(0), 0.0);
        assert_eq!(SeqFunction::finite_table(vec![5.0]).unwrap().eval(7), 0.0);
        let w = SeqFunction::window(1, 3).unwrap();
        assert_eq!((0..4).map(|k| w.eval(k)).collect::<Vec<_>>(), [0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn invalid_constructions() {
        assert!(SeqFunction::power_growth(-0.1).is_err());
        assert!(SeqFunction::window(3, 2).is_err());
        assert!(SeqFunction::finite_table(vec![f64::NAN]).is_err());
        assert!(Exponent::new(1.0).is_err());
        assert!(Exponent::new(f64::INFINITY).is_err());
        assert!(Exponent::new(1.5).is_ok());
    }

    #[test]
    fn parse_labels() {
        for s in ["power:0.2", "ge:4", "window:1:3", "table:1,0.5"] {
            let f: SeqFunction = s.parse().unwrap();
            assert_eq!(f.label(), s);
        }
        assert!("ge:x".parse::<SeqFunction>().is_err());
        assert!("cube:1".parse::<SeqFunction>().is_err());
    }

    #[test]
    fn signed_sups() {
        let f = SeqFunction::finite_table(vec![1.0, -2.0, 0.5]).unwrap();
        assert_eq!(f.signed_sup_from(0), Some((1.0, 2.0)));
        assert_eq!(f.signed_sup_from(2), Some((0.5, 0.0)));
        assert_eq!(f.signed_sup_from(9), Some((0.0, 0.0)));
        assert!(!f.is_exact());
        assert_eq!(SeqFunction::power_growth(0.3).unwrap().signed_sup_from(0), None);
    }
}
