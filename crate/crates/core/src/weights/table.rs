use std::fmt::Debug;

use super::{
    alpha_pow_exact_table, alpha_pow_log, tail_exact, tail_log, tail_pow_bound, AlphaPowStream,
    Backend, ExactRational, Limits, LogWeight,
};
use crate::error::Result;

/// Nonnegative weight arithmetic shared by both backends.
pub trait Weight: Clone + PartialOrd + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn to_f64(&self) -> f64;
}

impl Weight for ExactRational {
    fn zero() -> Self {
        ExactRational::zero()
    }
    fn one() -> Self {
        ExactRational::one()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn to_f64(&self) -> f64 {
        ExactRational::to_f64(self)
    }
}

impl Weight for LogWeight {
    fn zero() -> Self {
        LogWeight::ZERO
    }
    fn one() -> Self {
        LogWeight::ONE
    }
    fn plus(&self, other: &Self) -> Self {
        self.add(*other)
    }
    fn times(&self, other: &Self) -> Self {
        self.mul(*other)
    }
    fn to_f64(&self) -> f64 {
        self.value()
    }
}

/// Prefix `alpha^n_0 .. alpha^n_{J-1}` plus an upper bound on the remaining mass.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable<W> {
    pub n: u64,
    pub weights: Vec<W>,
    pub tail_bound: W,
}

impl<W: Weight> WeightTable<W> {
    /// `delta_0`, the law of `S_0`.
    pub fn identity(len: usize) -> Self {
        let mut weights = vec![W::zero(); len];
        if let Some(first) = weights.first_mut() {
            *first = W::one();
        }
        let tail_bound = if len == 0 { W::one() } else { W::zero() };
        WeightTable {
            n: 0,
            weights,
            tail_bound,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn mass(&self) -> W {
        self.weights.iter().fold(W::zero(), |acc, w| acc.plus(w))
    }

    /// Tail bound seen from a shorter prefix of length `len`.
    fn tail_at(&self, len: usize) -> W {
        self.weights[len..]
            .iter()
            .fold(self.tail_bound.clone(), |acc, w| acc.plus(w))
    }
}

/// `(u * v)_j = sum_{i ≤ j} u_i v_{j-i}` on the common prefix.
///
/// The tail bound covers `{U ≥ J} ∪ {V ≥ J} ∪ {U, V < J ≤ U + V}`, the last
/// event being summed exactly from the prefixes.
pub fn convolve<W: Weight>(u: &WeightTable<W>, v: &WeightTable<W>) -> WeightTable<W> {
    let len = u.len().min(v.len());
    let (a, b) = (&u.weights[..len], &v.weights[..len]);
    let mut weights = Vec::with_capacity(len);
    for j in 0..len {
        let mut acc = W::zero();
        for i in 0..=j {
            acc = acc.plus(&a[i].times(&b[j - i]));
        }
        weights.push(acc);
    }
    let mut cross = W::zero();
    for i in 1..len {
        for l in (len - i)..len {
            cross = cross.plus(&a[i].times(&b[l]));
        }
    }
    let tail_bound = u.tail_at(len).plus(&v.tail_at(len)).plus(&cross);
    WeightTable {
        n: u.n + v.n,
        weights,
        tail_bound,
    }
}

/// Table for either backend.
#[derive(Debug, Clone, PartialEq)]
pub enum Table {
    Exact(WeightTable<ExactRational>),
    Log(WeightTable<LogWeight>),
}

impl Table {
    pub fn n(&self) -> u64 {
        match self {
            Table::Exact(t) => t.n,
            Table::Log(t) => t.n,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Table::Exact(t) => t.len(),
            Table::Log(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        match self {
            Table::Exact(t) => t.weights.iter().map(Weight::to_f64).collect(),
            Table::Log(t) => t.weights.iter().map(Weight::to_f64).collect(),
        }
    }

    pub fn tail_bound_f64(&self) -> f64 {
        match self {
            Table::Exact(t) => t.tail_bound.to_f64(),
            Table::Log(t) => t.tail_bound.to_f64(),
        }
    }
}

/// `alpha^n_j` for `j < len` with tail bound `min(1, n T(len))`.
pub fn build_table(n: u64, len: u64, backend: Backend, limits: &Limits) -> Result<Table> {
    assert!(n >= 1, "convolution power must be >= 1");
    limits.check_truncation(len)?;
    match backend {
        Backend::Exact => {
            if len > 0 {
                limits.check_exact(n, len - 1)?;
            }
            limits.check_exact(0, len)?;
            Ok(Table::Exact(WeightTable {
                n,
                weights: alpha_pow_exact_table(n, len as usize),
                tail_bound: tail_pow_bound(n, len),
            }))
        }
        Backend::Log => {
            let weights = AlphaPowStream::new(n)
                .take(len as usize)
                .enumerate()
                .map(|(j, w)| {
                    if w > 0.0 {
                        LogWeight::from_value(w)
                    } else {
                        alpha_pow_log(n, j as u64)
                    }
                })
                .collect();
            let tail = if len <= limits.exact_index_limit() {
                tail_exact(len).to_f64().ln()
            } else {
                tail_log(len).ln()
            };
            let tail_bound = LogWeight::from_ln(((n as f64).ln() + tail).min(0.0));
            Ok(Table::Log(WeightTable {
                n,
                weights,
                tail_bound,
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{alpha_pow_exact, tail_exact};

    fn r(n: u64, d: u64) -> ExactRational {
        ExactRational::from_u64s(n, d)
    }

    fn exact(n: u64, len: u64) -> WeightTable<ExactRational> {
        match build_table(n, len, Backend::Exact, &Limits::default()).unwrap() {
            Table::Exact(t) => t,
            Table::Log(_) => unreachable!(),
        }
    }

    #[test]
    fn build_examples() {
        let t = exact(1, 4);
        assert_eq!(t.weights, vec![r(1, 2), r(1, 8), r(1, 16), r(5, 128)]);
        assert_eq!(t.tail_bound, r(35, 128));
        let t = exact(2, 1);
        assert_eq!(t.weights, vec![r(1, 4)]);
        assert!(t.tail_bound <= ExactRational::one());
        let t = exact(1, 0);
        assert!(t.weights.is_empty());
        assert_eq!(t.tail_bound, ExactRational::one());
    }

    #[test]
    fn exact_backend_refuses_large_indices() {
        let err = build_table(5, 3000, Backend::Exact, &Limits::default());
        assert!(matches!(err, Err(crate::Error::ResourceLimit { .. })));
        assert!(build_table(5, 3000, Backend::Log, &Limits::default()).is_ok());
    }

    #[test]
    fn convolution_examples() {
        let a = exact(1, 8);
        let delta = WeightTable::identity(8);
        assert_eq!(convolve(&delta, &a).weights, a.weights);

        let a2 = convolve(&a, &a);
        assert_eq!(a2.weights[2], r(5, 64));
        let a3 = convolve(&a, &a2);
        assert_eq!(a3.weights[1], r(3, 32));
        assert_eq!(a3.weights[1], alpha_pow_exact(3, 1));
        assert_eq!(a3.n, 3);
    }

    #[test]
    fn convolution_tail_is_certified() {
        let a = exact(1, 10);
        let a2 = convolve(&a, &a);
        let total = &a2.mass() + &a2.tail_bound;
        assert!(total >= ExactRational::one());
        assert!(a2.tail_bound <= tail_exact(10).mul_u64(2) + tail_exact(5).mul_u64(10));
    }

    #[test]
    fn log_table_agrees_with_exact() {
        let e = exact(3, 500);
        let Table::Log(l) = build_table(3, 500, Backend::Log, &Limits::default()).unwrap() else {
            unreachable!()
        };
        for (x, y) in e.weights.iter().zip(&l.weights) {
            let (x, y) = (x.to_f64(), y.value());
            assert!((x - y).abs() <= 1e-12 * x);
        }
        assert!((l.tail_bound.value() - e.tail_bound.to_f64()).abs() < 1e-12);
    }
}
