//! The weighted space `l^p(N, alpha)`, the operator `A = sum_j alpha_j T^j`
//! and its powers, the translation `T`, and Cesàro means.

mod enclosure;
mod function;
mod norm;
mod operator;

pub use enclosure::Enclosure;
pub use function::{Exponent, SeqFunction, SeqKind};
pub use norm::{contraction_bound_check, p_norm, pow_norm, ContractionCheck, CONTRACTION_TOLERANCE};
pub use operator::{
    apply_a_pow, apply_a_pow_exact, apply_a_pow_with, barycenter_residual, cesaro_a,
    cesaro_a_exact, cesaro_t, power_tail_bound, weighted_power_tail, Translation,
    DEFAULT_TRUNCATION,
};
