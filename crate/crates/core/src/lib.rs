//! Exact and certified numerics for the barycenter operator `A = sum_j alpha_j T^j`
//! on the weighted sequence space `l^p(N, alpha)`, where `alpha` is the
//! Catalan-type law with generating function `(1 - sqrt(1 - x)) / x` and `T`
//! is the translation `T f(k) = f(k + 1)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`weights`]: `alpha_j`, the convolution powers `alpha^n_j`, tails and
//!   weight tables, with an exact rational backend and a log-domain backend.
//! * [`lpspace`]: sequence functions, certified p-norm enclosures, the
//!   operator `A^n`, the translation `T` and Cesàro means.
//! * [`experiments`]: norm growth, blow-up, pointwise divergence, the
//!   lower-bound probe, the 2×2 matrix example and the maximal-function ratio.
//! * [`mc`]: Monte Carlo cross-checks of `E f(S_n + k)`.
//! * [`cli`]: the `ergolab` command line and its CSV/JSON reports.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod lpspace;
pub mod mc;
pub mod numeric;
pub mod weights;

pub use error::{Error, Result};
