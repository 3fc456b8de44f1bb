//! Reproducible counterexample runs with pass/fail verdicts.

mod blowup;
mod growth;
mod maximal;
mod probe;
mod sato;

pub use blowup::{
    blowup_curve, pointwise_divergence, BlowupCurve, BlowupRow, Divergence, BLOWUP_FACTOR,
    DIVERGENCE_FACTOR,
};
pub use growth::{growth_curve, growth_row, witness_fn, GrowthCurve, GrowthRow, SANDWICH_TOLERANCE, SLOPE_BAND};
pub use maximal::{
    maximal_average, maximal_growth, maximal_ratio_t, MaximalGrowth, MaximalRatio, MAXIMAL_GROWTH,
};
pub use probe::{lower_bound_probe, probe_ratio_exact, ProbeReport, ProbeRow, STABILITY_FACTOR};
pub use sato::{
    normalized_decay_check, sato_checks, sato_norm_growth, sato_power, sato_power_by_product,
    NormalizedDecay, SatoChecks, SatoGrowth, SatoMatrix,
};
