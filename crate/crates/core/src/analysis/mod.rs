//! Regularity and spectrum estimates computed from coefficient fields.

pub mod counting;
pub mod exponent;
pub mod hausdorff;
pub mod leaders;
pub mod regime;
pub mod taylor;

pub use counting::{
    besov_spectrum_bound, coefficient_counting, count_above, counting_spectrum, default_h_grid, lemma_counting_check,
    SpectrumEstimate,
};
pub use exponent::{global_exponent, pointwise_exponent, pointwise_scan, ExponentEstimate, ExponentMode, DEFAULT_WINDOW};
pub use hausdorff::hausdorff_premeasure;
pub use leaders::{leaders, LeaderMode};
pub use regime::{two_regime_check, TwoRegime};
pub use taylor::{derivative_table, taylor_poly, taylor_remainder_slope, DerivTable, TaylorPoly};
