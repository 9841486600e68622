//! Coefficient fields: the Besov-saturating field, monofractal rounding,
//! sequence norms and file I/O.

pub mod besov;
pub mod field;
pub mod format;
pub mod rounding;
pub mod wavelet;

pub use besov::{besov_seq_norm, empirical_c0, holder_sup_norm, per_scale_sup, BesovNorm, HolderSup};
pub use field::{besov_saturating_field, e_star, power_field, BesovParams, CoefficientField, Rule, Support, EPS_COUNT};
pub use format::{parse_field, write_field, FieldFile};
pub use rounding::{monofractal_round, sandwich_check, sandwich_check_classes, SandwichReport};
pub use wavelet::{eval_function, SurrogateWavelet};
