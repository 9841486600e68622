//! Multifractal analysis on the Heisenberg group.
//!
//! * [`group`]: group law, dilations, gauge norm, horizontal derivatives.
//! * [`carnot`]: general stratified groups from structure constants.
//! * [`lattice`]: dyadic points and cubes, neighbourhoods, irreducibility, rates.
//! * [`synthesis`]: wavelet-coefficient fields and sequence norms.
//! * [`analysis`]: exponents, leaders, counting spectra, Taylor checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod carnot;
pub mod error;
pub mod group;
pub mod lattice;
pub mod numeric;
pub mod par;
pub mod synthesis;

pub use error::{Error, Result};
pub use group::GPoint;
pub use par::ExecPolicy;
