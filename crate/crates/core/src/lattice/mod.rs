//! Anisotropic dyadic lattice: points, cubes, neighbourhoods, depth and rates.

pub mod approx;
pub mod index;
pub mod neighbors;

pub use approx::{approx_rate, point_with_rate, rate_construction, rate_set_dimension, ApproxRate, COVERING_CONSTANT};
pub use index::{
    count_irreducible, count_l0, depth, dyadic_point, in_l0, irreducible, kinv, kmul, lift, locate, pow2, DyadicIndex, K3,
    MAX_SCALE,
};
pub use neighbors::{ball_overlap_set, cube_diameter, neighborhood, PRINTED_XI, XI};
