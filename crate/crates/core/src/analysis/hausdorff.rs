//! Dyadic-cover upper estimate of the Hausdorff pre-measure.

use std::collections::HashSet;

use crate::error::{domain, Result};
use crate::group::GPoint;
use crate::lattice::index::{locate, MAX_SCALE};
use crate::lattice::neighbors::cube_diameter;

/// Smallest j with 13^{1/4} 2^{−j} ≤ η.
pub fn cover_scale(eta: f64) -> Result<i64> {
    if !(eta > 0.0) || !eta.is_finite() {
        return domain(format!("eta must be positive and finite, got {eta}"));
    }
    let j = (cube_diameter(0) / eta).log2().ceil() as i64;
    let j = if cube_diameter(j - 1) <= eta { j - 1 } else { j };
    if j > MAX_SCALE {
        return domain(format!("eta = {eta} needs scale {j} > {MAX_SCALE}"));
    }
    Ok(j.max(-MAX_SCALE))
}

/// Σ over occupied scale-j cubes of diam^s, j = cover_scale(η).
pub fn hausdorff_premeasure(points: &[GPoint], s: f64, eta: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return domain(format!("exponent must be >= 0, got {s}"));
    }
    let j = cover_scale(eta)?;
    if points.iter().any(|x| !x.is_finite()) {
        return domain("points must be finite");
    }
    let cells: HashSet<[i64; 3]> = points.iter().map(|x| locate(x, j).k).collect();
    Ok(cells.len() as f64 * cube_diameter(j).powf(s))
}
