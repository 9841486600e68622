//! Point evaluation with a surrogate kernel (for plots only).

use super::field::{CoefficientField, EPS_COUNT};
use crate::error::{domain, Result};
use crate::group::GPoint;
use crate::lattice::index::{kmul, locate, DyadicIndex};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurrogateWavelet {
    pub r0: f64,
    pub c0: f64,
    pub moment_order: u32,
}

impl Default for SurrogateWavelet {
    fn default() -> Self {
        SurrogateWavelet { r0: 0.1, c0: 1.0, moment_order: 0 }
    }
}

impl SurrogateWavelet {
    pub fn new(r0: f64, c0: f64, moment_order: u32) -> Result<Self> {
        if !(r0 > 0.0 && r0.is_finite() && c0 > 0.0 && c0.is_finite()) {
            return domain("decay rate and amplitude must be positive");
        }
        Ok(SurrogateWavelet { r0, c0, moment_order })
    }

    /// Ψ^ε(y) = C₀ cos(π ε ‖y‖ / (4 r₀)) exp(−‖y‖/r₀)
    pub fn psi(&self, eps: u8, y: &GPoint) -> f64 {
        let n = y.norm();
        self.c0 * (PI * eps as f64 * n / (4.0 * self.r0)).cos() * (-n / self.r0).exp()
    }
}

/// Half-widths of the index window summed around locate(x, j).
const WIN_PQ: i64 = 4;
const WIN_R: i64 = 24;

/// Σ d^ε_{j,k} Ψ^ε(2^j ∘ (x_{j,k}^{-1} ∗ x)) over j ≤ j_cap and a window of k around x.
pub fn eval_function(field: &CoefficientField, x: &GPoint, wavelet: &SurrogateWavelet, j_cap: i64) -> Result<f64> {
    if !x.is_finite() {
        return domain("point must be finite");
    }
    let (lo, hi) = field.j_range();
    let mut total = 0.0;
    for j in lo..=hi.min(j_cap) {
        let k0 = locate(x, j).k;
        for dp in -WIN_PQ..=WIN_PQ {
            for dq in -WIN_PQ..=WIN_PQ {
                for dr in -WIN_R..=WIN_R {
                    let k = kmul(k0, [dp, dq, dr]);
                    if !field.in_support(j, k) {
                        continue;
                    }
                    let y = DyadicIndex::new(j, k).local(x);
                    let y = GPoint::new(y[0], y[1], y[2]);
                    for eps in 1..=EPS_COUNT {
                        let d = field.value(eps, j, k);
                        if d != 0.0 {
                            total += d * wavelet.psi(eps, &y);
                        }
                    }
                }
            }
        }
    }
    Ok(total)
}
