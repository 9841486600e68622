//! Direct check of |d_{j,k}| ≤ C 2^{−js}(1 + 2^j δ(x_{j,k}, x₀))^s near x₀.

use crate::error::{domain, Result};
use crate::group::GPoint;
use crate::lattice::index::{kmul, locate, pow2, DyadicIndex};
use crate::par::{self, ExecPolicy};
use crate::synthesis::besov::ols_slope;
use crate::synthesis::CoefficientField;

/// Sites farther than `reach`·2^{−j} from x₀ are not scanned.
pub const DEFAULT_REACH: f64 = 16.0;
pub const SLOPE_TOLERANCE: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub struct TwoRegime {
    pub holds: bool,
    /// smallest C valid at every scanned site
    pub fitted_c: f64,
    /// (j, C_j)
    pub per_scale: Vec<(i64, f64)>,
    /// OLS slope of log₂ C_j against j
    pub slope: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn two_regime_check(
    field: &CoefficientField,
    x0: &GPoint,
    s: f64,
    radius: f64,
    window: (i64, i64),
    beta: f64,
    reach: f64,
    policy: ExecPolicy,
) -> Result<TwoRegime> {
    if !(radius > 0.0) {
        return domain(format!("R must be positive, got {radius}"));
    }
    if !(reach >= 1.0) || !reach.is_finite() {
        return domain(format!("reach must be a finite number >= 1, got {reach}"));
    }
    let (lo, hi) = window;
    if lo < 1 || hi < lo || hi > field.j_range().1.max(lo) {
        return domain(format!("bad scale window [{lo}, {hi}]"));
    }
    let scales: Vec<i64> = (lo..=hi).collect();
    let per_scale: Vec<(i64, f64)> = par::map_items(policy, &scales, |&j| (j, scale_constant(field, x0, s, radius, j, beta, reach)));
    let pts: Vec<(f64, f64)> = per_scale.iter().filter(|c| c.1 > 0.0).map(|&(j, c)| (j as f64, c.log2())).collect();
    let slope = if pts.len() >= 2 { ols_slope(&pts) } else { 0.0 };
    let fitted_c = per_scale.iter().map(|c| c.1).fold(0.0, f64::max);
    Ok(TwoRegime { holds: slope <= SLOPE_TOLERANCE, fitted_c, per_scale, slope })
}

fn scale_constant(field: &CoefficientField, x0: &GPoint, s: f64, radius: f64, j: i64, beta: f64, reach: f64) -> f64 {
    let rho = radius.min(reach * pow2(-j));
    let w = (rho * pow2(j)).ceil() as i64 + 1;
    let wr = 3 * w * w + 2;
    let k0 = locate(x0, j).k;
    let scale = pow2(-j);
    let norm = (-(j as f64) * s).exp2() * (j.max(1) as f64).powf(-beta);
    let mut c: f64 = 0.0;
    for dp in -w..=w {
        for dq in -w..=w {
            for dr in -wr..=wr {
                let k = kmul(k0, [dp, dq, dr]);
                if !field.in_support(j, k) {
                    continue;
                }
                let v = field.max_abs(j, k);
                if v == 0.0 {
                    continue;
                }
                let delta = x0.dist(&DyadicIndex::new(j, k).point());
                if delta >= radius || delta > rho {
                    continue;
                }
                c = c.max(v / (norm * (1.0 + delta / scale).powf(s)));
            }
        }
    }
    c
}
