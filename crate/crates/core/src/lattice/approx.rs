//! Dyadic approximation rates.

use super::index::{depth, kmul, locate, DyadicIndex, K3};
use crate::error::{domain, Result};
use crate::group::{GPoint, QF};
use crate::par::{self, ExecPolicy};

/// sup over x of min_k δ(x, x_{0,k}); attained at (½,½,½).
pub const COVERING_CONSTANT: f64 = 0.840_896_415_253_714_6; // 2^{-1/4}

/// Grid estimate of the covering constant over [0,1)³ (n points per axis).
pub fn covering_constant_oracle(n: u64, policy: ExecPolicy) -> f64 {
    let total = n * n * n;
    let win: Vec<K3> = (-1..=2)
        .flat_map(|a| (-1..=2).flat_map(move |b| (-4..=5).map(move |c| [a, b, c])))
        .collect();
    par::map_reduce(
        policy,
        total,
        4096,
        0.0f64,
        |range| {
            let mut best: f64 = 0.0;
            for t in range {
                let x = GPoint::new(
                    (t / (n * n)) as f64 / n as f64,
                    ((t / n) % n) as f64 / n as f64,
                    (t % n) as f64 / n as f64,
                );
                let m = win
                    .iter()
                    .map(|k| x.dist(&GPoint::new(k[0] as f64, k[1] as f64, k[2] as f64)))
                    .fold(f64::INFINITY, f64::min);
                best = best.max(m);
            }
            best
        },
        f64::max,
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScaleApprox {
    pub j: i64,
    /// min distance to a scale-j dyadic point in the window
    pub min_dist: f64,
    /// irreducible depth of the minimiser
    pub depth: i64,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxRate {
    pub per_scale: Vec<ScaleApprox>,
    pub xi_hat: f64,
}

pub fn approx_rate(x: &GPoint, scales: &[i64], window: i64) -> Result<ApproxRate> {
    if window < 1 {
        return domain(format!("window must be >= 1, got {window}"));
    }
    if scales.is_empty() {
        return domain("no scales given");
    }
    if scales.windows(2).any(|w| w[0] >= w[1]) {
        return domain("scales must be strictly increasing");
    }
    let mut per_scale = Vec::with_capacity(scales.len());
    for &j in scales {
        let k0 = locate(x, j).k;
        let mut best = (f64::INFINITY, i64::MAX);
        for dp in -window..=window {
            for dq in -window..=window {
                for dr in -2 * window..=2 * window {
                    let k = kmul(k0, [dp, dq, dr]);
                    let d = x.dist(&DyadicIndex::new(j, k).point());
                    if d < best.0 || (d == best.0 && depth(j, k) < best.1) {
                        best = (d, depth(j, k));
                    }
                }
            }
        }
        let (m, dep) = best;
        let rate = if m == 0.0 {
            f64::INFINITY
        } else {
            -(m / COVERING_CONSTANT).log2() / j.max(1) as f64
        };
        per_scale.push(ScaleApprox { j, min_dist: m, depth: dep, rate });
    }
    let xi_hat = per_scale.iter().map(|s| s.rate).fold(f64::NEG_INFINITY, f64::max);
    Ok(ApproxRate { per_scale, xi_hat })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateConstruction {
    pub point: GPoint,
    /// exponents a_m of the terms kept
    pub exponents: Vec<i64>,
}

impl RateConstruction {
    /// Scales a_m whose successor was produced by the ⌈ξ a_m⌉ rule, i.e. the
    /// scales where the construction plants an unusually good approximation.
    pub fn rate_scales(&self, xi: f64) -> Vec<i64> {
        self.exponents
            .windows(2)
            .filter(|w| (xi * w[0] as f64 - 1e-9).ceil() as i64 >= w[0] + 2 && w[1] == (xi * w[0] as f64 - 1e-9).ceil() as i64)
            .map(|w| w[0])
            .collect()
    }
}

/// Binary exponents carried exactly by the p-coordinate (leading term 2^{-2}).
const MAX_EXPONENT: i64 = 54;

/// p = Σ 2^{-a_m}, a₁ = 2, a_{m+1} = max(⌈ξ a_m⌉, a_m + 2); q = r = 0.
/// ξ = ∞ gives the dyadic point (1/4, 0, 0).
pub fn rate_construction(xi: f64, depth: usize) -> Result<RateConstruction> {
    if xi.is_nan() || xi < 1.0 {
        return domain(format!("rate must be >= 1, got {xi}"));
    }
    if depth < 2 {
        return domain("depth must be >= 2");
    }
    if xi.is_infinite() {
        return Ok(RateConstruction { point: GPoint::new(0.25, 0.0, 0.0), exponents: vec![2] });
    }
    let mut a = vec![2i64];
    while a.len() < depth {
        let last = *a.last().unwrap();
        let next = ((xi * last as f64 - 1e-9).ceil() as i64).max(last + 2);
        if next > MAX_EXPONENT {
            break;
        }
        a.push(next);
    }
    let p = a.iter().map(|&e| super::index::pow2(-e)).sum();
    Ok(RateConstruction { point: GPoint::new(p, 0.0, 0.0), exponents: a })
}

pub fn point_with_rate(xi: f64, depth: usize) -> Result<GPoint> {
    rate_construction(xi, depth).map(|c| c.point)
}

/// Q/ξ
pub fn rate_set_dimension(xi: f64) -> Result<f64> {
    if xi.is_nan() || xi < 1.0 {
        return domain(format!("rate must be >= 1, got {xi}"));
    }
    Ok(QF / xi)
}
