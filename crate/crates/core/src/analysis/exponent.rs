//! Global and pointwise Hölder exponent estimates.

use super::leaders::{leaders, LeaderMode};
use crate::error::{domain, Error, Result};
use crate::group::GPoint;
use crate::par::{self, ExecPolicy};
use crate::synthesis::{per_scale_sup, CoefficientField};

pub const DEFAULT_WINDOW: (i64, i64) = (4, 16);
pub const MIN_SCALES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExponentMode {
    /// min over the last half of the window of −log₂ D_j / j
    Raw,
    /// slope of the lower convex envelope of −log₂ D_j − β log₂ j
    Fit { beta: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentEstimate {
    pub value: f64,
    /// (j, log₂ D_j); −∞ for a vanishing D_j
    pub samples: Vec<(i64, f64)>,
    pub residual: f64,
    pub mode: ExponentMode,
}

impl ExponentEstimate {
    pub fn from_samples(samples: Vec<(i64, f64)>, mode: ExponentMode) -> Result<Self> {
        if samples.len() < MIN_SCALES {
            return Err(Error::InsufficientData(format!(
                "need at least {MIN_SCALES} scales, got {}",
                samples.len()
            )));
        }
        let (value, residual) = match mode {
            ExponentMode::Raw => raw_statistic(&samples),
            ExponentMode::Fit { beta } => envelope_statistic(&samples, beta)?,
        };
        Ok(ExponentEstimate { value, samples, residual, mode })
    }

    /// The statistic recomputed from the stored samples.
    pub fn recompute(&self) -> Result<f64> {
        Ok(ExponentEstimate::from_samples(self.samples.clone(), self.mode)?.value)
    }
}

fn raw_statistic(samples: &[(i64, f64)]) -> (f64, f64) {
    let lo = samples.first().unwrap().0;
    let hi = samples.last().unwrap().0;
    let mid = lo + (hi - lo + 1) / 2;
    let ratios: Vec<f64> = samples
        .iter()
        .filter(|s| s.0 >= mid && s.0 > 0)
        .map(|&(j, l)| -l / j as f64)
        .collect();
    let v = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let finite: Vec<f64> = ratios.iter().copied().filter(|r| r.is_finite()).collect();
    let spread = if finite.is_empty() {
        0.0
    } else {
        finite.iter().copied().fold(f64::NEG_INFINITY, f64::max) - finite.iter().copied().fold(f64::INFINITY, f64::min)
    };
    (v, spread)
}

/// Lower convex hull of the points, in increasing x.
fn lower_hull(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut h: Vec<(f64, f64)> = vec![];
    for &p in pts {
        while h.len() >= 2 {
            let (a, b) = (h[h.len() - 2], h[h.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                h.pop();
            } else {
                break;
            }
        }
        h.push(p);
    }
    h
}

fn envelope_statistic(samples: &[(i64, f64)], beta: f64) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.1.is_finite())
        .map(|&(j, l)| (j as f64, -l - beta * (j.max(1) as f64).log2()))
        .collect();
    if pts.is_empty() {
        return Ok((f64::INFINITY, 0.0));
    }
    if pts.len() < 2 {
        return Err(Error::InsufficientData("a single non-zero scale admits no slope".into()));
    }
    let hull = lower_hull(&pts);
    let jbar = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let slopes: Vec<f64> = hull.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
    let mut value = *slopes.last().unwrap();
    for (i, w) in hull.windows(2).enumerate() {
        if w[0].0 < jbar && jbar < w[1].0 {
            value = slopes[i];
            break;
        }
        if w[1].0 == jbar {
            value = if i + 1 < slopes.len() { 0.5 * (slopes[i] + slopes[i + 1]) } else { slopes[i] };
            break;
        }
        if w[0].0 == jbar && i == 0 {
            value = slopes[0];
            break;
        }
    }
    // mean vertical gap between the points and the supporting line
    let anchor = hull.iter().min_by(|a, b| (a.0 - jbar).abs().total_cmp(&(b.0 - jbar).abs())).unwrap();
    let residual = pts.iter().map(|p| p.1 - (anchor.1 + value * (p.0 - anchor.0))).map(f64::abs).sum::<f64>() / pts.len() as f64;
    Ok((value, residual))
}

fn window_scales(window: (i64, i64)) -> Result<Vec<i64>> {
    let (lo, hi) = window;
    if lo < 0 || hi < lo {
        return domain(format!("bad scale window [{lo}, {hi}]"));
    }
    Ok((lo..=hi).collect())
}

/// Decay exponent of the per-scale suprema sup_{ε,k}|d^ε_{j,k}|.
pub fn global_exponent(field: &CoefficientField, window: (i64, i64), mode: ExponentMode) -> Result<ExponentEstimate> {
    let mut samples = vec![];
    for j in window_scales(window)? {
        samples.push((j, per_scale_sup(field, j)?.log2()));
    }
    ExponentEstimate::from_samples(samples, mode)
}

/// Decay exponent of the leaders D_j(f,x) over the window.
pub fn pointwise_exponent(
    field: &CoefficientField,
    x: &GPoint,
    window: (i64, i64),
    mode: ExponentMode,
    leader_mode: LeaderMode,
) -> Result<ExponentEstimate> {
    let scales = window_scales(window)?;
    if scales.len() < MIN_SCALES {
        return Err(Error::InsufficientData(format!("need at least {MIN_SCALES} scales, got {}", scales.len())));
    }
    let (_, jmax) = field.j_range();
    let mut samples = vec![];
    for j in scales {
        let cap = jmax.max(j);
        samples.push((j, leaders(field, x, j, cap, leader_mode)?.log2()));
    }
    ExponentEstimate::from_samples(samples, mode)
}

/// pointwise_exponent over many points, in input order.
pub fn pointwise_scan(
    field: &CoefficientField,
    points: &[GPoint],
    window: (i64, i64),
    mode: ExponentMode,
    leader_mode: LeaderMode,
    policy: ExecPolicy,
) -> Vec<Result<ExponentEstimate>> {
    par::map_items(policy, points, |x| pointwise_exponent(field, x, window, mode, leader_mode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::point_with_rate;
    use crate::synthesis::{besov_saturating_field, monofractal_round, power_field, BesovParams, Rule, Support};
    use proptest::prelude::*;

    #[test]
    fn power_field_exact() {
        let f = power_field(1.75, Support::All).unwrap();
        let e = global_exponent(&f, DEFAULT_WINDOW, ExponentMode::Raw).unwrap();
        assert_eq!(e.value, 1.75);
        assert_eq!(e.recompute().unwrap(), e.value);
        let e = global_exponent(&f, DEFAULT_WINDOW, ExponentMode::Fit { beta: 0.0 }).unwrap();
        assert!((e.value - 1.75).abs() < 1e-12);
    }

    #[test]
    fn zero_field_is_infinite() {
        let z = CoefficientField::zero();
        for mode in [ExponentMode::Raw, ExponentMode::Fit { beta: 1.0 }] {
            assert_eq!(global_exponent(&z, DEFAULT_WINDOW, mode).unwrap().value, f64::INFINITY);
            let e = pointwise_exponent(&z, &GPoint::new(0.1, 0.2, 0.3), (4, 10), mode, LeaderMode::Exact).unwrap();
            assert_eq!(e.value, f64::INFINITY);
        }
    }

    #[test]
    fn too_few_scales() {
        let z = CoefficientField::zero();
        let r = pointwise_exponent(&z, &GPoint::new(0.1, 0.2, 0.3), (4, 6), ExponentMode::Raw, LeaderMode::Exact);
        assert!(matches!(r, Err(Error::InsufficientData(_))));
    }

    #[test]
    fn saturating_field_global() {
        let p = BesovParams::new(2.0, 2.0, 2.0).unwrap();
        let f = besov_saturating_field(p);
        let e = global_exponent(&f, DEFAULT_WINDOW, ExponentMode::Fit { beta: p.beta() }).unwrap();
        assert!((e.value - p.critical()).abs() < 1e-9, "{}", e.value);
    }

    #[test]
    fn saturating_field_pointwise_law() {
        let p = BesovParams::new(2.0, 2.0, 2.0).unwrap();
        let f = besov_saturating_field(p);
        let mode = ExponentMode::Fit { beta: p.beta() };
        let origin = pointwise_exponent(&f, &GPoint::new(0.0, 0.0, 0.0), DEFAULT_WINDOW, mode, LeaderMode::Exact).unwrap();
        assert!(origin.value.abs() < 0.1, "{}", origin.value);
        let x = point_with_rate(2.0, 30).unwrap();
        let e = pointwise_exponent(&f, &x, DEFAULT_WINDOW, mode, LeaderMode::Exact).unwrap();
        assert!((e.value - 1.0).abs() < 0.15, "{}", e.value);
    }

    #[test]
    fn rounded_field_is_monofractal() {
        // base in C^1: the saturating field with s − Q/p = 1
        let p = BesovParams::new(3.0, 2.0, 2.0).unwrap();
        let r = monofractal_round(&besov_saturating_field(p), 1.0, 3).unwrap();
        let mode = ExponentMode::Fit { beta: 0.0 };
        let g = global_exponent(&r, DEFAULT_WINDOW, mode).unwrap();
        assert!((g.value - 1.0).abs() < 0.05, "{}", g.value);
        // raw mode carries the 2^{-N} offset as N/j
        let raw = global_exponent(&r, DEFAULT_WINDOW, ExponentMode::Raw).unwrap();
        assert!(raw.value > 1.1);
        let x = GPoint::new(0.37, 0.81, 0.23);
        let e = pointwise_exponent(&r, &x, DEFAULT_WINDOW, mode, LeaderMode::Exact).unwrap();
        assert!((e.value - 1.0).abs() < 0.05, "{}", e.value);
    }

    #[test]
    fn scan_is_policy_independent() {
        let p = BesovParams::new(2.0, 2.0, 2.0).unwrap();
        let f = besov_saturating_field(p);
        let pts: Vec<GPoint> = (0..8).map(|i| GPoint::new(i as f64 / 8.0, 0.3, 0.6)).collect();
        let mode = ExponentMode::Fit { beta: p.beta() };
        let a = pointwise_scan(&f, &pts, DEFAULT_WINDOW, mode, LeaderMode::Exact, ExecPolicy::Parallel);
        let b = pointwise_scan(&f, &pts, DEFAULT_WINDOW, mode, LeaderMode::Exact, ExecPolicy::Sequential);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.as_ref().unwrap(), y.as_ref().unwrap());
        }
    }

    #[test]
    fn left_equivariance() {
        let p = BesovParams::new(2.0, 2.0, 2.0).unwrap();
        let f = besov_saturating_field(p);
        let m = [1, 2, -3];
        let g = f.with_shift(m).unwrap();
        let mp = GPoint::new(1.0, 2.0, -3.0);
        let mode = ExponentMode::Fit { beta: p.beta() };
        for x in [GPoint::new(0.25, 0.5, 0.125), GPoint::new(0.6875, 0.3125, 0.9375)] {
            let a = pointwise_exponent(&f, &x, DEFAULT_WINDOW, mode, LeaderMode::Exact).unwrap();
            let b = pointwise_exponent(&g, &mp.prod(&x), DEFAULT_WINDOW, mode, LeaderMode::Exact).unwrap();
            assert_eq!(a.value, b.value);
        }
    }

    proptest! {
        #[test]
        fn scaling_leaves_global_exponent(c in 0.01f64..100.0) {
            let p = BesovParams::new(2.5, 2.0, 2.0).unwrap();
            let f = besov_saturating_field(p);
            let g = f.with_rule(Rule::Scaled { factor: c, base: Box::new(f.rule().clone()) });
            let mode = ExponentMode::Fit { beta: p.beta() };
            let a = global_exponent(&f, DEFAULT_WINDOW, mode).unwrap().value;
            let b = global_exponent(&g, DEFAULT_WINDOW, mode).unwrap().value;
            prop_assert!((a - b).abs() < 1e-9);
        }

        #[test]
        fn lower_hull_lies_below(ys in prop::collection::vec(-10f64..10.0, 4..12)) {
            let pts: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| (i as f64, y)).collect();
            let h = lower_hull(&pts);
            for w in h.windows(2) {
                let s = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                for p in &pts {
                    prop_assert!(p.1 >= w[0].1 + s * (p.0 - w[0].0) - 1e-9);
                }
            }
        }
    }
}
