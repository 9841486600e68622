//! Coefficient counting N_f(j,h) and the counting spectrum.

use std::collections::BTreeMap;

use crate::error::{domain, Error, Result};
use crate::group::QF;
use crate::lattice::index::{count_irreducible, depth, K3};
use crate::par::{self, ExecPolicy};
use crate::synthesis::besov::ols_slope;
use crate::synthesis::{besov_seq_norm, BesovParams, CoefficientField, Support, EPS_COUNT};

/// #{k : max_ε |d^ε_{j,k}| ≥ threshold}
pub fn count_above(field: &CoefficientField, j: i64, threshold: f64) -> Result<u128> {
    if !field.in_range(j) {
        return Ok(0);
    }
    if !field.depth_monotone() {
        if j <= 6 {
            return count_above_brute(field, j, threshold, ExecPolicy::Parallel);
        }
        return Err(Error::Unsupported("counting beyond j = 6 needs a depth-monotone rule".into()));
    }
    let rule = field.rule();
    let clears = |v: f64| v.abs() >= threshold;
    let mut n: u128 = 0;
    for dep in 0..=j {
        if clears(rule.value_at_depth(j, dep)) {
            if field.support() == Support::All {
                return Err(Error::Unsupported("count is infinite on the full lattice".into()));
            }
            n += count_irreducible(dep)?;
        }
    }
    // overlay sites: replace the rule verdict by the site's verdict
    let mut adj: i128 = 0;
    for k0 in field.overlay_sites(j) {
        let k = field.apply_shift(j, k0);
        if !field.in_support(j, k) {
            continue;
        }
        let with = clears(field.max_abs(j, k));
        let without = clears(rule.value_at_depth(j, depth(j, k0)));
        adj += i128::from(with) - i128::from(without);
    }
    Ok((n as i128 + adj) as u128)
}

/// #N_f(j,h) with the threshold C₀ 2^{−jh}.
pub fn coefficient_counting(field: &CoefficientField, j: i64, h: f64, c0: f64) -> Result<u128> {
    if !(c0 > 0.0) {
        return domain(format!("threshold constant must be positive, got {c0}"));
    }
    count_above(field, j, c0 * (-(j as f64) * h).exp2())
}

/// Enumeration over ℒ₀(j), j ≤ 6.
pub fn count_above_brute(field: &CoefficientField, j: i64, threshold: f64, policy: ExecPolicy) -> Result<u128> {
    if !(0..=6).contains(&j) {
        return domain(format!("brute counting limited to 0 <= j <= 6, got {j}"));
    }
    if field.support() != Support::L0 {
        return Err(Error::Unsupported("brute counting needs the ℒ₀ support".into()));
    }
    if !field.in_range(j) {
        return Ok(0);
    }
    let n = 1i64 << j;
    let total = (n * n * n * n) as u64;
    Ok(par::map_reduce(
        policy,
        total,
        par::DEFAULT_CHUNK,
        0u128,
        |range| {
            let mut c = 0u128;
            for t in range {
                let t = t as i64;
                let k0: K3 = [t / (n * n * n), (t / (n * n)) % n, t % (n * n)];
                let k = field.apply_shift(j, k0);
                if (1..=EPS_COUNT).any(|e| field.value(e, j, k).abs() >= threshold) {
                    c += 1;
                }
            }
            c
        },
        |a, b| a + b,
    ))
}

/// min(Q, p(h − s + Q/p)), −∞ below s − Q/p.
pub fn besov_spectrum_bound(h: f64, params: &BesovParams) -> f64 {
    if h < params.critical() {
        f64::NEG_INFINITY
    } else {
        QF.min(params.linear_spectrum(h))
    }
}

/// h_i = s − Q/p + i (Q/p) / (n+1), i = 1..=n: n points inside (s − Q/p, s).
pub fn default_h_grid(params: &BesovParams, n: usize) -> Vec<f64> {
    let w = QF / params.p;
    (1..=n).map(|i| params.critical() + w * i as f64 / (n + 1) as f64).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEstimate {
    pub h: Vec<f64>,
    pub d_hat: Vec<f64>,
    pub bound: Vec<f64>,
    pub params: BesovParams,
    pub c0: f64,
    /// exponent of the j^{−β} factor in the threshold
    pub beta: f64,
    /// counts[i] = (j, #N) for h[i]
    pub counts: Vec<Vec<(i64, u128)>>,
}

impl SpectrumEstimate {
    /// max |d̂(h) − p(h − s + Q/p)| over grid points with a finite estimate.
    pub fn max_deviation(&self) -> f64 {
        self.h
            .iter()
            .zip(&self.d_hat)
            .filter(|(_, d)| d.is_finite())
            .map(|(&h, &d)| (d - self.params.linear_spectrum(h)).abs())
            .fold(0.0, f64::max)
    }
}

/// Slope of log₂ #N_f(j,h) against j, with threshold C₀ 2^{−jh} j^{−β}.
pub fn counting_spectrum(
    field: &CoefficientField,
    params: &BesovParams,
    window: (i64, i64),
    h_grid: &[f64],
    c0: f64,
    beta: f64,
) -> Result<SpectrumEstimate> {
    let (lo, hi) = window;
    if lo < 1 || hi < lo {
        return domain(format!("bad scale window [{lo}, {hi}]"));
    }
    if !(c0 > 0.0) {
        return domain(format!("threshold constant must be positive, got {c0}"));
    }
    let mut d_hat = vec![];
    let mut counts = vec![];
    for &h in h_grid {
        let mut row = vec![];
        for j in lo..=hi {
            let thr = c0 * (-(j as f64) * h).exp2() * (j as f64).powf(-beta);
            row.push((j, count_above(field, j, thr)?));
        }
        let pts: Vec<(f64, f64)> = row.iter().filter(|c| c.1 > 0).map(|&(j, c)| (j as f64, (c as f64).log2())).collect();
        d_hat.push(if pts.len() < 2 { f64::NEG_INFINITY } else { ols_slope(&pts) });
        counts.push(row);
    }
    let bound = h_grid.iter().map(|&h| besov_spectrum_bound(h, params)).collect();
    Ok(SpectrumEstimate { h: h_grid.to_vec(), d_hat, bound, params: *params, c0, beta, counts })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LemmaViolation {
    pub j: i64,
    pub h: f64,
    pub count: u128,
    pub bound: f64,
}

/// #N_f(j,h) ≤ (a_j/C₀)^p 2^{jp(h−s+Q/p)} at every (j,h), plain threshold C₀ 2^{−jh}.
pub fn lemma_counting_check(
    field: &CoefficientField,
    params: &BesovParams,
    window: (i64, i64),
    h_grid: &[f64],
    c0: f64,
) -> Result<Vec<LemmaViolation>> {
    let norm = besov_seq_norm(field, params)?;
    let a: BTreeMap<i64, f64> = norm.a.into_iter().collect();
    let mut out = vec![];
    for &h in h_grid {
        for j in window.0..=window.1 {
            let count = coefficient_counting(field, j, h, c0)?;
            let aj = a.get(&j).copied().unwrap_or(0.0);
            let bound = (aj / c0).powf(params.p) * (j as f64 * params.linear_spectrum(h)).exp2();
            // relative slack for the floating-point evaluation of the bound
            if count as f64 > bound * (1.0 + 1e-9) {
                out.push(LemmaViolation { j, h, count, bound });
            }
        }
    }
    Ok(out)
}
