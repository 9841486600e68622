use std::collections::BTreeMap;

use crate::error::{domain, Result};
use crate::group::QF;
use crate::lattice::index::{depth, in_l0, kinv, kmul, lift, K3, MAX_SCALE};
use crate::numeric::Const;

/// Number of wavelets ε on the Heisenberg group (2^Q − 1).
pub const EPS_COUNT: u8 = 15;

/// Largest allowed shift component; keeps shifted indices inside i64 up to MAX_SCALE.
pub const MAX_SHIFT: i64 = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesovParams {
    pub s: f64,
    pub p: f64,
    /// may be +∞
    pub q: f64,
}

impl BesovParams {
    pub fn new(s: f64, p: f64, q: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return domain(format!("p must lie in [1, inf), got {p}"));
        }
        if q.is_nan() || q < 1.0 {
            return domain(format!("q must lie in [1, inf], got {q}"));
        }
        // the boundary s = Q/p is admitted: the saturating field is still defined there
        if !s.is_finite() || s < QF / p {
            return domain(format!("s must be at least Q/p = {}, got s = {s}", QF / p));
        }
        Ok(BesovParams { s, p, q })
    }

    /// β = 1/p + 2/q
    pub fn beta(&self) -> f64 {
        1.0 / self.p + if self.q.is_infinite() { 0.0 } else { 2.0 / self.q }
    }

    /// s − Q/p
    pub fn critical(&self) -> f64 {
        self.s - QF / self.p
    }

    /// p(h − s + Q/p)
    pub fn linear_spectrum(&self, h: f64) -> f64 {
        self.p * (h - self.critical())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    /// x_{j,k} ∈ [0,1)³
    L0,
    All,
}

/// Procedural coefficient rule. Every built-in rule depends on k only through
/// the irreducible depth J and is identical across ε.
#[derive(Clone, Debug, PartialEq)]
pub enum Rule {
    Zero,
    /// 2^{−j(s−Q/p) − J·Q/p} / j^β for j ≥ 1
    BesovSaturating { params: BesovParams, beta: f64 },
    /// 2^{−js}
    Power { s: f64 },
    /// 2^{−js−N} E*(2^{js+N} · base)
    Rounded { base: Box<Rule>, s: f64, n: u32 },
    Scaled { factor: f64, base: Box<Rule> },
}

/// Non-zero integer part: 1 on [0,2), floor elsewhere.
pub fn e_star(x: f64) -> f64 {
    if (0.0..2.0).contains(&x) {
        1.0
    } else {
        x.floor()
    }
}

impl Rule {
    pub fn besov_saturating(params: BesovParams) -> Rule {
        Rule::BesovSaturating { params, beta: params.beta() }
    }

    /// Value at scale j for an index of irreducible depth `dep`.
    pub fn value_at_depth(&self, j: i64, dep: i64) -> f64 {
        match self {
            Rule::Zero => 0.0,
            Rule::BesovSaturating { params, beta } => {
                if j < 1 {
                    return 0.0;
                }
                let e = -(j as f64) * params.critical() - dep as f64 * QF / params.p;
                e.exp2() / (j as f64).powf(*beta)
            }
            Rule::Power { s } => (-(j as f64) * s).exp2(),
            Rule::Rounded { base, s, n } => round_value(base.value_at_depth(j, dep), j, *s, *n),
            Rule::Scaled { factor, base } => factor * base.value_at_depth(j, dep),
        }
    }

    pub fn value(&self, _eps: u8, j: i64, k: K3) -> f64 {
        match self {
            Rule::Zero => 0.0,
            Rule::Power { s } => (-(j as f64) * s).exp2(),
            _ => self.value_at_depth(j, depth(j, k)),
        }
    }

    /// |value| is nonincreasing in the depth J.
    pub fn depth_monotone(&self) -> bool {
        match self {
            Rule::Zero | Rule::Power { .. } | Rule::BesovSaturating { .. } => true,
            // E* is nondecreasing and the saturating rule is nonnegative
            Rule::Rounded { base, .. } => base.depth_monotone() && base.nonnegative(),
            Rule::Scaled { base, .. } => base.depth_monotone(),
        }
    }

    fn nonnegative(&self) -> bool {
        match self {
            Rule::Zero | Rule::Power { .. } | Rule::BesovSaturating { .. } | Rule::Rounded { .. } => true,
            Rule::Scaled { factor, base } => *factor >= 0.0 && base.nonnegative(),
        }
    }

    /// False when β was overridden away from 1/p + 2/q.
    pub fn conforming(&self) -> bool {
        match self {
            Rule::BesovSaturating { params, beta } => *beta == params.beta(),
            Rule::Rounded { base, .. } | Rule::Scaled { base, .. } => base.conforming(),
            _ => true,
        }
    }
}

pub(crate) fn round_value(v: f64, j: i64, s: f64, n: u32) -> f64 {
    let e = j as f64 * s + n as f64;
    e_star(v * e.exp2()) * (-e).exp2()
}

/// d^ε_{j,k} as a rule plus a sparse exact overlay.
///
/// Overlay keys and the rule are expressed in unshifted coordinates; a shift m
/// moves every coefficient from k to m_j ∗ k where m_j is m lifted to scale j.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientField {
    rule: Rule,
    support: Support,
    j_min: i64,
    j_max: i64,
    shift: K3,
    overlay: BTreeMap<(u8, i64, K3), Const>,
}

impl CoefficientField {
    pub fn new(rule: Rule, support: Support, j_min: i64, j_max: i64) -> Result<Self> {
        if j_min < 0 || j_max > MAX_SCALE || j_min > j_max {
            return domain(format!("scale range [{j_min}, {j_max}] must sit inside [0, {MAX_SCALE}]"));
        }
        Ok(CoefficientField { rule, support, j_min, j_max, shift: [0, 0, 0], overlay: BTreeMap::new() })
    }

    pub fn zero() -> Self {
        CoefficientField::new(Rule::Zero, Support::L0, 0, MAX_SCALE).unwrap()
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn j_range(&self) -> (i64, i64) {
        (self.j_min, self.j_max)
    }

    pub fn shift(&self) -> K3 {
        self.shift
    }

    pub fn overlay(&self) -> &BTreeMap<(u8, i64, K3), Const> {
        &self.overlay
    }

    pub fn depth_monotone(&self) -> bool {
        self.rule.depth_monotone()
    }

    pub fn conforming(&self) -> bool {
        self.rule.conforming()
    }

    /// Same field translated by m (composes with any existing shift).
    pub fn with_shift(&self, m: K3) -> Result<Self> {
        let total = kmul(m, self.shift);
        if total.iter().any(|v| v.abs() > MAX_SHIFT) {
            return domain(format!("shift components must stay within ±{MAX_SHIFT}"));
        }
        let mut out = self.clone();
        out.shift = total;
        Ok(out)
    }

    pub fn with_rule(&self, rule: Rule) -> Self {
        let mut out = self.clone();
        out.rule = rule;
        out
    }

    pub fn set_overlay(&mut self, eps: u8, j: i64, k: K3, value: Const) -> Result<()> {
        if eps == 0 || eps > EPS_COUNT {
            return domain(format!("ε must lie in 1..={EPS_COUNT}, got {eps}"));
        }
        if j < self.j_min || j > self.j_max {
            return domain(format!("overlay scale {j} outside [{}, {}]", self.j_min, self.j_max));
        }
        self.overlay.insert((eps, j, k), value);
        Ok(())
    }

    pub(crate) fn overlay_mut(&mut self) -> &mut BTreeMap<(u8, i64, K3), Const> {
        &mut self.overlay
    }

    /// Unshifted index of the shifted site k at scale j.
    pub fn unshift(&self, j: i64, k: K3) -> K3 {
        if self.shift == [0, 0, 0] {
            k
        } else {
            kmul(kinv(lift(self.shift, j)), k)
        }
    }

    /// Shifted site of the unshifted index k0.
    pub fn apply_shift(&self, j: i64, k0: K3) -> K3 {
        if self.shift == [0, 0, 0] {
            k0
        } else {
            kmul(lift(self.shift, j), k0)
        }
    }

    pub fn in_range(&self, j: i64) -> bool {
        (self.j_min..=self.j_max).contains(&j)
    }

    fn support_has(&self, j: i64, k0: K3) -> bool {
        match self.support {
            Support::All => true,
            Support::L0 => in_l0(j, k0),
        }
    }

    /// Whether (j,k) lies in the support and scale range.
    pub fn in_support(&self, j: i64, k: K3) -> bool {
        self.in_range(j) && self.support_has(j, self.unshift(j, k))
    }

    pub fn value(&self, eps: u8, j: i64, k: K3) -> f64 {
        if eps == 0 || eps > EPS_COUNT || !self.in_range(j) {
            return 0.0;
        }
        let k0 = self.unshift(j, k);
        if !self.support_has(j, k0) {
            return 0.0;
        }
        match self.overlay.get(&(eps, j, k0)) {
            Some(c) => c.to_f64(),
            None => self.rule.value(eps, j, k0),
        }
    }

    /// Rule value ignoring the overlay.
    pub fn rule_value(&self, j: i64, k: K3) -> f64 {
        if !self.in_range(j) {
            return 0.0;
        }
        let k0 = self.unshift(j, k);
        if !self.support_has(j, k0) {
            return 0.0;
        }
        self.rule.value(1, j, k0)
    }

    /// max_ε |d^ε_{j,k}|
    pub fn max_abs(&self, j: i64, k: K3) -> f64 {
        if self.overlay.is_empty() {
            return self.rule_value(j, k).abs();
        }
        (1..=EPS_COUNT).map(|e| self.value(e, j, k).abs()).fold(0.0, f64::max)
    }

    /// Distinct unshifted sites carrying overlay entries at scale j.
    pub fn overlay_sites(&self, j: i64) -> Vec<K3> {
        let mut v: Vec<K3> = self.overlay.keys().filter(|(_, jj, _)| *jj == j).map(|&(_, _, k)| k).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Scales of the range that carry a possibly non-zero coefficient.
    pub fn scales(&self) -> std::ops::RangeInclusive<i64> {
        self.j_min..=self.j_max
    }

    /// Some overlay entry has smaller magnitude than the rule beneath it.
    pub fn overlay_lowers_rule(&self) -> bool {
        self.overlay.iter().any(|(&(_, j, k0), c)| {
            self.support_has(j, k0) && c.to_f64().abs() < self.rule.value(1, j, k0).abs()
        })
    }
}

/// 2^{−j(s−Q/p)−JQ/p}/j^β on ℒ₀, j ∈ [1, MAX_SCALE].
pub fn besov_saturating_field(params: BesovParams) -> CoefficientField {
    CoefficientField::new(Rule::besov_saturating(params), Support::L0, 1, MAX_SCALE).unwrap()
}

/// d = 2^{−js} on every site of every scale in range.
pub fn power_field(s: f64, support: Support) -> Result<CoefficientField> {
    if !s.is_finite() {
        return domain(format!("exponent must be finite, got {s}"));
    }
    CoefficientField::new(Rule::Power { s }, support, 0, MAX_SCALE)
}
