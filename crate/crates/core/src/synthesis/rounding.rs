//! The non-zero integer part rounding that pins every coefficient to 2^{-js}.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::field::{round_value, CoefficientField, Rule, Support, EPS_COUNT};
use crate::error::{domain, Error, Result};
use crate::lattice::index::K3;
use crate::numeric::Const;
use crate::par::{self, ExecPolicy};

/// d ↦ 2^{−js−N} E*(2^{js+N} d) on every coefficient of the support.
pub fn monofractal_round(field: &CoefficientField, s: f64, n: u32) -> Result<CoefficientField> {
    if n < 1 {
        return domain("N must be >= 1");
    }
    if !s.is_finite() {
        return domain(format!("s must be finite, got {s}"));
    }
    let mut out = field.with_rule(Rule::Rounded { base: Box::new(field.rule().clone()), s, n });
    for (&(_, j, _), v) in out.overlay_mut().iter_mut() {
        *v = Const::Real(round_value(v.to_f64(), j, s, n));
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SandwichReport {
    pub checked: u64,
    /// 2^{js}|out − in| > 2^{−N}
    pub upper_violations: u64,
    /// |out| < 2^{−js−N}
    pub lower_violations: u64,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.checked > 0 && self.upper_violations == 0 && self.lower_violations == 0
    }

    fn merge(mut self, o: SandwichReport) -> SandwichReport {
        self.checked += o.checked;
        self.upper_violations += o.upper_violations;
        self.lower_violations += o.lower_violations;
        self
    }
}

fn pow2_big(e: i64) -> BigRational {
    let one = BigInt::from(1);
    if e >= 0 {
        BigRational::from_integer(one << e as usize)
    } else {
        BigRational::new(one, BigInt::from(1) << (-e) as usize)
    }
}

/// Both bounds for one pair, in exact rational arithmetic (integral js).
fn check_pair(input: f64, output: f64, js: i64, n: u32) -> (bool, bool) {
    let (Some(a), Some(b)) = (BigRational::from_float(input), BigRational::from_float(output)) else {
        return (false, false);
    };
    let upper = (&b - &a).abs() * pow2_big(js) <= pow2_big(-(n as i64));
    let lower = !b.is_zero() && b.abs() >= pow2_big(-js - n as i64);
    (upper, lower)
}

/// Verify the sandwich bounds exactly on every ℒ₀ coefficient at the scales given.
/// Requires j·s to be an integer so that 2^{js} is exact.
pub fn sandwich_check(
    input: &CoefficientField,
    output: &CoefficientField,
    s: f64,
    n: u32,
    scales: &[i64],
    policy: ExecPolicy,
) -> Result<SandwichReport> {
    if input.support() != Support::L0 {
        return Err(Error::Unsupported("sandwich check enumerates the ℒ₀ support".into()));
    }
    let mut rep = SandwichReport::default();
    for &j in scales {
        if !(0..=6).contains(&j) {
            return domain(format!("sandwich enumeration limited to 0 <= j <= 6, got {j}"));
        }
        let js = j as f64 * s;
        if js.fract() != 0.0 {
            return domain(format!("j·s = {js} is not an integer"));
        }
        if !output.in_range(j) {
            continue;
        }
        let js = js as i64;
        let m = 1i64 << j;
        let total = (m * m * m * m) as u64;
        let parts = par::map_chunks(policy, total, 1 << 12, |range| {
            let mut r = SandwichReport::default();
            for t in range {
                let t = t as i64;
                let k0: K3 = [t / (m * m * m), (t / (m * m)) % m, t % (m * m)];
                let k = output.apply_shift(j, k0);
                for eps in 1..=EPS_COUNT {
                    let (up, lo) = check_pair(input.value(eps, j, k), output.value(eps, j, k), js, n);
                    r.checked += 1;
                    r.upper_violations += u64::from(!up);
                    r.lower_violations += u64::from(!lo);
                }
            }
            r
        });
        rep = rep.merge(par::tree_reduce(parts, SandwichReport::default(), SandwichReport::merge));
    }
    Ok(rep)
}

/// Same check on every depth class at every scale of the range (no enumeration).
pub fn sandwich_check_classes(input: &CoefficientField, output: &CoefficientField, s: f64, n: u32) -> Result<SandwichReport> {
    let mut rep = SandwichReport::default();
    for j in output.scales() {
        let js = j as f64 * s;
        if js.fract() != 0.0 {
            return domain(format!("j·s = {js} is not an integer"));
        }
        for dep in 0..=j {
            let k = super::besov::representative(output, j, dep);
            let (up, lo) = check_pair(input.rule_value(j, k), output.rule_value(j, k), js as i64, n);
            rep.checked += 1;
            rep.upper_violations += u64::from(!up);
            rep.lower_violations += u64::from(!lo);
        }
        for k0 in output.overlay_sites(j) {
            let k = output.apply_shift(j, k0);
            for eps in 1..=EPS_COUNT {
                let (up, lo) = check_pair(input.value(eps, j, k), output.value(eps, j, k), js as i64, n);
                rep.checked += 1;
                rep.upper_violations += u64::from(!up);
                rep.lower_violations += u64::from(!lo);
            }
        }
    }
    Ok(rep)
}
