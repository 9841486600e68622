//! Sequence-space norms and per-scale suprema.

use super::field::{BesovParams, CoefficientField, Support, EPS_COUNT};
use crate::error::{domain, Error, Result};
use crate::group::QF;
use crate::lattice::index::{count_irreducible, depth, depth_representative, K3};
use crate::par::{self, ExecPolicy, KahanSum};

#[derive(Clone, Debug, PartialEq)]
pub struct BesovNorm {
    /// (j, a_j)
    pub a: Vec<(i64, f64)>,
    /// ℓ^q norm of (a_j)
    pub aggregate: f64,
}

fn lq(values: impl Iterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        values.fold(0.0, f64::max)
    } else {
        let mut acc = KahanSum::default();
        for v in values {
            acc.add(v.powf(q));
        }
        acc.value().powf(1.0 / q)
    }
}

/// Σ_{ε,k} |d^ε_{j,k}|^p at scale j via the depth-class decomposition plus
/// overlay corrections.
fn closed_form_power_sum(field: &CoefficientField, j: i64, p: f64) -> Result<f64> {
    if !field.in_range(j) {
        return Ok(0.0);
    }
    let rule = field.rule();
    let mut acc = KahanSum::default();
    if field.support() == Support::All {
        if (0..=j).any(|dep| rule.value_at_depth(j, dep) != 0.0) {
            return Err(Error::Unsupported("rule is non-zero on an unbounded support".into()));
        }
    } else {
        for dep in 0..=j {
            let v = rule.value_at_depth(j, dep).abs();
            if v != 0.0 {
                acc.add(count_irreducible(dep)? as f64 * EPS_COUNT as f64 * v.powf(p));
            }
        }
    }
    for k0 in field.overlay_sites(j) {
        let k = field.apply_shift(j, k0);
        if !field.in_support(j, k) {
            continue;
        }
        let base = field.rule_value(j, k).abs().powf(p);
        for eps in 1..=EPS_COUNT {
            acc.add(field.value(eps, j, k).abs().powf(p) - base);
        }
    }
    Ok(acc.value().max(0.0))
}

/// a_j = 2^{j(s−Q/p)} ‖d_{j,·}‖_{ℓ^p} for every scale of the field, and their ℓ^q norm.
pub fn besov_seq_norm(field: &CoefficientField, params: &BesovParams) -> Result<BesovNorm> {
    if !field.depth_monotone() {
        return Err(Error::Unsupported("closed-form norm needs a depth-monotone rule".into()));
    }
    let mut a = vec![];
    for j in field.scales() {
        let sum = closed_form_power_sum(field, j, params.p)?;
        let w = (j as f64 * params.critical()).exp2();
        a.push((j, w * sum.powf(1.0 / params.p)));
    }
    let aggregate = lq(a.iter().map(|x| x.1), params.q);
    Ok(BesovNorm { a, aggregate })
}

/// a_j by enumerating every site of ℒ₀(j) (j ≤ 6).
pub fn besov_coefficient_brute(field: &CoefficientField, params: &BesovParams, j: i64, policy: ExecPolicy) -> Result<f64> {
    if !(0..=6).contains(&j) {
        return domain(format!("brute enumeration limited to 0 <= j <= 6, got {j}"));
    }
    if field.support() != Support::L0 {
        return Err(Error::Unsupported("brute enumeration needs the ℒ₀ support".into()));
    }
    let n = 1i64 << j;
    let total = (n * n * n * n) as u64;
    let p = params.p;
    let sums = par::map_chunks(policy, total, par::DEFAULT_CHUNK, |range| {
        let mut acc = KahanSum::default();
        for t in range {
            let t = t as i64;
            let k0: K3 = [t / (n * n * n), (t / (n * n)) % n, t % (n * n)];
            let k = field.apply_shift(j, k0);
            for eps in 1..=EPS_COUNT {
                let v = field.value(eps, j, k);
                if v != 0.0 {
                    acc.add(v.abs().powf(p));
                }
            }
        }
        acc
    });
    let sum = par::tree_reduce(sums, KahanSum::default(), KahanSum::merge).value();
    Ok((j as f64 * params.critical()).exp2() * sum.powf(1.0 / p))
}

/// Closed form for the saturating field: a_j^p = 15 j^{−βp}(1 + 15j/16).
pub fn saturating_a_closed(params: &BesovParams, j: i64) -> f64 {
    if j < 1 {
        return 0.0;
    }
    let jf = j as f64;
    (EPS_COUNT as f64 * jf.powf(-params.beta() * params.p) * (1.0 + 15.0 * jf / 16.0)).powf(1.0 / params.p)
}

/// 15^{2/p} j^{−β} (1 + j 2^{−Q})^{1/p}
pub fn saturating_a_bound(params: &BesovParams, j: i64) -> f64 {
    let jf = j as f64;
    15f64.powf(2.0 / params.p) * jf.powf(-params.beta()) * (1.0 + jf * (-QF).exp2()).powf(1.0 / params.p)
}

/// sup_{ε,k} |d^ε_{j,k}| at scale j.
pub fn per_scale_sup(field: &CoefficientField, j: i64) -> Result<f64> {
    if !field.in_range(j) {
        return Ok(0.0);
    }
    if !field.depth_monotone() {
        return Err(Error::Unsupported("per-scale supremum needs a depth-monotone rule".into()));
    }
    // a depth class keeps its rule value unless the overlay covers every (ε, site) in it
    let mut covered = std::collections::BTreeMap::<i64, u128>::new();
    let mut m: f64 = 0.0;
    for (&(_, jj, k0), c) in field.overlay() {
        if jj == j && field.in_support(j, field.apply_shift(j, k0)) {
            *covered.entry(depth(j, k0)).or_default() += 1;
            m = m.max(c.to_f64().abs());
        }
    }
    for dep in 0..=j {
        let size = match field.support() {
            Support::All => u128::MAX,
            Support::L0 => count_irreducible(dep)? * EPS_COUNT as u128,
        };
        if covered.get(&dep).copied().unwrap_or(0) < size {
            m = m.max(field.rule().value_at_depth(j, dep).abs());
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolderSup {
    /// (j, 2^{js} sup_{ε,k}|d^ε_{j,k}|)
    pub per_scale: Vec<(i64, f64)>,
    pub sup: f64,
    pub divergent: bool,
}

/// sup over (ε,j,k) of 2^{js}|d|; reported infinite when the normalised
/// per-scale suprema keep growing at the end of the scale range.
pub fn holder_sup_norm(field: &CoefficientField, s: f64) -> Result<HolderSup> {
    let mut per_scale = vec![];
    for j in field.scales() {
        per_scale.push((j, (j as f64 * s).exp2() * per_scale_sup(field, j)?));
    }
    let tail: Vec<(f64, f64)> = per_scale
        .iter()
        .rev()
        .take(8)
        .filter(|x| x.1 > 0.0)
        .map(|&(j, v)| (j as f64, v.log2()))
        .collect();
    let divergent = tail.len() >= 3 && ols_slope(&tail) > 0.01;
    let sup = if divergent {
        f64::INFINITY
    } else {
        per_scale.iter().map(|x| x.1).fold(0.0, f64::max)
    };
    Ok(HolderSup { per_scale, sup, divergent })
}

/// Empirical embedding constant sup_j 2^{j(s−Q/p)} sup_{ε,k}|d^ε_{j,k}|.
pub fn empirical_c0(field: &CoefficientField, params: &BesovParams) -> Result<f64> {
    let mut c: f64 = 0.0;
    for j in field.scales() {
        c = c.max((j as f64 * params.critical()).exp2() * per_scale_sup(field, j)?);
    }
    Ok(c)
}

pub(crate) fn ols_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Representative index of depth `dep` at scale j, in the field's shifted frame.
pub fn representative(field: &CoefficientField, j: i64, dep: i64) -> K3 {
    field.apply_shift(j, depth_representative(j, dep))
}

#[cfg(test)]
mod tests {
    use super::super::field::{besov_saturating_field, power_field, Rule};
    use super::*;
    use crate::numeric::Const;

    fn p22() -> BesovParams {
        BesovParams::new(2.0, 2.0, 2.0).unwrap()
    }

    #[test]
    fn saturating_norm_matches_closed_form_and_bound() {
        let p = p22();
        let f = besov_saturating_field(p);
        let n = besov_seq_norm(&f, &p).unwrap();
        for &(j, a) in &n.a {
            let c = saturating_a_closed(&p, j);
            assert!((a - c).abs() <= 1e-12 * c, "j={j}: {a} vs {c}");
            if j <= 14 {
                assert!(a <= saturating_a_bound(&p, j), "j={j}");
            }
        }
        assert!(n.aggregate.is_finite());
    }

    #[test]
    fn brute_agrees_on_small_scales() {
        let p = p22();
        let f = besov_saturating_field(p);
        let n = besov_seq_norm(&f, &p).unwrap();
        for j in 1..=4 {
            let b = besov_coefficient_brute(&f, &p, j, ExecPolicy::Parallel).unwrap();
            let c = n.a.iter().find(|x| x.0 == j).unwrap().1;
            assert!((b - c).abs() <= 1e-12 * c, "j={j}: {b} vs {c}");
        }
        assert!(besov_coefficient_brute(&f, &p, 7, ExecPolicy::Sequential).is_err());
    }

    #[test]
    fn single_coefficient() {
        let p = p22();
        let mut f = CoefficientField::zero();
        f.set_overlay(1, 3, [1, 2, 3], Const::Exact(1.into())).unwrap();
        let n = besov_seq_norm(&f, &p).unwrap();
        for &(j, a) in &n.a {
            if j == 3 {
                assert!((a - (3.0 * p.critical()).exp2()).abs() < 1e-15);
            } else {
                assert_eq!(a, 0.0);
            }
        }
        let z = besov_seq_norm(&CoefficientField::zero(), &p).unwrap();
        assert!(z.a.iter().all(|x| x.1 == 0.0));
        assert_eq!(z.aggregate, 0.0);
    }

    #[test]
    fn homogeneous_in_scaling() {
        let p = BesovParams::new(2.5, 2.0, 3.0).unwrap();
        let f = besov_saturating_field(p);
        let g = f.with_rule(Rule::Scaled { factor: -3.0, base: Box::new(f.rule().clone()) });
        let (a, b) = (besov_seq_norm(&f, &p).unwrap(), besov_seq_norm(&g, &p).unwrap());
        for (x, y) in a.a.iter().zip(&b.a) {
            assert!((3.0 * x.1 - y.1).abs() <= 1e-12 * y.1.max(1e-300));
        }
    }

    #[test]
    fn holder_norms() {
        let d = power_field(1.5, Support::All).unwrap();
        let h = holder_sup_norm(&d, 1.5).unwrap();
        assert!((h.sup - 1.0).abs() < 1e-15);
        assert!(!h.divergent);
        let p = p22();
        let f = besov_saturating_field(p);
        let h = holder_sup_norm(&f, p.s).unwrap();
        assert!(h.divergent && h.sup.is_infinite());
        let h = holder_sup_norm(&f, p.critical()).unwrap();
        assert!(!h.divergent);
        assert!((h.sup - 1.0).abs() < 1e-15);
        assert!(besov_seq_norm(&d, &p).is_err());
    }

    #[test]
    fn embedding_constant() {
        let p = p22();
        let f = besov_saturating_field(p);
        assert!((empirical_c0(&f, &p).unwrap() - 1.0).abs() < 1e-15);
    }
}
