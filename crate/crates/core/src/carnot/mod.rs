//! Stratified nilpotent groups in exponential coordinates of the first kind.

mod interval;
pub mod lattice;
pub mod spec_file;

use num_rational::Rational64;
use num_traits::Zero;
use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::par::{self, ExecPolicy};

pub use lattice::{count_in_ball, random_centers, sampling_check, Lattice, SamplingReport};
pub use crate::numeric::Const;
pub use spec_file::{parse_spec, write_spec};

/// [X_i, X_j] has coefficient `value` on X_l. Indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket {
    pub i: usize,
    pub j: usize,
    pub l: usize,
    pub value: Const,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StratificationSpec {
    layer_dims: Vec<usize>,
    weights: Vec<u32>,
    /// dense c[i][j][l], 0-based, row-major
    table: Vec<Const>,
    /// nonzero entries (i, j, l, value) for fast brackets
    sparse: Vec<(usize, usize, usize, f64)>,
    given: Vec<Bracket>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CPoint(pub Vec<f64>);

impl CPoint {
    pub fn zeros(d: usize) -> Self {
        CPoint(vec![0.0; d])
    }

    pub fn neg(&self) -> CPoint {
        CPoint(self.0.iter().map(|v| -v).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn max_abs_diff(&self, other: &CPoint) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl StratificationSpec {
    /// Brackets missing their antisymmetric counterpart get it filled in.
    pub fn new(layer_dims: Vec<usize>, brackets: Vec<Bracket>) -> Result<Self> {
        if layer_dims.is_empty() || layer_dims.contains(&0) {
            return domain("layer dimensions must be positive and nonempty");
        }
        let d: usize = layer_dims.iter().sum();
        let mut weights = Vec::with_capacity(d);
        for (k, &q) in layer_dims.iter().enumerate() {
            weights.extend(std::iter::repeat_n(k as u32 + 1, q));
        }
        let zero = Const::Exact(Rational64::zero());
        let mut table = vec![zero; d * d * d];
        let mut set = vec![false; d * d * d];
        let at = |i: usize, j: usize, l: usize| (i * d + j) * d + l;
        for b in &brackets {
            if b.i == 0 || b.j == 0 || b.l == 0 || b.i > d || b.j > d || b.l > d {
                return domain(format!("bracket index out of range 1..={d}: {} {} {}", b.i, b.j, b.l));
            }
            let idx = at(b.i - 1, b.j - 1, b.l - 1);
            table[idx] = b.value;
            set[idx] = true;
        }
        for b in &brackets {
            let idx = at(b.j - 1, b.i - 1, b.l - 1);
            if !set[idx] && b.i != b.j {
                table[idx] = b.value.neg();
            }
        }
        let mut sparse = vec![];
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    let v = table[at(i, j, l)].to_f64();
                    if v != 0.0 {
                        sparse.push((i, j, l, v));
                    }
                }
            }
        }
        Ok(StratificationSpec { layer_dims, weights, table, sparse, given: brackets })
    }

    pub fn heisenberg() -> Self {
        let b = Bracket { i: 1, j: 2, l: 3, value: Const::Exact(Rational64::from_integer(-4)) };
        Self::new(vec![2, 1], vec![b]).expect("static spec")
    }

    pub fn engel() -> Self {
        let one = Const::Exact(Rational64::from_integer(1));
        Self::new(
            vec![2, 1, 1],
            vec![Bracket { i: 1, j: 2, l: 3, value: one }, Bracket { i: 1, j: 3, l: 4, value: one }],
        )
        .expect("static spec")
    }

    pub fn abelian(d: usize) -> Result<Self> {
        Self::new(vec![d], vec![])
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn total_dim(&self) -> usize {
        self.weights.len()
    }

    /// σ_i, the layer of basis vector i (0-based index).
    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn step(&self) -> usize {
        self.layer_dims.len()
    }

    pub fn sigma_lcm(&self) -> u32 {
        self.weights.iter().fold(1, |a, &w| a / gcd(a, w) * w)
    }

    pub fn given_brackets(&self) -> &[Bracket] {
        &self.given
    }

    /// c[i][j][l], 0-based.
    pub fn constant(&self, i: usize, j: usize, l: usize) -> Const {
        let d = self.total_dim();
        self.table[(i * d + j) * d + l]
    }

    pub fn is_exact(&self) -> bool {
        self.table.iter().all(|c| matches!(c, Const::Exact(_)))
    }

    pub fn bracket(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.total_dim()];
        for &(i, j, l, v) in &self.sparse {
            out[l] += v * a[i] * b[j];
        }
        out
    }
}

pub fn hom_dim(spec: &StratificationSpec) -> usize {
    spec.layer_dims.iter().enumerate().map(|(k, &q)| (k + 1) * q).sum()
}

pub fn validate_spec(spec: &StratificationSpec) -> ValidationReport {
    let d = spec.total_dim();
    let mut failures = vec![];
    let exact = spec.is_exact();

    for i in 0..d {
        for j in i..d {
            for l in 0..d {
                let a = spec.constant(i, j, l);
                let b = spec.constant(j, i, l);
                let ok = match (a, b) {
                    (Const::Exact(x), Const::Exact(y)) => x == -y,
                    _ => (a.to_f64() + b.to_f64()).abs() <= 1e-12,
                };
                if !ok {
                    failures.push(format!(
                        "antisymmetry: c[{}][{}][{}] = {} but c[{}][{}][{}] = {}",
                        i + 1, j + 1, l + 1, a.to_f64(), j + 1, i + 1, l + 1, b.to_f64()
                    ));
                }
            }
        }
    }

    // Jacobi: [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j] = 0
    for i in 0..d {
        for j in (i + 1)..d {
            for k in (j + 1)..d {
                for l in 0..d {
                    let bad = if exact {
                        let c = |a, b, c| match spec.constant(a, b, c) {
                            Const::Exact(r) => r,
                            Const::Real(_) => unreachable!(),
                        };
                        let mut s = Rational64::zero();
                        for m in 0..d {
                            s += c(i, j, m) * c(m, k, l) + c(j, k, m) * c(m, i, l) + c(k, i, m) * c(m, j, l);
                        }
                        !s.is_zero()
                    } else {
                        let c = |a, b, cc| spec.constant(a, b, cc).to_f64();
                        let s: f64 = (0..d)
                            .map(|m| c(i, j, m) * c(m, k, l) + c(j, k, m) * c(m, i, l) + c(k, i, m) * c(m, j, l))
                            .sum();
                        s.abs() > 1e-12
                    };
                    if bad {
                        failures.push(format!("jacobi: fails on basis triple ({}, {}, {}) in component {}", i + 1, j + 1, k + 1, l + 1));
                    }
                }
            }
        }
    }

    let w = spec.weights();
    for i in 0..d {
        for j in 0..d {
            for l in 0..d {
                if !spec.constant(i, j, l).is_zero() && w[l] != w[i] + w[j] {
                    failures.push(format!(
                        "grading: [X{}, X{}] has a component on X{} (layer {}), expected layer {}",
                        i + 1, j + 1, l + 1, w[l], w[i] + w[j]
                    ));
                }
            }
        }
    }

    // [n_1, n_k] must span n_{k+1}
    let layer_of = |k: u32| (0..d).filter(move |&i| w[i] == k);
    for k in 1..spec.step() as u32 {
        let target: Vec<usize> = layer_of(k + 1).collect();
        let mut rows = vec![];
        for a in layer_of(1) {
            for b in layer_of(k) {
                let mut ea = vec![0.0; d];
                let mut eb = vec![0.0; d];
                ea[a] = 1.0;
                eb[b] = 1.0;
                let v = spec.bracket(&ea, &eb);
                rows.push(target.iter().map(|&t| v[t]).collect::<Vec<f64>>());
            }
        }
        let r = rank(rows, target.len());
        if r != target.len() {
            failures.push(format!(
                "stratification: [n1, n{}] spans dimension {} of layer {} (dimension {})",
                k, r, k + 1, target.len()
            ));
        }
    }
    ValidationReport { failures }
}

fn rank(mut rows: Vec<Vec<f64>>, ncols: usize) -> usize {
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..rows.len()).max_by(|&a, &b| rows[a][c].abs().total_cmp(&rows[b][c].abs())) else {
            break;
        };
        if rows[piv][c].abs() <= 1e-12 {
            continue;
        }
        rows.swap(r, piv);
        for i in 0..rows.len() {
            if i != r {
                let f = rows[i][c] / rows[r][c];
                for cc in c..ncols {
                    let sub = f * rows[r][cc];
                    rows[i][cc] -= sub;
                }
            }
        }
        r += 1;
    }
    r
}

fn check_dim(spec: &StratificationSpec, x: &CPoint) -> Result<()> {
    if x.dim() != spec.total_dim() {
        return domain(format!("point has dimension {}, group has {}", x.dim(), spec.total_dim()));
    }
    Ok(())
}

/// Product via the Dynkin series truncated after degree 3:
/// a + b + ½[a,b] + (1/12)([a,[a,b]] + [b,[b,a]]).
pub fn bch_mul(spec: &StratificationSpec, a: &CPoint, b: &CPoint) -> Result<CPoint> {
    if spec.step() > 3 {
        return Err(Error::Unsupported(format!("BCH product implemented for step <= 3, spec has step {}", spec.step())));
    }
    check_dim(spec, a)?;
    check_dim(spec, b)?;
    Ok(bch_unchecked(spec, &a.0, &b.0))
}

pub(crate) fn bch_unchecked(spec: &StratificationSpec, a: &[f64], b: &[f64]) -> CPoint {
    let ab = spec.bracket(a, b);
    let mut out: Vec<f64> = a.iter().zip(b).zip(&ab).map(|((x, y), z)| x + y + 0.5 * z).collect();
    if spec.step() >= 3 {
        let ba: Vec<f64> = ab.iter().map(|v| -v).collect();
        let aab = spec.bracket(a, &ab);
        let bba = spec.bracket(b, &ba);
        for l in 0..out.len() {
            out[l] += (aab[l] + bba[l]) / 12.0;
        }
    }
    CPoint(out)
}

pub fn c_dilate(spec: &StratificationSpec, lambda: f64, x: &CPoint) -> Result<CPoint> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("dilation factor must be positive, got {lambda}"));
    }
    check_dim(spec, x)?;
    Ok(CPoint(x.0.iter().zip(spec.weights()).map(|(v, &w)| v * lambda.powi(w as i32)).collect()))
}

/// (Σ |x_i|^{2σ/σ_i})^{1/(2σ)}
pub fn c_gauge_norm(spec: &StratificationSpec, x: &CPoint) -> f64 {
    let sigma = spec.sigma_lcm();
    let s: f64 = x
        .0
        .iter()
        .zip(spec.weights())
        .map(|(v, &w)| v.abs().powi((2 * sigma / w) as i32))
        .sum();
    s.powf(1.0 / (2 * sigma) as f64)
}

pub fn c_dist(spec: &StratificationSpec, x: &CPoint, y: &CPoint) -> f64 {
    c_gauge_norm(spec, &bch_unchecked(spec, &x.neg().0, &y.0))
}

/// Monte Carlo volume of the gauge ball B(0, radius).
pub fn mc_ball_volume(spec: &StratificationSpec, radius: f64, samples: u64, seed: u64, policy: ExecPolicy) -> f64 {
    let half: Vec<f64> = spec.weights().iter().map(|&w| radius.powi(w as i32)).collect();
    let box_vol: f64 = half.iter().map(|h| 2.0 * h).product();
    let chunk = par::DEFAULT_CHUNK;
    let hits = par::map_reduce(
        policy,
        samples,
        chunk,
        0u64,
        |range| {
            let mut rng = par::chunk_rng(seed, range.start / chunk);
            let mut h = 0;
            let mut x = CPoint::zeros(half.len());
            for _ in range {
                for (c, hw) in x.0.iter_mut().zip(&half) {
                    *c = rng.random_range(-hw..*hw);
                }
                if c_gauge_norm(spec, &x) < radius {
                    h += 1;
                }
            }
            h
        },
        |a, b| a + b,
    );
    box_vol * hits as f64 / samples as f64
}

/// log₂(vol B(0,2) / vol B(0,1)), which should equal Q_G.
pub fn volume_scaling_exponent(spec: &StratificationSpec, samples: u64, seed: u64, policy: ExecPolicy) -> f64 {
    let v1 = mc_ball_volume(spec, 1.0, samples, seed, policy);
    let v2 = mc_ball_volume(spec, 2.0, samples, seed.wrapping_add(1), policy);
    (v2 / v1).log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GPoint;
    use proptest::prelude::*;

    fn cp(v: &[f64]) -> CPoint {
        CPoint(v.to_vec())
    }

    #[test]
    fn presets_validate() {
        assert!(validate_spec(&StratificationSpec::heisenberg()).is_valid());
        assert!(validate_spec(&StratificationSpec::engel()).is_valid());
        let ab = StratificationSpec::abelian(5).unwrap();
        assert!(validate_spec(&ab).is_valid());
        assert_eq!(ab.step(), 1);
    }

    #[test]
    fn wrong_layer_reported() {
        let one = Const::Exact(Rational64::from_integer(1));
        let s = StratificationSpec::new(vec![3], vec![Bracket { i: 1, j: 2, l: 3, value: one }]).unwrap();
        let rep = validate_spec(&s);
        assert!(rep.failures.iter().any(|f| f.starts_with("grading")), "{rep:?}");
    }

    #[test]
    fn conflicting_antisymmetry_reported() {
        let v = |x| Const::Exact(Rational64::from_integer(x));
        let s = StratificationSpec::new(
            vec![2, 1],
            vec![Bracket { i: 1, j: 2, l: 3, value: v(1) }, Bracket { i: 2, j: 1, l: 3, value: v(1) }],
        )
        .unwrap();
        assert!(validate_spec(&s).failures.iter().any(|f| f.starts_with("antisymmetry")));
    }

    #[test]
    fn non_generating_reported() {
        // layers (2,1) with no bracket: n_2 not generated
        let s = StratificationSpec::new(vec![2, 1], vec![]).unwrap();
        assert!(validate_spec(&s).failures.iter().any(|f| f.starts_with("stratification")));
    }

    #[test]
    fn jacobi_failure_reported() {
        let v = |x| Const::Exact(Rational64::from_integer(x));
        // [e1,e2] = e3, [e2,e3] = e2: J(e1,e2,e3) = e3; grading breaks too
        let s = StratificationSpec::new(
            vec![2, 1],
            vec![Bracket { i: 1, j: 2, l: 3, value: v(1) }, Bracket { i: 2, j: 3, l: 2, value: v(1) }],
        )
        .unwrap();
        let rep = validate_spec(&s);
        assert!(rep.failures.iter().any(|f| f.starts_with("jacobi")), "{rep:?}");
    }

    #[test]
    fn heisenberg_bch_matches_group_law() {
        let h = StratificationSpec::heisenberg();
        let z = bch_mul(&h, &cp(&[1., 0., 0.]), &cp(&[0., 1., 0.])).unwrap();
        assert_eq!(z, cp(&[1., 1., -2.]));
    }

    #[test]
    fn dims() {
        assert_eq!(hom_dim(&StratificationSpec::heisenberg()), 4);
        assert_eq!(hom_dim(&StratificationSpec::engel()), 7);
        assert_eq!(hom_dim(&StratificationSpec::abelian(6).unwrap()), 6);
        assert_eq!(StratificationSpec::engel().sigma_lcm(), 6);
    }

    #[test]
    fn step_four_rejected() {
        let one = Const::Exact(Rational64::from_integer(1));
        let s = StratificationSpec::new(
            vec![2, 1, 1, 1],
            vec![
                Bracket { i: 1, j: 2, l: 3, value: one },
                Bracket { i: 1, j: 3, l: 4, value: one },
                Bracket { i: 1, j: 4, l: 5, value: one },
            ],
        )
        .unwrap();
        assert!(validate_spec(&s).is_valid());
        assert!(matches!(bch_mul(&s, &CPoint::zeros(5), &CPoint::zeros(5)), Err(Error::Unsupported(_))));
    }

    #[test]
    fn norm_examples() {
        let h = StratificationSpec::heisenberg();
        assert_eq!(c_gauge_norm(&h, &cp(&[0., 0., 1.])), 1.0);
        let e = StratificationSpec::engel();
        for i in 0..4 {
            let mut v = vec![0.0; 4];
            v[i] = 1.0;
            assert!((c_gauge_norm(&e, &CPoint(v)) - 1.0).abs() < 1e-15);
        }
        assert!(c_dilate(&h, 0.0, &cp(&[1., 1., 1.])).is_err());
        assert_eq!(c_dilate(&h, 1.0, &cp(&[1., 2., 3.])).unwrap(), cp(&[1., 2., 3.]));
    }

    #[test]
    fn volume_exponents() {
        for (s, q) in [
            (StratificationSpec::heisenberg(), 4.0),
            (StratificationSpec::engel(), 7.0),
            (StratificationSpec::abelian(3).unwrap(), 3.0),
        ] {
            let e = volume_scaling_exponent(&s, 400_000, 17, ExecPolicy::Parallel);
            assert!((e - q).abs() < 0.05, "{e} vs {q}");
        }
    }

    fn v3() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5.0..5.0f64, 3)
    }
    fn v4() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-3.0..3.0f64, 4)
    }

    proptest! {
        #[test]
        fn heisenberg_agrees(a in v3(), b in v3()) {
            let h = StratificationSpec::heisenberg();
            let z = bch_mul(&h, &CPoint(a.clone()), &CPoint(b.clone())).unwrap();
            let g = GPoint::new(a[0], a[1], a[2]) * GPoint::new(b[0], b[1], b[2]);
            prop_assert!(z.max_abs_diff(&CPoint(vec![g.p, g.q, g.r])) <= 1e-12);
        }

        #[test]
        fn engel_associative(a in v4(), b in v4(), c in v4()) {
            let e = StratificationSpec::engel();
            let l = bch_mul(&e, &bch_mul(&e, &CPoint(a.clone()), &CPoint(b.clone())).unwrap(), &CPoint(c.clone())).unwrap();
            let r = bch_mul(&e, &CPoint(a), &bch_mul(&e, &CPoint(b), &CPoint(c)).unwrap()).unwrap();
            prop_assert!(l.max_abs_diff(&r) <= 1e-10);
        }

        #[test]
        fn engel_inverse_and_dilation(a in v4(), b in v4(), lam in 0.1..5.0f64) {
            let e = StratificationSpec::engel();
            let x = CPoint(a);
            let y = CPoint(b);
            prop_assert!(bch_mul(&e, &x, &x.neg()).unwrap().max_abs_diff(&CPoint::zeros(4)) <= 1e-12);
            let lhs = c_dilate(&e, lam, &bch_mul(&e, &x, &y).unwrap()).unwrap();
            let rhs = bch_mul(&e, &c_dilate(&e, lam, &x).unwrap(), &c_dilate(&e, lam, &y).unwrap()).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-9 * (1.0 + lam.powi(3) * 100.0));
            let n = c_gauge_norm(&e, &c_dilate(&e, lam, &x).unwrap());
            prop_assert!((n - lam * c_gauge_norm(&e, &x)).abs() <= 1e-12 * n.max(1e-300));
        }

        #[test]
        fn abelian_is_addition(a in v3(), b in v3()) {
            let s = StratificationSpec::abelian(3).unwrap();
            let z = bch_mul(&s, &CPoint(a.clone()), &CPoint(b.clone())).unwrap();
            let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            prop_assert_eq!(z, CPoint(sum));
        }
    }
}
