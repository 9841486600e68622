//! Regular sampling sets: counting lattice points in gauge balls.

use rand::Rng;

use super::interval::{self, Iv};
use super::{c_dist, check_dim, CPoint, StratificationSpec};
use crate::error::{domain, Error, Result};
use crate::par::{self, ExecPolicy};

/// The coordinate lattice { Σ n_i g_i : n ∈ ℤ^d } spanned by d generators.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    generators: Vec<Vec<f64>>,
    inverse: Vec<Vec<f64>>,
}

impl Lattice {
    pub fn new(generators: Vec<Vec<f64>>) -> Result<Self> {
        let d = generators.len();
        if d == 0 {
            return domain("lattice has no generators");
        }
        if generators.iter().any(|g| g.len() != d) {
            return domain("need d generators of dimension d");
        }
        let inverse = invert(&generators).ok_or_else(|| Error::Domain("generators are linearly dependent".into()))?;
        Ok(Lattice { generators, inverse })
    }

    pub fn integer(d: usize) -> Result<Self> {
        Self::new((0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn point(&self, n: &[i64]) -> CPoint {
        let d = self.dim();
        let mut v = vec![0.0; d];
        for (g, &c) in self.generators.iter().zip(n) {
            for l in 0..d {
                v[l] += c as f64 * g[l];
            }
        }
        CPoint(v)
    }
}

/// Gauss-Jordan inverse of the matrix whose columns are `cols`.
fn invert(cols: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let d = cols.len();
    // m[row][col]
    let mut m: Vec<Vec<f64>> = (0..d)
        .map(|r| {
            let mut row: Vec<f64> = (0..d).map(|c| cols[c][r]).collect();
            row.extend((0..d).map(|c| if c == r { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for c in 0..d {
        let piv = (c..d).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
        if m[piv][c].abs() < 1e-12 {
            return None;
        }
        m.swap(c, piv);
        let p = m[c][c];
        for x in m[c].iter_mut() {
            *x /= p;
        }
        for r in 0..d {
            if r != c {
                let f = m[r][c];
                for cc in 0..2 * d {
                    let s = f * m[c][cc];
                    m[r][cc] -= s;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[d..].to_vec()).collect())
}

/// Number of lattice points γ with ‖x⁻¹ ∗ γ‖ < radius.
pub fn count_in_ball(spec: &StratificationSpec, lattice: &Lattice, center: &CPoint, radius: f64) -> Result<usize> {
    check_dim(spec, center)?;
    if lattice.dim() != spec.total_dim() {
        return domain("lattice and group dimensions differ");
    }
    if spec.step() > 3 {
        return Err(Error::Unsupported("lattice enumeration needs step <= 3".into()));
    }
    if !(radius > 0.0) {
        return Ok(0);
    }
    let d = spec.total_dim();
    // γ = x ∗ y with ‖y‖ < radius, hence |y_i| < radius^{σ_i}
    let xi: Vec<Iv> = center.0.iter().map(|&v| Iv::point(v)).collect();
    let yi: Vec<Iv> = spec.weights().iter().map(|&w| Iv::sym(radius.powi(w as i32))).collect();
    let gamma = interval::bch(spec, &xi, &yi);
    // n = G⁻¹ γ
    let mut lo = vec![0i64; d];
    let mut hi = vec![0i64; d];
    for r in 0..d {
        let mut acc = Iv::point(0.0);
        for c in 0..d {
            acc = acc.add(gamma[c].scale(lattice.inverse[r][c]));
        }
        lo[r] = acc.lo.floor() as i64;
        hi[r] = acc.hi.ceil() as i64;
    }
    let mut n = lo.clone();
    let mut count = 0;
    loop {
        let g = lattice.point(&n);
        if c_dist(spec, center, &g) < radius {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == d {
                return Ok(count);
            }
            if n[i] < hi[i] {
                n[i] += 1;
                break;
            }
            n[i] = lo[i];
            i += 1;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplingReport {
    pub min_points: usize,
    pub max_points: usize,
}

impl SamplingReport {
    /// Every sampled ball holds a lattice point.
    pub fn covers(&self) -> bool {
        self.min_points >= 1
    }
}

pub fn sampling_check(
    spec: &StratificationSpec,
    lattice: &Lattice,
    radius: f64,
    centers: &[CPoint],
    policy: ExecPolicy,
) -> Result<SamplingReport> {
    if centers.is_empty() {
        return domain("no centers given");
    }
    let counts = par::map_items(policy, centers, |c| count_in_ball(spec, lattice, c, radius));
    let counts: Vec<usize> = counts.into_iter().collect::<Result<_>>()?;
    Ok(SamplingReport {
        min_points: *counts.iter().min().unwrap(),
        max_points: *counts.iter().max().unwrap(),
    })
}

/// Uniform centers in the box [lo, hi]^d.
pub fn random_centers(d: usize, lo: f64, hi: f64, n: usize, seed: u64) -> Vec<CPoint> {
    let mut rng = par::chunk_rng(seed, 0);
    (0..n).map(|_| CPoint((0..d).map(|_| rng.random_range(lo..hi)).collect())).collect()
}
