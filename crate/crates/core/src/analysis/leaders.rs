//! Wavelet leaders D_j(f,x): the largest coefficient over cubes at scales
//! j' ≥ j contained in the neighbourhood Λ_j(x).

use std::collections::HashSet;

use crate::error::{domain, Error, Result};
use crate::group::GPoint;
use crate::lattice::index::{kmul, lift, locate, K3};
use crate::lattice::neighbors::XI;
use crate::synthesis::{CoefficientField, Rule, Support};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LeaderMode {
    /// Depth-monotone fields: maximise over the lifted neighbourhood base points.
    #[default]
    Exact,
    /// Direct enumeration of contained cubes for j' − j ≤ delta; a lower bound.
    Windowed { delta: i64 },
}

pub const DEFAULT_DELTA: i64 = 4;
pub const MAX_DELTA: i64 = 8;

/// Does C_{j+m,b} lie inside the union of the scale-j cubes listed in `cells`?
pub fn cube_contained(cells: &HashSet<K3>, m: i64, b: K3) -> bool {
    let sm = 1i64 << m;
    let qm = 1i64 << (2 * m);
    let zp = b[0].div_euclid(sm);
    let zq = b[1].div_euclid(sm);
    let w0 = b[2] + 2 * sm * (zp * b[1] - zq * b[0]);
    let a = 2 * (b[1] - sm * zq);
    let bb = -2 * (b[0] - sm * zp);
    let lo = (w0 + bb).div_euclid(qm);
    let hi = (w0 + 1 + a + qm - 1).div_euclid(qm) - 1;
    (lo..=hi).all(|nr| cells.contains(&[zp, zq, nr]))
}

/// Neighbourhood base indices k_x ∗ ξ at scale j.
pub fn neighborhood_cells(x: &GPoint, j: i64) -> Vec<K3> {
    let kx = locate(x, j).k;
    XI.iter().map(|&xi| kmul(kx, xi)).collect()
}

pub fn leaders(field: &CoefficientField, x: &GPoint, j: i64, j_cap: i64, mode: LeaderMode) -> Result<f64> {
    if j > j_cap {
        return domain(format!("need j <= j_cap, got j = {j}, j_cap = {j_cap}"));
    }
    if j < 0 {
        return domain(format!("need j >= 0, got {j}"));
    }
    if !x.is_finite() {
        return domain("point must be finite");
    }
    match mode {
        LeaderMode::Exact => exact(field, x, j, j_cap),
        LeaderMode::Windowed { delta } => {
            if delta < 0 {
                return domain("delta must be >= 0");
            }
            if delta > MAX_DELTA {
                return domain(format!("windowed leaders refuse delta > {MAX_DELTA} (cost 2^(4·delta))"));
            }
            windowed(field, x, j, j_cap.min(j + delta))
        }
    }
}

fn exact(field: &CoefficientField, x: &GPoint, j: i64, j_cap: i64) -> Result<f64> {
    if *field.rule() == Rule::Zero && field.overlay().is_empty() {
        return Ok(0.0);
    }
    if !field.depth_monotone() {
        return Err(Error::Unsupported("exact leaders need a depth-monotone rule".into()));
    }
    if field.overlay_lowers_rule() {
        return Err(Error::Unsupported("exact leaders: an overlay entry lowers the rule value".into()));
    }
    let (_, jmax) = field.j_range();
    let j_hi = j_cap.min(jmax);
    let cells = neighborhood_cells(x, j);
    let anchored = (j..=j_hi.max(j)).any(|jp| cells.iter().any(|&c| field.in_support(jp, lift(c, jp - j))));
    if !anchored {
        if !cells.iter().any(|&c| cell_may_meet_support(field, j, c)) {
            return Ok(0.0);
        }
        if j_cap - j <= MAX_DELTA {
            return windowed(field, x, j, j_cap);
        }
        return Err(Error::Unsupported("neighbourhood misses the support; narrow j_cap to at most j + 8".into()));
    }
    let mut d: f64 = 0.0;
    for jp in j..=j_hi {
        for &c in &cells {
            d = d.max(field.max_abs(jp, lift(c, jp - j)));
        }
    }
    if !field.overlay().is_empty() {
        let set: HashSet<K3> = cells.iter().copied().collect();
        for &(_, jp, k0) in field.overlay().keys() {
            if jp < j || jp > j_hi {
                continue;
            }
            let k = field.apply_shift(jp, k0);
            if field.in_support(jp, k) && cube_contained(&set, jp - j, k) {
                d = d.max(field.max_abs(jp, k));
            }
        }
    }
    Ok(d)
}

/// False only if the closed cube C_{j,c} is disjoint from the closed support box.
fn cell_may_meet_support(field: &CoefficientField, j: i64, c: K3) -> bool {
    if field.support() == Support::All {
        return true;
    }
    let [a, b, r] = field.unshift(j, c);
    let n = 1i64 << j;
    // r over the cube is 4^{-j}(r + u_r + 2(b u_p − a u_q)), u ∈ [0,1]³
    let rmin = r + 2 * b.min(0) + 2 * (-a).min(0);
    let rmax = r + 1 + 2 * b.max(0) + 2 * (-a).max(0);
    a + 1 >= 0 && a <= n && b + 1 >= 0 && b <= n && rmax >= 0 && rmin <= n * n
}

fn windowed(field: &CoefficientField, x: &GPoint, j: i64, j_top: i64) -> Result<f64> {
    let cells = neighborhood_cells(x, j);
    let set: HashSet<K3> = cells.iter().copied().collect();
    let mut d: f64 = 0.0;
    for jp in j..=j_top {
        if !field.in_range(jp) {
            continue;
        }
        let m = jp - j;
        let (sm, qm) = (1i64 << m, 1i64 << (2 * m));
        for n in &cells {
            for bp in sm * n[0]..sm * (n[0] + 1) {
                for bq in sm * n[1]..sm * (n[1] + 1) {
                    let r0 = qm * n[2] - 2 * sm * (n[0] * bq - n[1] * bp);
                    for br in r0..r0 + qm {
                        let b = [bp, bq, br];
                        if !field.in_support(jp, b) {
                            continue;
                        }
                        let v = field.max_abs(jp, b);
                        if v > d && cube_contained(&set, m, b) {
                            d = v;
                        }
                    }
                }
            }
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::index::DyadicIndex;
    use crate::synthesis::{besov_saturating_field, monofractal_round, BesovParams};
    use rand::Rng;

    fn f22() -> CoefficientField {
        besov_saturating_field(BesovParams::new(2.0, 2.0, 2.0).unwrap())
    }

    #[test]
    fn containment_by_sampling() {
        // compare the integer test with dense point sampling of the sub-cube
        let x = GPoint::new(0.3, 0.6, 0.2);
        let j = 1;
        let cells = neighborhood_cells(&x, j);
        let set: HashSet<K3> = cells.iter().copied().collect();
        let mut rng = crate::par::chunk_rng(5, 0);
        let m = 2;
        let mut agree_in = 0;
        for n in &cells[..6] {
            for bp in 4 * n[0]..4 * n[0] + 4 {
                for bq in 4 * n[1]..4 * n[1] + 4 {
                    let r0 = 16 * n[2] - 8 * (n[0] * bq - n[1] * bp);
                    for br in r0..r0 + 16 {
                        let b = [bp, bq, br];
                        let claimed = cube_contained(&set, m, b);
                        let cube = DyadicIndex::new(j + m, b);
                        let all_in = (0..200).all(|_| {
                            let u = GPoint::new(rng.random(), rng.random(), rng.random());
                            let y = cube.point().prod(&u.dilate(0.125).unwrap());
                            set.contains(&locate(&y, j).k)
                        });
                        if claimed {
                            assert!(all_in, "{b:?}");
                            agree_in += 1;
                        }
                    }
                }
            }
        }
        assert!(agree_in > 0);
    }

    #[test]
    fn zero_field() {
        let z = CoefficientField::zero();
        let x = GPoint::new(0.2, 0.2, 0.2);
        assert_eq!(leaders(&z, &x, 3, 10, LeaderMode::Exact).unwrap(), 0.0);
        assert_eq!(leaders(&z, &x, 3, 10, LeaderMode::Windowed { delta: 2 }).unwrap(), 0.0);
    }

    #[test]
    fn saturating_field_at_origin() {
        let p = BesovParams::new(2.5, 2.0, 2.0).unwrap();
        let f = besov_saturating_field(p);
        let x = GPoint::new(0.0, 0.0, 0.0);
        for j in 1..10 {
            let d = leaders(&f, &x, j, 26, LeaderMode::Exact).unwrap();
            let expect = (-(j as f64) * p.critical()).exp2() / (j as f64).powf(p.beta());
            assert!((d - expect).abs() <= 1e-15 * expect, "j={j}");
        }
    }

    #[test]
    fn exact_matches_windowed() {
        let f = f22();
        let mut rng = crate::par::chunk_rng(11, 0);
        for _ in 0..4 {
            let x = GPoint::new(rng.random(), rng.random(), rng.random());
            for j in 1..=4 {
                let e = leaders(&f, &x, j, j + 3, LeaderMode::Exact).unwrap();
                let w = leaders(&f, &x, j, j + 3, LeaderMode::Windowed { delta: 3 }).unwrap();
                assert_eq!(e, w, "x={x:?} j={j}");
            }
        }
        let r = monofractal_round(&f, 1.0, 3).unwrap();
        let x = GPoint::new(0.4, 0.7, 0.1);
        let e = leaders(&r, &x, 2, 5, LeaderMode::Exact).unwrap();
        let w = leaders(&r, &x, 2, 5, LeaderMode::Windowed { delta: 3 }).unwrap();
        assert_eq!(e, w);
    }

    #[test]
    fn refusals() {
        let f = f22();
        let x = GPoint::new(0.5, 0.5, 0.5);
        assert!(leaders(&f, &x, 5, 4, LeaderMode::Exact).is_err());
        assert!(leaders(&f, &x, 2, 20, LeaderMode::Windowed { delta: 9 }).is_err());
        let far = GPoint::new(50.0, 50.0, 0.0);
        assert_eq!(leaders(&f, &far, 2, 20, LeaderMode::Exact).unwrap(), 0.0);
        // just outside a corner: cells overlap the support box, too deep to enumerate
        let edge = GPoint::new(1.3, 0.5, 0.5);
        assert!(matches!(leaders(&f, &edge, 2, 20, LeaderMode::Exact), Err(Error::Unsupported(_))));
    }

    #[test]
    fn outside_support_agrees_with_windowed() {
        let f = f22().with_shift([1, 0, -2]).unwrap();
        let mut rng = crate::par::chunk_rng(12, 0);
        for _ in 0..40 {
            let x = GPoint::new(rng.random_range(-1.5..2.5), rng.random_range(-1.5..2.5), rng.random_range(-3.0..3.0));
            for j in 1..=3 {
                let e = leaders(&f, &x, j, j + 3, LeaderMode::Exact).unwrap();
                let w = leaders(&f, &x, j, j + 3, LeaderMode::Windowed { delta: 3 }).unwrap();
                assert_eq!(e, w, "x={x:?} j={j}");
            }
        }
    }
}
