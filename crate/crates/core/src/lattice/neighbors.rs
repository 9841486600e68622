//! Neighbourhoods Λ_{j,k}, cube diameters and the ball-overlap set.

use rand::Rng;

use super::index::{kmul, DyadicIndex, K3};
use crate::group::GPoint;
use crate::par::{self, ExecPolicy};

/// Offsets k' with C_{0,k'} touching the closure of C₀ = [0,1)³, C₀ included.
/// Rows grouped by (k'_p, k'_q).
pub const XI: [K3; 35] = [
    [0, 0, -1], [0, 0, 0], [0, 0, 1],
    [1, 0, -1], [1, 0, 0], [1, 0, 1], [1, 0, 2], [1, 0, 3],
    [1, 1, -1], [1, 1, 0], [1, 1, 1],
    [0, 1, -3], [0, 1, -2], [0, 1, -1], [0, 1, 0], [0, 1, 1],
    [-1, 1, -3], [-1, 1, -2], [-1, 1, -1],
    [-1, 0, -3], [-1, 0, -2], [-1, 0, -1], [-1, 0, 0], [-1, 0, 1],
    [-1, -1, -1], [-1, -1, 0], [-1, -1, 1],
    [0, -1, -1], [0, -1, 0], [0, -1, 1], [0, -1, 2], [0, -1, 3],
    [1, -1, 1], [1, -1, 2], [1, -1, 3],
];

/// The table as commonly printed for this lattice. It equals `XI` with the
/// sign of k'_r flipped, i.e. it describes the neighbours of C₀ under the
/// opposite orientation of the shear. Kept for comparison only.
pub const PRINTED_XI: [K3; 35] = [
    [0, 0, -1], [0, 0, 0], [0, 0, 1],
    [1, 0, -3], [1, 0, -2], [1, 0, -1], [1, 0, 0], [1, 0, 1],
    [1, 1, -1], [1, 1, 0], [1, 1, 1],
    [0, 1, -1], [0, 1, 0], [0, 1, 1], [0, 1, 2], [0, 1, 3],
    [-1, 1, 1], [-1, 1, 2], [-1, 1, 3],
    [-1, 0, -1], [-1, 0, 0], [-1, 0, 1], [-1, 0, 2], [-1, 0, 3],
    [-1, -1, -1], [-1, -1, 0], [-1, -1, 1],
    [0, -1, -3], [0, -1, -2], [0, -1, -1], [0, -1, 0], [0, -1, 1],
    [1, -1, -3], [1, -1, -2], [1, -1, -1],
];

/// Exact test: does the closure of C_{0,k} meet the closure of C₀?
///
/// A point of both closures has (p,q) in the intersection of the unit squares
/// at 0 and (k_p,k_q); over that rectangle the fibre of C̄_{0,k} in the r
/// direction is [L, L+1] with L = k_r + 2(k_q p − k_p q), against [0,1] for C̄₀.
/// L is affine in (p,q), so the extremes sit on the rectangle's corners.
pub fn touches_unit_cube(k: K3) -> bool {
    let [k1, k2, k3] = k;
    let (plo, phi) = (0.max(-k1), 1.min(1 - k1));
    let (qlo, qhi) = (0.max(-k2), 1.min(1 - k2));
    if plo > phi || qlo > qhi {
        return false;
    }
    let mut lmin = i64::MAX;
    let mut lmax = i64::MIN;
    for p in [plo, phi] {
        for q in [qlo, qhi] {
            let l = k3 + 2 * (k2 * p - k1 * q);
            lmin = lmin.min(l);
            lmax = lmax.max(l);
        }
    }
    lmin <= 1 && lmax >= -1
}

/// Exhaustive scan of k ∈ [-3,3]² × [-8,8].
pub fn brute_force_neighbors() -> Vec<K3> {
    let mut out = vec![];
    for kp in -3..=3 {
        for kq in -3..=3 {
            for kr in -8..=8 {
                if touches_unit_cube([kp, kq, kr]) {
                    out.push([kp, kq, kr]);
                }
            }
        }
    }
    out
}

pub fn neighborhood(idx: &DyadicIndex) -> [DyadicIndex; 35] {
    XI.map(|d| DyadicIndex::new(idx.j, kmul(idx.k, d)))
}

pub fn neighborhood_contains(idx: &DyadicIndex, x: &GPoint) -> bool {
    neighborhood(idx).iter().any(|c| c.contains(x))
}

pub fn cube_diameter(j: i64) -> f64 {
    13f64.powf(0.25) * super::index::pow2(-j)
}

/// max δ over vertex pairs of C̄₀ and over sampled interior pairs.
pub fn diameter_oracle(samples: u64, seed: u64, policy: ExecPolicy) -> f64 {
    let verts: Vec<GPoint> = (0..8)
        .map(|b| GPoint::new((b & 1) as f64, ((b >> 1) & 1) as f64, ((b >> 2) & 1) as f64))
        .collect();
    let mut best: f64 = 0.0;
    for a in &verts {
        for b in &verts {
            best = best.max(a.dist(b));
        }
    }
    let chunk = par::DEFAULT_CHUNK;
    let sampled = par::map_reduce(
        policy,
        samples,
        chunk,
        0.0f64,
        |range| {
            let mut rng = par::chunk_rng(seed, range.start / chunk);
            let mut m: f64 = 0.0;
            for _ in range {
                let a = GPoint::new(rng.random(), rng.random(), rng.random());
                let b = GPoint::new(rng.random(), rng.random(), rng.random());
                m = m.max(a.dist(&b));
            }
            m
        },
        f64::max,
    );
    best.max(sampled)
}

/// The 43 offsets k' with B(x_{j,k∗k'}, 2^{-j}) ∩ B(x_{j,k}, 2^{-j}) ≠ ∅.
pub fn ball_overlap_offsets() -> Vec<K3> {
    let mut out = vec![];
    for k1 in -1i64..=1 {
        for k2 in -1i64..=1 {
            let n = k1 * k1 + k2 * k2;
            let lim = if n == 0 { 1 } else { 2 };
            for k3 in -lim..=lim {
                out.push([k1, k2, k3]);
            }
        }
    }
    out
}

pub fn ball_overlap_set(idx: &DyadicIndex) -> Vec<DyadicIndex> {
    ball_overlap_offsets()
        .into_iter()
        .map(|d| DyadicIndex::new(idx.j, kmul(idx.k, d)))
        .collect()
}

/// sup over y of the r-overlap margin between B(0,1) and B(k,1).
///
/// For (p,q) in both horizontal disks the r-fibres are |r| < a₀ and
/// |r − L| < a₁ with a = sqrt(1 − ρ⁴) and L = k_r + 2(k_q p − k_p q);
/// they meet iff a₀ + a₁ − |L| > 0. The margin is concave in (p,q), so a grid
/// search followed by shrinking local grids converges to the maximum.
pub fn ball_overlap_margin(k: K3) -> f64 {
    let (k1, k2, k3) = (k[0] as f64, k[1] as f64, k[2] as f64);
    if k1 * k1 + k2 * k2 >= 4.0 {
        return f64::NEG_INFINITY;
    }
    let f = |p: f64, q: f64| -> f64 {
        let r0 = p * p + q * q;
        let r1 = (p - k1) * (p - k1) + (q - k2) * (q - k2);
        if r0 >= 1.0 || r1 >= 1.0 {
            return f64::NEG_INFINITY;
        }
        let a0 = (1.0 - r0 * r0).sqrt();
        let a1 = (1.0 - r1 * r1).sqrt();
        a0 + a1 - (k3 + 2.0 * (k2 * p - k1 * q)).abs()
    };
    let (mut cp, mut cq) = (k1 / 2.0, k2 / 2.0);
    let mut half = 1.0;
    let mut best = f(cp, cq);
    let n = 40;
    for _ in 0..30 {
        let (mut bp, mut bq) = (cp, cq);
        for i in -n..=n {
            for jj in -n..=n {
                let p = cp + half * i as f64 / n as f64;
                let q = cq + half * jj as f64 / n as f64;
                let v = f(p, q);
                if v > best {
                    best = v;
                    bp = p;
                    bq = q;
                }
            }
        }
        cp = bp;
        cq = bq;
        half *= 0.25;
    }
    best
}

/// Exhaustive geometric scan over [-3,3]² × [-8,8].
pub fn ball_overlap_oracle(policy: ExecPolicy) -> Vec<K3> {
    let cands: Vec<K3> = (-3..=3)
        .flat_map(|a| (-3..=3).flat_map(move |b| (-8..=8).map(move |c| [a, b, c])))
        .collect();
    let margins = par::map_items(policy, &cands, |k| ball_overlap_margin(*k));
    cands
        .into_iter()
        .zip(margins)
        .filter(|(_, m)| *m > 1e-9)
        .map(|(k, _)| k)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::index::locate;
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn xi_matches_brute_force() {
        let brute: BTreeSet<K3> = brute_force_neighbors().into_iter().collect();
        let xi: BTreeSet<K3> = XI.iter().copied().collect();
        assert_eq!(brute.len(), 35);
        assert_eq!(brute, xi);
        assert!(xi.contains(&[0, 0, 0]));
    }

    #[test]
    fn printed_table_is_r_reflection() {
        let xi: BTreeSet<K3> = XI.iter().copied().collect();
        let printed: BTreeSet<K3> = PRINTED_XI.iter().copied().collect();
        assert_eq!(printed.len(), 35);
        assert_ne!(xi, printed);
        let refl: BTreeSet<K3> = PRINTED_XI.iter().map(|k| [k[0], k[1], -k[2]]).collect();
        assert_eq!(refl, xi);
    }

    #[test]
    fn xi_closed_under_inverse() {
        let xi: BTreeSet<K3> = XI.iter().copied().collect();
        for k in XI {
            assert!(xi.contains(&[-k[0], -k[1], -k[2]]));
        }
    }

    #[test]
    fn neighborhood_count_and_self() {
        let idx = DyadicIndex::new(3, [2, 5, -7]);
        let n = neighborhood(&idx);
        assert_eq!(n.len(), 35);
        assert!(n.contains(&idx));
    }

    #[test]
    fn neighborhood_sufficiency() {
        let mut rng = par::chunk_rng(99, 0);
        let mut checked = 0;
        while checked < 10_000 {
            let j = rng.random_range(0..6i64);
            let x = GPoint::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let s = super::super::index::pow2(-j);
            let y = x * GPoint::new(rng.random_range(-1.0..1.0) * s, rng.random_range(-1.0..1.0) * s, rng.random_range(-1.0..1.0) * s * s);
            if x.dist(&y) >= s {
                continue;
            }
            checked += 1;
            let cx = locate(&x, j);
            // every k with x ∈ Λ_{j,k} is of the form k_x ∗ ξ, since Ξ is symmetric
            let found = neighborhood(&cx).iter().any(|c| neighborhood_contains(c, &x) && neighborhood_contains(c, &y));
            assert!(found, "x={x:?} y={y:?} j={j}");
        }
    }

    #[test]
    fn diameter() {
        assert!((cube_diameter(0) - 1.8988).abs() < 1e-4);
        assert!(cube_diameter(0) < 2.0);
        let d = diameter_oracle(100_000, 1, ExecPolicy::Parallel);
        assert!((d - cube_diameter(0)).abs() < 1e-3, "{d}");
    }

    #[test]
    fn overlap_set() {
        let offs = ball_overlap_offsets();
        assert_eq!(offs.len(), 43);
        assert!(offs.contains(&[0, 0, 0]) && offs.contains(&[0, 0, 1]) && offs.contains(&[0, 0, -1]));
        assert!(!offs.contains(&[0, 0, 2]));
        assert_eq!(ball_overlap_set(&DyadicIndex::new(2, [1, 1, 1])).len(), 43);
    }

    #[test]
    fn overlap_oracle_reproduces_set() {
        let a: BTreeSet<K3> = ball_overlap_oracle(ExecPolicy::Parallel).into_iter().collect();
        let b: BTreeSet<K3> = ball_overlap_offsets().into_iter().collect();
        assert_eq!(a, b);
        assert!(ball_overlap_margin([0, 0, 2]).abs() < 1e-12);
    }
}
