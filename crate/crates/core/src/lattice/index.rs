use crate::error::{domain, Result};
use crate::group::GPoint;
use crate::par::{self, ExecPolicy};

/// Largest scale for which dyadic points are exact in f64 and index
/// arithmetic stays far from i64 overflow.
pub const MAX_SCALE: i64 = 26;

pub type K3 = [i64; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicIndex {
    pub j: i64,
    pub k: K3,
}

/// 2^e as f64 for any moderate integer e.
#[inline]
pub fn pow2(e: i64) -> f64 {
    f64::from_bits(((1023 + e) as u64) << 52)
}

/// Group law on integer triples: k ∗ d.
#[inline]
pub fn kmul(a: K3, b: K3) -> K3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2] + 2 * (a[1] * b[0] - a[0] * b[1])]
}

#[inline]
pub fn kinv(a: K3) -> K3 {
    [-a[0], -a[1], -a[2]]
}

/// Same dyadic point expressed at scale j + m.
#[inline]
pub fn lift(k: K3, m: i64) -> K3 {
    [k[0] << m, k[1] << m, k[2] << (2 * m)]
}

impl DyadicIndex {
    pub const fn new(j: i64, k: K3) -> Self {
        DyadicIndex { j, k }
    }

    /// x_{j,k} = 2^{-j} ∘ k
    pub fn point(&self) -> GPoint {
        dyadic_point(self)
    }

    pub fn contains(&self, x: &GPoint) -> bool {
        let [a, b, c] = self.local(x);
        (0.0..1.0).contains(&a) && (0.0..1.0).contains(&b) && (0.0..1.0).contains(&c)
    }

    /// Coordinates of 2^j ∘ (x_{j,k}^{-1} ∗ x).
    pub fn local(&self, x: &GPoint) -> [f64; 3] {
        let s = pow2(self.j);
        let (xp, xq, xr) = (x.p * s, x.q * s, x.r * s * s);
        let [kp, kq, kr] = self.k.map(|v| v as f64);
        [xp - kp, xq - kq, xr - kr - 2.0 * (kq * xp - kp * xq)]
    }

    pub fn irreducible(&self) -> DyadicIndex {
        irreducible(self)
    }

    pub fn depth(&self) -> i64 {
        irreducible(self).j
    }

    pub fn in_unit_cube(&self) -> bool {
        in_l0(self.j, self.k)
    }
}

pub fn dyadic_point(idx: &DyadicIndex) -> GPoint {
    let s = pow2(-idx.j);
    GPoint::new(idx.k[0] as f64 * s, idx.k[1] as f64 * s, idx.k[2] as f64 * s * s)
}

/// The unique cube C_{j,k} containing x.
pub fn locate(x: &GPoint, j: i64) -> DyadicIndex {
    let s = pow2(j);
    let (xp, xq, xr) = (x.p * s, x.q * s, x.r * s * s);
    let kp = xp.floor();
    let kq = xq.floor();
    let kr = (xr + 2.0 * (kp * xq - kq * xp)).floor();
    let mut idx = DyadicIndex::new(j, [kp as i64, kq as i64, kr as i64]);
    // guard against rounding in the shear term
    if !idx.contains(x) {
        let c = idx.local(x)[2];
        if c < 0.0 {
            idx.k[2] -= 1;
        } else if c >= 1.0 {
            idx.k[2] += 1;
        }
    }
    idx
}

/// x_{j,k} ∈ [0,1)³
#[inline]
pub fn in_l0(j: i64, k: K3) -> bool {
    if j < 0 {
        return k == [0, 0, 0];
    }
    let n = 1i64 << j;
    (0..n).contains(&k[0]) && (0..n).contains(&k[1]) && (0..(n * n)).contains(&k[2])
}

pub fn irreducible(idx: &DyadicIndex) -> DyadicIndex {
    let (mut j, [mut kp, mut kq, mut kr]) = (idx.j, idx.k);
    while j > 0 && kp % 2 == 0 && kq % 2 == 0 && kr % 4 == 0 {
        kp /= 2;
        kq /= 2;
        kr /= 4;
        j -= 1;
    }
    DyadicIndex::new(j, [kp, kq, kr])
}

/// Irreducibility depth J of (j,k), j ≥ 0.
#[inline]
pub fn depth(j: i64, k: K3) -> i64 {
    let (mut j, [mut kp, mut kq, mut kr]) = (j, k);
    while j > 0 && kp & 1 == 0 && kq & 1 == 0 && kr & 3 == 0 {
        kp >>= 1;
        kq >>= 1;
        kr >>= 2;
        j -= 1;
    }
    j
}

/// Some index at scale j whose irreducible depth is `dep` and which lies in ℒ₀(j).
pub fn depth_representative(j: i64, dep: i64) -> K3 {
    debug_assert!(0 <= dep && dep <= j);
    if dep == 0 {
        [0, 0, 0]
    } else {
        [1i64 << (j - dep), 0, 0]
    }
}

pub fn count_l0(j: i64) -> Result<u128> {
    if j < 0 {
        return domain("count_L0 needs j >= 0");
    }
    if j > 31 {
        return domain("count_L0 overflows beyond j = 31");
    }
    Ok(1u128 << (4 * j))
}

pub fn count_irreducible(big_j: i64) -> Result<u128> {
    if big_j < 0 {
        return domain("count_irreducible needs J >= 0");
    }
    if big_j > 31 {
        return domain("count_irreducible overflows beyond J = 31");
    }
    Ok(if big_j == 0 { 1 } else { 15u128 << (4 * (big_j - 1)) })
}

/// Enumerate a window around [0,1)³ at scale j and count indices whose
/// dyadic point lands in [0,1)³ (tested on the floating-point coordinates).
pub fn enumerate_l0(j: i64, policy: ExecPolicy) -> u64 {
    let n = 1i64 << j;
    let (wp, wr) = (n + 2, n * n + 2);
    let total = (wp * wp * wr) as u64;
    par::map_reduce(
        policy,
        total,
        par::DEFAULT_CHUNK * 4,
        0u64,
        |range| {
            let mut c = 0;
            for t in range {
                let t = t as i64;
                let kr = t % wr - 1;
                let kq = (t / wr) % wp - 1;
                let kp = t / (wr * wp) - 1;
                let x = DyadicIndex::new(j, [kp, kq, kr]).point();
                if (0.0..1.0).contains(&x.p) && (0.0..1.0).contains(&x.q) && (0.0..1.0).contains(&x.r) {
                    c += 1;
                }
            }
            c
        },
        |a, b| a + b,
    )
}

/// Number of k ∈ ℒ₀(J) irreducible at level J, by the parity criterion.
pub fn parity_scan_irreducible(big_j: i64, policy: ExecPolicy) -> u64 {
    let n = 1i64 << big_j;
    let total = (n * n * n * n) as u64;
    par::map_reduce(
        policy,
        total,
        par::DEFAULT_CHUNK * 4,
        0u64,
        |range| {
            let mut c = 0;
            for t in range {
                let t = t as i64;
                let kr = t % (n * n);
                let kq = (t / (n * n)) % n;
                let kp = t / (n * n * n);
                let reducible = big_j > 0 && kp % 2 == 0 && kq % 2 == 0 && kr % 4 == 0;
                if big_j == 0 || !reducible {
                    c += 1;
                }
            }
            c
        },
        |a, b| a + b,
    )
}
