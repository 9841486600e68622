//! The first Heisenberg group in global coordinates (p, q, r).

use std::f64::consts::PI;
use std::ops::Mul;

use rand::Rng;

use crate::error::{domain, Result};
use crate::par::{self, ExecPolicy};

/// Homogeneous dimension.
pub const Q: u32 = 4;
pub const QF: f64 = 4.0;

/// Upper cap used when reporting the sampled quasi-triangle constant.
pub const GAMMA1_CAP: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct GPoint {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl GPoint {
    pub const IDENTITY: GPoint = GPoint { p: 0.0, q: 0.0, r: 0.0 };

    pub const fn new(p: f64, q: f64, r: f64) -> Self {
        GPoint { p, q, r }
    }

    pub fn is_finite(&self) -> bool {
        self.p.is_finite() && self.q.is_finite() && self.r.is_finite()
    }

    pub fn prod(&self, b: &GPoint) -> GPoint {
        GPoint {
            p: self.p + b.p,
            q: self.q + b.q,
            r: self.r + b.r + 2.0 * (self.q * b.p - self.p * b.q),
        }
    }

    pub fn inv(&self) -> GPoint {
        GPoint { p: -self.p, q: -self.q, r: -self.r }
    }

    pub fn dilate(&self, lambda: f64) -> Result<GPoint> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return domain(format!("dilation factor must be positive, got {lambda}"));
        }
        Ok(self.dilate_unchecked(lambda))
    }

    pub(crate) fn dilate_unchecked(&self, lambda: f64) -> GPoint {
        GPoint { p: lambda * self.p, q: lambda * self.q, r: lambda * lambda * self.r }
    }

    /// ((p²+q²)² + r²)^{1/4}
    pub fn norm(&self) -> f64 {
        let h = self.p * self.p + self.q * self.q;
        (h * h + self.r * self.r).sqrt().sqrt()
    }

    pub fn dist(&self, other: &GPoint) -> f64 {
        self.inv().prod(other).norm()
    }

    pub fn max_abs_diff(&self, other: &GPoint) -> f64 {
        (self.p - other.p).abs().max((self.q - other.q).abs()).max((self.r - other.r).abs())
    }
}

impl Mul for GPoint {
    type Output = GPoint;
    fn mul(self, rhs: GPoint) -> GPoint {
        self.prod(&rhs)
    }
}

pub fn mul(a: &GPoint, b: &GPoint) -> GPoint {
    a.prod(b)
}

pub fn inv(x: &GPoint) -> GPoint {
    x.inv()
}

pub fn dilate(lambda: f64, x: &GPoint) -> Result<GPoint> {
    x.dilate(lambda)
}

pub fn gauge_norm(x: &GPoint) -> f64 {
    x.norm()
}

pub fn dist(x: &GPoint, y: &GPoint) -> f64 {
    x.dist(y)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupConstants {
    pub q: u32,
    pub ball_volume_unit: f64,
    pub cube_diameter_unit: f64,
}

pub fn constants() -> GroupConstants {
    GroupConstants {
        q: Q,
        ball_volume_unit: PI * PI / 2.0,
        cube_diameter_unit: 13f64.powf(0.25),
    }
}

pub fn ball_volume(r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("radius must be positive, got {r}"));
    }
    Ok(PI * PI / 2.0 * r.powi(4))
}

/// Rejection-sampling estimate of the volume of B(0,1) from the box [-1,1]³.
pub fn mc_unit_ball_volume(samples: u64, seed: u64, policy: ExecPolicy) -> f64 {
    let hits = par::map_reduce(
        policy,
        samples,
        par::DEFAULT_CHUNK * 4,
        0u64,
        |range| {
            let mut rng = par::chunk_rng(seed, range.start / (par::DEFAULT_CHUNK * 4));
            let mut h = 0u64;
            for _ in range {
                let x = GPoint::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
                if x.norm() < 1.0 {
                    h += 1;
                }
            }
            h
        },
        |a, b| a + b,
    );
    8.0 * hits as f64 / samples as f64
}

/// ‖xy‖ / (‖x‖ + ‖y‖), or 0 when both vanish.
pub fn quasi_triangle_ratio(x: &GPoint, y: &GPoint) -> f64 {
    let d = x.norm() + y.norm();
    if d == 0.0 {
        0.0
    } else {
        x.prod(y).norm() / d
    }
}

/// Sampled lower bound for the quasi-triangle constant γ₁.
///
/// Pairs are drawn uniformly from the box [-1,1]³. The `_scaled` variant
/// dilates every sample by λ, which must leave the estimate unchanged.
pub fn quasi_triangle_constant(sample_count: u64, seed: u64, policy: ExecPolicy) -> Result<f64> {
    quasi_triangle_constant_scaled(sample_count, seed, 1.0, policy)
}

pub fn quasi_triangle_constant_scaled(sample_count: u64, seed: u64, lambda: f64, policy: ExecPolicy) -> Result<f64> {
    if sample_count < 1 {
        return domain("sample_count must be at least 1");
    }
    if !(lambda > 0.0) {
        return domain("dilation must be positive");
    }
    let chunk = par::DEFAULT_CHUNK;
    let best = par::map_reduce(
        policy,
        sample_count,
        chunk,
        0.0f64,
        |range| {
            let mut rng = par::chunk_rng(seed, range.start / chunk);
            let mut m: f64 = 0.0;
            for _ in range {
                let mut draw = || {
                    GPoint::new(
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                    )
                    .dilate_unchecked(lambda)
                };
                let x = draw();
                let y = draw();
                m = m.max(quasi_triangle_ratio(&x, &y));
            }
            m
        },
        f64::max,
    );
    Ok(best.max(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    X,
    Y,
    Z,
}

impl Dir {
    pub fn from_char(c: char) -> Option<Dir> {
        match c {
            'X' | 'x' => Some(Dir::X),
            'Y' | 'y' => Some(Dir::Y),
            'Z' | 'z' => Some(Dir::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Dir::X => 'X',
            Dir::Y => 'Y',
            Dir::Z => 'Z',
        }
    }
}

pub fn parse_word(s: &str) -> Option<Vec<Dir>> {
    s.chars().map(Dir::from_char).collect()
}

pub fn word_string(w: &[Dir]) -> String {
    w.iter().map(|d| d.as_char()).collect()
}

/// x ∗ exp(tV): exact flow of a left-invariant field.
pub fn flow(x: &GPoint, dir: Dir, t: f64) -> GPoint {
    match dir {
        Dir::X => GPoint::new(x.p + t, x.q, x.r + 2.0 * x.q * t),
        Dir::Y => GPoint::new(x.p, x.q + t, x.r - 2.0 * x.p * t),
        Dir::Z => GPoint::new(x.p, x.q, x.r + t),
    }
}

pub const MAX_WORD: usize = 4;

pub fn default_step(word_len: usize) -> f64 {
    if word_len <= 1 {
        1e-4
    } else {
        1e-3
    }
}

/// (V₁V₂…V_n f)(x) by nested central differences along exact flows.
pub fn horizontal_derivative<F>(f: &F, x: &GPoint, word: &[Dir], step: f64) -> Result<f64>
where
    F: Fn(&GPoint) -> f64 + ?Sized,
{
    if !(step > 0.0) {
        return domain(format!("step must be positive, got {step}"));
    }
    if word.len() > MAX_WORD {
        return domain(format!("word length {} exceeds {MAX_WORD}", word.len()));
    }
    Ok(nested_diff(f, x, word, step))
}

fn nested_diff<F>(f: &F, x: &GPoint, word: &[Dir], h: f64) -> f64
where
    F: Fn(&GPoint) -> f64 + ?Sized,
{
    match word.split_first() {
        None => f(x),
        Some((&d, rest)) => {
            let plus = nested_diff(f, &flow(x, d, h), rest, h);
            let minus = nested_diff(f, &flow(x, d, -h), rest, h);
            (plus - minus) / (2.0 * h)
        }
    }
}

/// Monte Carlo volume of `z ∗ box` where box = [lo,hi] coordinatewise.
pub fn mc_translated_box_volume(z: &GPoint, lo: GPoint, hi: GPoint, samples: u64, seed: u64, policy: ExecPolicy) -> f64 {
    // bounding box of z∗box
    let corners = [
        GPoint::new(lo.p, lo.q, lo.r),
        GPoint::new(hi.p, lo.q, lo.r),
        GPoint::new(lo.p, hi.q, lo.r),
        GPoint::new(hi.p, hi.q, lo.r),
        GPoint::new(lo.p, lo.q, hi.r),
        GPoint::new(hi.p, lo.q, hi.r),
        GPoint::new(lo.p, hi.q, hi.r),
        GPoint::new(hi.p, hi.q, hi.r),
    ];
    let imgs: Vec<GPoint> = corners.iter().map(|c| z.prod(c)).collect();
    let bl = GPoint::new(
        imgs.iter().map(|g| g.p).fold(f64::INFINITY, f64::min),
        imgs.iter().map(|g| g.q).fold(f64::INFINITY, f64::min),
        imgs.iter().map(|g| g.r).fold(f64::INFINITY, f64::min),
    );
    let bh = GPoint::new(
        imgs.iter().map(|g| g.p).fold(f64::NEG_INFINITY, f64::max),
        imgs.iter().map(|g| g.q).fold(f64::NEG_INFINITY, f64::max),
        imgs.iter().map(|g| g.r).fold(f64::NEG_INFINITY, f64::max),
    );
    let zi = z.inv();
    let chunk = par::DEFAULT_CHUNK;
    let hits = par::map_reduce(
        policy,
        samples,
        chunk,
        0u64,
        |range| {
            let mut rng = par::chunk_rng(seed, range.start / chunk);
            let mut h = 0;
            for _ in range {
                let y = GPoint::new(
                    rng.random_range(bl.p..bh.p),
                    rng.random_range(bl.q..bh.q),
                    rng.random_range(bl.r..bh.r),
                );
                let w = zi.prod(&y);
                if w.p >= lo.p && w.p < hi.p && w.q >= lo.q && w.q < hi.q && w.r >= lo.r && w.r < hi.r {
                    h += 1;
                }
            }
            h
        },
        |a, b| a + b,
    );
    let vol = (bh.p - bl.p) * (bh.q - bl.q) * (bh.r - bl.r);
    vol * hits as f64 / samples as f64
}
