//! Minimal interval arithmetic for bounding BCH images of boxes.

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Iv {
    pub lo: f64,
    pub hi: f64,
}

impl Iv {
    pub fn point(x: f64) -> Iv {
        Iv { lo: x, hi: x }
    }

    pub fn sym(h: f64) -> Iv {
        Iv { lo: -h, hi: h }
    }

    pub fn add(self, o: Iv) -> Iv {
        Iv { lo: self.lo + o.lo, hi: self.hi + o.hi }
    }

    pub fn mul(self, o: Iv) -> Iv {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        Iv {
            lo: c.iter().copied().fold(f64::INFINITY, f64::min),
            hi: c.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn scale(self, s: f64) -> Iv {
        if s >= 0.0 {
            Iv { lo: self.lo * s, hi: self.hi * s }
        } else {
            Iv { lo: self.hi * s, hi: self.lo * s }
        }
    }

    /// Widen by a relative and absolute margin to absorb rounding.
    pub fn pad(self) -> Iv {
        let m = 1e-9 * (1.0 + self.lo.abs().max(self.hi.abs()));
        Iv { lo: self.lo - m, hi: self.hi + m }
    }
}

pub(crate) fn bracket(spec: &super::StratificationSpec, a: &[Iv], b: &[Iv]) -> Vec<Iv> {
    let mut out = vec![Iv::point(0.0); spec.total_dim()];
    for &(i, j, l, v) in &spec.sparse {
        out[l] = out[l].add(a[i].mul(b[j]).scale(v));
    }
    out
}

/// Enclosure of { a ∗ b : a ∈ A, b ∈ B } for step ≤ 3.
pub(crate) fn bch(spec: &super::StratificationSpec, a: &[Iv], b: &[Iv]) -> Vec<Iv> {
    let ab = bracket(spec, a, b);
    let mut out: Vec<Iv> = (0..a.len()).map(|l| a[l].add(b[l]).add(ab[l].scale(0.5))).collect();
    if spec.step() >= 3 {
        let ba: Vec<Iv> = ab.iter().map(|v| v.scale(-1.0)).collect();
        let aab = bracket(spec, a, &ab);
        let bba = bracket(spec, b, &ba);
        for l in 0..out.len() {
            out[l] = out[l].add(aab[l].add(bba[l]).scale(1.0 / 12.0));
        }
    }
    out.into_iter().map(Iv::pad).collect()
}
