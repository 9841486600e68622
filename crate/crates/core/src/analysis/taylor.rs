//! Right Taylor polynomials up to homogeneous degree 3 and remainder fits.

use std::collections::BTreeMap;

use crate::error::{domain, Error, Result};
use crate::group::{default_step, horizontal_derivative, parse_word, GPoint};
use crate::par;
use crate::synthesis::besov::ols_slope;

/// Horizontal-derivative values keyed by word ("" is f itself, "XY" is X(Yf)).
pub type DerivTable = BTreeMap<String, f64>;

/// Monomial p^a q^b r^c as (a, b, c).
pub type Monomial = (u32, u32, u32);

pub fn word_degree(w: &str) -> u32 {
    w.chars().map(|c| if c == 'Z' || c == 'z' { 2 } else { 1 }).sum()
}

pub fn monomial_degree(m: Monomial) -> u32 {
    m.0 + m.1 + 2 * m.2
}

/// All words over {X, Y, Z} of homogeneous degree ≤ order.
pub fn words_up_to(order: u32) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut frontier = vec![String::new()];
    while let Some(w) = frontier.pop() {
        for c in ['X', 'Y', 'Z'] {
            let next = format!("{w}{c}");
            if word_degree(&next) <= order {
                out.push(next.clone());
                frontier.push(next);
            }
        }
    }
    out.sort_by(|a, b| word_degree(a).cmp(&word_degree(b)).then(a.cmp(b)));
    out
}

/// Numerical derivative table at x0 for every word of degree ≤ order.
pub fn derivative_table<F>(f: &F, x0: &GPoint, order: u32) -> Result<DerivTable>
where
    F: Fn(&GPoint) -> f64 + ?Sized,
{
    if order > 3 {
        return Err(Error::Unsupported(format!("Taylor order {order} > 3")));
    }
    let mut t = DerivTable::new();
    for w in words_up_to(order) {
        let word = parse_word(&w).expect("generated words are valid");
        t.insert(w.clone(), horizontal_derivative(f, x0, &word, default_step(word.len()))?);
    }
    Ok(t)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaylorPoly {
    pub order: u32,
    pub coeffs: BTreeMap<Monomial, f64>,
}

impl TaylorPoly {
    pub fn coeff(&self, m: Monomial) -> f64 {
        self.coeffs.get(&m).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, y: &GPoint) -> f64 {
        self.coeffs
            .iter()
            .map(|(&(a, b, c), &v)| v * y.p.powi(a as i32) * y.q.powi(b as i32) * y.r.powi(c as i32))
            .sum()
    }
}

/// Coefficients of P_{x0}(p,q,r) in terms of derivatives at x0.
const TERMS: [(Monomial, &[(&str, f64)]); 13] = [
    ((0, 0, 0), &[("", 1.0)]),
    ((1, 0, 0), &[("X", 1.0)]),
    ((0, 1, 0), &[("Y", 1.0)]),
    ((2, 0, 0), &[("XX", 0.5)]),
    ((1, 1, 0), &[("XY", 1.0), ("Z", 2.0)]),
    ((0, 2, 0), &[("YY", 0.5)]),
    ((0, 0, 1), &[("Z", 1.0)]),
    ((3, 0, 0), &[("XXX", 1.0 / 6.0)]),
    ((2, 1, 0), &[("XXY", 0.5), ("XZ", 2.0)]),
    ((1, 2, 0), &[("XYY", 0.5), ("YZ", 2.0)]),
    ((0, 3, 0), &[("YYY", 1.0 / 6.0)]),
    ((1, 0, 1), &[("XZ", 1.0)]),
    ((0, 1, 1), &[("YZ", 1.0)]),
];

pub fn taylor_poly(table: &DerivTable, order: u32) -> Result<TaylorPoly> {
    if order > 3 {
        return Err(Error::Unsupported(format!("Taylor order {order} > 3")));
    }
    let mut coeffs = BTreeMap::new();
    for (m, parts) in TERMS.iter() {
        if monomial_degree(*m) > order {
            continue;
        }
        let mut v = 0.0;
        for (w, c) in parts.iter() {
            let Some(d) = table.get(*w) else {
                return domain(format!("derivative table lacks `{}`", if w.is_empty() { "f" } else { w }));
            };
            v += c * d;
        }
        coeffs.insert(*m, v);
    }
    Ok(TaylorPoly { order, coeffs })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RemainderFit {
    /// +∞ when the remainder vanishes
    pub slope: f64,
    pub vanishing: bool,
    /// (ρ, max over directions of |f(x0 ∗ y) − P(y)|)
    pub samples: Vec<(f64, f64)>,
}

const DIRECTIONS: usize = 64;

/// Fixed set of unit-gauge directions.
fn directions() -> Vec<GPoint> {
    use rand::Rng;
    let mut rng = par::chunk_rng(0x7a71, 0);
    (0..DIRECTIONS)
        .map(|_| {
            let u = GPoint::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            u.dilate(1.0 / u.norm()).unwrap()
        })
        .collect()
}

pub fn taylor_remainder_slope<F>(f: &F, x0: &GPoint, order: u32, radii: &[f64]) -> Result<RemainderFit>
where
    F: Fn(&GPoint) -> f64 + ?Sized,
{
    if radii.len() < 3 {
        return domain("need at least 3 radii");
    }
    if radii.windows(2).any(|w| !(w[1] < w[0])) || !(radii[radii.len() - 1] > 0.0) {
        return domain("radii must be positive and strictly decreasing");
    }
    if radii[0] / radii[radii.len() - 1] < 100.0 {
        return domain("radii must span at least two decades");
    }
    let table = derivative_table(f, x0, order)?;
    let poly = taylor_poly(&table, order)?;
    let dirs = directions();
    let mut samples = vec![];
    for &rho in radii {
        let m = dirs
            .iter()
            .map(|u| {
                let y = u.dilate(rho).unwrap();
                (f(&x0.prod(&y)) - poly.eval(&y)).abs()
            })
            .fold(0.0, f64::max);
        samples.push((rho, m));
    }
    let floor = 1e-6 * (1.0 + f(x0).abs());
    if samples.iter().all(|s| s.1 <= floor) {
        return Ok(RemainderFit { slope: f64::INFINITY, vanishing: true, samples });
    }
    let pts: Vec<(f64, f64)> = samples.iter().filter(|s| s.1 > 0.0).map(|s| (s.0.log2(), s.1.log2())).collect();
    Ok(RemainderFit { slope: ols_slope(&pts), vanishing: false, samples })
}

/// Log-spaced radii from `hi` down to `lo`.
pub fn log_radii(hi: f64, lo: f64, n: usize) -> Vec<f64> {
    let (a, b) = (hi.ln(), lo.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

pub type Builtin = fn(&GPoint) -> f64;

pub const BUILTINS: [(&str, Builtin); 8] = [
    ("const", |_| 1.5),
    ("coord-p", |x| x.p),
    ("coord-q", |x| x.q),
    ("coord-r", |x| x.r),
    ("poly3", |x| x.p * x.p * x.q + x.p * x.r),
    ("sin-p-cos-r", |x| x.p.sin() * x.r.cos()),
    ("exp-q-r", |x| (x.q + 0.5 * x.r).exp()),
    // Lipschitz only: the order-1 remainder decays like ρ
    ("abs-p", |x| x.p.abs()),
];

pub fn builtin(name: &str) -> Option<Builtin> {
    BUILTINS.iter().find(|b| b.0 == name).map(|b| b.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn radii() -> Vec<f64> {
        log_radii(0.5, 0.004, 8)
    }

    #[test]
    fn word_enumeration() {
        assert_eq!(words_up_to(1), vec!["", "X", "Y"]);
        let w3 = words_up_to(3);
        for w in ["XY", "YX", "Z", "XXY", "XZ", "ZX", "YZ", "YYY"] {
            assert!(w3.contains(&w.to_string()), "{w}");
        }
        assert!(!w3.contains(&"ZZ".to_string()));
    }

    #[test]
    fn r_reproduced_at_origin() {
        let t: DerivTable = [("", 0.0), ("X", 0.0), ("Y", 0.0), ("XX", 0.0), ("YY", 0.0), ("XY", -2.0), ("YX", 2.0), ("Z", 1.0)]
            .iter()
            .map(|(w, v)| (w.to_string(), *v))
            .collect();
        let p = taylor_poly(&t, 2).unwrap();
        assert_eq!(p.coeff((1, 1, 0)), 0.0);
        assert_eq!(p.coeff((0, 0, 1)), 1.0);
        assert_eq!(p.coeffs.values().filter(|v| **v != 0.0).count(), 1);
        let num = derivative_table(&builtin("coord-r").unwrap(), &GPoint::new(0.0, 0.0, 0.0), 2).unwrap();
        assert!((num["XY"] + 2.0).abs() < 1e-9 && (num["YX"] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn simple_polynomials() {
        let o = GPoint::new(0.0, 0.0, 0.0);
        let p = taylor_poly(&derivative_table(&builtin("coord-p").unwrap(), &o, 1).unwrap(), 1).unwrap();
        assert!((p.coeff((1, 0, 0)) - 1.0).abs() < 1e-12);
        let c = taylor_poly(&derivative_table(&builtin("const").unwrap(), &o, 3).unwrap(), 3).unwrap();
        assert_eq!(c.coeff((0, 0, 0)), 1.5);
        assert!(c.coeffs.iter().filter(|(m, _)| **m != (0, 0, 0)).all(|(_, v)| *v == 0.0));
        assert!(taylor_poly(&DerivTable::new(), 4).is_err());
        assert!(taylor_poly(&DerivTable::new(), 1).is_err());
    }

    #[test]
    fn polynomial_remainders_vanish() {
        let o = GPoint::new(0.0, 0.0, 0.0);
        for (name, order) in [("coord-r", 2), ("const", 0), ("coord-p", 1), ("poly3", 3)] {
            let fit = taylor_remainder_slope(&builtin(name).unwrap(), &o, order, &radii()).unwrap();
            assert!(fit.vanishing, "{name}: {:?}", fit.samples);
        }
        let x0 = GPoint::new(0.3, -0.2, 0.7);
        let fit = taylor_remainder_slope(&builtin("poly3").unwrap(), &x0, 3, &radii()).unwrap();
        assert!(fit.vanishing, "{:?}", fit.samples);
    }

    #[test]
    fn smooth_remainders_decay() {
        let f = builtin("sin-p-cos-r").unwrap();
        for order in [1, 2, 3] {
            let fit = taylor_remainder_slope(&f, &GPoint::new(0.0, 0.0, 0.0), order, &radii()).unwrap();
            assert!(fit.slope >= order as f64 + 1.0 - 0.1, "order {order}: {}", fit.slope);
        }
        assert!(taylor_remainder_slope(&f, &GPoint::new(0.0, 0.0, 0.0), 2, &[0.1, 0.05, 0.02]).is_err());
        assert!(taylor_remainder_slope(&f, &GPoint::new(0.0, 0.0, 0.0), 4, &radii()).is_err());
    }

    #[test]
    fn kink_fails_order_one() {
        let fit = taylor_remainder_slope(&builtin("abs-p").unwrap(), &GPoint::IDENTITY, 1, &radii()).unwrap();
        assert!(!fit.vanishing && (fit.slope - 1.0).abs() < 0.05, "{fit:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn slope_survives_translation(p in -1.0f64..1.0, q in -1.0f64..1.0, r in -1.0f64..1.0) {
            let f = builtin("exp-q-r").unwrap();
            let a = taylor_remainder_slope(&f, &GPoint::new(0.0, 0.0, 0.0), 2, &radii()).unwrap().slope;
            let b = taylor_remainder_slope(&f, &GPoint::new(p, q, r), 2, &radii()).unwrap().slope;
            prop_assert!(a >= 2.9 && b >= 2.9, "{} {}", a, b);
        }
    }
}
