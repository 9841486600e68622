//! Exact-when-possible numbers read from text files.

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

/// A number that stays exact when it was written as an integer, fraction or short decimal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Const {
    Exact(Rational64),
    Real(f64),
}

impl Const {
    pub fn to_f64(self) -> f64 {
        match self {
            Const::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Const::Real(x) => x,
        }
    }

    pub fn neg(self) -> Const {
        match self {
            Const::Exact(r) => Const::Exact(-r),
            Const::Real(x) => Const::Real(-x),
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Const::Exact(r) => r.is_zero(),
            Const::Real(x) => x == 0.0,
        }
    }
}

impl std::fmt::Display for Const {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Const::Exact(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Const::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            // exponent form keeps it from reading back as an exact decimal
            Const::Real(x) => write!(f, "{x:e}"),
        }
    }
}

pub fn parse_const(s: &str) -> Option<Const> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: i64 = a.trim().parse().ok()?;
        let b: i64 = b.trim().parse().ok()?;
        if b == 0 {
            return None;
        }
        return Some(Const::Exact(Rational64::new(a, b)));
    }
    if let Ok(n) = s.parse::<i64>() {
        return Some(Const::Exact(Rational64::from_integer(n)));
    }
    if let Some(r) = parse_decimal(s) {
        return Some(Const::Exact(r));
    }
    let x: f64 = s.parse().ok()?;
    x.is_finite().then_some(Const::Real(x))
}

/// "-12.375" → -99/8; None if it does not fit comfortably in i64.
pub fn parse_decimal(s: &str) -> Option<Rational64> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.')?;
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || int.len() + frac.len() > 17 {
        return None;
    }
    let digits: i64 = format!("{int}{frac}").parse().ok()?;
    let den = 10i64.checked_pow(frac.len() as u32)?;
    let r = Rational64::new(digits, den);
    Some(if neg { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_and_decimals_exact() {
        assert_eq!(parse_const("-4"), Some(Const::Exact(Rational64::from_integer(-4))));
        assert_eq!(parse_const("3/6"), Some(Const::Exact(Rational64::new(1, 2))));
        assert_eq!(parse_const("-0.125"), Some(Const::Exact(Rational64::new(-1, 8))));
        assert_eq!(parse_const("1e-3"), Some(Const::Real(1e-3)));
        assert_eq!(parse_const("1/0"), None);
    }

}
