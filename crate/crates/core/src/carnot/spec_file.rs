//! Text format for stratifications:
//!
//! ```text
//! # Engel algebra
//! layers = [2, 1, 1]
//! bracket 1 2 3 1
//! bracket 1 3 4 1
//! ```
//!
//! Values are integers, fractions `a/b`, or decimals. Integers, fractions and
//! short decimals are kept exact.

use super::{Bracket, StratificationSpec};
use crate::error::{Error, Result};
use crate::numeric::parse_const;

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

pub fn parse_spec(text: &str) -> Result<StratificationSpec> {
    let mut layers: Option<Vec<usize>> = None;
    let mut brackets = vec![];
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix("layers") {
            let rest = rest.trim_start();
            let Some(rest) = rest.strip_prefix('=') else {
                return perr(line, "expected `layers = [..]`");
            };
            let inner = rest.trim().trim_start_matches('[').trim_end_matches(']');
            let mut v = vec![];
            for tok in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                match tok.parse::<usize>() {
                    Ok(q) if q > 0 => v.push(q),
                    _ => return perr(line, format!("bad layer dimension `{tok}`")),
                }
            }
            if v.is_empty() {
                return perr(line, "empty layer list");
            }
            if layers.is_some() {
                return perr(line, "layers given twice");
            }
            layers = Some(v);
        } else if let Some(rest) = body.strip_prefix("bracket") {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if toks.len() != 4 {
                return perr(line, "expected `bracket i j l value`");
            }
            let idx: Vec<usize> = match toks[..3].iter().map(|t| t.parse::<usize>()).collect() {
                Ok(v) => v,
                Err(_) => return perr(line, "bracket indices must be positive integers"),
            };
            let Some(value) = parse_const(toks[3]) else {
                return perr(line, format!("bad value `{}`", toks[3]));
            };
            brackets.push(Bracket { i: idx[0], j: idx[1], l: idx[2], value });
        } else {
            return perr(line, format!("unrecognised line `{body}`"));
        }
    }
    let Some(layers) = layers else {
        return perr(text.lines().count().max(1), "missing `layers = [..]`");
    };
    StratificationSpec::new(layers, brackets).map_err(|e| match e {
        Error::Domain(m) => Error::Parse { line: 0, msg: m },
        other => other,
    })
}

pub fn write_spec(spec: &StratificationSpec) -> String {
    let dims: Vec<String> = spec.layer_dims().iter().map(|q| q.to_string()).collect();
    let mut out = format!("layers = [{}]\n", dims.join(", "));
    for b in spec.given_brackets() {
        out.push_str(&format!("bracket {} {} {} {}\n", b.i, b.j, b.l, b.value));
    }
    out
}
