//! Line-oriented field files.
//!
//! ```text
//! field-version 1
//! params 2 2 2
//! support L0
//! jrange 1 26
//! rule besov-saturating
//! 1 3 1 2 5 1/8
//! ```
//!
//! Besides the header lines above the reader accepts `beta b` (overrides β and
//! marks the field nonconforming), `round-s s` (exponent of a rounding rule),
//! `shift kp kq kr`, and the rules `zero`, `power(s)`, `scaled(c,base)` and
//! `monofractal-round(base,N)`.

use super::field::{BesovParams, CoefficientField, Rule, Support, EPS_COUNT};
use crate::error::{Error, Result};
use crate::lattice::index::MAX_SCALE;
use crate::numeric::parse_const;

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

fn fnum(tok: &str, line: usize) -> Result<f64> {
    match tok {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        _ => match tok.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => perr(line, format!("bad number `{tok}`")),
        },
    }
}

fn fmt_num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

/// Rule expression before params/beta/round-s are substituted.
#[derive(Debug)]
enum RuleExpr {
    Zero,
    Saturating,
    Power(f64),
    Scaled(f64, Box<RuleExpr>),
    Round(Box<RuleExpr>, u32),
}

fn parse_rule(text: &str, line: usize) -> Result<RuleExpr> {
    let t = text.trim();
    match t {
        "zero" => return Ok(RuleExpr::Zero),
        "besov-saturating" => return Ok(RuleExpr::Saturating),
        _ => {}
    }
    let Some((head, rest)) = t.split_once('(') else {
        return perr(line, format!("unknown rule `{t}`"));
    };
    let Some(inner) = rest.strip_suffix(')') else {
        return perr(line, format!("unbalanced parentheses in `{t}`"));
    };
    match head.trim() {
        "power" => Ok(RuleExpr::Power(fnum(inner.trim(), line)?)),
        "scaled" => {
            let Some((c, base)) = inner.split_once(',') else {
                return perr(line, "expected `scaled(c,base)`");
            };
            Ok(RuleExpr::Scaled(fnum(c.trim(), line)?, Box::new(parse_rule(base, line)?)))
        }
        "monofractal-round" => {
            let Some((base, n)) = inner.rsplit_once(',') else {
                return perr(line, "expected `monofractal-round(base,N)`");
            };
            let n: u32 = match n.trim().parse() {
                Ok(n) if n >= 1 => n,
                _ => return perr(line, format!("N must be a positive integer, got `{}`", n.trim())),
            };
            Ok(RuleExpr::Round(Box::new(parse_rule(base, line)?), n))
        }
        h => perr(line, format!("unknown rule `{h}`")),
    }
}

struct Header {
    params: Option<BesovParams>,
    beta: Option<f64>,
    round_s: Option<f64>,
}

fn build_rule(e: &RuleExpr, h: &Header, line: usize) -> Result<Rule> {
    Ok(match e {
        RuleExpr::Zero => Rule::Zero,
        RuleExpr::Power(s) => Rule::Power { s: *s },
        RuleExpr::Saturating => {
            let Some(params) = h.params else {
                return perr(line, "besov-saturating needs a `params s p q` line");
            };
            Rule::BesovSaturating { params, beta: h.beta.unwrap_or(params.beta()) }
        }
        RuleExpr::Scaled(c, base) => Rule::Scaled { factor: *c, base: Box::new(build_rule(base, h, line)?) },
        RuleExpr::Round(base, n) => {
            let Some(s) = h.round_s else {
                return perr(line, "monofractal-round needs a `round-s s` line");
            };
            Rule::Rounded { base: Box::new(build_rule(base, h, line)?), s, n: *n }
        }
    })
}

/// Parsed field together with the Besov parameters named in its header.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldFile {
    pub field: CoefficientField,
    pub params: Option<BesovParams>,
}

pub fn parse_field(text: &str) -> Result<FieldFile> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()));
    let mut lines = lines.by_ref().filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, "field-version 1")) => {}
        Some((n, l)) => return perr(n, format!("expected `field-version 1`, got `{l}`")),
        None => return perr(1, "empty field file"),
    }
    let mut h = Header { params: None, beta: None, round_s: None };
    let mut support = Support::L0;
    let mut jrange = (0, MAX_SCALE);
    let mut rule: Option<(RuleExpr, usize)> = None;
    let mut shift = None;
    let mut overlay = vec![];
    for (n, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks[0] {
            "params" => {
                if toks.len() != 4 {
                    return perr(n, "expected `params s p q`");
                }
                let (s, p, q) = (fnum(toks[1], n)?, fnum(toks[2], n)?, fnum(toks[3], n)?);
                h.params = Some(BesovParams::new(s, p, q).or_else(|e| perr(n, e.to_string()))?);
            }
            "beta" if toks.len() == 2 => h.beta = Some(fnum(toks[1], n)?),
            "round-s" if toks.len() == 2 => h.round_s = Some(fnum(toks[1], n)?),
            "support" => {
                support = match toks.get(1) {
                    Some(&"L0") if toks.len() == 2 => Support::L0,
                    Some(&"all") if toks.len() == 2 => Support::All,
                    _ => return perr(n, "expected `support L0|all`"),
                }
            }
            "jrange" => {
                let v: Vec<i64> = toks[1..].iter().filter_map(|t| t.parse().ok()).collect();
                if toks.len() != 3 || v.len() != 2 {
                    return perr(n, "expected `jrange jmin jmax`");
                }
                if v[0] < 0 || v[1] > MAX_SCALE || v[0] > v[1] {
                    return perr(n, format!("jrange must satisfy 0 <= jmin <= jmax <= {MAX_SCALE}"));
                }
                jrange = (v[0], v[1]);
            }
            "rule" => {
                let body = l["rule".len()..].trim();
                rule = Some((parse_rule(body, n)?, n));
            }
            "shift" => {
                let v: Vec<i64> = toks[1..].iter().filter_map(|t| t.parse().ok()).collect();
                if toks.len() != 4 || v.len() != 3 {
                    return perr(n, "expected `shift kp kq kr`");
                }
                shift = Some(([v[0], v[1], v[2]], n));
            }
            _ => {
                if toks.len() != 6 {
                    return perr(n, format!("unrecognised line `{l}`"));
                }
                let ints: Vec<i64> = match toks[..5].iter().map(|t| t.parse::<i64>()).collect() {
                    Ok(v) => v,
                    Err(_) => return perr(n, format!("unrecognised line `{l}`")),
                };
                if !(1..=EPS_COUNT as i64).contains(&ints[0]) {
                    return perr(n, format!("ε must lie in 1..={EPS_COUNT}"));
                }
                let Some(value) = parse_const(toks[5]) else {
                    return perr(n, format!("bad coefficient `{}`", toks[5]));
                };
                overlay.push((n, ints[0] as u8, ints[1], [ints[2], ints[3], ints[4]], value));
            }
        }
    }
    let Some((expr, rline)) = rule else {
        return perr(text.lines().count().max(1), "missing `rule` line");
    };
    let built = build_rule(&expr, &h, rline)?;
    let mut field = CoefficientField::new(built, support, jrange.0, jrange.1).or_else(|e| perr(0, e.to_string()))?;
    for (n, eps, j, k, v) in overlay {
        field.set_overlay(eps, j, k, v).or_else(|e| perr(n, e.to_string()))?;
    }
    if let Some((m, n)) = shift {
        field = field.with_shift(m).or_else(|e| perr(n, e.to_string()))?;
    }
    Ok(FieldFile { field, params: h.params })
}

fn rule_text(r: &Rule, out: &mut Header) -> String {
    match r {
        Rule::Zero => "zero".into(),
        Rule::Power { s } => format!("power({})", fmt_num(*s)),
        Rule::BesovSaturating { params, beta } => {
            out.params = Some(*params);
            if *beta != params.beta() {
                out.beta = Some(*beta);
            }
            "besov-saturating".into()
        }
        Rule::Scaled { factor, base } => format!("scaled({},{})", fmt_num(*factor), rule_text(base, out)),
        Rule::Rounded { base, s, n } => {
            out.round_s = Some(*s);
            format!("monofractal-round({},{n})", rule_text(base, out))
        }
    }
}

/// Serialise a field; `params` is written when the rule does not carry its own.
pub fn write_field(field: &CoefficientField, params: Option<&BesovParams>) -> String {
    let mut h = Header { params: params.copied(), beta: None, round_s: None };
    let rule = rule_text(field.rule(), &mut h);
    let mut out = String::from("field-version 1\n");
    if let Some(p) = h.params {
        out.push_str(&format!("params {} {} {}\n", fmt_num(p.s), fmt_num(p.p), fmt_num(p.q)));
    }
    if let Some(b) = h.beta {
        out.push_str(&format!("beta {}\n", fmt_num(b)));
    }
    if let Some(s) = h.round_s {
        out.push_str(&format!("round-s {}\n", fmt_num(s)));
    }
    out.push_str(match field.support() {
        Support::L0 => "support L0\n",
        Support::All => "support all\n",
    });
    let (lo, hi) = field.j_range();
    out.push_str(&format!("jrange {lo} {hi}\n"));
    out.push_str(&format!("rule {rule}\n"));
    let m = field.shift();
    if m != [0, 0, 0] {
        out.push_str(&format!("shift {} {} {}\n", m[0], m[1], m[2]));
    }
    for (&(eps, j, k), v) in field.overlay() {
        out.push_str(&format!("{eps} {j} {} {} {} {v}\n", k[0], k[1], k[2]));
    }
    out
}
