//! CSV and table output.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::Fail;

/// 17 significant digits, '.' decimal, `inf`/`-inf` for infinities.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Fail> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        Some(p) => File::create(p)
            .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| Fail::Usage(format!("cannot create {}: {e}", p.display()))),
    }
}

pub fn io_fail(e: io::Error) -> Fail {
    Fail::Usage(format!("write failed: {e}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// informational, never fails the suite
    Note,
}

impl Status {
    pub fn of(ok: bool) -> Status {
        if ok { Status::Pass } else { Status::Fail }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Note => "NOTE",
        }
    }
}

pub struct Row {
    pub name: String,
    pub observed: String,
    pub expected: String,
    pub status: Status,
}

pub fn row(name: impl Into<String>, observed: impl ToString, expected: impl ToString, status: Status) -> Row {
    Row { name: name.into(), observed: observed.to_string(), expected: expected.to_string(), status }
}

pub fn print_table(suite: &str, rows: &[Row]) {
    let w0 = rows.iter().map(|r| r.name.len()).max().unwrap_or(0).max(5);
    let w1 = rows.iter().map(|r| r.observed.chars().count()).max().unwrap_or(0).max(8);
    let w2 = rows.iter().map(|r| r.expected.chars().count()).max().unwrap_or(0).max(8);
    println!("[{suite}]");
    println!("{:<w0$}  {:<w1$}  {:<w2$}  status", "check", "observed", "expected");
    for r in rows {
        println!("{:<w0$}  {:<w1$}  {:<w2$}  {}", r.name, r.observed, r.expected, r.status.label());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(1.0), "1.0000000000000000e0");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
        let x = 1.0 / 3.0;
        assert_eq!(num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
}
