//! Coefficient tables as text: one `n re im` line per nonzero frequency,
//! sorted by `n`. Blank lines and `#` comments are ignored on input.

use std::fmt::Write as _;
use std::path::Path;

use ergseries_core::{Complex64, TorusFunction};

use crate::error::AppError;

pub fn parse_table(text: &str) -> Result<TorusFunction, AppError> {
    let mut terms: Vec<(i64, Complex64)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = || AppError::schema(format!("line {}: expected `n re im`, got `{raw}`", lineno + 1));
        if fields.len() != 3 {
            return Err(bad());
        }
        let n: i64 = fields[0].parse().map_err(|_| bad())?;
        let re: f64 = fields[1].parse().map_err(|_| bad())?;
        let im: f64 = fields[2].parse().map_err(|_| bad())?;
        if !(re.is_finite() && im.is_finite()) {
            return Err(AppError::schema(format!("line {}: non-finite coefficient", lineno + 1)));
        }
        if terms.iter().any(|t| t.0 == n) {
            return Err(AppError::schema(format!("line {}: frequency {n} listed twice", lineno + 1)));
        }
        terms.push((n, Complex64::new(re, im)));
    }
    Ok(TorusFunction::new(terms))
}

/// Shortest round-trip formatting, so `parse_table(&format_table(f)) == f`.
pub fn format_table(f: &TorusFunction) -> String {
    let mut out = String::new();
    for (n, c) in f.terms() {
        writeln!(out, "{n} {:?} {:?}", c.re, c.im).unwrap();
    }
    out
}

pub fn read_table(path: &Path) -> Result<TorusFunction, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::schema(format!("cannot read coefficient file {}: {e}", path.display())))?;
    parse_table(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let f = TorusFunction::new([
            (-9, Complex64::new(0.1, -1.0 / 3.0)),
            (0, Complex64::new(1e-300, 0.0)),
            (4, Complex64::new(-2.5, std::f64::consts::PI)),
        ]);
        let text = format_table(&f);
        assert_eq!(parse_table(&text).unwrap(), f);
        assert!(text.lines().next().unwrap().starts_with("-9 "));
    }

    #[test]
    fn comments_and_errors() {
        let f = parse_table("# header\n1 0.5 0\n\n-1 0.5 0 # conj\n").unwrap();
        assert_eq!(f, TorusFunction::cos(1, 1.0));
        assert!(parse_table("1 0.5").is_err());
        assert!(parse_table("1 0.5 0\n1 0.5 0").is_err());
        assert!(parse_table("1 nan 0").is_err());
    }
}
