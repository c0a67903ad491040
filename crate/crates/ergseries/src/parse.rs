//! Short textual forms for functions, coefficient rules and points.
//!
//! Functions: `cos1`, `0.5*cos9`, `cos1+-1*cos3`, `exp1`, `sin2`, or a path to
//! an `n re im` table (anything ending in `.txt` or containing `/`).
//! Coefficients: `power:α`, `constant:c`, `explicit:a0,a1,…`.
//! Points: a decimal in `[0, 1)` or a fraction `p/q`.

use std::path::Path;

use ergseries_core::riesz::SineCoefficients;
use ergseries_core::{Complex64, CoefficientSequence, OrbitPoint, TorusFunction};

use crate::coeffs;
use crate::error::AppError;

pub fn is_file_spec(s: &str) -> bool {
    s.ends_with(".txt") || s.contains('/') || s.contains('\\')
}

/// Resolve a function spec; relative table paths are taken from `base`.
pub fn function(s: &str, base: &Path) -> Result<TorusFunction, AppError> {
    let s = s.trim();
    if is_file_spec(s) {
        return coeffs::read_table(&base.join(s));
    }
    let mut f = TorusFunction::zero();
    for term in s.split('+') {
        f = f.add(&parse_term(term.trim(), s)?);
    }
    Ok(f)
}

fn parse_term(term: &str, whole: &str) -> Result<TorusFunction, AppError> {
    let bad = || AppError::schema(format!("cannot parse function `{whole}` (e.g. `cos1+0.5*cos9` or `coeffs.txt`)"));
    let (amp, body) = match term.split_once('*') {
        Some((a, b)) => (a.trim().parse::<f64>().map_err(|_| bad())?, b.trim()),
        None if term.starts_with('-') => (-1.0, &term[1..]),
        None => (1.0, term),
    };
    let split = body.find(|c: char| c.is_ascii_digit()).ok_or_else(bad)?;
    let (kind, k) = body.split_at(split);
    let k: i64 = k.parse().map_err(|_| bad())?;
    let f = match kind {
        "cos" => TorusFunction::cos(k, amp),
        "sin" => TorusFunction::sin(k, amp),
        "exp" => TorusFunction::exp(k).scale(Complex64::new(amp, 0.0)),
        "const" => TorusFunction::constant(amp * k as f64),
        _ => return Err(bad()),
    };
    Ok(f)
}

fn list(s: &str, what: &str) -> Result<Vec<f64>, AppError> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| AppError::schema(format!("bad number `{v}` in {what}"))))
        .collect()
}

pub fn coefficients(s: &str) -> Result<CoefficientSequence, AppError> {
    let (kind, arg) = s
        .split_once(':')
        .ok_or_else(|| AppError::schema(format!("coefficient rule `{s}` should look like `power:0.75`")))?;
    let one = |v: &str| {
        v.trim().parse::<f64>().map_err(|_| AppError::schema(format!("bad parameter in coefficient rule `{s}`")))
    };
    match kind.trim() {
        "power" => Ok(CoefficientSequence::power(one(arg)?, 0)),
        "constant" => Ok(CoefficientSequence::constant(one(arg)?, 0)),
        "explicit" => Ok(CoefficientSequence::explicit(list(arg, "explicit coefficients")?)),
        other => Err(AppError::schema(format!("unknown coefficient rule `{other}` (power, constant, explicit)"))),
    }
}

pub fn sine_coefficients(s: &str) -> Result<SineCoefficients, AppError> {
    let bad = || AppError::schema(format!("sine coefficients `{s}` must be power:τ or explicit:c1,c2,…"));
    match s.split_once(':').map(|(k, v)| (k.trim(), v)) {
        Some(("power", tau)) => Ok(SineCoefficients::Power(tau.trim().parse().map_err(|_| bad())?)),
        Some(("explicit", v)) => Ok(SineCoefficients::Explicit(list(v, "sine coefficients")?)),
        _ => Err(bad()),
    }
}

pub fn point(s: &str) -> Result<OrbitPoint, AppError> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|_| AppError::schema(format!("bad fraction `{s}`")))?;
        let q: u64 = q.trim().parse().map_err(|_| AppError::schema(format!("bad fraction `{s}`")))?;
        return Ok(OrbitPoint::rational(p, q)?);
    }
    let x: f64 = s.parse().map_err(|_| AppError::schema(format!("bad point `{s}`")))?;
    Ok(OrbitPoint::from_f64(x)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn function_forms() {
        let base = Path::new(".");
        assert_eq!(function("cos1", base).unwrap(), TorusFunction::cos(1, 1.0));
        let f = function("cos1+0.5*cos9", base).unwrap();
        assert!((f.wiener_norm() - 1.5).abs() < 1e-15);
        let g = function("cos1+-1*cos3", base).unwrap();
        assert_eq!(g, TorusFunction::cos(1, 1.0).sub(&TorusFunction::cos(3, 1.0)));
        assert_eq!(function("-exp2", base).unwrap().coeff(2), Complex64::new(-1.0, 0.0));
        assert!(function("tan1", base).is_err());
        assert!(function("cos", base).is_err());
    }

    #[test]
    fn coefficient_forms() {
        assert_eq!(coefficients("power:0.75").unwrap(), CoefficientSequence::power(0.75, 0));
        assert_eq!(coefficients("explicit:1,0.5").unwrap(), CoefficientSequence::explicit(vec![1.0, 0.5]));
        assert!(coefficients("power").is_err());
        assert!(coefficients("log:1").is_err());
        assert_eq!(sine_coefficients("power:2").unwrap(), SineCoefficients::Power(2.0));
        assert_eq!(sine_coefficients("explicit:1,0,-1").unwrap(), SineCoefficients::Explicit(vec![1.0, 0.0, -1.0]));
    }

    #[test]
    fn point_forms() {
        assert_eq!(point("1/8").unwrap(), OrbitPoint::rational(1, 8).unwrap());
        assert!((point("0.37").unwrap().to_f64() - 0.37).abs() < 1e-16);
        assert!(point("1/0").is_err());
        assert!(point("abc").is_err());
    }
}
