//! Polynomial roots by Aberth–Ehrlich iteration with Newton polishing.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::{Error, Result, TAU};

/// Horner evaluation of `p(z)` and `p'(z)`; `coeffs[j]` multiplies `z^j`.
pub(crate) fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

pub(crate) fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// All roots of the polynomial with coefficients `coeffs` (ascending powers).
/// The leading coefficient must be nonzero.
pub(crate) fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = coeffs.len().saturating_sub(1);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[deg];
    if lead.norm() == 0.0 {
        return Err(Error::invalid("leading polynomial coefficient is zero"));
    }
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    // Cauchy-type radius for the starting circle.
    let radius = monic[..deg]
        .iter()
        .enumerate()
        .map(|(j, c)| libm::pow(c.norm() * deg as f64, 1.0 / (deg - j) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let theta = TAU * k as f64 / deg as f64 + 0.4;
            Complex64::from_polar(radius * 0.5, theta)
        })
        .collect();
    let mut converged = false;
    let mut last = f64::INFINITY;
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..deg {
            let (p, dp) = eval_with_derivative(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulse: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        Complex64::new(1.0, 0.0) / d
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - ratio * repulse;
            let step = if denom.norm() == 0.0 { ratio } else { ratio / denom };
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        last = max_step;
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }
    if !converged && last > 1e-9 {
        return Err(Error::NoConvergence { iterations: 500, last_change: last, residual: f64::NAN });
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval_with_derivative(&monic, *r);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !(step.re.is_finite() && step.im.is_finite()) || step.norm() > 1e-6 * r.norm().max(1.0) {
                break;
            }
            *r -= step;
        }
    }
    Ok(z)
}

/// Coefficients of `Π (z − r)` times `lead`.
pub(crate) fn from_roots(roots: &[Complex64], lead: Complex64) -> Vec<Complex64> {
    let mut c = alloc::vec![lead];
    for &r in roots {
        let mut next = alloc::vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (j, &cj) in c.iter().enumerate() {
            next[j + 1] += cj;
            next[j] -= cj * r;
        }
        c = next;
    }
    c
}
