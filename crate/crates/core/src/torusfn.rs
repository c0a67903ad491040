//! Trigonometric polynomials on the circle `𝕋 = ℝ/ℤ`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::orbit::OrbitPoint;
use crate::{PI, TAU};

/// Default grid for base-3 work: `3^7 · 8`.
pub const DEFAULT_GRID_SIZE: usize = 17_496;

/// Window `a` of the Hölder seminorm `sup_{0<|x−y|≤a} |f(x)−f(y)|/|x−y|^δ`.
/// Any `0 < a ≤ 1/2` gives an equivalent seminorm; this one is fixed.
pub const HOLDER_WINDOW: f64 = 0.5;

/// Closed interval `[lo, hi]`, used for sup norms known only up to grid slack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    /// Grid maximum (certified lower bound) and Bernstein-slack upper bound.
    pub sup: Interval,
    pub l2: f64,
    pub wiener: f64,
}

/// A finitely supported Fourier series `Σ f̂(n) e^{2πinx}`.
///
/// The zero coefficient is always present in the table. Other exact zeros are
/// dropped on construction so that the support is meaningful.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusFunction {
    coeffs: BTreeMap<i64, Complex64>,
    grid_size: usize,
}

impl Default for TorusFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl TorusFunction {
    pub fn new<I>(coeffs: I) -> Self
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let mut map = BTreeMap::new();
        for (n, c) in coeffs {
            *map.entry(n).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        map.retain(|&n, c| n == 0 || *c != Complex64::new(0.0, 0.0));
        map.entry(0).or_insert(Complex64::new(0.0, 0.0));
        let grid_size = default_grid_size(max_abs_key(&map));
        TorusFunction {
            coeffs: map,
            grid_size,
        }
    }

    pub fn zero() -> Self {
        Self::new(core::iter::empty())
    }

    pub fn constant(c: f64) -> Self {
        Self::new([(0, Complex64::new(c, 0.0))])
    }

    /// `e^{2πikx}`.
    pub fn exp(k: i64) -> Self {
        Self::new([(k, Complex64::new(1.0, 0.0))])
    }

    /// `amp · cos 2πkx`.
    pub fn cos(k: i64, amp: f64) -> Self {
        if k == 0 {
            return Self::constant(amp);
        }
        Self::new([(k, Complex64::new(amp / 2.0, 0.0)), (-k, Complex64::new(amp / 2.0, 0.0))])
    }

    /// `amp · sin 2πkx`.
    pub fn sin(k: i64, amp: f64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        Self::new([(k, Complex64::new(0.0, -amp / 2.0)), (-k, Complex64::new(0.0, amp / 2.0))])
    }

    /// Overrides the evaluation grid. The grid must resolve the spectrum:
    /// `M > 8 · max frequency`.
    pub fn with_grid_size(mut self, m: usize) -> Result<Self> {
        let need = 8 * self.max_freq() as usize;
        if m < 2 || m <= need {
            return Err(Error::invalid(alloc::format!(
                "grid size {m} must exceed 8 x max frequency = {need}"
            )));
        }
        self.grid_size = m;
        Ok(self)
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Complex64> {
        &self.coeffs
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&n, &c)| (n, c))
    }

    /// Nonzero terms only.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.iter().filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
    }

    pub fn mean(&self) -> Complex64 {
        self.coeff(0)
    }

    pub fn max_freq(&self) -> u64 {
        max_abs_key(&self.coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.terms().next().is_none()
    }

    /// Conjugate symmetry `f̂(−n) = conj f̂(n)` up to rounding.
    pub fn is_real(&self) -> bool {
        let tol = 1e-14 * self.wiener_norm().max(f64::MIN_POSITIVE);
        self.coeffs
            .iter()
            .all(|(&n, &c)| (self.coeff(-n) - c.conj()).norm() <= tol)
    }

    pub fn evaluate(&self, x: f64) -> Complex64 {
        self.terms()
            .map(|(n, c)| c * unit(frac(n as f64 * x)))
            .sum()
    }

    /// Evaluation at an exactly represented point; the phase `n·x mod 1` is
    /// reduced in integer arithmetic before rounding to `f64`.
    pub fn evaluate_at(&self, x: &OrbitPoint) -> Complex64 {
        self.terms().map(|(n, c)| c * unit(x.phase(n))).sum()
    }

    /// `f(x + s) − f(x)` without cancellation in the phase factors.
    pub fn difference_at(&self, x: &OrbitPoint, s: f64) -> Complex64 {
        self.terms()
            .map(|(n, c)| {
                let ns = n as f64 * s;
                // e^{2πi ns} − 1 = 2i sin(π ns) e^{iπ ns}
                let d = Complex64::new(0.0, 2.0 * libm::sin(PI * ns)) * unit(ns / 2.0);
                c * unit(x.phase(n)) * d
            })
            .sum()
    }

    /// Samples `f(j/M)` for `j < M` on this function's grid.
    pub fn grid_samples(&self) -> Vec<Complex64> {
        self.samples_on(self.grid_size)
    }

    /// Samples `f(j/m)` for `j < m` on an arbitrary uniform grid.
    pub fn samples_on(&self, m: usize) -> Vec<Complex64> {
        let roots = roots_of_unity(m);
        let terms: Vec<(usize, Complex64)> = self
            .terms()
            .map(|(n, c)| (n.rem_euclid(m as i64) as usize, c))
            .collect();
        (0..m)
            .map(|j| {
                terms
                    .iter()
                    .map(|&(r, c)| c * roots[(r * j) % m])
                    .sum()
            })
            .collect()
    }

    pub fn wiener_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.coeffs.values().map(|c| c.norm_sqr()).sum())
    }

    /// Sup norm as `[grid max, grid max + 2π·maxfreq·wiener/M]`, the upper end
    /// clipped by the Wiener norm.
    pub fn sup_norm(&self) -> Interval {
        if self.is_zero() {
            return Interval::point(0.0);
        }
        let wiener = self.wiener_norm();
        if self.terms().count() == 1 {
            return Interval::point(wiener);
        }
        let lo = self
            .grid_samples()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let slack = TAU * self.max_freq() as f64 * wiener / self.grid_size as f64;
        let lo = lo.min(wiener);
        Interval {
            lo,
            hi: (lo + slack).min(wiener),
        }
    }

    pub fn norms(&self) -> Norms {
        Norms {
            sup: self.sup_norm(),
            l2: self.l2_norm(),
            wiener: self.wiener_norm(),
        }
    }

    /// Term-by-term derivative: coefficients `2πin·f̂(n)`.
    pub fn derivative(&self) -> Self {
        TorusFunction {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&n, &c)| (n, c * Complex64::new(0.0, TAU * n as f64)))
                .collect(),
            grid_size: self.grid_size,
        }
        .pruned()
    }

    /// Mean-zero antiderivative; requires `f̂(0) = 0`.
    pub fn antiderivative(&self) -> Result<Self> {
        if self.mean() != Complex64::new(0.0, 0.0) {
            return Err(Error::precondition(
                "antiderivative of a function with nonzero mean is not periodic",
            ));
        }
        Ok(TorusFunction {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&n, &c)| {
                    if n == 0 {
                        (0, c)
                    } else {
                        (n, c / Complex64::new(0.0, TAU * n as f64))
                    }
                })
                .collect(),
            grid_size: self.grid_size,
        })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.iter().map(|(n, c)| (n, c * s))).with_grid_of(self)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.iter().chain(other.iter())).with_grid_of_max(self, other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.iter().chain(other.iter().map(|(n, c)| (n, -c)))).with_grid_of_max(self, other)
    }

    /// Pointwise product (coefficient convolution).
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for (n, a) in self.terms() {
            for (m, b) in other.terms() {
                out.push((n + m, a * b));
            }
        }
        Self::new(out)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.iter().map(|(n, c)| (-n, c.conj()))).with_grid_of(self)
    }

    /// Real part `(f + conj f)/2`.
    pub fn real_part(&self) -> Self {
        let c = self.conj();
        self.add(&c).scale(Complex64::new(0.5, 0.0))
    }

    /// Keep the coefficients whose frequency satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(i64) -> bool) -> Self {
        Self::new(self.iter().filter(|&(n, _)| keep(n))).with_grid_of(self)
    }

    /// Reindex the coefficient table; entries mapped to `None` are dropped.
    pub fn reindex(&self, mut map: impl FnMut(i64) -> Option<i64>) -> Self {
        Self::new(self.iter().filter_map(|(n, c)| map(n).map(|m| (m, c))))
    }

    /// Sup-distance of the coefficient tables.
    pub fn coeff_distance(&self, other: &Self) -> f64 {
        self.sub(other)
            .coeffs
            .values()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Grid estimate of `sup_{|x−y|≤δ} |f(x)−f(y)|` for each scale.
    pub fn empirical_modulus(&self, scales: &[f64]) -> Result<ModulusOfContinuity> {
        let m = self.grid_size;
        if scales.is_empty() {
            return Err(Error::invalid("no scales given"));
        }
        for w in scales.windows(2) {
            if !(w[1] < w[0]) {
                return Err(Error::invalid("scales must be strictly decreasing"));
            }
        }
        let smallest = *scales.last().unwrap();
        if !(smallest > 0.0) {
            return Err(Error::invalid("scales must be positive"));
        }
        if smallest < 2.0 / m as f64 {
            return Err(Error::invalid(alloc::format!(
                "scale {smallest} is below the grid resolution 2/{m}"
            )));
        }
        let samples = self.grid_samples();
        let max_shift = ((scales[0] * m as f64) as usize).min(m / 2).max(1);
        // cumulative[s] = max over shifts 1..=s of max_j |f(x_{j+s}) − f(x_j)|
        let mut cumulative = vec![0.0f64; max_shift + 1];
        for s in 1..=max_shift {
            let mut d = 0.0f64;
            for j in 0..m {
                d = d.max((samples[(j + s) % m] - samples[j]).norm());
            }
            cumulative[s] = cumulative[s - 1].max(d);
        }
        let doubling_ok = (1..=max_shift / 2)
            .all(|s| cumulative[2 * s] <= 2.0 * cumulative[s] + 1e-12 * (1.0 + cumulative[s]));
        let mut table: Vec<(f64, f64)> = scales
            .iter()
            .map(|&d| {
                let s = ((d * m as f64) as usize).min(max_shift);
                (d, cumulative[s])
            })
            .collect();
        table.reverse();
        Ok(ModulusOfContinuity::empirical(table, doubling_ok))
    }

    /// `sup_{0<|x−y|≤a} |f(x)−f(y)|/|x−y|^δ` on a uniform grid, `a = 1/2`.
    pub fn holder_seminorm(&self, delta: f64) -> Result<f64> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::invalid("Hölder exponent must lie in (0, 1]"));
        }
        let m = self.grid_size.min((16 * self.max_freq() as usize).max(256));
        let samples = self.samples_on(m);
        let max_shift = ((HOLDER_WINDOW * m as f64) as usize).max(1);
        let mut best = 0.0f64;
        for s in 1..=max_shift {
            let dist = libm::pow(s as f64 / m as f64, delta);
            for j in 0..m {
                best = best.max((samples[(j + s) % m] - samples[j]).norm() / dist);
            }
        }
        Ok(best)
    }

    fn pruned(self) -> Self {
        let g = self.grid_size;
        let mut f = Self::new(self.coeffs);
        f.grid_size = g.max(f.grid_size);
        f
    }

    fn with_grid_of(mut self, other: &Self) -> Self {
        self.grid_size = self.grid_size.max(other.grid_size);
        self
    }

    fn with_grid_of_max(mut self, a: &Self, b: &Self) -> Self {
        self.grid_size = self.grid_size.max(a.grid_size).max(b.grid_size);
        self
    }
}

/// Smallest grid of the form `17496 · 3^k` exceeding `8 · max_freq`.
pub fn default_grid_size(max_freq: u64) -> usize {
    let mut m = DEFAULT_GRID_SIZE;
    while (m as u64) <= 8 * max_freq {
        m *= 3;
    }
    m
}

fn max_abs_key(map: &BTreeMap<i64, Complex64>) -> u64 {
    map.iter()
        .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
        .map(|(n, _)| n.unsigned_abs())
        .max()
        .unwrap_or(0)
}

/// `e^{2πiθ}`.
#[inline]
pub(crate) fn unit(theta: f64) -> Complex64 {
    let (s, c) = libm::sincos(TAU * theta);
    Complex64::new(c, s)
}

#[inline]
pub(crate) fn frac(x: f64) -> f64 {
    x - libm::floor(x)
}

pub(crate) fn roots_of_unity(m: usize) -> Vec<Complex64> {
    (0..m).map(|j| unit(j as f64 / m as f64)).collect()
}

/// Which closed-form family a modulus of continuity belongs to.
#[derive(Debug, Clone, PartialEq)]
pub enum ModulusKind {
    /// `ω(t) = c·t^δ`.
    Holder { delta: f64, c: f64 },
    /// `ω(t) = c/|log t|^α` for `t ≤ 1/e`, constant `c` above.
    LogPower { alpha: f64, c: f64 },
    /// Measured `(δ, ω(δ))` pairs, ascending in `δ`.
    Empirical(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModulusOfContinuity {
    pub kind: ModulusKind,
    /// `∫₀¹ ω(t)/t dt`, `+∞` when divergent.
    pub dini_integral: f64,
    /// `ω(2δ) ≤ 2ω(δ)` held at every resolved scale.
    pub doubling_ok: bool,
}

impl ModulusOfContinuity {
    pub fn holder(delta: f64, c: f64) -> Result<Self> {
        if !(delta > 0.0) || !(c >= 0.0) {
            return Err(Error::invalid("Hölder modulus needs δ > 0 and c ≥ 0"));
        }
        Ok(ModulusOfContinuity {
            kind: ModulusKind::Holder { delta, c },
            dini_integral: c / delta,
            doubling_ok: delta <= 1.0,
        })
    }

    pub fn log_power(alpha: f64, c: f64) -> Result<Self> {
        if !(alpha > 0.0) || !(c >= 0.0) {
            return Err(Error::invalid("log-power modulus needs α > 0 and c ≥ 0"));
        }
        // ∫_0^{1/e} c/(t|log t|^α) dt = c/(α−1) for α > 1, plus c on [1/e, 1].
        let dini = if c == 0.0 {
            0.0
        } else if alpha > 1.0 {
            c / (alpha - 1.0) + c
        } else {
            f64::INFINITY
        };
        Ok(ModulusOfContinuity {
            kind: ModulusKind::LogPower { alpha, c },
            dini_integral: dini,
            doubling_ok: true,
        })
    }

    fn empirical(table: Vec<(f64, f64)>, doubling_ok: bool) -> Self {
        // Below the first scale a trigonometric polynomial is Lipschitz, so
        // ω(t) ≤ ω(δ₀)·t/δ₀ contributes at most ω(δ₀).
        let mut dini = table[0].1;
        for w in table.windows(2) {
            dini += w[1].1 * libm::log(w[1].0 / w[0].0);
        }
        let (last_d, last_w) = *table.last().unwrap();
        if last_d < 1.0 {
            dini += last_w * libm::log(1.0 / last_d);
        }
        ModulusOfContinuity {
            kind: ModulusKind::Empirical(table),
            dini_integral: dini,
            doubling_ok,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            ModulusKind::Holder { delta, c } => c * libm::pow(t, *delta),
            ModulusKind::LogPower { alpha, c } => {
                if t >= 1.0 / core::f64::consts::E {
                    *c
                } else {
                    c / libm::pow(-libm::log(t), *alpha)
                }
            }
            ModulusKind::Empirical(table) => {
                let (d0, w0) = table[0];
                if t < d0 {
                    return w0 * t / d0;
                }
                table
                    .iter()
                    .take_while(|(d, _)| *d <= t)
                    .last()
                    .map(|&(_, w)| w)
                    .unwrap_or(w0)
            }
        }
    }

    pub fn is_dini(&self) -> bool {
        self.dini_integral.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn two_cosines() -> TorusFunction {
        TorusFunction::cos(1, 1.0).add(&TorusFunction::cos(9, 0.5))
    }

    #[test]
    fn evaluate_examples() {
        assert!((TorusFunction::exp(1).evaluate(0.0) - c(1.0)).norm() < 1e-15);
        assert!(TorusFunction::cos(1, 1.0).evaluate(0.25).norm() < 1e-15);
        let v = two_cosines().evaluate(0.125);
        assert!((v.re - 1.5 * core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn norm_examples() {
        let n = TorusFunction::cos(1, 1.0).norms();
        assert!((n.sup.lo - 1.0).abs() < 1e-14 && (n.sup.hi - 1.0).abs() < 1e-14);
        assert!((n.l2 - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((n.wiener - 1.0).abs() < 1e-15);

        let z = TorusFunction::zero().norms();
        assert_eq!((z.sup.lo, z.sup.hi, z.l2, z.wiener), (0.0, 0.0, 0.0, 0.0));

        let n = two_cosines().norms();
        assert!((n.wiener - 1.5).abs() < 1e-15);
        assert!((n.l2 - libm::sqrt(0.625)).abs() < 1e-15);
        assert!(n.sup.contains(1.5));
    }

    #[test]
    fn grid_size_validation() {
        let f = TorusFunction::exp(100);
        assert!(f.clone().with_grid_size(800).is_err());
        assert!(f.with_grid_size(801).is_ok());
        assert!(default_grid_size(3000) > 24_000);
    }

    #[test]
    fn zero_coefficient_kept() {
        let f = TorusFunction::exp(3);
        assert_eq!(f.coeffs().get(&0), Some(&c(0.0)));
        assert_eq!(f.max_freq(), 3);
    }

    #[test]
    fn modulus_examples() {
        let f = TorusFunction::cos(1, 1.0);
        let m = f.empirical_modulus(&[0.5, 1e-3]).unwrap();
        assert!((m.eval(0.5) - 2.0).abs() < 1e-12);
        let lip = TAU * 1e-3;
        assert!((m.eval(1e-3) - lip).abs() / lip < 0.05);
        assert!(m.doubling_ok);

        let z = TorusFunction::zero().empirical_modulus(&[0.1]).unwrap();
        assert_eq!(z.eval(0.1), 0.0);

        assert!(f.empirical_modulus(&[1e-5]).is_err());
        assert!(f.empirical_modulus(&[0.1, 0.2]).is_err());
    }

    #[test]
    fn dini_closed_forms() {
        assert_eq!(ModulusOfContinuity::holder(0.5, 2.0).unwrap().dini_integral, 4.0);
        assert!(!ModulusOfContinuity::log_power(1.0, 1.0).unwrap().is_dini());
        assert!(ModulusOfContinuity::log_power(1.5, 1.0).unwrap().is_dini());
    }

    #[test]
    fn holder_seminorm_of_cosine() {
        // Lipschitz constant 2π is the δ = 1 seminorm.
        let s = TorusFunction::cos(1, 1.0).holder_seminorm(1.0).unwrap();
        assert!((s - TAU).abs() / TAU < 1e-3);
    }

    #[test]
    fn derivative_roundtrip() {
        let f = TorusFunction::sin(2, 0.3).add(&TorusFunction::cos(5, 1.0));
        let back = f.derivative().antiderivative().unwrap();
        assert!(back.coeff_distance(&f) < 1e-15);
        assert!(TorusFunction::constant(1.0).antiderivative().is_err());
    }
}
