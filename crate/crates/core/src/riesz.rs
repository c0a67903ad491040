//! Correlation sequences, Toeplitz quadratic forms and spectral densities of
//! dilation systems `{f∘Tⁿ}`.
//!
//! Circle normalization: `γ(k) = ⟨f∘Tᵏ, f⟩ = ∫₀¹ f(qᵏx) conj f(x) dx` and the
//! Fejér density `s_N(t) = Σ_{|k|≤N} (1 − |k|/(N+1)) γ(k) e^{ikt}` with `t` in
//! radians. Lebesgue measure on `[−π, π]` carries an extra factor `2π`, which
//! this module never applies.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigen_residual, extreme_eigenvalues, CMatrix};
use crate::poly;
use crate::series::{sample_partial_sums, CoefficientSequence};
use crate::stats::{merge_all, Accumulator};
use crate::torusfn::TorusFunction;
use crate::transfer::ExpandingMap;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationSource {
    ExactFourier,
    MonteCarlo,
    /// Gram of `{φ(qⁿx)}` in `L²[0,1]` for a sine series `φ`.
    DilatedSine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationData {
    /// `γ(0), …, γ(K)`; negative lags are `γ(−k) = conj γ(k)`.
    pub gamma: Vec<Complex64>,
    pub source: CorrelationSource,
    pub f_ref: String,
}

impl CorrelationData {
    pub fn new(gamma: Vec<Complex64>, source: CorrelationSource, f_ref: impl Into<String>) -> Result<Self> {
        if gamma.is_empty() {
            return Err(Error::invalid("correlation sequence needs at least γ(0)"));
        }
        if gamma.iter().any(|g| !(g.re.is_finite() && g.im.is_finite())) {
            return Err(Error::invalid("correlation sequence contains non-finite values"));
        }
        let mut gamma = gamma;
        gamma[0].im = 0.0;
        Ok(CorrelationData { gamma, source, f_ref: f_ref.into() })
    }

    /// Largest available lag.
    pub fn max_lag(&self) -> usize {
        self.gamma.len() - 1
    }

    /// `γ(k)` for any sign of `k`, zero beyond the stored lags.
    pub fn at(&self, k: i64) -> Complex64 {
        let g = self.gamma.get(k.unsigned_abs() as usize).copied().unwrap_or(ZERO);
        if k < 0 {
            g.conj()
        } else {
            g
        }
    }

    fn require(&self, order: usize) -> Result<()> {
        if order == 0 {
            return Err(Error::invalid("Toeplitz order must be positive"));
        }
        if order > self.gamma.len() {
            return Err(Error::invalid(format!(
                "Toeplitz order {order} needs lags up to {}, only {} available",
                order - 1,
                self.max_lag()
            )));
        }
        Ok(())
    }

    /// `Γ_N[i][j] = γ(j − i)`, so that `a* Γ a = Σ a_m conj(aₙ) γ(m − n)`.
    pub(crate) fn toeplitz(&self, order: usize) -> CMatrix {
        CMatrix::from_fn(order, |i, j| self.at(j as i64 - i as i64))
    }

    /// `Σ_{m,n} a_m conj(aₙ) γ(m − n) = ‖Σ aₙ f∘Tⁿ‖₂²`.
    pub fn quadratic_form(&self, a: &[Complex64]) -> Result<Complex64> {
        self.require(a.len().max(1))?;
        let mut s = ZERO;
        for (m, am) in a.iter().enumerate() {
            for (n, an) in a.iter().enumerate() {
                s += am * an.conj() * self.at(m as i64 - n as i64);
            }
        }
        Ok(s)
    }

    /// `γ*(k) = Re γ(k)`: correlations of the symmetrized spectral measure.
    pub fn symmetrize(&self) -> CorrelationData {
        CorrelationData {
            gamma: self.gamma.iter().map(|g| Complex64::new(g.re, 0.0)).collect(),
            source: self.source,
            f_ref: format!("sym({})", self.f_ref),
        }
    }

    /// `|Q_γ(a) − Q_γ*(a)|` for a real coefficient vector; zero up to rounding.
    pub fn symmetrization_gap(&self, a: &[f64]) -> Result<f64> {
        let ac: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Ok((self.quadratic_form(&ac)? - self.symmetrize().quadratic_form(&ac)?).norm())
    }
}

/// Exact correlations `γ(k) = Σ_m f̂(m) conj f̂(qᵏm)` for `k = 0..=max_lag`.
pub fn correlations_exact(map: &ExpandingMap, f: &TorusFunction, max_lag: usize) -> CorrelationData {
    let mean = f.mean();
    let gamma = (0..=max_lag)
        .map(|k| match map.power(k) {
            Some(p) => f
                .terms()
                .filter_map(|(m, c)| m.checked_mul(p).map(|mp| c * f.coeff(mp).conj()))
                .sum::<Complex64>(),
            None => mean * mean.conj(),
        })
        .collect();
    CorrelationData { gamma, source: CorrelationSource::ExactFourier, f_ref: String::from("fourier") }
}

/// Gram correlations `γ(j) = ½ Σ_k c_k c_{k qʲ}` of `{φ(qⁿx)}` in `L²[0,1]`,
/// where `φ(x) = Σ c_k sin(kπx)` is given as `(k, c_k)` pairs with `k ≥ 1`.
pub fn dilated_sine_correlations(q: u64, sine: &[(u64, f64)], max_lag: usize) -> Result<CorrelationData> {
    let map = ExpandingMap::new(q)?;
    if sine.iter().any(|&(k, _)| k == 0) {
        return Err(Error::invalid("sine frequencies start at 1"));
    }
    let coeff = |k: u64| sine.iter().filter(|&&(j, _)| j == k).map(|&(_, c)| c).sum::<f64>();
    let gamma = (0..=max_lag)
        .map(|j| {
            let g = match map.power(j) {
                Some(p) => sine
                    .iter()
                    .filter_map(|&(k, c)| k.checked_mul(p as u64).map(|kp| c * coeff(kp)))
                    .sum::<f64>(),
                None => 0.0,
            };
            Complex64::new(0.5 * g, 0.0)
        })
        .collect();
    Ok(CorrelationData { gamma, source: CorrelationSource::DilatedSine, f_ref: String::from("dilated-sine") })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszConfig {
    /// `B²` below this is not a Riesz lower bound.
    pub threshold: f64,
    /// Largest relative drop of `λ_min` per order step that still counts as a plateau.
    pub plateau_drop: f64,
    /// Number of trailing orders inspected for the plateau.
    pub plateau_orders: usize,
}

impl Default for RieszConfig {
    fn default() -> Self {
        RieszConfig { threshold: 1e-3, plateau_drop: 0.1, plateau_orders: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderBounds {
    pub n: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Inverse-iteration residual `‖Γv − λv‖` at the worse of the two extremes.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RieszBounds {
    pub orders: Vec<OrderBounds>,
    /// Estimate of `A²`: largest `λ_max` over the orders.
    pub a_sq_est: f64,
    /// Estimate of `B²`: smallest `λ_min` over the orders.
    pub b_sq_est: f64,
    pub plateau: bool,
    pub is_riesz: bool,
    /// `λ_min` nonincreasing and `λ_max` nondecreasing along increasing orders.
    pub monotone: bool,
    pub config: RieszConfig,
}

/// Extremal eigenvalues of the Hermitian Toeplitz forms `Γ_N` for each order.
pub fn riesz_bounds(corr: &CorrelationData, orders: &[usize], cfg: RieszConfig) -> Result<RieszBounds> {
    if orders.is_empty() {
        return Err(Error::invalid("at least one Toeplitz order is required"));
    }
    let mut sorted = orders.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &n in &sorted {
        corr.require(n)?;
    }
    let solve = |n: usize| -> Result<OrderBounds> {
        let m = corr.toeplitz(n);
        let (lo, hi) = extreme_eigenvalues(&m);
        if lo < -1e-10 {
            return Err(Error::invalid(format!(
                "correlation data is not positive definite: order {n} Toeplitz minor has eigenvalue {lo:e}"
            )));
        }
        let residual = eigen_residual(&m, lo).max(eigen_residual(&m, hi));
        Ok(OrderBounds { n, lambda_min: lo, lambda_max: hi, residual })
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<OrderBounds> = {
        use rayon::prelude::*;
        sorted.par_iter().map(|&n| solve(n)).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<OrderBounds> = sorted.iter().map(|&n| solve(n)).collect::<Result<_>>()?;

    let a_sq_est = rows.iter().map(|r| r.lambda_max).fold(f64::NEG_INFINITY, f64::max);
    let b_sq_est = rows.iter().map(|r| r.lambda_min).fold(f64::INFINITY, f64::min);
    let slack = 1e-10 * a_sq_est.abs().max(1.0);
    let monotone = rows.windows(2).all(|w| {
        w[1].lambda_min <= w[0].lambda_min + slack && w[1].lambda_max >= w[0].lambda_max - slack
    });
    let tail = &rows[rows.len().saturating_sub(cfg.plateau_orders.max(1))..];
    let plateau = tail.windows(2).all(|w| {
        let prev = w[0].lambda_min;
        prev > 0.0 && (prev - w[1].lambda_min) / prev <= cfg.plateau_drop
    });
    Ok(RieszBounds {
        orders: rows,
        a_sq_est,
        b_sq_est,
        plateau,
        is_riesz: b_sq_est >= cfg.threshold && plateau,
        monotone,
        config: cfg,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FejerDensity {
    pub n: usize,
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    pub inf: f64,
    pub sup: f64,
}

/// Fejér means of the spectral measure on the grid `t` (radians).
pub fn fejer_density(corr: &CorrelationData, n: usize, t: &[f64]) -> Result<FejerDensity> {
    corr.require(n + 1)?;
    let w = |k: usize| 1.0 - k as f64 / (n + 1) as f64;
    let values: Vec<f64> = t
        .iter()
        .map(|&t| {
            corr.gamma[0].re
                + 2.0
                    * (1..=n)
                        .map(|k| w(k) * (corr.gamma[k] * Complex64::from_polar(1.0, k as f64 * t)).re)
                        .sum::<f64>()
        })
        .collect();
    let inf = values.iter().copied().fold(f64::INFINITY, f64::min);
    let sup = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if inf < -1e-9 {
        return Err(Error::invalid(format!(
            "Fejér mean of order {n} is negative ({inf:e}); correlations are not those of a positive measure"
        )));
    }
    Ok(FejerDensity { n, t: t.to_vec(), values, inf, sup })
}

/// `(s(t) + s(−t))/2` given samples at `t` and at `−t`.
pub fn symmetrize_density(at_t: &[f64], at_neg_t: &[f64]) -> Result<Vec<f64>> {
    if at_t.len() != at_neg_t.len() {
        return Err(Error::invalid("density samples must pair t with −t"));
    }
    Ok(at_t.iter().zip(at_neg_t).map(|(a, b)| 0.5 * (a + b)).collect())
}

/// Uniform grid of `m` points on `[−π, π)`.
pub fn angle_grid(m: usize) -> Vec<f64> {
    (0..m).map(|j| -crate::PI + crate::TAU * j as f64 / m as f64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FejerRieszFactor {
    /// `Q(z) = Σ q_j z^j` with `Q(0) > 0` and no zeros in the open unit disk.
    pub coeffs: Vec<Complex64>,
    /// `sup_t | |Q(e^{it})|² − p(t) |` on the check grid.
    pub residual: f64,
}

impl FejerRieszFactor {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        poly::eval(&self.coeffs, z)
    }
}

/// Factor `p(t) = Σ_{|k|≤n} c_k e^{ikt} ≥ 0` as `|Q(e^{it})|²`. Input is
/// `c_{−n}, …, c_n`.
pub fn fejer_riesz_factor(c: &[Complex64]) -> Result<FejerRieszFactor> {
    if c.len() % 2 == 0 {
        return Err(Error::invalid("trigonometric polynomial needs 2n+1 coefficients c_{−n}..c_n"));
    }
    let n = c.len() / 2;
    let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for k in 0..=n {
        if (c[n + k] - c[n - k].conj()).norm() > 1e-12 * scale.max(1.0) {
            return Err(Error::invalid("trigonometric polynomial is not real-valued: c_{−k} ≠ conj c_k"));
        }
    }
    let p = |t: f64| -> f64 {
        (0..c.len()).map(|j| (c[j] * Complex64::from_polar(1.0, (j as f64 - n as f64) * t)).re).sum()
    };
    let grid = angle_grid(64 * (n + 1));
    let pmin = grid.iter().map(|&t| p(t)).fold(f64::INFINITY, f64::min);
    if pmin < -1e-10 {
        return Err(Error::precondition(format!("polynomial is negative on the circle (min {pmin:e})")));
    }
    // Drop vanishing outer coefficients.
    let mut deg = n;
    while deg > 0 && c[n + deg].norm() <= 1e-15 * scale {
        deg -= 1;
    }
    let c0 = c[n].re;
    let coeffs = if deg == 0 {
        vec![Complex64::new(libm::sqrt(c0.max(0.0)), 0.0)]
    } else {
        let laurent: Vec<Complex64> = (0..=2 * deg).map(|j| c[n - deg + j]).collect();
        let roots = poly::roots(&laurent)?;
        let inner = select_inner_roots(&roots, deg)?;
        let shape = poly::from_roots(&inner, Complex64::new(1.0, 0.0));
        // Π (1 − conj(r) z) has coefficients reversed and conjugated from Π (z − r).
        let mut q: Vec<Complex64> = shape.iter().rev().map(|z| z.conj()).collect();
        let energy: f64 = q.iter().map(|z| z.norm_sqr()).sum();
        let alpha = libm::sqrt(c0 / energy);
        q.iter_mut().for_each(|z| *z *= alpha);
        q
    };
    let mut out = FejerRieszFactor { coeffs, residual: 0.0 };
    out.residual = grid
        .iter()
        .map(|&t| (out.eval(Complex64::from_polar(1.0, t)).norm_sqr() - p(t)).abs())
        .fold(0.0, f64::max);
    Ok(out)
}

const PAIR_TOL: f64 = 1e-7;
const CIRCLE_BAND: f64 = 1e-5;

/// Pick one root from each reflection pair `(r, 1/conj r)`.
fn select_inner_roots(roots: &[Complex64], deg: usize) -> Result<Vec<Complex64>> {
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    let mut circle = Vec::new();
    for &r in roots {
        let m = r.norm();
        if m < 1.0 - CIRCLE_BAND {
            inside.push(r);
        } else if m > 1.0 + CIRCLE_BAND {
            outside.push(r);
        } else {
            circle.push(r);
        }
    }
    let counts = (inside.len(), outside.len(), circle.len());
    let fail = |what: &str| {
        Error::numerical(format!(
            "Fejér–Riesz root pairing failed ({what}): {} inside, {} outside, {} on the circle",
            counts.0, counts.1, counts.2
        ))
    };
    if inside.len() != outside.len() || circle.len() % 2 == 1 {
        return Err(fail("unbalanced"));
    }
    let mut unmatched = outside.clone();
    for r in &inside {
        let mirror = Complex64::new(1.0, 0.0) / r.conj();
        let (idx, d) = unmatched
            .iter()
            .enumerate()
            .map(|(i, o)| (i, (o - mirror).norm() / mirror.norm()))
            .fold((usize::MAX, f64::INFINITY), |best, x| if x.1 < best.1 { x } else { best });
        if d > PAIR_TOL.max(1e-9 * mirror.norm()) && d > 1e-6 {
            return Err(fail("reflection mismatch"));
        }
        unmatched.swap_remove(idx);
    }
    // Roots on the circle have even multiplicity; split each cluster in half.
    circle.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    let mut on_circle = Vec::new();
    let mut i = 0;
    while i < circle.len() {
        let (a, b) = (circle[i], circle[i + 1]);
        let mid = (a + b) * 0.5;
        if (a - b).norm() > 1e-3 {
            return Err(fail("unpaired unimodular root"));
        }
        on_circle.push(mid / mid.norm());
        i += 2;
    }
    let mut chosen = inside;
    chosen.extend(on_circle);
    debug_assert_eq!(chosen.len(), deg);
    Ok(chosen)
}

/// Sine coefficients `c₁, c₂, …` of `φ(x) = Σ cₙ sin(nπx)`.
#[derive(Debug, Clone, PartialEq)]
pub enum SineCoefficients {
    /// `c₁, c₂, …` in order.
    Explicit(Vec<f64>),
    /// `cₙ = n^{−τ}`.
    Power(f64),
}

impl SineCoefficients {
    pub fn c(&self, n: u64) -> f64 {
        match self {
            SineCoefficients::Explicit(v) => {
                if n == 0 {
                    0.0
                } else {
                    v.get(n as usize - 1).copied().unwrap_or(0.0)
                }
            }
            SineCoefficients::Power(tau) => {
                if n == 0 {
                    0.0
                } else {
                    libm::pow(n as f64, -tau)
                }
            }
        }
    }

    /// `(k, c_k)` pairs with `k ≤ n_max`.
    pub fn pairs(&self, n_max: u64) -> Vec<(u64, f64)> {
        (1..=n_max).map(|k| (k, self.c(k))).filter(|&(_, c)| c != 0.0).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HlsGrid {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub t_max: f64,
    pub sigma_steps: usize,
    pub t_steps: usize,
    /// Terms kept for infinite coefficient rules.
    pub truncation: usize,
}

impl Default for HlsGrid {
    fn default() -> Self {
        HlsGrid { sigma_min: 0.05, sigma_max: 4.0, t_max: 50.0, sigma_steps: 40, t_steps: 401, truncation: 2000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlsVerdict {
    Satisfied,
    Violated,
    InconclusiveNearSigmaMin,
}

impl HlsVerdict {
    pub fn name(self) -> &'static str {
        match self {
            HlsVerdict::Satisfied => "Riesz-basis criterion satisfied on tested region",
            HlsVerdict::Violated => "violated",
            HlsVerdict::InconclusiveNearSigmaMin => "inconclusive near sigma_min",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HlsReport {
    /// Lower end for `inf|D|` over the grid after subtracting the tail bound.
    pub inf_abs: f64,
    /// Upper end for `sup|D|` over the grid after adding the tail bound.
    pub sup_abs: f64,
    /// Largest tail bound used on the grid.
    pub tail_bound: f64,
    /// Row minima `(σ, min_t |D_N(σ+it)|)`.
    pub row_min: Vec<(f64, f64)>,
    /// Linear extrapolation of the row minimum to `σ = 0`.
    pub boundary_min: f64,
    pub verdict: HlsVerdict,
    /// `Σ_{n≥2}|cₙ| < c₁ = 1`, when it can be evaluated.
    pub abs_condition: Option<bool>,
    /// Analytic `[inf, sup]` of `|D|` on `Re s > 0` for completely multiplicative
    /// coefficients `n^{−τ}` with `τ > 1`.
    pub multiplicative_bounds: Option<(f64, f64)>,
}

/// Fraction of the supremum below which the boundary minimum counts as zero.
const HLS_VANISH: f64 = 0.05;

/// Evaluate `D(s) = Σ cₙ n^{−s}` on `σ_min ≤ Re s ≤ σ_max`, `|Im s| ≤ t_max`.
pub fn hls_criterion(c: &SineCoefficients, grid: HlsGrid) -> Result<HlsReport> {
    if !(grid.sigma_min > 0.0 && grid.sigma_max > grid.sigma_min && grid.t_max >= 0.0) {
        return Err(Error::invalid("HLS grid needs 0 < sigma_min < sigma_max and t_max >= 0"));
    }
    if grid.sigma_steps < 2 || grid.t_steps < 1 {
        return Err(Error::invalid("HLS grid needs at least 2 sigma rows and 1 t column"));
    }
    let (terms, tail): (Vec<(f64, f64)>, Option<f64>) = match c {
        SineCoefficients::Explicit(v) => {
            (v.iter().enumerate().filter(|(_, c)| **c != 0.0).map(|(i, &c)| (libm::log((i + 1) as f64), c)).collect(), None)
        }
        SineCoefficients::Power(tau) => {
            if !tau.is_finite() {
                return Err(Error::invalid("power exponent must be finite"));
            }
            let n = grid.truncation.max(1);
            ((1..=n).map(|k| (libm::log(k as f64), libm::pow(k as f64, -tau))).collect(), Some(*tau))
        }
    };
    if terms.is_empty() {
        return Err(Error::invalid("Dirichlet series has no nonzero coefficients"));
    }
    // Σ_{n>N} n^{−τ−σ} ≤ N^{1−τ−σ}/(τ+σ−1).
    let tail_at = |sigma: f64| -> f64 {
        match tail {
            None => 0.0,
            Some(tau) => {
                let e = tau + sigma - 1.0;
                if e <= 0.0 {
                    f64::INFINITY
                } else {
                    libm::pow(grid.truncation as f64, -e) / e
                }
            }
        }
    };
    let sigmas: Vec<f64> = (0..grid.sigma_steps)
        .map(|i| grid.sigma_min + (grid.sigma_max - grid.sigma_min) * i as f64 / (grid.sigma_steps - 1) as f64)
        .collect();
    let ts: Vec<f64> = if grid.t_steps == 1 {
        vec![0.0]
    } else {
        (0..grid.t_steps).map(|j| -grid.t_max + 2.0 * grid.t_max * j as f64 / (grid.t_steps - 1) as f64).collect()
    };
    let row = |sigma: f64| -> (f64, f64) {
        let weights: Vec<(f64, f64)> = terms.iter().map(|&(ln, c)| (ln, c * libm::exp(-sigma * ln))).collect();
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for &t in &ts {
            let d: Complex64 = weights.iter().map(|&(ln, w)| Complex64::from_polar(w, -t * ln)).sum();
            lo = lo.min(d.norm());
            hi = hi.max(d.norm());
        }
        (lo, hi)
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<(f64, f64)> = {
        use rayon::prelude::*;
        sigmas.par_iter().map(|&s| row(s)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<(f64, f64)> = sigmas.iter().map(|&s| row(s)).collect();

    let mut inf_abs = f64::INFINITY;
    let mut sup_abs: f64 = 0.0;
    let mut tail_bound: f64 = 0.0;
    let mut grid_min = f64::INFINITY;
    for (&s, &(lo, hi)) in sigmas.iter().zip(&rows) {
        let tb = tail_at(s);
        tail_bound = tail_bound.max(tb);
        inf_abs = inf_abs.min(lo - tb);
        sup_abs = sup_abs.max(hi + tb);
        grid_min = grid_min.min(lo);
    }
    let row_min: Vec<(f64, f64)> = sigmas.iter().zip(&rows).map(|(&s, &(lo, _))| (s, lo)).collect();
    let (s1, m1) = row_min[0];
    let (s2, m2) = row_min[1];
    let boundary_min = m1 - s1 * (m2 - m1) / (s2 - s1);

    let verdict = if tail_bound >= grid_min {
        HlsVerdict::InconclusiveNearSigmaMin
    } else if boundary_min <= HLS_VANISH * sup_abs || grid_min + tail_bound <= HLS_VANISH * sup_abs {
        HlsVerdict::Violated
    } else {
        HlsVerdict::Satisfied
    };

    let c1 = c.c(1);
    let abs_condition = match c {
        SineCoefficients::Explicit(v) => {
            (c1 == 1.0).then(|| v.iter().skip(1).map(|x| x.abs()).sum::<f64>() < 1.0)
        }
        SineCoefficients::Power(tau) => (*tau > 1.0).then(|| zeta(*tau) - 1.0 < 1.0),
    };
    let multiplicative_bounds = match c {
        SineCoefficients::Power(tau) if *tau > 1.0 => Some((zeta(2.0 * tau) / zeta(*tau), zeta(*tau))),
        _ => None,
    };
    Ok(HlsReport { inf_abs, sup_abs, tail_bound, row_min, boundary_min, verdict, abs_condition, multiplicative_bounds })
}

/// Riemann zeta for real `s > 1` by Euler–Maclaurin summation.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta needs s > 1");
    const N: u32 = 12;
    // B_{2k}/(2k)! for k = 1..6
    const B: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    ];
    let n = N as f64;
    let mut sum: f64 = (1..N).map(|k| libm::pow(k as f64, -s)).sum();
    sum += libm::pow(n, 1.0 - s) / (s - 1.0) + 0.5 * libm::pow(n, -s);
    // s(s+1)…(s+2k−2) N^{−s−2k+1}
    let mut rising = s;
    let mut pw = libm::pow(n, -s - 1.0);
    for (k, b) in B.iter().enumerate() {
        sum += b * rising * pw;
        rising *= (s + 2.0 * k as f64 + 1.0) * (s + 2.0 * k as f64 + 2.0);
        pw /= n * n;
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoboundaryVerdict {
    CoboundaryLike,
    Riesz,
    Inconclusive,
}

impl CoboundaryVerdict {
    pub fn name(self) -> &'static str {
        match self {
            CoboundaryVerdict::CoboundaryLike => "coboundary-like",
            CoboundaryVerdict::Riesz => "Riesz (not coboundary)",
            CoboundaryVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoboundaryReport {
    pub lambda_min: Vec<(usize, f64)>,
    /// Least-squares slope of `log λ_min` against `log N`.
    pub slope: Option<f64>,
    pub verdict: CoboundaryVerdict,
}

/// Slope at or below which `λ_min(N)` counts as power-law decay.
const DECAY_SLOPE: f64 = -1.0;

/// Decide whether `λ_min` of the Gram of `{g∘Tⁿ}` plateaus or decays to zero.
pub fn coboundary_probe(
    map: &ExpandingMap,
    g: &TorusFunction,
    orders: &[usize],
    cfg: RieszConfig,
) -> Result<CoboundaryReport> {
    if g.mean().norm() > 1e-14 * g.wiener_norm().max(1.0) {
        return Err(Error::precondition("coboundary probe needs a mean-zero function"));
    }
    if g.is_zero() {
        return Ok(CoboundaryReport { lambda_min: Vec::new(), slope: None, verdict: CoboundaryVerdict::CoboundaryLike });
    }
    let max = orders.iter().copied().max().ok_or_else(|| Error::invalid("at least one order is required"))?;
    let corr = correlations_exact(map, g, max);
    let bounds = riesz_bounds(&corr, orders, cfg)?;
    let pts: Vec<(usize, f64)> = bounds.orders.iter().map(|r| (r.n, r.lambda_min)).collect();
    let logs: Vec<(f64, f64)> =
        pts.iter().filter(|p| p.1 > 0.0).map(|&(n, l)| (libm::log(n as f64), libm::log(l))).collect();
    let slope = (logs.len() >= 2).then(|| least_squares_slope(&logs));
    let verdict = if bounds.is_riesz {
        CoboundaryVerdict::Riesz
    } else if bounds.b_sq_est < cfg.threshold || slope.is_some_and(|s| s <= DECAY_SLOPE) {
        CoboundaryVerdict::CoboundaryLike
    } else {
        CoboundaryVerdict::Inconclusive
    };
    Ok(CoboundaryReport { lambda_min: pts, slope, verdict })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParsevalBridge {
    /// `Σ a_m conj(aₙ) γ(m − n)`.
    pub toeplitz: f64,
    /// `‖Σ aₙ f∘Tⁿ‖₂²` from the Fourier expansion of the sum.
    pub fourier: f64,
    pub mc: f64,
    pub mc_se: f64,
    pub seed: u64,
}

/// `‖Σ_{n≤N} aₙ f∘Tⁿ‖₂²` three ways.
pub fn parseval_bridge(
    map: &ExpandingMap,
    f: &TorusFunction,
    a: &CoefficientSequence,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<ParsevalBridge> {
    let coeffs = a.values(n);
    let corr = correlations_exact(map, f, n);
    let ac: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let toeplitz = corr.quadratic_form(&ac)?.re;
    let mut sum = TorusFunction::zero();
    for (k, &ak) in coeffs.iter().enumerate() {
        if ak == 0.0 {
            continue;
        }
        let p = map.power(k).ok_or_else(|| Error::invalid("frequency overflow in Fourier expansion"))?;
        let shifted = f.reindex(|m| m.checked_mul(p));
        sum = sum.add(&shifted.scale(Complex64::new(ak, 0.0)));
    }
    let fourier = sum.l2_norm() * sum.l2_norm();
    let parts = sample_partial_sums(f, map, &coeffs, samples, seed, Accumulator::new, |acc, s| {
        acc.push(s[s.len() - 1].norm_sqr())
    })?;
    let acc = merge_all(&parts);
    Ok(ParsevalBridge { toeplitz, fourier, mc: acc.mean(), mc_se: acc.std_error(), seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn exact_correlations_examples() {
        let map = ExpandingMap::new(3).unwrap();
        let g = correlations_exact(&map, &TorusFunction::exp(1), 5);
        assert_eq!(g.gamma[0], c(1.0));
        assert!(g.gamma[1..].iter().all(|z| *z == ZERO));
        let g = correlations_exact(&map, &TorusFunction::cos(1, 1.0), 5);
        assert!((g.gamma[0] - c(0.5)).norm() < 1e-15);
        assert!(g.gamma[1..].iter().all(|z| z.norm() < 1e-15));
        let g = correlations_exact(&map, &TorusFunction::zero(), 3);
        assert!(g.gamma.iter().all(|z| *z == ZERO));
    }

    #[test]
    fn correlation_orientation() {
        // f = e(x) + i e(3x): ⟨f∘T, f⟩ = f̂(3)·conj f̂(1)·… only the m = 1 term
        // survives: f̂(1) conj f̂(3) = 1 · conj(i) = −i.
        let f = TorusFunction::new([(1, c(1.0)), (3, Complex64::new(0.0, 1.0))]);
        let map = ExpandingMap::new(3).unwrap();
        let g = correlations_exact(&map, &f, 1);
        // Direct quadrature of ∫ f(3x) conj f(x) dx.
        let m = 64;
        let direct: Complex64 = (0..m)
            .map(|j| {
                let x = j as f64 / m as f64;
                f.evaluate(3.0 * x) * f.evaluate(x).conj()
            })
            .sum::<Complex64>()
            / m as f64;
        assert!((g.gamma[1] - direct).norm() < 1e-12, "{} vs {}", g.gamma[1], direct);
    }

    #[test]
    fn dilated_sine_tridiagonal_spectrum() {
        let corr = dilated_sine_correlations(3, &[(1, 1.0), (3, 0.5)], 64).unwrap();
        assert!((corr.gamma[0].re - 0.625).abs() < 1e-15);
        assert!((corr.gamma[1].re - 0.25).abs() < 1e-15);
        let b = riesz_bounds(&corr, &[16, 32, 64], RieszConfig::default()).unwrap();
        for r in &b.orders {
            let step = PI / (r.n + 1) as f64;
            assert!((r.lambda_max - (0.625 + 0.5 * step.cos())).abs() < 1e-12);
            assert!((r.lambda_min - (0.625 - 0.5 * step.cos())).abs() < 1e-12);
            assert!(r.residual < 1e-10);
        }
        assert!(b.monotone && b.is_riesz);
    }

    #[test]
    fn coboundary_bounds_collapse() {
        let corr = dilated_sine_correlations(3, &[(1, 1.0), (3, -1.0)], 64).unwrap();
        let b = riesz_bounds(&corr, &[8, 16, 32, 64], RieszConfig::default()).unwrap();
        assert!(!b.is_riesz);
        let last = b.orders.last().unwrap();
        let scaled = last.lambda_min * 65.0 * 65.0;
        assert!((scaled - PI * PI / 2.0).abs() / (PI * PI / 2.0) < 0.02);
    }

    #[test]
    fn identity_correlations() {
        let corr = CorrelationData::new(vec![c(1.0), ZERO, ZERO, ZERO], CorrelationSource::ExactFourier, "e1").unwrap();
        let b = riesz_bounds(&corr, &[1, 2, 4], RieszConfig::default()).unwrap();
        assert!(b.orders.iter().all(|r| (r.lambda_min - 1.0).abs() < 1e-14 && (r.lambda_max - 1.0).abs() < 1e-14));
        let d = fejer_density(&corr, 3, &angle_grid(16)).unwrap();
        assert!(d.values.iter().all(|v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn indefinite_input_is_rejected() {
        let corr = CorrelationData::new(vec![c(1.0), c(2.0)], CorrelationSource::MonteCarlo, "bad").unwrap();
        assert!(riesz_bounds(&corr, &[2], RieszConfig::default()).is_err());
        assert!(riesz_bounds(&corr, &[3], RieszConfig::default()).is_err());
    }

    #[test]
    fn fejer_density_limits() {
        let corr = dilated_sine_correlations(3, &[(1, 1.0), (3, 0.5)], 200).unwrap();
        let d = fejer_density(&corr, 200, &angle_grid(400)).unwrap();
        assert!((d.sup - 1.125).abs() < 0.01 && (d.inf - 0.125).abs() < 0.01);
        let corr = dilated_sine_correlations(3, &[(1, 1.0), (3, -1.0)], 200).unwrap();
        let d = fejer_density(&corr, 200, &[0.0]).unwrap();
        assert!(d.values[0] < 0.01);
    }

    #[test]
    fn worked_factorizations() {
        let f = fejer_riesz_factor(&[c(1.0), c(2.0), c(1.0)]).unwrap();
        assert!((f.coeffs[0] - c(1.0)).norm() < 1e-7 && (f.coeffs[1] - c(1.0)).norm() < 1e-7);
        let f = fejer_riesz_factor(&[c(1.0)]).unwrap();
        assert_eq!(f.coeffs, vec![c(1.0)]);
        let f = fejer_riesz_factor(&[c(0.5), c(1.25), c(0.5)]).unwrap();
        assert!((f.coeffs[0] - c(1.0)).norm() < 1e-12 && (f.coeffs[1] - c(0.5)).norm() < 1e-12);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn random_squares_factor() {
        use rand::Rng;
        let mut rng = crate::rng::stream(11, 0);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let deg = rng.gen_range(0..=20usize);
            let r: Vec<Complex64> =
                (0..=deg).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let c: Vec<Complex64> = (-(deg as i64)..=deg as i64)
                .map(|k| {
                    (0..=deg as i64)
                        .filter(|j| (0..=deg as i64).contains(&(j - k)))
                        .map(|j| r[j as usize] * r[(j - k) as usize].conj())
                        .sum()
                })
                .collect();
            let f = fejer_riesz_factor(&c).unwrap();
            worst = worst.max(f.residual);
        }
        assert!(worst < 1e-8, "worst residual {worst:e}");
    }

    #[test]
    fn negative_polynomial_is_rejected() {
        let e = fejer_riesz_factor(&[c(1.0), c(0.5), c(1.0)]).unwrap_err();
        assert_eq!(e.kind(), crate::ErrorKind::Invalid);
    }

    #[test]
    fn symmetrization_examples() {
        let corr = CorrelationData::new(vec![c(1.0), Complex64::new(0.0, 1.0)], CorrelationSource::MonteCarlo, "x")
            .unwrap();
        assert_eq!(corr.symmetrize().gamma[1], ZERO);
        let real = CorrelationData::new(vec![c(1.0), c(0.3)], CorrelationSource::MonteCarlo, "y").unwrap();
        assert_eq!(real.symmetrize().gamma, real.gamma);
        assert!(corr.symmetrization_gap(&[0.3, -1.2]).unwrap() < 1e-15);
    }

    #[test]
    fn zeta_values() {
        assert!((zeta(2.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((zeta(4.0) - PI.powi(4) / 90.0).abs() < 1e-14);
        assert!((zeta(1.5) - 2.612_375_348_685_488).abs() < 1e-12);
    }

    #[test]
    fn hls_examples() {
        let grid = HlsGrid { sigma_steps: 8, t_steps: 41, ..HlsGrid::default() };
        let r = hls_criterion(&SineCoefficients::Explicit(vec![1.0]), grid).unwrap();
        assert!((r.inf_abs - 1.0).abs() < 1e-15 && (r.sup_abs - 1.0).abs() < 1e-15);
        assert_eq!(r.verdict, HlsVerdict::Satisfied);
        let r = hls_criterion(&SineCoefficients::Explicit(vec![1.0, 0.0, -1.0]), grid).unwrap();
        assert_eq!(r.verdict, HlsVerdict::Violated);
        assert_eq!(r.abs_condition, Some(false));
    }

    #[test]
    fn coboundary_probe_examples() {
        let map = ExpandingMap::new(3).unwrap();
        let orders = [8, 16, 32, 64];
        let r = coboundary_probe(&map, &TorusFunction::cos(1, 1.0), &orders, RieszConfig::default()).unwrap();
        assert_eq!(r.verdict, CoboundaryVerdict::Riesz);
        assert!(r.lambda_min.iter().all(|p| (p.1 - 0.5).abs() < 1e-12));
        let g = TorusFunction::cos(1, 1.0).sub(&TorusFunction::cos(3, 1.0));
        let r = coboundary_probe(&map, &g, &orders, RieszConfig::default()).unwrap();
        assert_eq!(r.verdict, CoboundaryVerdict::CoboundaryLike);
        assert!((r.slope.unwrap() + 2.0).abs() < 0.15);
        let r = coboundary_probe(&map, &TorusFunction::zero(), &orders, RieszConfig::default()).unwrap();
        assert_eq!(r.verdict, CoboundaryVerdict::CoboundaryLike);
    }

    #[test]
    fn parseval_bridge_agrees() {
        let map = ExpandingMap::new(3).unwrap();
        let f = TorusFunction::new([(1, c(0.5)), (-1, c(0.5)), (3, c(0.25)), (-3, c(0.25))]);
        let a = CoefficientSequence::power(1.0, 8);
        let r = parseval_bridge(&map, &f, &a, 8, 20_000, 7).unwrap();
        assert!((r.toeplitz - r.fourier).abs() < 1e-10);
        assert!((r.mc - r.fourier).abs() < 4.0 * r.mc_se);
    }
}
