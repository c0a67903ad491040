//! Weierstrass-type functions `F(x) = Σ aₙ 3⁻ⁿ f(3ⁿx)` and their
//! differentiability.
//!
//! `F` is differentiable at `x` exactly when `Σ aₙ f′(3ⁿx)` converges, and
//! then that series is `F′(x)`. Verdicts here are finite-resolution
//! signatures: "non-differentiable" means the partial sums or the difference
//! quotients failed to settle within the tested range, never a proof.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gibbs::{self, GibbsConfig, RuelleOperator};
use crate::orbit::{OrbitPoint, FIXED_BITS};
use crate::rng::par_map;
use crate::series::{
    self, orbit_values, probe_values, terms_of, CoeffRule, CoefficientSequence, ConvergenceReport, ProbeConfig,
    Verdict,
};
use crate::stats::{merge_all, Accumulator};
use crate::torusfn::TorusFunction;
use crate::transfer::ExpandingMap;

/// The base is fixed at 3.
pub const BASE: u64 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassSpec {
    pub f: TorusFunction,
    /// Term-by-term derivative of `f`.
    pub f_prime: TorusFunction,
    pub a: CoefficientSequence,
    /// Hölder exponent of `f′`; trigonometric polynomials are smooth, so 1.
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpecFlags {
    pub a_to_zero: bool,
    pub sum_diverges: bool,
    pub bv_finite: bool,
    pub l2_finite: bool,
    pub abs_finite: bool,
}

impl WeierstrassSpec {
    pub fn new(f: TorusFunction, a: CoefficientSequence) -> Self {
        let f_prime = f.derivative();
        WeierstrassSpec { f, f_prime, a, delta: 1.0 }
    }

    /// Build from `f′`, which must have mean zero.
    pub fn from_derivative(f_prime: &TorusFunction, a: CoefficientSequence) -> Result<Self> {
        let f = f_prime.antiderivative()?;
        Ok(WeierstrassSpec { f_prime: f.derivative(), f, a, delta: 1.0 })
    }

    /// `F_α` with `f = e^{2πix}` and `aₙ = n^{−α}` (`a₀ = 0`).
    pub fn f_alpha(alpha: f64, len: usize) -> Self {
        Self::new(TorusFunction::exp(1), CoefficientSequence::power(alpha, len))
    }

    /// Real variant of `F_α` with `f′ = cos 2πx`.
    pub fn f_alpha_real(alpha: f64, len: usize) -> Self {
        Self::from_derivative(&TorusFunction::cos(1, 1.0), CoefficientSequence::power(alpha, len))
            .expect("cos has mean zero")
    }

    pub fn flags(&self) -> SpecFlags {
        let c = self.a.classify();
        SpecFlags {
            a_to_zero: c.to_zero,
            sum_diverges: c.sum_diverges(),
            bv_finite: c.bv_finite,
            l2_finite: c.l2_finite,
            abs_finite: c.abs_finite,
        }
    }

    /// `sup_{n≥0} |aₙ|`.
    pub fn a_sup(&self) -> f64 {
        self.a.a(0).abs().max(self.a.tail_max(0))
    }

    /// `a*_N = sup_{n>N}|aₙ|`, with `a*_{−1} = sup_{n≥0}|aₙ|`.
    fn a_star(&self, n: i64) -> f64 {
        if n < 0 {
            self.a_sup()
        } else {
            self.a.tail_max(n as usize)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FValue {
    pub value: Complex64,
    /// `|F(x) − value| ≤ bound`.
    pub bound: f64,
    /// Last index summed.
    pub n_tail: usize,
}

/// `F(x)` truncated where `‖f‖_A·3^{−N}·a*_N/2 ≤ abs_tol`.
pub fn evaluate_f(spec: &WeierstrassSpec, x: &OrbitPoint, abs_tol: f64) -> Result<FValue> {
    if !(abs_tol > 0.0) {
        return Err(Error::invalid("absolute tolerance must be positive"));
    }
    let sup = spec.a_sup();
    if !sup.is_finite() {
        return Err(Error::precondition("F needs bounded coefficients"));
    }
    let norm = spec.f.wiener_norm();
    let bound_at = |n: usize| norm * libm::pow(3.0, -(n as f64)) * spec.a.tail_max(n) / 2.0;
    let mut n = 0;
    while bound_at(n) > abs_tol {
        n += 1;
    }
    x.check_budget(BASE, spec.f.max_freq(), n)?;
    let vals = orbit_values(&terms_of(&spec.f), BASE, x, n);
    let mut scale = 1.0;
    let mut value = Complex64::new(0.0, 0.0);
    for (k, v) in vals.iter().enumerate() {
        value += spec.a.a(k) * scale * v;
        scale /= 3.0;
    }
    Ok(FValue { value, bound: bound_at(n), n_tail: n })
}

/// Smallest `N ≥ 0` with `√(a*_N)·3^{−N} ≤ |h| ≤ √(a*_{N−1})·3^{−N+1}`.
pub fn select_n(spec: &WeierstrassSpec, h: f64) -> Result<usize> {
    let sup = spec.a_sup();
    if !sup.is_finite() {
        return Err(Error::precondition("step selection needs bounded coefficients"));
    }
    let hi = 3.0 * libm::sqrt(sup);
    let habs = h.abs();
    if !(habs > 0.0) || habs > hi * (1.0 + 1e-12) {
        return Err(Error::invalid(format!("step h = {h:e} outside the admissible range (0, {hi:e}]")));
    }
    let lower = |n: i64| libm::sqrt(spec.a_star(n)) * libm::pow(3.0, -(n as f64));
    let slack = 1.0 + 1e-12;
    for n in 0..4096i64 {
        if lower(n) <= habs * slack {
            if habs <= lower(n - 1) * 3.0 * slack || n == 0 && habs <= hi * slack {
                return Ok(n as usize);
            }
            break;
        }
    }
    Err(Error::numerical(format!("no admissible N for h = {h:e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Differentiability {
    Differentiable,
    NonDifferentiable,
    Inconclusive,
}

impl Differentiability {
    pub fn name(self) -> &'static str {
        match self {
            Differentiability::Differentiable => "differentiable",
            Differentiability::NonDifferentiable => "non-differentiable",
            Differentiability::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotientSample {
    pub h: f64,
    pub n: usize,
    /// `Σ_{n≤N} aₙ 3⁻ⁿ (f(3ⁿ(x+h)) − f(3ⁿx))/h`.
    pub quotient: Complex64,
    /// `S_N = Σ_{n≤N} aₙ f′(3ⁿx)`.
    pub partial_sum: Complex64,
    /// Bound on `|quotient − S_N|`.
    pub head_bound: f64,
    /// Bound on the dropped terms `n > N` of the full difference quotient.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyConfig {
    pub probe: ProbeConfig,
    /// Exponents `j` of the ladder `h = ±3^{−j}`.
    pub ladder: Vec<u32>,
    /// Number of finest ladder rungs compared for stabilization.
    pub trailing: usize,
    /// Normalized quotient spread at or below which the quotients have settled.
    pub settled_spread: f64,
    /// Normalized quotient spread at or above which they oscillate.
    pub oscillating_spread: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            probe: ProbeConfig::default(),
            ladder: (3..=18).collect(),
            trailing: 4,
            settled_spread: 0.5,
            oscillating_spread: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffVerdict {
    pub x: OrbitPoint,
    pub verdict: Differentiability,
    /// `Σ_{n≤N_max} aₙ f′(3ⁿx)` when differentiable.
    pub derivative: Option<Complex64>,
    pub error_bar: Option<f64>,
    pub series: ConvergenceReport,
    pub series_verdict: Differentiability,
    pub quotient_verdict: Differentiability,
    /// Spread of the trailing quotients divided by `‖f′‖_A`.
    pub quotient_spread: f64,
    pub quotients: Vec<QuotientSample>,
}

impl DiffVerdict {
    /// Both routes conclusive and equal, or at least one inconclusive.
    pub fn routes_agree(&self) -> bool {
        self.series_verdict == Differentiability::Inconclusive
            || self.quotient_verdict == Differentiability::Inconclusive
            || self.series_verdict == self.quotient_verdict
    }
}

/// Series route plus difference-quotient route, merged. The series route
/// decides; a conclusive quotient route pointing the other way makes the
/// result inconclusive, and when the series route is undecided an oscillating
/// quotient ladder decides "non-differentiable".
pub fn classify_point(
    spec: &WeierstrassSpec,
    x: &OrbitPoint,
    n_max: usize,
    cfg: &ClassifyConfig,
) -> Result<DiffVerdict> {
    let flags = spec.flags();
    if !flags.a_to_zero {
        return Err(Error::precondition("pointwise classification needs aₙ → 0"));
    }
    let map = ExpandingMap::new(BASE)?;
    let series = series::convergence_probe(&spec.f_prime, &map, &spec.a, x, n_max, &cfg.probe)?;
    let series_verdict = match series.verdict {
        Verdict::Converged => Differentiability::Differentiable,
        Verdict::Diverged => Differentiability::NonDifferentiable,
        Verdict::Inconclusive => Differentiability::Inconclusive,
    };
    let quotients = quotient_ladder(spec, x, &cfg.ladder)?;
    let trailing: Vec<&QuotientSample> = {
        let mut js: Vec<u32> = cfg.ladder.clone();
        js.sort_unstable();
        let keep: Vec<u32> = js.iter().rev().take(cfg.trailing.max(1)).copied().collect();
        quotients
            .iter()
            .filter(|s| keep.iter().any(|&j| (s.h.abs() - libm::pow(3.0, -(j as f64))).abs() <= 1e-9 * s.h.abs()))
            .collect()
    };
    let mut spread: f64 = 0.0;
    for (i, a) in trailing.iter().enumerate() {
        for b in &trailing[i + 1..] {
            spread = spread.max((a.quotient - b.quotient).norm());
        }
    }
    let scale = spec.f_prime.wiener_norm();
    let quotient_spread = if scale > 0.0 { spread / scale } else { 0.0 };
    let quotient_verdict = if quotient_spread <= cfg.settled_spread {
        Differentiability::Differentiable
    } else if quotient_spread >= cfg.oscillating_spread {
        Differentiability::NonDifferentiable
    } else {
        Differentiability::Inconclusive
    };
    let verdict = match (series_verdict, quotient_verdict) {
        (Differentiability::Inconclusive, Differentiability::NonDifferentiable) => Differentiability::NonDifferentiable,
        (Differentiability::Inconclusive, _) => Differentiability::Inconclusive,
        (s, Differentiability::Inconclusive) => s,
        (s, qv) if s == qv => s,
        _ => Differentiability::Inconclusive,
    };
    let (derivative, error_bar) = if verdict == Differentiability::Differentiable {
        (Some(series.value), series.tail_bound)
    } else {
        (None, None)
    };
    Ok(DiffVerdict {
        x: x.clone(),
        verdict,
        derivative,
        error_bar,
        series,
        series_verdict,
        quotient_verdict,
        quotient_spread,
        quotients,
    })
}

/// Difference quotients at `h = ±3^{−j}` for each `j` in the ladder.
pub fn quotient_ladder(spec: &WeierstrassSpec, x: &OrbitPoint, ladder: &[u32]) -> Result<Vec<QuotientSample>> {
    let a_sup = spec.a_sup();
    let f_norm = spec.f.wiener_norm();
    let f2_norm = spec.f_prime.derivative().wiener_norm();
    let fp_terms = terms_of(&spec.f_prime);
    let mut out = Vec::with_capacity(2 * ladder.len());
    for &j in ladder {
        for sign in [1.0, -1.0] {
            let h = sign * libm::pow(3.0, -(j as f64));
            let n = select_n(spec, h)?;
            x.check_budget(BASE, spec.f.max_freq(), n)?;
            let mut y = x.clone();
            let mut quotient = Complex64::new(0.0, 0.0);
            let mut partial_sum = Complex64::new(0.0, 0.0);
            let mut s = h;
            for k in 0..=n {
                if k > 0 {
                    y.step(BASE);
                    s *= BASE as f64;
                }
                let ak = spec.a.a(k);
                if ak != 0.0 {
                    quotient += ak * spec.f.difference_at(&y, s) / s;
                    partial_sum += ak * series::eval_terms(&fp_terms, &y);
                }
            }
            let scaled = libm::pow(3.0, n as f64) * h.abs();
            out.push(QuotientSample {
                h,
                n,
                quotient,
                partial_sum,
                head_bound: 0.75 * a_sup * f2_norm * scaled,
                tail_bound: f_norm * spec.a.tail_max(n) / scaled,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DichotomyRow {
    pub alpha: f64,
    pub samples: usize,
    pub frac_differentiable: f64,
    pub frac_inconclusive: f64,
    pub label: &'static str,
    pub abs_summable: bool,
    /// Monte-Carlo `E|S_N|²` of the derivative series and its standard error.
    pub second_moment: f64,
    pub second_moment_se: f64,
    /// `‖f′‖₂² Σ_{n≤N}|aₙ|²`, exact by orthogonality.
    pub second_moment_exact: f64,
    pub seed: u64,
}

/// Pass-rate cutoffs for the qualitative labels.
const NEAR_ZERO: f64 = 0.01;
const NEAR_ONE: f64 = 0.99;

fn regime_label(a_to_zero: bool, abs_summable: bool, frac: f64) -> &'static str {
    if !a_to_zero {
        "nowhere"
    } else if frac <= NEAR_ZERO {
        "singular-a.e."
    } else if frac >= NEAR_ONE && abs_summable {
        "everywhere"
    } else if frac >= NEAR_ONE {
        "differentiable-a.e."
    } else {
        "mixed"
    }
}

/// Classify sampled points of `F_α` (complex form) for each `α` with the
/// series probe on `Σ n^{−α} f′(3ⁿx)`. Points carry 128 bits, so
/// `n_max ≤ 60`.
pub fn dichotomy_experiment(
    alphas: &[f64],
    samples: usize,
    n_max: usize,
    seed: u64,
    probe: &ProbeConfig,
) -> Result<Vec<DichotomyRow>> {
    if samples == 0 {
        return Err(Error::invalid("dichotomy experiment needs at least one sample"));
    }
    let map = ExpandingMap::new(BASE)?;
    let points = series::sample_points(seed, samples, FIXED_BITS);
    points[0].check_budget(BASE, 1, n_max)?;
    alphas
        .iter()
        .map(|&alpha| {
            let spec = WeierstrassSpec::f_alpha(alpha, n_max + 1);
            let flags = spec.flags();
            let terms = terms_of(&spec.f_prime);
            let delta_star = map.hypothesis_check(&spec.f_prime).profile.delta_star;
            let applies = probe.theorem_applies.unwrap_or_else(|| map.hypothesis_check(&spec.f_prime).holds());
            let per_point = par_map(&points, |x| {
                let vals = orbit_values(&terms, BASE, x, n_max);
                let r = probe_values(&spec.f_prime, &spec.a, &vals, applies, delta_star, probe);
                (r.verdict, r.value.norm_sqr())
            });
            let diff = per_point.iter().filter(|p| p.0 == Verdict::Converged).count();
            let inc = per_point.iter().filter(|p| p.0 == Verdict::Inconclusive).count();
            let mut acc = Accumulator::new();
            per_point.iter().for_each(|p| acc.push(p.1));
            let acc = merge_all([&acc]);
            let frac = diff as f64 / samples as f64;
            let l2 = spec.f_prime.l2_norm();
            Ok(DichotomyRow {
                alpha,
                samples,
                frac_differentiable: frac,
                frac_inconclusive: inc as f64 / samples as f64,
                label: regime_label(flags.a_to_zero, flags.abs_finite, frac),
                abs_summable: flags.abs_finite,
                second_moment: acc.mean(),
                second_moment_se: acc.std_error(),
                second_moment_exact: l2 * l2 * spec.a.l2_sq_upto(n_max),
                seed,
            })
        })
        .collect()
}

/// The four `α` of the qualitative table.
pub const TABLE_ALPHAS: [f64; 4] = [-0.5, 0.3, 0.75, 1.2];

/// Qualitative labels expected in the four regions
/// `α ≤ 0`, `0 < α ≤ 1/2`, `1/2 < α ≤ 1`, `α > 1`.
pub fn expected_label(alpha: f64) -> &'static str {
    if alpha <= 0.0 {
        "nowhere"
    } else if alpha <= 0.5 {
        "singular-a.e."
    } else if alpha <= 1.0 {
        "differentiable-a.e."
    } else {
        "everywhere"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicPoint {
    /// `x = num/den` with `den = 3^p − 1`.
    pub num: u64,
    pub den: u64,
    /// Minimal period.
    pub period: usize,
    /// `Σ_{k<p} g(3ᵏx)`.
    pub sum: Complex64,
    pub zero_sum: bool,
}

impl PeriodicPoint {
    pub fn point(&self) -> OrbitPoint {
        OrbitPoint::rational(self.num as i128, self.den).expect("nonzero denominator")
    }
}

/// Largest period the scanner enumerates.
pub const MAX_SCAN_PERIOD: usize = 14;

/// Periodic points `m/(3^p − 1)` of minimal period `p ≤ p_max`, sorted by
/// `|Σ_{k<p} g(3ᵏx)|`. A zero per-period sum means bounded Birkhoff sums along
/// the whole orbit.
pub fn birkhoff_scanner(g: &TorusFunction, p_max: usize) -> Result<Vec<PeriodicPoint>> {
    if g.mean().norm() > 1e-14 * g.wiener_norm().max(1.0) {
        return Err(Error::precondition("Birkhoff scanner needs a mean-zero function"));
    }
    if p_max == 0 || p_max > MAX_SCAN_PERIOD {
        return Err(Error::invalid(format!("period must be in 1..={MAX_SCAN_PERIOD}")));
    }
    let terms = terms_of(g);
    let tol = 1e-12 * g.wiener_norm().max(1.0);
    let mut out = Vec::new();
    for p in 1..=p_max {
        let den = 3u64.pow(p as u32) - 1;
        for m in 0..den {
            if minimal_period(m, den, p) != p {
                continue;
            }
            let x = OrbitPoint::Rational { num: m, den };
            let vals = orbit_values(&terms, BASE, &x, p - 1);
            let sum: Complex64 = vals.iter().sum();
            let reduced = OrbitPoint::rational(m as i128, den).expect("nonzero denominator");
            let (num, den_r) = match reduced {
                OrbitPoint::Rational { num, den } => (num, den),
                _ => unreachable!(),
            };
            out.push(PeriodicPoint { num, den: den_r, period: p, sum, zero_sum: sum.norm() <= tol * p as f64 });
        }
    }
    out.sort_by(|a, b| a.sum.norm().total_cmp(&b.sum.norm()).then(a.period.cmp(&b.period)).then(a.num.cmp(&b.num)));
    Ok(out)
}

fn minimal_period(m: u64, den: u64, p: usize) -> usize {
    let mut y = m;
    for k in 1..=p {
        y = (y * 3) % den;
        if y == m {
            return k;
        }
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TiltedVerdict {
    /// The drift `m_t Σaₙ` dominates: the series diverges on the tilted sample.
    Diverges,
    /// `|m_t|` too small to separate drift from fluctuation.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TiltedReport {
    pub t: f64,
    pub m_t: f64,
    pub verdict: TiltedVerdict,
    pub n_max: usize,
    pub samples: usize,
    /// Fraction of `μ_t`-samples flagged non-convergent by the decomposition.
    pub frac_nonconvergent: f64,
    /// Fraction where the plain probe on `Σ aₙ f′(3ⁿx)` did not return
    /// "converged". The a.e. theorem is for Lebesgue measure, so the probe
    /// is run without it.
    pub frac_raw_nonconvergent: f64,
    /// Fraction where the centered series `Σ aₙ(f′(3ⁿx) − m_t)` converged.
    pub frac_centered_converged: f64,
    /// `|m_t Σ_{n≤N} aₙ|`.
    pub drift: f64,
    /// Root mean square of the centered partial sum at `N` under `μ_t`.
    pub centered_rms: f64,
    /// Fraction of Lebesgue samples where the plain probe returned "converged".
    pub lebesgue_frac_convergent: f64,
    pub seed: u64,
}

/// Smallest `|m_t|` treated as a nonzero drift.
pub const MIN_DRIFT: f64 = 1e-4;

/// Sample `μ_t` for the potential `t·f′` and split `S_N` into a centered part
/// and the drift `m_t Σ aₙ`.
pub fn tilted_divergence(
    spec: &WeierstrassSpec,
    t: f64,
    samples: usize,
    n_max: usize,
    seed: u64,
    gibbs_cfg: GibbsConfig,
    probe: &ProbeConfig,
) -> Result<TiltedReport> {
    let flags = spec.flags();
    if !flags.sum_diverges {
        return Err(Error::precondition("tilted divergence needs Σaₙ to diverge"));
    }
    if !spec.f_prime.is_real() {
        return Err(Error::invalid("tilted divergence needs a real-valued f′"));
    }
    if samples == 0 {
        return Err(Error::invalid("tilted divergence needs at least one sample"));
    }
    let map = ExpandingMap::new(BASE)?;
    let m_t = gibbs::pressure_curve(&map, &spec.f_prime, &[t], gibbs_cfg)?.m[0];
    let a_sum: f64 = spec.a.values(n_max).iter().sum();
    let mut report = TiltedReport {
        t,
        m_t,
        verdict: TiltedVerdict::Inconclusive,
        n_max,
        samples,
        frac_nonconvergent: 0.0,
        frac_raw_nonconvergent: 0.0,
        frac_centered_converged: 0.0,
        drift: (m_t * a_sum).abs(),
        centered_rms: 0.0,
        lebesgue_frac_convergent: 0.0,
        seed,
    };
    if m_t.abs() < MIN_DRIFT {
        return Ok(report);
    }
    OrbitPoint::Fixed(0).check_budget(BASE, spec.f_prime.max_freq(), n_max)?;
    let op = RuelleOperator::tilted(map, &spec.f_prime, t)?;
    let sol = gibbs::solve(&op, gibbs_cfg)?;
    let xs = gibbs::sample_mu_t(&sol, samples, seed);

    let terms = terms_of(&spec.f_prime);
    let hyp = map.hypothesis_check(&spec.f_prime);
    let delta_star = hyp.profile.delta_star;
    let centered_f = spec.f_prime.sub(&TorusFunction::constant(m_t));
    let centered_probe = ProbeConfig { theorem_applies: Some(true), ..*probe };
    let rows = par_map(&xs, |x| {
        let vals = orbit_values(&terms, BASE, x, n_max);
        let raw = probe_values(&spec.f_prime, &spec.a, &vals, false, delta_star, probe);
        let centered_vals: Vec<Complex64> = vals.iter().map(|v| v - m_t).collect();
        let centered = probe_values(&centered_f, &spec.a, &centered_vals, true, delta_star, &centered_probe);
        (raw.verdict, centered.verdict, centered.value.norm_sqr())
    });
    let n = samples as f64;
    let centered_ok = rows.iter().filter(|r| r.1 == Verdict::Converged).count();
    report.frac_centered_converged = centered_ok as f64 / n;
    // Convergent centered part plus divergent drift: the sum diverges.
    report.frac_nonconvergent = report.frac_centered_converged;
    report.frac_raw_nonconvergent = rows.iter().filter(|r| r.0 != Verdict::Converged).count() as f64 / n;
    report.centered_rms = libm::sqrt(rows.iter().map(|r| r.2).sum::<f64>() / n);
    report.verdict = TiltedVerdict::Diverges;

    let leb = series::sample_points(seed.wrapping_add(1), samples, FIXED_BITS);
    let leb_ok = par_map(&leb, |x| {
        let vals = orbit_values(&terms, BASE, x, n_max);
        probe_values(&spec.f_prime, &spec.a, &vals, hyp.holds(), delta_star, probe).verdict == Verdict::Converged
    });
    report.lebesgue_frac_convergent = leb_ok.iter().filter(|&&b| b).count() as f64 / n;
    Ok(report)
}

/// Human-readable coefficient rule for reports.
pub fn describe(spec: &WeierstrassSpec) -> String {
    match &spec.a.rule {
        CoeffRule::Power(alpha) => format!("a_n = n^-{alpha}"),
        other => series::rule_name(other),
    }
}
