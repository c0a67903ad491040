//! Coefficient sequences, partial sums `S_N(x) = Σ_{n≤N} aₙ f(Tⁿx)` and
//! Monte-Carlo checks of the moment, subgaussian, maximal and
//! Paley–Zygmund inequalities, plus the pointwise convergence probe.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::orbit::OrbitPoint;
use crate::rng::{self, StreamRng};
use crate::stats::{merge_all, Accumulator};
use crate::torusfn::{unit, TorusFunction};
use crate::transfer::{ExpandingMap, MartingaleProfile};

/// Monte-Carlo assertions allow this many standard errors of slack.
pub const SE_SLACK: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub enum CoeffRule {
    /// `a₀, a₁, …` as listed, zero afterwards.
    Explicit(Vec<f64>),
    /// `a₀ = 0`, `aₙ = n^{−α}` for `n ≥ 1`.
    Power(f64),
    /// `aₙ = c` for all `n ≥ 0`.
    Constant(f64),
}

/// Summability of `Σ aₙ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumBehavior {
    /// Finitely many nonzero terms.
    Finite,
    Converges,
    Diverges,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub to_zero: bool,
    pub sum: SumBehavior,
    pub abs_finite: bool,
    pub l2_finite: bool,
    pub bv_finite: bool,
    /// `Σ aₙ² log² n < ∞`.
    pub rm_finite: bool,
}

impl Classification {
    pub fn sum_diverges(&self) -> bool {
        self.sum == SumBehavior::Diverges
    }
}

/// The weights `(aₙ)`. Rule-based sequences are classified analytically;
/// `len` is the truncation used for the finite sums `l2_sq`, `bv`, `rm_sum`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence {
    pub rule: CoeffRule,
    pub len: usize,
}

impl CoefficientSequence {
    pub fn explicit(values: Vec<f64>) -> Self {
        let len = values.len();
        CoefficientSequence {
            rule: CoeffRule::Explicit(values),
            len,
        }
    }

    pub fn power(alpha: f64, len: usize) -> Self {
        CoefficientSequence {
            rule: CoeffRule::Power(alpha),
            len,
        }
    }

    pub fn constant(c: f64, len: usize) -> Self {
        CoefficientSequence {
            rule: CoeffRule::Constant(c),
            len,
        }
    }

    /// `aₙ = wₙ/Wₙ`, `Wₙ = Σ_{k≤n} wₖ`.
    pub fn kronecker(weights: &[f64]) -> Self {
        let mut total = 0.0;
        Self::explicit(
            weights
                .iter()
                .map(|&w| {
                    total += w;
                    w / total
                })
                .collect(),
        )
    }

    pub fn a(&self, n: usize) -> f64 {
        match &self.rule {
            CoeffRule::Explicit(v) => v.get(n).copied().unwrap_or(0.0),
            CoeffRule::Power(alpha) => {
                if n == 0 {
                    0.0
                } else {
                    libm::pow(n as f64, -alpha)
                }
            }
            CoeffRule::Constant(c) => *c,
        }
    }

    /// `a₀..=a_N`.
    pub fn values(&self, n: usize) -> Vec<f64> {
        (0..=n).map(|k| self.a(k)).collect()
    }

    pub fn l2_sq(&self) -> f64 {
        (0..self.len).map(|n| self.a(n) * self.a(n)).sum()
    }

    pub fn bv(&self) -> f64 {
        (0..self.len.saturating_sub(1))
            .map(|n| (self.a(n) - self.a(n + 1)).abs())
            .sum()
    }

    pub fn rm_sum(&self) -> f64 {
        (1..self.len)
            .map(|n| {
                let l = libm::log(n as f64);
                self.a(n) * self.a(n) * l * l
            })
            .sum()
    }

    /// `Σ_{n≤N} |aₙ|²`.
    pub fn l2_sq_upto(&self, n: usize) -> f64 {
        (0..=n).map(|k| self.a(k) * self.a(k)).sum()
    }

    /// Index of the last nonzero term, if the support is finite.
    pub fn last_nonzero(&self) -> Option<Option<usize>> {
        match &self.rule {
            CoeffRule::Explicit(v) => Some(v.iter().rposition(|&x| x != 0.0)),
            CoeffRule::Constant(c) if *c == 0.0 => Some(None),
            _ => None,
        }
    }

    pub fn classify(&self) -> Classification {
        match &self.rule {
            CoeffRule::Explicit(_) => Classification {
                to_zero: true,
                sum: SumBehavior::Finite,
                abs_finite: true,
                l2_finite: true,
                bv_finite: true,
                rm_finite: true,
            },
            CoeffRule::Constant(c) => {
                let zero = *c == 0.0;
                Classification {
                    to_zero: zero,
                    sum: if zero { SumBehavior::Finite } else { SumBehavior::Diverges },
                    abs_finite: zero,
                    l2_finite: zero,
                    bv_finite: true,
                    rm_finite: zero,
                }
            }
            CoeffRule::Power(alpha) => {
                let alpha = *alpha;
                Classification {
                    to_zero: alpha > 0.0,
                    sum: if alpha > 1.0 { SumBehavior::Converges } else { SumBehavior::Diverges },
                    abs_finite: alpha > 1.0,
                    l2_finite: alpha > 0.5,
                    bv_finite: alpha >= 0.0,
                    rm_finite: alpha > 0.5,
                }
            }
        }
    }

    /// `a*_N = sup_{n>N} |aₙ|`.
    pub fn tail_max(&self, n: usize) -> f64 {
        match &self.rule {
            CoeffRule::Explicit(v) => v
                .iter()
                .skip(n + 1)
                .map(|x| x.abs())
                .fold(0.0, f64::max),
            CoeffRule::Constant(c) => c.abs(),
            CoeffRule::Power(alpha) => {
                if *alpha > 0.0 {
                    libm::pow((n + 1) as f64, -alpha)
                } else if *alpha == 0.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Upper bound for `Σ_{n≥from} |aₙ|²`.
    pub fn l2_tail(&self, from: usize) -> f64 {
        self.power_tail(from, 2.0)
    }

    /// Upper bound for `Σ_{n≥from} |aₙ|`.
    pub fn abs_tail(&self, from: usize) -> f64 {
        self.power_tail(from, 1.0)
    }

    fn power_tail(&self, from: usize, p: f64) -> f64 {
        match &self.rule {
            CoeffRule::Explicit(v) => v.iter().skip(from).map(|x| libm::pow(x.abs(), p)).sum(),
            CoeffRule::Constant(c) => {
                if *c == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            CoeffRule::Power(alpha) => {
                let s = p * alpha;
                if s <= 1.0 {
                    return f64::INFINITY;
                }
                let k = from.max(1) as f64;
                // Σ_{n≥k} n^{−s} ≤ k^{−s} + ∫_k^∞ t^{−s} dt
                libm::pow(k, -s) + libm::pow(k, 1.0 - s) / (s - 1.0)
            }
        }
    }

    /// `Σ_{n≥from} |aₙ − aₙ₊₁|`.
    pub fn bv_tail(&self, from: usize) -> f64 {
        match &self.rule {
            CoeffRule::Explicit(v) => (from..v.len())
                .map(|n| (self.a(n) - self.a(n + 1)).abs())
                .sum(),
            CoeffRule::Constant(_) => 0.0,
            CoeffRule::Power(alpha) => {
                if *alpha < 0.0 {
                    f64::INFINITY
                } else if from == 0 {
                    if *alpha == 0.0 {
                        1.0
                    } else {
                        2.0
                    }
                } else if *alpha == 0.0 {
                    0.0
                } else {
                    self.a(from)
                }
            }
        }
    }
}

pub(crate) type Terms = Vec<(i64, Complex64)>;

pub(crate) fn terms_of(f: &TorusFunction) -> Terms {
    f.terms().collect()
}

#[inline]
pub(crate) fn eval_terms(terms: &Terms, x: &OrbitPoint) -> Complex64 {
    terms.iter().map(|&(n, c)| c * unit(x.phase(n))).sum()
}

/// `f(Tᵏx)` for `k = 0..=n`.
pub(crate) fn orbit_values(terms: &Terms, q: u64, x: &OrbitPoint, n: usize) -> Vec<Complex64> {
    let mut y = x.clone();
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if k > 0 {
            y.step(q);
        }
        out.push(eval_terms(terms, &y));
    }
    out
}

/// `S_0, …, S_N` at `x`.
pub fn partial_sums(
    f: &TorusFunction,
    map: &ExpandingMap,
    a: &CoefficientSequence,
    n: usize,
    x: &OrbitPoint,
) -> Result<Vec<Complex64>> {
    x.check_budget(map.q(), f.max_freq(), n)?;
    let vals = orbit_values(&terms_of(f), map.q(), x, n);
    let mut s = Complex64::new(0.0, 0.0);
    Ok(vals
        .iter()
        .enumerate()
        .map(|(k, v)| {
            s += a.a(k) * v;
            s
        })
        .collect())
}

/// `S_N(x) = Σ_{n=0}^{N} aₙ f(qⁿx mod 1)`.
pub fn partial_sum(
    f: &TorusFunction,
    map: &ExpandingMap,
    a: &CoefficientSequence,
    n: usize,
    x: &OrbitPoint,
) -> Result<Complex64> {
    Ok(*partial_sums(f, map, a, n, x)?.last().unwrap())
}

/// Series martingale profile `‖d_i(S_N)‖∞ ≤ Σ_k |a_k| Δ(i−k)`.
pub fn series_deltas(profile: &MartingaleProfile, a: &[f64]) -> Vec<f64> {
    let d = profile.upper();
    if d.is_empty() || a.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + d.len() - 1];
    for (k, ak) in a.iter().enumerate() {
        for (j, dj) in d.iter().enumerate() {
            out[k + j] += ak.abs() * dj;
        }
    }
    out
}

/// Khintchine-type constant `Δ*·√2·Γ(p/2)^{1/p}`.
pub fn khintchine_constant(delta_star: f64, p: f64) -> f64 {
    delta_star * core::f64::consts::SQRT_2 * libm::pow(libm::tgamma(p / 2.0), 1.0 / p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub p: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub sample_count: usize,
    pub bound: f64,
    /// `4·SE/bound` (zero when the bound is zero).
    pub slack: f64,
    pub passed: bool,
    pub seed: u64,
}

fn check_samples(samples: usize) -> Result<()> {
    if samples == 0 {
        return Err(Error::invalid("sample count must be positive"));
    }
    Ok(())
}

/// Draw `samples` uniform points and accumulate `g(S_0..S_N)` per chunk.
pub(crate) fn sample_partial_sums<T, G>(
    f: &TorusFunction,
    map: &ExpandingMap,
    a: &[f64],
    samples: usize,
    seed: u64,
    init: impl Fn() -> T + Sync,
    g: G,
) -> Result<Vec<T>>
where
    T: Send,
    G: Fn(&mut T, &[Complex64]) + Sync,
{
    check_samples(samples)?;
    let n = a.len().saturating_sub(1);
    OrbitPoint::Fixed(0).check_budget(map.q(), f.max_freq(), n)?;
    let terms = terms_of(f);
    let q = map.q();
    Ok(rng::chunked(samples, seed, |rng: &mut StreamRng, count| {
        let mut acc = init();
        let mut sums = vec![Complex64::new(0.0, 0.0); a.len()];
        for _ in 0..count {
            let x = OrbitPoint::random(rng);
            let vals = orbit_values(&terms, q, &x, n);
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..a.len() {
                s += a[k] * vals[k];
                sums[k] = s;
            }
            g(&mut acc, &sums);
        }
        acc
    }))
}

/// Monte-Carlo `E|S_N|^p` against the Khintchine bound
/// `(Δ*√2 Γ(p/2)^{1/p})^p (Σ|aₙ|²)^{p/2}`.
pub fn mc_moment(
    f: &TorusFunction,
    map: &ExpandingMap,
    a: &CoefficientSequence,
    n: usize,
    p: f64,
    samples: usize,
    seed: u64,
) -> Result<MomentReport> {
    if !(p >= 1.0) {
        return Err(Error::precondition("moment order must be at least 1"));
    }
    let coeffs = a.values(n);
    let parts = sample_partial_sums(f, map, &coeffs, samples, seed, Accumulator::new, |acc, s| {
        acc.push(libm::pow(s[s.len() - 1].norm(), p))
    })?;
    let acc = merge_all(&parts);
    let delta_star = map.hypothesis_check(f).profile.delta_star;
    let l2: f64 = coeffs.iter().map(|x| x * x).sum();
    let bound = libm::pow(khintchine_constant(delta_star, p), p) * libm::pow(l2, p / 2.0);
    Ok(moment_report(p, &acc, bound, seed))
}

fn moment_report(p: f64, acc: &Accumulator, bound: f64, seed: u64) -> MomentReport {
    let se = acc.std_error();
    let slack = if bound > 0.0 { SE_SLACK * se / bound } else { 0.0 };
    MomentReport {
        p,
        estimate: acc.mean(),
        std_error: se,
        sample_count: acc.count(),
        bound,
        slack,
        passed: acc.mean() <= bound + SE_SLACK * se,
        seed,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The Monte-Carlo estimate is too noisy to judge.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubgaussianReport {
    pub lambda: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub sigma_sq: f64,
    pub bound: f64,
    pub status: CheckStatus,
}

/// `E exp(λ S_N) ≤ exp(λ²σ²/2)` with `σ² = Σᵢ‖d_i(S_N)‖∞²`.
pub fn subgaussian_check(
    f: &TorusFunction,
    map: &ExpandingMap,
    a: &CoefficientSequence,
    n: usize,
    lambdas: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<SubgaussianReport>> {
    if !f.is_real() {
        return Err(Error::precondition("subgaussian check needs a real-valued function"));
    }
    let coeffs = a.values(n);
    let profile = map.hypothesis_check(f).profile;
    let sigma_sq: f64 = series_deltas(&profile, &coeffs).iter().map(|d| d * d).sum();
    let k = lambdas.len();
    let parts = sample_partial_sums(
        f,
        map,
        &coeffs,
        samples,
        seed,
        || vec![Accumulator::new(); k],
        |accs, s| {
            let v = s[s.len() - 1].re;
            for (acc, &l) in accs.iter_mut().zip(lambdas) {
                acc.push(libm::exp(l * v));
            }
        },
    )?;
    Ok(lambdas
        .iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let acc = merge_all(parts.iter().map(|p| &p[i]));
            let bound = libm::exp(lambda * lambda * sigma_sq / 2.0);
            let se = acc.std_error();
            let status = if acc.mean() > 0.0 && se / acc.mean() > 0.5 {
                CheckStatus::Inconclusive
            } else if acc.mean() <= bound + SE_SLACK * se {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            };
            SubgaussianReport {
                lambda,
                estimate: acc.mean(),
                std_error: se,
                sigma_sq,
                bound,
                status,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaximalReport {
    pub beta: f64,
    /// Measured block constant `C = max ‖S_{p′,q′}‖_β / √(Σ|aₙ|²)`.
    pub c_measured: f64,
    /// `1/(1 − 2^{1/β − 1/2})`.
    pub factor: f64,
    pub c_prime: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub l2: f64,
    pub bound: f64,
    pub passed: bool,
}

/// `C′/C = 1/(1 − 2^{1/β − 1/2})`.
pub fn maximal_factor(beta: f64) -> f64 {
    1.0 / (1.0 - libm::pow(2.0, 1.0 / beta - 0.5))
}

/// `‖max_{p≤k≤q} |S_{p,k}|‖_β ≤ C′ √(Σ_{n=p}^{q} |aₙ|²)` with `C` measured from
/// all sub-block moments of the same sample.
#[allow(clippy::too_many_arguments)]
pub fn maximal_check(
    f: &TorusFunction,
    map: &ExpandingMap,
    a: &CoefficientSequence,
    p_idx: usize,
    q_idx: usize,
    beta: f64,
    samples: usize,
    seed: u64,
) -> Result<MaximalReport> {
    if !(beta > 2.0) {
        return Err(Error::precondition("maximal inequality needs β > 2"));
    }
    if p_idx > q_idx {
        return Err(Error::invalid("block start after block end"));
    }
    let coeffs: Vec<f64> = (0..=q_idx)
        .map(|k| if k < p_idx { 0.0 } else { a.a(k) })
        .collect();
    let len = q_idx - p_idx + 1;
    let blocks = len * (len + 1) / 2;
    let parts = sample_partial_sums(
        f,
        map,
        &coeffs,
        samples,
        seed,
        || (vec![Accumulator::new(); blocks], Accumulator::new()),
        |(block_acc, max_acc), s| {
            let prefix = |k: usize| if k == 0 { Complex64::new(0.0, 0.0) } else { s[p_idx + k - 1] };
            let mut idx = 0;
            let mut running_max = 0.0f64;
            for lo in 0..len {
                for hi in lo..len {
                    let v = (prefix(hi + 1) - prefix(lo)).norm();
                    block_acc[idx].push(libm::pow(v, beta));
                    idx += 1;
                    if lo == 0 {
                        running_max = running_max.max(v);
                    }
                }
            }
            max_acc.push(libm::pow(running_max, beta));
        },
    )?;
    let mut c_measured = 0.0f64;
    let mut idx = 0;
    for lo in 0..len {
        for hi in lo..len {
            let acc = merge_all(parts.iter().map(|p| &p.0[idx]));
            idx += 1;
            let l2: f64 = coeffs[p_idx + lo..=p_idx + hi].iter().map(|x| x * x).sum();
            if l2 > 0.0 {
                c_measured = c_measured.max(libm::pow(acc.mean(), 1.0 / beta) / libm::sqrt(l2));
            }
        }
    }
    let max_acc = merge_all(parts.iter().map(|p| &p.1));
    let m = max_acc.mean();
    let estimate = libm::pow(m, 1.0 / beta);
    let std_error = if m > 0.0 {
        libm::pow(m, 1.0 / beta - 1.0) * max_acc.std_error() / beta
    } else {
        0.0
    };
    let factor = maximal_factor(beta);
    let l2: f64 = coeffs[p_idx..].iter().map(|x| x * x).sum();
    let bound = factor * c_measured * libm::sqrt(l2);
    Ok(MaximalReport {
        beta,
        c_measured,
        factor,
        c_prime: factor * c_measured,
        estimate,
        std_error,
        l2,
        bound,
        passed: estimate <= bound + SE_SLACK * std_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceVerdict {
    /// `Σ|aₙ|²` is past the threshold and every floor held.
    DivergesAe,
    /// The coefficients are square summable; the test does not apply.
    NotApplicable,
    Inconclusive,
    /// A Monte-Carlo fraction fell below its floor by more than 4 SE.
    FloorViolated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PzRow {
    pub n: usize,
    pub l2_sq: f64,
    pub floor: f64,
    pub fraction: f64,
    pub std_error: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    pub verdict: DivergenceVerdict,
    pub lambda: f64,
    /// Fourth-moment constant `C₄ = Δ*·√2·Γ(2)^{1/4}`.
    pub c4: f64,
    pub riesz_lower: Option<f64>,
    pub threshold: f64,
    pub rows: Vec<PzRow>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceConfig {
    pub lambda: f64,
    /// `Σ|aₙ|²` needed before divergence is declared.
    pub threshold: f64,
}

impl Default for DivergenceConfig {
    fn default() -> Self {
        DivergenceConfig {
            lambda: 0.5,
            threshold: 4.0,
        }
    }
}

/// Paley–Zygmund floors `(1−λ)² C⁴/C₄⁴` against the Monte-Carlo fraction of
/// points with `|S_N|² ≥ λ C² Σ|aₙ|²`.
#[allow(clippy::too_many_arguments)]
pub fn divergence_test(
    f: &TorusFunction,
    map: &ExpandingMap,
    a: &CoefficientSequence,
    n_grid: &[usize],
    samples: usize,
    seed: u64,
    riesz_lower: Option<f64>,
    cfg: DivergenceConfig,
) -> Result<DivergenceReport> {
    let delta_star = map.hypothesis_check(f).profile.delta_star;
    let c4 = khintchine_constant(delta_star, 4.0);
    let mut report = DivergenceReport {
        verdict: DivergenceVerdict::Inconclusive,
        lambda: cfg.lambda,
        c4,
        riesz_lower,
        threshold: cfg.threshold,
        rows: Vec::new(),
    };
    if a.classify().l2_finite {
        report.verdict = DivergenceVerdict::NotApplicable;
        return Ok(report);
    }
    let Some(c) = riesz_lower else {
        return Ok(report);
    };
    let n_top = n_grid.iter().copied().max().unwrap_or(0);
    let coeffs = a.values(n_top);
    let levels: Vec<(usize, f64)> = n_grid
        .iter()
        .map(|&n| (n, cfg.lambda * c * c * a.l2_sq_upto(n)))
        .collect();
    let k = levels.len();
    let parts = sample_partial_sums(
        f,
        map,
        &coeffs,
        samples,
        seed,
        || vec![Accumulator::new(); k],
        |accs, s| {
            for (acc, &(n, level)) in accs.iter_mut().zip(&levels) {
                acc.push((s[n].norm_sqr() >= level) as u8 as f64);
            }
        },
    )?;
    let floor = if c4 > 0.0 {
        (1.0 - cfg.lambda) * (1.0 - cfg.lambda) * libm::pow(c / c4, 4.0)
    } else {
        0.0
    };
    let mut all_hold = true;
    for (i, &(n, _)) in levels.iter().enumerate() {
        let acc = merge_all(parts.iter().map(|p| &p[i]));
        let holds = acc.mean() >= floor - SE_SLACK * acc.std_error();
        all_hold &= holds;
        report.rows.push(PzRow {
            n,
            l2_sq: a.l2_sq_upto(n),
            floor,
            fraction: acc.mean(),
            std_error: acc.std_error(),
            holds,
        });
    }
    report.verdict = if !all_hold {
        DivergenceVerdict::FloorViolated
    } else if a.l2_sq_upto(n_top) >= cfg.threshold && floor > 0.0 {
        DivergenceVerdict::DivergesAe
    } else {
        DivergenceVerdict::Inconclusive
    };
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Converged,
    Diverged,
    Inconclusive,
}

/// Which rule of the probe decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeReason {
    FiniteSupport,
    AbsoluteConvergence,
    CauchyWindow,
    BoundedBirkhoffSums,
    SquareSummableTail,
    GrowthEnvelope,
    Undecided,
}

/// Thresholds of the convergence probe. All of them end up in the report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeConfig {
    /// Cauchy oscillation threshold over the trailing window.
    pub eps: f64,
    pub window: usize,
    /// Divergence when `|S_N| > c·√(Σ_{n≤N}|aₙ|²)` on the trailing window.
    pub envelope_c: f64,
    /// Square-summable rule: trailing oscillation at most
    /// `κ·Δ*·√(Σ_{n>N−W}|aₙ|²)`.
    pub tail_kappa: f64,
    /// Bounded Birkhoff sums: `max_n |Σ_{k≤n} f(Tᵏx)| ≤ cap·‖f‖_A`.
    pub birkhoff_cap: f64,
    /// Whether the a.e. convergence theorem is known to apply to the sampled
    /// measure. `None` asks the hypothesis checker (Lebesgue measure).
    pub theorem_applies: Option<bool>,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            eps: 1e-6,
            window: 20,
            envelope_c: 0.2,
            tail_kappa: 6.0,
            birkhoff_cap: 2.0,
            theorem_applies: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub verdict: Verdict,
    pub reason: ProbeReason,
    pub n_max: usize,
    /// `S_{N_max}(x)`.
    pub value: Complex64,
    /// `max |S_m − S_n|` over the trailing window.
    pub oscillation: f64,
    /// `max |S_n|/√(Σ_{k≤n}|a_k|²)` over the trailing window.
    pub envelope_ratio: f64,
    /// `max_n |Σ_{k≤n} f(Tᵏx)|`.
    pub birkhoff_sup: f64,
    /// Error bar for `value` when the verdict is "converged".
    pub tail_bound: Option<f64>,
    pub config: ProbeConfig,
}

/// Finite-`N` verdict on `Σ aₙ f(Tⁿx)`. Rules, first match wins:
/// finite support; absolute convergence; Cauchy window below `eps`;
/// bounded Birkhoff sums with `aₙ → 0` of bounded variation (Abel summation);
/// square-summable coefficients where the a.e. theorem applies and the
/// trailing oscillation is within `κ` tail standard deviations; divergence
/// when `(aₙ) ∉ ℓ²` and the growth envelope is exceeded.
pub fn convergence_probe(
    f: &TorusFunction,
    map: &ExpandingMap,
    a: &CoefficientSequence,
    x: &OrbitPoint,
    n_max: usize,
    cfg: &ProbeConfig,
) -> Result<ConvergenceReport> {
    x.check_budget(map.q(), f.max_freq(), n_max)?;
    let vals = orbit_values(&terms_of(f), map.q(), x, n_max);
    let applies = match cfg.theorem_applies {
        Some(b) => b,
        None => map.hypothesis_check(f).holds(),
    };
    Ok(probe_values(f, a, &vals, applies, map.hypothesis_check(f).profile.delta_star, cfg))
}

pub(crate) fn probe_values(
    f: &TorusFunction,
    a: &CoefficientSequence,
    vals: &[Complex64],
    theorem_applies: bool,
    delta_star: f64,
    cfg: &ProbeConfig,
) -> ConvergenceReport {
    let n_max = vals.len() - 1;
    let mut sums = Vec::with_capacity(vals.len());
    let mut s = Complex64::new(0.0, 0.0);
    let mut b = Complex64::new(0.0, 0.0);
    let mut birkhoff_sup = 0.0f64;
    for (k, v) in vals.iter().enumerate() {
        s += a.a(k) * v;
        b += v;
        birkhoff_sup = birkhoff_sup.max(b.norm());
        sums.push(s);
    }
    let start = n_max.saturating_sub(cfg.window);
    let window = &sums[start..];
    let mut oscillation = 0.0f64;
    for i in 0..window.len() {
        for j in i + 1..window.len() {
            oscillation = oscillation.max((window[i] - window[j]).norm());
        }
    }
    let mut l2 = 0.0;
    let mut envelope_ratio = 0.0f64;
    for (k, sk) in sums.iter().enumerate() {
        l2 += a.a(k) * a.a(k);
        if k >= start && l2 > 0.0 {
            envelope_ratio = envelope_ratio.max(sk.norm() / libm::sqrt(l2));
        }
    }
    let class = a.classify();
    let wiener = f.wiener_norm();
    let mut report = ConvergenceReport {
        verdict: Verdict::Inconclusive,
        reason: ProbeReason::Undecided,
        n_max,
        value: s,
        oscillation,
        envelope_ratio,
        birkhoff_sup,
        tail_bound: None,
        config: *cfg,
    };
    let mut decide = |v: Verdict, r: ProbeReason, tail: Option<f64>| {
        report.verdict = v;
        report.reason = r;
        report.tail_bound = tail;
        report.clone()
    };
    if f.is_zero() {
        return decide(Verdict::Converged, ProbeReason::FiniteSupport, Some(0.0));
    }
    if let Some(last) = a.last_nonzero() {
        if last.map_or(true, |l| l <= n_max) {
            return decide(Verdict::Converged, ProbeReason::FiniteSupport, Some(0.0));
        }
    }
    if class.abs_finite {
        return decide(
            Verdict::Converged,
            ProbeReason::AbsoluteConvergence,
            Some(wiener * a.abs_tail(n_max + 1)),
        );
    }
    if oscillation < cfg.eps {
        return decide(Verdict::Converged, ProbeReason::CauchyWindow, Some(oscillation));
    }
    if class.to_zero && class.bv_finite && birkhoff_sup <= cfg.birkhoff_cap * wiener {
        // Σ_{n>N} aₙvₙ = −a_{N+1}B_N + Σ_{n>N}(aₙ − aₙ₊₁)Bₙ
        let tail = birkhoff_sup * (a.a(n_max + 1).abs() + a.bv_tail(n_max + 1));
        return decide(Verdict::Converged, ProbeReason::BoundedBirkhoffSums, Some(tail));
    }
    if class.l2_finite && theorem_applies {
        let tail_sd = delta_star * libm::sqrt(a.l2_tail(start + 1));
        if oscillation <= cfg.tail_kappa * tail_sd {
            let tail = cfg.tail_kappa * delta_star * libm::sqrt(a.l2_tail(n_max + 1));
            return decide(Verdict::Converged, ProbeReason::SquareSummableTail, Some(tail));
        }
    }
    if !class.l2_finite && envelope_ratio > cfg.envelope_c {
        return decide(Verdict::Diverged, ProbeReason::GrowthEnvelope, None);
    }
    report
}

/// Positive weights `wₙ` for the weighted strong law.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    /// `wₙ = (n+1)^β`, `β > −1`.
    Power(f64),
    Explicit(Vec<f64>),
}

impl Weights {
    pub fn values(&self, n: usize) -> Result<Vec<f64>> {
        let w: Vec<f64> = match self {
            Weights::Power(beta) => {
                if !(*beta > -1.0) {
                    return Err(Error::precondition("power weights need β > −1 so that Wₙ → ∞"));
                }
                (0..=n).map(|k| libm::pow((k + 1) as f64, *beta)).collect()
            }
            Weights::Explicit(v) => {
                if v.len() < n + 1 {
                    return Err(Error::invalid("fewer weights than requested terms"));
                }
                v[..=n].to_vec()
            }
        };
        if w.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::precondition("weights must be positive"));
        }
        Ok(w)
    }

    /// Whether `aₙ = wₙ/Wₙ` is square summable. Power weights give
    /// `aₙ ~ (β+1)/n`; explicit lists are finite.
    pub fn kronecker_l2(&self) -> bool {
        true
    }
}

/// `A_N = Σ_{k≤N} wₖ f(qᵏx) / W_N` for `N = 0..=n_max`.
pub fn weighted_slln(
    f: &TorusFunction,
    map: &ExpandingMap,
    w: &Weights,
    x: &OrbitPoint,
    n_max: usize,
) -> Result<Vec<Complex64>> {
    let w = w.values(n_max)?;
    x.check_budget(map.q(), f.max_freq(), n_max)?;
    let vals = orbit_values(&terms_of(f), map.q(), x, n_max);
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    Ok(vals
        .iter()
        .zip(&w)
        .map(|(v, wk)| {
            num += wk * v;
            den += wk;
            num / den
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SllnReport {
    pub n_max: usize,
    pub tolerance: f64,
    pub samples: usize,
    /// Fraction of sampled points with `|A_{N_max}| < tolerance`.
    pub fraction_below: f64,
    pub kronecker_l2: bool,
    /// Majority vote, only asserted when `kronecker_l2`.
    pub asserted: bool,
    pub seed: u64,
}

/// Points with enough bits for `n_max` steps.
pub fn sample_points(seed: u64, count: usize, bits: u32) -> Vec<OrbitPoint> {
    let mut rng = rng::stream(seed, 0);
    (0..count)
        .map(|_| OrbitPoint::random_wide(&mut rng, bits))
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn slln_vote(
    f: &TorusFunction,
    map: &ExpandingMap,
    w: &Weights,
    n_max: usize,
    samples: usize,
    seed: u64,
    tolerance: f64,
) -> Result<SllnReport> {
    check_samples(samples)?;
    let bits = OrbitPoint::bits_for(n_max, map.q(), f.max_freq());
    let mut below = 0usize;
    for x in sample_points(seed, samples, bits) {
        let traj = weighted_slln(f, map, w, &x, n_max)?;
        if traj[n_max].norm() < tolerance {
            below += 1;
        }
    }
    let fraction_below = below as f64 / samples as f64;
    let kronecker_l2 = w.kronecker_l2();
    Ok(SllnReport {
        n_max,
        tolerance,
        samples,
        fraction_below,
        kronecker_l2,
        asserted: kronecker_l2 && fraction_below > 0.5,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeReport {
    /// `max |B_N(x)|/env(N)` over samples and admissible `N`.
    pub constant: f64,
    pub per_sample: Vec<f64>,
    /// Smallest `N` at which every iterated logarithm is positive.
    pub first_n: usize,
}

/// `log_m` iterated `m` times; `None` once a value is not positive.
fn iterated_logs(n: f64, m: usize) -> Option<Vec<f64>> {
    let mut out = Vec::with_capacity(m);
    let mut v = n;
    for _ in 0..m {
        if v <= 1.0 {
            return None;
        }
        v = libm::log(v);
        out.push(v);
    }
    Some(out)
}

/// `√(N·log N ⋯ log_{m−1} N·(log_m N)^{1+ε})`.
pub fn envelope(n: usize, m: usize, eps: f64) -> Option<f64> {
    let logs = iterated_logs(n as f64, m)?;
    let mut prod = n as f64;
    for (j, l) in logs.iter().enumerate() {
        prod *= if j + 1 == m { libm::pow(*l, 1.0 + eps) } else { *l };
    }
    Some(libm::sqrt(prod))
}

pub fn envelope_check(
    f: &TorusFunction,
    map: &ExpandingMap,
    x_samples: &[OrbitPoint],
    n_max: usize,
    m: usize,
    eps: f64,
) -> Result<EnvelopeReport> {
    if m == 0 {
        return Err(Error::invalid("envelope needs at least one logarithm"));
    }
    if !map.hypothesis_check(f).holds() {
        return Err(Error::precondition("envelope check needs a function satisfying (H1)/(H2)"));
    }
    let first_n = (1..=n_max + 1)
        .find(|&n| envelope(n, m, eps).is_some())
        .unwrap_or(n_max + 1);
    let terms = terms_of(f);
    let mut per_sample = Vec::with_capacity(x_samples.len());
    for x in x_samples {
        x.check_budget(map.q(), f.max_freq(), n_max)?;
        let vals = orbit_values(&terms, map.q(), x, n_max);
        let mut b = Complex64::new(0.0, 0.0);
        let mut best = 0.0f64;
        // B_N sums the first N terms f(x), …, f(T^{N−1}x).
        for (k, v) in vals.iter().enumerate() {
            b += v;
            let n = k + 1;
            if n >= first_n {
                if let Some(env) = envelope(n, m, eps) {
                    best = best.max(b.norm() / env);
                }
            }
        }
        per_sample.push(best);
    }
    Ok(EnvelopeReport {
        constant: per_sample.iter().copied().fold(0.0, f64::max),
        per_sample,
        first_n,
    })
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Converged => "converged",
        Verdict::Diverged => "diverged",
        Verdict::Inconclusive => "inconclusive",
    }
}

pub fn reason_name(r: ProbeReason) -> &'static str {
    match r {
        ProbeReason::FiniteSupport => "finite-support",
        ProbeReason::AbsoluteConvergence => "absolute-convergence",
        ProbeReason::CauchyWindow => "cauchy-window",
        ProbeReason::BoundedBirkhoffSums => "bounded-birkhoff-sums",
        ProbeReason::SquareSummableTail => "square-summable-tail",
        ProbeReason::GrowthEnvelope => "growth-envelope",
        ProbeReason::Undecided => "undecided",
    }
}

pub fn rule_name(rule: &CoeffRule) -> String {
    match rule {
        CoeffRule::Explicit(v) => alloc::format!("explicit[{}]", v.len()),
        CoeffRule::Power(a) => alloc::format!("power:{a}"),
        CoeffRule::Constant(c) => alloc::format!("constant:{c}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three() -> ExpandingMap {
        ExpandingMap::new(3).unwrap()
    }

    #[test]
    fn partial_sum_examples() {
        let t = three();
        let x = OrbitPoint::rational(1, 3).unwrap();
        let zero = CoefficientSequence::constant(0.0, 10);
        assert_eq!(partial_sum(&TorusFunction::exp(1), &t, &zero, 5, &x).unwrap(), Complex64::new(0.0, 0.0));

        let one = CoefficientSequence::explicit(vec![1.0]);
        let s = partial_sum(&TorusFunction::exp(1), &t, &one, 0, &x).unwrap();
        assert!((s - unit(1.0 / 3.0)).norm() < 1e-15);

        let two = CoefficientSequence::explicit(vec![1.0, 1.0]);
        let x = OrbitPoint::rational(1, 8).unwrap();
        let s = partial_sum(&TorusFunction::cos(1, 1.0), &t, &two, 1, &x).unwrap();
        assert!(s.norm() < 1e-15);
    }

    #[test]
    fn budget_failure_propagates() {
        let t = three();
        let a = CoefficientSequence::power(1.0, 100);
        let x = OrbitPoint::Fixed(12345);
        assert!(matches!(
            partial_sum(&TorusFunction::exp(1), &t, &a, 61, &x),
            Err(Error::PrecisionBudget { .. })
        ));
        assert!(partial_sum(&TorusFunction::exp(1), &t, &a, 60, &x).is_ok());
    }

    #[test]
    fn power_classification() {
        let c = CoefficientSequence::power(0.75, 10).classify();
        assert!(c.sum_diverges() && c.l2_finite && !c.abs_finite && c.to_zero);
        let c = CoefficientSequence::power(0.5, 10).classify();
        assert!(!c.l2_finite);
        let c = CoefficientSequence::power(1.0, 10).classify();
        assert!(c.sum_diverges());
        let c = CoefficientSequence::power(1.2, 10).classify();
        assert!(!c.sum_diverges() && c.abs_finite);
    }

    #[test]
    fn derived_sums_match_direct() {
        let a = CoefficientSequence::power(1.0, 5);
        let v = [0.0, 1.0, 0.5, 1.0 / 3.0, 0.25];
        let l2: f64 = v.iter().map(|x| x * x).sum();
        let bv: f64 = v.windows(2).map(|w| (w[0] - w[1]).abs()).sum();
        assert!((a.l2_sq() - l2).abs() < 1e-14);
        assert!((a.bv() - bv).abs() < 1e-14);
        assert!((a.tail_max(9) - 0.1).abs() < 1e-15);
        assert!(a.l2_tail(11) >= (11..10_000).map(|n| 1.0 / (n * n) as f64).sum::<f64>());
    }

    #[test]
    fn series_deltas_convolve() {
        let p = MartingaleProfile::from_deltas(vec![
            crate::torusfn::Interval::point(1.0),
            crate::torusfn::Interval::point(0.5),
        ]);
        assert_eq!(series_deltas(&p, &[1.0, 2.0]), vec![1.0, 2.5, 1.0]);
    }

    #[test]
    fn zero_coefficients_pass_trivially() {
        let t = three();
        let a = CoefficientSequence::constant(0.0, 10);
        let r = mc_moment(&TorusFunction::exp(1), &t, &a, 5, 2.0, 100, 1).unwrap();
        assert_eq!((r.estimate, r.bound), (0.0, 0.0));
        assert!(r.passed);
        let m = maximal_check(&TorusFunction::exp(1), &t, &a, 0, 3, 4.0, 100, 1).unwrap();
        assert_eq!(m.estimate, 0.0);
        assert!(m.passed);
    }

    #[test]
    fn subgaussian_at_zero_lambda() {
        let t = three();
        let a = CoefficientSequence::explicit(vec![1.0]);
        let r = subgaussian_check(&TorusFunction::cos(1, 1.0), &t, &a, 0, &[0.0], 1000, 3).unwrap();
        assert_eq!(r[0].estimate, 1.0);
        assert_eq!(r[0].bound, 1.0);
        assert_eq!(r[0].status, CheckStatus::Pass);
        assert!(subgaussian_check(&TorusFunction::exp(1), &t, &a, 0, &[1.0], 10, 3).is_err());
    }

    #[test]
    fn maximal_factor_for_fourth_moment() {
        let f = maximal_factor(4.0);
        assert!((f - 6.2852).abs() < 5e-5, "{f}");
    }

    #[test]
    fn probe_finite_support_and_period_two() {
        let t = three();
        let cfg = ProbeConfig::default();
        let x = OrbitPoint::rational(1, 8).unwrap();
        let fin = CoefficientSequence::explicit(vec![1.0, -2.0, 0.5]);
        let r = convergence_probe(&TorusFunction::exp(1), &t, &fin, &x, 50, &cfg).unwrap();
        assert_eq!((r.verdict, r.reason), (Verdict::Converged, ProbeReason::FiniteSupport));

        let a = CoefficientSequence::power(1.0, 60);
        let r = convergence_probe(&TorusFunction::cos(1, 1.0), &t, &a, &x, 60, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Converged);
        assert_eq!(r.reason, ProbeReason::BoundedBirkhoffSums);
        let limit = -core::f64::consts::FRAC_1_SQRT_2 * core::f64::consts::LN_2;
        assert!((r.value.re - limit).abs() <= r.tail_bound.unwrap());
    }

    #[test]
    fn slln_of_zero_function() {
        let t = three();
        let x = OrbitPoint::rational(2, 7).unwrap();
        let traj = weighted_slln(&TorusFunction::zero(), &t, &Weights::Power(0.0), &x, 100).unwrap();
        assert!(traj.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn envelope_threshold() {
        assert!(envelope(1, 1, 0.1).is_none());
        assert!(envelope(2, 1, 0.1).is_some());
        assert!(envelope(2, 2, 0.1).is_none());
        assert!(envelope(3, 2, 0.1).is_some());
        let x = [OrbitPoint::rational(1, 5).unwrap()];
        let r = envelope_check(&TorusFunction::zero(), &three(), &x, 100, 1, 0.1).unwrap();
        assert_eq!(r.constant, 0.0);
    }
}
