//! Ruelle operators `𝓛φ(x) = Σ_{Ty=x} ψ(y)φ(y)` for `T x = qx mod 1`, their
//! leading eigendata `(ρ, h, ν)`, pressure curves and tilted Gibbs measures.
//!
//! `h` lives on a uniform grid of odd size `M` and is extended by
//! trigonometric interpolation. `ν` is an Ulam vector on the `qᵐ` cells of
//! depth `m`, with the potential evaluated at cell midpoints.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::orbit::OrbitPoint;
use crate::rng::{self, StreamRng};
use crate::torusfn::TorusFunction;
use crate::transfer::ExpandingMap;
use crate::PI;

#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    /// `ψ = e^{Re g}`.
    Exp(TorusFunction),
    /// `ψ = Re p`, which must be strictly positive.
    Direct(TorusFunction),
    /// `ψ(x) h(x) / (ρ h(Tx))` for a solved operator.
    Normalized { base: Box<Potential>, h: TorusFunction, rho: f64, q: u64 },
}

impl Potential {
    pub fn constant(c: f64) -> Self {
        Potential::Direct(TorusFunction::constant(c))
    }

    /// `e^{t·g}`.
    pub fn tilted(g: &TorusFunction, t: f64) -> Self {
        Potential::Exp(g.scale(Complex64::new(t, 0.0)))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Potential::Exp(g) => libm::exp(g.evaluate(x).re),
            Potential::Direct(p) => p.evaluate(x).re,
            Potential::Normalized { base, h, rho, q } => {
                let tx = crate::torusfn::frac(*q as f64 * x);
                base.eval(x) * h.evaluate(x).re / (rho * h.evaluate(tx).re)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuelleOperator {
    pub map: ExpandingMap,
    pub potential: Potential,
    pub normalized: bool,
}

impl RuelleOperator {
    /// Checks `ψ > 0` on a fine grid.
    pub fn new(map: ExpandingMap, potential: Potential) -> Result<Self> {
        let m = 4096;
        let min = (0..m).map(|j| potential.eval(j as f64 / m as f64)).fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(Error::invalid(format!("potential must be strictly positive (grid min {min:e})")));
        }
        Ok(RuelleOperator { map, potential, normalized: false })
    }

    pub fn tilted(map: ExpandingMap, g: &TorusFunction, t: f64) -> Result<Self> {
        if !g.is_real() {
            return Err(Error::invalid("tilting function must be real-valued"));
        }
        Self::new(map, Potential::tilted(g, t))
    }

    /// `𝓛φ(x)`.
    pub fn apply_at(&self, phi: impl Fn(f64) -> f64, x: f64) -> f64 {
        let q = self.map.q();
        (0..q)
            .map(|j| {
                let y = (x + j as f64) / q as f64;
                self.potential.eval(y) * phi(y)
            })
            .sum()
    }

    /// The normalized operator `ψ̃ = ψ h / (ρ h∘T)`; its transfer operator fixes 1.
    pub fn normalized(&self, sol: &GibbsSolution) -> RuelleOperator {
        RuelleOperator {
            map: self.map,
            potential: Potential::Normalized {
                base: Box::new(self.potential.clone()),
                h: sol.h_interp.clone(),
                rho: sol.rho,
                q: self.map.q(),
            },
            normalized: true,
        }
    }

    /// `sup |𝓛1 − 1|` on a grid of `m` points.
    pub fn unit_residual(&self, m: usize) -> f64 {
        (0..m).map(|j| (self.apply_at(|_| 1.0, j as f64 / m as f64) - 1.0).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsConfig {
    /// Odd grid size for `h`.
    pub grid_size: usize,
    /// Cylinder depth `m` of the Ulam vector.
    pub depth: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Central-difference step when the `t` grid has a single point.
    pub pressure_step: f64,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        GibbsConfig { grid_size: 243, depth: 8, tolerance: 1e-12, max_iterations: 100_000, pressure_step: 0.01 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Tolerance,
    IterationCap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GibbsSolution {
    pub q: u64,
    /// Leading eigenvalue from the grid iteration.
    pub rho: f64,
    /// Leading eigenvalue of the Ulam matrix.
    pub rho_cylinder: f64,
    /// `h` on the grid `l/M`, scaled so `⟨ν, h⟩ = 1`.
    pub h: Vec<f64>,
    pub h_interp: TorusFunction,
    /// Probability vector over the depth-`m` cells.
    pub nu: Vec<f64>,
    /// `μ(c) = ν(c)·h(center of c)`.
    pub mu: Vec<f64>,
    pub pressure: f64,
    pub depth: usize,
    pub iterations: usize,
    pub stop: StopReason,
    pub residual_h: f64,
    pub residual_nu: f64,
    potential: Potential,
}

impl GibbsSolution {
    pub fn h_at(&self, x: f64) -> f64 {
        self.h_interp.evaluate(x).re
    }

    pub fn cells(&self) -> usize {
        self.nu.len()
    }

    /// `∫ φ dν` by the midpoint rule on the cells.
    pub fn integrate_nu(&self, phi: impl Fn(f64) -> f64) -> f64 {
        let w = 1.0 / self.cells() as f64;
        self.nu.iter().enumerate().map(|(c, v)| v * phi((c as f64 + 0.5) * w)).sum()
    }

    pub fn integrate_mu(&self, phi: impl Fn(f64) -> f64) -> f64 {
        let w = 1.0 / self.cells() as f64;
        self.mu.iter().enumerate().map(|(c, v)| v * phi((c as f64 + 0.5) * w)).sum()
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }
}

/// Interpolation kernel `K[j][i][l] = D_M(y_ij − x_l)/M` for the `q` preimages
/// `y_ij = (x_i + j)/q` of each grid point.
#[derive(Debug, Clone)]
struct GridKernel {
    q: usize,
    m: usize,
    k: Vec<f64>,
}

impl GridKernel {
    fn new(q: u64, m: usize) -> Self {
        let q = q as usize;
        let mut k = vec![0.0; q * m * m];
        for j in 0..q {
            for i in 0..m {
                let y = (i as f64 / m as f64 + j as f64) / q as f64;
                for l in 0..m {
                    k[(j * m + i) * m + l] = dirichlet(m, y - l as f64 / m as f64) / m as f64;
                }
            }
        }
        GridKernel { q, m, k }
    }

    /// Matrix `A[i][l] = Σ_j ψ(y_ij) K[j][i][l]`.
    fn operator(&self, psi: &Potential) -> Vec<f64> {
        let (q, m) = (self.q, self.m);
        let mut a = vec![0.0; m * m];
        for j in 0..q {
            for i in 0..m {
                let y = (i as f64 / m as f64 + j as f64) / q as f64;
                let w = psi.eval(y);
                let row = &self.k[(j * m + i) * m..(j * m + i + 1) * m];
                for (dst, kv) in a[i * m..(i + 1) * m].iter_mut().zip(row) {
                    *dst += w * kv;
                }
            }
        }
        a
    }
}

/// `D_M(u) = Σ_{|k|≤(M−1)/2} e^{2πiku}` for odd `M`.
fn dirichlet(m: usize, u: f64) -> f64 {
    let u = u - libm::round(u);
    let s = libm::sin(PI * u);
    if s.abs() < 1e-13 {
        m as f64
    } else {
        libm::sin(m as f64 * PI * u) / s
    }
}

const VECTOR_TOL: f64 = 1e-11;

struct PowerResult {
    rho: f64,
    v: Vec<f64>,
    iterations: usize,
    stop: StopReason,
}

fn power_iterate(
    n: usize,
    apply: impl Fn(&[f64], &mut [f64]),
    norm: impl Fn(&[f64]) -> f64,
    cfg: &GibbsConfig,
) -> PowerResult {
    let mut v = vec![1.0; n];
    let s = norm(&v);
    v.iter_mut().for_each(|x| *x /= s);
    let mut next = vec![0.0; n];
    let mut rho = f64::NAN;
    for it in 1..=cfg.max_iterations {
        apply(&v, &mut next);
        let r = norm(&next);
        next.iter_mut().for_each(|x| *x /= r);
        let change = v.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / sup(&next);
        core::mem::swap(&mut v, &mut next);
        // The eigenvalue estimate can settle long before the vector does.
        if (r - rho).abs() < cfg.tolerance * r.max(1.0) && change < VECTOR_TOL {
            return PowerResult { rho: r, v, iterations: it, stop: StopReason::Tolerance };
        }
        rho = r;
    }
    PowerResult { rho, v, iterations: cfg.max_iterations, stop: StopReason::IterationCap }
}

fn matvec(a: &[f64], m: usize, v: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = a[i * m..(i + 1) * m].iter().zip(v).map(|(x, y)| x * y).sum();
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

fn check_grid(cfg: &GibbsConfig) -> Result<()> {
    if cfg.grid_size < 3 || cfg.grid_size % 2 == 0 {
        return Err(Error::invalid("Gibbs grid size must be odd and at least 3"));
    }
    Ok(())
}

/// Grid-only leading eigenvalue, used for pressure curves.
fn grid_eigen(kernel: &GridKernel, psi: &Potential, cfg: &GibbsConfig) -> Result<(PowerResult, f64)> {
    let m = kernel.m;
    let a = kernel.operator(psi);
    let res = power_iterate(m, |v, out| matvec(&a, m, v, out), sup, cfg);
    let mut av = vec![0.0; m];
    matvec(&a, m, &res.v, &mut av);
    let residual = av.iter().zip(&res.v).map(|(x, y)| (x - res.rho * y).abs()).fold(0.0, f64::max) / sup(&res.v);
    if res.stop == StopReason::IterationCap || !(residual < 1e-8) || !(res.rho > 0.0) {
        return Err(Error::NoConvergence { iterations: res.iterations, last_change: f64::NAN, residual });
    }
    Ok((res, residual))
}

/// Leading eigendata `(ρ, h, ν)` and the Gibbs measure `μ = h ν`.
pub fn solve(op: &RuelleOperator, cfg: GibbsConfig) -> Result<GibbsSolution> {
    check_grid(&cfg)?;
    if cfg.depth == 0 {
        return Err(Error::invalid("Ulam depth must be at least 1"));
    }
    let q = op.map.q();
    let cells = (q as usize)
        .checked_pow(cfg.depth as u32)
        .filter(|&c| c <= 1 << 24)
        .ok_or_else(|| Error::invalid(format!("depth {} gives too many cells for q = {q}", cfg.depth)))?;
    let m = cfg.grid_size;
    let kernel = GridKernel::new(q, m);
    let (grid, residual_h) = grid_eigen(&kernel, &op.potential, &cfg)?;

    // Ulam matrix: (L*ν)(C) = Σ_d ψ((center_b + a₁)/q) ν(b) over the q
    // children b of T(C).
    let sub = cells / q as usize;
    let width = 1.0 / cells as f64;
    let weights: Vec<f64> = (0..cells)
        .flat_map(|c| {
            let a1 = c / sub;
            let tc = c % sub;
            let psi = &op.potential;
            (0..q as usize).map(move |d| {
                let b = tc * q as usize + d;
                psi.eval(((b as f64 + 0.5) * width + a1 as f64) / q as f64)
            })
        })
        .collect();
    let qs = q as usize;
    let apply = |v: &[f64], out: &mut [f64]| {
        for (c, o) in out.iter_mut().enumerate() {
            let tc = c % sub;
            *o = (0..qs).map(|d| weights[c * qs + d] * v[tc * qs + d]).sum();
        }
    };
    let l1 = |v: &[f64]| v.iter().sum::<f64>();
    let ulam = power_iterate(cells, apply, l1, &cfg);
    let mut lnu = vec![0.0; cells];
    apply(&ulam.v, &mut lnu);
    let residual_nu: f64 = lnu.iter().zip(&ulam.v).map(|(x, y)| (x - ulam.rho * y).abs()).sum();
    if ulam.stop == StopReason::IterationCap || !(residual_nu < 1e-8) {
        return Err(Error::NoConvergence { iterations: ulam.iterations, last_change: f64::NAN, residual: residual_nu });
    }
    let nu = ulam.v;

    let mut h_interp = grid_interpolant(&grid.v);
    let pairing: f64 = nu.iter().enumerate().map(|(c, v)| v * h_interp.evaluate((c as f64 + 0.5) * width).re).sum();
    if !(pairing > 0.0) {
        return Err(Error::numerical("⟨ν, h⟩ is not positive"));
    }
    h_interp = h_interp.scale(Complex64::new(1.0 / pairing, 0.0));
    let h: Vec<f64> = grid.v.iter().map(|x| x / pairing).collect();
    let mu: Vec<f64> =
        nu.iter().enumerate().map(|(c, v)| v * h_interp.evaluate((c as f64 + 0.5) * width).re).collect();
    Ok(GibbsSolution {
        q,
        rho: grid.rho,
        rho_cylinder: ulam.rho,
        h,
        h_interp,
        nu,
        mu,
        pressure: libm::log(grid.rho),
        depth: cfg.depth,
        iterations: grid.iterations.max(ulam.iterations),
        stop: StopReason::Tolerance,
        residual_h,
        residual_nu,
        potential: op.potential.clone(),
    })
}

/// Trigonometric interpolant through grid values `v_l` at `l/M`.
fn grid_interpolant(v: &[f64]) -> TorusFunction {
    let m = v.len();
    let half = (m as i64 - 1) / 2;
    TorusFunction::new((-half..=half).map(|k| {
        let c: Complex64 = v
            .iter()
            .enumerate()
            .map(|(l, &x)| x * crate::torusfn::unit(-((k * l as i64).rem_euclid(m as i64)) as f64 / m as f64))
            .sum();
        (k, c / m as f64)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsDepthRow {
    pub n: usize,
    pub cylinders: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl GibbsDepthRow {
    pub fn spread(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GibbsCheck {
    pub rows: Vec<GibbsDepthRow>,
    /// Smallest `C` with every ratio in `[C⁻¹, C]`.
    pub constant: f64,
    /// Largest spread growth `spread(n+1)/spread(n)` over consecutive depths.
    pub max_growth: f64,
    /// Spread growth below 1.05 at every depth step.
    pub bounded: bool,
}

const GROWTH_LIMIT: f64 = 1.05;

/// Ratios `ν(C)/(ρ⁻ⁿ Gₙ(center C))`, `Gₙ(x) = Π_{j<n} ψ(Tʲx)`, on depth-`n`
/// cylinders for `n = 1..=m`. At most `samples` cylinders per depth are used,
/// chosen with `seed` when there are more.
pub fn gibbs_property_check(sol: &GibbsSolution, samples: usize, seed: u64) -> Result<GibbsCheck> {
    if samples == 0 {
        return Err(Error::invalid("at least one cylinder per depth is required"));
    }
    let q = sol.q as usize;
    let rho = sol.rho_cylinder;
    let mut rows = Vec::with_capacity(sol.depth);
    let mut rng = rng::stream(seed, 0);
    for n in 1..=sol.depth {
        let count = q.pow(n as u32);
        let block = sol.cells() / count;
        let picks: Vec<usize> = if count <= samples {
            (0..count).collect()
        } else {
            (0..samples).map(|_| rng::below(&mut rng, count as u64) as usize).collect()
        };
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for c in picks {
            let nu_c: f64 = sol.nu[c * block..(c + 1) * block].iter().sum();
            let mut x = (c as f64 + 0.5) / count as f64;
            let mut g = 1.0;
            for _ in 0..n {
                g *= sol.potential.eval(x) / rho;
                x = crate::torusfn::frac(q as f64 * x);
            }
            let r = nu_c / g;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        rows.push(GibbsDepthRow { n, cylinders: count.min(samples), min_ratio: lo, max_ratio: hi });
    }
    let constant = rows.iter().map(|r| r.max_ratio.max(1.0 / r.min_ratio)).fold(1.0, f64::max);
    let max_growth = rows.windows(2).map(|w| w[1].spread() / w[0].spread()).fold(1.0, f64::max);
    Ok(GibbsCheck { rows, constant, max_growth, bounded: max_growth < GROWTH_LIMIT })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PressureCurve {
    pub ts: Vec<f64>,
    pub p: Vec<f64>,
    /// `m_t = P′(t)` by central differences.
    pub m: Vec<f64>,
    /// Smallest second difference `P(t+δ) − 2P(t) + P(t−δ)`.
    pub convexity_cert: f64,
    pub step: f64,
    /// `m_t ≠ 0` wherever `|t| ≥ 0.05`.
    pub strictly_convex: bool,
}

/// `P(t) = log ρ(t)` for potentials `e^{t·g}`.
pub fn pressure_curve(map: &ExpandingMap, g: &TorusFunction, ts: &[f64], cfg: GibbsConfig) -> Result<PressureCurve> {
    check_grid(&cfg)?;
    if ts.is_empty() {
        return Err(Error::invalid("pressure curve needs at least one t"));
    }
    if !g.is_real() {
        return Err(Error::invalid("pressure curve needs a real-valued function"));
    }
    if g.mean().norm() > 1e-14 * g.wiener_norm().max(1.0) {
        return Err(Error::precondition("pressure curve needs a mean-zero function"));
    }
    let step = if ts.len() >= 2 { ts[1] - ts[0] } else { cfg.pressure_step };
    if !(step > 0.0) || ts.windows(2).any(|w| ((w[1] - w[0]) - step).abs() > 1e-9 * step.max(1.0)) {
        return Err(Error::invalid("pressure t-grid must be increasing and uniformly spaced"));
    }
    let kernel = GridKernel::new(map.q(), cfg.grid_size);
    let ext: Vec<f64> = core::iter::once(ts[0] - step)
        .chain(ts.iter().copied())
        .chain(core::iter::once(ts[ts.len() - 1] + step))
        .collect();
    let eval = |t: f64| -> Result<f64> {
        let psi = Potential::tilted(g, t);
        Ok(libm::log(grid_eigen(&kernel, &psi, &cfg)?.0.rho))
    };
    #[cfg(feature = "parallel")]
    let pe: Vec<f64> = {
        use rayon::prelude::*;
        ext.par_iter().map(|&t| eval(t)).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let pe: Vec<f64> = ext.iter().map(|&t| eval(t)).collect::<Result<_>>()?;
    let m: Vec<f64> = (1..pe.len() - 1).map(|i| (pe[i + 1] - pe[i - 1]) / (2.0 * step)).collect();
    let convexity_cert =
        (1..pe.len() - 1).map(|i| pe[i + 1] - 2.0 * pe[i] + pe[i - 1]).fold(f64::INFINITY, f64::min);
    let strictly_convex = ts.iter().zip(&m).all(|(&t, &mt)| t.abs() < 0.05 || mt.abs() > 1e-9);
    Ok(PressureCurve { ts: ts.to_vec(), p: pe[1..pe.len() - 1].to_vec(), m, convexity_cert, step, strictly_convex })
}

/// Uniform grid `t_min, t_min + step, …` up to `t_max` inclusive.
pub fn t_grid(t_min: f64, t_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(t_max >= t_min) {
        return Err(Error::invalid("t-grid needs step > 0 and t_max >= t_min"));
    }
    let n = libm::floor((t_max - t_min) / step + 1e-9) as usize;
    Ok((0..=n).map(|i| t_min + step * i as f64).collect())
}

/// Draw `count` points from `μ`: a depth-`m` cell with probability `μ(c)`,
/// then uniform inside it. Points carry 128 bits.
pub fn sample_mu_t(sol: &GibbsSolution, count: usize, seed: u64) -> Vec<OrbitPoint> {
    sample_mu_t_wide(sol, count, seed, 128)
}

/// As [`sample_mu_t`] with at least `bits` bits per point.
pub fn sample_mu_t_wide(sol: &GibbsSolution, count: usize, seed: u64, bits: u32) -> Vec<OrbitPoint> {
    let total: f64 = sol.mu.iter().sum();
    let mut cdf = Vec::with_capacity(sol.mu.len());
    let mut acc = 0.0;
    for w in &sol.mu {
        acc += w.max(0.0) / total;
        cdf.push(acc);
    }
    let cells = sol.cells() as u128;
    let width = u128::MAX / cells;
    let extra = (bits.max(128) as usize).div_ceil(64) - 2;
    let parts = rng::chunked(count, seed, |rng: &mut StreamRng, n| {
        (0..n)
            .map(|_| {
                let u = rng::uniform(rng) * acc;
                let c = cdf.partition_point(|&v| v <= u).min(sol.mu.len() - 1) as u128;
                let r = ((rng.next_u64() as u128) << 64 | rng.next_u64() as u128) % width;
                let top = c * width + r;
                if extra == 0 {
                    OrbitPoint::Fixed(top)
                } else {
                    let mut limbs = vec![(top >> 64) as u64, top as u64];
                    limbs.extend((0..extra).map(|_| rng.next_u64()));
                    OrbitPoint::Wide(limbs)
                }
            })
            .collect::<Vec<_>>()
    });
    parts.into_iter().flatten().collect()
}
