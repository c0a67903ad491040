//! Named experiments. Each parameter struct doubles as the CLI argument set
//! and the `params` table of a JSON config, so both routes share defaults.

use std::path::{Path, PathBuf};

use clap::Args;
use ergseries_core::gibbs::{self, RuelleOperator};
use ergseries_core::riesz::{self, HlsGrid};
use ergseries_core::series::{self, reason_name, verdict_name};
use ergseries_core::weierstrass::{self, ClassifyConfig, WeierstrassSpec};
use ergseries_core::{Complex64, ExpandingMap, OrbitPoint, TorusFunction};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::AppError;
use crate::output::{num, Table};
use crate::parse;
use crate::plot;
use crate::tolerances::Tolerances;

/// Defaults come from the clap attributes alone.
fn clap_defaults<T: Args>() -> T {
    let cmd = T::augment_args(clap::Command::new("defaults").no_binary_name(true));
    let m = cmd.try_get_matches_from(std::iter::empty::<String>()).expect("defaults parse");
    T::from_arg_matches(&m).expect("defaults parse")
}

macro_rules! params {
    ($(#[$doc:meta])* $name:ident { $($body:tt)* }) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
        #[serde(default, deny_unknown_fields)]
        pub struct $name { $($body)* }

        impl Default for $name {
            fn default() -> Self {
                clap_defaults()
            }
        }
    };
}

params! {
    /// `‖Lⁿf‖∞` profile; CSV `n,sup_lower,sup_upper`.
    TransferDecay {
        #[arg(long, default_value_t = 3)]
        pub q: u64,
        #[arg(long, default_value = "cos1")]
        pub f: String,
        #[arg(long, default_value_t = 30)]
        pub n_max: usize,
        #[arg(long)]
        pub out: Option<PathBuf>,
    }
}

params! {
    /// Pressure curve; CSV `t,P,m_t`.
    GibbsPressure {
        #[arg(long, default_value_t = 3)]
        pub q: u64,
        #[arg(long, default_value = "cos1")]
        pub g: String,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        pub t_min: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        pub t_max: f64,
        #[arg(long, default_value_t = 0.01)]
        pub t_step: f64,
        #[arg(long, default_value_t = 243)]
        pub grid_size: usize,
        #[arg(long, default_value_t = 8)]
        pub depth: usize,
        #[arg(long)]
        pub out: Option<PathBuf>,
    }
}

params! {
    /// Gibbs-property ratios per cylinder depth; CSV `n,cylinders,min_ratio,max_ratio`.
    GibbsCheck {
        #[arg(long, default_value_t = 3)]
        pub q: u64,
        #[arg(long, default_value = "cos1")]
        pub g: String,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        pub t: f64,
        #[arg(long, default_value_t = 20_000)]
        pub samples: usize,
        #[arg(long, default_value_t = 243)]
        pub grid_size: usize,
        #[arg(long, default_value_t = 8)]
        pub depth: usize,
        #[arg(long)]
        pub out: Option<PathBuf>,
    }
}

params! {
    /// Partial sums at one point with the convergence verdict; CSV `n,re,im`.
    SeriesProbe {
        #[arg(long, default_value_t = 3)]
        pub q: u64,
        #[arg(long, default_value = "cos1")]
        pub f: String,
        #[arg(long, default_value = "power:1")]
        pub a: String,
        #[arg(long, default_value = "0.37")]
        pub x: String,
        #[arg(long, default_value_t = 50)]
        pub n_max: usize,
        #[arg(long)]
        pub out: Option<PathBuf>,
    }
}

params! {
    /// Monte-Carlo `E|S_N|^p` against the Khintchine bound; CSV
    /// `p,estimate,std_error,bound,passed`.
    SeriesMoments {
        #[arg(long, default_value_t = 3)]
        pub q: u64,
        #[arg(long, default_value = "exp1")]
        pub f: String,
        #[arg(long, default_value = "power:1")]
        pub a: String,
        #[arg(long, default_value_t = 10)]
        pub n: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [2.0, 4.0])]
        pub p: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        pub samples: usize,
        #[arg(long)]
        pub out: Option<PathBuf>,
    }
}

params! {
    /// Toeplitz extremal eigenvalues; CSV `N,lambda_min,lambda_max`.
    RieszBounds {
        #[arg(long, default_value_t = 3)]
        pub q: u64,
        #[arg(long, default_value = "cos1+0.5*cos3")]
        pub f: String,
        #[arg(long, value_delimiter = ',', default_values_t = [8, 16, 32, 64])]
        pub orders: Vec<usize>,
        #[arg(long)]
        pub out: Option<PathBuf>,
    }
}

params! {
    /// Dirichlet-series criterion on a half-plane grid; CSV `sigma,min_abs`.
    RieszHls {
        #[arg(long, default_value = "power:2")]
        pub c: String,
        #[arg(long, default_value_t = 0.05)]
        pub sigma_min: f64,
        #[arg(long, default_value_t = 4.0)]
        pub sigma_max: f64,
        #[arg(long, default_value_t = 50.0)]
        pub t_max: f64,
        #[arg(long, default_value_t = 40)]
        pub sigma_steps: usize,
        #[arg(long, default_value_t = 401)]
        pub t_steps: usize,
        #[arg(long, default_value_t = 2000)]
        pub truncation: usize,
        #[arg(long)]
        pub out: Option<PathBuf>,
    }
}

params! {
    /// Fejér–Riesz factor of a real symmetric nonnegative trigonometric
    /// polynomial given as `c₋ₙ,…,cₙ`; CSV `k,re,im`.
    RieszFactor {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [0.5, 1.25, 0.5])]
        pub c: Vec<f64>,
        #[arg(long)]
        pub out: Option<PathBuf>,
    }
}

params! {
    /// Differentiability rates of `F_α`; CSV `alpha,frac_differentiable,frac_inconclusive`.
    WeierDichotomy {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [0.3, 0.75, 1.2])]
        pub alphas: Vec<f64>,
        #[arg(long, default_value_t = 500)]
        pub samples: usize,
        #[arg(long, default_value_t = 50)]
        pub n_max: usize,
        #[arg(long)]
        pub out: Option<PathBuf>,
    }
}

params! {
    /// Both differentiability routes at one point; CSV of the difference-quotient
    /// ladder `h,N,quotient_re,quotient_im,partial_sum_re,partial_sum_im`.
    WeierClassify {
        #[arg(long, default_value = "0.125")]
        pub x: String,
        #[arg(long, default_value = "power:1")]
        pub a: String,
        #[arg(long, default_value = "cos1")]
        pub f_prime: String,
        #[arg(long, default_value_t = 60)]
        pub n_max: usize,
        /// Also render `F` on `[0, 1)` to this SVG file.
        #[arg(long)]
        pub plot: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        pub plot_resolution: usize,
        #[arg(long)]
        pub out: Option<PathBuf>,
    }
}

params! {
    /// Periodic points sorted by per-period Birkhoff sum; CSV
    /// `num,den,period,sum_re,sum_im,zero_sum`.
    WeierScan {
        #[arg(long, default_value = "cos1")]
        pub g: String,
        #[arg(long, default_value_t = 6)]
        pub p_max: usize,
        #[arg(long)]
        pub out: Option<PathBuf>,
    }
}

params! {
    /// Drift decomposition under the tilted Gibbs measure; one-row CSV.
    WeierTilted {
        #[arg(long, default_value = "cos1")]
        pub f_prime: String,
        #[arg(long, default_value = "power:1")]
        pub a: String,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        pub t: f64,
        #[arg(long, default_value_t = 10_000)]
        pub samples: usize,
        #[arg(long, default_value_t = 60)]
        pub n_max: usize,
        #[arg(long, default_value_t = 243)]
        pub grid_size: usize,
        #[arg(long, default_value_t = 8)]
        pub depth: usize,
        #[arg(long)]
        pub out: Option<PathBuf>,
    }
}

params! {
    /// The four-regime `F_α` table over pinned seeds; CSV
    /// `alpha,label,expected,frac_differentiable_min,frac_differentiable_max,stable`.
    RegimeTable {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = weierstrass::TABLE_ALPHAS)]
        pub alphas: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3, 4, 5])]
        pub seeds: Vec<u64>,
        #[arg(long, default_value_t = 2000)]
        pub samples: usize,
        #[arg(long, default_value_t = 60)]
        pub n_max: usize,
        #[arg(long)]
        pub out: Option<PathBuf>,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    TransferDecay(TransferDecay),
    GibbsPressure(GibbsPressure),
    GibbsCheck(GibbsCheck),
    SeriesProbe(SeriesProbe),
    SeriesMoments(SeriesMoments),
    RieszBounds(RieszBounds),
    RieszHls(RieszHls),
    RieszFactor(RieszFactor),
    WeierDichotomy(WeierDichotomy),
    WeierClassify(WeierClassify),
    WeierScan(WeierScan),
    WeierTilted(WeierTilted),
    RegimeTable(RegimeTable),
}

pub const NAMES: [&str; 13] = [
    "transfer-decay",
    "gibbs-pressure",
    "gibbs-check",
    "series-probe",
    "series-moments",
    "riesz-bounds",
    "riesz-hls",
    "riesz-factor",
    "weier-dichotomy",
    "weier-classify",
    "weier-scan",
    "weier-tilted",
    "regime-table",
];

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::TransferDecay(_) => "transfer-decay",
            Experiment::GibbsPressure(_) => "gibbs-pressure",
            Experiment::GibbsCheck(_) => "gibbs-check",
            Experiment::SeriesProbe(_) => "series-probe",
            Experiment::SeriesMoments(_) => "series-moments",
            Experiment::RieszBounds(_) => "riesz-bounds",
            Experiment::RieszHls(_) => "riesz-hls",
            Experiment::RieszFactor(_) => "riesz-factor",
            Experiment::WeierDichotomy(_) => "weier-dichotomy",
            Experiment::WeierClassify(_) => "weier-classify",
            Experiment::WeierScan(_) => "weier-scan",
            Experiment::WeierTilted(_) => "weier-tilted",
            Experiment::RegimeTable(_) => "regime-table",
        }
    }

    /// Parse the `params` table of a config for the named experiment.
    pub fn from_params(name: &str, params: Value) -> Result<Self, AppError> {
        let p = if params.is_null() { json!({}) } else { params };
        let e = match name {
            "transfer-decay" => Experiment::TransferDecay(serde_json::from_value(p)?),
            "gibbs-pressure" => Experiment::GibbsPressure(serde_json::from_value(p)?),
            "gibbs-check" => Experiment::GibbsCheck(serde_json::from_value(p)?),
            "series-probe" => Experiment::SeriesProbe(serde_json::from_value(p)?),
            "series-moments" => Experiment::SeriesMoments(serde_json::from_value(p)?),
            "riesz-bounds" => Experiment::RieszBounds(serde_json::from_value(p)?),
            "riesz-hls" => Experiment::RieszHls(serde_json::from_value(p)?),
            "riesz-factor" => Experiment::RieszFactor(serde_json::from_value(p)?),
            "weier-dichotomy" => Experiment::WeierDichotomy(serde_json::from_value(p)?),
            "weier-classify" => Experiment::WeierClassify(serde_json::from_value(p)?),
            "weier-scan" => Experiment::WeierScan(serde_json::from_value(p)?),
            "weier-tilted" => Experiment::WeierTilted(serde_json::from_value(p)?),
            "regime-table" => Experiment::RegimeTable(serde_json::from_value(p)?),
            other => {
                return Err(AppError::schema(format!("unknown experiment `{other}`; expected one of {}", NAMES.join(", "))))
            }
        };
        Ok(e)
    }

    pub fn params_json(&self) -> Value {
        let v = match self {
            Experiment::TransferDecay(p) => serde_json::to_value(p),
            Experiment::GibbsPressure(p) => serde_json::to_value(p),
            Experiment::GibbsCheck(p) => serde_json::to_value(p),
            Experiment::SeriesProbe(p) => serde_json::to_value(p),
            Experiment::SeriesMoments(p) => serde_json::to_value(p),
            Experiment::RieszBounds(p) => serde_json::to_value(p),
            Experiment::RieszHls(p) => serde_json::to_value(p),
            Experiment::RieszFactor(p) => serde_json::to_value(p),
            Experiment::WeierDichotomy(p) => serde_json::to_value(p),
            Experiment::WeierClassify(p) => serde_json::to_value(p),
            Experiment::WeierScan(p) => serde_json::to_value(p),
            Experiment::WeierTilted(p) => serde_json::to_value(p),
            Experiment::RegimeTable(p) => serde_json::to_value(p),
        };
        v.expect("parameters serialize")
    }

    fn out(&self) -> Option<&PathBuf> {
        match self {
            Experiment::TransferDecay(p) => p.out.as_ref(),
            Experiment::GibbsPressure(p) => p.out.as_ref(),
            Experiment::GibbsCheck(p) => p.out.as_ref(),
            Experiment::SeriesProbe(p) => p.out.as_ref(),
            Experiment::SeriesMoments(p) => p.out.as_ref(),
            Experiment::RieszBounds(p) => p.out.as_ref(),
            Experiment::RieszHls(p) => p.out.as_ref(),
            Experiment::RieszFactor(p) => p.out.as_ref(),
            Experiment::WeierDichotomy(p) => p.out.as_ref(),
            Experiment::WeierClassify(p) => p.out.as_ref(),
            Experiment::WeierScan(p) => p.out.as_ref(),
            Experiment::WeierTilted(p) => p.out.as_ref(),
            Experiment::RegimeTable(p) => p.out.as_ref(),
        }
    }

    /// CSV file name, relative to the output directory unless absolute.
    pub fn csv_name(&self) -> PathBuf {
        self.out().cloned().unwrap_or_else(|| {
            let stem = self.name().split_once('-').map_or(self.name(), |(_, s)| s);
            PathBuf::from(format!("{stem}.csv"))
        })
    }
}

pub struct Context<'a> {
    pub seed: u64,
    /// Directory that relative coefficient-file paths are taken from.
    pub base_dir: &'a Path,
    pub tolerances: &'a Tolerances,
}

pub struct RunOutput {
    pub table: Table,
    pub summary: Value,
    /// Every function used, as `[n, re, im]` triples.
    pub inputs: Value,
    /// Extra files (path as given, contents).
    pub extra: Vec<(PathBuf, String)>,
}

fn triples(f: &TorusFunction) -> Value {
    Value::Array(f.terms().map(|(n, c)| json!([n, c.re, c.im])).collect())
}

fn complex(c: Complex64) -> Value {
    json!([c.re, c.im])
}

pub fn run(e: &Experiment, ctx: &Context) -> Result<RunOutput, AppError> {
    match e {
        Experiment::TransferDecay(p) => transfer_decay(p, ctx),
        Experiment::GibbsPressure(p) => gibbs_pressure(p, ctx),
        Experiment::GibbsCheck(p) => gibbs_check(p, ctx),
        Experiment::SeriesProbe(p) => series_probe(p, ctx),
        Experiment::SeriesMoments(p) => series_moments(p, ctx),
        Experiment::RieszBounds(p) => riesz_bounds(p, ctx),
        Experiment::RieszHls(p) => riesz_hls(p),
        Experiment::RieszFactor(p) => riesz_factor(p),
        Experiment::WeierDichotomy(p) => weier_dichotomy(p, ctx),
        Experiment::WeierClassify(p) => weier_classify(p, ctx),
        Experiment::WeierScan(p) => weier_scan(p, ctx),
        Experiment::WeierTilted(p) => weier_tilted(p, ctx),
        Experiment::RegimeTable(p) => regime_table(p, ctx),
    }
}

fn transfer_decay(p: &TransferDecay, ctx: &Context) -> Result<RunOutput, AppError> {
    let map = ExpandingMap::new(p.q)?;
    let f = parse::function(&p.f, ctx.base_dir)?;
    let profile = map.decay_profile(&f, p.n_max)?;
    let hyp = map.hypothesis_check(&f);
    let mut table = Table::new(&["n", "sup_lower", "sup_upper"]);
    for (n, s) in profile.sup.iter().enumerate() {
        table.push(vec![n.to_string(), num(s.lo), num(s.hi)]);
    }
    Ok(RunOutput {
        table,
        summary: json!({
            "decay_rate": profile.decay_rate,
            "sum_sup": profile.sum_sup,
            "sum_increments": profile.sum_increments,
            "tail_exact": profile.tail_exact,
            "summable": profile.summable,
            "weak_pair": profile.weak_pair,
            "delta_star": hyp.profile.delta_star,
            "sigma_sq": hyp.profile.sigma_sq,
            "h1": hyp.h1,
            "h2": hyp.h2,
        }),
        inputs: json!({ "f": triples(&f) }),
        extra: Vec::new(),
    })
}

fn gibbs_pressure(p: &GibbsPressure, ctx: &Context) -> Result<RunOutput, AppError> {
    let map = ExpandingMap::new(p.q)?;
    let g = parse::function(&p.g, ctx.base_dir)?;
    let ts = gibbs::t_grid(p.t_min, p.t_max, p.t_step)?;
    let curve = gibbs::pressure_curve(&map, &g, &ts, ctx.tolerances.gibbs(p.grid_size, p.depth))?;
    let mut table = Table::new(&["t", "P", "m_t"]);
    for i in 0..curve.ts.len() {
        table.push(vec![num(curve.ts[i]), num(curve.p[i]), num(curve.m[i])]);
    }
    Ok(RunOutput {
        table,
        summary: json!({
            "convexity_cert": curve.convexity_cert,
            "strictly_convex": curve.strictly_convex,
            "difference_step": curve.step,
        }),
        inputs: json!({ "g": triples(&g) }),
        extra: Vec::new(),
    })
}

fn gibbs_check(p: &GibbsCheck, ctx: &Context) -> Result<RunOutput, AppError> {
    let map = ExpandingMap::new(p.q)?;
    let g = parse::function(&p.g, ctx.base_dir)?;
    let op = RuelleOperator::tilted(map, &g, p.t)?;
    let sol = gibbs::solve(&op, ctx.tolerances.gibbs(p.grid_size, p.depth))?;
    let check = gibbs::gibbs_property_check(&sol, p.samples, ctx.seed)?;
    let mut table = Table::new(&["n", "cylinders", "min_ratio", "max_ratio"]);
    for r in &check.rows {
        table.push(vec![r.n.to_string(), r.cylinders.to_string(), num(r.min_ratio), num(r.max_ratio)]);
    }
    Ok(RunOutput {
        table,
        summary: json!({
            "rho": sol.rho,
            "rho_cylinder": sol.rho_cylinder,
            "pressure": sol.pressure,
            "iterations": sol.iterations,
            "residual_h": sol.residual_h,
            "residual_nu": sol.residual_nu,
            "constant": check.constant,
            "max_growth": check.max_growth,
            "bounded": check.bounded,
        }),
        inputs: json!({ "g": triples(&g) }),
        extra: Vec::new(),
    })
}

fn series_probe(p: &SeriesProbe, ctx: &Context) -> Result<RunOutput, AppError> {
    let map = ExpandingMap::new(p.q)?;
    let f = parse::function(&p.f, ctx.base_dir)?;
    let a = parse::coefficients(&p.a)?;
    let x = parse::point(&p.x)?;
    let report = series::convergence_probe(&f, &map, &a, &x, p.n_max, &ctx.tolerances.probe())?;
    let sums = series::partial_sums(&f, &map, &a, p.n_max, &x)?;
    let mut table = Table::new(&["n", "re", "im"]);
    for (n, s) in sums.iter().enumerate() {
        table.push(vec![n.to_string(), num(s.re), num(s.im)]);
    }
    Ok(RunOutput {
        table,
        summary: json!({
            "verdict": verdict_name(report.verdict),
            "reason": reason_name(report.reason),
            "value": complex(report.value),
            "tail_bound": report.tail_bound,
            "oscillation": report.oscillation,
            "envelope_ratio": report.envelope_ratio,
            "birkhoff_sup": report.birkhoff_sup,
            "probe": {
                "eps": report.config.eps,
                "window": report.config.window,
                "envelope_c": report.config.envelope_c,
                "tail_kappa": report.config.tail_kappa,
                "birkhoff_cap": report.config.birkhoff_cap,
            },
        }),
        inputs: json!({ "f": triples(&f) }),
        extra: Vec::new(),
    })
}

fn series_moments(p: &SeriesMoments, ctx: &Context) -> Result<RunOutput, AppError> {
    let map = ExpandingMap::new(p.q)?;
    let f = parse::function(&p.f, ctx.base_dir)?;
    let a = parse::coefficients(&p.a)?;
    let mut table = Table::new(&["p", "estimate", "std_error", "bound", "passed"]);
    for (i, &order) in p.p.iter().enumerate() {
        let r = series::mc_moment(&f, &map, &a, p.n, order, p.samples, ctx.seed.wrapping_add(i as u64))?;
        table.push(vec![num(r.p), num(r.estimate), num(r.std_error), num(r.bound), r.passed.to_string()]);
    }
    Ok(RunOutput {
        table,
        summary: json!({ "seeds": "seed + row index" }),
        inputs: json!({ "f": triples(&f) }),
        extra: Vec::new(),
    })
}

fn riesz_bounds(p: &RieszBounds, ctx: &Context) -> Result<RunOutput, AppError> {
    let map = ExpandingMap::new(p.q)?;
    let f = parse::function(&p.f, ctx.base_dir)?;
    let max_order = p.orders.iter().copied().max().unwrap_or(0);
    let corr = riesz::correlations_exact(&map, &f, max_order);
    let b = riesz::riesz_bounds(&corr, &p.orders, ctx.tolerances.riesz())?;
    let mut table = Table::new(&["N", "lambda_min", "lambda_max"]);
    for r in &b.orders {
        table.push(vec![r.n.to_string(), num(r.lambda_min), num(r.lambda_max)]);
    }
    Ok(RunOutput {
        table,
        summary: json!({
            "a_sq_est": b.a_sq_est,
            "b_sq_est": b.b_sq_est,
            "plateau": b.plateau,
            "is_riesz": b.is_riesz,
            "monotone": b.monotone,
            "max_residual": b.orders.iter().map(|r| r.residual).fold(0.0, f64::max),
        }),
        inputs: json!({ "f": triples(&f) }),
        extra: Vec::new(),
    })
}

fn riesz_hls(p: &RieszHls) -> Result<RunOutput, AppError> {
    let c = parse::sine_coefficients(&p.c)?;
    let grid = HlsGrid {
        sigma_min: p.sigma_min,
        sigma_max: p.sigma_max,
        t_max: p.t_max,
        sigma_steps: p.sigma_steps,
        t_steps: p.t_steps,
        truncation: p.truncation,
    };
    let r = riesz::hls_criterion(&c, grid)?;
    let mut table = Table::new(&["sigma", "min_abs"]);
    for &(s, m) in &r.row_min {
        table.push(vec![num(s), num(m)]);
    }
    Ok(RunOutput {
        table,
        summary: json!({
            "inf_abs": r.inf_abs,
            "sup_abs": r.sup_abs,
            "tail_bound": r.tail_bound,
            "boundary_min": r.boundary_min,
            "verdict": r.verdict.name(),
            "abs_condition": r.abs_condition,
            "multiplicative_bounds": r.multiplicative_bounds,
        }),
        inputs: json!({}),
        extra: Vec::new(),
    })
}

fn riesz_factor(p: &RieszFactor) -> Result<RunOutput, AppError> {
    let c: Vec<Complex64> = p.c.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let f = riesz::fejer_riesz_factor(&c)?;
    let mut table = Table::new(&["k", "re", "im"]);
    for (k, z) in f.coeffs.iter().enumerate() {
        table.push(vec![k.to_string(), num(z.re), num(z.im)]);
    }
    Ok(RunOutput { table, summary: json!({ "residual": f.residual }), inputs: json!({}), extra: Vec::new() })
}

fn weier_dichotomy(p: &WeierDichotomy, ctx: &Context) -> Result<RunOutput, AppError> {
    let rows = weierstrass::dichotomy_experiment(&p.alphas, p.samples, p.n_max, ctx.seed, &ctx.tolerances.probe())?;
    let mut table = Table::new(&["alpha", "frac_differentiable", "frac_inconclusive"]);
    let mut labels = Vec::new();
    for r in &rows {
        table.push(vec![num(r.alpha), num(r.frac_differentiable), num(r.frac_inconclusive)]);
        labels.push(json!({
            "alpha": r.alpha,
            "label": r.label,
            "second_moment": r.second_moment,
            "second_moment_se": r.second_moment_se,
            "second_moment_exact": r.second_moment_exact,
        }));
    }
    Ok(RunOutput {
        table,
        summary: json!({ "rows": labels }),
        inputs: json!({ "f_prime": triples(&TorusFunction::exp(1).derivative()) }),
        extra: Vec::new(),
    })
}

fn weierstrass_spec(f_prime: &str, a: &str, base: &Path) -> Result<WeierstrassSpec, AppError> {
    let fp = parse::function(f_prime, base)?;
    Ok(WeierstrassSpec::from_derivative(&fp, parse::coefficients(a)?)?)
}

fn weier_classify(p: &WeierClassify, ctx: &Context) -> Result<RunOutput, AppError> {
    let spec = weierstrass_spec(&p.f_prime, &p.a, ctx.base_dir)?;
    let x = parse::point(&p.x)?;
    let cfg = ClassifyConfig { probe: ctx.tolerances.probe(), ..ClassifyConfig::default() };
    let v = weierstrass::classify_point(&spec, &x, p.n_max, &cfg)?;
    let mut table = Table::new(&["h", "N", "quotient_re", "quotient_im", "partial_sum_re", "partial_sum_im"]);
    for s in &v.quotients {
        table.push(vec![
            num(s.h),
            s.n.to_string(),
            num(s.quotient.re),
            num(s.quotient.im),
            num(s.partial_sum.re),
            num(s.partial_sum.im),
        ]);
    }
    let mut extra = Vec::new();
    if let Some(path) = &p.plot {
        extra.push((path.clone(), plot_f(&spec, p.plot_resolution, ctx.tolerances.get("f_abs_tol"))?));
    }
    Ok(RunOutput {
        table,
        summary: json!({
            "verdict": v.verdict.name(),
            "series_verdict": v.series_verdict.name(),
            "quotient_verdict": v.quotient_verdict.name(),
            "routes_agree": v.routes_agree(),
            "derivative": v.derivative.map(complex),
            "error_bar": v.error_bar,
            "series_reason": reason_name(v.series.reason),
            "quotient_spread": v.quotient_spread,
            "ladder": cfg.ladder,
            "trailing": cfg.trailing,
            "settled_spread": cfg.settled_spread,
            "oscillating_spread": cfg.oscillating_spread,
        }),
        inputs: json!({ "f": triples(&spec.f), "f_prime": triples(&spec.f_prime) }),
        extra,
    })
}

fn plot_f(spec: &WeierstrassSpec, resolution: usize, tol: f64) -> Result<String, AppError> {
    if resolution < 2 {
        return Err(AppError::schema("plot resolution must be at least 2"));
    }
    let mut re = Vec::with_capacity(resolution);
    let mut im = Vec::with_capacity(resolution);
    for k in 0..resolution {
        let x = k as f64 / resolution as f64;
        let v = weierstrass::evaluate_f(spec, &OrbitPoint::from_f64(x)?, tol)?;
        re.push((x, v.value.re));
        im.push((x, v.value.im));
    }
    let mut series = vec![plot::Series { label: "Re F", color: "black", points: &re }];
    if !spec.f.is_real() {
        series.push(plot::Series { label: "Im F", color: "#c03030", points: &im });
    }
    let title = format!("F(x) = Σ a_n 3^-n f(3^n x), {}", weierstrass::describe(spec));
    Ok(plot::line_plot(&title, &format!("x ({resolution} points)"), &series))
}

fn weier_scan(p: &WeierScan, ctx: &Context) -> Result<RunOutput, AppError> {
    let g = parse::function(&p.g, ctx.base_dir)?;
    let pts = weierstrass::birkhoff_scanner(&g, p.p_max)?;
    let mut table = Table::new(&["num", "den", "period", "sum_re", "sum_im", "zero_sum"]);
    for q in &pts {
        table.push(vec![
            q.num.to_string(),
            q.den.to_string(),
            q.period.to_string(),
            num(q.sum.re),
            num(q.sum.im),
            q.zero_sum.to_string(),
        ]);
    }
    let zero = pts.iter().filter(|q| q.zero_sum).count();
    Ok(RunOutput {
        table,
        summary: json!({ "points": pts.len(), "zero_sum": zero }),
        inputs: json!({ "g": triples(&g) }),
        extra: Vec::new(),
    })
}

fn weier_tilted(p: &WeierTilted, ctx: &Context) -> Result<RunOutput, AppError> {
    let spec = weierstrass_spec(&p.f_prime, &p.a, ctx.base_dir)?;
    let r = weierstrass::tilted_divergence(
        &spec,
        p.t,
        p.samples,
        p.n_max,
        ctx.seed,
        ctx.tolerances.gibbs(p.grid_size, p.depth),
        &ctx.tolerances.probe(),
    )?;
    let mut table = Table::new(&[
        "t",
        "m_t",
        "frac_nonconvergent",
        "frac_raw_nonconvergent",
        "frac_centered_converged",
        "drift",
        "centered_rms",
        "lebesgue_frac_convergent",
    ]);
    table.push(vec![
        num(r.t),
        num(r.m_t),
        num(r.frac_nonconvergent),
        num(r.frac_raw_nonconvergent),
        num(r.frac_centered_converged),
        num(r.drift),
        num(r.centered_rms),
        num(r.lebesgue_frac_convergent),
    ]);
    let verdict = match r.verdict {
        weierstrass::TiltedVerdict::Diverges => "diverges",
        weierstrass::TiltedVerdict::Inconclusive => "inconclusive",
    };
    Ok(RunOutput {
        table,
        summary: json!({ "verdict": verdict, "lebesgue_seed": ctx.seed.wrapping_add(1) }),
        inputs: json!({ "f_prime": triples(&spec.f_prime) }),
        extra: Vec::new(),
    })
}

fn regime_table(p: &RegimeTable, ctx: &Context) -> Result<RunOutput, AppError> {
    if p.seeds.is_empty() {
        return Err(AppError::schema("regime table needs at least one seed"));
    }
    let probe = ctx.tolerances.probe();
    let runs: Vec<Vec<weierstrass::DichotomyRow>> = p
        .seeds
        .iter()
        .map(|&s| weierstrass::dichotomy_experiment(&p.alphas, p.samples, p.n_max, s, &probe))
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&[
        "alpha",
        "label",
        "expected",
        "frac_differentiable_min",
        "frac_differentiable_max",
        "stable",
    ]);
    let mut all_match = true;
    for (i, &alpha) in p.alphas.iter().enumerate() {
        let label = runs[0][i].label;
        let stable = runs.iter().all(|r| r[i].label == label);
        let fracs = runs.iter().map(|r| r[i].frac_differentiable);
        let lo = fracs.clone().fold(f64::INFINITY, f64::min);
        let hi = fracs.fold(f64::NEG_INFINITY, f64::max);
        let expected = weierstrass::expected_label(alpha);
        all_match &= stable && label == expected;
        table.push(vec![num(alpha), label.into(), expected.into(), num(lo), num(hi), stable.to_string()]);
    }
    Ok(RunOutput {
        table,
        summary: json!({ "matches_expected": all_match, "seeds": p.seeds }),
        inputs: json!({ "f_prime": triples(&TorusFunction::exp(1).derivative()) }),
        extra: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_empty_config() {
        for name in NAMES {
            let e = Experiment::from_params(name, json!({})).unwrap();
            let again = Experiment::from_params(name, e.params_json()).unwrap();
            assert_eq!(e, again, "{name}");
        }
        assert_eq!(TransferDecay::default().n_max, 30);
        assert_eq!(RieszBounds::default().orders, vec![8, 16, 32, 64]);
        assert_eq!(RegimeTable::default().alphas, weierstrass::TABLE_ALPHAS.to_vec());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = Experiment::from_params("transfer-decay", json!({ "q": 3, "nmax": 4 })).unwrap_err();
        assert!(e.message.contains("nmax"));
        assert!(Experiment::from_params("nope", json!({})).is_err());
    }

    #[test]
    fn csv_names() {
        assert_eq!(Experiment::WeierDichotomy(WeierDichotomy::default()).csv_name(), PathBuf::from("dichotomy.csv"));
        let p = GibbsPressure { out: Some("p.csv".into()), ..GibbsPressure::default() };
        assert_eq!(Experiment::GibbsPressure(p).csv_name(), PathBuf::from("p.csv"));
    }
}
