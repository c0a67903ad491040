use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ergseries::experiments::*;
use ergseries::tolerances::Tolerances;
use ergseries::{execute, AppError, ExperimentConfig, Run, DEFAULT_SEED};

/// Ergodic series over x ↦ qx mod 1: transfer operators, convergence tests,
/// Riesz diagnostics, Gibbs measures and Weierstrass-type functions.
///
/// Every run writes a CSV and a manifest.json into --out-dir. Default
/// tolerances can be overridden with ERGSERIES_PROBE_EPS,
/// ERGSERIES_PROBE_WINDOW, ERGSERIES_ENVELOPE_C, ERGSERIES_TAIL_KAPPA,
/// ERGSERIES_BIRKHOFF_CAP, ERGSERIES_GIBBS_TOL, ERGSERIES_RIESZ_THRESHOLD and
/// ERGSERIES_F_ABS_TOL; the manifest records which were used.
///
/// Frequencies live on [0, 1): e(x) = exp(2πix). Spectral densities are
/// normalized against dt/2π on [−π, π).
///
/// Exit codes: 0 success, 1 io, 2 schema, 3 numerical failure,
/// 4 precision budget.
#[derive(Debug, Parser)]
#[command(name = "ergseries", version)]
struct Cli {
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    #[command(subcommand)]
    Transfer(TransferCmd),
    #[command(subcommand)]
    Gibbs(GibbsCmd),
    #[command(subcommand)]
    Series(SeriesCmd),
    #[command(subcommand)]
    Riesz(RieszCmd),
    #[command(subcommand)]
    Weier(WeierCmd),
    /// The four-regime F_α table.
    Reproduce(RegimeTable),
    /// Run a JSON experiment config.
    Run { config: PathBuf },
}

#[derive(Debug, Subcommand)]
enum TransferCmd {
    /// Sup-norm decay of Lⁿf.
    Decay(TransferDecay),
}

#[derive(Debug, Subcommand)]
enum GibbsCmd {
    /// Pressure P(t) and tilted mean m_t.
    Pressure(GibbsPressure),
    /// Gibbs-property ratio check for the potential t·g.
    Check(GibbsCheck),
}

#[derive(Debug, Subcommand)]
enum SeriesCmd {
    /// Convergence verdict for Σ aₙ f(qⁿx) at one point.
    Probe(SeriesProbe),
    /// Monte-Carlo moments against the Khintchine bound.
    Moments(SeriesMoments),
}

#[derive(Debug, Subcommand)]
enum RieszCmd {
    /// Toeplitz extremal eigenvalues of the correlation form.
    Bounds(RieszBounds),
    /// Dirichlet-series criterion for dilation systems of sine series.
    Hls(RieszHls),
    /// Fejér–Riesz factorization of a nonnegative trigonometric polynomial.
    Factor(RieszFactor),
}

#[derive(Debug, Subcommand)]
enum WeierCmd {
    /// Differentiability rates of F_α over sampled points.
    Dichotomy(WeierDichotomy),
    /// Classify one point by the series and difference-quotient routes.
    Classify(WeierClassify),
    /// Periodic orbits with bounded Birkhoff sums.
    Scan(WeierScan),
    /// Divergence under a tilted Gibbs measure.
    Tilted(WeierTilted),
}

fn experiment_of(cmd: Command) -> Result<(Experiment, Option<u64>, PathBuf), AppError> {
    let cwd = PathBuf::from(".");
    let e = match cmd {
        Command::Transfer(TransferCmd::Decay(p)) => Experiment::TransferDecay(p),
        Command::Gibbs(GibbsCmd::Pressure(p)) => Experiment::GibbsPressure(p),
        Command::Gibbs(GibbsCmd::Check(p)) => Experiment::GibbsCheck(p),
        Command::Series(SeriesCmd::Probe(p)) => Experiment::SeriesProbe(p),
        Command::Series(SeriesCmd::Moments(p)) => Experiment::SeriesMoments(p),
        Command::Riesz(RieszCmd::Bounds(p)) => Experiment::RieszBounds(p),
        Command::Riesz(RieszCmd::Hls(p)) => Experiment::RieszHls(p),
        Command::Riesz(RieszCmd::Factor(p)) => Experiment::RieszFactor(p),
        Command::Weier(WeierCmd::Dichotomy(p)) => Experiment::WeierDichotomy(p),
        Command::Weier(WeierCmd::Classify(p)) => Experiment::WeierClassify(p),
        Command::Weier(WeierCmd::Scan(p)) => Experiment::WeierScan(p),
        Command::Weier(WeierCmd::Tilted(p)) => Experiment::WeierTilted(p),
        Command::Reproduce(p) => Experiment::RegimeTable(p),
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| AppError::io(format!("cannot read {}: {e}", config.display())))?;
            let cfg = ExperimentConfig::parse(&text)?;
            let base = config.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            return Ok((cfg.experiment()?, cfg.seed, base.to_path_buf()));
        }
    };
    Ok((e, None, cwd))
}

fn main_inner(cli: Cli) -> Result<(), AppError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| AppError::schema(format!("cannot configure {n} threads: {e}")))?;
    }
    let tolerances = Tolerances::from_env()?;
    let (experiment, config_seed, base_dir) = experiment_of(cli.command)?;
    let seed = cli.seed.or(config_seed).unwrap_or(DEFAULT_SEED);
    let manifest = execute(&Run {
        experiment: &experiment,
        seed,
        out_dir: &cli.out_dir,
        base_dir: &base_dir,
        tolerances: &tolerances,
    })?;
    println!("{}", serde_json::to_string_pretty(&manifest.summary).unwrap_or_default());
    for o in &manifest.outputs {
        eprintln!("wrote {}", cli.out_dir.join(o).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.class.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn spec_style_invocations_parse() {
        let cli = Cli::parse_from([
            "ergseries", "weier", "dichotomy", "--alphas", "0.3,0.75,1.2", "--samples", "500", "--n-max", "50", "--seed",
            "11", "--out", "dichotomy.csv",
        ]);
        assert_eq!(cli.seed, Some(11));
        let Command::Weier(WeierCmd::Dichotomy(p)) = cli.command else { panic!() };
        assert_eq!(p.alphas, vec![0.3, 0.75, 1.2]);
        let cli = Cli::parse_from(["ergseries", "gibbs", "pressure", "--t-min", "-1", "--t-max", "1", "--t-step", "0.01"]);
        let Command::Gibbs(GibbsCmd::Pressure(p)) = cli.command else { panic!() };
        assert_eq!(p.t_min, -1.0);
        let cli = Cli::parse_from(["ergseries", "riesz", "hls", "--c", "power:2", "--sigma-min", "0.05"]);
        assert!(matches!(cli.command, Command::Riesz(RieszCmd::Hls(_))));
    }
}
