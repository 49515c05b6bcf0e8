mod error;
mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use robuststl::{
    classical_baseline, decompose, generate, score, DecompositionResult, GroundTruth, RobustStlConfig,
    SyntheticSpec, TimeSeries,
};

use error::{CliError, CliResult};
use table::Table;

/// Robust seasonal-trend decomposition of long, noisy series.
#[derive(Parser)]
#[command(name = "robuststl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic series with its true components.
    Generate(GenerateArgs),
    /// Split a series into trend, seasonal and remainder.
    Decompose(DecomposeArgs),
    /// Score a decomposition against the true components.
    Evaluate(EvaluateArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 50)]
    period: usize,
    #[arg(long, default_value_t = 15)]
    periods: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    #[arg(long, default_value_t = 3)]
    max_shift: usize,
    #[arg(long, default_value_t = 10)]
    level_changes: usize,
    #[arg(long, default_value_t = 1.0)]
    level_min: f64,
    #[arg(long, default_value_t = 3.0)]
    level_max: f64,
    #[arg(long, default_value_t = 14)]
    anomalies: usize,
    #[arg(long, default_value_t = 2.0)]
    anomaly_min: f64,
    #[arg(long, default_value_t = 5.0)]
    anomaly_max: f64,
    #[arg(long, default_value_t = 0.1)]
    noise_variance: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Baseline {
    Classical,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    period: usize,
    #[arg(long)]
    out: PathBuf,
    /// Also write per-pass diagnostics here.
    #[arg(long)]
    diagnostics: Option<PathBuf>,
    /// Add the components of a reference method as extra columns.
    #[arg(long, value_enum)]
    baseline: Option<Baseline>,
    #[arg(long)]
    lambda1: Option<f64>,
    #[arg(long)]
    lambda2: Option<f64>,
    #[arg(long)]
    denoise_h: Option<usize>,
    #[arg(long)]
    denoise_delta_d: Option<f64>,
    #[arg(long)]
    denoise_delta_i: Option<f64>,
    #[arg(long)]
    season_k: Option<usize>,
    #[arg(long)]
    season_h: Option<usize>,
    #[arg(long)]
    season_delta_d: Option<f64>,
    #[arg(long)]
    season_delta_i: Option<f64>,
    #[arg(long)]
    season_trim: Option<usize>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    solver_max_iterations: Option<usize>,
}

impl DecomposeArgs {
    fn config(&self) -> RobustStlConfig {
        let mut c = RobustStlConfig::default();
        macro_rules! set {
            ($($flag:ident => $field:ident),*) => {
                $(if let Some(v) = self.$flag { c.$field = v; })*
            };
        }
        set!(
            lambda1 => lambda1,
            lambda2 => lambda2,
            denoise_h => denoise_half_window,
            denoise_delta_d => denoise_delta_d,
            denoise_delta_i => denoise_delta_i,
            season_k => season_neighborhood_periods,
            season_h => season_half_window,
            season_delta_d => season_delta_d,
            season_delta_i => season_delta_i,
            season_trim => season_reference_trim,
            max_iterations => max_outer_iterations,
            tolerance => outer_tolerance
        );
        if let Some(v) = self.solver_max_iterations {
            c.solver.max_iterations = v;
        }
        c
    }
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    result: PathBuf,
    #[arg(long)]
    truth: PathBuf,
}

fn run_generate(args: &GenerateArgs) -> CliResult<()> {
    let spec = SyntheticSpec {
        period: args.period,
        num_periods: args.periods,
        seasonal_amplitude: args.amplitude,
        max_shift: args.max_shift,
        num_level_changes: args.level_changes,
        level_change_range: (args.level_min, args.level_max),
        num_anomalies: args.anomalies,
        anomaly_range: (args.anomaly_min, args.anomaly_max),
        noise_variance: args.noise_variance,
        seed: args.seed,
    };
    let (series, truth) = generate(&spec)?;
    let GroundTruth {
        trend,
        seasonal,
        anomalies,
        noise,
    } = truth;
    let mut table = Table::new();
    table.push("value", series.into_values());
    table.push("trend", trend);
    table.push("seasonal", seasonal);
    table.push("anomaly", anomalies);
    table.push("noise", noise);
    table.write(&args.out)
}

fn push_components(table: &mut Table, prefix: &str, r: DecompositionResult) {
    table.push(&format!("{prefix}trend"), r.trend);
    table.push(&format!("{prefix}seasonal"), r.seasonal);
    table.push(&format!("{prefix}remainder"), r.remainder);
}

fn write_diagnostics(path: &Path, records: &[robuststl::IterationRecord]) -> CliResult<()> {
    let mut table = Table::new();
    let column = |f: fn(&robuststl::IterationRecord) -> f64| records.iter().map(f).collect();
    table.push("max_trend_change", column(|r| r.max_trend_change));
    table.push("max_seasonal_change", column(|r| r.max_seasonal_change));
    table.push("solver_objective", column(|r| r.solver_objective));
    table.push("level_estimate", column(|r| r.level_estimate));
    table.write(path)
}

fn run_decompose(args: &DecomposeArgs) -> CliResult<()> {
    let input = Table::read(&args.input)?;
    let values = input.require("value", &args.input)?.to_vec();
    let series = TimeSeries::new(values, args.period)?;
    let d = decompose(&series, &args.config())?;
    let converged = d.result.converged;
    let iterations = d.result.iterations_run;

    let mut out = Table::new();
    out.push("value", series.values().to_vec());
    if let Some(Baseline::Classical) = args.baseline {
        let base = classical_baseline(&series)?;
        push_components(&mut out, "", d.result);
        push_components(&mut out, "baseline_", base);
    } else {
        push_components(&mut out, "", d.result);
    }
    out.write(&args.out)?;
    if let Some(path) = &args.diagnostics {
        write_diagnostics(path, &d.diagnostics.records)?;
    }
    if converged {
        Ok(())
    } else {
        Err(CliError::new(
            error::NOT_CONVERGED,
            format!("not converged after {iterations} passes; output written to {}", args.out.display()),
        ))
    }
}

/// At least six significant digits, and `0.000000` for zero.
fn metric(v: f64) -> String {
    let magnitude = if v == 0.0 { 0 } else { v.abs().log10().floor() as i32 };
    let decimals = (5 - magnitude).max(6) as usize;
    format!("{v:.decimals$}")
}

fn run_evaluate(args: &EvaluateArgs) -> CliResult<()> {
    let result = Table::read(&args.result)?;
    let truth_table = Table::read(&args.truth)?;
    if result.rows() != truth_table.rows() {
        return Err(CliError::new(
            error::LENGTH_MISMATCH,
            format!(
                "{} has {} rows but {} has {}",
                args.result.display(),
                result.rows(),
                args.truth.display(),
                truth_table.rows()
            ),
        ));
    }
    let n = truth_table.rows();
    let truth = GroundTruth {
        trend: truth_table.require("trend", &args.truth)?.to_vec(),
        seasonal: truth_table.require("seasonal", &args.truth)?.to_vec(),
        anomalies: vec![0.0; n],
        noise: vec![0.0; n],
    };
    let mut prefixes = vec![""];
    if result.column("baseline_trend").is_some() {
        prefixes.push("baseline_");
    }
    for prefix in prefixes {
        let col = |name: &str| result.require(&format!("{prefix}{name}"), &args.result).map(<[f64]>::to_vec);
        let decomposition = DecompositionResult {
            trend: col("trend")?,
            seasonal: col("seasonal")?,
            remainder: vec![0.0; n],
            iterations_run: 0,
            converged: true,
        };
        let report = score(&decomposition, &truth)?;
        for (key, value) in [
            ("trend_mse", report.trend_mse),
            ("trend_mae", report.trend_mae),
            ("season_mse", report.season_mse),
            ("season_mae", report.season_mae),
        ] {
            println!("{prefix}{key}={}", metric(value));
        }
    }
    Ok(())
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("ROBUSTSTL_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::invalid(format!("ROBUSTSTL_THREADS must be a non-negative integer, got `{raw}`")))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::invalid(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { error::INVALID as u8 } else { 0 });
        }
    };
    let outcome = configure_threads().and_then(|()| match &cli.command {
        Command::Generate(args) => run_generate(args),
        Command::Decompose(args) => run_decompose(args),
        Command::Evaluate(args) => run_evaluate(args),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
