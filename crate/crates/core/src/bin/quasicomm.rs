use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use quasicomm::harness::{
    emit_report, parse_eps_grid, run_validated, validate, Ensemble, HarnessError, Suite, TrialConfig,
};

#[derive(Parser)]
#[command(name = "quasicomm", version, about = "Verify commutator to quasi-commutator estimate transfer on random matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one verification suite and emit a JSONL report.
    Verify(VerifyArgs),
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// stacking, thm1, thm3, thm4, commuting, hypothesis-transfer or lipschitz-probe
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    dim1: usize,
    /// Defaults to dim1.
    #[arg(long)]
    dim2: Option<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Catalog name, `poly:c0,c1,...` or `affine:m,f0`.
    #[arg(long, default_value = "square")]
    function: String,
    /// Defaults to commuting-diagonal-pair for `commuting`, hermitian-gaussian otherwise.
    #[arg(long)]
    ensemble: Option<String>,
    /// Comma-separated complex shifts, e.g. `1e-3,0.5,0.2i`.
    #[arg(long, allow_hyphen_values = true)]
    eps_grid: Option<String>,
    /// Tolerance override `<name>=<value>`; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    parallel: usize,
}

fn build_config(args: &VerifyArgs) -> Result<(TrialConfig, Suite), HarnessError> {
    let suite: Suite = args.suite.parse()?;
    let mut config = TrialConfig::new(suite);
    config.seed = args.seed;
    config.dim1 = args.dim1;
    config.dim2 = args.dim2.unwrap_or(args.dim1);
    config.trials = args.trials;
    config.function_name = args.function.clone();
    config.parallel = args.parallel;
    if let Some(e) = &args.ensemble {
        config.ensemble = e.parse::<Ensemble>()?;
    }
    if let Some(g) = &args.eps_grid {
        config.eps_grid = Some(parse_eps_grid(g)?);
    }
    for spec in &args.tol {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("expected <name>=<value>, got `{spec}`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| HarnessError::Config(format!("tolerance `{name}`: `{value}` is not a number")))?;
        config.tolerance_overrides.insert(name.trim().to_string(), value);
    }
    Ok((config, suite))
}

fn verify(args: &VerifyArgs) -> Result<bool, HarnessError> {
    let (config, suite) = build_config(args)?;
    let validated = validate(&config, suite)?;
    let report = run_validated(&validated)?;
    match &args.out {
        Some(path) => emit_report(&report, path)?,
        None => std::io::stdout().lock().write_all(report.to_jsonl()?.as_bytes())?,
    }
    let a = &report.header.aggregate;
    eprintln!(
        "{suite}: {}/{} trials passed, max residual {:e}, min margin {}, {:.2}s -> {}",
        a.passed,
        a.total,
        a.max_residual,
        a.min_margin.map_or("n/a".to_string(), |m| format!("{m:e}")),
        report.wall_clock_seconds,
        if report.passed() { "PASS" } else { "FAIL" }
    );
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify(args) => match verify(&args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
