use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use cayley_harness::campaigns::execute;
use cayley_harness::config::{seed_from_env, RawConfig};
use cayley_harness::{CampaignConfig, Command, Format, HarnessError};

/// Seeded verification campaigns for octonionic geometry and second
/// variation integrands.
///
/// Exit status: 0 when every property passes, 1 when a property fails,
/// 2 on configuration or output errors. CAYLEY_VARIATION_SEED overrides
/// --seed when set.
#[derive(Debug, Parser)]
#[command(name = "cayley-variation", version, allow_negative_numbers = true)]
struct Cli {
    #[arg(long, value_enum)]
    command: Command,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    m1: Option<usize>,
    #[arg(long)]
    m2: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long = "lambda-sq")]
    lambda_sq: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads; all cores when omitted. Reports do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

fn run(cli: Cli) -> Result<bool, HarnessError> {
    let seed = seed_from_env()?.or(cli.seed);
    let cfg = CampaignConfig::resolve(RawConfig {
        command: Some(cli.command),
        seed,
        trials: cli.trials,
        m1: cli.m1,
        m2: cli.m2,
        n: cli.n,
        d: cli.d,
        lambda_sq: cli.lambda_sq,
        tol: cli.tol,
        out: cli.out,
        format: cli.format,
    })?;
    if cli.threads == Some(0) {
        return Err(HarnessError::config("--threads must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::config(format!("thread pool: {e}")))?;
    let report = pool.install(|| execute(&cfg))?;
    report.write(cfg.out.as_deref().map(Path::new), cfg.format)?;
    let failed: Vec<&str> = report
        .properties
        .iter()
        .filter(|p| !p.pass)
        .map(|p| p.name.as_str())
        .collect();
    eprintln!(
        "{}: {}/{} properties passed in {:.3}s",
        cfg.command.name(),
        report.properties.len() - failed.len(),
        report.properties.len(),
        report.runtime_s
    );
    for name in &failed {
        eprintln!("FAIL {name}");
    }
    Ok(failed.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
