use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use exlab_cli::{run, CliError, ExperimentConfig, SCENARIOS};

#[derive(Parser)]
#[command(name = "exlab", version, about = "Noise-excitation experiments for stochastic parabolic equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its CSV and JSON outputs
    Run(RunArgs),
    /// Print the scenario registry
    ListScenarios,
}

#[derive(Args)]
struct RunArgs {
    /// JSON config; flags below override its keys
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Comma-separated, e.g. 4,8,16,32
    #[arg(long, value_delimiter = ',')]
    lambda_grid: Option<Vec<f64>>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    /// Exit with code 4 when any bound check fails
    #[arg(long)]
    strict: bool,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("EXLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("EXLAB_THREADS must be a positive integer, got '{v}'")))?;
    if n == 0 {
        return Err(CliError::Config("EXLAB_THREADS must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn execute(args: RunArgs) -> Result<ExitCode, CliError> {
    configure_threads()?;
    let file = match &args.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default(),
    };
    let flags = ExperimentConfig {
        scenario: args.scenario,
        seed: args.seed,
        lambda_grid: args.lambda_grid,
        samples: args.samples,
        t: args.t,
        alpha: args.alpha,
        p: args.p,
        ..Default::default()
    };
    let cfg = file.merge(flags).resolve()?;
    let start = Instant::now();
    let output = run(&cfg)?;
    let elapsed = start.elapsed().as_secs_f64();
    output.write(&args.out)?;
    // wall-clock kept apart so summary.json stays reproducible
    let timing = serde_json::json!({ "scenario": cfg.scenario, "wall_clock_seconds": elapsed });
    std::fs::write(args.out.join("timing.json"), format!("{timing}\n"))?;

    let s = &output.summary;
    eprintln!("{}: {} lambda values, wrote {}", s.scenario, s.curve.len(), args.out.display());
    if let Some(ix) = &s.index {
        eprintln!("index proxies: lower {:.4}, upper {:.4}", ix.lower, ix.upper);
    }
    for note in &s.notes {
        eprintln!("note: {note}");
    }
    if s.bounds.checked > 0 {
        eprintln!("bound checks: {}/{} passed", s.bounds.passed, s.bounds.checked);
    }
    if args.strict && !output.all_bounds_pass() {
        eprintln!("error: bound check failed under --strict");
        return Ok(ExitCode::from(4));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListScenarios => {
            for s in &SCENARIOS {
                println!("{:<20} {:<42} {}", s.name, s.anchor, s.description);
            }
            ExitCode::SUCCESS
        }
        Command::Run(args) => match execute(args) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
