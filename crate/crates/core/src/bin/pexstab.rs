//! Command-line front end.
//!
//! Exit status: 0 when every requested verification passed, 1 on a verification failure,
//! 2 on a schema or precondition violation, 3 on an I/O failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pexstab::dalembert;
use pexstab::scenario::{self, ScenarioError, OUT_DIR_ENV};

#[derive(Parser)]
#[command(
    name = "pexstab",
    version,
    about = "Intermittently damped linear systems: simulate, check, certify"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (JSON).
    scenario: PathBuf,
    /// Output directory (default: $PEXSTAB_OUT, then ./pexstab-out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run independent analyses in parallel.
    #[arg(long)]
    parallel: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run every analysis of a scenario.
    Run(RunArgs),
    /// Parse and check a scenario without running it.
    Validate { scenario: PathBuf },
    /// Counterexample report for a damping region `omega = (a, b)`.
    Counterexample {
        #[arg(long, value_parser = parse_pair)]
        omega: (f64, f64),
        #[arg(long, default_value_t = 3)]
        periods: usize,
    },
    /// Only the `simulate` analyses of a scenario.
    Simulate(RunArgs),
    /// Only the `check-pe` analyses of a scenario.
    CheckPe(RunArgs),
    /// Only the `observability` analyses of a scenario.
    Observability(RunArgs),
    /// Only the `kappa-scan` analyses of a scenario.
    KappaScan(RunArgs),
    /// Only the `certify` analyses of a scenario.
    Certify(RunArgs),
    /// Only the `strong-stability` analyses of a scenario.
    StrongStability(RunArgs),
    /// Only the `window-scan` analyses of a scenario.
    WindowScan(RunArgs),
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected `a,b`")?;
    let a = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((a, b))
}

fn out_dir(explicit: Option<PathBuf>) -> PathBuf {
    explicit
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("pexstab-out"))
}

fn run(args: RunArgs, only: Option<&str>) -> Result<bool, ScenarioError> {
    let loaded = scenario::load(&args.scenario)?;
    let out = out_dir(args.out);
    let summary = scenario::run(&loaded, &out, args.parallel, only)?;
    for a in &summary.artifacts {
        println!(
            "{} {:<16} {}",
            if a.passed { "ok  " } else { "FAIL" },
            a.kind,
            a.json.display()
        );
    }
    Ok(summary.all_passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a, None),
        Command::Simulate(a) => run(a, Some("simulate")),
        Command::CheckPe(a) => run(a, Some("check-pe")),
        Command::Observability(a) => run(a, Some("observability")),
        Command::KappaScan(a) => run(a, Some("kappa-scan")),
        Command::Certify(a) => run(a, Some("certify")),
        Command::StrongStability(a) => run(a, Some("strong-stability")),
        Command::WindowScan(a) => run(a, Some("window-scan")),
        Command::Validate { scenario } => scenario::load(&scenario).map(|ld| {
            println!(
                "valid ({} analyses, sha256 {})",
                ld.scenario.analyses.len(),
                ld.hash
            );
            true
        }),
        Command::Counterexample { omega, periods } => {
            dalembert::counterexample_report(omega, periods)
                .map_err(|e| ScenarioError::Schema {
                    pointer: "/omega".into(),
                    message: e.to_string(),
                })
                .map(|rep| {
                    println!("{}", serde_json::to_string_pretty(&rep).expect("json"));
                    rep.inert && rep.energy_drift <= 1e-8
                })
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("pexstab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
