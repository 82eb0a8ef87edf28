use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use persuade_cli::commands::{self, OracleOptions, Report, Status, WitnessKind};
use persuade_cli::figures::write_figures;
use persuade_cli::sweep::{self, Metric, SweepConfig, SweepField};
use persuade_cli::{InputError, ScenarioSpec};
use persuade_core::PolicyRegime;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "persuade",
    version,
    about = "Public-signal design with an optional human delegate"
)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum WitnessArg {
    /// Interim belief where delegating is strictly worse than acting.
    DelegationLoss,
    /// Prior and constraint where no signal beats the maximal signal.
    MaximalSignalLoss,
}

#[derive(Subcommand)]
enum Command {
    /// Delegation decision at an interim belief.
    Delegate {
        scenario: PathBuf,
        /// Interim belief; defaults to the file's prior.
        #[arg(long)]
        interim: Option<f64>,
    },
    /// Optimal public signal under the scenario's Blackwell constraint.
    Design { scenario: PathBuf },
    /// Payoff of every policy regime, ranked.
    Regimes { scenario: PathBuf },
    /// Vary one field over a grid and emit CSV.
    Sweep {
        scenario: PathBuf,
        #[arg(long)]
        vary: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
        /// Comma-separated regimes or delegation metrics.
        #[arg(long, value_delimiter = ',')]
        regimes: Option<Vec<String>>,
        /// Interim belief for delegation metrics.
        #[arg(long)]
        interim: Option<f64>,
    },
    /// Write curve data and breakpoint annotations.
    Figures {
        scenario: PathBuf,
        #[arg(long, env = "PERSUADE_OUT_DIR", default_value = "figures")]
        out: PathBuf,
    },
    /// Search for an instance where a policy restriction strictly hurts.
    Witness {
        scenario: PathBuf,
        #[arg(long, value_enum)]
        kind: WitnessArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare closed forms against the grid and Monte Carlo oracles.
    OracleCheck {
        scenario: PathBuf,
        #[arg(long, default_value_t = 2001)]
        grid_n: usize,
        #[arg(long, default_value_t = 1_000_000)]
        mc_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<Report, InputError> {
    match cli.command {
        Command::Delegate { scenario, interim } => {
            commands::delegate(&ScenarioSpec::load(&scenario)?, interim)
        }
        Command::Design { scenario } => commands::design(&ScenarioSpec::load(&scenario)?),
        Command::Regimes { scenario } => commands::regimes(&ScenarioSpec::load(&scenario)?),
        Command::Sweep {
            scenario,
            vary,
            from,
            to,
            steps,
            regimes,
            interim,
        } => {
            let spec = ScenarioSpec::load(&scenario)?;
            let metrics = match regimes {
                Some(list) => list
                    .iter()
                    .map(|s| Metric::parse(s.trim()))
                    .collect::<Result<Vec<_>, _>>()?,
                None => PolicyRegime::ALL.into_iter().map(Metric::Regime).collect(),
            };
            let cfg = SweepConfig {
                field: SweepField::parse(&vary)?,
                from,
                to,
                steps,
                metrics,
                interim,
            };
            let rows = sweep::sweep(&spec, &cfg)?;
            let json = json!(rows
                .iter()
                .map(|r| json!({
                    "value": r.value, "regime": r.metric.as_str(), "payoff": r.payoff,
                    "design": r.design, "delegate": r.delegate,
                }))
                .collect::<Vec<_>>());
            Ok(Report {
                json,
                text: sweep::to_csv(&rows),
                status: Status::Ok,
            })
        }
        Command::Figures { scenario, out } => {
            let (prefs, signal) = ScenarioSpec::load(&scenario)?.players()?;
            let files = write_figures(&out, &prefs, &signal)?;
            let names: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
            Ok(Report {
                text: names.iter().map(|n| format!("wrote {n}\n")).collect(),
                json: json!({ "files": names }),
                status: Status::Ok,
            })
        }
        Command::Witness {
            scenario,
            kind,
            seed,
        } => {
            let kind = match kind {
                WitnessArg::DelegationLoss => WitnessKind::DelegationLoss,
                WitnessArg::MaximalSignalLoss => WitnessKind::MaximalSignalLoss,
            };
            commands::witness(&ScenarioSpec::load(&scenario)?, kind, seed)
        }
        Command::OracleCheck {
            scenario,
            grid_n,
            mc_samples,
            seed,
        } => commands::oracle_check(
            &ScenarioSpec::load(&scenario)?,
            OracleOptions {
                grid_n,
                mc_samples,
                seed,
            },
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let as_json = cli.json;
    match run(cli) {
        Ok(report) => {
            print!("{}", report.render(as_json));
            if as_json {
                println!();
            }
            ExitCode::from(report.status.exit_code() as u8)
        }
        Err(e) => {
            if as_json {
                println!("{}", json!({ "error": e.to_string() }));
            }
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
