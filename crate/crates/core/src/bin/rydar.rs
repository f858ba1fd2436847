//! Command-line front end.
//!
//! Exit codes: 0 success, 1 acceptance threshold missed, 2 configuration
//! error, 3 runtime error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rydar::harness::config::ScenarioKind;
use rydar::harness::output::{summary_text, write_run, write_sweep};
use rydar::harness::runner::{ber_trend_holds, run_scenario, sweep};
use rydar::harness::ScenarioConfig;
use rydar::par::ExecMode;
use rydar::Error;

#[derive(Parser)]
#[command(
    name = "rydar",
    version,
    about = "Atomic-receiver radar/comms simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum and lock-in gradient series for LO-only and LO+RF.
    Spectrum(Common),
    /// Monte-Carlo ranging.
    Radar(Common),
    /// Monte-Carlo BER.
    Comms(Common),
    /// Instantaneous-bandwidth gate check.
    Gate(Common),
    /// One run per value of a numeric config field.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Dotted config path, e.g. comms.isr_db
        #[arg(long)]
        axis: String,
        /// Comma-separated values
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<f64>,
    },
    /// Schema check only.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    quiet: bool,
    /// Run trials on one thread.
    #[arg(long)]
    sequential: bool,
}

enum Failure {
    Acceptance(String),
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e.root() {
            Error::Schema { .. } | Error::Config(_) => Failure::Config(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn load(common: &Common) -> Result<ScenarioConfig, Failure> {
    let mut cfg = ScenarioConfig::load(&common.config, std::env::vars())?;
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(t) = common.trials {
        cfg.trials = t;
    }
    if let Some(o) = &common.out {
        cfg.output_dir = Some(o.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn mode(common: &Common) -> ExecMode {
    if common.sequential {
        ExecMode::Sequential
    } else {
        ExecMode::Parallel
    }
}

fn out_root(cfg: &ScenarioConfig) -> PathBuf {
    cfg.output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("runs"))
}

fn run_kind(common: &Common, expected: ScenarioKind) -> Result<(), Failure> {
    let cfg = load(common)?;
    if cfg.kind != expected {
        return Err(Failure::Config(format!(
            "config describes a {} scenario, expected {}",
            cfg.kind.as_str(),
            expected.as_str()
        )));
    }
    let report = run_scenario(&cfg, mode(common))?;
    let dir = write_run(&out_root(&cfg), &cfg, &report)?;
    if !common.quiet {
        print!("{}", summary_text(&report, &cfg));
        println!("output: {}", dir.display());
    }
    match report.acceptance() {
        Some(false) => Err(Failure::Acceptance(format!(
            "{} missed its acceptance threshold (metric {:.6e})",
            cfg.kind.as_str(),
            report.metric()
        ))),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Spectrum(c) => run_kind(&c, ScenarioKind::SpectrumDemo),
        Command::Radar(c) => run_kind(&c, ScenarioKind::RadarRanging),
        Command::Comms(c) => run_kind(&c, ScenarioKind::CommsBer),
        Command::Gate(c) => run_kind(&c, ScenarioKind::BandwidthGate),
        Command::Validate(c) => {
            let cfg = load(&c)?;
            if !c.quiet {
                println!("ok: {} ({})", cfg.kind.as_str(), cfg.hash());
            }
            Ok(())
        }
        Command::Sweep {
            common,
            axis,
            values,
        } => {
            let cfg = load(&common)?;
            let points = sweep(&cfg, &axis, &values, mode(&common))?;
            let dir = write_sweep(&out_root(&cfg), &cfg, &axis, &points)?;
            if !common.quiet {
                for p in &points {
                    println!(
                        "{axis} = {:<12} metric = {:.6e}",
                        p.value,
                        p.report.metric()
                    );
                }
                println!("output: {}", dir.display());
            }
            // BER should rise with interference and noise and fall with Eb/N0
            let direction = if axis.ends_with("isr_db") || axis.ends_with("awgn_sigma_v_per_m") {
                Some(true)
            } else if axis.ends_with("ebn0_db") {
                Some(false)
            } else {
                None
            };
            if let (ScenarioKind::CommsBer, Some(increasing)) = (cfg.kind, direction) {
                if !ber_trend_holds(&points, increasing, cfg.seed)? {
                    return Err(Failure::Acceptance(format!(
                        "BER trend along {axis} is violated"
                    )));
                }
            }
            if let Some(p) = points.iter().find(|p| p.report.acceptance() == Some(false)) {
                return Err(Failure::Acceptance(format!(
                    "{axis} = {} missed its acceptance threshold",
                    p.value
                )));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Acceptance(m)) => {
            eprintln!("acceptance failure: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("runtime error: {m}");
            ExitCode::from(3)
        }
    }
}
