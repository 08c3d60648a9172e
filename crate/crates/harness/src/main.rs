use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use chrono::NaiveDate;
use clap::{Parser, Subcommand};
use tracing_subscriber::EnvFilter;
use tt_core::scheme::{Mode, DEFAULT_TAU};
use tt_harness::{
    estimate_cores, gen_synthetic, load_dataset, precompute, sample_service_time, simulate,
    write_jsonl, CostModel, Deployment, HarnessError, PrecomputeConfig, SimLedger, SimRun,
};
use tt_ledger::SharedLedger;
use tt_server::LedgerClient;

#[derive(Parser)]
#[command(name = "ttsim", about = "Replay comment traffic against the ledger")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug)]
enum Cores {
    Fixed(usize),
    Auto,
}

impl FromStr for Cores {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Cores::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Cores::Fixed(n)),
            _ => Err(format!("expected a positive integer or \"auto\", got {s:?}")),
        }
    }
}

#[derive(clap::Args)]
struct ModeArgs {
    /// Attach membership proofs over genesis pseudonyms (default).
    #[arg(long, conflicts_with = "base")]
    extended: bool,
    /// Plain signatures without membership proofs.
    #[arg(long)]
    base: bool,
    /// Genesis pseudonyms per membership proof.
    #[arg(long, default_value_t = 64)]
    anonymity_set: usize,
}

impl ModeArgs {
    fn mode(&self) -> Mode {
        if self.base {
            Mode::Base
        } else {
            Mode::Extended
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Precompute and replay a dataset, then print and optionally save the report.
    Run {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TAU)]
        tau: u32,
        /// Worker count, or `auto` to estimate it for the latency target.
        #[arg(long, default_value = "auto")]
        cores: Cores,
        #[arg(long, default_value_t = 0.1)]
        latency_target: f64,
        #[command(flatten)]
        mode: ModeArgs,
        /// JSON report output.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Ledger base URL, or `embedded` for an in-process ledger.
        #[arg(long, default_value = "embedded")]
        ledger: String,
        /// Date of t = 0.
        #[arg(long, default_value = "2024-01-01")]
        base_date: NaiveDate,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Estimate the cores needed for a latency target from sampled verification time.
    EstimateCores {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        latency_target: f64,
        #[command(flatten)]
        mode: ModeArgs,
        /// Use this service time in seconds instead of sampling one.
        #[arg(long)]
        service_time: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a synthetic one-day dataset as JSONL.
    GenSynthetic {
        #[arg(long)]
        users: usize,
        #[arg(long)]
        comments: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn check_target(target: f64) -> Result<(), HarnessError> {
    if target > 0.0 && target.is_finite() {
        Ok(())
    } else {
        Err(HarnessError::Config(format!("latency target must be positive, got {target}")))
    }
}

fn replay<L: SimLedger>(
    ledger: &L,
    dep: &Deployment,
    events: &[tt_harness::TrafficEvent],
    mut cfg: PrecomputeConfig,
    cores: Cores,
    target: f64,
) -> Result<SimRun, HarnessError> {
    cfg.genesis_base = ledger.genesis_count()?;
    let prepared = precompute(events, dep, &cfg)?;
    let cores = match cores {
        Cores::Fixed(n) => n,
        Cores::Auto => {
            let service = sample_service_time(dep, cfg.anonymity_set, cfg.seed)?;
            let arrivals: Vec<f64> = prepared.jobs.iter().map(|j| j.arrival).collect();
            let n = estimate_cores(&arrivals, service, target);
            tracing::info!(service, cores = n, "estimated cores");
            n
        }
    };
    simulate(&prepared, cores, ledger, &dep.website(), target)
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run {
            dataset,
            tau,
            cores,
            latency_target,
            mode,
            report,
            ledger,
            base_date,
            seed,
        } => {
            check_target(latency_target)?;
            let events = load_dataset(&dataset)?;
            let dep = Deployment::new(tau, mode.mode(), seed)?;
            let cfg = PrecomputeConfig {
                base_date,
                anonymity_set: mode.anonymity_set,
                genesis_base: 0,
                seed,
            };
            let run = if ledger == "embedded" {
                replay(&SharedLedger::default(), &dep, &events, cfg, cores, latency_target)?
            } else {
                replay(&LedgerClient::new(&ledger), &dep, &events, cfg, cores, latency_target)?
            };
            let r = &run.report;
            if r.ledger_bytes != r.ledger_bytes_counter {
                tracing::warn!(
                    summed = r.ledger_bytes,
                    counter = r.ledger_bytes_counter,
                    "ledger byte counts disagree"
                );
            }
            print!("{}", r.to_table(&CostModel::default()));
            if let Some(path) = report {
                let file = BufWriter::new(File::create(&path)?);
                serde_json::to_writer_pretty(file, r).map_err(std::io::Error::from)?;
            }
            Ok(())
        }
        Command::EstimateCores {
            dataset,
            latency_target,
            mode,
            service_time,
            seed,
        } => {
            check_target(latency_target)?;
            let events = load_dataset(&dataset)?;
            let service = match service_time {
                Some(s) if s >= 0.0 => s,
                Some(s) => return Err(HarnessError::Config(format!("service time must be non-negative, got {s}"))),
                None => {
                    let dep = Deployment::new(DEFAULT_TAU, mode.mode(), seed)?;
                    sample_service_time(&dep, mode.anonymity_set, seed)?
                }
            };
            let arrivals: Vec<f64> = events.iter().map(|e| e.t).collect();
            let cores = estimate_cores(&arrivals, service, latency_target);
            println!("service time {service:.4}s, cores {cores}");
            Ok(())
        }
        Command::GenSynthetic {
            users,
            comments,
            out,
            seed,
        } => {
            let events = gen_synthetic(users, comments, seed);
            write_jsonl(&events, BufWriter::new(File::create(&out)?))?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("warn")))
        .with_writer(std::io::stderr)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ttsim: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}
