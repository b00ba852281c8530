//! `sts-sim`: runs coded single-tone signaling experiments and writes CSV curves.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use sts_core::harness::{self, DecodeThreshold, ExperimentConfig, ExperimentKind};
use sts_core::{ChannelModel, Error, InterferenceMode, OutcomeCounts, Result};

#[derive(Debug, Parser)]
#[command(
    name = "sts-sim",
    version,
    about = "Monte Carlo simulator for coded single-tone signaling"
)]
struct Args {
    /// miss_detection or multiuser_decode
    #[arg(long)]
    experiment: Option<ExperimentKind>,
    /// TOML experiment file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination (stdout when omitted); metadata goes to <out>.meta.json
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trials per (SIR, antenna count) point
    #[arg(long)]
    trials: Option<u64>,
    /// SIR points in dB, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    sir: Option<Vec<f64>>,
    /// Simultaneous users
    #[arg(long)]
    users: Option<usize>,
    /// Receive antenna counts, comma separated
    #[arg(long, value_delimiter = ',')]
    nrx: Option<Vec<usize>>,
    /// awgn, flat_rayleigh or pedb
    #[arg(long)]
    channel: Option<ChannelModel>,
    /// Bypass the channel and decode the transmitted tones directly
    #[arg(long)]
    perfect_detection: bool,
    /// Draw interference independently per antenna
    #[arg(long)]
    independent_interference: bool,
    /// Decoder acceptance threshold, or "auto" to calibrate
    #[arg(long)]
    theta: Option<DecodeThreshold>,
    /// Print the effective configuration as TOML and exit
    #[arg(long)]
    dump_config: bool,
}

fn load_config(args: &Args) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_toml(&fs::read_to_string(path)?)?,
        None => {
            ExperimentConfig::preset(args.experiment.unwrap_or(ExperimentKind::MultiuserDecode))
        }
    };
    if let Some(kind) = args.experiment {
        cfg.experiment = kind;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials_per_point = trials;
    }
    if let Some(sir) = &args.sir {
        cfg.sir_points_db = sir.clone();
    }
    if let Some(users) = args.users {
        cfg.n_users = users;
    }
    if let Some(nrx) = &args.nrx {
        cfg.n_rx = nrx.clone();
    }
    if let Some(model) = args.channel {
        cfg.channel.model = model;
    }
    if args.perfect_detection {
        cfg.perfect_detection = true;
    }
    if args.independent_interference {
        cfg.channel.interference = InterferenceMode::Independent;
    }
    if let Some(theta) = args.theta {
        cfg.decode_threshold = theta;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn meta_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn summarize(counts: &OutcomeCounts) {
    let mut err = io::stderr().lock();
    match counts {
        OutcomeCounts::MissDetection(points) => {
            for p in points {
                let _ = writeln!(
                    err,
                    "sir={:>7.2} dB n_rx={} p_miss={:.4e} (analytic {:.4e}) p_fa={:.4e}",
                    p.sir_db,
                    p.n_rx,
                    p.p_miss(),
                    p.p_miss_analytic,
                    p.p_fa()
                );
            }
        }
        OutcomeCounts::MultiuserDecode(points) => {
            for p in points {
                let _ = writeln!(
                    err,
                    "sir={:>7.2} dB n_rx={} p_erasure={:.4e} p_error={:.4e} p_collision={:.4e}",
                    p.sir_db,
                    p.n_rx,
                    p.p_erasure(),
                    p.p_error(),
                    p.p_collision()
                );
            }
        }
    }
}

fn run(args: &Args) -> Result<()> {
    let cfg = load_config(args)?;
    if args.dump_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    let report = harness::run_experiment(&cfg)?;
    if let Some(theta) = report.decode_threshold {
        eprintln!("decode threshold: {theta}");
    }
    summarize(&report.counts);
    match &args.out {
        Some(path) => {
            harness::emit_csv(&report.counts, path)?;
            let meta = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::Io(io::Error::other(e)))?;
            fs::write(meta_path(path), meta + "\n")?;
        }
        None => harness::write_csv(&report.counts, io::stdout().lock())?,
    }
    Ok(())
}

fn error_line(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": kind, "message": message }).to_string()
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", error_line("usage", e.to_string().trim()));
            return ExitCode::from(2);
        }
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_line(e.kind(), &e.to_string()));
            ExitCode::FAILURE
        }
    }
}
