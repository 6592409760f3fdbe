//! Command-line interface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::harness::{self, ExperimentConfig, PrimarySelect, SynthKind, SynthSpec};
use crate::model;
use crate::policies::PolicyId;
use crate::trace;

#[derive(Parser)]
#[command(name = "mlo-sim", version, about = "Trace-driven Wi-Fi multi-link simulator")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment matrix from a config file.
    Run(RunArgs),
    /// Emit the closed-form occupancy-grid throughput map as CSV.
    Model(ModelArgs),
    /// Calibrate saturated single-link throughput for the config's primary bin.
    Calibrate(CalibrateArgs),
    /// Synthesize a native trace file.
    Synth(SynthArgs),
    /// Convert a bare CSV of per-sample RSSI rows into the native format.
    Convert(ConvertArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for summary.csv, packets.csv, cdf.csv.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Restrict the run to a single policy: slo, str, nstr, str+.
    #[arg(long)]
    policy: Option<PolicyId>,
    /// Override the per-link width in MHz (20, 40, 80).
    #[arg(long)]
    width: Option<u32>,
    /// Override primary-channel selection: fixed:<i> or dynamic.
    #[arg(long)]
    primary: Option<PrimarySelect>,
}

#[derive(Args)]
struct ModelArgs {
    /// Occupancy grid as start:end:step, e.g. 0.1:0.9:0.1.
    #[arg(long, default_value = "0.1:0.9:0.1")]
    grid: String,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Target busy fraction in (0, 1) for on/off, [0, 1] for iid.
    #[arg(long)]
    occupancy: f64,
    /// Generator kind: iid or onoff.
    #[arg(long, value_parser = parse_kind)]
    kind: SynthKind,
    /// Mean busy sojourn in slots (onoff only).
    #[arg(long, default_value_t = 17.2)]
    mean_busy: f64,
    /// Samples to generate.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    /// Slots per sample.
    #[arg(long, default_value_t = 1000)]
    slots: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Channel id stamped into the file header.
    #[arg(long, default_value_t = 0)]
    channel: u32,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ConvertArgs {
    /// Channel id for the native header.
    #[arg(long)]
    channel: u32,
    /// Input CSV: one sample per line, comma-separated dBm values.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn parse_kind(s: &str) -> std::result::Result<SynthKind, String> {
    match s {
        "iid" => Ok(SynthKind::Iid),
        "onoff" => Ok(SynthKind::Onoff),
        other => Err(format!("unknown kind {other:?}; expected iid or onoff")),
    }
}

impl clap::builder::ValueParserFactory for PolicyId {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<PolicyId>().map_err(|e| e.to_string()))
    }
}

impl clap::builder::ValueParserFactory for PrimarySelect {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| {
            s.parse::<PrimarySelect>().map_err(|e| e.to_string())
        })
    }
}

pub fn main(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => run(args),
        Command::Model(args) => model_cmd(args),
        Command::Calibrate(args) => calibrate(args),
        Command::Synth(args) => synth(args),
        Command::Convert(args) => convert(args),
    }
}

fn apply_overrides(mut cfg: ExperimentConfig, args: &RunArgs) -> Result<ExperimentConfig> {
    if let Some(p) = args.policy {
        cfg.policies = vec![p];
    }
    if let Some(w) = args.width {
        cfg.width_mhz = w;
    }
    if let Some(sel) = args.primary {
        cfg.primary_select = sel;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: RunArgs) -> Result<()> {
    let cfg = apply_overrides(ExperimentConfig::load(&args.config)?, &args)?;
    let report = harness::run_matrix(&cfg, &args.out)?;
    println!(
        "saturation base: {:.3} Mbps over bin {}",
        report.sat_throughput_bps / 1e6,
        cfg.primary_bin
    );
    println!(
        "{} experiments -> {}",
        report.rows.len(),
        report.summary_path.display()
    );
    let stable = report.rows.iter().filter(|r| r.summary.stable).count();
    println!("stable: {stable}/{} rows", report.rows.len());
    for cell in &report.infeasible_cells {
        println!("infeasible (no stable rep): {cell}");
    }
    Ok(())
}

fn model_cmd(args: ModelArgs) -> Result<()> {
    let parts: Vec<&str> = args.grid.split(':').collect();
    let [start, end, step] = parts.as_slice() else {
        return Err(Error::config(format!(
            "bad grid {:?}; expected start:end:step",
            args.grid
        )));
    };
    let parse = |s: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| Error::config(format!("bad grid value {s:?}")))
    };
    let cells = model::gain_grid(parse(start)?, parse(end)?, parse(step)?)?;
    let csv = model::gain_grid_csv(&cells);
    match args.out {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn calibrate(args: CalibrateArgs) -> Result<()> {
    let cfg = ExperimentConfig::load(&args.config)?;
    std::fs::create_dir_all(&args.out)?;
    let report = harness::run_matrix(
        &ExperimentConfig {
            policies: vec![PolicyId::Slo],
            loads: vec![1.0],
            rate_bps: None,
            ..cfg.clone()
        },
        &args.out,
    );
    // run_matrix caches the calibration; surface just the base value even if
    // the (saturated) matrix rows themselves are unstable.
    match report {
        Ok(r) => println!(
            "bin {}: saturated single-link throughput {:.3} Mbps",
            cfg.primary_bin,
            r.sat_throughput_bps / 1e6
        ),
        Err(e) => return Err(e),
    }
    Ok(())
}

fn synth(args: SynthArgs) -> Result<()> {
    let spec = SynthSpec {
        kind: args.kind,
        mean_busy_slots: args.mean_busy,
        sample_slots: args.slots,
        pool_size: args.samples,
    };
    let mut traces = Vec::with_capacity(args.samples);
    for k in 0..args.samples {
        let seed = crate::seeding::derive(args.seed, crate::seeding::Domain::Synth, 0, k as u64);
        let t = match spec.kind {
            SynthKind::Iid => trace::gen_iid_trace(args.occupancy, spec.sample_slots, seed)?,
            SynthKind::Onoff => trace::gen_onoff_trace(
                args.occupancy,
                spec.mean_busy_slots,
                spec.sample_slots,
                seed,
            )?,
        };
        traces.push(t);
    }
    trace::save_binary_traces(&args.out, args.channel, &traces)?;
    println!("wrote {} samples to {}", traces.len(), args.out.display());
    Ok(())
}

fn convert(args: ConvertArgs) -> Result<()> {
    let n = trace::convert_rssi_csv(&args.input, &args.out, args.channel)?;
    println!("converted {n} samples to {}", args.out.display());
    Ok(())
}
