//! Experiment orchestration: occupancy-bin trace pools, load normalization
//! against saturated single-link throughput, seeded replications, and CSV
//! emission.
//!
//! Within one replication the same arrival schedule and the same trace pair
//! feed every requested policy, so policy comparisons are paired. Unstable
//! experiments (under 95% delivery) are emitted with stable=false rather
//! than dropped, leaving the discard rule auditable at analysis time.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bonding::{select_primary, BondedLink};
use crate::engine::{self, PacketRecord, TimingConfig};
use crate::error::{Error, Result};
use crate::metrics::{export_cdf, summarize, ExperimentSummary};
use crate::policies::PolicyId;
use crate::seeding::{derive, Domain};
use crate::trace::{gen_iid_trace, gen_onoff_trace, load_binary_traces, BinaryTrace, OccupancyBin};
use crate::traffic::{batched_arrivals, load_replay, poisson_arrivals, saturated_arrivals, ArrivalSchedule};

/// Environment variable naming the dataset root directory.
pub const DATA_DIR_ENV: &str = "MLO_SIM_DATA_DIR";

const CALIBRATION_FILE: &str = "calibration.toml";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrafficKind {
    Poisson,
    Batched,
    Replay,
}

impl std::fmt::Display for TrafficKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TrafficKind::Poisson => "poisson",
            TrafficKind::Batched => "batched",
            TrafficKind::Replay => "replay",
        })
    }
}

/// How each link picks its sensing channel: a fixed index or the
/// least-occupied channel of every sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimarySelect {
    Fixed(usize),
    Dynamic,
}

impl Default for PrimarySelect {
    fn default() -> Self {
        PrimarySelect::Fixed(0)
    }
}

impl std::fmt::Display for PrimarySelect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PrimarySelect::Fixed(i) => write!(f, "fixed:{i}"),
            PrimarySelect::Dynamic => f.write_str("dynamic"),
        }
    }
}

impl std::str::FromStr for PrimarySelect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "dynamic" {
            return Ok(PrimarySelect::Dynamic);
        }
        if let Some(i) = s.strip_prefix("fixed:") {
            return i
                .parse()
                .map(PrimarySelect::Fixed)
                .map_err(|_| Error::config(format!("bad primary index in {s:?}")));
        }
        Err(Error::config(format!(
            "bad primary selection {s:?}; expected fixed:<i> or dynamic"
        )))
    }
}

impl Serialize for PrimarySelect {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PrimarySelect {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthKind {
    Iid,
    Onoff,
}

/// Synthetic trace pool parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub kind: SynthKind,
    #[serde(default = "default_mean_busy")]
    pub mean_busy_slots: f64,
    #[serde(default = "default_sample_slots")]
    pub sample_slots: usize,
    #[serde(default = "default_pool_size")]
    pub pool_size: usize,
}

fn default_mean_busy() -> f64 {
    17.2
}

fn default_sample_slots() -> usize {
    1000
}

fn default_pool_size() -> usize {
    64
}

/// Where to find recorded traces: one native file per 20 MHz channel, named
/// `channel_<id>.trace`, under the configured directory (or $MLO_SIM_DATA_DIR).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default = "default_primary_channel")]
    pub primary_channel: u32,
    #[serde(default = "default_secondary_channel")]
    pub secondary_channel: u32,
    #[serde(default = "default_threshold")]
    pub threshold_dbm: f64,
}

fn default_primary_channel() -> u32 {
    36
}

fn default_secondary_channel() -> u32 {
    100
}

fn default_threshold() -> f64 {
    crate::trace::DEFAULT_THRESHOLD_DBM
}

/// Optional overrides on the default MAC timing.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimingOverrides {
    #[serde(default)]
    pub tx_us: Option<u64>,
    #[serde(default)]
    pub cw_min: Option<u32>,
    #[serde(default)]
    pub packet_bits: Option<u64>,
}

impl TimingOverrides {
    pub fn apply(&self) -> TimingConfig {
        let mut t = TimingConfig::default();
        if let Some(v) = self.tx_us {
            t.tx_us = v;
        }
        if let Some(v) = self.cw_min {
            t.cw_min = v;
        }
        if let Some(v) = self.packet_bits {
            t.packet_bits = v;
        }
        t
    }
}

/// One experiment matrix: bins x loads x policies x reps.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default = "default_reps")]
    pub reps: u32,
    pub horizon_us: u64,
    pub policies: Vec<PolicyId>,
    /// Traffic loads as fractions of the calibrated saturation throughput.
    #[serde(default)]
    pub loads: Vec<f64>,
    /// Explicit rate in bits/s; bypasses load normalization when set.
    #[serde(default)]
    pub rate_bps: Option<f64>,
    pub traffic: TrafficKind,
    #[serde(default = "default_fps")]
    pub fps: f64,
    #[serde(default)]
    pub replay_path: Option<PathBuf>,
    /// Occupancy bin centers for the two links.
    pub primary_bin: f64,
    pub secondary_bin: f64,
    #[serde(default = "default_width")]
    pub width_mhz: u32,
    #[serde(default)]
    pub primary_select: PrimarySelect,
    #[serde(default)]
    pub synthetic: Option<SynthSpec>,
    #[serde(default)]
    pub dataset: Option<DatasetSpec>,
    #[serde(default)]
    pub timing: TimingOverrides,
}

fn default_reps() -> u32 {
    20
}

fn default_fps() -> f64 {
    60.0
}

fn default_width() -> u32 {
    20
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::config(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.policies.is_empty() {
            return Err(Error::config("at least one policy is required"));
        }
        if self.reps == 0 {
            return Err(Error::config("reps must be >= 1"));
        }
        match (self.loads.is_empty(), self.rate_bps) {
            (true, None) => return Err(Error::config("set loads or rate_bps")),
            (false, Some(_)) => {
                return Err(Error::config("loads and rate_bps are mutually exclusive"))
            }
            _ => {}
        }
        if self.loads.iter().any(|&l| !(l > 0.0 && l <= 1.0)) {
            return Err(Error::config("loads must lie in (0, 1]"));
        }
        if self.traffic == TrafficKind::Replay && self.replay_path.is_none() {
            return Err(Error::config("replay traffic needs replay_path"));
        }
        for b in [self.primary_bin, self.secondary_bin] {
            if !(0.0..=1.0).contains(&b) {
                return Err(Error::config(format!("bin center {b} outside [0, 1]")));
            }
        }
        if !matches!(self.width_mhz, 20 | 40 | 80) {
            return Err(Error::config("width_mhz must be 20, 40, or 80"));
        }
        if self.synthetic.is_none() && self.dataset.is_none() {
            return Err(Error::config("configure a [synthetic] or [dataset] source"));
        }
        if let PrimarySelect::Fixed(i) = self.primary_select {
            if i >= (self.width_mhz / 20) as usize {
                return Err(Error::config(format!(
                    "fixed primary index {i} out of range for {} MHz",
                    self.width_mhz
                )));
            }
        }
        self.timing.apply().validate()
    }

    pub fn timing(&self) -> TimingConfig {
        self.timing.apply()
    }

    fn channels_per_link(&self) -> usize {
        (self.width_mhz / 20) as usize
    }

    /// Identifies the trace source in calibration cache keys.
    fn source_signature(&self) -> String {
        if let Some(s) = &self.synthetic {
            format!(
                "synthetic:{:?}:mb={}:slots={}",
                s.kind, s.mean_busy_slots, s.sample_slots
            )
        } else if let Some(d) = &self.dataset {
            let dir = d
                .dir
                .clone()
                .or_else(|| std::env::var(DATA_DIR_ENV).ok().map(PathBuf::from))
                .unwrap_or_default();
            format!("dataset:{}:ch{}", dir.display(), d.primary_channel)
        } else {
            "unset".into()
        }
    }
}

/// A bin's trace pool for one link: each sample is the link's aligned
/// per-channel traces (one trace for 20 MHz, four for 80 MHz).
#[derive(Debug, Clone)]
pub struct LinkPool {
    pub bin_center: f64,
    pub samples: Vec<Vec<BinaryTrace>>,
}

impl LinkPool {
    pub fn pick(&self, seed: u64, tag: u64, rep: u64) -> &[BinaryTrace] {
        let idx = derive(seed, Domain::TracePick, tag, rep) as usize % self.samples.len();
        &self.samples[idx]
    }
}

/// Synthesizes a pool of `pool_size` samples whose channel-0 occupancy falls
/// in the bin around `center`. Extra channels of a sample are generated at
/// the same center occupancy with derived seeds.
pub fn synthesize_bin_pool(
    spec: &SynthSpec,
    center: f64,
    channels: usize,
    seed: u64,
    link_tag: u64,
) -> Result<LinkPool> {
    let bin = OccupancyBin::new(center);
    let mut samples = Vec::with_capacity(spec.pool_size);
    let attempts_cap = spec.pool_size * 400;
    for k in 0..attempts_cap {
        if samples.len() == spec.pool_size {
            break;
        }
        let gen = |channel: usize, k: usize| -> Result<BinaryTrace> {
            let s = derive(seed, Domain::Synth, link_tag * 8 + channel as u64, k as u64);
            match spec.kind {
                SynthKind::Iid => gen_iid_trace(center, spec.sample_slots, s),
                SynthKind::Onoff => {
                    gen_onoff_trace(center, spec.mean_busy_slots, spec.sample_slots, s)
                }
            }
        };
        let head = gen(0, k)?;
        if !bin.contains(head.occupancy()) {
            continue;
        }
        let mut sample = vec![head];
        for c in 1..channels {
            sample.push(gen(c, k)?);
        }
        samples.push(sample);
    }
    if samples.len() < spec.pool_size {
        return Err(Error::config(format!(
            "could not synthesize {} samples in bin {center} after {attempts_cap} attempts",
            spec.pool_size
        )));
    }
    Ok(LinkPool {
        bin_center: center,
        samples,
    })
}

/// Loads a dataset pool: per-channel native files with aligned sample
/// indices, binned by the base channel's occupancy.
fn load_dataset_pool(
    spec: &DatasetSpec,
    center: f64,
    base_channel: u32,
    channels: usize,
) -> Result<LinkPool> {
    let dir = spec
        .dir
        .clone()
        .or_else(|| std::env::var(DATA_DIR_ENV).ok().map(PathBuf::from))
        .ok_or_else(|| {
            Error::config(format!(
                "dataset directory not set; configure dataset.dir or {DATA_DIR_ENV}"
            ))
        })?;
    let mut per_channel: Vec<Vec<BinaryTrace>> = Vec::with_capacity(channels);
    for c in 0..channels {
        // Adjacent 20 MHz channels step by 4 in Wi-Fi channel numbering.
        let id = base_channel + 4 * c as u32;
        let path = dir.join(format!("channel_{id}.trace"));
        per_channel.push(load_binary_traces(&path, spec.threshold_dbm)?);
    }
    let n = per_channel[0].len();
    if per_channel.iter().any(|v| v.len() != n) {
        return Err(Error::config(
            "channel files must hold the same number of samples to stay aligned",
        ));
    }
    let bin = OccupancyBin::new(center);
    let samples: Vec<Vec<BinaryTrace>> = (0..n)
        .filter(|&i| bin.contains(per_channel[0][i].occupancy()))
        .map(|i| per_channel.iter().map(|v| v[i].clone()).collect())
        .collect();
    if samples.is_empty() {
        return Err(Error::config(format!(
            "no dataset samples fall in bin {center} on channel {base_channel}"
        )));
    }
    Ok(LinkPool {
        bin_center: center,
        samples,
    })
}

fn build_link_pool(cfg: &ExperimentConfig, link: usize) -> Result<LinkPool> {
    let center = if link == 0 {
        cfg.primary_bin
    } else {
        cfg.secondary_bin
    };
    if let Some(s) = &cfg.synthetic {
        synthesize_bin_pool(s, center, cfg.channels_per_link(), cfg.seed, link as u64)
    } else if let Some(d) = &cfg.dataset {
        let base = if link == 0 {
            d.primary_channel
        } else {
            d.secondary_channel
        };
        load_dataset_pool(d, center, base, cfg.channels_per_link())
    } else {
        Err(Error::config("no trace source configured"))
    }
}

/// Mean saturated single-link throughput over a bin's samples: `reps` seeded
/// runs of the fully-backlogged single-link policy on the sample's base
/// channel. This is the normalization base for load fractions.
pub fn calibrate_saturation(
    pool: &LinkPool,
    timing: &TimingConfig,
    reps: u32,
    seed: u64,
    horizon_us: u64,
) -> Result<f64> {
    if pool.samples.is_empty() {
        return Err(Error::config("cannot calibrate an empty bin"));
    }
    let arrivals = saturated_arrivals(timing, horizon_us, 1);
    let mut acc = 0.0;
    for r in 0..reps {
        let sample = pool.pick(seed, 0xCA1, r as u64);
        let link = BondedLink::single(sample[0].clone());
        let records = engine::run(
            PolicyId::Slo,
            &[link],
            &arrivals,
            timing,
            derive(seed, Domain::Run, 0xCA1, r as u64),
            horizon_us,
        )?;
        acc += summarize(&records, horizon_us).throughput_bps;
    }
    Ok(acc / reps as f64)
}

fn read_calibration_cache(path: &Path) -> BTreeMap<String, f64> {
    fs::read_to_string(path)
        .ok()
        .and_then(|text| toml::from_str(&text).ok())
        .unwrap_or_default()
}

fn cached_saturation(
    cfg: &ExperimentConfig,
    pool: &LinkPool,
    timing: &TimingConfig,
    out_dir: &Path,
) -> Result<f64> {
    let key = format!(
        "{}|bin={}|seed={}|reps={}|horizon={}|tx={}",
        cfg.source_signature(),
        pool.bin_center,
        cfg.seed,
        cfg.reps,
        cfg.horizon_us,
        timing.tx_us,
    );
    let cache_path = out_dir.join(CALIBRATION_FILE);
    let mut cache = read_calibration_cache(&cache_path);
    if let Some(&v) = cache.get(&key) {
        return Ok(v);
    }
    let v = calibrate_saturation(pool, timing, cfg.reps, cfg.seed, cfg.horizon_us)?;
    cache.insert(key, v);
    let text = toml::to_string(&cache).map_err(|e| Error::internal(e.to_string()))?;
    fs::write(&cache_path, text)?;
    Ok(v)
}

/// One summary.csv row.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub experiment_id: String,
    pub policy: PolicyId,
    pub load: f64,
    pub rate_bps: f64,
    pub rep: u32,
    pub run_seed: u64,
    pub arrivals: usize,
    pub summary: ExperimentSummary,
}

/// Matrix outcome: row count, calibration base, and cells where every
/// replication was unstable (flagged, not dropped).
#[derive(Debug)]
pub struct MatrixReport {
    pub sat_throughput_bps: f64,
    pub rows: Vec<SummaryRow>,
    pub infeasible_cells: Vec<String>,
    pub summary_path: PathBuf,
    pub packets_path: PathBuf,
    pub cdf_path: PathBuf,
}

struct CellOutput {
    load_idx: usize,
    rep: u32,
    rows: Vec<SummaryRow>,
    packet_lines: String,
}

fn build_links(
    cfg: &ExperimentConfig,
    primary_sample: &[BinaryTrace],
    secondary_sample: Option<&[BinaryTrace]>,
) -> Result<Vec<BondedLink>> {
    let mk = |sample: &[BinaryTrace]| -> Result<BondedLink> {
        let channels: Vec<BinaryTrace> = sample.to_vec();
        let idx = match cfg.primary_select {
            PrimarySelect::Fixed(i) => i,
            PrimarySelect::Dynamic => select_primary(&channels),
        };
        BondedLink::new(channels, idx)
    };
    let mut links = vec![mk(primary_sample)?];
    if let Some(s) = secondary_sample {
        links.push(mk(s)?);
    }
    Ok(links)
}

fn packet_lines(experiment_id: &str, records: &[PacketRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 48);
    for r in records {
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        let iface = r.interface.map(|i| i.as_str()).unwrap_or("");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            experiment_id,
            r.id,
            r.t_arrival_us,
            opt(r.t_assigned_us),
            opt(r.t_tx_start_us),
            opt(r.t_tx_end_us),
            iface
        );
    }
    out
}

/// Runs the full matrix and writes summary.csv, packets.csv, and cdf.csv
/// under `out_dir`. Byte-identical outputs for identical (config, seed).
pub fn run_matrix(cfg: &ExperimentConfig, out_dir: &Path) -> Result<MatrixReport> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;
    let timing = cfg.timing();
    let primary_pool = build_link_pool(cfg, 0)?;
    let needs_secondary = cfg.policies.iter().any(|p| *p != PolicyId::Slo);
    let secondary_pool = if needs_secondary {
        Some(build_link_pool(cfg, 1)?)
    } else {
        None
    };

    let sat = cached_saturation(cfg, &primary_pool, &timing, out_dir)?;
    let load_points: Vec<(f64, f64)> = match cfg.rate_bps {
        Some(rate) => vec![(if sat > 0.0 { rate / sat } else { f64::NAN }, rate)],
        None => cfg.loads.iter().map(|&l| (l, l * sat)).collect(),
    };
    if load_points.iter().any(|&(_, rate)| !(rate > 0.0)) {
        return Err(Error::config(
            "calibrated saturation throughput is zero; loads cannot be normalized",
        ));
    }
    let replay = match (cfg.traffic, &cfg.replay_path) {
        (TrafficKind::Replay, Some(path)) => Some(load_replay(path)?),
        _ => None,
    };

    let cells: Vec<(usize, u32)> = (0..load_points.len())
        .flat_map(|li| (0..cfg.reps).map(move |r| (li, r)))
        .collect();
    let outputs: Result<Vec<CellOutput>> = cells
        .par_iter()
        .map(|&(load_idx, rep)| run_cell(cfg, &timing, &primary_pool, secondary_pool.as_ref(), &load_points, replay.as_ref(), load_idx, rep))
        .collect();
    let mut outputs = outputs?;
    outputs.sort_by_key(|c| (c.load_idx, c.rep));

    let mut rows: Vec<SummaryRow> = Vec::new();
    let mut packets_csv = String::from(
        "experiment_id,packet_id,t_arrival_us,t_assigned_us,t_tx_start_us,t_tx_end_us,interface\n",
    );
    for cell in &mut outputs {
        rows.append(&mut cell.rows);
        packets_csv.push_str(&cell.packet_lines);
    }

    // Cells where every replication is unstable are flagged for the caller.
    let mut infeasible_cells = Vec::new();
    for (li, &(load, _)) in load_points.iter().enumerate() {
        for &policy in &cfg.policies {
            let any_stable = rows
                .iter()
                .filter(|r| r.policy == policy && row_load_idx(r, &load_points) == li)
                .any(|r| r.summary.stable);
            if !any_stable {
                infeasible_cells.push(format!("load={load} policy={policy}"));
            }
        }
    }

    let summary_path = out_dir.join("summary.csv");
    fs::write(&summary_path, summary_csv(cfg, &rows))?;
    let packets_path = out_dir.join("packets.csv");
    let mut f = fs::File::create(&packets_path)?;
    f.write_all(packets_csv.as_bytes())?;
    let cdf_path = out_dir.join("cdf.csv");
    fs::write(&cdf_path, throughput_cdf_csv(cfg, &rows))?;

    Ok(MatrixReport {
        sat_throughput_bps: sat,
        rows,
        infeasible_cells,
        summary_path,
        packets_path,
        cdf_path,
    })
}

fn row_load_idx(row: &SummaryRow, load_points: &[(f64, f64)]) -> usize {
    load_points
        .iter()
        .position(|&(_, rate)| rate == row.rate_bps)
        .unwrap_or(usize::MAX)
}

#[allow(clippy::too_many_arguments)]
fn run_cell(
    cfg: &ExperimentConfig,
    timing: &TimingConfig,
    primary_pool: &LinkPool,
    secondary_pool: Option<&LinkPool>,
    load_points: &[(f64, f64)],
    replay: Option<&ArrivalSchedule>,
    load_idx: usize,
    rep: u32,
) -> Result<CellOutput> {
    let (load, rate) = load_points[load_idx];
    let primary_sample = primary_pool.pick(cfg.seed, (load_idx as u64) << 8, rep as u64);
    let secondary_sample =
        secondary_pool.map(|p| p.pick(cfg.seed, ((load_idx as u64) << 8) | 1, rep as u64));
    let links = build_links(cfg, primary_sample, secondary_sample)?;

    let arrivals_seed = derive(cfg.seed, Domain::Arrivals, load_idx as u64, rep as u64);
    let run_seed = derive(cfg.seed, Domain::Run, load_idx as u64, rep as u64);
    let arrivals = match cfg.traffic {
        TrafficKind::Poisson => {
            poisson_arrivals(rate, timing.packet_bits, cfg.horizon_us, arrivals_seed)?
        }
        TrafficKind::Batched => batched_arrivals(rate, cfg.fps, timing.packet_bits, cfg.horizon_us)?,
        TrafficKind::Replay => {
            let r = replay.expect("replay schedule preloaded");
            let pairs = r
                .entries()
                .iter()
                .filter(|a| a.t_us < cfg.horizon_us)
                .map(|a| (a.t_us, a.size_bits))
                .collect();
            ArrivalSchedule::from_pairs(pairs, r.nominal_rate_bps())?
        }
    };

    let mut rows = Vec::with_capacity(cfg.policies.len());
    let mut lines = String::new();
    for &policy in &cfg.policies {
        let records = engine::run(policy, &links, &arrivals, timing, run_seed, cfg.horizon_us)?;
        let experiment_id = format!(
            "b{:02.0}-{:02.0}_L{load_idx}_{policy}_r{rep:02}",
            cfg.primary_bin * 100.0,
            cfg.secondary_bin * 100.0
        );
        lines.push_str(&packet_lines(&experiment_id, &records));
        rows.push(SummaryRow {
            experiment_id,
            policy,
            load,
            rate_bps: rate,
            rep,
            run_seed,
            arrivals: records.len(),
            summary: summarize(&records, cfg.horizon_us),
        });
    }
    Ok(CellOutput {
        load_idx,
        rep,
        rows,
        packet_lines: lines,
    })
}

fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn fmt_opt_u64(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Renders summary rows with their configuration columns.
pub fn summary_csv(cfg: &ExperimentConfig, rows: &[SummaryRow]) -> String {
    let mut out = String::from(
        "experiment_id,policy,traffic,primary_bin,secondary_bin,width_mhz,primary_select,\
         load,rate_bps,rep,run_seed,horizon_us,arrivals,throughput_bps,mean_delay_us,\
         p95_delay_us,jitter_us,mean_queueing_us,p95_queueing_us,mean_access_us,\
         p95_access_us,delivered_fraction,stable\n",
    );
    for r in rows {
        let s = &r.summary;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.experiment_id,
            r.policy,
            cfg.traffic,
            cfg.primary_bin,
            cfg.secondary_bin,
            cfg.width_mhz,
            cfg.primary_select,
            r.load,
            r.rate_bps,
            r.rep,
            r.run_seed,
            cfg.horizon_us,
            r.arrivals,
            s.throughput_bps,
            fmt_opt_f64(s.mean_delay_us),
            fmt_opt_u64(s.p95_delay_us),
            fmt_opt_f64(s.jitter_us),
            fmt_opt_f64(s.mean_queueing_us),
            fmt_opt_u64(s.p95_queueing_us),
            fmt_opt_f64(s.mean_access_us),
            fmt_opt_u64(s.p95_access_us),
            s.delivered_fraction,
            s.stable
        );
    }
    out
}

/// Per-policy empirical CDF of throughput over stable experiments.
fn throughput_cdf_csv(cfg: &ExperimentConfig, rows: &[SummaryRow]) -> String {
    let mut out = String::from("policy,throughput_bps,cum_fraction\n");
    for &policy in &cfg.policies {
        let values: Vec<f64> = rows
            .iter()
            .filter(|r| r.policy == policy && r.summary.stable)
            .map(|r| r.summary.throughput_bps)
            .collect();
        for (v, f) in export_cdf(&values) {
            let _ = writeln!(out, "{policy},{v},{f}");
        }
    }
    out
}
