//! Spectrum traces: RSSI ingestion, busy/idle binarization, occupancy
//! binning, and synthetic trace generators.
//!
//! A trace is a per-channel vector of 10 µs slots. Experiments outlast the
//! one-second samples, so trace lookups loop cyclically; looping preserves a
//! sample's burst structure, which is what the contention dynamics react to.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Slot resolution of all traces, in microseconds.
pub const SLOT_US: u64 = 10;

/// Default busy threshold: a slot is busy iff its RSSI is strictly above this.
pub const DEFAULT_THRESHOLD_DBM: f64 = -83.5;

/// One second of raw per-slot aggregate signal strength on one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct RssiSample {
    pub channel_id: u32,
    pub slot_duration_us: u32,
    pub rssi: Vec<f64>,
}

impl RssiSample {
    pub fn new(channel_id: u32, rssi: Vec<f64>) -> Result<Self> {
        if rssi.is_empty() {
            return Err(Error::domain("RSSI sample must be non-empty"));
        }
        if let Some(v) = rssi.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("non-finite RSSI value {v}")));
        }
        Ok(RssiSample {
            channel_id,
            slot_duration_us: SLOT_US as u32,
            rssi,
        })
    }
}

/// Busy/idle slot vector for one channel, with O(1) cyclic busy-run lookups.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryTrace {
    channel_id: u32,
    slots: Vec<bool>,
    occupancy: f64,
    /// Slots ahead (cyclically, >= 1) to the nearest busy slot; MAX if none.
    next_busy: Vec<u32>,
    /// Slots ahead (cyclically, >= 1) to the nearest idle slot; MAX if none.
    next_idle: Vec<u32>,
}

impl BinaryTrace {
    pub fn from_slots(channel_id: u32, slots: Vec<bool>) -> Result<Self> {
        if slots.is_empty() {
            return Err(Error::domain("trace must have at least one slot"));
        }
        let busy_count = slots.iter().filter(|&&b| b).count();
        let occupancy = busy_count as f64 / slots.len() as f64;
        let next_busy = cyclic_distance_to(&slots, true);
        let next_idle = cyclic_distance_to(&slots, false);
        Ok(BinaryTrace {
            channel_id,
            slots,
            occupancy,
            next_busy,
            next_idle,
        })
    }

    pub fn channel_id(&self) -> u32 {
        self.channel_id
    }

    pub fn slots(&self) -> &[bool] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty slot vectors
    }

    /// Fraction of busy slots; the exact bit mean.
    pub fn occupancy(&self) -> f64 {
        self.occupancy
    }

    /// Length of one loop of the trace, in microseconds.
    pub fn period_us(&self) -> u64 {
        self.slots.len() as u64 * SLOT_US
    }

    /// Channel state at microsecond `t`, looping cyclically past the end.
    pub fn looped_slot(&self, t_us: u64) -> bool {
        let idx = (t_us / SLOT_US) % self.slots.len() as u64;
        self.slots[idx as usize]
    }

    /// Earliest microsecond >= `t` at which the channel is busy; None if the
    /// trace has no busy slot at all.
    pub fn next_busy_us(&self, t_us: u64) -> Option<u64> {
        let n = self.slots.len() as u64;
        let abs_slot = t_us / SLOT_US;
        let idx = (abs_slot % n) as usize;
        if self.slots[idx] {
            return Some(t_us);
        }
        let d = self.next_busy[idx];
        if d == u32::MAX {
            None
        } else {
            Some((abs_slot + d as u64) * SLOT_US)
        }
    }

    /// Earliest microsecond >= `t` at which the channel is idle.
    pub fn next_idle_us(&self, t_us: u64) -> Option<u64> {
        let n = self.slots.len() as u64;
        let abs_slot = t_us / SLOT_US;
        let idx = (abs_slot % n) as usize;
        if !self.slots[idx] {
            return Some(t_us);
        }
        let d = self.next_idle[idx];
        if d == u32::MAX {
            None
        } else {
            Some((abs_slot + d as u64) * SLOT_US)
        }
    }

    /// True iff no microsecond in [a, b) is busy.
    pub fn idle_during(&self, a_us: u64, b_us: u64) -> bool {
        if a_us >= b_us {
            return true;
        }
        match self.next_busy_us(a_us) {
            None => true,
            Some(t) => t >= b_us,
        }
    }
}

/// For each slot, the cyclic distance (in slots, >= 1) to the next slot whose
/// state equals `target`; u32::MAX where no such slot exists.
fn cyclic_distance_to(slots: &[bool], target: bool) -> Vec<u32> {
    let n = slots.len();
    let mut out = vec![u32::MAX; n];
    if !slots.iter().any(|&b| b == target) {
        return out;
    }
    // Two descending passes over the doubled index space resolve the wrap.
    let mut nearest: Option<usize> = None;
    for i in (0..2 * n).rev() {
        if let Some(nb) = nearest {
            if i < n {
                out[i] = (nb - i) as u32;
            }
        }
        if slots[i % n] == target {
            nearest = Some(i);
        }
    }
    out
}

/// Binarizes a raw sample: busy iff RSSI strictly above the threshold
/// (threshold ties count as idle).
pub fn binarize(sample: &RssiSample, threshold_dbm: f64) -> Result<BinaryTrace> {
    if !threshold_dbm.is_finite() {
        return Err(Error::domain("threshold must be finite"));
    }
    let slots = sample.rssi.iter().map(|&v| v > threshold_dbm).collect();
    BinaryTrace::from_slots(sample.channel_id, slots)
}

/// One occupancy regime: traces whose busy fraction falls in
/// [center - half_width, center + half_width).
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyBin {
    pub center: f64,
    pub half_width: f64,
    /// Indices into the trace list this bin was populated from.
    pub members: Vec<usize>,
}

impl OccupancyBin {
    pub fn new(center: f64) -> Self {
        OccupancyBin {
            center,
            half_width: 0.05,
            members: Vec::new(),
        }
    }

    /// Half-open interval [lo, hi) covered by this bin.
    pub fn interval(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }

    pub fn contains(&self, occupancy: f64) -> bool {
        let (lo, hi) = self.interval();
        occupancy >= lo && occupancy < hi
    }
}

/// The standard decile partition: centers 0.1 through 0.9, half-width 0.05.
pub fn decile_bins() -> Vec<OccupancyBin> {
    (1..=9).map(|k| OccupancyBin::new(k as f64 / 10.0)).collect()
}

/// Assigns each trace to the bin whose interval contains its occupancy.
/// Traces outside every interval stay unassigned; bins must be disjoint.
pub fn bin_samples(traces: &[BinaryTrace], mut bins: Vec<OccupancyBin>) -> Result<Vec<OccupancyBin>> {
    let mut intervals: Vec<(f64, f64)> = bins.iter().map(|b| b.interval()).collect();
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in intervals.windows(2) {
        // Tolerate float dust at shared boundaries (0.6 - 0.05 vs 0.5 + 0.05).
        if w[1].0 < w[0].1 - 1e-9 {
            return Err(Error::config(format!(
                "overlapping occupancy bins: [{}, {}) and [{}, {})",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
    }
    for bin in &mut bins {
        bin.members.clear();
    }
    for (i, trace) in traces.iter().enumerate() {
        if let Some(bin) = bins.iter_mut().find(|b| b.contains(trace.occupancy())) {
            bin.members.push(i);
        }
    }
    Ok(bins)
}

/// Synthesizes a trace with independent per-slot busy probability.
pub fn gen_iid_trace(occupancy: f64, length_slots: usize, seed: u64) -> Result<BinaryTrace> {
    if !(0.0..=1.0).contains(&occupancy) {
        return Err(Error::domain(format!("occupancy {occupancy} outside [0, 1]")));
    }
    if length_slots == 0 {
        return Err(Error::domain("trace length must be >= 1 slot"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slots = (0..length_slots)
        .map(|_| rng.random::<f64>() < occupancy)
        .collect();
    BinaryTrace::from_slots(0, slots)
}

/// Synthesizes a bursty trace: a two-state chain with geometric busy/idle
/// sojourns. Mean busy sojourn is `mean_busy_slots`; the idle mean follows
/// from the balance equation occupancy = busy / (busy + idle).
pub fn gen_onoff_trace(
    occupancy: f64,
    mean_busy_slots: f64,
    length_slots: usize,
    seed: u64,
) -> Result<BinaryTrace> {
    if !(occupancy > 0.0 && occupancy < 1.0) {
        return Err(Error::domain(format!("occupancy {occupancy} outside (0, 1)")));
    }
    if mean_busy_slots < 1.0 {
        return Err(Error::domain("mean busy sojourn must be >= 1 slot"));
    }
    if length_slots == 0 {
        return Err(Error::domain("trace length must be >= 1 slot"));
    }
    let mean_idle_slots = mean_busy_slots * (1.0 - occupancy) / occupancy;
    if mean_idle_slots < 1.0 {
        return Err(Error::domain(format!(
            "parameters imply mean idle sojourn {mean_idle_slots:.3} < 1 slot"
        )));
    }
    let exit_busy = 1.0 / mean_busy_slots;
    let exit_idle = 1.0 / mean_idle_slots;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut busy = rng.random::<f64>() < occupancy; // stationary start
    let mut slots = Vec::with_capacity(length_slots);
    for _ in 0..length_slots {
        slots.push(busy);
        let exit = if busy { exit_busy } else { exit_idle };
        if rng.random::<f64>() < exit {
            busy = !busy;
        }
    }
    BinaryTrace::from_slots(0, slots)
}

// ---------------------------------------------------------------------------
// Native trace file format
// ---------------------------------------------------------------------------
//
// Per file: one or more blocks. Each block is a header line
//   channel=<int> slot_us=10 samples=<int> slots_per_sample=<int> kind=<rssi|binary>
// followed by `samples` lines, one per sample: comma-separated dBm reals for
// kind=rssi, or a string of 0/1 characters for kind=binary.

/// Loads every sample from a native trace file, in file order.
///
/// Binary-kind samples are lifted back to RSSI space with sentinel levels
/// `threshold_dbm` +/- 1 dBm, so binarizing the result at the same threshold
/// reproduces the stored slots exactly.
pub fn load_trace(path: &Path, threshold_dbm: f64) -> Result<Vec<RssiSample>> {
    let text = fs::read_to_string(path)?;
    let mut samples = Vec::new();
    let mut lines = text.lines().enumerate().peekable();
    while let Some(&(header_no, header)) = lines.peek() {
        if header.trim().is_empty() {
            lines.next();
            continue;
        }
        lines.next();
        let header = parse_header(path, header_no + 1, header)?;
        for k in 0..header.samples {
            let (line_no, line) = lines.next().ok_or_else(|| Error::Format {
                path: path.into(),
                reason: format!(
                    "expected {} sample lines after header, found {}",
                    header.samples, k
                ),
            })?;
            let rssi = match header.kind {
                TraceKind::Rssi => parse_rssi_line(path, line_no + 1, line)?,
                TraceKind::Binary => parse_binary_line(path, line_no + 1, line, threshold_dbm)?,
            };
            if rssi.len() != header.slots_per_sample {
                return Err(Error::Parse {
                    path: path.into(),
                    line: line_no + 1,
                    reason: format!(
                        "expected {} slots, found {}",
                        header.slots_per_sample,
                        rssi.len()
                    ),
                });
            }
            samples.push(RssiSample::new(header.channel, rssi)?);
        }
    }
    if samples.is_empty() {
        return Err(Error::Format {
            path: path.into(),
            reason: "file contains no samples".into(),
        });
    }
    Ok(samples)
}

/// Loads a native file and binarizes every sample at the given threshold.
pub fn load_binary_traces(path: &Path, threshold_dbm: f64) -> Result<Vec<BinaryTrace>> {
    load_trace(path, threshold_dbm)?
        .iter()
        .map(|s| binarize(s, threshold_dbm))
        .collect()
}

/// Writes binarized traces as a single kind=binary block.
pub fn save_binary_traces(path: &Path, channel: u32, traces: &[BinaryTrace]) -> Result<()> {
    if traces.is_empty() {
        return Err(Error::domain("nothing to save"));
    }
    let slots_per_sample = traces[0].len();
    if traces.iter().any(|t| t.len() != slots_per_sample) {
        return Err(Error::domain("all samples in one block must share a length"));
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "channel={channel} slot_us=10 samples={} slots_per_sample={slots_per_sample} kind=binary",
        traces.len()
    );
    for trace in traces {
        for &b in trace.slots() {
            out.push(if b { '1' } else { '0' });
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes raw samples as a single kind=rssi block.
pub fn save_rssi_samples(path: &Path, channel: u32, samples: &[RssiSample]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::domain("nothing to save"));
    }
    let slots_per_sample = samples[0].rssi.len();
    if samples.iter().any(|s| s.rssi.len() != slots_per_sample) {
        return Err(Error::domain("all samples in one block must share a length"));
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "channel={channel} slot_us=10 samples={} slots_per_sample={slots_per_sample} kind=rssi",
        samples.len()
    );
    for sample in samples {
        let line: Vec<String> = sample.rssi.iter().map(|v| format!("{v}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Converts a bare CSV export (one sample per line, comma-separated dBm
/// values, no header) into a native kind=rssi file.
pub fn convert_rssi_csv(input: &Path, output: &Path, channel: u32) -> Result<usize> {
    let text = fs::read_to_string(input)?;
    let mut samples = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rssi = parse_rssi_line(input, line_no + 1, line)?;
        samples.push(RssiSample::new(channel, rssi)?);
    }
    if samples.is_empty() {
        return Err(Error::Format {
            path: input.into(),
            reason: "no samples in input".into(),
        });
    }
    save_rssi_samples(output, channel, &samples)?;
    Ok(samples.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TraceKind {
    Rssi,
    Binary,
}

struct Header {
    channel: u32,
    samples: usize,
    slots_per_sample: usize,
    kind: TraceKind,
}

fn parse_header(path: &Path, line_no: usize, line: &str) -> Result<Header> {
    let fail = |reason: String| Error::Format {
        path: path.into(),
        reason: format!("line {line_no}: {reason}"),
    };
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 5 {
        return Err(fail(format!("header has {} fields, expected 5", fields.len())));
    }
    let field = |i: usize, key: &str| -> Result<&str> {
        let (k, v) = fields[i]
            .split_once('=')
            .ok_or_else(|| fail(format!("malformed field {:?}", fields[i])))?;
        if k != key {
            return Err(fail(format!("expected field {key}, found {k}")));
        }
        Ok(v)
    };
    let channel: u32 = field(0, "channel")?
        .parse()
        .map_err(|_| fail("channel is not an integer".into()))?;
    let slot_us: u64 = field(1, "slot_us")?
        .parse()
        .map_err(|_| fail("slot_us is not an integer".into()))?;
    if slot_us != SLOT_US {
        return Err(fail(format!("slot_us={slot_us}, only {SLOT_US} is supported")));
    }
    let samples: usize = field(2, "samples")?
        .parse()
        .map_err(|_| fail("samples is not an integer".into()))?;
    let slots_per_sample: usize = field(3, "slots_per_sample")?
        .parse()
        .map_err(|_| fail("slots_per_sample is not an integer".into()))?;
    let kind = match field(4, "kind")? {
        "rssi" => TraceKind::Rssi,
        "binary" => TraceKind::Binary,
        other => return Err(fail(format!("unknown kind {other:?}"))),
    };
    Ok(Header {
        channel,
        samples,
        slots_per_sample,
        kind,
    })
}

fn parse_rssi_line(path: &Path, line_no: usize, line: &str) -> Result<Vec<f64>> {
    line.split(',')
        .map(|tok| {
            tok.trim().parse::<f64>().map_err(|_| Error::Parse {
                path: path.into(),
                line: line_no,
                reason: format!("non-numeric RSSI value {:?}", tok.trim()),
            })
        })
        .collect()
}

fn parse_binary_line(path: &Path, line_no: usize, line: &str, threshold_dbm: f64) -> Result<Vec<f64>> {
    line.trim()
        .chars()
        .map(|c| match c {
            '1' => Ok(threshold_dbm + 1.0),
            '0' => Ok(threshold_dbm - 1.0),
            other => Err(Error::Parse {
                path: path.into(),
                line: line_no,
                reason: format!("unexpected character {other:?} in binary sample"),
            }),
        })
        .collect()
}
