//! Packet arrival generators: Poisson, batched video-frame, replay-from-file,
//! and the fully-backlogged schedule used for saturation runs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::TimingConfig;
use crate::error::{Error, Result};

/// One packet arrival at the AP.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arrival {
    pub t_us: u64,
    pub size_bits: u64,
}

/// Ordered arrival times and sizes. Times are non-decreasing; packets sharing
/// a microsecond (batch arrivals) queue in vector order.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalSchedule {
    entries: Vec<Arrival>,
    nominal_rate_bps: f64,
}

impl ArrivalSchedule {
    pub fn from_pairs(pairs: Vec<(u64, u64)>, nominal_rate_bps: f64) -> Result<Self> {
        let entries: Vec<Arrival> = pairs
            .into_iter()
            .map(|(t_us, size_bits)| Arrival { t_us, size_bits })
            .collect();
        for pair in entries.windows(2) {
            if pair[1].t_us < pair[0].t_us {
                return Err(Error::domain("arrivals must be sorted by time"));
            }
        }
        if entries.iter().any(|a| a.size_bits == 0) {
            return Err(Error::domain("packet sizes must be positive"));
        }
        Ok(ArrivalSchedule {
            entries,
            nominal_rate_bps,
        })
    }

    pub fn entries(&self) -> &[Arrival] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nominal_rate_bps(&self) -> f64 {
        self.nominal_rate_bps
    }

    pub fn total_bits(&self) -> u64 {
        self.entries.iter().map(|a| a.size_bits).sum()
    }

    pub fn realized_rate_bps(&self, horizon_us: u64) -> f64 {
        if horizon_us == 0 {
            return 0.0;
        }
        self.total_bits() as f64 * 1e6 / horizon_us as f64
    }
}

/// Poisson process: exponential inter-arrivals with mean
/// `packet_bits / rate_bps`. Rounding collisions are pushed forward one
/// microsecond, keeping times strictly increasing.
pub fn poisson_arrivals(
    rate_bps: f64,
    packet_bits: u64,
    horizon_us: u64,
    seed: u64,
) -> Result<ArrivalSchedule> {
    if !(rate_bps > 0.0) {
        return Err(Error::domain(format!("arrival rate {rate_bps} must be > 0")));
    }
    if packet_bits == 0 {
        return Err(Error::domain("packet size must be positive"));
    }
    let mean_us = packet_bits as f64 / rate_bps * 1e6;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = 0.0_f64;
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    loop {
        let u: f64 = rng.random();
        t += -mean_us * (1.0 - u).ln();
        if t >= horizon_us as f64 {
            break;
        }
        let mut t_us = t.round() as u64;
        if let Some(last) = pairs.last() {
            if t_us <= last.0 {
                t_us = last.0 + 1;
            }
        }
        if t_us >= horizon_us {
            break;
        }
        pairs.push((t_us, packet_bits));
    }
    ArrivalSchedule::from_pairs(pairs, rate_bps)
}

/// Batched video-frame traffic: one batch per frame at `k / fps`, with the
/// fractional batch size carried across batches so the long-run average is
/// exact. Packets within a batch share their arrival microsecond.
pub fn batched_arrivals(
    rate_bps: f64,
    fps: f64,
    packet_bits: u64,
    horizon_us: u64,
) -> Result<ArrivalSchedule> {
    if !(fps > 0.0) {
        return Err(Error::domain(format!("frame rate {fps} must be > 0")));
    }
    if !(rate_bps > 0.0) || packet_bits == 0 {
        return Err(Error::domain("rate and packet size must be positive"));
    }
    let per_batch = rate_bps / (fps * packet_bits as f64);
    let mut carry = 0.0_f64;
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    let mut k = 0u64;
    loop {
        let t_us = (k as f64 * 1e6 / fps).round() as u64;
        if t_us >= horizon_us {
            break;
        }
        carry += per_batch;
        let n = carry.floor() as u64;
        carry -= n as f64;
        for _ in 0..n {
            pairs.push((t_us, packet_bits));
        }
        k += 1;
    }
    ArrivalSchedule::from_pairs(pairs, rate_bps)
}

/// Fully-backlogged schedule: enough packets at t = 0 that the queue cannot
/// drain within the horizon even with every channel of a bonded link open.
pub fn saturated_arrivals(timing: &TimingConfig, horizon_us: u64, channels: usize) -> ArrivalSchedule {
    let min_cycle = timing.difs_us + timing.tx_us;
    let n = (horizon_us / min_cycle + 2) * channels.max(1) as u64;
    let entries = (0..n)
        .map(|_| Arrival {
            t_us: 0,
            size_bits: timing.packet_bits,
        })
        .collect();
    ArrivalSchedule {
        entries,
        nominal_rate_bps: 0.0,
    }
}

/// Reads a replay file: header `arrivals=<int>`, then `t_us,size_bits` lines.
pub fn load_replay(path: &Path) -> Result<ArrivalSchedule> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Format {
        path: path.into(),
        reason: "empty replay file".into(),
    })?;
    let count: usize = header
        .strip_prefix("arrivals=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::Format {
            path: path.into(),
            reason: format!("bad header {header:?}, expected arrivals=<int>"),
        })?;
    let mut pairs = Vec::with_capacity(count);
    let mut total_bits = 0u64;
    for (line_no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let parse = |tok: Option<&str>| -> Result<u64> {
            tok.and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::Parse {
                    path: path.into(),
                    line: line_no + 1,
                    reason: format!("expected t_us,size_bits, found {line:?}"),
                })
        };
        let mut fields = line.split(',');
        let t_us = parse(fields.next())?;
        let size_bits = parse(fields.next())?;
        total_bits += size_bits;
        pairs.push((t_us, size_bits));
    }
    if pairs.len() != count {
        return Err(Error::Format {
            path: path.into(),
            reason: format!("header says {count} arrivals, file has {}", pairs.len()),
        });
    }
    let span_us = pairs.last().map(|p| p.0).unwrap_or(0).max(1);
    let rate = total_bits as f64 * 1e6 / span_us as f64;
    ArrivalSchedule::from_pairs(pairs, rate)
}

pub fn save_replay(path: &Path, schedule: &ArrivalSchedule) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "arrivals={}", schedule.len());
    for a in schedule.entries() {
        let _ = writeln!(out, "{},{}", a.t_us, a.size_bits);
    }
    fs::write(path, out)?;
    Ok(())
}
