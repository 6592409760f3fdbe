//! Per-packet delay decomposition and per-experiment aggregates.
//!
//! Total delay runs from arrival to the end of reception, so it includes the
//! transmission itself: queueing + access + tx_us = total. Percentiles use
//! the nearest-rank definition (no interpolation) and jitter is the
//! population standard deviation, both chosen for bit-stability.

use crate::engine::PacketRecord;

/// Delay components of one delivered packet, in microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DelayBreakdown {
    /// Arrival to interface assignment.
    pub queueing_us: u64,
    /// Assignment to the start of transmission (contention time).
    pub access_us: u64,
    /// Arrival to the end of reception.
    pub total_us: u64,
}

/// Splits a delivered record into queueing/access/total; None for packets
/// that never completed a transmission (they still count against
/// delivered_fraction).
pub fn decompose(record: &PacketRecord) -> Option<DelayBreakdown> {
    let assigned = record.t_assigned_us?;
    let tx_start = record.t_tx_start_us?;
    let tx_end = record.t_tx_end_us?;
    Some(DelayBreakdown {
        queueing_us: assigned - record.t_arrival_us,
        access_us: tx_start - assigned,
        total_us: tx_end - record.t_arrival_us,
    })
}

/// Aggregates for one seeded run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub throughput_bps: f64,
    pub mean_delay_us: Option<f64>,
    pub p95_delay_us: Option<u64>,
    /// Population standard deviation of total delay.
    pub jitter_us: Option<f64>,
    pub mean_queueing_us: Option<f64>,
    pub p95_queueing_us: Option<u64>,
    pub mean_access_us: Option<f64>,
    pub p95_access_us: Option<u64>,
    pub delivered_fraction: f64,
    /// The stability criterion: at least 95% of packets delivered.
    pub stable: bool,
}

/// Nearest-rank percentile: the ceil(q/100 * n)-th order statistic.
/// Integer arithmetic keeps the rank exact across platforms.
pub fn percentile_nearest_rank(sorted: &[u64], q: u32) -> u64 {
    debug_assert!(!sorted.is_empty() && q >= 1 && q <= 100);
    debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
    let n = sorted.len();
    let rank = (q as usize * n).div_ceil(100);
    sorted[rank - 1]
}

fn mean(values: &[u64]) -> f64 {
    values.iter().map(|&v| v as f64).sum::<f64>() / values.len() as f64
}

fn population_std(values: &[u64]) -> f64 {
    let m = mean(values);
    let var = values
        .iter()
        .map(|&v| {
            let d = v as f64 - m;
            d * d
        })
        .sum::<f64>()
        / values.len() as f64;
    var.sqrt()
}

/// Folds one run's records into an ExperimentSummary. Throughput counts
/// delivered bits over the horizon; delay statistics cover delivered packets
/// only; delivered_fraction spans every arrival.
pub fn summarize(records: &[PacketRecord], horizon_us: u64) -> ExperimentSummary {
    let breakdowns: Vec<(u64, DelayBreakdown)> = records
        .iter()
        .filter_map(|r| decompose(r).map(|b| (r.size_bits, b)))
        .collect();
    let delivered = breakdowns.len();
    let delivered_fraction = if records.is_empty() {
        1.0
    } else {
        delivered as f64 / records.len() as f64
    };
    let delivered_bits: u64 = breakdowns.iter().map(|(bits, _)| bits).sum();
    let throughput_bps = if horizon_us == 0 {
        0.0
    } else {
        delivered_bits as f64 * 1e6 / horizon_us as f64
    };

    let mut summary = ExperimentSummary {
        throughput_bps,
        mean_delay_us: None,
        p95_delay_us: None,
        jitter_us: None,
        mean_queueing_us: None,
        p95_queueing_us: None,
        mean_access_us: None,
        p95_access_us: None,
        delivered_fraction,
        stable: delivered_fraction >= 0.95,
    };
    if delivered == 0 {
        return summary;
    }

    let mut totals: Vec<u64> = breakdowns.iter().map(|(_, b)| b.total_us).collect();
    let mut queueing: Vec<u64> = breakdowns.iter().map(|(_, b)| b.queueing_us).collect();
    let mut access: Vec<u64> = breakdowns.iter().map(|(_, b)| b.access_us).collect();
    totals.sort_unstable();
    queueing.sort_unstable();
    access.sort_unstable();

    summary.mean_delay_us = Some(mean(&totals));
    summary.p95_delay_us = Some(percentile_nearest_rank(&totals, 95));
    summary.jitter_us = Some(population_std(&totals));
    summary.mean_queueing_us = Some(mean(&queueing));
    summary.p95_queueing_us = Some(percentile_nearest_rank(&queueing, 95));
    summary.mean_access_us = Some(mean(&access));
    summary.p95_access_us = Some(percentile_nearest_rank(&access, 95));
    summary
}

/// Empirical CDF with one step per distinct value.
pub fn export_cdf(values: &[f64]) -> Vec<(f64, f64)> {
    if values.is_empty() {
        return Vec::new();
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        let frac = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 = frac,
            _ => out.push((v, frac)),
        }
    }
    out
}
