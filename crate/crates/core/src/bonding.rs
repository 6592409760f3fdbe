//! Channel bonding with preamble puncturing: a link carries 1, 2, or 4
//! 20 MHz channels; backoff runs on the primary channel and secondaries are
//! admitted per-TXOP if idle for a PIFS before the backoff expiry.

use crate::error::{Error, Result};
use crate::trace::BinaryTrace;

/// One radio link: an ordered set of 20 MHz channels plus the index of the
/// channel carrying the backoff.
#[derive(Debug, Clone)]
pub struct BondedLink {
    channels: Vec<BinaryTrace>,
    primary_index: usize,
}

impl BondedLink {
    pub fn new(channels: Vec<BinaryTrace>, primary_index: usize) -> Result<Self> {
        if !matches!(channels.len(), 1 | 2 | 4) {
            return Err(Error::config(format!(
                "a bonded link carries 1, 2, or 4 channels (20/40/80 MHz), got {}",
                channels.len()
            )));
        }
        if primary_index >= channels.len() {
            return Err(Error::config(format!(
                "primary index {primary_index} out of range for {} channels",
                channels.len()
            )));
        }
        Ok(BondedLink {
            channels,
            primary_index,
        })
    }

    /// An unbonded 20 MHz link.
    pub fn single(trace: BinaryTrace) -> Self {
        BondedLink {
            channels: vec![trace],
            primary_index: 0,
        }
    }

    pub fn channels(&self) -> &[BinaryTrace] {
        &self.channels
    }

    pub fn primary_index(&self) -> usize {
        self.primary_index
    }

    /// The channel the backoff senses.
    pub fn primary(&self) -> &BinaryTrace {
        &self.channels[self.primary_index]
    }

    pub fn width_mhz(&self) -> u32 {
        20 * self.channels.len() as u32
    }

    /// Re-points the primary at the least-occupied channel.
    pub fn with_dynamic_primary(mut self) -> Self {
        self.primary_index = select_primary(&self.channels);
        self
    }
}

/// Least-occupied channel index; ties resolve to the lowest index.
pub fn select_primary(channels: &[BinaryTrace]) -> usize {
    let mut best = 0;
    for (i, ch) in channels.iter().enumerate().skip(1) {
        if ch.occupancy() < channels[best].occupancy() {
            best = i;
        }
    }
    best
}

/// Channels usable for the TXOP starting at `expiry_us`: the primary plus
/// every secondary idle throughout the PIFS window ending at the expiry.
/// The set may be non-contiguous.
pub fn punctured_txop(link: &BondedLink, expiry_us: u64, pifs_us: u64) -> Vec<usize> {
    let window_start = expiry_us.saturating_sub(pifs_us);
    link.channels
        .iter()
        .enumerate()
        .filter(|(i, ch)| {
            *i == link.primary_index || ch.idle_during(window_start, expiry_us)
        })
        .map(|(i, _)| i)
        .collect()
}

/// Packets carried by one fixed-duration TXOP over `n_channels` open
/// channels: capacity scales linearly with width, clipped by the queue.
pub fn txop_payload(n_channels: usize, queue_len: usize) -> Result<usize> {
    if n_channels == 0 {
        return Err(Error::internal("TXOP with zero open channels"));
    }
    if queue_len == 0 {
        return Err(Error::internal("TXOP triggered with an empty queue"));
    }
    Ok(n_channels.min(queue_len))
}
