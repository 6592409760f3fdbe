//! Deterministic microsecond-clock channel-access core.
//!
//! The clock is integer microseconds; channel state is piecewise-constant
//! over 10 µs trace slots. Transmissions last `tx_us` (172 µs by default)
//! without rounding to the slot grid, so backoff slots tile from wherever
//! DIFS sensing completes rather than from trace-slot boundaries.
//!
//! Contention follows the hinder interaction model: environment activity
//! defers to an ongoing own transmission, so there are no collisions and the
//! contention window never escalates.

use crate::bonding::BondedLink;
use crate::error::{Error, Result};
use crate::policies::{self, PolicyId};
use crate::trace::BinaryTrace;
use crate::traffic::ArrivalSchedule;

/// MAC timing constants, all in integer microseconds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimingConfig {
    pub slot_us: u64,
    pub sifs_us: u64,
    pub difs_us: u64,
    pub pifs_us: u64,
    /// Duration of one PPDU exchange (DATA + SIFS + ACK).
    pub tx_us: u64,
    /// Backoff drawn uniformly from {0, ..., cw_min}; no exponential growth
    /// because the hinder model rules out collisions.
    pub cw_min: u32,
    pub packet_bits: u64,
}

impl Default for TimingConfig {
    fn default() -> Self {
        TimingConfig {
            slot_us: 10,
            sifs_us: 10,
            difs_us: 30,
            pifs_us: 20,
            tx_us: 172,
            cw_min: 15,
            packet_bits: 12_000,
        }
    }
}

impl TimingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.slot_us == 0 || self.sifs_us == 0 || self.tx_us == 0 || self.packet_bits == 0 {
            return Err(Error::config("timing constants must be positive"));
        }
        if self.difs_us != self.sifs_us + 2 * self.slot_us {
            return Err(Error::config("DIFS must equal SIFS + 2 slots"));
        }
        if self.pifs_us != self.sifs_us + self.slot_us {
            return Err(Error::config("PIFS must equal SIFS + 1 slot"));
        }
        Ok(())
    }

    /// Mean saturated cycle on an always-idle link:
    /// DIFS + (CW_min / 2) slots + TX.
    pub fn mean_cycle_us(&self) -> f64 {
        self.difs_us as f64 + self.cw_min as f64 / 2.0 * self.slot_us as f64 + self.tx_us as f64
    }
}

/// Which radio a packet went out on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkRole {
    Primary,
    Secondary,
}

impl LinkRole {
    pub fn from_index(i: usize) -> LinkRole {
        if i == 0 {
            LinkRole::Primary
        } else {
            LinkRole::Secondary
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            LinkRole::Primary => "primary",
            LinkRole::Secondary => "secondary",
        }
    }
}

impl std::fmt::Display for LinkRole {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Contention state of one radio interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Idle,
    /// Sensing + backoff, resolved in closed form: the expiry is known the
    /// moment contention starts. None means the countdown cannot complete
    /// within the run horizon.
    Contending { expiry_us: Option<u64> },
    Transmitting { until_us: u64 },
}

/// One radio's scheduling state as seen by the policy layer.
#[derive(Debug, Clone)]
pub struct InterfaceState {
    pub role: LinkRole,
    pub phase: Phase,
    /// Head packet bound to this interface, if the policy binds on assignment.
    pub assigned_packet: Option<u64>,
}

impl InterfaceState {
    pub fn new(role: LinkRole) -> Self {
        InterfaceState {
            role,
            phase: Phase::Idle,
            assigned_packet: None,
        }
    }
}

/// Per-packet lifecycle timestamps; every delay metric derives from these.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PacketRecord {
    pub id: u64,
    pub size_bits: u64,
    pub t_arrival_us: u64,
    pub t_assigned_us: Option<u64>,
    pub t_tx_start_us: Option<u64>,
    pub t_tx_end_us: Option<u64>,
    pub interface: Option<LinkRole>,
}

impl PacketRecord {
    pub fn queued(id: u64, size_bits: u64, t_arrival_us: u64) -> Self {
        PacketRecord {
            id,
            size_bits,
            t_arrival_us,
            t_assigned_us: None,
            t_tx_start_us: None,
            t_tx_end_us: None,
            interface: None,
        }
    }

    /// Delivered within the run horizon.
    pub fn delivered(&self) -> bool {
        self.t_tx_end_us.is_some()
    }
}

/// Channel state as the interface senses it: environment activity is
/// overridden while the interface itself transmits (hinder model), so an
/// ongoing own transmission always completes.
pub fn channel_busy(trace: &BinaryTrace, t_us: u64, own_tx_active: bool) -> bool {
    !own_tx_active && trace.looped_slot(t_us)
}

/// Earliest time `c <= cap_us` such that the channel has been continuously
/// idle for `need_us` microseconds ending at `c`, sensing from `from_us`.
/// None if no such window exists within the cap (traces are periodic, so a
/// window absent for two full loops never appears).
pub fn wait_idle_window(
    trace: &BinaryTrace,
    from_us: u64,
    need_us: u64,
    cap_us: u64,
) -> Option<u64> {
    if need_us == 0 {
        return (from_us <= cap_us).then_some(from_us);
    }
    let give_up = from_us
        .saturating_add(2 * trace.period_us())
        .saturating_add(need_us);
    let mut t = from_us;
    loop {
        let start = trace.next_idle_us(t)?;
        if start > cap_us.saturating_sub(need_us) || start > give_up {
            return None;
        }
        let completion = start + need_us;
        match trace.next_busy_us(start) {
            None => return Some(completion),
            Some(busy) if busy >= completion => return Some(completion),
            Some(busy) => t = busy,
        }
    }
}

/// Resolves one full contention: wait for a DIFS of continuous idle, then
/// count the backoff down one idle slot at a time, freezing on busy and
/// re-sensing DIFS before resuming. Returns the expiry instant (the counter
/// reaching zero), or None if it cannot happen by `cap_us`.
///
/// Backoff slots tile contiguously from the DIFS completion; a slot only
/// decrements the counter if it is idle end to end, and a partial idle
/// remainder before a busy onset is discarded.
pub fn backoff_expiry(
    trace: &BinaryTrace,
    t_start_us: u64,
    draw: u32,
    timing: &TimingConfig,
    cap_us: u64,
) -> Option<u64> {
    let slot = timing.slot_us;
    let mut u = wait_idle_window(trace, t_start_us, timing.difs_us, cap_us)?;
    let mut remaining = draw as u64;
    if remaining == 0 {
        return Some(u);
    }
    // If no decrement lands within a full trace period plus one DIFS+slot,
    // the periodic channel never yields one.
    let stall_budget = trace.period_us() + timing.difs_us + slot;
    let mut last_progress = u;
    loop {
        match trace.next_busy_us(u) {
            None => {
                let expiry = u + remaining * slot;
                return (expiry <= cap_us).then_some(expiry);
            }
            Some(busy_at) => {
                let full_slots = (busy_at - u) / slot;
                if full_slots >= remaining {
                    let expiry = u + remaining * slot;
                    return (expiry <= cap_us).then_some(expiry);
                }
                remaining -= full_slots;
                if full_slots > 0 {
                    last_progress = u + full_slots * slot;
                }
                let resumed = wait_idle_window(trace, busy_at, timing.difs_us, cap_us)?;
                if resumed.saturating_sub(last_progress) > stall_budget {
                    return None;
                }
                u = resumed;
            }
        }
    }
}

/// Runs one seeded experiment: a pure function of its arguments.
///
/// `links[0]` is the primary link; `links[1]`, when present, the secondary.
/// Arrivals must be sorted and fall within the horizon. Every arrival yields
/// exactly one record; packets the policy could not deliver by the horizon
/// keep their transmission fields unset.
pub fn run(
    policy: PolicyId,
    links: &[BondedLink],
    arrivals: &ArrivalSchedule,
    timing: &TimingConfig,
    seed: u64,
    horizon_us: u64,
) -> Result<Vec<PacketRecord>> {
    timing.validate()?;
    if links.is_empty() || links.len() > 2 {
        return Err(Error::config(format!(
            "expected 1 or 2 links, got {}",
            links.len()
        )));
    }
    let ts = arrivals.entries();
    for pair in ts.windows(2) {
        if pair[1].t_us < pair[0].t_us {
            return Err(Error::config("arrivals must be sorted ascending"));
        }
    }
    if let Some(last) = ts.last() {
        if last.t_us > horizon_us {
            return Err(Error::config("horizon must cover the last arrival"));
        }
    }
    policies::execute(policy, links, arrivals, timing, seed, horizon_us)
}
