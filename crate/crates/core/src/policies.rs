//! The four channel-access policies mapping queued packets to interfaces.
//!
//! All policies consume the primary link's backoff draws keyed by the head
//! packet id (or, for deferred decision, by a per-interface instance index).
//! Keyed draws make paired runs comparable: feeding two policies the same
//! seed gives the same draw whenever the same packet heads a contention,
//! which is what makes the single-link vs. synchronized-dual comparison a
//! per-packet guarantee rather than a statistical one.

use serde::{Deserialize, Serialize};

use crate::bonding::{punctured_txop, txop_payload, BondedLink};
use crate::engine::{backoff_expiry, LinkRole, PacketRecord, TimingConfig};
use crate::error::{Error, Result};
use crate::seeding;
use crate::traffic::ArrivalSchedule;

/// Channel-access policy selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PolicyId {
    /// Single-link operation: only the primary interface is used.
    #[serde(rename = "slo")]
    Slo,
    /// Simultaneous transmit and receive: interfaces operate independently;
    /// the head packet binds to the first interface that becomes available.
    #[serde(rename = "str")]
    MloStr,
    /// Non-simultaneous transmit and receive: only the primary contends; the
    /// secondary joins a transmission if idle for a PIFS before the expiry.
    #[serde(rename = "nstr")]
    MloNstr,
    /// Deferred decision: unallocated backoff instances run per interface and
    /// the head packet binds to whichever expires first.
    #[serde(rename = "str+")]
    MloStrPlus,
}

impl PolicyId {
    pub const ALL: [PolicyId; 4] = [
        PolicyId::Slo,
        PolicyId::MloStr,
        PolicyId::MloNstr,
        PolicyId::MloStrPlus,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PolicyId::Slo => "slo",
            PolicyId::MloStr => "str",
            PolicyId::MloNstr => "nstr",
            PolicyId::MloStrPlus => "str+",
        }
    }
}

impl std::fmt::Display for PolicyId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PolicyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "slo" => Ok(PolicyId::Slo),
            "str" => Ok(PolicyId::MloStr),
            "nstr" => Ok(PolicyId::MloNstr),
            "str+" | "strplus" => Ok(PolicyId::MloStrPlus),
            other => Err(Error::config(format!(
                "unknown policy {other:?}; expected slo, str, nstr, or str+"
            ))),
        }
    }
}

/// Decides whether the secondary link may join a synchronized transmission:
/// its sensing channel must be idle throughout the PIFS window ending at the
/// primary's backoff expiry.
pub fn nstr_secondary_joins(secondary: &BondedLink, expiry_us: u64, pifs_us: u64) -> bool {
    secondary
        .primary()
        .idle_during(expiry_us.saturating_sub(pifs_us), expiry_us)
}

pub(crate) fn execute(
    policy: PolicyId,
    links: &[BondedLink],
    arrivals: &ArrivalSchedule,
    timing: &TimingConfig,
    seed: u64,
    horizon_us: u64,
) -> Result<Vec<PacketRecord>> {
    let mut state = RunState::new(links, arrivals, timing, seed, horizon_us);
    match policy {
        PolicyId::Slo => run_slo(&mut state)?,
        PolicyId::MloStr => run_str(&mut state)?,
        PolicyId::MloNstr => run_nstr(&mut state)?,
        PolicyId::MloStrPlus => run_str_plus(&mut state)?,
    }
    Ok(state.records)
}

/// Shared bookkeeping for one run: the FIFO queue cursor, per-interface
/// transmission log, and record stamping.
struct RunState<'a> {
    links: &'a [BondedLink],
    timing: &'a TimingConfig,
    seed: u64,
    /// Latest admissible backoff expiry: a transmission must complete by the
    /// horizon, so expiries past `horizon - tx_us` never start a TXOP.
    cap_us: u64,
    arrival_times: Vec<u64>,
    records: Vec<PacketRecord>,
    /// Index of the first packet not yet bound to any transmission.
    cursor: usize,
    last_tx_end: Vec<Option<u64>>,
}

impl<'a> RunState<'a> {
    fn new(
        links: &'a [BondedLink],
        arrivals: &ArrivalSchedule,
        timing: &'a TimingConfig,
        seed: u64,
        horizon_us: u64,
    ) -> Self {
        let records: Vec<PacketRecord> = arrivals
            .entries()
            .iter()
            .enumerate()
            .map(|(i, a)| PacketRecord::queued(i as u64, a.size_bits, a.t_us))
            .collect();
        RunState {
            links,
            timing,
            seed,
            cap_us: horizon_us.saturating_sub(timing.tx_us),
            arrival_times: arrivals.entries().iter().map(|a| a.t_us).collect(),
            records,
            cursor: 0,
            last_tx_end: vec![None; links.len()],
        }
    }

    fn n_packets(&self) -> usize {
        self.records.len()
    }

    fn arrival(&self, packet: usize) -> u64 {
        self.arrival_times[packet]
    }

    /// Packets at or behind the cursor that have arrived by `t`.
    fn queued_at(&self, t_us: u64) -> usize {
        self.arrival_times[self.cursor..].partition_point(|&a| a <= t_us)
    }

    /// Resolves a contention on `link`'s sensing channel with the draw keyed
    /// by (link, head).
    fn contend(&self, link: usize, t_start_us: u64, head_key: u64) -> Option<u64> {
        let draw = seeding::backoff_draw(self.seed, link, head_key, self.timing.cw_min);
        backoff_expiry(
            self.links[link].primary(),
            t_start_us,
            draw,
            self.timing,
            self.cap_us,
        )
    }

    fn assign(&mut self, packet: usize, t_us: u64, link: usize) {
        let rec = &mut self.records[packet];
        rec.t_assigned_us = Some(t_us);
        rec.interface = Some(LinkRole::from_index(link));
    }

    /// Stamps one TXOP on `link`: all packets share the start and end, and
    /// packets pulled into the TXOP without a prior assignment are assigned
    /// at the transmission start.
    fn transmit(&mut self, link: usize, t_start_us: u64, packets: &[usize]) -> Result<u64> {
        let end = t_start_us + self.timing.tx_us;
        if let Some(prev_end) = self.last_tx_end[link] {
            if t_start_us < prev_end {
                return Err(Error::internal(format!(
                    "overlapping transmissions on link {link}: start {t_start_us} < previous end {prev_end}"
                )));
            }
        }
        self.last_tx_end[link] = Some(end);
        for &p in packets {
            let rec = &mut self.records[p];
            if rec.t_assigned_us.is_none() {
                rec.t_assigned_us = Some(t_start_us);
            }
            rec.t_tx_start_us = Some(t_start_us);
            rec.t_tx_end_us = Some(end);
            rec.interface = Some(LinkRole::from_index(link));
        }
        Ok(end)
    }

    /// Head plus as many queued followers as the open channels can carry.
    fn txop_packets(&mut self, link: usize, expiry_us: u64, head: usize) -> Result<Vec<usize>> {
        let open = punctured_txop(&self.links[link], expiry_us, self.timing.pifs_us);
        let waiting = 1 + self.queued_at(expiry_us);
        let n = txop_payload(open.len(), waiting)?;
        let mut ids = vec![head];
        for k in 0..n - 1 {
            ids.push(self.cursor + k);
        }
        self.cursor += n - 1;
        Ok(ids)
    }
}

/// Sequential transmission over the primary interface only.
fn run_slo(st: &mut RunState) -> Result<()> {
    let mut avail = 0u64;
    while st.cursor < st.n_packets() {
        let head = st.cursor;
        st.cursor += 1;
        let start = st.arrival(head).max(avail);
        st.assign(head, start, 0);
        let Some(expiry) = st.contend(0, start, head as u64) else {
            break;
        };
        let ids = st.txop_packets(0, expiry, head)?;
        avail = st.transmit(0, expiry, &ids)?;
    }
    Ok(())
}

/// Independent interfaces; the head packet binds to the first that becomes
/// available and carries out its backoff there even if the link is busy.
fn run_str(st: &mut RunState) -> Result<()> {
    #[derive(Clone, Copy)]
    enum If {
        Free { at: u64 },
        Contending { head: usize, expiry: u64 },
        /// Bound packet cannot transmit within the horizon.
        Stalled,
    }
    let mut ifaces: Vec<If> = st.links.iter().map(|_| If::Free { at: 0 }).collect();
    loop {
        let next_expiry = ifaces
            .iter()
            .enumerate()
            .filter_map(|(i, f)| match f {
                If::Contending { expiry, .. } => Some((*expiry, i)),
                _ => None,
            })
            .min();
        let next_assign = if st.cursor < st.n_packets() {
            let arrival = st.arrival(st.cursor);
            let mut candidates: Vec<(u64, usize)> = ifaces
                .iter()
                .enumerate()
                .filter_map(|(i, f)| match f {
                    If::Free { at } => Some((arrival.max(*at), i)),
                    _ => None,
                })
                .collect();
            candidates.sort();
            match candidates.as_slice() {
                [] => None,
                [only] => Some(*only),
                [a, b, ..] if a.0 == b.0 => {
                    // Both interfaces available at the same instant.
                    let pick_first = seeding::coin(st.seed, st.cursor as u64);
                    Some(if pick_first { *a } else { *b })
                }
                [a, ..] => Some(*a),
            }
        } else {
            None
        };
        // Expiries resolve before same-instant assignments so a TXOP sees
        // the queue as of its start.
        let take_expiry = match (next_expiry, next_assign) {
            (None, None) => break,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (Some((t_e, _)), Some((t_a, _))) => t_e <= t_a,
        };
        if take_expiry {
            let (_, i) = next_expiry.unwrap();
            let If::Contending { head, expiry } = ifaces[i] else {
                unreachable!()
            };
            let ids = st.txop_packets(i, expiry, head)?;
            let end = st.transmit(i, expiry, &ids)?;
            ifaces[i] = If::Free { at: end };
        } else {
            let (t, i) = next_assign.unwrap();
            let head = st.cursor;
            st.cursor += 1;
            st.assign(head, t, i);
            ifaces[i] = match st.contend(i, t, head as u64) {
                Some(expiry) => If::Contending { head, expiry },
                None => If::Stalled,
            };
        }
        if ifaces.iter().all(|f| matches!(f, If::Stalled)) {
            break;
        }
    }
    Ok(())
}

/// Primary-driven contention; the secondary is slaved to the primary's
/// backoff expiry and only joins when idle for a PIFS beforehand.
fn run_nstr(st: &mut RunState) -> Result<()> {
    let mut avail = 0u64;
    while st.cursor < st.n_packets() {
        let head = st.cursor;
        st.cursor += 1;
        let start = st.arrival(head).max(avail);
        st.assign(head, start, 0);
        let Some(expiry) = st.contend(0, start, head as u64) else {
            break;
        };
        let primary_ids = st.txop_packets(0, expiry, head)?;
        let mut end = st.transmit(0, expiry, &primary_ids)?;
        if let Some(secondary) = st.links.get(1) {
            if nstr_secondary_joins(secondary, expiry, st.timing.pifs_us) && st.queued_at(expiry) > 0 {
                let open = punctured_txop(secondary, expiry, st.timing.pifs_us);
                let n = txop_payload(open.len(), st.queued_at(expiry))?;
                let ids: Vec<usize> = (st.cursor..st.cursor + n).collect();
                st.cursor += n;
                end = st.transmit(1, expiry, &ids)?.max(end);
            }
        }
        avail = end;
    }
    Ok(())
}

/// Deferred decision: each non-transmitting interface runs an unallocated
/// backoff instance while packets wait; the head packet binds to whichever
/// instance expires first, at which point its access delay is zero by
/// construction.
fn run_str_plus(st: &mut RunState) -> Result<()> {
    #[derive(Clone, Copy)]
    enum If {
        Free,
        /// None: this instance cannot expire within the horizon.
        Running { expiry: Option<u64> },
        Transmitting { until: u64 },
    }
    let n_links = st.links.len();
    let mut ifaces = vec![If::Free; n_links];
    let mut instance_count = vec![0u64; n_links];
    let mut next_arrival_idx = 0usize; // next arrival not yet processed as an event

    loop {
        let mut next: Option<u64> = None;
        let mut consider = |t: Option<u64>| {
            if let Some(t) = t {
                next = Some(next.map_or(t, |n: u64| n.min(t)));
            }
        };
        if next_arrival_idx < st.n_packets() {
            consider(Some(st.arrival(next_arrival_idx)));
        }
        for f in &ifaces {
            match f {
                If::Running { expiry } => consider(*expiry),
                If::Transmitting { until } => consider(Some(*until)),
                If::Free => {}
            }
        }
        let Some(t) = next else { break };

        while next_arrival_idx < st.n_packets() && st.arrival(next_arrival_idx) <= t {
            next_arrival_idx += 1;
        }
        for f in ifaces.iter_mut() {
            if matches!(f, If::Transmitting { until } if *until == t) {
                *f = If::Free;
            }
        }

        // Expiring instances claim the head packet; simultaneous expiries are
        // ordered by a fair coin keyed on the packet they contend for.
        let mut expiring: Vec<usize> = (0..n_links)
            .filter(|&i| matches!(ifaces[i], If::Running { expiry: Some(e) } if e == t))
            .collect();
        if expiring.len() == 2 && !seeding::coin(st.seed, st.cursor as u64) {
            expiring.swap(0, 1);
        }
        for i in expiring {
            if st.cursor < st.n_packets() && st.arrival(st.cursor) <= t {
                let head = st.cursor;
                st.cursor += 1;
                let ids = st.txop_packets(i, t, head)?;
                let until = st.transmit(i, t, &ids)?;
                ifaces[i] = If::Transmitting { until };
            } else {
                // The queue emptied before this instance expired.
                ifaces[i] = If::Free;
            }
        }

        let queue_waiting = st.cursor < st.n_packets() && st.arrival(st.cursor) <= t;
        for (i, f) in ifaces.iter_mut().enumerate() {
            if queue_waiting {
                if matches!(f, If::Free) {
                    let key = instance_count[i];
                    instance_count[i] += 1;
                    *f = If::Running {
                        expiry: st.contend(i, t, key),
                    };
                }
            } else if matches!(f, If::Running { .. }) {
                // Instances are cancelled when the queue empties; the next
                // arrival starts fresh ones.
                *f = If::Free;
            }
        }
    }
    Ok(())
}
