//! Deterministic draw derivation.
//!
//! Every random decision in a run is a pure function of the run seed, a
//! domain tag, and the decision's own index. Keying backoff draws by
//! (link, packet/instance id) rather than consuming a shared sequential
//! stream is what makes paired-policy comparisons exact: two policies fed
//! the same seed see the same draw for the same contention head.

/// Domain tags keeping unrelated decision families statistically disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// Backoff counter draws, keyed by (link, head packet or instance id).
    Backoff = 1,
    /// Fair-coin tie breaks, keyed by packet id.
    Coin = 2,
    /// Trace sample selection in the experiment harness.
    TracePick = 3,
    /// Arrival-schedule seeds in the experiment harness.
    Arrivals = 4,
    /// Per-run engine seeds in the experiment harness.
    Run = 5,
    /// Candidate seeds when synthesizing binned trace pools.
    Synth = 6,
}

/// SplitMix64 finalizer; full-avalanche mixing of a 64-bit word.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a well-mixed word from (seed, domain, a, b).
pub fn derive(seed: u64, domain: Domain, a: u64, b: u64) -> u64 {
    let mut z = mix64(seed ^ 0x9e37_79b9_7f4a_7c15);
    z = mix64(z ^ (domain as u64).wrapping_mul(0xff51_afd7_ed55_8ccd));
    z = mix64(z ^ a.wrapping_mul(0xc4ce_b9fe_1a85_ec53));
    mix64(z ^ b)
}

/// Uniform backoff draw in {0, ..., cw_min} for a contention head.
///
/// `head` is the packet id whose contention this is (or the backoff-instance
/// index for deferred-decision scheduling, where instances are unallocated).
pub fn backoff_draw(seed: u64, link: usize, head: u64, cw_min: u32) -> u32 {
    let word = derive(seed, Domain::Backoff, link as u64, head);
    (word % (cw_min as u64 + 1)) as u32
}

/// Fair coin for interface tie breaks; true picks the primary.
pub fn coin(seed: u64, packet: u64) -> bool {
    derive(seed, Domain::Coin, packet, 0) & 1 == 0
}
