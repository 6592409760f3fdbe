//! Cross-validates the interval-walking contention resolver against a
//! reference machine that steps the channel one microsecond at a time. The
//! reference is deliberately naive and shares no code with the fast path.

use mlo_sim::engine::{backoff_expiry, TimingConfig};
use mlo_sim::trace::BinaryTrace;
use proptest::prelude::*;

/// Microsecond-stepping DCF reference: sense DIFS of continuous idle, then
/// decrement once per fully idle 10 µs backoff slot, freezing on busy and
/// re-sensing DIFS. Returns the expiry instant, or None past `cap_us`.
fn stepped_expiry(
    trace: &BinaryTrace,
    t_start_us: u64,
    draw: u32,
    timing: &TimingConfig,
    cap_us: u64,
) -> Option<u64> {
    enum Phase {
        Difs { idle_us: u64 },
        Count { slot_progress_us: u64 },
    }
    let mut phase = Phase::Difs { idle_us: 0 };
    let mut counter = draw as u64;
    let mut t = t_start_us;
    loop {
        if t >= cap_us {
            return None;
        }
        let busy = trace.looped_slot(t);
        match &mut phase {
            Phase::Difs { idle_us } => {
                if busy {
                    *idle_us = 0;
                } else {
                    *idle_us += 1;
                    if *idle_us == timing.difs_us {
                        if counter == 0 {
                            return Some(t + 1);
                        }
                        phase = Phase::Count { slot_progress_us: 0 };
                    }
                }
            }
            Phase::Count { slot_progress_us } => {
                if busy {
                    phase = Phase::Difs { idle_us: 0 };
                } else {
                    *slot_progress_us += 1;
                    if *slot_progress_us == timing.slot_us {
                        counter -= 1;
                        if counter == 0 {
                            return Some(t + 1);
                        }
                        *slot_progress_us = 0;
                    }
                }
            }
        }
        t += 1;
    }
}

fn timing() -> TimingConfig {
    TimingConfig::default()
}

#[test]
fn reference_reproduces_the_hand_stepped_interruption_case() {
    // Busy over [70, 90): DIFS 30, four decrements to t=70, freeze with one
    // slot left, re-DIFS over [90, 120), final decrement at 130.
    let mut slots = vec![false; 100];
    slots[7] = true;
    slots[8] = true;
    let t = BinaryTrace::from_slots(0, slots).unwrap();
    assert_eq!(stepped_expiry(&t, 0, 5, &timing(), 1_000_000), Some(130));
    assert_eq!(backoff_expiry(&t, 0, 5, &timing(), 1_000_000), Some(130));
}

#[test]
fn reference_and_fast_path_agree_on_edge_traces() {
    let cases: Vec<Vec<bool>> = vec![
        vec![false; 8],                              // always idle
        vec![true; 8],                               // always busy
        (0..40).map(|i| i % 2 == 0).collect(),       // no DIFS window
        (0..40).map(|i| i % 4 == 0).collect(),       // 3-slot idle runs only
        (0..60).map(|i| i % 5 == 0).collect(),       // 4-slot idle runs
        vec![true, false, false, false, false, true], // window straddles wrap
    ];
    for slots in cases {
        let trace = BinaryTrace::from_slots(0, slots.clone()).unwrap();
        for t_start in [0u64, 7, 252, 1001] {
            for draw in [0u32, 1, 5, 15] {
                let cap = t_start + 100_000;
                assert_eq!(
                    backoff_expiry(&trace, t_start, draw, &timing(), cap),
                    stepped_expiry(&trace, t_start, draw, &timing(), cap),
                    "slots={slots:?} t_start={t_start} draw={draw}"
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn fast_path_matches_microsecond_reference(
        occupancy in 0.05f64..0.95,
        len in 1usize..150,
        raw in prop::collection::vec(0.0f64..1.0, 150),
        t_start in 0u64..5_000,
        draw in 0u32..=15,
    ) {
        let slots: Vec<bool> = raw[..len].iter().map(|&u| u < occupancy).collect();
        let trace = BinaryTrace::from_slots(0, slots).unwrap();
        let cap = t_start + 60_000;
        let fast = backoff_expiry(&trace, t_start, draw, &timing(), cap);
        let slow = stepped_expiry(&trace, t_start, draw, &timing(), cap);
        prop_assert_eq!(fast, slow);
        if let Some(e) = fast {
            // Expiry always lands at least a DIFS after sensing starts.
            prop_assert!(e >= t_start + 30);
            prop_assert!(e <= cap);
        }
    }
}
