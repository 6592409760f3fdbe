use mlo_sim::bonding::BondedLink;
use mlo_sim::engine::{run, LinkRole, TimingConfig};
use mlo_sim::policies::PolicyId;
use mlo_sim::trace::gen_iid_trace;
use mlo_sim::traffic::saturated_arrivals;
use std::time::Instant;

fn measure(rho1: f64, rho2: f64, trace_slots: usize, horizon: u64, seed: u64) {
    let timing = TimingConfig::default();
    let links = [
        BondedLink::single(gen_iid_trace(rho1, trace_slots, 1000 + seed).unwrap()),
        BondedLink::single(gen_iid_trace(rho2, trace_slots, 2000 + seed).unwrap()),
    ];
    let n_backlog = ((horizon / 202 + 2) * 2).min(40_000);
    let arrivals = mlo_sim::traffic::ArrivalSchedule::from_pairs(
        (0..n_backlog).map(|_| (0u64, 12_000u64)).collect(), 0.0).unwrap();
    let _ = saturated_arrivals(&timing, 1, 1);
    let t0 = Instant::now();
    let slo = run(PolicyId::Slo, &links, &arrivals, &timing, seed, horizon).unwrap();
    let t_slo = t0.elapsed();
    let nstr = run(PolicyId::MloNstr, &links, &arrivals, &timing, seed, horizon).unwrap();
    let d_slo = slo.iter().filter(|r| r.delivered()).count();
    let cycles = nstr.iter().filter(|r| r.delivered() && r.interface == Some(LinkRole::Primary)).count();
    let duals = nstr.iter().filter(|r| r.delivered() && r.interface == Some(LinkRole::Secondary)).count();
    assert!(d_slo < arrivals.len(), "backlog exhausted");
    println!(
        "rho=({rho1},{rho2}) slots={trace_slots} horizon={:.0}s seed={seed}: slo={d_slo} cycle={:.1}ms join={:.3} ratio={:.3} ({:?}/run)",
        horizon as f64 / 1e6,
        horizon as f64 / 1000.0 / d_slo as f64,
        duals as f64 / cycles as f64,
        (cycles + duals) as f64 / d_slo as f64,
        t_slo
    );
}

fn main() {
    for seed in [0u64, 1, 2] {
        measure(0.9, 0.1, 100_000, 120_000_000, seed);
    }
    for seed in [0u64, 1] {
        measure(0.8, 0.1, 100_000, 40_000_000, seed);
    }
    measure(0.7, 0.1, 100_000, 10_000_000, 0);
    measure(0.5, 0.1, 100_000, 2_000_000, 0);
}
