//! Closed-form throughput baseline under i.i.d. per-slot channel activity,
//! used to validate the simulator.
//!
//! With per-link occupancies rho1/rho2, packet size L bits, and mean idle
//! cycle T (DIFS + half the contention window + TX):
//!   single link:       (1 - rho1) L / T
//!   independent dual:  (2 - rho1 - rho2) L / T
//!   synchronized dual: (1 - rho1)(2 - rho2) L / T

use crate::engine::TimingConfig;
use crate::error::{Error, Result};
use crate::policies::PolicyId;

/// Inputs to the closed-form model.
#[derive(Debug, Clone, PartialEq)]
pub struct IidParams {
    pub rho1: f64,
    pub rho2: f64,
    pub packet_bits: u64,
    /// Mean saturated cycle in microseconds (277 under default timing).
    pub cycle_us: f64,
}

impl Default for IidParams {
    fn default() -> Self {
        IidParams {
            rho1: 0.0,
            rho2: 0.0,
            packet_bits: 12_000,
            cycle_us: TimingConfig::default().mean_cycle_us(),
        }
    }
}

impl IidParams {
    pub fn new(rho1: f64, rho2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho1) || !(0.0..=1.0).contains(&rho2) {
            return Err(Error::domain("occupancies must lie in [0, 1]"));
        }
        Ok(IidParams {
            rho1,
            rho2,
            ..IidParams::default()
        })
    }

    pub fn with_timing(rho1: f64, rho2: f64, timing: &TimingConfig) -> Result<Self> {
        let mut p = IidParams::new(rho1, rho2)?;
        p.packet_bits = timing.packet_bits;
        p.cycle_us = timing.mean_cycle_us();
        Ok(p)
    }

    /// Single fully-idle link rate L/T, in bits per second.
    fn base_rate_bps(&self) -> f64 {
        self.packet_bits as f64 * 1e6 / self.cycle_us
    }

    fn single_link_bps(&self, rho: f64) -> f64 {
        (1.0 - rho) * self.base_rate_bps()
    }
}

/// Closed-form mean throughput in bits per second. The deferred-decision
/// policy has no closed form and is rejected.
pub fn th_closed_form(mode: PolicyId, p: &IidParams) -> Result<f64> {
    match mode {
        PolicyId::Slo => Ok(p.single_link_bps(p.rho1)),
        // Summing the per-link terms keeps additivity exact in floating point.
        PolicyId::MloStr => Ok(p.single_link_bps(p.rho1) + p.single_link_bps(p.rho2)),
        PolicyId::MloNstr => Ok((1.0 - p.rho1) * (2.0 - p.rho2) * p.base_rate_bps()),
        PolicyId::MloStrPlus => Err(Error::Unsupported(
            "no closed-form throughput for str+".into(),
        )),
    }
}

/// One row of the occupancy-grid gain map.
#[derive(Debug, Clone, PartialEq)]
pub struct GainCell {
    pub rho1: f64,
    pub rho2: f64,
    pub slo_bps: f64,
    pub str_bps: f64,
    pub nstr_bps: f64,
}

/// Evaluates the model over a square occupancy grid.
pub fn gain_grid(start: f64, end: f64, step: f64) -> Result<Vec<GainCell>> {
    if !(step > 0.0) || end < start {
        return Err(Error::domain("grid must satisfy start <= end, step > 0"));
    }
    let steps = ((end - start) / step).round() as usize;
    let axis: Vec<f64> = (0..=steps).map(|k| start + k as f64 * step).collect();
    let mut cells = Vec::with_capacity(axis.len() * axis.len());
    for &rho1 in &axis {
        for &rho2 in &axis {
            let p = IidParams::new(rho1, rho2)?;
            cells.push(GainCell {
                rho1,
                rho2,
                slo_bps: th_closed_form(PolicyId::Slo, &p)?,
                str_bps: th_closed_form(PolicyId::MloStr, &p)?,
                nstr_bps: th_closed_form(PolicyId::MloNstr, &p)?,
            });
        }
    }
    Ok(cells)
}

/// The gain map as CSV: throughputs plus STR/NSTR ratios over the single link.
pub fn gain_grid_csv(cells: &[GainCell]) -> String {
    let mut out = String::from("rho1,rho2,slo_bps,str_bps,nstr_bps,str_gain,nstr_gain\n");
    for c in cells {
        let (sg, ng) = if c.slo_bps > 0.0 {
            (c.str_bps / c.slo_bps, c.nstr_bps / c.slo_bps)
        } else {
            (f64::NAN, f64::NAN)
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            c.rho1, c.rho2, c.slo_bps, c.str_bps, c.nstr_bps, sg, ng
        ));
    }
    out
}
