use serde::{Deserialize, Serialize};

use super::integrate::{integrate_charge, integrate_power, IntegrationRule};
use crate::cycledata::{BatteryHistory, CycleRecord};
use crate::error::{Error, Result};

/// Per-cycle energies (J), capacities (Ah) and efficiency ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleMetrics {
    #[serde(rename = "e_charged_J")]
    pub e_charged_j: f64,
    #[serde(rename = "e_discharged_J")]
    pub e_discharged_j: f64,
    /// `e_charged_j - e_discharged_j`; calendar and cycling losses are not separable.
    #[serde(rename = "e_dissipated_J")]
    pub e_dissipated_j: f64,
    pub soe: f64,
    #[serde(rename = "charge_capacity_Ah")]
    pub charge_capacity_ah: f64,
    #[serde(rename = "discharge_capacity_Ah")]
    pub discharge_capacity_ah: f64,
    pub ce: f64,
    pub soh: f64,
}

impl CycleMetrics {
    pub fn e_charged_wh(&self) -> f64 {
        self.e_charged_j / 3600.0
    }

    pub fn e_discharged_wh(&self) -> f64 {
        self.e_discharged_j / 3600.0
    }

    /// Assembles the ratios from the four integrals.
    ///
    /// SOH uses this cycle's discharge capacity as the estimate of the
    /// maximum capacity.
    pub fn from_integrals(
        e_charged_j: f64,
        e_discharged_j: f64,
        charge_capacity_ah: f64,
        discharge_capacity_ah: f64,
        rated_capacity_ah: f64,
    ) -> Result<Self> {
        if e_charged_j.is_nan() || e_charged_j <= 0.0 {
            return Err(Error::ZeroEnergyCharge);
        }
        Ok(Self {
            e_charged_j,
            e_discharged_j,
            e_dissipated_j: e_charged_j - e_discharged_j,
            soe: e_discharged_j / e_charged_j,
            charge_capacity_ah,
            discharge_capacity_ah,
            ce: discharge_capacity_ah / charge_capacity_ah,
            soh: discharge_capacity_ah / rated_capacity_ah,
        })
    }
}

pub fn compute_cycle_metrics(
    cycle: &CycleRecord,
    rated_capacity_ah: f64,
    rule: IntegrationRule,
) -> Result<CycleMetrics> {
    let e_charged = integrate_power(&cycle.charge, rule)?;
    let e_discharged = integrate_power(&cycle.discharge, rule)?;
    let q_charge = integrate_charge(&cycle.charge, rule)?;
    let q_discharge = integrate_charge(&cycle.discharge, rule)?;
    CycleMetrics::from_integrals(
        e_charged,
        e_discharged,
        q_charge,
        q_discharge,
        rated_capacity_ah,
    )
}

/// Energy efficiency of one cycle without the capacity bookkeeping.
pub fn cycle_soe(cycle: &CycleRecord, rule: IntegrationRule) -> Result<f64> {
    let e_charged = integrate_power(&cycle.charge, rule)?;
    if e_charged.is_nan() || e_charged <= 0.0 {
        return Err(Error::ZeroEnergyCharge);
    }
    Ok(integrate_power(&cycle.discharge, rule)? / e_charged)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    /// Cycle number, 1-based and gap-free.
    pub t: u32,
    /// Acquisition-order index of the source cycle.
    pub cycle_index: u32,
    #[serde(flatten)]
    pub metrics: CycleMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSeries {
    pub battery_id: String,
    pub points: Vec<SeriesPoint>,
}

impl MetricsSeries {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn cycle_numbers(&self) -> Vec<f64> {
        self.points.iter().map(|p| f64::from(p.t)).collect()
    }

    pub fn soe(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.metrics.soe).collect()
    }

    pub fn soh(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.metrics.soh).collect()
    }

    pub fn ce(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.metrics.ce).collect()
    }

    pub fn mean_soe(&self) -> Option<f64> {
        (!self.points.is_empty())
            .then(|| self.points.iter().map(|p| p.metrics.soe).sum::<f64>() / self.len() as f64)
    }
}

/// A cycle left out of a series because its metrics could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedCycle {
    pub cycle_index: u32,
    pub reason: String,
}

/// Evaluates every cycle of a (cleaned) history. Cycles whose metrics fail
/// are skipped and recorded; survivors are numbered 1..=n in order.
pub fn compute_series(
    history: &BatteryHistory,
    rule: IntegrationRule,
) -> (MetricsSeries, Vec<SkippedCycle>) {
    let mut points = Vec::with_capacity(history.cycles.len());
    let mut skipped = Vec::new();
    for cycle in &history.cycles {
        match compute_cycle_metrics(cycle, history.rated_capacity_ah, rule) {
            Ok(metrics) => points.push(SeriesPoint {
                t: points.len() as u32 + 1,
                cycle_index: cycle.cycle_index,
                metrics,
            }),
            Err(e) => skipped.push(SkippedCycle {
                cycle_index: cycle.cycle_index,
                reason: e.to_string(),
            }),
        }
    }
    (
        MetricsSeries {
            battery_id: history.battery_id.clone(),
            points,
        },
        skipped,
    )
}
