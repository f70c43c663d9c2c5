use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// One telemetry point inside a phase. Currents are magnitudes in both phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub time_s: f64,
    pub voltage_v: f64,
    pub current_a: f64,
}

impl Sample {
    pub fn new(time_s: f64, voltage_v: f64, current_a: f64) -> Self {
        Self {
            time_s,
            voltage_v,
            current_a,
        }
    }

    #[inline]
    pub fn power_w(&self) -> f64 {
        self.voltage_v * self.current_a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseKind {
    Charge,
    Discharge,
}

impl PhaseKind {
    pub fn label(self) -> &'static str {
        match self {
            PhaseKind::Charge => "charge",
            PhaseKind::Discharge => "discharge",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        match label {
            "charge" => Some(PhaseKind::Charge),
            "discharge" => Some(PhaseKind::Discharge),
            _ => None,
        }
    }
}

impl fmt::Display for PhaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTrace {
    pub kind: PhaseKind,
    pub samples: Vec<Sample>,
}

impl PhaseTrace {
    pub fn new(kind: PhaseKind, samples: Vec<Sample>) -> Self {
        Self { kind, samples }
    }

    pub fn empty(kind: PhaseKind) -> Self {
        Self::new(kind, Vec::new())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// True when every timestamp is strictly greater than its predecessor.
    pub fn is_time_monotonic(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].time_s > w[0].time_s)
    }

    pub fn min_voltage(&self) -> Option<f64> {
        self.samples.iter().map(|s| s.voltage_v).reduce(f64::min)
    }

    pub fn duration_s(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.time_s - a.time_s,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingConditions {
    #[serde(rename = "ambient_temp_C")]
    pub ambient_temp_c: f64,
    #[serde(rename = "discharge_current_A")]
    pub discharge_current_a: f64,
    #[serde(rename = "cutoff_voltage_V")]
    pub cutoff_voltage_v: f64,
    #[serde(rename = "charge_current_A")]
    pub charge_current_a: f64,
}

impl OperatingConditions {
    pub(crate) fn validate(&self, charge_ceiling_v: f64) -> Result<(), String> {
        let all = [
            self.ambient_temp_c,
            self.discharge_current_a,
            self.cutoff_voltage_v,
            self.charge_current_a,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err("operating conditions must be finite".into());
        }
        if !(self.cutoff_voltage_v > 0.0 && self.cutoff_voltage_v < charge_ceiling_v) {
            return Err(format!(
                "cutoff_voltage_V {} outside (0, {charge_ceiling_v})",
                self.cutoff_voltage_v
            ));
        }
        if self.discharge_current_a <= 0.0 {
            return Err(format!(
                "discharge_current_A must be positive, got {}",
                self.discharge_current_a
            ));
        }
        if self.charge_current_a < 0.0 {
            return Err(format!(
                "charge_current_A must be non-negative, got {}",
                self.charge_current_a
            ));
        }
        Ok(())
    }
}

/// Marker attached to a cycle when the telemetry looks wrong.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnomalyFlag {
    EmptyPhase,
    NonMonotonicTime,
    IncompleteDischarge,
    NonphysicalEfficiency,
}

impl AnomalyFlag {
    pub fn label(self) -> &'static str {
        match self {
            AnomalyFlag::EmptyPhase => "empty-phase",
            AnomalyFlag::NonMonotonicTime => "non-monotonic-time",
            AnomalyFlag::IncompleteDischarge => "incomplete-discharge",
            AnomalyFlag::NonphysicalEfficiency => "nonphysical-efficiency",
        }
    }
}

impl fmt::Display for AnomalyFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One charge/discharge pair.
///
/// `cycle_index` is the acquisition-order index from the telemetry file and
/// never changes. `seq` is the 1-based position used as the cycle number `t`
/// in trend fitting; cleaning and segmentation rewrite it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub cycle_index: u32,
    pub seq: u32,
    pub charge: PhaseTrace,
    pub discharge: PhaseTrace,
    pub conditions: OperatingConditions,
    pub flags: BTreeSet<AnomalyFlag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub label: String,
    pub first_cycle: u32,
    pub last_cycle: u32,
    pub conditions: OperatingConditions,
}

impl Segment {
    pub fn contains(&self, cycle_index: u32) -> bool {
        (self.first_cycle..=self.last_cycle).contains(&cycle_index)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryHistory {
    pub battery_id: String,
    #[serde(rename = "rated_capacity_Ah")]
    pub rated_capacity_ah: f64,
    #[serde(rename = "rated_voltage_V")]
    pub rated_voltage_v: f64,
    pub cycles: Vec<CycleRecord>,
    pub segments: Vec<Segment>,
}

impl BatteryHistory {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Rewrites `seq` to 1..=n in the current order.
    pub(crate) fn reindex(&mut self) {
        for (i, c) in self.cycles.iter_mut().enumerate() {
            c.seq = i as u32 + 1;
        }
    }

    /// Conditions shared by every cycle, if they are uniform.
    pub fn uniform_conditions(&self) -> Option<OperatingConditions> {
        let first = self.cycles.first()?.conditions;
        self.cycles
            .iter()
            .all(|c| c.conditions == first)
            .then_some(first)
    }
}
