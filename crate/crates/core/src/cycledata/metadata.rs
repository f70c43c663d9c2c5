//! Sidecar metadata document (TOML).
//!
//! ```toml
//! battery_id = "B0038"
//! rated_capacity_Ah = 2.0
//! rated_voltage_V = 3.7
//!
//! [conditions]
//! ambient_temp_C = 24.0
//! discharge_current_A = 4.0
//! cutoff_voltage_V = 2.2
//! charge_current_A = 1.5
//!
//! [[overrides]]
//! first_cycle = 12
//! last_cycle = 40
//! ambient_temp_C = 44.0
//! discharge_current_A = 1.0
//!
//! [[segments]]
//! label = "24C-4A"
//! first_cycle = 1
//! last_cycle = 10
//! ```
//!
//! Override and segment condition tables are partial; missing keys fall back
//! to the default `[conditions]` (for segments: to the conditions in force at
//! `first_cycle`).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{OperatingConditions, Segment};
use crate::error::{Error, Result};

pub const DEFAULT_CHARGE_VOLTAGE_V: f64 = 4.2;

fn default_charge_voltage() -> f64 {
    DEFAULT_CHARGE_VOLTAGE_V
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionPatch {
    #[serde(rename = "ambient_temp_C", skip_serializing_if = "Option::is_none")]
    pub ambient_temp_c: Option<f64>,
    #[serde(
        rename = "discharge_current_A",
        skip_serializing_if = "Option::is_none"
    )]
    pub discharge_current_a: Option<f64>,
    #[serde(rename = "cutoff_voltage_V", skip_serializing_if = "Option::is_none")]
    pub cutoff_voltage_v: Option<f64>,
    #[serde(rename = "charge_current_A", skip_serializing_if = "Option::is_none")]
    pub charge_current_a: Option<f64>,
}

impl ConditionPatch {
    pub fn apply(&self, base: OperatingConditions) -> OperatingConditions {
        OperatingConditions {
            ambient_temp_c: self.ambient_temp_c.unwrap_or(base.ambient_temp_c),
            discharge_current_a: self.discharge_current_a.unwrap_or(base.discharge_current_a),
            cutoff_voltage_v: self.cutoff_voltage_v.unwrap_or(base.cutoff_voltage_v),
            charge_current_a: self.charge_current_a.unwrap_or(base.charge_current_a),
        }
    }

    /// The fields of `target` that differ from `base`.
    pub fn diff(base: OperatingConditions, target: OperatingConditions) -> Self {
        let pick = |a: f64, b: f64| (a != b).then_some(b);
        Self {
            ambient_temp_c: pick(base.ambient_temp_c, target.ambient_temp_c),
            discharge_current_a: pick(base.discharge_current_a, target.discharge_current_a),
            cutoff_voltage_v: pick(base.cutoff_voltage_v, target.cutoff_voltage_v),
            charge_current_a: pick(base.charge_current_a, target.charge_current_a),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionOverride {
    pub first_cycle: u32,
    pub last_cycle: u32,
    #[serde(flatten)]
    pub patch: ConditionPatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpec {
    pub label: String,
    pub first_cycle: u32,
    pub last_cycle: u32,
    #[serde(default, skip_serializing_if = "is_empty_patch")]
    pub conditions: ConditionPatch,
}

fn is_empty_patch(p: &ConditionPatch) -> bool {
    *p == ConditionPatch::default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub battery_id: String,
    #[serde(rename = "rated_capacity_Ah")]
    pub rated_capacity_ah: f64,
    #[serde(rename = "rated_voltage_V")]
    pub rated_voltage_v: f64,
    #[serde(rename = "charge_voltage_V", default = "default_charge_voltage")]
    pub charge_voltage_v: f64,
    pub conditions: OperatingConditions,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<ConditionOverride>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub segments: Vec<SegmentSpec>,
}

impl Metadata {
    pub fn from_toml(text: &str) -> Result<Self> {
        let meta: Metadata = toml::from_str(text).map_err(|e| Error::Metadata(e.to_string()))?;
        meta.validate()?;
        Ok(meta)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("metadata always serializes")
    }

    fn validate(&self) -> Result<()> {
        if self.battery_id.trim().is_empty() {
            return Err(Error::Metadata("battery_id is empty".into()));
        }
        if !(self.rated_capacity_ah.is_finite() && self.rated_capacity_ah > 0.0) {
            return Err(Error::Metadata(format!(
                "rated_capacity_Ah must be positive, got {}",
                self.rated_capacity_ah
            )));
        }
        if !(self.rated_voltage_v.is_finite() && self.rated_voltage_v > 0.0) {
            return Err(Error::Metadata(format!(
                "rated_voltage_V must be positive, got {}",
                self.rated_voltage_v
            )));
        }
        self.conditions
            .validate(self.charge_voltage_v)
            .map_err(Error::Metadata)?;
        for o in &self.overrides {
            if o.first_cycle > o.last_cycle {
                return Err(Error::Metadata(format!(
                    "override range {}..{} is reversed",
                    o.first_cycle, o.last_cycle
                )));
            }
            o.patch
                .apply(self.conditions)
                .validate(self.charge_voltage_v)
                .map_err(Error::Metadata)?;
        }
        Ok(())
    }

    /// Conditions in force for a given acquisition-order cycle index.
    /// Later overrides win over earlier ones.
    pub fn conditions_for(&self, cycle_index: u32) -> OperatingConditions {
        self.overrides
            .iter()
            .filter(|o| (o.first_cycle..=o.last_cycle).contains(&cycle_index))
            .fold(self.conditions, |acc, o| o.patch.apply(acc))
    }

    pub fn resolve_segment(&self, spec: &SegmentSpec) -> Segment {
        Segment {
            label: spec.label.clone(),
            first_cycle: spec.first_cycle,
            last_cycle: spec.last_cycle,
            conditions: spec.conditions.apply(self.conditions_for(spec.first_cycle)),
        }
    }

    pub fn resolved_segments(&self) -> Vec<Segment> {
        self.segments
            .iter()
            .map(|s| self.resolve_segment(s))
            .collect()
    }
}

/// Segment definitions supplied on the command line, keyed by battery.
///
/// ```toml
/// [[segments]]
/// battery_id = "B0038"
/// label = "24C-4A"
/// first_cycle = 1
/// last_cycle = 10
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SegmentFile {
    #[serde(default)]
    pub segments: Vec<SegmentFileEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentFileEntry {
    pub battery_id: String,
    #[serde(flatten)]
    pub spec: SegmentSpec,
}

impl SegmentFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Segment(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn by_battery(&self) -> BTreeMap<String, Vec<SegmentSpec>> {
        let mut map: BTreeMap<String, Vec<SegmentSpec>> = BTreeMap::new();
        for entry in &self.segments {
            map.entry(entry.battery_id.clone())
                .or_default()
                .push(entry.spec.clone());
        }
        map
    }
}
