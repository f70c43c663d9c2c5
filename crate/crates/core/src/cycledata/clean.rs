use serde::{Deserialize, Serialize};

use super::model::{AnomalyFlag, BatteryHistory, CycleRecord};
use crate::error::{Error, Result};
use crate::metrics::{cycle_soe, IntegrationRule};

/// Which cycles to drop before analysis. Every rule can be switched off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CleaningPolicy {
    /// Drop the first cycle of the history (unstable formation behaviour).
    pub drop_first_cycle: bool,
    /// Drop cycles with a phase of fewer than two samples.
    pub drop_empty_phase: bool,
    /// Drop cycles whose timestamps go backwards or repeat inside a phase.
    pub drop_non_monotonic: bool,
    /// Drop cycles whose lowest discharge voltage stays more than this many
    /// volts above the cutoff.
    pub incomplete_discharge_margin_v: Option<f64>,
    /// Keep cycles only when `lower < SOE <= upper`.
    pub efficiency_bounds: Option<(f64, f64)>,
    /// Quadrature used to evaluate SOE for the efficiency rule.
    pub rule: IntegrationRule,
}

impl Default for CleaningPolicy {
    fn default() -> Self {
        Self {
            drop_first_cycle: true,
            drop_empty_phase: true,
            drop_non_monotonic: true,
            incomplete_discharge_margin_v: Some(0.1),
            efficiency_bounds: Some((0.0, 1.02)),
            rule: IntegrationRule::LeftRect,
        }
    }
}

impl CleaningPolicy {
    /// A policy that keeps every cycle.
    pub fn disabled() -> Self {
        Self {
            drop_first_cycle: false,
            drop_empty_phase: false,
            drop_non_monotonic: false,
            incomplete_discharge_margin_v: None,
            efficiency_bounds: None,
            rule: IntegrationRule::LeftRect,
        }
    }

    pub fn with_rule(mut self, rule: IntegrationRule) -> Self {
        self.rule = rule;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RemovalReason {
    FirstCycle,
    EmptyPhase,
    NonMonotonicTime,
    IncompleteDischarge,
    NonphysicalEfficiency,
}

impl From<AnomalyFlag> for RemovalReason {
    fn from(flag: AnomalyFlag) -> Self {
        match flag {
            AnomalyFlag::EmptyPhase => RemovalReason::EmptyPhase,
            AnomalyFlag::NonMonotonicTime => RemovalReason::NonMonotonicTime,
            AnomalyFlag::IncompleteDischarge => RemovalReason::IncompleteDischarge,
            AnomalyFlag::NonphysicalEfficiency => RemovalReason::NonphysicalEfficiency,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovedCycle {
    pub cycle_index: u32,
    pub reasons: Vec<RemovalReason>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CleaningAudit {
    pub input_cycles: usize,
    pub removed: Vec<RemovedCycle>,
    /// Retained cycles whose SOE lies in (1, upper bound]: kept, but they
    /// dissipate negative energy and deserve a look.
    pub retained_above_unity: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CleanedHistory {
    pub history: BatteryHistory,
    pub audit: CleaningAudit,
}

fn phase_too_short(cycle: &CycleRecord) -> bool {
    cycle.charge.len() < 2 || cycle.discharge.len() < 2
}

fn time_broken(cycle: &CycleRecord) -> bool {
    !(cycle.charge.is_time_monotonic() && cycle.discharge.is_time_monotonic())
}

/// Anomaly flags for one cycle under `policy`, plus its SOE when it could
/// be evaluated.
fn inspect(cycle: &CycleRecord, policy: &CleaningPolicy) -> (Vec<AnomalyFlag>, Option<f64>) {
    let mut flags: Vec<AnomalyFlag> = cycle.flags.iter().copied().collect();
    let add = |f: AnomalyFlag, flags: &mut Vec<AnomalyFlag>| {
        if !flags.contains(&f) {
            flags.push(f);
        }
    };

    let short = phase_too_short(cycle);
    if short {
        add(AnomalyFlag::EmptyPhase, &mut flags);
    }
    let broken_time = time_broken(cycle);
    if broken_time {
        add(AnomalyFlag::NonMonotonicTime, &mut flags);
    }
    if let (Some(margin), Some(vmin)) = (
        policy.incomplete_discharge_margin_v,
        cycle.discharge.min_voltage(),
    ) {
        if vmin > cycle.conditions.cutoff_voltage_v + margin {
            add(AnomalyFlag::IncompleteDischarge, &mut flags);
        }
    }

    let mut soe = None;
    if let Some((lower, upper)) = policy.efficiency_bounds {
        if !short && !broken_time {
            match cycle_soe(cycle, policy.rule) {
                Ok(v) if v > lower && v <= upper => soe = Some(v),
                _ => add(AnomalyFlag::NonphysicalEfficiency, &mut flags),
            }
        }
    }
    flags.sort();
    (flags, soe)
}

fn dropped_by(policy: &CleaningPolicy, flag: AnomalyFlag) -> bool {
    match flag {
        AnomalyFlag::EmptyPhase => policy.drop_empty_phase,
        AnomalyFlag::NonMonotonicTime => policy.drop_non_monotonic,
        AnomalyFlag::IncompleteDischarge => policy.incomplete_discharge_margin_v.is_some(),
        AnomalyFlag::NonphysicalEfficiency => policy.efficiency_bounds.is_some(),
    }
}

/// Removes the first cycle and anomalous cycles, then renumbers survivors
/// 1..=n. Acquisition order and `cycle_index` are preserved.
pub fn clean_history(history: &BatteryHistory, policy: &CleaningPolicy) -> Result<CleanedHistory> {
    let mut audit = CleaningAudit {
        input_cycles: history.cycles.len(),
        ..CleaningAudit::default()
    };
    let mut kept = Vec::with_capacity(history.cycles.len());

    for (pos, cycle) in history.cycles.iter().enumerate() {
        let (flags, soe) = inspect(cycle, policy);
        let mut reasons: Vec<RemovalReason> = flags
            .iter()
            .filter(|f| dropped_by(policy, **f))
            .map(|&f| f.into())
            .collect();
        if pos == 0 && policy.drop_first_cycle {
            reasons.insert(0, RemovalReason::FirstCycle);
        }

        if reasons.is_empty() {
            if soe.is_some_and(|v| v > 1.0) {
                audit.retained_above_unity.push(cycle.cycle_index);
            }
            let mut c = cycle.clone();
            c.flags = flags.into_iter().collect();
            kept.push(c);
        } else {
            audit.removed.push(RemovedCycle {
                cycle_index: cycle.cycle_index,
                reasons,
            });
        }
    }

    if kept.is_empty() {
        return Err(Error::NoUsableCycles);
    }
    let mut out = BatteryHistory {
        cycles: kept,
        ..history.clone()
    };
    out.reindex();
    Ok(CleanedHistory {
        history: out,
        audit,
    })
}
