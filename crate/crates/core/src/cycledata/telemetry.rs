//! Long-form telemetry files, one sample per row:
//!
//! ```text
//! battery_id,cycle_index,phase,time_s,voltage_V,current_A
//! B0005,1,charge,0,3.87,1.5
//! ```
//!
//! Rows are grouped by `(cycle_index, phase)`; groups appear in increasing
//! `cycle_index` order and samples inside a group are time ordered.

use std::collections::{BTreeSet, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use super::metadata::{ConditionOverride, ConditionPatch, Metadata, SegmentSpec};
use super::model::{AnomalyFlag, BatteryHistory, CycleRecord, PhaseKind, PhaseTrace, Sample};
use crate::error::{Error, Result};

pub const TELEMETRY_HEADER: [&str; 6] = [
    "battery_id",
    "cycle_index",
    "phase",
    "time_s",
    "voltage_V",
    "current_A",
];

struct PendingCycle {
    cycle_index: u32,
    charge: Vec<Sample>,
    discharge: Vec<Sample>,
    non_monotonic: bool,
}

impl PendingCycle {
    fn new(cycle_index: u32) -> Self {
        Self {
            cycle_index,
            charge: Vec::new(),
            discharge: Vec::new(),
            non_monotonic: false,
        }
    }

    fn push(&mut self, phase: PhaseKind, sample: Sample) {
        let trace = match phase {
            PhaseKind::Charge => &mut self.charge,
            PhaseKind::Discharge => &mut self.discharge,
        };
        if trace
            .last()
            .is_some_and(|prev| sample.time_s <= prev.time_s)
        {
            self.non_monotonic = true;
        }
        trace.push(sample);
    }
}

fn field(record: &csv::StringRecord, idx: usize) -> &str {
    record.get(idx).unwrap_or("").trim()
}

fn parse_f64(raw: &str, name: &str, line: u64) -> Result<f64> {
    let v: f64 = raw.parse().map_err(|_| Error::MalformedRow {
        line,
        reason: format!("{name} {raw:?} is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::MalformedRow {
            line,
            reason: format!("{name} is not finite"),
        });
    }
    Ok(v)
}

/// Parses a telemetry document against its metadata.
///
/// Out-of-order timestamps inside a phase do not abort parsing; the cycle is
/// flagged [`AnomalyFlag::NonMonotonicTime`] and left for cleaning. A cycle
/// missing one of its phases gets [`AnomalyFlag::EmptyPhase`].
pub fn parse_history<R: Read>(telemetry: R, meta: &Metadata) -> Result<BatteryHistory> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(telemetry);

    let header = reader.headers()?.clone();
    let found: Vec<&str> = header.iter().map(str::trim).collect();
    if found != TELEMETRY_HEADER {
        return Err(Error::Header {
            expected: TELEMETRY_HEADER.join(","),
            found: found.join(","),
        });
    }

    let mut pending: Vec<PendingCycle> = Vec::new();
    let mut seen: HashSet<(u32, PhaseKind)> = HashSet::new();
    let mut current: Option<(u32, PhaseKind)> = None;

    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != TELEMETRY_HEADER.len() {
            return Err(Error::MalformedRow {
                line,
                reason: format!("expected 6 fields, found {}", record.len()),
            });
        }

        let battery_id = field(&record, 0);
        if battery_id != meta.battery_id {
            return Err(Error::MalformedRow {
                line,
                reason: format!(
                    "battery_id {battery_id:?} does not match metadata {:?}",
                    meta.battery_id
                ),
            });
        }
        let cycle_raw = field(&record, 1);
        let cycle_index: u32 = cycle_raw.parse().map_err(|_| Error::MalformedRow {
            line,
            reason: format!("cycle_index {cycle_raw:?} is not a non-negative integer"),
        })?;
        let label = field(&record, 2);
        let phase = PhaseKind::from_label(label).ok_or_else(|| Error::UnknownPhase {
            line,
            label: label.to_string(),
        })?;
        let time_s = parse_f64(field(&record, 3), "time_s", line)?;
        let voltage_v = parse_f64(field(&record, 4), "voltage_V", line)?;
        let current_a = parse_f64(field(&record, 5), "current_A", line)?;
        if time_s < 0.0 {
            return Err(Error::MalformedRow {
                line,
                reason: format!("negative time_s {time_s}"),
            });
        }
        if voltage_v <= 0.0 {
            return Err(Error::MalformedRow {
                line,
                reason: format!("non-positive voltage_V {voltage_v}"),
            });
        }
        if current_a < 0.0 {
            return Err(Error::MalformedRow {
                line,
                reason: format!("negative current_A {current_a}; currents must be magnitudes"),
            });
        }

        let key = (cycle_index, phase);
        if current != Some(key) {
            if !seen.insert(key) {
                return Err(Error::MalformedRow {
                    line,
                    reason: format!("rows for cycle {cycle_index} {phase} are not contiguous"),
                });
            }
            match pending.last() {
                Some(last) if cycle_index < last.cycle_index => {
                    return Err(Error::MalformedRow {
                        line,
                        reason: format!(
                            "cycle_index {cycle_index} follows {}; cycles must be increasing",
                            last.cycle_index
                        ),
                    });
                }
                Some(last) if cycle_index == last.cycle_index => {}
                _ => pending.push(PendingCycle::new(cycle_index)),
            }
            current = Some(key);
        }
        pending
            .last_mut()
            .expect("a cycle was pushed above")
            .push(phase, Sample::new(time_s, voltage_v, current_a));
    }

    let cycles = pending
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let mut flags = BTreeSet::new();
            if p.charge.is_empty() || p.discharge.is_empty() {
                flags.insert(AnomalyFlag::EmptyPhase);
            }
            if p.non_monotonic {
                flags.insert(AnomalyFlag::NonMonotonicTime);
            }
            CycleRecord {
                cycle_index: p.cycle_index,
                seq: i as u32 + 1,
                charge: PhaseTrace::new(PhaseKind::Charge, p.charge),
                discharge: PhaseTrace::new(PhaseKind::Discharge, p.discharge),
                conditions: meta.conditions_for(p.cycle_index),
                flags,
            }
        })
        .collect();

    Ok(BatteryHistory {
        battery_id: meta.battery_id.clone(),
        rated_capacity_ah: meta.rated_capacity_ah,
        rated_voltage_v: meta.rated_voltage_v,
        cycles,
        segments: meta.resolved_segments(),
    })
}

/// Reads a telemetry file and its metadata sidecar from disk.
pub fn read_history(telemetry: &Path, metadata: &Path) -> Result<BatteryHistory> {
    let meta = Metadata::read(metadata)?;
    let file = std::fs::File::open(telemetry).map_err(|e| Error::io(telemetry, e))?;
    parse_history(std::io::BufReader::new(file), &meta)
}

/// Serializes the samples of a history back to the telemetry format.
/// Floats use the shortest representation that parses back to the same value.
pub fn write_telemetry<W: Write>(history: &BatteryHistory, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(TELEMETRY_HEADER)?;
    for cycle in &history.cycles {
        let index = cycle.cycle_index.to_string();
        for trace in [&cycle.charge, &cycle.discharge] {
            for s in &trace.samples {
                writer.write_record([
                    history.battery_id.as_str(),
                    index.as_str(),
                    trace.kind.label(),
                    &s.time_s.to_string(),
                    &s.voltage_v.to_string(),
                    &s.current_a.to_string(),
                ])?;
            }
        }
    }
    writer.flush().map_err(|e| Error::io("<telemetry>", e))?;
    Ok(())
}

/// Rebuilds a metadata document describing `history`: the first cycle's
/// conditions become the defaults and every run of differing cycles becomes
/// an override.
pub fn history_metadata(history: &BatteryHistory, charge_voltage_v: f64) -> Result<Metadata> {
    let base = history
        .cycles
        .first()
        .map(|c| c.conditions)
        .or_else(|| history.segments.first().map(|s| s.conditions))
        .ok_or_else(|| Error::Metadata("history has no cycles or segments".into()))?;

    let mut overrides: Vec<ConditionOverride> = Vec::new();
    for cycle in &history.cycles {
        let patch = ConditionPatch::diff(base, cycle.conditions);
        if patch == ConditionPatch::default() {
            continue;
        }
        match overrides.last_mut() {
            Some(o) if o.patch == patch && o.last_cycle + 1 == cycle.cycle_index => {
                o.last_cycle = cycle.cycle_index;
            }
            _ => overrides.push(ConditionOverride {
                first_cycle: cycle.cycle_index,
                last_cycle: cycle.cycle_index,
                patch,
            }),
        }
    }

    let mut meta = Metadata {
        battery_id: history.battery_id.clone(),
        rated_capacity_ah: history.rated_capacity_ah,
        rated_voltage_v: history.rated_voltage_v,
        charge_voltage_v,
        conditions: base,
        overrides,
        segments: Vec::new(),
    };
    meta.segments = history
        .segments
        .iter()
        .map(|s| SegmentSpec {
            label: s.label.clone(),
            first_cycle: s.first_cycle,
            last_cycle: s.last_cycle,
            conditions: ConditionPatch::diff(meta.conditions_for(s.first_cycle), s.conditions),
        })
        .collect();
    Ok(meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycledata::model::OperatingConditions;

    fn meta() -> Metadata {
        Metadata {
            battery_id: "T1".into(),
            rated_capacity_ah: 2.0,
            rated_voltage_v: 3.7,
            charge_voltage_v: 4.2,
            conditions: OperatingConditions {
                ambient_temp_c: 24.0,
                discharge_current_a: 2.0,
                cutoff_voltage_v: 2.7,
                charge_current_a: 1.5,
            },
            overrides: vec![],
            segments: vec![],
        }
    }

    fn doc(cycles: u32, per_phase: u32) -> String {
        let mut s = TELEMETRY_HEADER.join(",") + "\n";
        for c in 1..=cycles {
            for phase in ["charge", "discharge"] {
                for i in 0..per_phase {
                    s += &format!("T1,{c},{phase},{i},{},1.5\n", 3.6 + 0.1 * i as f64);
                }
            }
        }
        s
    }

    #[test]
    fn two_cycles_four_samples_each() {
        let h = parse_history(doc(2, 4).as_bytes(), &meta()).unwrap();
        assert_eq!(h.cycles.len(), 2);
        for c in &h.cycles {
            assert_eq!(c.charge.len(), 4);
            assert_eq!(c.discharge.len(), 4);
            assert_eq!(c.charge.kind, PhaseKind::Charge);
            assert_eq!(c.discharge.kind, PhaseKind::Discharge);
            assert!(c.flags.is_empty());
        }
        assert_eq!(h.cycles[1].seq, 2);
    }

    #[test]
    fn unknown_phase_is_hard_error() {
        let text = doc(1, 2) + "T1,2,rest,0,3.7,0\n";
        match parse_history(text.as_bytes(), &meta()) {
            Err(Error::UnknownPhase { line, label }) => {
                assert_eq!(label, "rest");
                assert_eq!(line, 6);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_row_reports_line() {
        let text = doc(1, 2).replacen("T1,1,charge,1,3.7,1.5", "T1,1,charge,abc,3.7,1.5", 1);
        match parse_history(text.as_bytes(), &meta()) {
            Err(Error::MalformedRow { line, reason }) => {
                assert_eq!(line, 3);
                assert!(reason.contains("time_s"), "{reason}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn short_row_is_malformed() {
        let text = doc(1, 1) + "T1,2,charge,0\n";
        assert!(matches!(
            parse_history(text.as_bytes(), &meta()),
            Err(Error::MalformedRow { line: 4, .. })
        ));
    }

    #[test]
    fn non_monotonic_time_flags_without_aborting() {
        let text = doc(2, 3).replacen("T1,2,discharge,2,", "T1,2,discharge,0.5,", 1);
        let h = parse_history(text.as_bytes(), &meta()).unwrap();
        assert!(h.cycles[0].flags.is_empty());
        assert!(h.cycles[1].flags.contains(&AnomalyFlag::NonMonotonicTime));
    }

    #[test]
    fn missing_phase_is_flagged_empty() {
        let text = doc(1, 2) + "T1,2,charge,0,3.7,1.5\nT1,2,charge,1,3.8,1.5\n";
        let h = parse_history(text.as_bytes(), &meta()).unwrap();
        assert!(h.cycles[1].flags.contains(&AnomalyFlag::EmptyPhase));
        assert!(h.cycles[1].discharge.is_empty());
    }

    #[test]
    fn interleaved_groups_rejected() {
        let mut text = TELEMETRY_HEADER.join(",") + "\n";
        text += "T1,1,charge,0,3.7,1\nT1,1,discharge,0,3.7,1\nT1,1,charge,1,3.7,1\n";
        assert!(matches!(
            parse_history(text.as_bytes(), &meta()),
            Err(Error::MalformedRow { line: 4, .. })
        ));
    }

    #[test]
    fn decreasing_cycle_rejected() {
        let mut text = TELEMETRY_HEADER.join(",") + "\n";
        text += "T1,2,charge,0,3.7,1\nT1,1,charge,0,3.7,1\n";
        assert!(matches!(
            parse_history(text.as_bytes(), &meta()),
            Err(Error::MalformedRow { line: 3, .. })
        ));
    }

    #[test]
    fn wrong_header_rejected() {
        let text = "id,cycle,phase,t,v,i\n";
        assert!(matches!(
            parse_history(text.as_bytes(), &meta()),
            Err(Error::Header { .. })
        ));
    }

    #[test]
    fn negative_current_rejected() {
        let text = doc(1, 2).replacen(",1.5\n", ",-1.5\n", 1);
        assert!(matches!(
            parse_history(text.as_bytes(), &meta()),
            Err(Error::MalformedRow { line: 2, .. })
        ));
    }

    #[test]
    fn written_document_is_byte_stable() {
        let text = doc(3, 5);
        let h = parse_history(text.as_bytes(), &meta()).unwrap();
        let mut out = Vec::new();
        write_telemetry(&h, &mut out).unwrap();
        let again = parse_history(out.as_slice(), &meta()).unwrap();
        assert_eq!(h, again);
    }
}
