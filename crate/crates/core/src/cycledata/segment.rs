use super::model::{BatteryHistory, Segment};
use crate::error::{Error, Result};

/// Splits a history into one sub-history per segment, each renumbered from 1.
///
/// Segments refer to acquisition-order `cycle_index` values, must be given in
/// ascending order, and must not overlap. Cycles falling between segments
/// (condition jumps) belong to no output.
pub fn segment_history(
    history: &BatteryHistory,
    boundaries: &[Segment],
) -> Result<Vec<BatteryHistory>> {
    if boundaries.is_empty() {
        return Err(Error::Segment("no segments given".into()));
    }
    let (lo, hi) = match (history.cycles.first(), history.cycles.last()) {
        (Some(a), Some(b)) => (a.cycle_index, b.cycle_index),
        _ => return Err(Error::Segment("history has no cycles".into())),
    };

    for (i, seg) in boundaries.iter().enumerate() {
        if seg.first_cycle > seg.last_cycle {
            return Err(Error::Segment(format!(
                "segment {:?} range {}..{} is reversed",
                seg.label, seg.first_cycle, seg.last_cycle
            )));
        }
        if seg.first_cycle < lo || seg.last_cycle > hi {
            return Err(Error::Segment(format!(
                "segment {:?} range {}..{} outside history range {lo}..{hi}",
                seg.label, seg.first_cycle, seg.last_cycle
            )));
        }
        if let Some(prev) = i.checked_sub(1).map(|p| &boundaries[p]) {
            if seg.first_cycle <= prev.last_cycle {
                return Err(Error::Segment(format!(
                    "segment {:?} overlaps or precedes {:?}",
                    seg.label, prev.label
                )));
            }
        }
    }

    Ok(boundaries
        .iter()
        .map(|seg| {
            let mut sub = BatteryHistory {
                battery_id: history.battery_id.clone(),
                rated_capacity_ah: history.rated_capacity_ah,
                rated_voltage_v: history.rated_voltage_v,
                cycles: history
                    .cycles
                    .iter()
                    .filter(|c| seg.contains(c.cycle_index))
                    .cloned()
                    .collect(),
                segments: vec![seg.clone()],
            };
            sub.reindex();
            sub
        })
        .collect())
}
