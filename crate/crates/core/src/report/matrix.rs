use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::BatteryReport;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionKey {
    #[serde(rename = "ambient_temp_C")]
    pub ambient_temp_c: f64,
    #[serde(rename = "discharge_current_A")]
    pub discharge_current_a: f64,
    #[serde(rename = "cutoff_voltage_V")]
    pub cutoff_voltage_v: f64,
}

impl ConditionKey {
    fn cmp_total(&self, other: &Self) -> Ordering {
        self.ambient_temp_c
            .total_cmp(&other.ambient_temp_c)
            .then(
                self.discharge_current_a
                    .total_cmp(&other.discharge_current_a),
            )
            .then(self.cutoff_voltage_v.total_cmp(&other.cutoff_voltage_v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixEntry {
    pub series_id: String,
    pub n_cycles: usize,
    pub alpha: f64,
    pub eta: f64,
    pub soe_range: (f64, f64),
    pub mean_soe: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixCell {
    pub key: ConditionKey,
    pub entries: Vec<MatrixEntry>,
}

/// Analysed batteries (or battery segments) grouped by temperature,
/// discharge current and cutoff voltage.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConditionMatrix {
    pub cells: Vec<MatrixCell>,
}

impl ConditionMatrix {
    pub fn build(reports: &[BatteryReport]) -> Self {
        let mut cells: Vec<MatrixCell> = Vec::new();
        for r in reports {
            let key = ConditionKey {
                ambient_temp_c: r.conditions.ambient_temp_c,
                discharge_current_a: r.conditions.discharge_current_a,
                cutoff_voltage_v: r.conditions.cutoff_voltage_v,
            };
            let entry = MatrixEntry {
                series_id: r.series_id.clone(),
                n_cycles: r.n_cycles,
                alpha: r.fit.alpha,
                eta: r.fit.eta,
                soe_range: r.fit.soe_range,
                mean_soe: r.mean_soe,
            };
            match cells.iter_mut().find(|c| c.key.cmp_total(&key).is_eq()) {
                Some(cell) => cell.entries.push(entry),
                None => cells.push(MatrixCell {
                    key,
                    entries: vec![entry],
                }),
            }
        }
        cells.sort_by(|a, b| a.key.cmp_total(&b.key));
        for cell in &mut cells {
            cell.entries.sort_by(|a, b| a.series_id.cmp(&b.series_id));
        }
        Self { cells }
    }

    pub fn total_entries(&self) -> usize {
        self.cells.iter().map(|c| c.entries.len()).sum()
    }

    pub fn cell(&self, temp_c: f64, current_a: f64, cutoff_v: f64) -> Option<&MatrixCell> {
        self.cells.iter().find(|c| {
            c.key.ambient_temp_c == temp_c
                && c.key.discharge_current_a == current_a
                && c.key.cutoff_voltage_v == cutoff_v
        })
    }
}
