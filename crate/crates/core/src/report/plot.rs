//! Plot-ready delimited series.
//!
//! * trajectory / fitted trend: `series_id,t,value`
//! * range: `series_id,low,high`
//! * factor comparison: `series_id,t,value`, where `series_id` is
//!   `<fixed factors>|<series>@<varied factor>`, e.g. `24C_2.2V|B0007@2A`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::BatteryReport;
use crate::cycledata::OperatingConditions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    Trajectory,
    FittedTrend,
    Range,
    FactorComparison,
}

impl FromStr for PlotKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "trajectory" => Ok(PlotKind::Trajectory),
            "fitted" | "fitted-trend" => Ok(PlotKind::FittedTrend),
            "range" => Ok(PlotKind::Range),
            "factor" | "factor-comparison" => Ok(PlotKind::FactorComparison),
            other => Err(format!("unknown plot kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    Temperature,
    Current,
    Cutoff,
}

impl Factor {
    pub const ALL: [Factor; 3] = [Factor::Temperature, Factor::Current, Factor::Cutoff];

    fn value(self, c: &OperatingConditions) -> f64 {
        match self {
            Factor::Temperature => c.ambient_temp_c,
            Factor::Current => c.discharge_current_a,
            Factor::Cutoff => c.cutoff_voltage_v,
        }
    }

    fn unit(self) -> &'static str {
        match self {
            Factor::Temperature => "C",
            Factor::Current => "A",
            Factor::Cutoff => "V",
        }
    }

    /// The two factors held fixed when this one varies.
    fn others(self) -> [Factor; 2] {
        match self {
            Factor::Temperature => [Factor::Current, Factor::Cutoff],
            Factor::Current => [Factor::Temperature, Factor::Cutoff],
            Factor::Cutoff => [Factor::Temperature, Factor::Current],
        }
    }

    fn tag(self, c: &OperatingConditions) -> String {
        format!("{}{}", self.value(c), self.unit())
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Factor::Temperature => "temperature",
            Factor::Current => "current",
            Factor::Cutoff => "cutoff",
        })
    }
}

impl FromStr for Factor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "temperature" | "temp" => Ok(Factor::Temperature),
            "current" => Ok(Factor::Current),
            "cutoff" | "voltage" => Ok(Factor::Cutoff),
            other => Err(format!("unknown factor {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotTable {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub warnings: Vec<String>,
}

impl PlotTable {
    fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    /// Rows whose first column equals `series_id`.
    pub fn series(&self, series_id: &str) -> impl Iterator<Item = &Vec<String>> + '_ {
        let id = series_id.to_string();
        self.rows.iter().filter(move |r| r[0] == id)
    }
}

/// Fitted line span from the intercept (t = 0, initial efficiency) to the
/// last cycle, as `(low, high)`.
pub fn fitted_span(alpha: f64, eta: f64, n_cycles: usize) -> (f64, f64) {
    let end = alpha * n_cycles as f64 + eta;
    (end.min(eta), end.max(eta))
}

fn trajectory_rows(out: &mut PlotTable, series_id: &str, report: &BatteryReport, fitted: bool) {
    for p in &report.series.points {
        let value = if fitted {
            report.fit.predict(f64::from(p.t))
        } else {
            p.metrics.soe
        };
        out.rows.push(vec![
            series_id.to_string(),
            p.t.to_string(),
            value.to_string(),
        ]);
    }
}

fn factor_rows(reports: &[BatteryReport], factor: Factor) -> PlotTable {
    let mut out = PlotTable::new(&["series_id", "t", "value"]);
    let [f1, f2] = factor.others();

    let mut groups: Vec<((f64, f64), Vec<&BatteryReport>)> = Vec::new();
    for r in reports {
        let key = (f1.value(&r.conditions), f2.value(&r.conditions));
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    groups.sort_by(|a, b| a.0 .0.total_cmp(&b.0 .0).then(a.0 .1.total_cmp(&b.0 .1)));

    for (_, mut members) in groups {
        let first = members[0].conditions;
        let varies = members
            .iter()
            .any(|m| factor.value(&m.conditions) != factor.value(&first));
        if !varies {
            continue;
        }
        members.sort_by(|a, b| {
            factor
                .value(&a.conditions)
                .total_cmp(&factor.value(&b.conditions))
                .then(a.series_id.cmp(&b.series_id))
        });
        let group = format!("{}_{}", f1.tag(&first), f2.tag(&first));
        for m in members {
            let id = format!("{group}|{}@{}", m.series_id, factor.tag(&m.conditions));
            trajectory_rows(&mut out, &id, m, false);
        }
    }
    if out.rows.is_empty() {
        out.warnings.push(format!(
            "no group with fixed {} and {} has more than one {factor} value",
            f1, f2
        ));
    }
    out
}

/// Builds the delimited table for one plot kind. `factor` is only consulted
/// for [`PlotKind::FactorComparison`] (default: current).
pub fn export_plot_series(
    reports: &[BatteryReport],
    kind: PlotKind,
    factor: Option<Factor>,
) -> PlotTable {
    match kind {
        PlotKind::Trajectory | PlotKind::FittedTrend => {
            let mut out = PlotTable::new(&["series_id", "t", "value"]);
            for r in reports {
                trajectory_rows(&mut out, &r.series_id, r, kind == PlotKind::FittedTrend);
            }
            out
        }
        PlotKind::Range => {
            let mut out = PlotTable::new(&["series_id", "low", "high"]);
            for r in reports {
                let (low, high) = fitted_span(r.fit.alpha, r.fit.eta, r.n_cycles);
                out.rows
                    .push(vec![r.series_id.clone(), low.to_string(), high.to_string()]);
            }
            out
        }
        PlotKind::FactorComparison => factor_rows(reports, factor.unwrap_or(Factor::Current)),
    }
}
