//! Batch analysis over a directory of telemetry/metadata pairs and the
//! documents it produces.

mod matrix;
mod output;
mod plot;
mod summary;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use matrix::{ConditionKey, ConditionMatrix, MatrixCell, MatrixEntry};
pub use output::{file_safe, write_analysis, write_atomic, write_plot_data, OutputFiles};
pub use plot::{export_plot_series, fitted_span, Factor, PlotKind, PlotTable};
pub use summary::{fmt_sig, render_summary, SummaryFormat};

use crate::cycledata::{
    clean_history, read_history, segment_history, BatteryHistory, CleaningAudit, CleaningPolicy,
    Metadata, OperatingConditions, Segment, SegmentSpec,
};
use crate::error::{Error, Result};
use crate::metrics::{compute_series, pearson, IntegrationRule, MetricsSeries, SkippedCycle};
use crate::trend::{ols_fit, verify_linearity, FitResult, MkOptions, MkResult};

/// Minimum cleaned cycles for a unit to be analysed: the differenced series
/// must hold at least three values for the trend test.
pub const MIN_CYCLES: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub rule: IntegrationRule,
    /// `None` disables cleaning altogether.
    pub cleaning: Option<CleaningPolicy>,
    pub mk: MkOptions,
    /// Segment definitions replacing those in the metadata, per battery id.
    pub segment_overrides: BTreeMap<String, Vec<SegmentSpec>>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            rule: IntegrationRule::LeftRect,
            cleaning: Some(CleaningPolicy::default()),
            mk: MkOptions::default(),
            segment_overrides: BTreeMap::new(),
        }
    }
}

/// Everything computed for one battery, or one segment of a battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryReport {
    /// `battery_id`, or `battery_id/segment` for segmented batteries.
    pub series_id: String,
    pub battery_id: String,
    pub segment: Option<String>,
    pub conditions: OperatingConditions,
    /// False when per-cycle conditions vary inside this unit; `conditions`
    /// then holds those of its first cycle.
    pub conditions_uniform: bool,
    #[serde(rename = "rated_capacity_Ah")]
    pub rated_capacity_ah: f64,
    pub integration: IntegrationRule,
    pub n_cycles: usize,
    pub mean_soe: f64,
    pub pcc_soe_soh: Option<f64>,
    pub pcc_note: Option<String>,
    pub mk_diff: MkResult,
    pub linear_trend: bool,
    pub fit: FitResult,
    pub audit: CleaningAudit,
    pub skipped: Vec<SkippedCycle>,
    pub series: MetricsSeries,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Failure {
    pub source: String,
    pub segment: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub reports: Vec<BatteryReport>,
    pub matrix: ConditionMatrix,
    pub failures: Vec<Failure>,
}

impl Analysis {
    pub fn report(&self, series_id: &str) -> Option<&BatteryReport> {
        self.reports.iter().find(|r| r.series_id == series_id)
    }
}

/// Runs clean → metrics → trend on one history (already segmented if needed).
pub fn analyze_history(
    history: &BatteryHistory,
    segment: Option<&Segment>,
    config: &AnalysisConfig,
) -> Result<BatteryReport> {
    let policy = config
        .cleaning
        .unwrap_or_else(CleaningPolicy::disabled)
        .with_rule(config.rule);
    analyze_with_policy(history, segment, config, &policy)
}

fn analyze_with_policy(
    history: &BatteryHistory,
    segment: Option<&Segment>,
    config: &AnalysisConfig,
    policy: &CleaningPolicy,
) -> Result<BatteryReport> {
    let cleaned = clean_history(history, policy)?;
    let (series, skipped) = compute_series(&cleaned.history, config.rule);
    if series.len() < MIN_CYCLES {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            min: MIN_CYCLES,
        });
    }

    let soe = series.soe();
    let (pcc, pcc_note) = match pearson(&soe, &series.soh()) {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let (mk, linear) = verify_linearity(&soe, &config.mk)?;
    let fit = ols_fit(&series)?;
    let mean_soe = series.mean_soe().unwrap_or(f64::NAN);

    let uniform = cleaned.history.uniform_conditions();
    let conditions = match segment {
        Some(seg) => seg.conditions,
        None => uniform.unwrap_or(cleaned.history.cycles[0].conditions),
    };

    Ok(BatteryReport {
        series_id: match segment {
            Some(seg) => format!("{}/{}", history.battery_id, seg.label),
            None => history.battery_id.clone(),
        },
        battery_id: history.battery_id.clone(),
        segment: segment.map(|s| s.label.clone()),
        conditions,
        conditions_uniform: uniform.is_some(),
        rated_capacity_ah: history.rated_capacity_ah,
        integration: config.rule,
        n_cycles: series.len(),
        mean_soe,
        pcc_soe_soh: pcc,
        pcc_note,
        mk_diff: mk,
        linear_trend: linear,
        fit,
        audit: cleaned.audit,
        skipped,
        series,
    })
}

/// Parses one telemetry/metadata pair and analyses each of its units.
fn analyze_pair(
    telemetry: &Path,
    metadata: &Path,
    config: &AnalysisConfig,
) -> (Vec<BatteryReport>, Vec<Failure>) {
    let source = telemetry
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let fail = |segment: Option<&Segment>, e: Error| Failure {
        source: source.clone(),
        segment: segment.map(|s| s.label.clone()),
        message: e.to_string(),
    };

    let history = match read_history(telemetry, metadata) {
        Ok(h) => h,
        Err(e) => return (vec![], vec![fail(None, e)]),
    };
    let segments = match config.segment_overrides.get(&history.battery_id) {
        Some(specs) => match Metadata::read(metadata) {
            Ok(meta) => specs.iter().map(|s| meta.resolve_segment(s)).collect(),
            Err(e) => return (vec![], vec![fail(None, e)]),
        },
        None => history.segments.clone(),
    };

    if segments.is_empty() {
        return match analyze_history(&history, None, config) {
            Ok(r) => (vec![r], vec![]),
            Err(e) => (vec![], vec![fail(None, e)]),
        };
    }
    let parts = match segment_history(&history, &segments) {
        Ok(p) => p,
        Err(e) => return (vec![], vec![fail(None, e)]),
    };
    // Only the part holding the battery's very first cycle loses its first cycle.
    let first_index = history.cycles.first().map(|c| c.cycle_index);
    let base = config
        .cleaning
        .unwrap_or_else(CleaningPolicy::disabled)
        .with_rule(config.rule);
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (seg, part) in segments.iter().zip(&parts) {
        let policy = CleaningPolicy {
            drop_first_cycle: base.drop_first_cycle
                && part.cycles.first().map(|c| c.cycle_index) == first_index,
            ..base
        };
        match analyze_with_policy(part, Some(seg), config, &policy) {
            Ok(r) => reports.push(r),
            Err(e) => failures.push(fail(Some(seg), e)),
        }
    }
    (reports, failures)
}

/// A telemetry file and its metadata sidecar.
type InputPair = (PathBuf, PathBuf);

/// Telemetry (`<stem>.csv`) and metadata (`<stem>.toml`) files found in `dir`,
/// plus stems that have only one of the two.
fn discover(dir: &Path) -> Result<(Vec<InputPair>, Vec<Failure>)> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut csv: BTreeMap<String, PathBuf> = BTreeMap::new();
    let mut toml: BTreeMap<String, PathBuf> = BTreeMap::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if !path.is_file() {
            continue;
        }
        let (Some(stem), Some(ext)) = (path.file_stem(), path.extension()) else {
            continue;
        };
        let stem = stem.to_string_lossy().into_owned();
        match ext.to_string_lossy().as_ref() {
            "csv" => {
                csv.insert(stem, path);
            }
            "toml" => {
                toml.insert(stem, path);
            }
            _ => {}
        }
    }
    if csv.is_empty() && toml.is_empty() {
        return Err(Error::EmptyInput(dir.to_path_buf()));
    }

    let mut pairs = Vec::new();
    let mut orphans = Vec::new();
    for (stem, path) in &csv {
        match toml.get(stem) {
            Some(meta) => pairs.push((path.clone(), meta.clone())),
            None => orphans.push(Failure {
                source: stem.clone(),
                segment: None,
                message: format!("missing metadata file {stem}.toml"),
            }),
        }
    }
    for stem in toml.keys().filter(|s| !csv.contains_key(*s)) {
        orphans.push(Failure {
            source: stem.clone(),
            segment: None,
            message: format!("missing telemetry file {stem}.csv"),
        });
    }
    Ok((pairs, orphans))
}

/// Analyses every battery in `dir`. Per-battery failures are collected, not
/// fatal; a directory with no telemetry or metadata files is an error.
/// Batteries are processed in parallel and merged in a fixed order.
pub fn analyze(dir: &Path, config: &AnalysisConfig) -> Result<Analysis> {
    let (pairs, mut failures) = discover(dir)?;
    let results: Vec<_> = pairs
        .par_iter()
        .map(|(csv, meta)| analyze_pair(csv, meta, config))
        .collect();

    let mut reports = Vec::new();
    for (r, f) in results {
        reports.extend(r);
        failures.extend(f);
    }
    // Stable: segments of one battery keep their definition order.
    reports.sort_by(|a, b| a.battery_id.cmp(&b.battery_id));
    failures.sort();

    let matrix = ConditionMatrix::build(&reports);
    Ok(Analysis {
        reports,
        matrix,
        failures,
    })
}
