use std::io::Write;
use std::path::{Path, PathBuf};

use super::plot::{export_plot_series, Factor, PlotKind};
use super::summary::{render_summary, SummaryFormat};
use super::Analysis;
use crate::error::{Error, Result};

/// Replaces characters outside `[A-Za-z0-9._-]` with `_`.
pub fn file_safe(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes `contents` to a temporary file next to `path`, then renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn json_bytes<T: serde::Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputFiles {
    pub written: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

/// Writes per-report JSON documents, the condition matrix, the failure list
/// and the summary table under `out`.
pub fn write_analysis(
    analysis: &Analysis,
    out: &Path,
    format: SummaryFormat,
) -> Result<OutputFiles> {
    let mut files = OutputFiles::default();
    let mut emit = |path: PathBuf, bytes: Vec<u8>| -> Result<()> {
        write_atomic(&path, &bytes)?;
        files.written.push(path);
        Ok(())
    };

    for report in &analysis.reports {
        let path = out
            .join("reports")
            .join(format!("{}.json", file_safe(&report.series_id)));
        emit(path, json_bytes(report)?)?;
    }
    emit(out.join("matrix.json"), json_bytes(&analysis.matrix)?)?;
    emit(out.join("failures.json"), json_bytes(&analysis.failures)?)?;
    emit(
        out.join(format!("summary.{}", format.extension())),
        render_summary(&analysis.reports, format).into_bytes(),
    )?;
    Ok(files)
}

/// Writes plot tables under `out`. With `kind = None` every kind is written,
/// factor comparisons once per factor.
pub fn write_plot_data(
    analysis: &Analysis,
    out: &Path,
    kind: Option<PlotKind>,
    factor: Option<Factor>,
) -> Result<OutputFiles> {
    let mut jobs: Vec<(PlotKind, Option<Factor>)> = Vec::new();
    let kinds = match kind {
        Some(k) => vec![k],
        None => vec![
            PlotKind::Trajectory,
            PlotKind::FittedTrend,
            PlotKind::Range,
            PlotKind::FactorComparison,
        ],
    };
    for k in kinds {
        if k == PlotKind::FactorComparison {
            match factor {
                Some(f) => jobs.push((k, Some(f))),
                None => jobs.extend(Factor::ALL.iter().map(|f| (k, Some(*f)))),
            }
        } else {
            jobs.push((k, None));
        }
    }

    let mut files = OutputFiles::default();
    for (k, f) in jobs {
        let name = match (k, f) {
            (PlotKind::Trajectory, _) => "trajectory.csv".to_string(),
            (PlotKind::FittedTrend, _) => "fitted_trend.csv".to_string(),
            (PlotKind::Range, _) => "range.csv".to_string(),
            (PlotKind::FactorComparison, f) => {
                format!("factor_{}.csv", f.unwrap_or(Factor::Current))
            }
        };
        let table = export_plot_series(&analysis.reports, k, f);
        let path = out.join(name);
        write_atomic(&path, table.to_csv().as_bytes())?;
        files.written.push(path);
        files.warnings.extend(table.warnings);
    }
    Ok(files)
}
