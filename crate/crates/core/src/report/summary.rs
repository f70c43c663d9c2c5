use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::BatteryReport;
use crate::trend::TrendClass;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SummaryFormat {
    #[default]
    Text,
    Csv,
    Markdown,
}

impl SummaryFormat {
    pub fn extension(self) -> &'static str {
        match self {
            SummaryFormat::Text => "txt",
            SummaryFormat::Csv => "csv",
            SummaryFormat::Markdown => "md",
        }
    }
}

impl FromStr for SummaryFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" | "txt" => Ok(SummaryFormat::Text),
            "csv" => Ok(SummaryFormat::Csv),
            "markdown" | "md" => Ok(SummaryFormat::Markdown),
            other => Err(format!("unknown summary format {other:?}")),
        }
    }
}

const COLUMNS: [&str; 8] = [
    "battery_id",
    "n_cycles",
    "pcc",
    "mk_p",
    "verdict",
    "alpha",
    "eta",
    "soe_range",
];

/// Formats `x` with `digits` significant digits, in positional notation
/// unless the magnitude is below 1e-4.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return format!("{:.*}", digits.saturating_sub(1), 0.0);
    }
    let magnitude = x.abs().log10().floor() as i64;
    if magnitude < -4 {
        return format!("{x:.*e}", digits.saturating_sub(1));
    }
    let mut decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    // Rounding can carry into a new leading digit (9.999995 -> 10.00000).
    let rounded: f64 = s.parse().unwrap_or(x);
    if rounded != 0.0 && rounded.abs().log10().floor() as i64 > magnitude && decimals > 0 {
        decimals -= 1;
        s = format!("{x:.decimals$}");
    }
    s
}

fn verdict(class: TrendClass) -> &'static str {
    match class {
        TrendClass::NoTrend => "linear",
        TrendClass::TrendPresent => "nonlinear",
        TrendClass::Inconclusive => "inconclusive",
    }
}

fn row(r: &BatteryReport) -> [String; 8] {
    [
        r.series_id.clone(),
        r.n_cycles.to_string(),
        r.pcc_soe_soh
            .map_or_else(|| "n/a".to_string(), |v| fmt_sig(v, 6)),
        fmt_sig(r.mk_diff.p_two_sided, 6),
        verdict(r.mk_diff.classification).to_string(),
        fmt_sig(r.fit.alpha, 6),
        fmt_sig(r.fit.eta, 6),
        format!(
            "{}..{}",
            fmt_sig(r.fit.soe_range.0, 6),
            fmt_sig(r.fit.soe_range.1, 6)
        ),
    ]
}

/// One row per report, ordered by battery id and then by first cycle.
pub fn render_summary(reports: &[BatteryReport], format: SummaryFormat) -> String {
    let mut sorted: Vec<&BatteryReport> = reports.iter().collect();
    let first = |r: &BatteryReport| r.series.points.first().map(|p| p.cycle_index);
    sorted.sort_by(|a, b| {
        a.battery_id
            .cmp(&b.battery_id)
            .then_with(|| first(a).cmp(&first(b)))
            .then_with(|| a.series_id.cmp(&b.series_id))
    });
    let rows: Vec<[String; 8]> = sorted.into_iter().map(row).collect();

    let mut out = String::new();
    match format {
        SummaryFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(COLUMNS).expect("in-memory write");
            for r in &rows {
                w.write_record(r).expect("in-memory write");
            }
            out = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8");
        }
        SummaryFormat::Markdown => {
            let _ = writeln!(out, "| {} |", COLUMNS.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(COLUMNS.len()));
            for r in &rows {
                let _ = writeln!(out, "| {} |", r.join(" | "));
            }
        }
        SummaryFormat::Text => {
            let mut widths: Vec<usize> = COLUMNS.iter().map(|c| c.len()).collect();
            for r in &rows {
                for (w, cell) in widths.iter_mut().zip(r) {
                    *w = (*w).max(cell.len());
                }
            }
            let line = |cells: &[&str]| -> String {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            let _ = writeln!(out, "{}", line(&COLUMNS));
            for r in &rows {
                let cells: Vec<&str> = r.iter().map(String::as_str).collect();
                let _ = writeln!(out, "{}", line(&cells));
            }
        }
    }
    out
}
