use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use soe_analytics::cycledata::{CleaningPolicy, SegmentFile};
use soe_analytics::metrics::IntegrationRule;
use soe_analytics::report::{
    analyze, render_summary, write_analysis, write_atomic, write_plot_data, Analysis,
    AnalysisConfig, Factor, PlotKind, SummaryFormat,
};
use soe_analytics::trend::{MkOptions, Thresholds};

const EXIT_PARTIAL: u8 = 1;
const EXIT_FATAL: u8 = 2;

#[derive(Parser)]
#[command(
    name = "soe",
    version,
    about = "Battery energy-efficiency (SOE) analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyse every battery and write reports, matrix, failures and summary.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// text, csv or markdown.
        #[arg(long, default_value = "text")]
        format: SummaryFormat,
    },
    /// Write plot-ready delimited series.
    Plotdata {
        #[command(flatten)]
        common: Common,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// trajectory, fitted, range or factor (default: all).
        #[arg(long)]
        kind: Option<PlotKind>,
        /// temperature, current or cutoff (default: all three).
        #[arg(long)]
        factor: Option<Factor>,
    },
    /// Print the summary table (or write it with --out).
    Summary {
        #[command(flatten)]
        common: Common,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// text, csv or markdown.
        #[arg(long, default_value = "text")]
        format: SummaryFormat,
    },
}

#[derive(Args)]
struct Common {
    /// Directory holding <id>.csv telemetry and <id>.toml metadata pairs.
    #[arg(long)]
    input: PathBuf,
    /// Quadrature rule: left or trapezoid.
    #[arg(long, default_value = "left")]
    integration: IntegrationRule,
    /// Trend threshold for the Mann-Kendall test.
    #[arg(long, default_value_t = 0.05)]
    significance: f64,
    /// Keep every cycle (no first-cycle or anomaly removal).
    #[arg(long)]
    no_clean: bool,
    /// TOML file of segment definitions overriding the metadata.
    #[arg(long)]
    segments: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<AnalysisConfig, String> {
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return Err(format!(
                "--significance must be in (0, 1), got {}",
                self.significance
            ));
        }
        let segment_overrides = match &self.segments {
            Some(path) => SegmentFile::read(path)
                .map_err(|e| e.to_string())?
                .by_battery(),
            None => Default::default(),
        };
        Ok(AnalysisConfig {
            rule: self.integration,
            cleaning: (!self.no_clean).then(CleaningPolicy::default),
            mk: MkOptions {
                thresholds: Thresholds::with_significance(self.significance),
                tie_epsilon: None,
            },
            segment_overrides,
        })
    }

    fn run(&self) -> Result<Analysis, String> {
        let config = self.config()?;
        analyze(&self.input, &config).map_err(|e| e.to_string())
    }
}

fn report_failures(analysis: &Analysis) -> ExitCode {
    for f in &analysis.failures {
        match &f.segment {
            Some(seg) => eprintln!("warning: {} [{seg}]: {}", f.source, f.message),
            None => eprintln!("warning: {}: {}", f.source, f.message),
        }
    }
    if analysis.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_PARTIAL)
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Analyze {
            common,
            out,
            format,
        } => {
            let analysis = common.run()?;
            write_analysis(&analysis, &out, format).map_err(|e| e.to_string())?;
            Ok(report_failures(&analysis))
        }
        Command::Plotdata {
            common,
            out,
            kind,
            factor,
        } => {
            let analysis = common.run()?;
            let files =
                write_plot_data(&analysis, &out, kind, factor).map_err(|e| e.to_string())?;
            for w in &files.warnings {
                eprintln!("warning: {w}");
            }
            Ok(report_failures(&analysis))
        }
        Command::Summary {
            common,
            out,
            format,
        } => {
            let analysis = common.run()?;
            let text = render_summary(&analysis.reports, format);
            match out.as_deref() {
                Some(path) => write_summary(path, &text)?,
                None => print!("{text}"),
            }
            Ok(report_failures(&analysis))
        }
    }
}

fn write_summary(path: &Path, text: &str) -> Result<(), String> {
    write_atomic(path, text.as_bytes()).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FATAL)
        }
    }
}
