use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cycledata::{PhaseTrace, Sample};
use crate::error::{Error, Result};

/// Quadrature rule for sampled phase traces. Step widths come straight from
/// the timestamps; nothing is resampled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegrationRule {
    /// `Σ f_i · (t_{i+1} − t_i)` over i = 0..n−2.
    #[default]
    #[serde(rename = "left")]
    LeftRect,
    /// `Σ (f_i + f_{i+1}) / 2 · (t_{i+1} − t_i)`.
    Trapezoid,
}

impl fmt::Display for IntegrationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IntegrationRule::LeftRect => "left",
            IntegrationRule::Trapezoid => "trapezoid",
        })
    }
}

impl FromStr for IntegrationRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" | "leftrect" | "left-rect" => Ok(IntegrationRule::LeftRect),
            "trapezoid" | "trap" => Ok(IntegrationRule::Trapezoid),
            other => Err(format!("unknown integration rule {other:?}")),
        }
    }
}

fn integrate_by<F>(samples: &[Sample], rule: IntegrationRule, f: F) -> Result<f64>
where
    F: Fn(&Sample) -> f64,
{
    if samples.len() < 2 {
        return Err(Error::DegenerateTrace(samples.len()));
    }
    let total = samples
        .windows(2)
        .map(|w| {
            let dt = w[1].time_s - w[0].time_s;
            match rule {
                IntegrationRule::LeftRect => f(&w[0]) * dt,
                IntegrationRule::Trapezoid => 0.5 * (f(&w[0]) + f(&w[1])) * dt,
            }
        })
        .sum();
    Ok(total)
}

/// Energy delivered through the terminals over the trace, in joules.
pub fn integrate_power(trace: &PhaseTrace, rule: IntegrationRule) -> Result<f64> {
    integrate_by(&trace.samples, rule, Sample::power_w)
}

/// Charge moved over the trace, in ampere-hours.
pub fn integrate_charge(trace: &PhaseTrace, rule: IntegrationRule) -> Result<f64> {
    Ok(integrate_by(&trace.samples, rule, |s| s.current_a)? / 3600.0)
}
