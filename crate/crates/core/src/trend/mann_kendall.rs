//! Mann-Kendall trend test with tie-corrected variance.

use std::cmp::Ordering;
use std::f64::consts::SQRT_2;
use std::fmt;

use libm::erfc;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrendClass {
    TrendPresent,
    NoTrend,
    Inconclusive,
}

impl fmt::Display for TrendClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrendClass::TrendPresent => "trend-present",
            TrendClass::NoTrend => "no-trend",
            TrendClass::Inconclusive => "inconclusive",
        })
    }
}

/// Dual significance thresholds: below `trend_below` a trend is declared,
/// above `no_trend_above` its absence is; anything in between is inconclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub trend_below: f64,
    pub no_trend_above: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            trend_below: 0.05,
            no_trend_above: 0.10,
        }
    }
}

impl Thresholds {
    /// Uses `significance` as the trend threshold and keeps the no-trend
    /// threshold at 0.10 unless `significance` exceeds it.
    pub fn with_significance(significance: f64) -> Self {
        Self {
            trend_below: significance,
            no_trend_above: significance.max(0.10),
        }
    }

    pub fn classify(&self, p: f64) -> TrendClass {
        if p < self.trend_below {
            TrendClass::TrendPresent
        } else if p > self.no_trend_above {
            TrendClass::NoTrend
        } else {
            TrendClass::Inconclusive
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MkOptions {
    pub thresholds: Thresholds,
    /// Treat values within this distance as tied. `None` means exact equality.
    pub tie_epsilon: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TieGroup {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MkResult {
    pub s_stat: i64,
    pub var_s: f64,
    pub z_mk: f64,
    pub p_two_sided: f64,
    pub n: usize,
    pub tie_groups: Vec<TieGroup>,
    pub classification: TrendClass,
}

fn sign(d: f64, eps: f64) -> i64 {
    if d > eps {
        1
    } else if d < -eps {
        -1
    } else {
        0
    }
}

/// Sum of `sgn(x_j - x_k)` over all pairs `k < j`.
pub fn s_statistic(values: &[f64], tie_epsilon: Option<f64>) -> i64 {
    let eps = tie_epsilon.unwrap_or(0.0);
    values
        .iter()
        .enumerate()
        .map(|(k, &xk)| {
            values[k + 1..]
                .iter()
                .map(|&xj| sign(xj - xk, eps))
                .sum::<i64>()
        })
        .sum()
}

/// Groups of equal values with multiplicity ≥ 2, in ascending value order.
pub fn tie_groups(values: &[f64], tie_epsilon: Option<f64>) -> Vec<TieGroup> {
    let eps = tie_epsilon.unwrap_or(0.0);
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);

    let mut groups = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let anchor = sorted[i];
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] - anchor <= eps {
            j += 1;
        }
        if j - i > 1 {
            groups.push(TieGroup {
                value: anchor,
                multiplicity: j - i,
            });
        }
        i = j;
    }
    groups
}

/// `(n(n-1)(2n+5) - Σ q(q-1)(2q+5)) / 18`, evaluated in integers.
pub fn variance_s(n: usize, ties: &[TieGroup]) -> f64 {
    let term = |q: usize| {
        let q = q as i128;
        q * (q - 1) * (2 * q + 5)
    };
    let total = term(n) - ties.iter().map(|g| term(g.multiplicity)).sum::<i128>();
    total as f64 / 18.0
}

/// Two-sided p-value of a standard normal statistic.
pub fn two_sided_p(z: f64) -> f64 {
    erfc(z.abs() / SQRT_2).clamp(0.0, 1.0)
}

pub fn mk_test(values: &[f64]) -> Result<MkResult> {
    mk_test_with(values, &MkOptions::default())
}

/// Runs the test on `values` in the given order.
///
/// A fully tied series has zero variance; it is reported as `NoTrend` with
/// `z = 0` and `p = 1`.
pub fn mk_test_with(values: &[f64], opts: &MkOptions) -> Result<MkResult> {
    let n = values.len();
    if n < 3 {
        return Err(Error::SeriesTooShort { len: n, min: 3 });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }

    let s = s_statistic(values, opts.tie_epsilon);
    let ties = tie_groups(values, opts.tie_epsilon);
    let var_s = variance_s(n, &ties);

    let (z, p, class) = if var_s <= 0.0 {
        (0.0, 1.0, TrendClass::NoTrend)
    } else {
        let sd = var_s.sqrt();
        let z = match s.cmp(&0) {
            Ordering::Greater => (s - 1) as f64 / sd,
            Ordering::Equal => 0.0,
            Ordering::Less => (s + 1) as f64 / sd,
        };
        let p = two_sided_p(z);
        (z, p, opts.thresholds.classify(p))
    };

    Ok(MkResult {
        s_stat: s,
        var_s,
        z_mk: z,
        p_two_sided: p,
        n,
        tie_groups: ties,
        classification: class,
    })
}
