use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::MetricsSeries;

/// Least-squares line `y = alpha * t + eta` with its residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub alpha: f64,
    pub eta: f64,
    pub residuals: Vec<f64>,
    pub n: usize,
    /// Fitted values at the first and last cycle, as `(low, high)`.
    pub soe_range: (f64, f64),
}

impl FitResult {
    pub fn predict(&self, t: f64) -> f64 {
        self.alpha * t + self.eta
    }
}

/// Fits a straight line through `(t, y)` pairs.
pub fn ols_fit_points(t: &[f64], y: &[f64]) -> Result<FitResult> {
    if t.len() != y.len() {
        return Err(Error::LengthMismatch(t.len(), y.len()));
    }
    if t.len() < 2 {
        return Err(Error::SeriesTooShort {
            len: t.len(),
            min: 2,
        });
    }
    if t.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = t.len() as f64;
    let t_mean = t.iter().sum::<f64>() / n;
    let y_mean = y.iter().sum::<f64>() / n;

    let (mut stt, mut sty) = (0.0, 0.0);
    for (ti, yi) in t.iter().zip(y) {
        let dt = ti - t_mean;
        stt += dt * dt;
        sty += dt * (yi - y_mean);
    }
    if stt == 0.0 {
        return Err(Error::DegenerateDesign);
    }
    let alpha = sty / stt;
    let eta = y_mean - alpha * t_mean;
    let residuals = t
        .iter()
        .zip(y)
        .map(|(ti, yi)| yi - (alpha * ti + eta))
        .collect();

    let t_min = t.iter().copied().fold(f64::INFINITY, f64::min);
    let t_max = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (a, b) = (alpha * t_min + eta, alpha * t_max + eta);
    Ok(FitResult {
        alpha,
        eta,
        residuals,
        n: t.len(),
        soe_range: (a.min(b), a.max(b)),
    })
}

/// Fits the SOE channel of a series against its cycle numbers.
pub fn ols_fit(series: &MetricsSeries) -> Result<FitResult> {
    ols_fit_points(&series.cycle_numbers(), &series.soe())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_line() {
        let t: Vec<f64> = (0..5).map(f64::from).collect();
        let y: Vec<f64> = t.iter().map(|t| 0.9 - 0.001 * t).collect();
        let fit = ols_fit_points(&t, &y).unwrap();
        assert!((fit.alpha + 0.001).abs() < 1e-12);
        assert!((fit.eta - 0.9).abs() < 1e-12);
        assert!(fit.residuals.iter().all(|r| r.abs() < 1e-12));
        assert!((fit.soe_range.0 - 0.896).abs() < 1e-12);
        assert!((fit.soe_range.1 - 0.9).abs() < 1e-12);
    }

    #[test]
    fn three_point_vee() {
        let fit = ols_fit_points(&[0.0, 1.0, 2.0], &[1.0, 0.0, 1.0]).unwrap();
        assert!(fit.alpha.abs() < 1e-15);
        assert!((fit.eta - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate() {
        assert!(matches!(
            ols_fit_points(&[3.0, 3.0, 3.0], &[1.0, 2.0, 3.0]),
            Err(Error::DegenerateDesign)
        ));
        assert!(matches!(
            ols_fit_points(&[1.0], &[1.0]),
            Err(Error::SeriesTooShort { .. })
        ));
    }

    proptest! {
        #[test]
        fn residuals_orthogonal(y in prop::collection::vec(0.5f64..1.0, 2..300)) {
            let t: Vec<f64> = (1..=y.len()).map(|i| i as f64).collect();
            let fit = ols_fit_points(&t, &y).unwrap();
            let s0: f64 = fit.residuals.iter().sum();
            let s1: f64 = fit.residuals.iter().zip(&t).map(|(r, t)| r * t).sum();
            prop_assert!(s0.abs() <= 1e-9);
            prop_assert!(s1.abs() <= 1e-9);
        }

        #[test]
        fn offset_shifts_intercept_only(
            y in prop::collection::vec(0.5f64..1.0, 2..100),
            c in -1.0f64..1.0,
        ) {
            let t: Vec<f64> = (1..=y.len()).map(|i| i as f64).collect();
            let a = ols_fit_points(&t, &y).unwrap();
            let shifted: Vec<f64> = y.iter().map(|v| v + c).collect();
            let b = ols_fit_points(&t, &shifted).unwrap();
            prop_assert!((a.alpha - b.alpha).abs() <= 1e-12);
            prop_assert!((b.eta - a.eta - c).abs() <= 1e-12);
        }
    }
}
