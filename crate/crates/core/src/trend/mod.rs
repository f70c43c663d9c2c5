//! Linearity check and linear trend model for SOE series.
//!
//! A series follows a linear trend when its first difference shows no
//! monotonic trend under the Mann-Kendall test. Standard hypothesis-test
//! semantics apply: a large p-value means the no-trend null is not rejected.

mod mann_kendall;
mod regression;

use serde::{Deserialize, Serialize};

pub use mann_kendall::{
    mk_test, mk_test_with, s_statistic, tie_groups, two_sided_p, variance_s, MkOptions, MkResult,
    Thresholds, TieGroup, TrendClass,
};
pub use regression::{ols_fit, ols_fit_points, FitResult};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffSeries {
    pub source_id: String,
    pub values: Vec<f64>,
}

impl DiffSeries {
    pub fn of(source_id: impl Into<String>, series: &[f64]) -> Result<Self> {
        Ok(Self {
            source_id: source_id.into(),
            values: first_difference(series)?,
        })
    }
}

/// `out[i] = series[i + 1] - series[i]`.
pub fn first_difference(series: &[f64]) -> Result<Vec<f64>> {
    if series.len() < 2 {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            min: 2,
        });
    }
    Ok(series.windows(2).map(|w| w[1] - w[0]).collect())
}

/// Mann-Kendall result on the first difference, and whether the original
/// series is judged linear (difference classified `NoTrend`).
pub fn verify_linearity(series: &[f64], opts: &MkOptions) -> Result<(MkResult, bool)> {
    if series.len() < 4 {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            min: 4,
        });
    }
    let diff = first_difference(series)?;
    let mk = mk_test_with(&diff, opts)?;
    let linear = mk.classification == TrendClass::NoTrend;
    Ok((mk, linear))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn difference_examples() {
        assert_eq!(first_difference(&[1.0, 2.0, 4.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(first_difference(&[7.0; 5]).unwrap(), vec![0.0; 4]);
        let line: Vec<f64> = (0..10).map(|t| 3.0 * f64::from(t) + 1.0).collect();
        assert!(first_difference(&line).unwrap().iter().all(|d| *d == 3.0));
        assert!(first_difference(&[1.0]).is_err());
        let d = DiffSeries::of("B", &[1.0, 3.0]).unwrap();
        assert_eq!(
            (d.source_id.as_str(), d.values.as_slice()),
            ("B", &[2.0][..])
        );
    }

    #[test]
    fn exact_line_is_linear() {
        // Dyadic slope and intercept so every difference is bit-identical.
        let line: Vec<f64> = (1..=30).map(|t| 1.0 - 0.5 * f64::from(t)).collect();
        let (mk, linear) = verify_linearity(&line, &MkOptions::default()).unwrap();
        assert!(linear);
        assert_eq!(mk.p_two_sided, 1.0);
    }

    #[test]
    fn quadratic_is_not_linear() {
        let sq: Vec<f64> = (1..=20).map(|t| f64::from(t * t)).collect();
        let (mk, linear) = verify_linearity(&sq, &MkOptions::default()).unwrap();
        assert!(!linear);
        assert_eq!(mk.n, 19);
        assert_eq!(mk.s_stat, 171);
        assert_eq!(mk.classification, TrendClass::TrendPresent);
    }

    #[test]
    fn too_short_for_linearity() {
        assert!(verify_linearity(&[1.0, 2.0, 3.0], &MkOptions::default()).is_err());
    }

    proptest! {
        #[test]
        fn difference_of_cumsum_is_identity(v in prop::collection::vec(-1e3f64..1e3, 1..100)) {
            let mut acc = 0.0;
            let mut cum = vec![0.0];
            for x in &v {
                acc += x;
                cum.push(acc);
            }
            let d = first_difference(&cum).unwrap();
            prop_assert_eq!(d.len(), v.len());
            for (a, b) in d.iter().zip(&v) {
                prop_assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0) + 1e-9);
            }
        }
    }
}
