use crate::error::{Error, Result};

/// Pearson correlation coefficient of two equally long series.
///
/// When exactly one series is constant there is no linear association to
/// measure and 0.0 is returned; when both are constant the coefficient is
/// undefined and an error is returned.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::SeriesTooShort {
            len: x.len(),
            min: 2,
        });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;

    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let dx = a - mean_x;
        let dy = b - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    match (sxx == 0.0, syy == 0.0) {
        (true, true) => Err(Error::UndefinedCorrelation),
        (true, false) | (false, true) => Ok(0.0),
        (false, false) => Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)),
    }
}
