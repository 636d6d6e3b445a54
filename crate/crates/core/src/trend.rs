//! Power-law trend fitting in log-log coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendFit {
    pub slope: f64,
    pub intercept: f64,
    /// two standard errors of the slope
    pub half_width: f64,
}

impl TrendFit {
    pub fn contains(&self, value: f64) -> bool {
        (self.slope - value).abs() <= self.half_width
    }
}

/// Least-squares fit of log y = intercept + slope·log x.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<TrendFit> {
    if points.len() < 3 {
        return Err(LabError::InvalidArgument(format!(
            "a trend fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0) || !(*y > 0.0)) {
        return Err(LabError::NonPositiveValue(if x > 0.0 { y } else { x }));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let count = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(LabError::InvalidArgument("trend fit needs distinct abscissae".into()));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rss: f64 = logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let standard_error = (rss / (count - 2.0) / sxx).sqrt();
    Ok(TrendFit {
        slope,
        intercept,
        half_width: 2.0 * standard_error,
    })
}

/// Trend models accepted by `fit_trend`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrendModel {
    PowerLaw,
}

pub fn fit_trend(series: &[(f64, f64)], model: TrendModel) -> Result<TrendFit> {
    match model {
        TrendModel::PowerLaw => fit_power_law(series),
    }
}

/// Successive ratios y[i+1]/y[i].
pub fn successive_ratios(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] / w[0]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let fit = fit_power_law(&[(1.0, 1.0), (2.0, 0.5), (4.0, 0.25)]).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-14 && fit.half_width < 1e-12);
        let fit = fit_power_law(&[(1.0, 1.0), (4.0, 0.5), (16.0, 0.25)]).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-14);
    }

    #[test]
    fn rejects_nonpositive_and_short_series() {
        assert!(matches!(
            fit_power_law(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]),
            Err(LabError::NonPositiveValue(_))
        ));
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
    }
}
