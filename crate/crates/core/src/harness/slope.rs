use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Least-squares fit of `ln NR = a + b ln T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub policy: String,
    pub slope: f64,
    pub intercept: f64,
    /// Half-width of the 95% confidence interval of the slope.
    pub half_width: f64,
    pub points_used: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Fits the log-log slope of `(T, NR)` points, dropping `NR <= 0`.
pub fn fit_loglog_slope(policy: &str, points: &[(f64, f64)]) -> Result<SlopeFit> {
    let mut warnings = Vec::new();
    let mut xy = Vec::with_capacity(points.len());
    for &(t, nr) in points {
        if nr > 0.0 && t > 0.0 && nr.is_finite() {
            xy.push((t.ln(), nr.ln()));
        } else {
            warnings.push(format!("{policy}: excluded point T = {t}, NR = {nr}"));
        }
    }
    let n = xy.len();
    if n < 3 {
        return Err(Error::NotEnoughData { usable: n });
    }
    let nf = n as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::InvalidParameter("slope fit needs distinct horizons".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xy.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let se = (rss / (nf - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, nf - 2.0)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.975);
    Ok(SlopeFit {
        policy: policy.to_owned(),
        slope,
        intercept,
        half_width: t * se,
        points_used: n,
        warnings,
    })
}
