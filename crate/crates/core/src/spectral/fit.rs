// SPDX-License-Identifier: Apache-2.0

use crate::error::{Error, Result};

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub slope_se: f64,
    /// 95% confidence interval of the slope.
    pub ci: (f64, f64),
    pub points: Vec<(f64, f64)>,
}

impl LogLogFit {
    pub fn ci_width(&self) -> f64 {
        self.ci.1 - self.ci.0
    }
}

/// Two-sided 97.5% Student quantile.
fn t_quantile(df: usize) -> f64 {
    const T: [f64; 10] = [
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
    ];
    match df {
        0 => f64::INFINITY,
        1..=10 => T[df - 1],
        11..=30 => 2.228 - (df - 10) as f64 * (2.228 - 2.042) / 20.0,
        _ => 1.96,
    }
}

/// Fits `ln y = a + s ln x`.
///
/// With `log_se` (standard errors of `ln y`) the fit is weighted and the
/// slope error comes from the weights; otherwise it is estimated from the
/// residuals.
pub fn fit_loglog(points: &[(f64, f64)], log_se: Option<&[f64]>) -> Result<LogLogFit> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(
            "a slope fit needs at least two points".into(),
        ));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0) || !(y > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "log-log fit needs positive data, got {points:?}"
        )));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let w: Vec<f64> = match log_se {
        Some(se) => {
            if se.len() != points.len() || se.iter().any(|&s| !(s > 0.0)) {
                return Err(Error::InvalidArgument(
                    "one positive standard error per point".into(),
                ));
            }
            se.iter().map(|s| 1.0 / (s * s)).collect()
        }
        None => vec![1.0; points.len()],
    };
    let sw: f64 = w.iter().sum();
    let mx = w.iter().zip(&lx).map(|(w, x)| w * x).sum::<f64>() / sw;
    let my = w.iter().zip(&ly).map(|(w, y)| w * y).sum::<f64>() / sw;
    let sxx: f64 = w
        .iter()
        .zip(&lx)
        .map(|(w, x)| w * (x - mx) * (x - mx))
        .sum();
    let sxy: f64 = (0..lx.len())
        .map(|i| w[i] * (lx[i] - mx) * (ly[i] - my))
        .sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidArgument(
            "abscissae must not all coincide".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let (slope_se, q) = if log_se.is_some() {
        ((1.0 / sxx).sqrt(), 1.96)
    } else {
        let df = lx.len() - 2;
        let rss: f64 = (0..lx.len())
            .map(|i| (ly[i] - intercept - slope * lx[i]).powi(2))
            .sum();
        let se = if df == 0 {
            0.0
        } else {
            (rss / df as f64 / sxx).sqrt()
        };
        (se, if df == 0 { 0.0 } else { t_quantile(df) })
    };
    Ok(LogLogFit {
        slope,
        intercept,
        slope_se,
        ci: (slope - q * slope_se, slope + q * slope_se),
        points: points.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_power_law() {
        let pts: Vec<(f64, f64)> = [8.0, 16.0, 32.0, 64.0]
            .iter()
            .map(|&n: &f64| (n, 3.0 / (n * n)))
            .collect();
        let fit = fit_loglog(&pts, None).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-12);
        assert!((fit.intercept - 3.0f64.ln()).abs() < 1e-12);
        assert!(fit.slope_se < 1e-12);
        let w = fit_loglog(&pts, Some(&[0.1, 0.1, 0.2, 0.2])).unwrap();
        assert!((w.slope + 2.0).abs() < 1e-12 && w.slope_se > 0.0);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(fit_loglog(&[(1.0, 0.0), (2.0, 1.0)], None).is_err());
    }
}
