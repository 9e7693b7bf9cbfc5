//! Ordinary least squares on log–log data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// RMS residual above which a log–log fit is not treated as a power law.
pub const POWER_LAW_RESIDUAL_LIMIT: f64 = 0.1;

/// `log y ≈ intercept + slope · log x`, with the RMS residual of the fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

impl PowerLawFit {
    pub fn is_power_law(&self) -> bool {
        self.residual <= POWER_LAW_RESIDUAL_LIMIT
    }

    /// The fitted prefactor `C` in `y ≈ C x^slope`.
    pub fn prefactor(&self) -> f64 {
        self.intercept.exp()
    }
}

pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<PowerLawFit> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "fit needs matching lengths, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::InvalidInput("fit needs at least two points".into()));
    }
    if let Some(bad) = x.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidInput(format!("abscissa {bad} is not positive")));
    }
    if y.iter().all(|v| *v == 0.0) {
        return Err(Error::DegenerateFit("quantity vanishes on the whole range".into()));
    }
    if let Some(bad) = y.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::DegenerateFit(format!(
            "quantity {bad} cannot be fitted on a log scale"
        )));
    }

    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| {
            let d = b - (intercept + slope * a);
            d * d
        })
        .sum();
    Ok(PowerLawFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    })
}

/// `count` points from `lo` to `hi` inclusive, evenly spaced in `log`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn recovers_exact_power_law() {
        let x = log_spaced(1.0, 100.0, 10);
        let y: Vec<f64> = x.iter().map(|r| 3.0 * r.powf(-2.5)).collect();
        let fit = fit_power_law(&x, &y).unwrap();
        assert_abs_diff_eq!(fit.slope, -2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.prefactor(), 3.0, epsilon = 1e-10);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn zero_data_is_degenerate() {
        let x = log_spaced(1.0, 10.0, 8);
        assert!(matches!(
            fit_power_law(&x, &[0.0; 8]),
            Err(Error::DegenerateFit(_))
        ));
    }

    #[test]
    fn log_spacing_hits_endpoints() {
        let v = log_spaced(10.0, 1000.0, 3);
        assert_abs_diff_eq!(v[0], 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v[1], 100.0, epsilon = 1e-10);
        assert_abs_diff_eq!(v[2], 1000.0, epsilon = 1e-9);
    }
}
