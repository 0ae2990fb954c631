//! Least-squares fits: straight lines (optionally weighted) and exponential decays.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub intercept_se: f64,
    pub slope_se: f64,
}

/// Fit `y = intercept + slope * x`.
///
/// With `y_err` every point is weighted by `1 / y_err^2` and the parameter
/// errors come from `(X^T W X)^-1`. Without it the fit is ordinary least
/// squares and the errors use the residual variance `RSS / (n - 2)` (zero
/// when `n = 2`).
pub fn linear_fit(x: &[f64], y: &[f64], y_err: Option<&[f64]>) -> Result<LinearFit> {
    let n = x.len();
    if y.len() != n || y_err.is_some_and(|e| e.len() != n) {
        return Err(Error::Dimension("fit inputs differ in length".into()));
    }
    if n < 2 {
        return Err(Error::Domain(format!("a line needs at least 2 points, got {n}")));
    }
    let weights: Vec<f64> = match y_err {
        Some(err) => {
            if let Some(bad) = err.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
                return Err(Error::Domain(format!("weights need positive finite errors, got {bad}")));
            }
            err.iter().map(|e| 1.0 / (e * e)).collect()
        }
        None => vec![1.0; n],
    };
    let sw: f64 = weights.iter().sum();
    let sx: f64 = weights.iter().zip(x).map(|(w, x)| w * x).sum();
    let sy: f64 = weights.iter().zip(y).map(|(w, y)| w * y).sum();
    let xm = sx / sw;
    let ym = sy / sw;
    let sxx: f64 = weights.iter().zip(x).map(|(w, x)| w * (x - xm) * (x - xm)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Domain("all abscissae coincide".into()));
    }
    let sxy: f64 = weights
        .iter()
        .zip(x.iter().zip(y))
        .map(|(w, (x, y))| w * (x - xm) * (y - ym))
        .sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;

    let scale = if y_err.is_some() {
        1.0
    } else if n > 2 {
        let rss: f64 = x
            .iter()
            .zip(y)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        rss / (n - 2) as f64
    } else {
        0.0
    };
    let slope_var = scale / sxx;
    let intercept_var = scale * (1.0 / sw + xm * xm / sxx);
    Ok(LinearFit {
        intercept,
        slope,
        intercept_se: intercept_var.max(0.0).sqrt(),
        slope_se: slope_var.max(0.0).sqrt(),
    })
}

/// Thermodynamic-limit extrapolation of a finite-size series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    pub value: f64,
    pub std_error: f64,
    pub slope: f64,
}

/// Fits `r(L) = r_inf + a / (L - 1)` and returns `r_inf`.
///
/// Points are weighted by their standard errors when all of them are
/// positive, otherwise the fit is unweighted. At least three sizes are required.
pub fn extrapolate_inverse_size(sizes: &[usize], values: &[f64], std_errors: &[f64]) -> Result<Extrapolation> {
    if sizes.len() < 3 {
        return Err(Error::Config(format!(
            "extrapolation needs at least 3 system sizes, got {}",
            sizes.len()
        )));
    }
    if sizes.iter().any(|&l| l < 2) {
        return Err(Error::Config("system sizes must be >= 2".into()));
    }
    let x: Vec<f64> = sizes.iter().map(|&l| 1.0 / (l - 1) as f64).collect();
    let weighted = std_errors.iter().all(|&e| e > 0.0 && e.is_finite());
    let fit = linear_fit(&x, values, weighted.then_some(std_errors))?;
    Ok(Extrapolation {
        value: fit.intercept,
        std_error: fit.intercept_se,
        slope: fit.slope,
    })
}

/// `S(N) ~ A exp(-lambda N)` fitted on `ln S` over the points with `S > floor`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFit {
    pub lambda: f64,
    pub log_amplitude: f64,
    pub points: usize,
}

/// `None` when fewer than two points lie above `floor`.
pub fn fit_exponential_decay(n: &[f64], values: &[f64], floor: f64) -> Option<ExponentialFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = n
        .iter()
        .zip(values)
        .filter(|(_, &v)| v > floor)
        .map(|(&x, &v)| (x, v.ln()))
        .unzip();
    if x.len() < 2 {
        return None;
    }
    let fit = linear_fit(&x, &y, None).ok()?;
    Some(ExponentialFit {
        lambda: -fit.slope,
        log_amplitude: fit.intercept,
        points: x.len(),
    })
}
