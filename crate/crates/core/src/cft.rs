//! Conformal signatures of the geometric entropy.
//!
//! For a critical free boson the entropy of a fraction `σ` of a ring of
//! length `Λ` follows `S = ((c + c̄)/6) log₂[(Λ/πε) sin πσ]`, i.e. a straight
//! line in `log₂ sin πσ` at fixed size and in `log₂ N` at fixed `σ`, with
//! slope `1/3` for `c + c̄ = 2`.

use crate::error::{Error, Result};

/// `(c_total/6) · log₂[(Λ/πε) · sin πσ]`.
pub fn holzhey_entropy(sigma: f64, lambda_total: f64, epsilon: f64, c_total: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::domain(format!("sigma = {sigma} outside (0, 1)")));
    }
    if !(lambda_total > 0.0) || !(epsilon > 0.0) {
        return Err(Error::domain("system length and cutoff must be positive"));
    }
    let arg = lambda_total / (std::f64::consts::PI * epsilon) * (std::f64::consts::PI * sigma).sin();
    Ok(c_total / 6.0 * arg.log2())
}

/// Which parameters of `y = b·x + a` are fitted.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum FitMode {
    /// Ordinary least squares in both `b` and `a`.
    #[default]
    Free,
    /// `b` fixed, `a` by least squares over all points.
    FixedSlope(f64),
    /// `b` fixed, `a` chosen to match the two outermost points on average.
    EndAnchored(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub offset: f64,
    pub rms_residual: f64,
    pub max_residual: f64,
    pub n_points: usize,
    /// Covariance of `(slope, offset)`; fixed parameters have zero variance.
    pub covariance: [[f64; 2]; 2],
}

/// Least-squares fit of `y = slope·x + offset`.
pub fn fit_line(points: &[(f64, f64)], mode: FitMode) -> Result<FitResult> {
    let n = points.len();
    if n < 3 {
        return Err(Error::DegenerateFit(format!("need at least 3 points, got {n}")));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::DegenerateFit("non-finite data point".into()));
    }
    let nf = n as f64;
    let x_mean = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let y_mean = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - x_mean).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - x_mean) * (p.1 - y_mean)).sum();
    let x_scale = points.iter().fold(0.0f64, |m, p| m.max(p.0.abs())).max(1.0);
    if !(sxx > (1e-12 * x_scale).powi(2) * nf) {
        return Err(Error::DegenerateFit("all abscissae coincide".into()));
    }

    let (slope, offset) = match mode {
        FitMode::Free => {
            let b = sxy / sxx;
            (b, y_mean - b * x_mean)
        }
        FitMode::FixedSlope(b) => (b, y_mean - b * x_mean),
        FitMode::EndAnchored(b) => {
            let lo = points.iter().min_by(|p, q| p.0.total_cmp(&q.0)).unwrap();
            let hi = points.iter().max_by(|p, q| p.0.total_cmp(&q.0)).unwrap();
            (b, 0.5 * ((lo.1 - b * lo.0) + (hi.1 - b * hi.0)))
        }
    };
    let residuals: Vec<f64> = points.iter().map(|&(x, y)| y - (slope * x + offset)).collect();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let rms_residual = (rss / nf).sqrt();
    let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));

    let covariance = match mode {
        FitMode::Free => {
            let s2 = rss / (nf - 2.0);
            let var_b = s2 / sxx;
            [
                [var_b, -x_mean * var_b],
                [-x_mean * var_b, s2 / nf + x_mean * x_mean * var_b],
            ]
        }
        _ => [[0.0, 0.0], [0.0, rss / (nf - 1.0) / nf]],
    };
    Ok(FitResult {
        slope,
        offset,
        rms_residual,
        max_residual,
        n_points: n,
        covariance,
    })
}

/// Fits `S = b·log₂(sin πσ) + a` to `(σ, S)` points.
pub fn fit_log_sin(points: &[(f64, f64)], mode: FitMode) -> Result<FitResult> {
    let mut xy = Vec::with_capacity(points.len());
    for &(sigma, s) in points {
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(Error::domain(format!("sigma = {sigma} outside (0, 1)")));
        }
        xy.push(((std::f64::consts::PI * sigma).sin().log2(), s));
    }
    fit_line(&xy, mode)
}

/// Fits `S = slope·log₂N + a` to `(N, S_max)` points.
pub fn fit_size_scaling(points: &[(usize, f64)]) -> Result<FitResult> {
    if let Some(&(n, _)) = points.iter().find(|p| p.0 == 0) {
        return Err(Error::domain(format!("system size {n} must be positive")));
    }
    let xy: Vec<(f64, f64)> = points.iter().map(|&(n, s)| ((n as f64).log2(), s)).collect();
    fit_line(&xy, FitMode::Free)
}

/// Thresholds for calling a fit conformal-consistent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalThresholds {
    pub target_slope: f64,
    pub slope_tolerance: f64,
    pub max_rms: f64,
}

impl Default for ConformalThresholds {
    fn default() -> Self {
        ConformalThresholds {
            target_slope: 1.0 / 3.0,
            slope_tolerance: 0.05,
            max_rms: 0.05,
        }
    }
}

impl ConformalThresholds {
    pub fn is_conformal(&self, fit: &FitResult) -> bool {
        (fit.slope - self.target_slope).abs() <= self.slope_tolerance && fit.rms_residual <= self.max_rms
    }
}
