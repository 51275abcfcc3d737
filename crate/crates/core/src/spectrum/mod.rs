//! Density-matrix spectra of Gaussian states.
//!
//! A Gaussian kernel factorises into a product of single-mode kernels
//! `exp[-½(x² + x'²) + η x x']`, each with eigenvalues `(1 - ξ) ξⁿ` where
//! `ξ = η / (1 + √(1 - η²))`. The per-mode ratios `ξᵢ` therefore determine the
//! whole spectrum, the von Neumann entropy and every `tr ρᴹ`.

mod enumerate;
pub mod oracle;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, SymEigen};
use crate::state::{moments_from_params, params_from_moments_with, KernelParams, MomentSet, Tolerances};

pub use enumerate::{top_eigenvalues, EigenvalueRecord};

/// `η` values in `[-NEG_ETA_TOL, 0)` are rounded up to zero.
pub const NEG_ETA_TOL: f64 = 1e-12;
/// `η` values in `[1, 1 + ETA_ONE_TOL]` are clamped just below one.
pub const ETA_ONE_TOL: f64 = 1e-9;
/// Relative size of `C''` above which the general symplectic route is used.
const IMAG_COUPLING_TOL: f64 = 1e-9;

/// Logarithm base for entropies. Base 2 gives ebits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Two,
    E,
}

impl LogBase {
    fn ln_unit(self) -> f64 {
        match self {
            LogBase::Two => std::f64::consts::LN_2,
            LogBase::E => 1.0,
        }
    }
}

/// Per-mode description of a Gaussian density-matrix spectrum, sorted by
/// descending `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub mu: Vec<f64>,
    /// Largest eigenvalue `Λ₀ = Πᵢ(1 - ξᵢ)`.
    pub lambda0: f64,
    /// Number of `η` values clamped from `[1, 1 + 1e-9]` to just below 1.
    pub clamped: usize,
}

impl ModeSpectrum {
    /// Builds the spectrum from per-mode ratios in `[0, 1)`.
    pub fn from_xi(xi: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = xi.iter().find(|x| !(0.0..1.0).contains(*x)) {
            return Err(Error::domain(format!("mode ratio {bad} outside [0, 1)")));
        }
        Ok(Self::assemble(xi, 0))
    }

    /// Builds the spectrum from symplectic values `μ ≥ 1`.
    pub fn from_mu(mu: Vec<f64>, physicality: f64) -> Result<Self> {
        let mut xi = Vec::with_capacity(mu.len());
        for m in mu {
            if !m.is_finite() {
                return Err(Error::NonNormalizable { eta: 1.0 });
            }
            if m < 1.0 - physicality {
                return Err(Error::Unphysical { mu: m });
            }
            let m = m.max(1.0);
            xi.push((m - 1.0) / (m + 1.0));
        }
        Ok(Self::assemble(xi, 0))
    }

    fn from_eta_tol(raw: Vec<f64>, neg_tol: f64) -> Result<Self> {
        let mut clamped = 0;
        let mut xi = Vec::with_capacity(raw.len());
        for eta in raw {
            let eta = if eta < 0.0 {
                if eta < -neg_tol {
                    return Err(Error::NegativeEta { eta });
                }
                0.0
            } else if eta >= 1.0 {
                if eta > 1.0 + ETA_ONE_TOL || !eta.is_finite() {
                    return Err(Error::NonNormalizable { eta });
                }
                clamped += 1;
                1.0 - f64::EPSILON / 2.0
            } else {
                eta
            };
            xi.push(xi_from_eta(eta)?);
        }
        Ok(Self::assemble(xi, clamped))
    }

    pub(crate) fn assemble(mut xi: Vec<f64>, clamped: usize) -> Self {
        xi.sort_by(|a, b| b.total_cmp(a));
        let eta = xi.iter().map(|&x| eta_from_xi(x)).collect();
        let mu = xi.iter().map(|&x| (1.0 + x) / (1.0 - x)).collect();
        let lambda0 = xi.iter().map(|&x| (-x).ln_1p()).sum::<f64>().exp();
        ModeSpectrum {
            xi,
            eta,
            mu,
            lambda0,
            clamped,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.xi.len()
    }

    pub fn is_pure(&self) -> bool {
        self.xi.iter().all(|&x| x == 0.0)
    }
}

/// `ξ = η / (1 + √(1 - η²))`, the eigenvalue ratio of the single-mode
/// kernel `exp[-½(x² + x'²) + η x x']`.
pub fn xi_from_eta(eta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::domain(format!("eta = {eta} outside [0, 1)")));
    }
    Ok(eta / (1.0 + ((1.0 - eta) * (1.0 + eta)).sqrt()))
}

/// Inverse of [`xi_from_eta`]: `η = 2ξ / (1 + ξ²)`.
pub fn eta_from_xi(xi: f64) -> f64 {
    2.0 * xi / (1.0 + xi * xi)
}

/// Spectrum of the kernel `Θ`.
///
/// `A''` is dropped (it is removed by a local unitary). With `A' = O a Oᵀ`
/// the matrix `a^{-1/2} Oᵀ C' O a^{-1/2}` is diagonalised and its eigenvalues
/// are the `ηᵢ`. When `C''` is not negligible the kernel does not factorise
/// over real coordinates; the symplectic values of the equivalent moment
/// set are used instead.
pub fn mode_spectrum_from_params(theta: &KernelParams) -> Result<ModeSpectrum> {
    spectrum_from_params_tol(theta, NEG_ETA_TOL)
}

fn spectrum_from_params_tol(theta: &KernelParams, neg_tol: f64) -> Result<ModeSpectrum> {
    let scale = linalg::max_abs(&theta.a_real).max(linalg::max_abs(&theta.c_real));
    if linalg::max_abs(&theta.c_imag) > IMAG_COUPLING_TOL * scale {
        let xi = moments_from_params(theta)?;
        let mu = linalg::williamson_values(&xi.q_mat, &xi.p_mat, &xi.s_mat)?;
        return ModeSpectrum::from_mu(mu, Tolerances::default().physicality);
    }
    ModeSpectrum::from_eta_tol(eta_values(&theta.a_real, &theta.c_real)?, neg_tol)
}

/// Eigenvalues of `η̄` for a real kernel.
pub(crate) fn eta_values(a_real: &DMatrix<f64>, c_real: &DMatrix<f64>) -> Result<Vec<f64>> {
    let a = SymEigen::new(a_real);
    let lo = a.min();
    if !(lo > 0.0) {
        return Err(Error::NotPositiveDefinite {
            what: "a_real",
            eigenvalue: lo,
        });
    }
    let n = a_real.nrows();
    let rotated = a.vectors.transpose() * c_real * &a.vectors;
    let inv_root: Vec<f64> = a.values.iter().map(|x| 1.0 / x.sqrt()).collect();
    let scaled = DMatrix::from_fn(n, n, |i, j| inv_root[i] * rotated[(i, j)] * inv_root[j]);
    Ok(SymEigen::new(&scaled).values.iter().copied().collect())
}

/// Spectrum of the state `Ξ`; the means do not enter.
pub fn mode_spectrum_from_moments(xi_set: &MomentSet) -> Result<ModeSpectrum> {
    mode_spectrum_from_moments_with(xi_set, &Tolerances::default())
}

///
/// Forming the kernel inverts `Q`, so near-pure modes carry rounding of
/// order `ε·cond(Q)` in `η`; the negative-`η` clamp widens accordingly.
pub fn mode_spectrum_from_moments_with(xi_set: &MomentSet, tol: &Tolerances) -> Result<ModeSpectrum> {
    let theta = params_from_moments_with(xi_set, tol)?;
    let q = SymEigen::new(&xi_set.q_mat);
    let neg_tol = NEG_ETA_TOL.max(16.0 * f64::EPSILON * q.max() / q.min());
    spectrum_from_params_tol(&theta, neg_tol)
}

/// Symplectic values `μᵢ` of a moment set, descending: the `4QP` route when
/// `S = 0`, the Williamson route otherwise.
pub fn symplectic_values(xi_set: &MomentSet) -> Result<Vec<f64>> {
    if linalg::max_abs(&xi_set.s_mat) == 0.0 {
        oracle::symplectic_oracle(xi_set)
    } else {
        linalg::williamson_values(&xi_set.q_mat, &xi_set.p_mat, &xi_set.s_mat)
    }
}

/// Entropy contribution of one mode, in the given base.
pub fn mode_entropy_in(xi: f64, base: LogBase) -> f64 {
    if xi <= 0.0 {
        return 0.0;
    }
    -((-xi).ln_1p() + xi * xi.ln() / (1.0 - xi)) / base.ln_unit()
}

pub fn mode_entropy(xi: f64) -> f64 {
    mode_entropy_in(xi, LogBase::Two)
}

/// Von Neumann entropy in ebits.
pub fn entropy(spec: &ModeSpectrum) -> f64 {
    entropy_in(spec, LogBase::Two)
}

pub fn entropy_in(spec: &ModeSpectrum, base: LogBase) -> f64 {
    spec.xi.iter().map(|&x| mode_entropy_in(x, base)).sum()
}

/// Per-mode entropy terms, descending.
pub fn entropy_terms(spec: &ModeSpectrum) -> Vec<f64> {
    entropy_terms_in(spec, LogBase::Two)
}

pub fn entropy_terms_in(spec: &ModeSpectrum, base: LogBase) -> Vec<f64> {
    let mut terms: Vec<f64> = spec.xi.iter().map(|&x| mode_entropy_in(x, base)).collect();
    terms.sort_by(|a, b| b.total_cmp(a));
    terms
}

/// `E_M = 1 - tr ρᴹ = 1 - Πᵢ (1 - ξᵢ)ᴹ / (1 - ξᵢᴹ)`.
pub fn product_identification(spec: &ModeSpectrum, m: u32) -> Result<f64> {
    if m < 2 {
        return Err(Error::domain(format!("E_M needs M >= 2, got {m}")));
    }
    let m_f = f64::from(m);
    let log_trace: f64 = spec
        .xi
        .iter()
        .map(|&x| m_f * (-x).ln_1p() - (-x.powf(m_f)).ln_1p())
        .sum();
    Ok(-log_trace.exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{DMatrix, DVector};

    fn scalar(x: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, x)
    }

    #[test]
    fn xi_from_eta_examples() {
        assert_eq!(xi_from_eta(0.0).unwrap(), 0.0);
        // η = sech(1) gives ξ = e^{-1}
        let eta = 1.0 / 1f64.cosh();
        assert_relative_eq!(xi_from_eta(eta).unwrap(), (-1f64).exp(), epsilon = 1e-15);
        let xi = xi_from_eta(0.6).unwrap();
        assert_relative_eq!(xi, 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(xi * (1.0 + (1.0 - 0.36f64).sqrt()), 0.6, epsilon = 1e-15);
    }

    #[test]
    fn xi_from_eta_domain() {
        assert!(xi_from_eta(1.0).is_err());
        assert!(xi_from_eta(-0.1).is_err());
        assert!(xi_from_eta(f64::NAN).is_err());
    }

    #[test]
    fn pure_single_mode() {
        let theta = KernelParams::real(scalar(1.0), scalar(0.0)).unwrap();
        let spec = mode_spectrum_from_params(&theta).unwrap();
        assert_eq!(spec.xi, vec![0.0]);
        assert_eq!(spec.lambda0, 1.0);
        assert!(spec.is_pure());
    }

    #[test]
    fn mixed_single_mode() {
        let theta = KernelParams::real(scalar(1.0), scalar(0.6)).unwrap();
        let spec = mode_spectrum_from_params(&theta).unwrap();
        assert_relative_eq!(spec.xi[0], 1.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(spec.lambda0, 2.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(spec.mu[0], 2.0, epsilon = 1e-13);
    }

    #[test]
    fn block_product() {
        let a = DMatrix::identity(2, 2);
        let c = DMatrix::from_diagonal(&DVector::from_vec(vec![0.6, 0.0]));
        let spec = mode_spectrum_from_params(&KernelParams::real(a, c).unwrap()).unwrap();
        assert_relative_eq!(spec.xi[0], 1.0 / 3.0, epsilon = 1e-14);
        assert_eq!(spec.xi[1], 0.0);
        assert_relative_eq!(spec.lambda0, 2.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn moments_route_single_mode() {
        let spec = mode_spectrum_from_moments(&MomentSet::uncorrelated(scalar(0.5), scalar(0.5)).unwrap()).unwrap();
        assert!(spec.xi[0].abs() < 1e-15);
        // Q = P = 3/2: μ = 3, ξ = 1/2
        let spec = mode_spectrum_from_moments(&MomentSet::uncorrelated(scalar(1.5), scalar(1.5)).unwrap()).unwrap();
        assert_relative_eq!(spec.xi[0], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn eta_at_one_is_clamped_beyond_is_error() {
        let spec = ModeSpectrum::from_eta_tol(vec![1.0 + 1e-10, 0.2], NEG_ETA_TOL).unwrap();
        assert_eq!(spec.clamped, 1);
        assert!(spec.xi[0] < 1.0);
        assert!(matches!(
            ModeSpectrum::from_eta_tol(vec![1.0 + 1e-6], NEG_ETA_TOL),
            Err(Error::NonNormalizable { .. })
        ));
    }

    #[test]
    fn small_negative_eta_clamped_large_rejected() {
        let spec = ModeSpectrum::from_eta_tol(vec![-1e-13], NEG_ETA_TOL).unwrap();
        assert_eq!(spec.xi, vec![0.0]);
        assert!(matches!(
            ModeSpectrum::from_eta_tol(vec![-1e-6], NEG_ETA_TOL),
            Err(Error::NegativeEta { .. })
        ));
        // negative C on a real kernel
        let theta = KernelParams::real(scalar(1.0), scalar(-0.5)).unwrap();
        assert!(matches!(
            mode_spectrum_from_params(&theta),
            Err(Error::NegativeEta { .. })
        ));
    }

    #[test]
    fn entropy_examples() {
        let pure = ModeSpectrum::from_xi(vec![0.0, 0.0, 0.0]).unwrap();
        assert_eq!(entropy(&pure), 0.0);
        let third = ModeSpectrum::from_xi(vec![1.0 / 3.0]).unwrap();
        // -log2(2/3) - (1/3) log2(1/3) / (2/3) = log2(3) - 1 + log2(3)/2
        let expected = 1.5 * 3f64.log2() - 1.0;
        assert_relative_eq!(entropy(&third), expected, epsilon = 1e-14);
        assert_relative_eq!(entropy(&third), 1.377_443_751_081_734_3, epsilon = 1e-14);
        let padded = ModeSpectrum::from_xi(vec![0.0, 1.0 / 3.0]).unwrap();
        assert_eq!(entropy(&padded), entropy(&third));
    }

    #[test]
    fn entropy_matches_direct_eigenvalue_sum() {
        // λ_n = (2/3)(1/3)^n
        let direct: f64 = (0..200)
            .map(|n| (2.0 / 3.0) * (1f64 / 3.0).powi(n))
            .filter(|&l| l > 0.0)
            .map(|l| -l * l.log2())
            .sum();
        let spec = ModeSpectrum::from_xi(vec![1.0 / 3.0]).unwrap();
        assert_relative_eq!(entropy(&spec), direct, epsilon = 1e-13);
    }

    #[test]
    fn natural_log_base() {
        let spec = ModeSpectrum::from_xi(vec![0.25]).unwrap();
        assert_relative_eq!(
            entropy_in(&spec, LogBase::E),
            entropy(&spec) * std::f64::consts::LN_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn entropy_terms_examples() {
        let spec = ModeSpectrum::from_xi(vec![0.0, 1.0 / 3.0]).unwrap();
        let terms = entropy_terms(&spec);
        assert_relative_eq!(terms[0], 1.377_443_751_081_734_3, epsilon = 1e-14);
        assert_eq!(terms[1], 0.0);
        let twin = ModeSpectrum::from_xi(vec![0.4, 0.4]).unwrap();
        let terms = entropy_terms(&twin);
        assert_eq!(terms[0], terms[1]);
    }

    #[test]
    fn product_identification_examples() {
        let pure = ModeSpectrum::from_xi(vec![0.0, 0.0]).unwrap();
        for m in 2..6 {
            assert_eq!(product_identification(&pure, m).unwrap(), 0.0);
        }
        let third = ModeSpectrum::from_xi(vec![1.0 / 3.0]).unwrap();
        assert_relative_eq!(product_identification(&third, 2).unwrap(), 0.5, epsilon = 1e-15);
        let big = product_identification(&third, 200).unwrap();
        assert!(big > 0.999_999 && big <= 1.0);
        assert!(product_identification(&third, 1).is_err());
    }

    #[test]
    fn e2_equals_two_xi_over_one_plus_xi() {
        for &x in &[0.05, 0.3, 0.77] {
            let spec = ModeSpectrum::from_xi(vec![x]).unwrap();
            assert_relative_eq!(
                product_identification(&spec, 2).unwrap(),
                2.0 * x / (1.0 + x),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn imaginary_coupling_uses_symplectic_route() {
        // 2-mode state with C'' != 0: compare against Williamson of its moments
        let a = DMatrix::from_row_slice(2, 2, &[1.2, 0.1, 0.1, 0.9]);
        let c = DMatrix::from_row_slice(2, 2, &[0.3, 0.05, 0.05, 0.2]);
        let c_imag = DMatrix::from_row_slice(2, 2, &[0.0, 0.08, -0.08, 0.0]);
        let theta =
            KernelParams::from_parts(a, DMatrix::zeros(2, 2), c, c_imag, DVector::zeros(2), DVector::zeros(2)).unwrap();
        let spec = mode_spectrum_from_params(&theta).unwrap();
        let xi = moments_from_params(&theta).unwrap();
        let mu = linalg::williamson_values(&xi.q_mat, &xi.p_mat, &xi.s_mat).unwrap();
        for (m, x) in mu.iter().zip(&spec.xi) {
            assert_relative_eq!((m - 1.0) / (m + 1.0), *x, epsilon = 1e-12);
        }
    }
}
