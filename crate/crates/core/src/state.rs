//! The two equivalent descriptions of a Gaussian density matrix.
//!
//! [`KernelParams`] holds the kernel
//!
//! ```text
//! ρ(q, q') ∝ exp[-½(q·A·q + q'·A*·q') + q·C·q' + d·q + d*·q']
//! ```
//!
//! with `A` complex symmetric, `C` Hermitian and `d` a complex vector.
//! [`MomentSet`] holds the centred second moments `Q`, `P`, `S` and the first
//! moments `⟨q⟩`, `⟨p⟩`. Units are scaled so that ħ = m = 1.
//!
//! [`params_from_moments`] and [`moments_from_params`] are exact inverses of
//! each other on valid states.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, SymEigen};

/// Thresholds used by validation and by the conversions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative (anti)symmetry tolerance.
    pub symmetry: f64,
    /// A matrix counts as positive definite when `λ_min > -definiteness · λ_max`.
    pub definiteness: f64,
    /// Largest accepted condition number of `Q`.
    pub max_condition: f64,
    /// Symplectic values below `1 - physicality` are unphysical.
    pub physicality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            symmetry: 1e-12,
            definiteness: 1e-12,
            max_condition: 1e12,
            physicality: 1e-9,
        }
    }
}

/// Gaussian kernel parameters `Θ = {A, C, d}` split into real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelParams {
    pub a_real: DMatrix<f64>,
    pub a_imag: DMatrix<f64>,
    pub c_real: DMatrix<f64>,
    pub c_imag: DMatrix<f64>,
    pub d_real: DVector<f64>,
    pub d_imag: DVector<f64>,
}

impl KernelParams {
    /// Real kernel with zero displacement.
    pub fn real(a: DMatrix<f64>, c: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        Self::from_parts(
            a,
            DMatrix::zeros(n, n),
            c,
            DMatrix::zeros(n, n),
            DVector::zeros(n),
            DVector::zeros(n),
        )
    }

    pub fn from_parts(
        a_real: DMatrix<f64>,
        a_imag: DMatrix<f64>,
        c_real: DMatrix<f64>,
        c_imag: DMatrix<f64>,
        d_real: DVector<f64>,
        d_imag: DVector<f64>,
    ) -> Result<Self> {
        let n = a_real.nrows();
        if n == 0 {
            return Err(Error::domain("a Gaussian state needs at least one mode"));
        }
        for (what, m) in [
            ("a_real", &a_real),
            ("a_imag", &a_imag),
            ("c_real", &c_real),
            ("c_imag", &c_imag),
        ] {
            check_square(what, m, n)?;
        }
        check_len("d_real", &d_real, n)?;
        check_len("d_imag", &d_imag, n)?;
        Ok(KernelParams {
            a_real,
            a_imag,
            c_real,
            c_imag,
            d_real,
            d_imag,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.a_real.nrows()
    }

    pub fn with_displacement(mut self, d_real: DVector<f64>, d_imag: DVector<f64>) -> Result<Self> {
        let n = self.n_modes();
        check_len("d_real", &d_real, n)?;
        check_len("d_imag", &d_imag, n)?;
        self.d_real = d_real;
        self.d_imag = d_imag;
        Ok(self)
    }
}

/// Moment data `Ξ = {Q, P, S, ⟨q⟩, ⟨p⟩}`.
///
/// `S_ij = ½⟨q_i p_j + p_j q_i⟩ - ⟨q_i⟩⟨p_j⟩` is in general not symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    pub q_mat: DMatrix<f64>,
    pub p_mat: DMatrix<f64>,
    pub s_mat: DMatrix<f64>,
    pub mean_q: DVector<f64>,
    pub mean_p: DVector<f64>,
}

impl MomentSet {
    /// Centred moments with `S = 0`.
    pub fn uncorrelated(q: DMatrix<f64>, p: DMatrix<f64>) -> Result<Self> {
        let n = q.nrows();
        Self::from_parts(q, p, DMatrix::zeros(n, n), DVector::zeros(n), DVector::zeros(n))
    }

    pub fn from_parts(
        q_mat: DMatrix<f64>,
        p_mat: DMatrix<f64>,
        s_mat: DMatrix<f64>,
        mean_q: DVector<f64>,
        mean_p: DVector<f64>,
    ) -> Result<Self> {
        let n = q_mat.nrows();
        if n == 0 {
            return Err(Error::domain("a Gaussian state needs at least one mode"));
        }
        check_square("q_mat", &q_mat, n)?;
        check_square("p_mat", &p_mat, n)?;
        check_square("s_mat", &s_mat, n)?;
        check_len("mean_q", &mean_q, n)?;
        check_len("mean_p", &mean_p, n)?;
        Ok(MomentSet {
            q_mat,
            p_mat,
            s_mat,
            mean_q,
            mean_p,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.q_mat.nrows()
    }

    pub fn with_means(mut self, mean_q: DVector<f64>, mean_p: DVector<f64>) -> Result<Self> {
        let n = self.n_modes();
        check_len("mean_q", &mean_q, n)?;
        check_len("mean_p", &mean_p, n)?;
        self.mean_q = mean_q;
        self.mean_p = mean_p;
        Ok(self)
    }

    /// Largest absolute entry across all five components.
    pub fn max_abs_diff(&self, other: &MomentSet) -> f64 {
        [
            linalg::max_abs(&(&self.q_mat - &other.q_mat)),
            linalg::max_abs(&(&self.p_mat - &other.p_mat)),
            linalg::max_abs(&(&self.s_mat - &other.s_mat)),
            linalg::max_abs_vec(&(&self.mean_q - &other.mean_q)),
            linalg::max_abs_vec(&(&self.mean_p - &other.mean_p)),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn check_square(what: &'static str, m: &DMatrix<f64>, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch {
            what,
            expected: n,
            found: if m.nrows() != n { m.nrows() } else { m.ncols() },
        });
    }
    Ok(())
}

fn check_len(what: &'static str, v: &DVector<f64>, n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            what,
            expected: n,
            found: v.len(),
        });
    }
    Ok(())
}

/// `Ξ[Θ]`.
///
/// Closed-form inverse of [`params_from_moments`]: with `Z = A'' + C''` and
/// `Y = A'' - C''`,
///
/// ```text
/// Q   = ½(A' - C')⁻¹        S   = -Q Z
/// P   = ½(A' + C') + Y Q Z  ⟨q⟩ = 2 Q d'
/// ⟨p⟩ = d'' - Y ⟨q⟩
/// ```
///
/// For real kernels `P` reduces to `A' - (A' - C') Q (A' - C')`.
pub fn moments_from_params(theta: &KernelParams) -> Result<MomentSet> {
    let gap = &theta.a_real - &theta.c_real;
    let eig = SymEigen::new(&gap);
    let lo = eig.min();
    if !(lo > 0.0) {
        return Err(Error::SingularState { eigenvalue: lo });
    }
    let q = eig.map(|x| 0.5 / x);
    let z = &theta.a_imag + &theta.c_imag;
    let y = &theta.a_imag - &theta.c_imag;
    let s = -(&q * &z);
    let p = linalg::symmetrize(&((&theta.a_real + &theta.c_real) * 0.5 + &y * &q * &z));
    let mean_q = (&q * &theta.d_real) * 2.0;
    let mean_p = &theta.d_imag - &y * &mean_q;
    Ok(MomentSet {
        q_mat: q,
        p_mat: p,
        s_mat: s,
        mean_q,
        mean_p,
    })
}

/// `Θ[Ξ]` with the default conditioning bound on `Q`.
pub fn params_from_moments(xi: &MomentSet) -> Result<KernelParams> {
    params_from_moments_with(xi, &Tolerances::default())
}

/// `Θ[Ξ]`:
///
/// ```text
/// A'  = P + ¼Q⁻¹ - SᵀQ⁻¹S      A'' = -½(SᵀQ⁻¹ + Q⁻¹S)
/// C'  = P - ¼Q⁻¹ - SᵀQ⁻¹S      C'' =  ½(SᵀQ⁻¹ - Q⁻¹S)
/// d'  = ½Q⁻¹⟨q⟩                d'' = ⟨p⟩ + (A'' - C'')⟨q⟩
/// ```
pub fn params_from_moments_with(xi: &MomentSet, tol: &Tolerances) -> Result<KernelParams> {
    let (g, cond) = linalg::spd_inverse(&xi.q_mat, "position covariance Q")?;
    if cond > tol.max_condition {
        return Err(Error::IllConditioned {
            what: "position covariance Q",
            condition: cond,
            bound: tol.max_condition,
        });
    }
    let st = xi.s_mat.transpose();
    let st_g = &st * &g;
    let g_s = &g * &xi.s_mat;
    let shear = linalg::symmetrize(&(&st_g * &xi.s_mat));
    let quarter_g = &g * 0.25;
    let a_real = linalg::symmetrize(&(&xi.p_mat + &quarter_g - &shear));
    let c_real = linalg::symmetrize(&(&xi.p_mat - &quarter_g - &shear));
    let a_imag = linalg::symmetrize(&((&st_g + &g_s) * -0.5));
    let c_imag = (&st_g - &g_s) * 0.5;
    let c_imag = (&c_imag - c_imag.transpose()) * 0.5;
    let d_real = (&g * &xi.mean_q) * 0.5;
    let d_imag = &xi.mean_p + (&a_imag - &c_imag) * &xi.mean_q;
    Ok(KernelParams {
        a_real,
        a_imag,
        c_real,
        c_imag,
        d_real,
        d_imag,
    })
}

/// One named invariant check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Magnitude of the worst violation found (0 when nothing is violated).
    pub worst_violation: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    fn push(&mut self, name: &'static str, passed: bool, worst_violation: f64) {
        self.checks.push(Check {
            name,
            passed,
            worst_violation,
        });
    }

    pub fn violations(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Turns a failing report into [`Error::Invalid`] listing the failed checks.
    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            return Ok(());
        }
        let msg = self
            .violations()
            .map(|c| format!("{} (worst violation {:e})", c.name, c.worst_violation))
            .collect::<Vec<_>>()
            .join("; ");
        Err(Error::Invalid(msg))
    }
}

pub trait Validate {
    fn validate_with(&self, tol: &Tolerances) -> ValidationReport;

    fn validate(&self) -> ValidationReport {
        self.validate_with(&Tolerances::default())
    }
}

fn symmetry_check(report: &mut ValidationReport, name: &'static str, m: &DMatrix<f64>, tol: f64) {
    let v = linalg::relative(linalg::asymmetry(m), linalg::max_abs(m));
    report.push(name, v <= tol, v);
}

/// Returns the smallest eigenvalue when the check could be evaluated.
fn definiteness_check(
    report: &mut ValidationReport,
    name: &'static str,
    m: &DMatrix<f64>,
    tol: f64,
) -> Option<SymEigen> {
    if !m.iter().all(|x| x.is_finite()) {
        report.push(name, false, f64::INFINITY);
        return None;
    }
    let eig = SymEigen::new(m);
    let (lo, hi) = (eig.min(), eig.max());
    let passed = lo > -tol * hi && hi > 0.0;
    report.push(name, passed, (-lo).max(0.0));
    Some(eig)
}

fn finite_check<'a>(report: &mut ValidationReport, parts: impl IntoIterator<Item = &'a [f64]>) {
    let bad = parts
        .into_iter()
        .flat_map(|p| p.iter())
        .filter(|x| !x.is_finite())
        .count();
    report.push("finite entries", bad == 0, bad as f64);
}

impl Validate for KernelParams {
    fn validate_with(&self, tol: &Tolerances) -> ValidationReport {
        let mut report = ValidationReport::default();
        finite_check(
            &mut report,
            [
                self.a_real.as_slice(),
                self.a_imag.as_slice(),
                self.c_real.as_slice(),
                self.c_imag.as_slice(),
                self.d_real.as_slice(),
                self.d_imag.as_slice(),
            ],
        );
        symmetry_check(&mut report, "a_real symmetric", &self.a_real, tol.symmetry);
        symmetry_check(&mut report, "a_imag symmetric", &self.a_imag, tol.symmetry);
        symmetry_check(&mut report, "c_real symmetric", &self.c_real, tol.symmetry);
        let v = linalg::relative(linalg::antisymmetry(&self.c_imag), linalg::max_abs(&self.c_imag));
        report.push("c_imag antisymmetric", v <= tol.symmetry, v);
        definiteness_check(&mut report, "a_real positive definite", &self.a_real, tol.definiteness);
        definiteness_check(
            &mut report,
            "a_real - c_real positive definite",
            &(&self.a_real - &self.c_real),
            tol.definiteness,
        );
        report
    }
}

impl Validate for MomentSet {
    fn validate_with(&self, tol: &Tolerances) -> ValidationReport {
        let mut report = ValidationReport::default();
        finite_check(
            &mut report,
            [
                self.q_mat.as_slice(),
                self.p_mat.as_slice(),
                self.s_mat.as_slice(),
                self.mean_q.as_slice(),
                self.mean_p.as_slice(),
            ],
        );
        symmetry_check(&mut report, "q_mat symmetric", &self.q_mat, tol.symmetry);
        symmetry_check(&mut report, "p_mat symmetric", &self.p_mat, tol.symmetry);
        let q_eig = definiteness_check(&mut report, "q_mat positive definite", &self.q_mat, tol.definiteness);
        let p_eig = definiteness_check(&mut report, "p_mat positive definite", &self.p_mat, tol.definiteness);
        match &q_eig {
            Some(eig) if eig.min() > 0.0 => {
                let cond = eig.max() / eig.min();
                report.push("q_mat conditioning", cond <= tol.max_condition, cond);
            }
            _ => report.push("q_mat conditioning", false, f64::INFINITY),
        }
        let definite = matches!((&q_eig, &p_eig), (Some(a), Some(b)) if a.min() > 0.0 && b.min() > 0.0);
        let mu_min = if definite {
            crate::spectrum::symplectic_values(self)
                .ok()
                .and_then(|mu| mu.last().copied())
        } else {
            None
        };
        match mu_min {
            Some(mu) => report.push(
                "physical state (mu >= 1)",
                mu >= 1.0 - tol.physicality,
                (1.0 - mu).max(0.0),
            ),
            None => report.push("physical state (mu >= 1)", false, f64::INFINITY),
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn scalar(x: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, x)
    }

    #[test]
    fn single_oscillator_ground_state() {
        let theta = KernelParams::real(scalar(1.0), scalar(0.0)).unwrap();
        let xi = moments_from_params(&theta).unwrap();
        assert_relative_eq!(xi.q_mat[(0, 0)], 0.5, epsilon = 1e-15);
        assert_relative_eq!(xi.p_mat[(0, 0)], 0.5, epsilon = 1e-15);
        assert_eq!(xi.s_mat[(0, 0)], 0.0);
        assert_eq!(xi.mean_q[0], 0.0);
        assert_eq!(xi.mean_p[0], 0.0);
    }

    #[test]
    fn scalar_mixed_state_moments() {
        // A = 1, C = η: Q = 1/(2(1-η)), P = (A + C)/2
        let eta = 0.6;
        let theta = KernelParams::real(scalar(1.0), scalar(eta)).unwrap();
        let xi = moments_from_params(&theta).unwrap();
        assert_relative_eq!(xi.q_mat[(0, 0)], 1.0 / (2.0 * (1.0 - eta)), epsilon = 1e-15);
        assert_relative_eq!(xi.p_mat[(0, 0)], 0.8, epsilon = 1e-15);
        assert_eq!(xi.s_mat[(0, 0)], 0.0);
    }

    #[test]
    fn inverse_of_ground_state() {
        let xi = MomentSet::uncorrelated(scalar(0.5), scalar(0.5)).unwrap();
        let theta = params_from_moments(&xi).unwrap();
        assert_relative_eq!(theta.a_real[(0, 0)], 1.0, epsilon = 1e-15);
        assert_relative_eq!(theta.c_real[(0, 0)], 0.0, epsilon = 1e-15);
        assert_eq!(theta.d_real[0], 0.0);
        assert_eq!(theta.d_imag[0], 0.0);
    }

    #[test]
    fn zero_s_gives_real_kernel() {
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 0.7]);
        let p = DMatrix::from_row_slice(2, 2, &[0.9, -0.1, -0.1, 0.8]);
        let theta = params_from_moments(&MomentSet::uncorrelated(q, p).unwrap()).unwrap();
        assert_eq!(linalg::max_abs(&theta.a_imag), 0.0);
        assert_eq!(linalg::max_abs(&theta.c_imag), 0.0);
        assert_eq!(linalg::max_abs_vec(&theta.d_real), 0.0);
        assert_eq!(linalg::max_abs_vec(&theta.d_imag), 0.0);
    }

    #[test]
    fn singular_gap_is_reported() {
        let theta = KernelParams::real(scalar(1.0), scalar(1.0)).unwrap();
        assert!(matches!(
            moments_from_params(&theta),
            Err(Error::SingularState { eigenvalue }) if eigenvalue == 0.0
        ));
    }

    #[test]
    fn ill_conditioned_q_is_rejected() {
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1e-15]);
        let xi = MomentSet::uncorrelated(q, DMatrix::identity(2, 2)).unwrap();
        assert!(matches!(params_from_moments(&xi), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn validation_of_good_kernel_is_clean() {
        let theta = KernelParams::real(scalar(1.0), scalar(0.0)).unwrap();
        let report = theta.validate();
        assert!(report.is_valid());
        assert_eq!(report.violations().count(), 0);
    }

    #[test]
    fn validation_flags_negative_a() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let theta = KernelParams::real(a, DMatrix::from_element(2, 2, 0.0)).unwrap();
        let report = theta.validate();
        let failed: Vec<_> = report.violations().map(|c| c.name).collect();
        assert!(failed.contains(&"a_real positive definite"));
        let check = report
            .checks
            .iter()
            .find(|c| c.name == "a_real positive definite")
            .unwrap();
        assert_eq!(check.worst_violation, 1.0);
    }

    #[test]
    fn validation_flags_conditioning() {
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1e-15]);
        let p = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1e15]);
        let xi = MomentSet::uncorrelated(q, p).unwrap();
        let report = xi.validate();
        let failed: Vec<_> = report.violations().map(|c| c.name).collect();
        assert_eq!(failed, vec!["q_mat conditioning"]);
    }

    #[test]
    fn validation_flags_unphysical_moments() {
        // QP = 1/16 violates the uncertainty bound
        let xi = MomentSet::uncorrelated(scalar(0.25), scalar(0.25)).unwrap();
        let failed: Vec<_> = xi.validate().violations().map(|c| c.name).collect();
        assert_eq!(failed, vec!["physical state (mu >= 1)"]);
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let err = KernelParams::real(DMatrix::identity(2, 2), DMatrix::identity(3, 3)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { what: "c_real", .. }));
    }
}
