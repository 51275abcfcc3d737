//! Moment evolution under `L = ½ q̇ᵀq̇ - ½ qᵀΩq + fᵀq`.
//!
//! The moment equations close on `Ξ`:
//!
//! ```text
//! Q̇ = S + Sᵀ          Ṗ = -(ΩS + (ΩS)ᵀ)      Ṡ = P - QΩ
//! ⟨q⟩̇ = ⟨p⟩            ⟨p⟩̇ = -Ω⟨q⟩ + f
//! ```
//!
//! and are integrated with the classical fixed-step Runge–Kutta scheme.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, SymEigen};
use crate::state::{
    moments_from_params, params_from_moments, KernelParams, MomentSet, Tolerances, Validate, ValidationReport,
};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticModel {
    pub omega_mat: DMatrix<f64>,
    /// External force `f`, entering as `q̈ + Ωq = f`.
    pub force: DVector<f64>,
}

impl QuadraticModel {
    pub fn new(omega_mat: DMatrix<f64>, force: DVector<f64>) -> Result<Self> {
        let n = omega_mat.nrows();
        if omega_mat.ncols() != n {
            return Err(Error::DimensionMismatch {
                what: "omega_mat",
                expected: n,
                found: omega_mat.ncols(),
            });
        }
        if force.len() != n {
            return Err(Error::DimensionMismatch {
                what: "force",
                expected: n,
                found: force.len(),
            });
        }
        let asym = linalg::relative(linalg::asymmetry(&omega_mat), linalg::max_abs(&omega_mat));
        if asym > Tolerances::default().symmetry {
            return Err(Error::Invalid(format!(
                "omega_mat is not symmetric (relative asymmetry {asym:e})"
            )));
        }
        Ok(QuadraticModel { omega_mat, force })
    }

    pub fn unforced(omega_mat: DMatrix<f64>) -> Result<Self> {
        let n = omega_mat.nrows();
        Self::new(omega_mat, DVector::zeros(n))
    }

    pub fn n_modes(&self) -> usize {
        self.omega_mat.nrows()
    }

    /// Exact ground state `Q = ½Ω^{-1/2}`, `P = ½Ω^{1/2}`, `S = 0` of a
    /// positive-definite, force-free model.
    pub fn ground_state(&self) -> Result<MomentSet> {
        let eig = SymEigen::new(&self.omega_mat);
        if !(eig.min() > 0.0) {
            return Err(Error::NotPositiveDefinite {
                what: "omega_mat",
                eigenvalue: eig.min(),
            });
        }
        MomentSet::uncorrelated(eig.map(|w| 0.5 / w.sqrt()), eig.map(|w| 0.5 * w.sqrt()))
    }
}

impl Validate for QuadraticModel {
    /// Positive definiteness is advisory: inverted oscillators evolve fine.
    fn validate_with(&self, tol: &Tolerances) -> ValidationReport {
        let mut report = ValidationReport::default();
        let finite = self.omega_mat.iter().chain(self.force.iter()).all(|x| x.is_finite());
        report.checks.push(crate::state::Check {
            name: "finite entries",
            passed: finite,
            worst_violation: if finite { 0.0 } else { f64::INFINITY },
        });
        let asym = linalg::relative(linalg::asymmetry(&self.omega_mat), linalg::max_abs(&self.omega_mat));
        report.checks.push(crate::state::Check {
            name: "omega_mat symmetric",
            passed: asym <= tol.symmetry,
            worst_violation: asym,
        });
        if finite {
            let eig = SymEigen::new(&self.omega_mat);
            report.checks.push(crate::state::Check {
                name: "omega_mat positive definite",
                passed: eig.min() > -tol.definiteness * eig.max().abs() && eig.min() > 0.0,
                worst_violation: (-eig.min()).max(0.0),
            });
        }
        report
    }
}

/// Time derivative of every component of `Ξ`, returned in a [`MomentSet`].
pub fn moment_derivatives(xi: &MomentSet, model: &QuadraticModel) -> Result<MomentSet> {
    let n = xi.n_modes();
    if model.n_modes() != n {
        return Err(Error::DimensionMismatch {
            what: "model",
            expected: n,
            found: model.n_modes(),
        });
    }
    let omega = &model.omega_mat;
    let os = omega * &xi.s_mat;
    Ok(MomentSet {
        q_mat: &xi.s_mat + xi.s_mat.transpose(),
        p_mat: -(&os + os.transpose()),
        s_mat: &xi.p_mat - &xi.q_mat * omega,
        mean_q: xi.mean_p.clone(),
        mean_p: -(omega * &xi.mean_q) + &model.force,
    })
}

/// `x + h·k`, component-wise.
fn axpy(x: &MomentSet, h: f64, k: &MomentSet) -> MomentSet {
    MomentSet {
        q_mat: &x.q_mat + &k.q_mat * h,
        p_mat: &x.p_mat + &k.p_mat * h,
        s_mat: &x.s_mat + &k.s_mat * h,
        mean_q: &x.mean_q + &k.mean_q * h,
        mean_p: &x.mean_p + &k.mean_p * h,
    }
}

fn rk4_step(x: &MomentSet, model: &QuadraticModel, h: f64) -> Result<MomentSet> {
    let k1 = moment_derivatives(x, model)?;
    let k2 = moment_derivatives(&axpy(x, 0.5 * h, &k1), model)?;
    let k3 = moment_derivatives(&axpy(x, 0.5 * h, &k2), model)?;
    let k4 = moment_derivatives(&axpy(x, h, &k3), model)?;
    let mut next = axpy(x, h / 6.0, &k1);
    next = axpy(&next, h / 3.0, &k2);
    next = axpy(&next, h / 3.0, &k3);
    next = axpy(&next, h / 6.0, &k4);
    next.q_mat = linalg::symmetrize(&next.q_mat);
    next.p_mat = linalg::symmetrize(&next.p_mat);
    Ok(next)
}

fn is_finite(x: &MomentSet) -> bool {
    [
        x.q_mat.as_slice(),
        x.p_mat.as_slice(),
        x.s_mat.as_slice(),
        x.mean_q.as_slice(),
        x.mean_p.as_slice(),
    ]
    .iter()
    .all(|s| s.iter().all(|v| v.is_finite()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `(t, Ξ(t))`, strictly increasing in `t`; the first entry is the
    /// initial condition.
    pub samples: Vec<(f64, MomentSet)>,
    pub dt: f64,
    pub method: &'static str,
    pub steps: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> &MomentSet {
        &self.samples.last().expect("trajectory is never empty").1
    }

    pub fn final_time(&self) -> f64 {
        self.samples.last().expect("trajectory is never empty").0
    }
}

/// Number of steps of size `dt` covering `[0, t_final]`; the last step is
/// shortened to land on `t_final`. A ratio within `1e-9` of an integer is
/// rounded to it instead of adding a sliver step.
fn step_count(t_final: f64, dt: f64) -> usize {
    let ratio = t_final / dt;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        ratio.ceil() as usize
    }
}

/// Integrates `Ξ` from `t = 0` to `t_final` with step `dt`, recording every
/// `sample_every`-th step plus the final time.
pub fn evolve(
    xi0: &MomentSet,
    model: &QuadraticModel,
    t_final: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::domain(format!("time step {dt} must be positive")));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::domain(format!("final time {t_final} must be non-negative")));
    }
    if sample_every == 0 {
        return Err(Error::domain("sample_every must be at least 1"));
    }
    if model.n_modes() != xi0.n_modes() {
        return Err(Error::DimensionMismatch {
            what: "model",
            expected: xi0.n_modes(),
            found: model.n_modes(),
        });
    }
    let steps = step_count(t_final, dt);
    let mut samples = vec![(0.0, xi0.clone())];
    let mut state = xi0.clone();
    for i in 1..=steps {
        let t_prev = (i - 1) as f64 * dt;
        let (t, h) = if i == steps {
            (t_final, t_final - t_prev)
        } else {
            (i as f64 * dt, dt)
        };
        state = rk4_step(&state, model, h)?;
        if !is_finite(&state) {
            return Err(Error::Divergence { time: t });
        }
        if i % sample_every == 0 || i == steps {
            samples.push((t, state.clone()));
        }
    }
    Ok(Trajectory {
        samples,
        dt,
        method: "rk4",
        steps,
    })
}

/// `Θ(t_final)` obtained through `Ξ`: `Θ → Ξ → Ξ(t) → Θ(t)`.
pub fn evolve_params(theta0: &KernelParams, model: &QuadraticModel, t_final: f64, dt: f64) -> Result<KernelParams> {
    let xi0 = moments_from_params(theta0)?;
    let traj = evolve(&xi0, model, t_final, dt, usize::MAX)?;
    params_from_moments(traj.final_state())
}
