//! Independent checks on the η̄ reduction, used by the test suites.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{self, SymEigen};
use crate::state::{KernelParams, MomentSet};

/// Largest grid accepted by [`grid_oracle`] along one axis.
pub const MAX_GRID_POINTS: usize = 200;
/// Largest discretised matrix accepted by [`grid_oracle`] (`points^N`).
pub const MAX_GRID_SIZE: usize = 1024;

/// Symplectic values `μᵢ`, descending, of a moment set with `S = 0`.
///
/// `μᵢ²` are the eigenvalues of `4QP`, computed from the symmetric form
/// `4 Q^{1/2} P Q^{1/2}`.
pub fn symplectic_oracle(xi_set: &MomentSet) -> Result<Vec<f64>> {
    if linalg::max_abs(&xi_set.s_mat) != 0.0 {
        return Err(Error::Unsupported("symplectic oracle requires s_mat = 0".into()));
    }
    let root = linalg::spd_sqrt(&xi_set.q_mat, "position covariance Q")?;
    let m = &root * &xi_set.p_mat * &root * 4.0;
    let eig = SymEigen::new(&m);
    let mut mu: Vec<f64> = eig.values.iter().map(|&x| x.max(0.0).sqrt()).collect();
    mu.sort_by(|a, b| b.total_cmp(a));
    Ok(mu)
}

/// Eigenvalues, descending, of the kernel `ρ(q, q')` sampled on a uniform
/// grid of `grid_points` per axis over `[-L, L]^N`, weighted by `h^N`.
///
/// Only `N ≤ 2` is supported; for `N = 2` the total grid is further limited
/// to [`MAX_GRID_SIZE`] points.
pub fn grid_oracle(theta: &KernelParams, grid_points: usize, box_halfwidth: f64) -> Result<Vec<f64>> {
    let n = theta.n_modes();
    if n > 2 {
        return Err(Error::Unsupported(format!(
            "grid oracle supports at most 2 modes, got {n}"
        )));
    }
    if !(2..=MAX_GRID_POINTS).contains(&grid_points) {
        return Err(Error::domain(format!(
            "grid_points must be in 2..={MAX_GRID_POINTS}, got {grid_points}"
        )));
    }
    if !(box_halfwidth > 0.0 && box_halfwidth.is_finite()) {
        return Err(Error::domain(format!(
            "box half-width {box_halfwidth} must be positive"
        )));
    }
    let total = grid_points.pow(n as u32);
    if total > MAX_GRID_SIZE && n > 1 {
        return Err(Error::Unsupported(format!(
            "grid of {total} points exceeds the cap of {MAX_GRID_SIZE}"
        )));
    }

    let gap = &theta.a_real - &theta.c_real;
    let (gap_inv, _) = linalg::spd_inverse(&gap, "a_real - c_real").map_err(|e| match e {
        Error::NotPositiveDefinite { eigenvalue, .. } => Error::SingularState { eigenvalue },
        other => other,
    })?;
    let det: f64 = SymEigen::new(&gap).values.iter().product();
    let log_norm =
        0.5 * (det.ln() - n as f64 * std::f64::consts::PI.ln()) - theta.d_real.dot(&(&gap_inv * &theta.d_real));

    let h = 2.0 * box_halfwidth / (grid_points - 1) as f64;
    let axis: Vec<f64> = (0..grid_points).map(|j| -box_halfwidth + j as f64 * h).collect();
    let points: Vec<DVector<f64>> = (0..total)
        .map(|idx| {
            let mut rest = idx;
            DVector::from_fn(n, |_, _| {
                let x = axis[rest % grid_points];
                rest /= grid_points;
                x
            })
        })
        .collect();
    let log_weight = n as f64 * h.ln() + log_norm;

    // log ρ(q, q') = -½(qA q + q'A* q') + qCq' + d q + d* q'
    let entry = |q: &DVector<f64>, r: &DVector<f64>| -> Complex<f64> {
        let re = -0.5 * (q.dot(&(&theta.a_real * q)) + r.dot(&(&theta.a_real * r)))
            + q.dot(&(&theta.c_real * r))
            + theta.d_real.dot(q)
            + theta.d_real.dot(r);
        let im = -0.5 * (q.dot(&(&theta.a_imag * q)) - r.dot(&(&theta.a_imag * r)))
            + q.dot(&(&theta.c_imag * r))
            + theta.d_imag.dot(q)
            - theta.d_imag.dot(r);
        Complex::from_polar((re + log_weight).exp(), im)
    };

    let complex = linalg::max_abs(&theta.a_imag) > 0.0
        || linalg::max_abs(&theta.c_imag) > 0.0
        || linalg::max_abs_vec(&theta.d_imag) > 0.0;
    let mut values: Vec<f64> = if complex {
        let k = DMatrix::from_fn(total, total, |i, j| entry(&points[i], &points[j]));
        let k = (&k + k.adjoint()) * Complex::new(0.5, 0.0);
        SymmetricEigen::new(k).eigenvalues.iter().copied().collect()
    } else {
        let k = DMatrix::from_fn(total, total, |i, j| entry(&points[i], &points[j]).re);
        SymEigen::new(&k).values.iter().copied().collect()
    };
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn scalar(x: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, x)
    }

    #[test]
    fn oracle_examples() {
        let ground = MomentSet::uncorrelated(DMatrix::identity(3, 3) * 0.5, DMatrix::identity(3, 3) * 0.5).unwrap();
        for mu in symplectic_oracle(&ground).unwrap() {
            assert_relative_eq!(mu, 1.0, epsilon = 1e-14);
        }
        let thermal = MomentSet::uncorrelated(scalar(1.5), scalar(1.5)).unwrap();
        assert_relative_eq!(symplectic_oracle(&thermal).unwrap()[0], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn oracle_rejects_nonzero_s() {
        let xi = MomentSet::from_parts(
            scalar(0.5),
            scalar(0.745),
            scalar(-0.35),
            DVector::zeros(1),
            DVector::zeros(1),
        )
        .unwrap();
        assert!(matches!(symplectic_oracle(&xi), Err(Error::Unsupported(_))));
    }

    #[test]
    fn grid_pure_state() {
        let theta = KernelParams::real(scalar(1.0), scalar(0.0)).unwrap();
        let ev = grid_oracle(&theta, 100, 6.0).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-6);
        assert!(ev[1..].iter().all(|x| x.abs() < 1e-6));
    }

    #[test]
    fn grid_mixed_state_geometric() {
        let theta = KernelParams::real(scalar(1.0), scalar(0.6)).unwrap();
        let ev = grid_oracle(&theta, 150, 8.0).unwrap();
        for n in 0..6 {
            let expected = (2.0 / 3.0) * (1f64 / 3.0).powi(n);
            assert!((ev[n as usize] - expected).abs() < 1e-4, "n={n}");
        }
    }

    #[test]
    fn grid_displacement_invariance() {
        let base = KernelParams::real(scalar(1.0), scalar(0.6)).unwrap();
        let shifted = base
            .clone()
            .with_displacement(DVector::from_element(1, 0.3), DVector::from_element(1, 0.2))
            .unwrap();
        let a = grid_oracle(&base, 150, 8.0).unwrap();
        let b = grid_oracle(&shifted, 150, 8.0).unwrap();
        for n in 0..6 {
            assert!((a[n] - b[n]).abs() < 1e-4);
        }
    }

    #[test]
    fn grid_rejects_three_modes() {
        let theta = KernelParams::real(DMatrix::identity(3, 3), DMatrix::zeros(3, 3)).unwrap();
        assert!(matches!(grid_oracle(&theta, 10, 5.0), Err(Error::Unsupported(_))));
    }
}
