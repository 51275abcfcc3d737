//! Ground state of the discretised Klein–Gordon chain
//! `H = ½Σ πₙ² + ½Σ [(φₙ₊₁ - φₙ)²/a² + κ²φₙ²]` on a ring of `N` sites.
//!
//! Wavevectors are `k_m = π(2m + α)/N`: `α = 0` is the periodic field (with
//! the `k = 0` zero mode), `α = 1` the antiperiodic one. All angles are
//! reduced with integer arithmetic, so `cos(k r)` is evaluated on an exact
//! multiple of `π/N`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spectrum::{self, ModeSpectrum};
use crate::state::MomentSet;

/// Boundary condition on the field; the paper's `α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// `α = 0`, includes the zero mode `ω₀ = κ`.
    Periodic,
    /// `α = 1`, no zero mode.
    Antiperiodic,
}

impl Boundary {
    pub fn from_alpha(alpha: u8) -> Result<Self> {
        match alpha {
            0 => Ok(Boundary::Periodic),
            1 => Ok(Boundary::Antiperiodic),
            _ => Err(Error::domain(format!("alpha must be 0 or 1, got {alpha}"))),
        }
    }

    pub fn alpha(self) -> u8 {
        match self {
            Boundary::Periodic => 0,
            Boundary::Antiperiodic => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig {
    pub n_sites: usize,
    pub lattice_const: f64,
    /// `κ`, in inverse length.
    pub mass: f64,
    pub boundary: Boundary,
}

impl ChainConfig {
    /// Chain in lattice units, `a = 1`.
    pub fn new(n_sites: usize, mass: f64, boundary: Boundary) -> Result<Self> {
        Self::with_lattice_const(n_sites, 1.0, mass, boundary)
    }

    pub fn with_lattice_const(n_sites: usize, lattice_const: f64, mass: f64, boundary: Boundary) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::domain("chain needs at least one site"));
        }
        if !(lattice_const > 0.0 && lattice_const.is_finite()) {
            return Err(Error::domain(format!(
                "lattice constant {lattice_const} must be positive"
            )));
        }
        if !(mass >= 0.0 && mass.is_finite()) {
            return Err(Error::domain(format!("mass {mass} must be non-negative")));
        }
        Ok(ChainConfig {
            n_sites,
            lattice_const,
            mass,
            boundary,
        })
    }

    /// Chain of fixed total length `Λ`, so that `a = Λ / N`.
    pub fn fixed_length(n_sites: usize, length: f64, mass: f64, boundary: Boundary) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::domain("chain needs at least one site"));
        }
        Self::with_lattice_const(n_sites, length / n_sites as f64, mass, boundary)
    }

    /// `Λ = aN`.
    pub fn system_length(&self) -> f64 {
        self.lattice_const * self.n_sites as f64
    }

    pub fn alpha(&self) -> u8 {
        self.boundary.alpha()
    }

    fn check_zero_mode(&self) -> Result<()> {
        if self.boundary == Boundary::Periodic && self.mass == 0.0 {
            return Err(Error::ZeroModeDivergence);
        }
        Ok(())
    }

    /// Indices `j ∈ (-N, N]` with `k = πj/N`, in the order `m = 0..N-1`.
    fn mode_indices(&self) -> Vec<i64> {
        let n = self.n_sites as i64;
        (0..n)
            .map(|m| {
                let j = (2 * m + i64::from(self.alpha())) % (2 * n);
                if j > n {
                    j - 2 * n
                } else {
                    j
                }
            })
            .collect()
    }

    fn omega_of_index(&self, j: i64) -> f64 {
        let half = std::f64::consts::PI * j as f64 / (2 * self.n_sites) as f64;
        let s = 2.0 * half.sin() / self.lattice_const;
        (s * s + self.mass * self.mass).sqrt()
    }
}

/// `ω_k = √((4/a²) sin²(k/2) + κ²)`.
pub fn dispersion(k: f64, config: &ChainConfig) -> f64 {
    let s = 2.0 * (0.5 * k).sin() / config.lattice_const;
    (s * s + config.mass * config.mass).sqrt()
}

/// `k_m = π(2m + α)/N`, `m = 0..N-1`, reduced to `(-π, π]`.
pub fn wavevectors(config: &ChainConfig) -> Vec<f64> {
    let n = config.n_sites as f64;
    config
        .mode_indices()
        .into_iter()
        .map(|j| std::f64::consts::PI * j as f64 / n)
        .collect()
}

/// `(1/N) Σ_k w(k) cos(k r)` for `r = 0..N-1`.
fn cosine_sums(config: &ChainConfig, weights: &[f64]) -> Vec<f64> {
    let n = config.n_sites as i64;
    let modes = config.mode_indices();
    (0..n)
        .map(|r| {
            let total: f64 = modes
                .iter()
                .zip(weights)
                .map(|(&j, &w)| {
                    let phase = (j * r).rem_euclid(2 * n);
                    w * (std::f64::consts::PI * phase as f64 / n as f64).cos()
                })
                .sum();
            total / n as f64
        })
        .collect()
}

/// `M_mn = c_{|m - n|}`.
fn from_distances(c: &[f64]) -> DMatrix<f64> {
    let n = c.len();
    DMatrix::from_fn(n, n, |m, k| c[m.abs_diff(k)])
}

/// Ground-state moments: `Q_mn = (1/2N) Σ_k cos(k(m-n))/ω_k`,
/// `P_mn = (1/2N) Σ_k ω_k cos(k(m-n))`, `S = 0`, zero means.
///
/// For `α = 1` the entries depend on `|m - n|` only up to the antiperiodic
/// sign `c_{N-r} = -c_r`; they are therefore indexed by `|m - n|`, never by
/// `(m - n) mod N`.
pub fn ground_state_moments(config: &ChainConfig) -> Result<MomentSet> {
    config.check_zero_mode()?;
    let omega: Vec<f64> = config
        .mode_indices()
        .into_iter()
        .map(|j| config.omega_of_index(j))
        .collect();
    let inv: Vec<f64> = omega.iter().map(|w| 0.5 / w).collect();
    let half: Vec<f64> = omega.iter().map(|w| 0.5 * w).collect();
    let q = from_distances(&cosine_sums(config, &inv));
    let p = from_distances(&cosine_sums(config, &half));
    MomentSet::uncorrelated(q, p)
}

/// Coupling matrix `Ω_mn = (1/N) Σ_k ω_k² cos(k(m-n))` of the chain
/// Hamiltonian, so that the ground state is stationary under it.
pub fn coupling_matrix(config: &ChainConfig) -> DMatrix<f64> {
    let w2: Vec<f64> = config
        .mode_indices()
        .into_iter()
        .map(|j| config.omega_of_index(j).powi(2))
        .collect();
    from_distances(&cosine_sums(config, &w2))
}

/// Contiguous block of sites, wrapping around the ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Region {
    pub start: usize,
    pub len: usize,
}

impl Region {
    pub fn new(start: usize, len: usize) -> Self {
        Region { start, len }
    }

    /// The first `⌊N/2⌋` sites.
    pub fn half(n_sites: usize) -> Self {
        Region::new(0, n_sites / 2)
    }

    /// `σ = ℓ/N`.
    pub fn fraction(&self, n_sites: usize) -> f64 {
        self.len as f64 / n_sites as f64
    }

    pub fn indices(&self, n_sites: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).map(move |i| (self.start + i) % n_sites)
    }

    fn check(&self, n_sites: usize) -> Result<()> {
        if self.len == 0 {
            return Err(Error::domain("region is empty"));
        }
        if self.len > n_sites || self.start >= n_sites {
            return Err(Error::domain(format!(
                "region (start {}, length {}) does not fit a chain of {} sites",
                self.start, self.len, n_sites
            )));
        }
        Ok(())
    }
}

/// Moments of the reduced state on `region`: principal sub-blocks of `Q`,
/// `P`, `S` and the matching entries of the means.
pub fn reduce_region(xi_set: &MomentSet, region: Region) -> Result<MomentSet> {
    let n = xi_set.n_modes();
    region.check(n)?;
    let idx: Vec<usize> = region.indices(n).collect();
    let l = idx.len();
    let sub = |m: &DMatrix<f64>| DMatrix::from_fn(l, l, |i, j| m[(idx[i], idx[j])]);
    let subv = |v: &DVector<f64>| DVector::from_fn(l, |i, _| v[idx[i]]);
    MomentSet::from_parts(
        sub(&xi_set.q_mat),
        sub(&xi_set.p_mat),
        sub(&xi_set.s_mat),
        subv(&xi_set.mean_q),
        subv(&xi_set.mean_p),
    )
}

/// Mode spectrum of the ground state reduced to `region`.
pub fn region_spectrum(config: &ChainConfig, region: Region) -> Result<ModeSpectrum> {
    let full = ground_state_moments(config)?;
    spectrum::mode_spectrum_from_moments(&reduce_region(&full, region)?)
}

/// Geometric entropy of `region` in ebits.
pub fn region_entropy(config: &ChainConfig, region: Region) -> Result<f64> {
    Ok(spectrum::entropy(&region_spectrum(config, region)?))
}
