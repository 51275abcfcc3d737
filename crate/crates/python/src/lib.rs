//! Python bindings. Matrices cross the boundary as lists of rows.

use gaussent::{Boundary, ChainConfig, ConformalThresholds, FitMode, LogBase, Region, Validate};
use nalgebra::{DMatrix, DVector};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(pygaussent, GaussentError, PyException, "Base class of library errors.");
create_exception!(
    pygaussent,
    ValidationError,
    GaussentError,
    "Input violates a physical or structural constraint."
);
create_exception!(
    pygaussent,
    NumericalError,
    GaussentError,
    "A computation broke down numerically."
);
create_exception!(
    pygaussent,
    DomainError,
    GaussentError,
    "Argument outside the supported domain."
);

fn to_py(e: gaussent::Error) -> PyErr {
    let msg = e.to_string();
    match e.class() {
        gaussent::ErrorClass::Validation => ValidationError::new_err(msg),
        gaussent::ErrorClass::Numerical => NumericalError::new_err(msg),
        gaussent::ErrorClass::Domain => DomainError::new_err(msg),
    }
}

type Rows = Vec<Vec<f64>>;

fn matrix(name: &str, rows: &Rows, n: usize) -> PyResult<DMatrix<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err(format!("{name} must be {n}x{n}")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn vector(name: &str, v: Option<Vec<f64>>, n: usize) -> PyResult<DVector<f64>> {
    match v {
        None => Ok(DVector::zeros(n)),
        Some(v) if v.len() == n => Ok(DVector::from_vec(v)),
        Some(v) => Err(PyValueError::new_err(format!(
            "{name} has {} entries, expected {n}",
            v.len()
        ))),
    }
}

fn rows(m: &DMatrix<f64>) -> Rows {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn log_base(base: &str) -> PyResult<LogBase> {
    match base {
        "2" => Ok(LogBase::Two),
        "e" => Ok(LogBase::E),
        other => Err(PyValueError::new_err(format!(
            "log base must be '2' or 'e', got {other:?}"
        ))),
    }
}

/// Kernel parameters `{A, C, d}` of a Gaussian density matrix.
#[pyclass(name = "KernelParams", module = "pygaussent")]
struct PyKernelParams(gaussent::KernelParams);

#[pymethods]
impl PyKernelParams {
    #[new]
    #[pyo3(signature = (a_real, c_real, a_imag=None, c_imag=None, d_real=None, d_imag=None))]
    fn new(
        a_real: Rows,
        c_real: Rows,
        a_imag: Option<Rows>,
        c_imag: Option<Rows>,
        d_real: Option<Vec<f64>>,
        d_imag: Option<Vec<f64>>,
    ) -> PyResult<Self> {
        let n = a_real.len();
        let zero = DMatrix::zeros(n, n);
        let opt = |name: &str, m: Option<Rows>| m.map_or(Ok(zero.clone()), |m| matrix(name, &m, n));
        gaussent::KernelParams::from_parts(
            matrix("a_real", &a_real, n)?,
            opt("a_imag", a_imag)?,
            matrix("c_real", &c_real, n)?,
            opt("c_imag", c_imag)?,
            vector("d_real", d_real, n)?,
            vector("d_imag", d_imag, n)?,
        )
        .map(Self)
        .map_err(to_py)
    }

    #[getter]
    fn n_modes(&self) -> usize {
        self.0.n_modes()
    }
    #[getter]
    fn a_real(&self) -> Rows {
        rows(&self.0.a_real)
    }
    #[getter]
    fn a_imag(&self) -> Rows {
        rows(&self.0.a_imag)
    }
    #[getter]
    fn c_real(&self) -> Rows {
        rows(&self.0.c_real)
    }
    #[getter]
    fn c_imag(&self) -> Rows {
        rows(&self.0.c_imag)
    }
    #[getter]
    fn d_real(&self) -> Vec<f64> {
        self.0.d_real.iter().copied().collect()
    }
    #[getter]
    fn d_imag(&self) -> Vec<f64> {
        self.0.d_imag.iter().copied().collect()
    }

    fn to_moments(&self) -> PyResult<PyMomentSet> {
        gaussent::moments_from_params(&self.0).map(PyMomentSet).map_err(to_py)
    }

    fn spectrum(&self) -> PyResult<PyModeSpectrum> {
        gaussent::mode_spectrum_from_params(&self.0)
            .map(PyModeSpectrum)
            .map_err(to_py)
    }

    /// Failed checks as `(name, worst_violation)` pairs; empty when valid.
    fn validate(&self) -> Vec<(String, f64)> {
        violations(self.0.validate())
    }

    fn __repr__(&self) -> String {
        format!("KernelParams(n_modes={})", self.0.n_modes())
    }
}

fn violations(report: gaussent::ValidationReport) -> Vec<(String, f64)> {
    report
        .violations()
        .map(|c| (c.name.to_string(), c.worst_violation))
        .collect()
}

/// Moments `{Q, P, S, <q>, <p>}` of a Gaussian state.
#[pyclass(name = "MomentSet", module = "pygaussent")]
struct PyMomentSet(gaussent::MomentSet);

#[pymethods]
impl PyMomentSet {
    #[new]
    #[pyo3(signature = (q, p, s=None, mean_q=None, mean_p=None))]
    fn new(q: Rows, p: Rows, s: Option<Rows>, mean_q: Option<Vec<f64>>, mean_p: Option<Vec<f64>>) -> PyResult<Self> {
        let n = q.len();
        let s = match s {
            Some(s) => matrix("s", &s, n)?,
            None => DMatrix::zeros(n, n),
        };
        gaussent::MomentSet::from_parts(
            matrix("q", &q, n)?,
            matrix("p", &p, n)?,
            s,
            vector("mean_q", mean_q, n)?,
            vector("mean_p", mean_p, n)?,
        )
        .map(Self)
        .map_err(to_py)
    }

    #[getter]
    fn n_modes(&self) -> usize {
        self.0.n_modes()
    }
    #[getter]
    fn q(&self) -> Rows {
        rows(&self.0.q_mat)
    }
    #[getter]
    fn p(&self) -> Rows {
        rows(&self.0.p_mat)
    }
    #[getter]
    fn s(&self) -> Rows {
        rows(&self.0.s_mat)
    }
    #[getter]
    fn mean_q(&self) -> Vec<f64> {
        self.0.mean_q.iter().copied().collect()
    }
    #[getter]
    fn mean_p(&self) -> Vec<f64> {
        self.0.mean_p.iter().copied().collect()
    }

    fn to_params(&self) -> PyResult<PyKernelParams> {
        gaussent::params_from_moments(&self.0)
            .map(PyKernelParams)
            .map_err(to_py)
    }

    fn spectrum(&self) -> PyResult<PyModeSpectrum> {
        gaussent::mode_spectrum_from_moments(&self.0)
            .map(PyModeSpectrum)
            .map_err(to_py)
    }

    /// Moments of the sites `start .. start + length` (cyclic).
    fn reduce(&self, start: usize, length: usize) -> PyResult<Self> {
        gaussent::reduce_region(&self.0, Region::new(start, length))
            .map(Self)
            .map_err(to_py)
    }

    fn validate(&self) -> Vec<(String, f64)> {
        violations(self.0.validate())
    }

    fn max_abs_diff(&self, other: PyRef<'_, Self>) -> f64 {
        self.0.max_abs_diff(&other.0)
    }

    fn __repr__(&self) -> String {
        format!("MomentSet(n_modes={})", self.0.n_modes())
    }
}

/// Per-mode ratios `ξ` of a density-matrix spectrum, descending.
#[pyclass(name = "ModeSpectrum", module = "pygaussent")]
struct PyModeSpectrum(gaussent::ModeSpectrum);

#[pymethods]
impl PyModeSpectrum {
    #[new]
    fn new(xi: Vec<f64>) -> PyResult<Self> {
        gaussent::ModeSpectrum::from_xi(xi).map(Self).map_err(to_py)
    }

    #[getter]
    fn xi(&self) -> Vec<f64> {
        self.0.xi.clone()
    }
    #[getter]
    fn eta(&self) -> Vec<f64> {
        self.0.eta.clone()
    }
    #[getter]
    fn mu(&self) -> Vec<f64> {
        self.0.mu.clone()
    }
    #[getter]
    fn lambda0(&self) -> f64 {
        self.0.lambda0
    }

    #[pyo3(signature = (base="2"))]
    fn entropy(&self, base: &str) -> PyResult<f64> {
        Ok(gaussent::entropy_in(&self.0, log_base(base)?))
    }

    #[pyo3(signature = (base="2"))]
    fn entropy_terms(&self, base: &str) -> PyResult<Vec<f64>> {
        Ok(gaussent::spectrum::entropy_terms_in(&self.0, log_base(base)?))
    }

    /// `E_M = 1 - tr ρᴹ`.
    fn product_identification(&self, m: u32) -> PyResult<f64> {
        gaussent::product_identification(&self.0, m).map_err(to_py)
    }

    /// The `k` largest eigenvalues as `(λ, occupation)` pairs.
    fn top_eigenvalues(&self, k: usize) -> Vec<(f64, Vec<u32>)> {
        gaussent::top_eigenvalues(&self.0, k)
            .into_iter()
            .map(|r| (r.lambda, r.occupation))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "ModeSpectrum(n_modes={}, lambda0={:e})",
            self.0.n_modes(),
            self.0.lambda0
        )
    }
}

/// Least-squares fit result.
#[pyclass(name = "FitResult", module = "pygaussent", get_all)]
struct PyFitResult {
    slope: f64,
    offset: f64,
    rms_residual: f64,
    max_residual: f64,
    n_points: usize,
    covariance: Vec<Vec<f64>>,
    /// Slope within 0.05 of 1/3 and rms residual at most 0.05.
    conformal: bool,
}

impl From<gaussent::FitResult> for PyFitResult {
    fn from(f: gaussent::FitResult) -> Self {
        PyFitResult {
            conformal: ConformalThresholds::default().is_conformal(&f),
            slope: f.slope,
            offset: f.offset,
            rms_residual: f.rms_residual,
            max_residual: f.max_residual,
            n_points: f.n_points,
            covariance: f.covariance.iter().map(|r| r.to_vec()).collect(),
        }
    }
}

#[pymethods]
impl PyFitResult {
    fn __repr__(&self) -> String {
        format!(
            "FitResult(slope={}, offset={}, rms_residual={:e}, n_points={})",
            self.slope, self.offset, self.rms_residual, self.n_points
        )
    }
}

fn chain(n: usize, kappa: f64, alpha: u8, lattice_const: f64, length: Option<f64>) -> PyResult<ChainConfig> {
    let boundary = Boundary::from_alpha(alpha).map_err(to_py)?;
    match length {
        Some(l) => ChainConfig::fixed_length(n, l, kappa, boundary),
        None => ChainConfig::with_lattice_const(n, lattice_const, kappa, boundary),
    }
    .map_err(to_py)
}

/// Ground-state moments of a harmonic ring of `n` sites.
#[pyfunction]
#[pyo3(signature = (n, kappa, alpha=0, lattice_const=1.0, length=None))]
fn ground_state(n: usize, kappa: f64, alpha: u8, lattice_const: f64, length: Option<f64>) -> PyResult<PyMomentSet> {
    gaussent::ground_state_moments(&chain(n, kappa, alpha, lattice_const, length)?)
        .map(PyMomentSet)
        .map_err(to_py)
}

/// The ring's coupling matrix `Ω`.
#[pyfunction]
#[pyo3(signature = (n, kappa, alpha=0, lattice_const=1.0, length=None))]
fn coupling_matrix(n: usize, kappa: f64, alpha: u8, lattice_const: f64, length: Option<f64>) -> PyResult<Rows> {
    Ok(rows(&gaussent::chain::coupling_matrix(&chain(
        n,
        kappa,
        alpha,
        lattice_const,
        length,
    )?)))
}

/// Spectrum of a region of the ring's ground state; the region defaults
/// to the first half. `extended=True` uses double-double arithmetic.
#[pyfunction]
#[pyo3(signature = (n, kappa, alpha=0, start=0, region_len=None, lattice_const=1.0, length=None, extended=false))]
#[allow(clippy::too_many_arguments)]
fn region_spectrum(
    n: usize,
    kappa: f64,
    alpha: u8,
    start: usize,
    region_len: Option<usize>,
    lattice_const: f64,
    length: Option<f64>,
    extended: bool,
) -> PyResult<PyModeSpectrum> {
    let config = chain(n, kappa, alpha, lattice_const, length)?;
    let region = Region::new(start, region_len.unwrap_or(n / 2));
    let spec = if extended {
        gaussent::region_spectrum_extended(&config, region)
    } else {
        gaussent::region_spectrum(&config, region)
    };
    spec.map(PyModeSpectrum).map_err(to_py)
}

fn fit_mode(mode: &str, slope: f64) -> PyResult<FitMode> {
    match mode {
        "free" => Ok(FitMode::Free),
        "fixed" => Ok(FitMode::FixedSlope(slope)),
        "anchored" => Ok(FitMode::EndAnchored(slope)),
        other => Err(PyValueError::new_err(format!(
            "fit mode must be free, fixed or anchored, got {other:?}"
        ))),
    }
}

/// Fits `S = b·log₂[(N/π) sin(πσ)] + a` (slope `b`, offset `a`).
#[pyfunction]
#[pyo3(signature = (sigma, entropy, mode="free", slope=1.0/3.0))]
fn fit_log_sin(sigma: Vec<f64>, entropy: Vec<f64>, mode: &str, slope: f64) -> PyResult<PyFitResult> {
    if sigma.len() != entropy.len() {
        return Err(PyValueError::new_err("sigma and entropy differ in length"));
    }
    let points: Vec<(f64, f64)> = sigma.into_iter().zip(entropy).collect();
    gaussent::fit_log_sin(&points, fit_mode(mode, slope)?)
        .map(Into::into)
        .map_err(to_py)
}

/// Fits `S = b·log₂N + a`.
#[pyfunction]
fn fit_size_scaling(sizes: Vec<usize>, entropy: Vec<f64>) -> PyResult<PyFitResult> {
    if sizes.len() != entropy.len() {
        return Err(PyValueError::new_err("sizes and entropy differ in length"));
    }
    let points: Vec<(usize, f64)> = sizes.into_iter().zip(entropy).collect();
    gaussent::fit_size_scaling(&points).map(Into::into).map_err(to_py)
}

/// Evolves `state` under `L = ½q̇² − ½qᵀΩq + fᵀq` with fixed-step RK4;
/// returns `(t, MomentSet)` samples.
#[pyfunction]
#[pyo3(signature = (state, omega, t_final, dt, force=None, sample_every=1))]
fn evolve(
    state: PyRef<'_, PyMomentSet>,
    omega: Rows,
    t_final: f64,
    dt: f64,
    force: Option<Vec<f64>>,
    sample_every: usize,
) -> PyResult<Vec<(f64, PyMomentSet)>> {
    let n = state.0.n_modes();
    let model =
        gaussent::QuadraticModel::new(matrix("omega", &omega, n)?, vector("force", force, n)?).map_err(to_py)?;
    let traj = gaussent::evolve(&state.0, &model, t_final, dt, sample_every).map_err(to_py)?;
    Ok(traj.samples.into_iter().map(|(t, xi)| (t, PyMomentSet(xi))).collect())
}

#[pymodule]
pub fn pygaussent(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyKernelParams>()?;
    m.add_class::<PyMomentSet>()?;
    m.add_class::<PyModeSpectrum>()?;
    m.add_class::<PyFitResult>()?;
    m.add_function(wrap_pyfunction!(ground_state, m)?)?;
    m.add_function(wrap_pyfunction!(coupling_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(region_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(fit_log_sin, m)?)?;
    m.add_function(wrap_pyfunction!(fit_size_scaling, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    let py = m.py();
    m.add("GaussentError", py.get_type::<GaussentError>())?;
    m.add("ValidationError", py.get_type::<ValidationError>())?;
    m.add("NumericalError", py.get_type::<NumericalError>())?;
    m.add("DomainError", py.get_type::<DomainError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
