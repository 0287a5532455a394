//! Python bindings for the `gaussq` core library.
//!
//! Matrices cross the boundary as lists of rows. Structured results come back
//! as plain dicts built from the same JSON the CLI prints.

use gaussq::fock::{self, FockDensity as CoreFock};
use gaussq::gaussian;
use gaussq::inequalities;
use gaussq::linalg::C64;
use gaussq::lossy::{self, LindbladSpec as CoreLindblad};
use gaussq::memcap::{self, MemoryChannelParams, DEFAULT_TOL};
use gaussq::superop::{self, MapSpec as CoreMapSpec, Witness};
use gaussq::symplectic::{self, CovarianceMatrix as CoreCov};
use gaussq::thinning::{self, DiscreteDistribution};
use gaussq::verify::{self, VerifyConfig};
use nalgebra::{DMatrix, DVector};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

fn err(e: gaussq::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix<T: nalgebra::Scalar + Copy>(rows: &[Vec<T>]) -> PyResult<DMatrix<T>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(PyValueError::new_err("ragged matrix rows"));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn rows<T: nalgebra::Scalar + Copy>(m: &DMatrix<T>) -> Vec<Vec<T>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Real symmetric covariance matrix of an `n`-mode Gaussian state.
#[pyclass(frozen)]
struct CovarianceMatrix {
    inner: CoreCov,
}

#[pymethods]
impl CovarianceMatrix {
    #[new]
    fn new(sigma: Vec<Vec<f64>>) -> PyResult<Self> {
        let inner = CoreCov::new(matrix(&sigma)?).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn thermal(n: usize, nbar: f64) -> PyResult<Self> {
        let st = gaussian::thermal_state(n, nbar).map_err(err)?;
        Ok(Self {
            inner: st.sigma,
        })
    }

    #[getter]
    fn modes(&self) -> usize {
        self.inner.modes()
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        rows(self.inner.matrix())
    }

    fn symplectic_eigenvalues(&self) -> PyResult<Vec<f64>> {
        symplectic::symplectic_eigenvalues(&self.inner).map_err(err)
    }

    #[pyo3(signature = (tol = 1e-9))]
    fn is_valid(&self, tol: f64) -> bool {
        symplectic::is_valid_covariance(&self.inner, tol)
    }

    fn entropy(&self) -> PyResult<f64> {
        gaussian::covariance_entropy(&self.inner).map_err(err)
    }

    fn photon_number(&self) -> PyResult<f64> {
        inequalities::photon_number(&self.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("CovarianceMatrix(modes={})", self.inner.modes())
    }
}

/// Gaussian channel with memory: attenuator or amplifier with coefficient
/// `kappa`, memory `mu`, environment photons `nbar` and input energy per use.
#[pyclass(frozen)]
struct MemoryChannel {
    params: MemoryChannelParams,
}

#[pymethods]
impl MemoryChannel {
    #[new]
    fn new(kappa: f64, mu: f64, nbar: f64, energy: f64) -> PyResult<Self> {
        let params = MemoryChannelParams::new(kappa, mu, nbar, energy).map_err(err)?;
        Ok(Self { params })
    }

    #[pyo3(signature = (tol = DEFAULT_TOL))]
    fn capacity(&self, tol: f64) -> PyResult<f64> {
        memcap::memory_capacity(&self.params, tol).map_err(err)
    }

    fn flat_capacity(&self) -> PyResult<f64> {
        memcap::flat_allocation_capacity(&self.params).map_err(err)
    }

    /// Dict with `lambda_mult`, `z0`, `capacity`, `samples` and `energy_residual`.
    #[pyo3(signature = (samples = 256, tol = DEFAULT_TOL))]
    fn waterfill<'py>(&self, py: Python<'py>, samples: usize, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let sol = memcap::waterfill_with_samples(&self.params, tol, samples).map_err(err)?;
        to_py(py, &sol)
    }

    fn critical_energy(&self) -> PyResult<f64> {
        memcap::critical_energy(self.params.kappa(), self.params.mu(), self.params.nbar()).map_err(err)
    }

    fn __repr__(&self) -> String {
        let p = &self.params;
        format!(
            "MemoryChannel(kappa={}, mu={}, nbar={}, energy={})",
            p.kappa(),
            p.mu(),
            p.nbar(),
            p.energy()
        )
    }
}

/// Density matrix in a truncated Fock basis.
#[pyclass(frozen)]
struct FockDensity {
    inner: CoreFock,
}

#[pymethods]
impl FockDensity {
    #[new]
    fn new(rho: Vec<Vec<C64>>) -> PyResult<Self> {
        let inner = CoreFock::new(matrix(&rho)?).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn diagonal(p: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: CoreFock::diagonal(&p).map_err(err)?,
        })
    }

    #[staticmethod]
    fn number_state(dim: usize, n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: CoreFock::number_state(dim, n).map_err(err)?,
        })
    }

    #[staticmethod]
    fn thermal(dim: usize, nbar: f64) -> PyResult<Self> {
        Ok(Self {
            inner: CoreFock::truncated_thermal(dim, nbar).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn matrix(&self) -> Vec<Vec<C64>> {
        rows(self.inner.matrix())
    }

    fn populations(&self) -> Vec<f64> {
        self.inner.populations()
    }

    /// Eigenvalues in decreasing order.
    fn spectrum(&self) -> Vec<f64> {
        self.inner.spectrum().values().to_vec()
    }

    fn entropy(&self) -> f64 {
        fock::vn_entropy(&self.inner)
    }

    fn attenuate(&self, lambda: f64) -> PyResult<Self> {
        Ok(Self {
            inner: fock::attenuator_fock(&self.inner, lambda).map_err(err)?,
        })
    }

    fn passive(&self) -> Self {
        Self {
            inner: fock::passive_rearrangement(&self.inner),
        }
    }

    #[pyo3(signature = (other, tol = 1e-9))]
    fn majorizes(&self, other: &FockDensity, tol: f64) -> bool {
        fock::majorizes(&self.inner.spectrum(), &other.inner.spectrum(), tol)
    }

    fn __repr__(&self) -> String {
        format!("FockDensity(dim={})", self.inner.dim())
    }
}

/// Lindblad generator given by Fock-basis jump and dephasing profiles.
#[pyclass(frozen)]
struct LindbladSpec {
    inner: CoreLindblad,
}

#[pymethods]
impl LindbladSpec {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn ladder(dim: usize) -> PyResult<Self> {
        Ok(Self {
            inner: CoreLindblad::ladder(dim).map_err(err)?,
        })
    }

    #[staticmethod]
    fn single_jump(rates: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: CoreLindblad::single_jump(&rates).map_err(err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn rate_profile(&self) -> Vec<f64> {
        self.inner.rate_profile().values().to_vec()
    }

    fn is_passivity_preserving(&self) -> bool {
        lossy::passivity_condition(&self.inner.rate_profile())
    }

    fn evolve(&self, rho: &FockDensity, t: f64) -> PyResult<FockDensity> {
        Ok(FockDensity {
            inner: lossy::evolve(&self.inner, &rho.inner, t).map_err(err)?,
        })
    }
}

/// Linear bosonic map `σ ↦ KσKᵀ + α`, `r ↦ Kr + y`.
#[pyclass(frozen)]
struct MapSpec {
    inner: CoreMapSpec,
}

#[pymethods]
impl MapSpec {
    #[new]
    #[pyo3(signature = (k, alpha, y = None))]
    fn new(k: Vec<Vec<f64>>, alpha: Vec<Vec<f64>>, y: Option<Vec<f64>>) -> PyResult<Self> {
        let (k, alpha) = (matrix(&k)?, matrix(&alpha)?);
        let inner = match y {
            Some(y) => CoreMapSpec::with_displacement(k, alpha, DVector::from_vec(y)),
            None => CoreMapSpec::new(k, alpha),
        }
        .map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn modes(&self) -> usize {
        self.inner.modes()
    }

    #[pyo3(signature = (tol = 1e-9))]
    fn is_valid(&self, tol: f64) -> PyResult<bool> {
        superop::one_mode_valid(&self.inner, tol).map_err(err)
    }

    #[pyo3(signature = (tol = 1e-9))]
    fn is_completely_positive(&self, tol: f64) -> PyResult<bool> {
        superop::one_mode_cp(&self.inner, tol).map_err(err)
    }

    /// Normal form as a dict: `case`, `dilation`, `symplectic_part`,
    /// `residual_noise`, `y`.
    #[pyo3(signature = (tol = 1e-9))]
    fn classify<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let nf = if self.inner.modes() == 1 {
            superop::classify_one_mode(&self.inner, tol)
        } else if self.inner.alpha().amax() <= tol {
            superop::classify_multimode_nonoise(self.inner.k(), tol)
        } else {
            return Err(PyValueError::new_err(
                "no exact classifier for multimode maps with noise; use falsify()",
            ));
        }
        .map_err(err)?;
        to_py(py, &nf)
    }

    /// Randomised search for a state whose image is not a valid state.
    #[pyo3(signature = (trials = 1000, seed = 0))]
    fn falsify<'py>(&self, py: Python<'py>, trials: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
        let out = superop::sampled_positivity_falsifier(&self.inner, trials, seed);
        let d = PyDict::new(py);
        d.set_item("trials", out.trials)?;
        d.set_item("max_violation", out.max_violation)?;
        match out.witness {
            None => d.set_item("witness", py.None())?,
            Some((trial, witness)) => {
                let w = PyDict::new(py);
                w.set_item("trial", trial)?;
                match witness {
                    Witness::Covariance(sigma) => w.set_item("covariance", rows(&sigma))?,
                    Witness::Vector(v) => w.set_item("vector", v)?,
                }
                d.set_item("witness", w)?;
            }
        }
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("MapSpec(modes={})", self.inner.modes())
    }
}

#[pyfunction]
fn g(nbar: f64) -> PyResult<f64> {
    gaussian::g_checked(nbar).map_err(err)
}

#[pyfunction]
fn g_inv(s: f64) -> PyResult<f64> {
    gaussian::g_inv(s).map_err(err)
}

#[pyfunction]
fn delta_gap(x: f64) -> PyResult<f64> {
    inequalities::delta_gap(x).map_err(err)
}

#[pyfunction]
fn cmoe_gap(sbar: f64, lambda: f64) -> PyResult<f64> {
    inequalities::cmoe_gap(sbar, lambda).map_err(err)
}

/// Binomial thinning of a photon-number distribution.
#[pyfunction]
fn thin(p: Vec<f64>, lambda: f64) -> PyResult<Vec<f64>> {
    thinning::thin_sequence(&p, lambda).map_err(err)
}

#[pyfunction]
fn shannon_entropy(p: Vec<f64>) -> PyResult<f64> {
    Ok(thinning::shannon_entropy(&DiscreteDistribution::new(p).map_err(err)?))
}

#[pyfunction]
fn thinning_bound_gap(p: Vec<f64>, lambda: f64) -> PyResult<f64> {
    thinning::thinning_bound_gap(&DiscreteDistribution::new(p).map_err(err)?, lambda).map_err(err)
}

#[pyfunction]
fn entropy_flux(p: Vec<f64>) -> PyResult<f64> {
    fock::entropy_flux(&p).map_err(err)
}

#[pyfunction]
fn isoperimetric_gap(p: Vec<f64>) -> PyResult<f64> {
    fock::isoperimetric_gap(&p).map_err(err)
}

/// Beamsplitter mixing on the photon-number scale: `(N_C, λN_A + (1−λ)N_B)`.
#[pyfunction]
fn epni_gaussian_check(a: &CovarianceMatrix, b: &CovarianceMatrix, lambda: f64) -> PyResult<(f64, f64)> {
    inequalities::epni_gaussian_check(&a.inner, &b.inner, lambda).map_err(err)
}

#[pyfunction]
fn epi_gaussian_check(a: &CovarianceMatrix, b: &CovarianceMatrix, lambda: f64) -> PyResult<(f64, f64)> {
    inequalities::epi_gaussian_check(&a.inner, &b.inner, lambda).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (eta, energy, points = 101))]
fn broadcast_region<'py>(py: Python<'py>, eta: f64, energy: f64, points: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &inequalities::broadcast_region(eta, energy, points).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (mu, noise_nc, energy, tol = DEFAULT_TOL))]
fn additive_noise_capacity(mu: f64, noise_nc: f64, energy: f64, tol: f64) -> PyResult<f64> {
    memcap::additive_noise_capacity(mu, noise_nc, energy, tol).map_err(err)
}

#[pyfunction]
fn suites() -> Vec<&'static str> {
    verify::SUITES.to_vec()
}

/// Runs one verification suite and returns its report as a dict.
#[pyfunction]
#[pyo3(signature = (suite, seed = 0, trials = None, dim = None))]
fn run_suite<'py>(
    py: Python<'py>,
    suite: &str,
    seed: u64,
    trials: Option<usize>,
    dim: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = VerifyConfig { dim, trials, seed };
    let report = py.detach(|| verify::run_suite(suite, &cfg)).map_err(err)?;
    to_py(py, &report)
}

#[pymodule]
fn pygaussq(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<CovarianceMatrix>()?;
    m.add_class::<MemoryChannel>()?;
    m.add_class::<FockDensity>()?;
    m.add_class::<LindbladSpec>()?;
    m.add_class::<MapSpec>()?;
    m.add_function(wrap_pyfunction!(g, m)?)?;
    m.add_function(wrap_pyfunction!(g_inv, m)?)?;
    m.add_function(wrap_pyfunction!(delta_gap, m)?)?;
    m.add_function(wrap_pyfunction!(cmoe_gap, m)?)?;
    m.add_function(wrap_pyfunction!(thin, m)?)?;
    m.add_function(wrap_pyfunction!(shannon_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(thinning_bound_gap, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_flux, m)?)?;
    m.add_function(wrap_pyfunction!(isoperimetric_gap, m)?)?;
    m.add_function(wrap_pyfunction!(epni_gaussian_check, m)?)?;
    m.add_function(wrap_pyfunction!(epi_gaussian_check, m)?)?;
    m.add_function(wrap_pyfunction!(broadcast_region, m)?)?;
    m.add_function(wrap_pyfunction!(additive_noise_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(suites, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
