//! Python bindings for `spinwitness`.
//!
//! Matrices cross the boundary as nested lists of Python `complex`, states
//! and witnesses as opaque handles.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use spinwitness::experiments::{run, Command, RunParams};
use spinwitness::linalg::expectation;
use spinwitness::optimize::{self, OptConfig, OptResult, ThresholdWitness, Witness, WitnessKind};
use spinwitness::spin::spin_matrices;
use spinwitness::state_io::{state_from_str, state_to_string};
use spinwitness::states;
use spinwitness::witness::{self as w, DEFAULT_DIM_CAP};
use spinwitness::{ComplexMatrix, OrderingSpec, PartitionSpec, SiteList, SpinQuantum};

fn err(e: spinwitness::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rows(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.dim()).map(|i| m.row(i).to_vec()).collect()
}

fn site_list(two_js: &[u32]) -> PyResult<SiteList> {
    if two_js.is_empty() || two_js.contains(&0) {
        return Err(PyValueError::new_err("sites need 2j >= 1"));
    }
    Ok(SiteList::new(two_js.iter().map(|&t| SpinQuantum::from_two_j(t)).collect()))
}

fn ordering(perm: Option<Vec<usize>>, n: usize) -> PyResult<OrderingSpec> {
    match perm {
        Some(p) => OrderingSpec::new(p).map_err(err),
        None => Ok(OrderingSpec::identity(n)),
    }
}

fn config(restarts: usize, seed: u64) -> OptConfig {
    OptConfig { restarts, seed, ..OptConfig::default() }
}

fn kind(name: &str) -> PyResult<WitnessKind> {
    match name {
        "dot" => Ok(WitnessKind::Dot),
        "cross" => Ok(WitnessKind::Cross),
        other => Err(PyValueError::new_err(format!("unknown witness kind `{other}`"))),
    }
}

/// Result of a restarted optimization.
#[pyclass(name = "OptResult", frozen, get_all)]
#[derive(Clone)]
struct PyOptResult {
    value: f64,
    argument: Vec<f64>,
    restarts_used: usize,
    converged: bool,
    seed: u64,
}

impl From<OptResult> for PyOptResult {
    fn from(r: OptResult) -> Self {
        Self { value: r.value, argument: r.argument, restarts_used: r.restarts_used, converged: r.converged, seed: r.seed }
    }
}

#[pymethods]
impl PyOptResult {
    fn __repr__(&self) -> String {
        format!("OptResult(value={}, restarts_used={}, converged={})", self.value, self.restarts_used, self.converged)
    }
}

/// A pure or mixed state of a list of spins. Site 0 is the leftmost factor.
#[pyclass(name = "QuantumState", frozen)]
#[derive(Clone)]
struct PyState {
    inner: spinwitness::QuantumState,
}

#[pymethods]
impl PyState {
    /// Pure state from amplitudes; `two_js` lists 2j for each site.
    #[new]
    fn new(two_js: Vec<u32>, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        let inner = spinwitness::QuantumState::pure(site_list(&two_js)?, amplitudes).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_density(two_js: Vec<u32>, rho: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let flat: Vec<Complex64> = rho.into_iter().flatten().collect();
        let m = ComplexMatrix::from_row_major(flat).map_err(err)?;
        let inner = spinwitness::QuantumState::mixed(site_list(&two_js)?, m).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn ghz(n: usize) -> PyResult<Self> {
        Ok(Self { inner: states::ghz(n).map_err(err)? })
    }

    #[staticmethod]
    fn w3(alpha: f64, beta: f64) -> Self {
        Self { inner: states::w3(alpha, beta) }
    }

    #[staticmethod]
    fn psi4() -> Self {
        Self { inner: states::psi4() }
    }

    #[staticmethod]
    fn phi4() -> Self {
        Self { inner: states::phi4() }
    }

    #[staticmethod]
    fn dur(n: usize) -> PyResult<Self> {
        Ok(Self { inner: states::dur_state(n).map_err(err)? })
    }

    #[staticmethod]
    fn random_pure(two_js: Vec<u32>, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: states::random_pure(&site_list(&two_js)?, seed) })
    }

    #[staticmethod]
    fn random_product(two_js: Vec<u32>, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: states::random_product(&site_list(&two_js)?, seed) })
    }

    /// Parses the text format written by `to_text`.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self { inner: state_from_str(text).map_err(err)? })
    }

    fn to_text(&self) -> String {
        state_to_string(&self.inner)
    }

    fn with_white_noise(&self, nu: f64) -> PyResult<Self> {
        Ok(Self { inner: states::mix_white_noise(&self.inner, nu).map_err(err)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn is_pure(&self) -> bool {
        self.inner.is_pure()
    }

    #[getter]
    fn two_js(&self) -> Vec<u32> {
        self.inner.sites().sites().iter().map(|s| s.two_j()).collect()
    }

    fn amplitudes(&self) -> Option<Vec<Complex64>> {
        self.inner.amplitudes().map(<[Complex64]>::to_vec)
    }

    fn density(&self) -> Vec<Vec<Complex64>> {
        rows(&self.inner.density())
    }

    /// Smallest eigenvalue of the partial transpose on `block` (zero-based sites).
    fn min_partial_transpose_eigenvalue(&self, block: Vec<usize>) -> PyResult<f64> {
        spinwitness::experiments::min_pt_eigenvalue(&self.inner, &block).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("QuantumState(two_js={:?}, pure={})", self.two_js(), self.is_pure())
    }
}

/// The scalar witness `D(N)`.
#[pyclass(name = "DotWitness", frozen)]
struct PyDot {
    inner: w::WitnessScalar,
}

#[pymethods]
impl PyDot {
    #[new]
    #[pyo3(signature = (two_js, ordering=None))]
    fn new(two_js: Vec<u32>, ordering: Option<Vec<usize>>) -> PyResult<Self> {
        let sites = site_list(&two_js)?;
        let o = self::ordering(ordering, sites.len())?;
        Ok(Self { inner: w::build_dot_chain(&sites, &o).map_err(err)? })
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        rows(&self.inner.matrix)
    }

    fn spectrum(&self) -> PyResult<Vec<f64>> {
        w::dot_spectrum(&self.inner.sites, &self.inner.ordering, DEFAULT_DIM_CAP).map_err(err)
    }

    fn max_violation(&self) -> PyResult<f64> {
        w::max_violation_dot(&self.inner.sites, &self.inner.ordering, DEFAULT_DIM_CAP).map_err(err)
    }

    fn expectation(&self, state: &PyState) -> PyResult<f64> {
        expectation(&state.inner, &self.inner.matrix).map_err(err)
    }

    #[pyo3(signature = (state, restarts=64, seed=0))]
    fn optimize_frames(&self, state: &PyState, restarts: usize, seed: u64) -> PyResult<PyOptResult> {
        optimize::optimize_frames(&state.inner, Witness::Scalar(&self.inner), &config(restarts, seed))
            .map(Into::into)
            .map_err(err)
    }

    #[pyo3(signature = (partition, restarts=256, seed=0))]
    fn partition_bound(&self, partition: &str, restarts: usize, seed: u64) -> PyResult<PyOptResult> {
        let p = PartitionSpec::parse(partition, self.inner.sites.len()).map_err(err)?;
        optimize::partition_bound(Witness::Scalar(&self.inner), &p, &config(restarts, seed)).map(Into::into).map_err(err)
    }

    /// Noise fraction at which the optimized violation of `state` drops to 1.
    #[pyo3(signature = (state, restarts=64, seed=0))]
    fn noise_threshold(&self, state: &PyState, restarts: usize, seed: u64) -> PyResult<f64> {
        let w = ThresholdWitness::Frames(Witness::Scalar(&self.inner));
        Ok(optimize::noise_threshold(&state.inner, w, &config(restarts, seed)).map_err(err)?.nu)
    }
}

/// The vector witness `C(N)`.
#[pyclass(name = "CrossWitness", frozen)]
struct PyCross {
    inner: w::WitnessVector,
}

#[pymethods]
impl PyCross {
    #[new]
    #[pyo3(signature = (two_js, ordering=None))]
    fn new(two_js: Vec<u32>, ordering: Option<Vec<usize>>) -> PyResult<Self> {
        let sites = site_list(&two_js)?;
        let o = self::ordering(ordering, sites.len())?;
        Ok(Self { inner: w::build_cross_chain(&sites, &o).map_err(err)? })
    }

    /// `(C_x, C_y, C_z)` as matrices.
    fn components(&self) -> [Vec<Vec<Complex64>>; 3] {
        self.inner.components.components().map(rows)
    }

    fn z_spectrum(&self) -> PyResult<Vec<f64>> {
        w::cross_z_spectrum(&self.inner.sites, &self.inner.ordering, DEFAULT_DIM_CAP).map_err(err)
    }

    fn max_violation(&self) -> PyResult<f64> {
        w::max_violation_cross(&self.inner.sites, &self.inner.ordering, DEFAULT_DIM_CAP).map_err(err)
    }

    fn expectation(&self, state: &PyState) -> PyResult<[f64; 3]> {
        let c = self.inner.components.components();
        Ok([
            expectation(&state.inner, c[0]).map_err(err)?,
            expectation(&state.inner, c[1]).map_err(err)?,
            expectation(&state.inner, c[2]).map_err(err)?,
        ])
    }

    #[pyo3(signature = (state, restarts=64, seed=0))]
    fn optimize_frames(&self, state: &PyState, restarts: usize, seed: u64) -> PyResult<PyOptResult> {
        optimize::optimize_frames(&state.inner, Witness::Vector(&self.inner), &config(restarts, seed))
            .map(Into::into)
            .map_err(err)
    }

    #[pyo3(signature = (partition, restarts=256, seed=0))]
    fn partition_bound(&self, partition: &str, restarts: usize, seed: u64) -> PyResult<PyOptResult> {
        let p = PartitionSpec::parse(partition, self.inner.sites.len()).map_err(err)?;
        optimize::partition_bound(Witness::Vector(&self.inner), &p, &config(restarts, seed)).map(Into::into).map_err(err)
    }
}

/// `(J_x, J_y, J_z)` for spin `two_j / 2`, basis ordered by descending m.
#[pyfunction]
#[pyo3(name = "spin_matrices")]
fn spin_matrices_py(two_j: u32) -> PyResult<[Vec<Vec<Complex64>>; 3]> {
    if two_j == 0 {
        return Err(PyValueError::new_err("2j must be at least 1"));
    }
    Ok(spin_matrices(SpinQuantum::from_two_j(two_j)).components().map(rows))
}

/// Mermin-Klyshko operator for settings given as `(a, a_tilde)` unit vectors.
#[pyfunction]
fn mk_operator(a: Vec<[f64; 3]>, a_tilde: Vec<[f64; 3]>) -> PyResult<Vec<Vec<Complex64>>> {
    let settings = w::MkSettings::new(a, a_tilde).map_err(err)?;
    let sites = SiteList::qubits(settings.len());
    Ok(rows(&w::build_mk(&settings, &sites).map_err(err)?))
}

#[pyfunction]
#[pyo3(signature = (state, restarts=64, seed=0))]
fn optimize_mk(state: &PyState, restarts: usize, seed: u64) -> PyResult<PyOptResult> {
    optimize::optimize_mk_settings(&state.inner, &config(restarts, seed)).map(Into::into).map_err(err)
}

/// `[(N, R(N))]` for `N = 2..=max_n`; `kind` is "dot" or "cross".
#[pyfunction]
#[pyo3(signature = (max_n, kind, two_j=1))]
fn ratio_curve(max_n: usize, kind: &str, two_j: u32) -> PyResult<Vec<(usize, f64)>> {
    optimize::ratio_curve(max_n, SpinQuantum::from_two_j(two_j), self::kind(kind)?, DEFAULT_DIM_CAP).map_err(err)
}

/// Runs a command-line experiment and returns its JSON report.
#[pyfunction]
#[pyo3(signature = (command, two_j=1, sites=None, ordering=None, partition=None, restarts=64, seed=0))]
fn run_command(
    command: &str,
    two_j: u32,
    sites: Option<usize>,
    ordering: Option<&str>,
    partition: Option<String>,
    restarts: usize,
    seed: u64,
) -> PyResult<String> {
    let command: Command = command.parse().map_err(err)?;
    let params = RunParams {
        spin: SpinQuantum::from_two_j(two_j),
        sites,
        ordering: ordering.map(OrderingSpec::parse_one_based).transpose().map_err(err)?,
        partition,
        opt: config(restarts, seed),
        dim_cap: DEFAULT_DIM_CAP,
    };
    Ok(run(command, &params).map_err(err)?.to_json())
}

#[pymodule]
fn spinwitness_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyState>()?;
    m.add_class::<PyDot>()?;
    m.add_class::<PyCross>()?;
    m.add_class::<PyOptResult>()?;
    m.add_function(wrap_pyfunction!(spin_matrices_py, m)?)?;
    m.add_function(wrap_pyfunction!(mk_operator, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_mk, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_curve, m)?)?;
    m.add_function(wrap_pyfunction!(run_command, m)?)?;
    Ok(())
}
