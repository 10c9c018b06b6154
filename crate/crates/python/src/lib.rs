//! Python module `lzs`: the main model types, formulas, propagators and the
//! CLI commands of `lzs-core`.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use lzs_core::cli::{self, CliError, Command, RunConfig};
use lzs_core::dynamics::{self, PopulationTrace, SpectralPropagator, TimeGrid};
use lzs_core::models::{self, Branch, CavityCoupling, JointState, QubitSpec, QubitState, SemiclassicalDrive};
use lzs_core::{specfun, spectra, Error};

create_exception!(lzs, NumericalError, PyRuntimeError, "Norm drift, truncation leak or a degenerate fit.");

fn py_err(e: Error) -> PyErr {
    if e.is_numerical() {
        NumericalError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn branch(name: &str) -> PyResult<Branch> {
    match name {
        "up" => Ok(Branch::Up),
        "down" => Ok(Branch::Down),
        _ => Err(PyValueError::new_err(format!("branch must be 'up' or 'down', got {name:?}"))),
    }
}

#[pyclass(name = "QubitSpec", frozen)]
struct PyQubitSpec(QubitSpec);

#[pymethods]
impl PyQubitSpec {
    #[new]
    fn new(gap: f64, bias: f64) -> PyResult<Self> {
        QubitSpec::new(gap, bias).map(PyQubitSpec).map_err(py_err)
    }
    #[getter]
    fn gap(&self) -> f64 {
        self.0.gap()
    }
    #[getter]
    fn bias(&self) -> f64 {
        self.0.bias()
    }
    fn __repr__(&self) -> String {
        format!("QubitSpec(gap={}, bias={})", self.0.gap(), self.0.bias())
    }
}

#[pyclass(name = "SemiclassicalDrive", frozen)]
struct PyDrive(SemiclassicalDrive);

#[pymethods]
impl PyDrive {
    #[new]
    #[pyo3(signature = (amplitude, phase=0.0))]
    fn new(amplitude: f64, phase: f64) -> PyResult<Self> {
        SemiclassicalDrive::new(amplitude, phase).map(PyDrive).map_err(py_err)
    }
    #[getter]
    fn amplitude(&self) -> f64 {
        self.0.amplitude()
    }
    #[getter]
    fn phase(&self) -> f64 {
        self.0.phase()
    }
}

#[pyclass(name = "CavityCoupling", frozen)]
struct PyCoupling(CavityCoupling);

#[pymethods]
impl PyCoupling {
    #[new]
    fn new(coupling: f64, n_max: usize) -> PyResult<Self> {
        CavityCoupling::new(coupling, n_max).map(PyCoupling).map_err(py_err)
    }
    #[getter]
    fn coupling(&self) -> f64 {
        self.0.coupling()
    }
    #[getter]
    fn n_max(&self) -> usize {
        self.0.n_max()
    }
}

#[pyclass(name = "QubitState", frozen)]
struct PyQubitState(QubitState);

#[pymethods]
impl PyQubitState {
    /// Normalizes the given amplitudes.
    #[new]
    fn new(up: Complex64, down: Complex64) -> PyResult<Self> {
        QubitState::normalized(up, down).map(PyQubitState).map_err(py_err)
    }
    #[staticmethod]
    fn up() -> Self {
        PyQubitState(QubitState::up())
    }
    #[staticmethod]
    fn down() -> Self {
        PyQubitState(QubitState::down())
    }
    fn amplitudes(&self) -> (Complex64, Complex64) {
        let [u, d] = self.0.amplitudes();
        (u, d)
    }
}

#[pyclass(name = "JointState", frozen)]
struct PyJointState(JointState);

#[pymethods]
impl PyJointState {
    #[staticmethod]
    fn coherent(qubit: &PyQubitState, alpha: f64, n_max: usize) -> PyResult<Self> {
        let osc = models::coherent_state(alpha, n_max).map_err(py_err)?;
        JointState::product(&qubit.0, &osc).map(PyJointState).map_err(py_err)
    }
    #[staticmethod]
    fn fock(qubit: &PyQubitState, m: usize, n_max: usize) -> PyResult<Self> {
        let osc = models::fock_state(m, n_max).map_err(py_err)?;
        JointState::product(&qubit.0, &osc).map(PyJointState).map_err(py_err)
    }
    /// Displaced-oscillator eigenstate of the gapless Hamiltonian.
    #[staticmethod]
    fn grwa(branch_name: &str, m: usize, coupling: &PyCoupling) -> PyResult<Self> {
        models::grwa_state(branch(branch_name)?, m, &coupling.0).map(PyJointState).map_err(py_err)
    }
    #[staticmethod]
    fn from_amplitudes(n_max: usize, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        JointState::from_amplitudes(n_max, amplitudes).map(PyJointState).map_err(py_err)
    }
    #[getter]
    fn n_max(&self) -> usize {
        self.0.n_max()
    }
    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }
    fn norm(&self) -> f64 {
        self.0.norm()
    }
    fn population(&self, branch_name: &str) -> PyResult<f64> {
        Ok(self.0.branch_population(branch(branch_name)?))
    }
}

#[pyclass(name = "TimeGrid", frozen)]
struct PyTimeGrid(TimeGrid);

#[pymethods]
impl PyTimeGrid {
    #[new]
    fn new(t0: f64, t1: f64, samples: usize) -> PyResult<Self> {
        TimeGrid::new(t0, t1, samples).map(PyTimeGrid).map_err(py_err)
    }
    #[staticmethod]
    #[pyo3(signature = (periods, rabi_freq, per_drive_period=64))]
    fn rabi_periods(periods: f64, rabi_freq: f64, per_drive_period: usize) -> PyResult<Self> {
        TimeGrid::rabi_periods(periods, rabi_freq, per_drive_period).map(PyTimeGrid).map_err(py_err)
    }
    fn times(&self) -> Vec<f64> {
        self.0.times()
    }
    #[getter]
    fn samples(&self) -> usize {
        self.0.samples()
    }
}

#[pyclass(name = "PopulationTrace", frozen)]
struct PyTrace(PopulationTrace);

#[pymethods]
impl PyTrace {
    #[new]
    fn new(times: Vec<f64>, p_down: Vec<f64>) -> PyResult<Self> {
        PopulationTrace::new(times, p_down).map(PyTrace).map_err(py_err)
    }
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.0.times.clone()
    }
    #[getter]
    fn p_down(&self) -> Vec<f64> {
        self.0.p_down.clone()
    }
    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyclass(name = "SpectralPropagator", frozen)]
struct PyPropagator(SpectralPropagator);

#[pymethods]
impl PyPropagator {
    #[new]
    fn new(q: &PyQubitSpec, c: &PyCoupling) -> PyResult<Self> {
        SpectralPropagator::new(&q.0, &c.0).map(PyPropagator).map_err(py_err)
    }
    fn evolve(&self, state: &PyJointState, t: f64) -> PyResult<PyJointState> {
        self.0.evolve(&state.0, t).map(PyJointState).map_err(py_err)
    }
    fn population_trace(&self, initial: &PyJointState, grid: &PyTimeGrid) -> PyResult<PyTrace> {
        self.0.population_trace(&initial.0, &grid.0).map(PyTrace).map_err(py_err)
    }
    fn probe_trace(&self, initial: &PyJointState, grid: &PyTimeGrid, probe: &PyQubitState) -> PyResult<PyTrace> {
        self.0.probe_trace(&initial.0, &grid.0, &probe.0).map(PyTrace).map_err(py_err)
    }
    fn quadrature_trace(&self, initial: &PyJointState, grid: &PyTimeGrid) -> PyResult<Vec<f64>> {
        self.0.quadrature_trace(&initial.0, &grid.0).map(|t| t.x_mean).map_err(py_err)
    }
    fn energies(&self) -> Vec<f64> {
        self.0.energies().to_vec()
    }
}

#[pyfunction]
fn bessel_j(k: u32, x: f64) -> PyResult<f64> {
    specfun::bessel_j(k, x).map_err(py_err)
}

#[pyfunction]
fn assoc_laguerre(n: u64, k: u64, x: f64) -> PyResult<f64> {
    specfun::assoc_laguerre(n, k, x).map_err(py_err)
}

#[pyfunction]
fn displaced_fock_overlap(n: u64, k: u64, d: f64) -> PyResult<f64> {
    specfun::displaced_fock_overlap(n, k, d).map_err(py_err)
}

/// `(asymptotic, adiabatic_impulse, expanded)`; `None` outside a form's domain.
#[pyfunction]
fn bessel_approximations(k: u32, x: f64) -> (Option<f64>, Option<f64>, Option<f64>) {
    (
        specfun::bessel_j_asymptotic(k, x).ok(),
        specfun::bessel_j_adiabatic_impulse(k, x).ok(),
        specfun::bessel_j_adiabatic_impulse_expanded(k, x).ok(),
    )
}

#[pyfunction]
fn rabi_freq_semiclassical(q: &PyQubitSpec, a: f64, k: u32) -> PyResult<f64> {
    spectra::rabi_freq_semiclassical(&q.0, a, k).map_err(py_err)
}

#[pyfunction]
fn rabi_freq_quantum(q: &PyQubitSpec, coupling: f64, n: u64, k: u32) -> PyResult<f64> {
    spectra::rabi_freq_quantum(&q.0, coupling, n, k).map_err(py_err)
}

#[pyfunction]
fn exact_splitting(q: &PyQubitSpec, c: &PyCoupling, n: u64, k: u32) -> PyResult<f64> {
    spectra::exact_splitting(&q.0, &c.0, n, k).map_err(py_err)
}

#[pyfunction]
fn equivalent_amplitude(coupling: f64, n: u64, shift: f64) -> PyResult<f64> {
    spectra::equivalent_amplitude(coupling, n, shift).map_err(py_err)
}

/// Rows `(n, omega_s, omega_q, a_eff)`.
#[pyfunction]
#[pyo3(signature = (q, coupling, k, n_list, shift=0.0))]
fn comparison_grid(q: &PyQubitSpec, coupling: f64, k: u32, n_list: Vec<u64>, shift: f64) -> PyResult<Vec<(u64, f64, f64, f64)>> {
    let rows = spectra::comparison_grid(&q.0, coupling, k, &n_list, shift).map_err(py_err)?;
    Ok(rows.into_iter().map(|r| (r.n, r.omega_s, r.omega_q, r.a_eff)).collect())
}

/// `(offset, residual)`.
#[pyfunction]
fn fit_amplitude_shift(q: &PyQubitSpec, coupling: f64, k: u32, n_list: Vec<u64>) -> PyResult<(f64, f64)> {
    spectra::fit_amplitude_shift(&q.0, coupling, k, &n_list).map(|f| (f.offset, f.residual)).map_err(py_err)
}

#[pyfunction]
fn bessel_laguerre_identity_error(x: f64, n: u64, k: u32) -> PyResult<f64> {
    spectra::bessel_laguerre_identity_error(x, n, k).map_err(py_err)
}

#[pyfunction]
fn propagate_semiclassical(q: &PyQubitSpec, d: &PyDrive, psi0: &PyQubitState, grid: &PyTimeGrid) -> PyResult<PyTrace> {
    dynamics::propagate_semiclassical(&q.0, &d.0, &psi0.0, &grid.0).map(PyTrace).map_err(py_err)
}

#[pyfunction]
fn propagate_quantum(q: &PyQubitSpec, c: &PyCoupling, initial: &PyJointState, grid: &PyTimeGrid) -> PyResult<PyTrace> {
    dynamics::propagate_quantum(&q.0, &c.0, &initial.0, &grid.0).map(PyTrace).map_err(py_err)
}

#[pyfunction]
fn dominant_frequency(trace: &PyTrace) -> PyResult<f64> {
    dynamics::dominant_frequency(&trace.0).map_err(py_err)
}

/// `(tau, quality)`; `tau` is infinite for a non-decaying envelope.
#[pyfunction]
fn estimate_decay_time(trace: &PyTrace) -> PyResult<(f64, f64)> {
    dynamics::estimate_decay_time(&trace.0).map(|d| (d.tau, d.quality)).map_err(py_err)
}

#[pyfunction]
fn envelope_drop(trace: &PyTrace, omega: f64) -> PyResult<f64> {
    dynamics::envelope_drop(&trace.0, omega).map_err(py_err)
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let items = a.iter().map(|x| json_to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(o) => {
            let d = PyDict::new(py);
            for (k, x) in o {
                d.set_item(k, json_to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

/// Runs a CLI command with `params` as its key/value configuration and
/// returns `{"header", "rows", "metadata"}`.
#[pyfunction]
#[pyo3(signature = (command, params, offsets=false))]
fn run_command<'py>(py: Python<'py>, command: &str, params: Vec<(String, String)>, offsets: bool) -> PyResult<Bound<'py, PyDict>> {
    let command: Command = command.parse().map_err(PyValueError::new_err)?;
    let mut cfg = RunConfig::new(command);
    for (k, v) in params {
        cfg.set_pair(&format!("{k}={v}")).map_err(PyValueError::new_err)?;
    }
    let table = py.detach(|| cli::execute(&cfg, offsets)).map_err(|e| match e {
        CliError::Numerical { .. } => NumericalError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    })?;
    let out = PyDict::new(py);
    out.set_item("header", table.header.clone())?;
    out.set_item("rows", table.rows.clone())?;
    let meta = serde_json::to_value(&table.metadata).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    out.set_item("metadata", json_to_py(py, &meta)?)?;
    Ok(out)
}

#[pymodule]
fn lzs(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<PyQubitSpec>()?;
    m.add_class::<PyDrive>()?;
    m.add_class::<PyCoupling>()?;
    m.add_class::<PyQubitState>()?;
    m.add_class::<PyJointState>()?;
    m.add_class::<PyTimeGrid>()?;
    m.add_class::<PyTrace>()?;
    m.add_class::<PyPropagator>()?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(assoc_laguerre, m)?)?;
    m.add_function(wrap_pyfunction!(displaced_fock_overlap, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_approximations, m)?)?;
    m.add_function(wrap_pyfunction!(rabi_freq_semiclassical, m)?)?;
    m.add_function(wrap_pyfunction!(rabi_freq_quantum, m)?)?;
    m.add_function(wrap_pyfunction!(exact_splitting, m)?)?;
    m.add_function(wrap_pyfunction!(equivalent_amplitude, m)?)?;
    m.add_function(wrap_pyfunction!(comparison_grid, m)?)?;
    m.add_function(wrap_pyfunction!(fit_amplitude_shift, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_laguerre_identity_error, m)?)?;
    m.add_function(wrap_pyfunction!(propagate_semiclassical, m)?)?;
    m.add_function(wrap_pyfunction!(propagate_quantum, m)?)?;
    m.add_function(wrap_pyfunction!(dominant_frequency, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_decay_time, m)?)?;
    m.add_function(wrap_pyfunction!(envelope_drop, m)?)?;
    m.add_function(wrap_pyfunction!(run_command, m)?)?;
    Ok(())
}
