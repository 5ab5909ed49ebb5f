//! Python bindings: the block system, scenarios, presets, and the main
//! operations (effective Hamiltonians, fidelity runs, decay-rate sweeps,
//! the master-equation cross-check, and the matrix exponential).
//!
//! Matrices cross the boundary as nested lists of Python complex numbers,
//! row by row.

use ewasim::dynamics;
use ewasim::ewa::{self, EwaConfig};
use ewasim::experiments;
use ewasim::lindblad::{self, DensityMatrix, LindbladModel};
use ewasim::linalg::{ComplexMatrix, ComplexVector};
use ewasim::model::{BlockSystem, InitialState, Scenario};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

/// Row-major nested-list form of a complex matrix on the Python side.
type PyMatrix = Vec<Vec<Complex64>>;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix_to_py(m: &ComplexMatrix) -> PyMatrix {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
        .collect()
}

fn matrix_from_py(rows: PyMatrix) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(rows).map_err(err)
}

fn vector_from_py(data: Vec<Complex64>) -> ComplexVector {
    ComplexVector::new(data)
}

/// A block non-Hermitian system: diagonal decaying levels, a Hermitian
/// block, and the coupling between them.
#[pyclass(name = "BlockSystem", from_py_object)]
#[derive(Clone)]
struct PyBlockSystem {
    inner: BlockSystem,
}

#[pymethods]
impl PyBlockSystem {
    /// Args: bare energies and decay rates of the decaying levels, the
    /// Hermitian block as nested rows, and the coupling block as nested rows.
    #[new]
    fn new(
        omegas_a: Vec<f64>,
        gammas_a: Vec<f64>,
        b: PyMatrix,
        c: PyMatrix,
    ) -> PyResult<Self> {
        let inner = BlockSystem::new(omegas_a, gammas_a, matrix_from_py(b)?, matrix_from_py(c)?);
        Ok(Self { inner })
    }

    #[getter]
    fn dim_a(&self) -> usize {
        self.inner.dim_a
    }

    #[getter]
    fn dim_b(&self) -> usize {
        self.inner.dim_b
    }

    /// All invariant violations as strings; an empty list means valid.
    fn validate(&self) -> Vec<String> {
        self.inner.validate().iter().map(|v| v.to_string()).collect()
    }

    fn full_hamiltonian(&self) -> PyResult<PyMatrix> {
        Ok(matrix_to_py(&self.inner.full_hamiltonian().map_err(err)?))
    }

    fn projector_b(&self) -> PyMatrix {
        matrix_to_py(&self.inner.projector_b())
    }

    /// Closed-form dressing block of the non-decaying subspace.
    fn db_ewa(&self) -> PyResult<PyMatrix> {
        Ok(matrix_to_py(&ewa::db_ewa(&self.inner).map_err(err)?))
    }

    /// Effective Hamiltonian of the non-decaying subspace, `B - i D_B`.
    fn hb_ewa(&self) -> PyResult<PyMatrix> {
        Ok(matrix_to_py(&ewa::hb_ewa(&self.inner).map_err(err)?.matrix))
    }

    /// Dressing blocks `(D_A, D_B)` from the defining window integrals.
    fn d_blocks_numeric(
        &self,
        delta_t: f64,
        quadrature_n: usize,
    ) -> PyResult<(PyMatrix, PyMatrix)> {
        let cfg = EwaConfig::new(delta_t, quadrature_n).map_err(err)?;
        let (d_a, d_b) = ewa::d_blocks_numeric(&self.inner, &cfg).map_err(err)?;
        Ok((matrix_to_py(&d_a), matrix_to_py(&d_b)))
    }

    /// Full-space effective Hamiltonian with the numerically evaluated
    /// dressing blocks.
    fn heff_full(&self, delta_t: f64, quadrature_n: usize) -> PyResult<PyMatrix> {
        let cfg = EwaConfig::new(delta_t, quadrature_n).map_err(err)?;
        Ok(matrix_to_py(&ewa::heff_full(&self.inner, &cfg).map_err(err)?))
    }

    /// Closed-form upper bound on the decaying-component norm at time `t`.
    fn psi_a_bound(&self, psi0: Vec<Complex64>, t: f64) -> PyResult<f64> {
        dynamics::psi_a_bound(&self.inner, &vector_from_py(psi0), t).map_err(err)
    }

    /// Cross-check against the full master equation on A+B+G: the maximum
    /// trace distance between the two routes over a uniform grid.
    fn equivalence_distance(
        &self,
        psi0: Vec<Complex64>,
        t_max: f64,
        n_steps: usize,
    ) -> PyResult<f64> {
        if t_max <= 0.0 || !t_max.is_finite() || n_steps == 0 {
            return Err(PyValueError::new_err("need t_max > 0 and n_steps >= 1"));
        }
        let (model, h_i) = LindbladModel::from_block_system(&self.inner).map_err(err)?;
        let psi = vector_from_py(psi0);
        if psi.dim() != self.inner.dim_total() {
            return Err(PyValueError::new_err(format!(
                "psi0 has dimension {}, expected {}",
                psi.dim(),
                self.inner.dim_total()
            )));
        }
        let rho0 = DensityMatrix::from_pure(&psi.embed(model.dim_total(), 0));
        let step = t_max / n_steps as f64;
        let times: Vec<f64> = (0..=n_steps).map(|k| k as f64 * step).collect();
        lindblad::equivalence_check(&model, &h_i, &rho0, &times).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "BlockSystem(dim_A={}, dim_B={}, gammas_A={:?})",
            self.inner.dim_a, self.inner.dim_b, self.inner.gammas_a
        )
    }
}

/// Fidelity series and norms from one scenario run.
#[pyclass(name = "ScenarioResult")]
struct PyScenarioResult {
    #[pyo3(get)]
    times: Vec<f64>,
    #[pyo3(get)]
    f_ewa: Vec<f64>,
    #[pyo3(get)]
    f_z: Vec<f64>,
    #[pyo3(get)]
    f_zn: Vec<f64>,
    #[pyo3(get)]
    flags: Vec<u8>,
    #[pyo3(get)]
    norm_full: Vec<f64>,
    #[pyo3(get)]
    norm_a: Vec<f64>,
    #[pyo3(get)]
    norm_b: Vec<f64>,
    #[pyo3(get)]
    psi_a_bound: Vec<f64>,
}

impl PyScenarioResult {
    fn from_run(run: &experiments::ScenarioRun) -> Self {
        Self {
            times: run.series.times.clone(),
            f_ewa: run.series.f_ewa.clone(),
            f_z: run.series.f_z.clone(),
            f_zn: run.series.f_zn.clone(),
            flags: run.series.flags.clone(),
            norm_full: run.exact.norms_full.clone(),
            norm_a: run.exact.norms_a.clone(),
            norm_b: run.exact.norms_b.clone(),
            psi_a_bound: run.psi_a_bound.clone(),
        }
    }
}

#[pymethods]
impl PyScenarioResult {
    fn min_f_ewa(&self) -> f64 {
        self.f_ewa
            .iter()
            .zip(&self.flags)
            .filter(|(_, f)| *f & 1 == 0)
            .map(|(v, _)| *v)
            .fold(f64::NAN, f64::min)
    }

    fn __repr__(&self) -> String {
        format!("ScenarioResult({} samples)", self.times.len())
    }
}

/// One row of a decay-rate sweep summary.
#[pyclass(name = "SweepRow")]
struct PySweepRow {
    #[pyo3(get)]
    axis_value: f64,
    #[pyo3(get)]
    min_f_ewa: f64,
    #[pyo3(get)]
    min_f_z: f64,
    #[pyo3(get)]
    min_f_zn: f64,
    #[pyo3(get)]
    max_db_entry: f64,
}

/// A runnable scenario: system, initial state, grid, and window parameters.
#[pyclass(name = "Scenario", skip_from_py_object)]
#[derive(Clone)]
struct PyScenario {
    inner: Scenario,
}

#[pymethods]
impl PyScenario {
    #[new]
    #[pyo3(signature = (system, p_a = 0.0, theta = 0.0, t_max = 20.0, n_steps = 400))]
    fn new(system: PyBlockSystem, p_a: f64, theta: f64, t_max: f64, n_steps: usize) -> Self {
        Self {
            inner: Scenario {
                system: system.inner,
                initial: InitialState::WeightAngle { p_a, theta },
                t_max,
                n_steps,
                label: String::new(),
                delta_t_factor: 30.0,
                quadrature_n: 2000,
                sweep: None,
            },
        }
    }

    /// Load one of the built-in presets.
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        Ok(Self {
            inner: experiments::preset(name).map_err(err)?,
        })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label.clone()
    }

    #[getter]
    fn system(&self) -> PyBlockSystem {
        PyBlockSystem {
            inner: self.inner.system.clone(),
        }
    }

    #[getter]
    fn sweep_values(&self) -> Option<Vec<f64>> {
        self.inner.sweep.as_ref().map(|s| s.values.clone())
    }

    /// The unit-norm initial state in the full space.
    fn initial_state(&self) -> PyResult<Vec<Complex64>> {
        Ok(self.inner.initial_state().map_err(err)?.data().to_vec())
    }

    /// Run the scenario: exact, effective, and uncoupled evolutions plus the
    /// three fidelity series.
    fn run(&self) -> PyResult<PyScenarioResult> {
        let run = experiments::run_scenario(&self.inner).map_err(err)?;
        Ok(PyScenarioResult::from_run(&run))
    }

    /// Run once per decay-rate value and return the summary rows.
    fn gamma_sweep(&self, gammas: Vec<f64>) -> PyResult<Vec<PySweepRow>> {
        let sweep = experiments::gamma_sweep(&self.inner, &gammas).map_err(err)?;
        Ok(sweep
            .summary
            .iter()
            .map(|r| PySweepRow {
                axis_value: r.axis_value,
                min_f_ewa: r.min_f_ewa,
                min_f_z: r.min_f_z,
                min_f_zn: r.min_f_zn,
                max_db_entry: r.max_db_entry,
            })
            .collect())
    }

    /// The scenario in its JSON file form.
    fn to_json(&self) -> String {
        ewasim::cli::file::scenario_to_json(&self.inner)
    }

    /// Parse a scenario from its JSON file form.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file: ewasim::cli::file::ScenarioFile = serde_json::from_str(text)
            .map_err(|e| PyValueError::new_err(format!("parse error: {e}")))?;
        let inner: Scenario = file.try_into().map_err(err)?;
        Ok(Self { inner })
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(label={:?}, dim_A={}, t_max={}, n_steps={})",
            self.inner.label, self.inner.system.dim_a, self.inner.t_max, self.inner.n_steps
        )
    }
}

/// Matrix exponential of a square complex matrix.
#[pyfunction]
fn expm(m: PyMatrix) -> PyResult<PyMatrix> {
    Ok(matrix_to_py(
        &ewasim::linalg::expm(&matrix_from_py(m)?).map_err(err)?,
    ))
}

/// Eigenvalues and unit right eigenvectors (as columns) of a square complex
/// matrix.
#[pyfunction]
fn eig(m: PyMatrix) -> PyResult<(Vec<Complex64>, PyMatrix)> {
    let (vals, vecs) = ewasim::linalg::eig(&matrix_from_py(m)?).map_err(err)?;
    Ok((vals, matrix_to_py(&vecs)))
}

/// Names of the built-in presets.
#[pyfunction]
fn preset_names() -> Vec<String> {
    experiments::preset_names()
        .iter()
        .map(|s| s.to_string())
        .collect()
}

#[pymodule]
fn ewasim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyBlockSystem>()?;
    m.add_class::<PyScenario>()?;
    m.add_class::<PyScenarioResult>()?;
    m.add_class::<PySweepRow>()?;
    m.add_function(wrap_pyfunction!(expm, m)?)?;
    m.add_function(wrap_pyfunction!(eig, m)?)?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    Ok(())
}
