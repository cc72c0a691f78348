//! Python bindings: channel solvers, initial states, dressed coordinates and
//! observable reports.

use mazer_core::io::{parse_state, to_sorted_json};
use mazer_core::profile::{ProfileDescriptor, ProfileMode};
use mazer_core::{
    full_report, to_dressed_coordinates, trapping_state, Amplitudes, Branch, Channel, InitialState,
    ObservablesReport, PureStateSpec, SolverConfig, TrappingParam, WavePacketSpec,
    DEFAULT_EPSILON_TAIL,
};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

/// (w_minus1, [(w, theta, chi, phi), ...])
type PyCoords = (f64, Vec<(f64, f64, f64, f64)>);

fn py_err(e: mazer_core::Error) -> PyErr {
    if e.is_validation() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn parse_branch(s: &str) -> PyResult<Branch> {
    s.parse().map_err(py_err)
}

fn parse_mode(s: &str) -> PyResult<ProfileMode> {
    Ok(match s {
        "mesa" => ProfileMode::Mesa,
        "sech2" => ProfileMode::Sech2,
        "gaussian" => ProfileMode::Gaussian,
        "sin" => ProfileMode::Sin,
        "expr" => ProfileMode::Expr,
        _ => return Err(PyValueError::new_err(format!("unknown mode `{s}`"))),
    })
}

/// Reflection and transmission amplitudes of one channel.
#[pyclass(name = "Amplitudes", frozen)]
#[derive(Clone)]
struct PyAmplitudes(Amplitudes);

#[pymethods]
impl PyAmplitudes {
    #[getter]
    fn n(&self) -> u32 {
        self.0.channel.n
    }
    #[getter]
    fn branch(&self) -> &'static str {
        self.0.channel.branch.symbol()
    }
    #[getter]
    fn k(&self) -> f64 {
        self.0.k
    }
    #[getter]
    fn r(&self) -> Complex64 {
        self.0.r
    }
    #[getter]
    fn t(&self) -> Complex64 {
        self.0.t
    }
    #[getter]
    fn error_estimate(&self) -> f64 {
        self.0.error_estimate
    }
    fn reflection(&self) -> f64 {
        self.0.reflection()
    }
    fn transmission(&self) -> f64 {
        self.0.transmission()
    }
    fn unitarity_defect(&self) -> f64 {
        self.0.unitarity_defect()
    }
    fn __repr__(&self) -> String {
        format!(
            "Amplitudes(n={}, branch='{}', k={}, r={}, t={})",
            self.0.channel.n, self.0.channel.branch, self.0.k, self.0.r, self.0.t
        )
    }
}

/// Mode profile plus solver settings.
///
/// ```text
/// Solver(mode="mesa", kappa_L=10.0, width=None, lobes=None, expr=None,
///        segments=4096, support_epsilon=1e-10, unitarity_tol=1e-6)
/// ```
#[pyclass(name = "Solver", frozen)]
struct PySolver(mazer_core::Solver);

#[pymethods]
impl PySolver {
    #[new]
    #[pyo3(signature = (mode="mesa", kappa_L=10.0, width=None, lobes=None, expr=None,
                        segments=4096, support_epsilon=1e-10, unitarity_tol=1e-6))]
    #[allow(non_snake_case, clippy::too_many_arguments)]
    fn new(
        mode: &str,
        kappa_L: f64,
        width: Option<f64>,
        lobes: Option<u32>,
        expr: Option<String>,
        segments: usize,
        support_epsilon: f64,
        unitarity_tol: f64,
    ) -> PyResult<Self> {
        let profile = ProfileDescriptor {
            mode: parse_mode(mode)?,
            kappa_l: kappa_L,
            width,
            lobes,
            expr,
        }
        .build()
        .map_err(py_err)?;
        let config = SolverConfig {
            segments,
            support_epsilon,
            unitarity_tol,
        };
        mazer_core::Solver::new(profile, config)
            .map(PySolver)
            .map_err(py_err)
    }

    /// u(z) of the mode profile.
    fn mode_value(&self, z: f64) -> PyResult<f64> {
        self.0.profile().eval(z).map_err(py_err)
    }

    #[pyo3(signature = (n, branch, k))]
    fn scatter(&self, py: Python<'_>, n: u32, branch: &str, k: f64) -> PyResult<PyAmplitudes> {
        let channel = Channel::new(n, parse_branch(branch)?);
        py.detach(|| self.0.scatter(channel, k))
            .map(PyAmplitudes)
            .map_err(py_err)
    }

    /// All channels n = 0..=n_max, both branches, at every k.
    fn table(&self, py: Python<'_>, n_max: u32, k_list: Vec<f64>) -> PyResult<Vec<PyAmplitudes>> {
        let table = py
            .detach(|| mazer_core::scattering::amplitude_table_from(&self.0, n_max, &k_list))
            .map_err(py_err)?;
        Ok(table.iter().copied().map(PyAmplitudes).collect())
    }

    fn table_csv(&self, py: Python<'_>, n_max: u32, k_list: Vec<f64>) -> PyResult<String> {
        py.detach(|| mazer_core::scattering::amplitude_table_from(&self.0, n_max, &k_list))
            .map(|t| t.to_csv())
            .map_err(py_err)
    }
}

/// Pure initial state of atom and field.
#[pyclass(name = "State", frozen)]
#[derive(Clone)]
struct PyState(PureStateSpec);

#[pymethods]
impl PyState {
    /// |a,n⟩
    #[staticmethod]
    fn excited(n: usize) -> Self {
        PyState(PureStateSpec::excited(n))
    }

    /// |b,n⟩
    #[staticmethod]
    fn ground(n: usize) -> Self {
        PyState(PureStateSpec::ground(n))
    }

    /// (c_a|a⟩ + c_b|b⟩) ⊗ Σ f_n|n⟩
    #[staticmethod]
    fn product(c_a: Complex64, c_b: Complex64, field: Vec<Complex64>) -> PyResult<Self> {
        let s = PureStateSpec::Product {
            atom: [c_a, c_b],
            field,
        };
        s.validate().map_err(py_err)?;
        Ok(PyState(s))
    }

    /// Σ a_n|a,n⟩ + b_n|b,n⟩
    #[staticmethod]
    fn joint(a: Vec<Complex64>, b: Vec<Complex64>) -> PyResult<Self> {
        let s = PureStateSpec::Joint { a, b };
        s.validate().map_err(py_err)?;
        Ok(PyState(s))
    }

    /// Same JSON layout as the command-line state files.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse_state(text).map(PyState).map_err(py_err)
    }

    /// Dressed coordinates as (w_minus1, [(w, theta, chi, phi), ...]).
    fn dressed_coordinates(&self) -> PyResult<PyCoords> {
        let c = to_dressed_coordinates(&self.0).map_err(py_err)?;
        Ok((
            c.w_minus1,
            c.entries
                .iter()
                .map(|e| (e.w, e.theta, e.chi, e.phi))
                .collect(),
        ))
    }
}

/// Perfect trapping state |γ±⟩.
#[pyclass(name = "Trapping", frozen)]
#[derive(Clone)]
struct PyTrapping(TrappingParam);

#[pymethods]
impl PyTrapping {
    #[new]
    #[pyo3(signature = (gamma, branch="+"))]
    fn new(gamma: Complex64, branch: &str) -> PyResult<Self> {
        TrappingParam::new(gamma, parse_branch(branch)?)
            .map(PyTrapping)
            .map_err(py_err)
    }

    #[pyo3(signature = (epsilon_tail=DEFAULT_EPSILON_TAIL))]
    fn dressed_coordinates(&self, epsilon_tail: f64) -> PyResult<PyCoords> {
        let c = trapping_state(&self.0, epsilon_tail).map_err(py_err)?;
        Ok((
            c.w_minus1,
            c.entries
                .iter()
                .map(|e| (e.w, e.theta, e.chi, e.phi))
                .collect(),
        ))
    }
}

#[pyclass(name = "Report", frozen)]
struct PyReport(ObservablesReport);

#[pymethods]
impl PyReport {
    #[getter]
    fn sigma_aa_initial(&self) -> f64 {
        self.0.sigma_aa_initial
    }
    #[getter]
    fn delta_sigma_aa(&self) -> f64 {
        self.0.delta_sigma_aa
    }
    #[getter]
    #[allow(non_snake_case)]
    fn R(&self) -> f64 {
        self.0.reflection
    }
    #[getter]
    #[allow(non_snake_case)]
    fn T(&self) -> f64 {
        self.0.transmission
    }
    /// δP_n for n = 0 ..= highest occupied level + 1.
    #[getter]
    fn delta_p(&self) -> Vec<f64> {
        self.0.per_n.iter().map(|r| r.delta_p).collect()
    }
    /// K_n, same range as `delta_p`.
    #[getter]
    fn kernels(&self) -> Vec<Complex64> {
        self.0
            .per_n
            .iter()
            .map(|r| Complex64::new(r.re_k, r.im_k))
            .collect()
    }
    fn to_json(&self) -> PyResult<String> {
        to_sorted_json(&self.0).map_err(py_err)
    }
    fn per_n_csv(&self) -> String {
        self.0.per_n_csv()
    }
}

/// Observables after one transit. `state` is a State or a Trapping; a
/// Gaussian momentum spread is used when `sigma_k` is given.
#[pyfunction]
#[pyo3(signature = (state, solver, k=0.1, sigma_k=None, epsilon_tail=DEFAULT_EPSILON_TAIL))]
fn report(
    py: Python<'_>,
    state: &Bound<'_, PyAny>,
    solver: &Bound<'_, PySolver>,
    k: f64,
    sigma_k: Option<f64>,
    epsilon_tail: f64,
) -> PyResult<PyReport> {
    let initial = if let Ok(s) = state.cast::<PyState>() {
        InitialState::Pure(s.get().0.clone())
    } else if let Ok(t) = state.cast::<PyTrapping>() {
        InitialState::Trapping(t.get().0)
    } else {
        return Err(PyValueError::new_err("state must be a State or a Trapping"));
    };
    let incidence = match sigma_k {
        None => WavePacketSpec::monochromatic(k),
        Some(sigma_k) => WavePacketSpec::Gaussian { k0: k, sigma_k },
    };
    let solver = solver.get();
    py.detach(|| full_report(&initial, &solver.0, &incidence, epsilon_tail))
        .map(PyReport)
        .map_err(py_err)
}

/// (R, T) of a trapping state; only its own branch is evaluated.
#[pyfunction]
#[pyo3(signature = (trapping, solver, k=0.1, epsilon_tail=DEFAULT_EPSILON_TAIL))]
fn trapping_rt(
    py: Python<'_>,
    trapping: &Bound<'_, PyTrapping>,
    solver: &Bound<'_, PySolver>,
    k: f64,
    epsilon_tail: f64,
) -> PyResult<(f64, f64)> {
    let (p, s) = (trapping.get(), solver.get());
    py.detach(|| mazer_core::trapping_rt(&p.0, &s.0, k, epsilon_tail))
        .map_err(py_err)
}

#[pyfunction]
fn ultracold_rt_plus(gamma_abs: f64) -> (f64, f64) {
    mazer_core::ultracold_rt_plus(gamma_abs)
}

#[pyfunction]
fn kappa_n_ratio(n: u32) -> f64 {
    mazer_core::kappa_n_ratio(n)
}

#[pymodule]
fn mazer(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAmplitudes>()?;
    m.add_class::<PySolver>()?;
    m.add_class::<PyState>()?;
    m.add_class::<PyTrapping>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(report, m)?)?;
    m.add_function(wrap_pyfunction!(trapping_rt, m)?)?;
    m.add_function(wrap_pyfunction!(ultracold_rt_plus, m)?)?;
    m.add_function(wrap_pyfunction!(kappa_n_ratio, m)?)?;
    Ok(())
}
