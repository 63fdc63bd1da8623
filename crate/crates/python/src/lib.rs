//! Python module `pyeulertour`: graphs, exact counts, samplers, the oracle
//! suite and experiment presets. Counts are Python ints and ratios are
//! `fractions.Fraction`.

use eulertour::report::{run_preset as run_named_preset, Overrides};
use eulertour::rng::trial_rng;
use eulertour::{experiments, naive, verify, DegreeSequence, Error, Ratio};
use num_bigint::BigUint;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(pyeulertour, NotEulerianError, PyValueError);
create_exception!(pyeulertour, AttemptsExhaustedError, PyRuntimeError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NotEulerian => NotEulerianError::new_err(e.to_string()),
        Error::AttemptsExhausted { .. } => AttemptsExhaustedError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn fraction<'py>(py: Python<'py>, r: &Ratio) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((r.numer().clone(), r.denom().clone()))
}

fn from_json<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.getattr("loads")?.call1((text,))
}

fn degrees(d: Vec<usize>) -> PyResult<DegreeSequence> {
    DegreeSequence::new(d).map_err(to_py)
}

/// Directed multigraph on vertices `0..n`; arc `i` is `arcs[i]`.
#[pyclass(name = "Multigraph", frozen)]
pub struct PyMultigraph {
    inner: eulertour::Multigraph,
}

#[pymethods]
impl PyMultigraph {
    #[new]
    fn new(n: usize, arcs: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PyMultigraph {
            inner: eulertour::Multigraph::new(n, &arcs).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyMultigraph {
            inner: eulertour::Multigraph::parse(text).map_err(to_py)?,
        })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn arcs(&self) -> Vec<(usize, usize)> {
        self.inner.arcs().iter().map(|a| (a.source, a.target)).collect()
    }

    fn out_degrees(&self) -> Vec<usize> {
        self.inner.out_degrees()
    }

    fn is_eulerian(&self) -> bool {
        eulertour::is_eulerian(&self.inner)
    }

    fn is_simple(&self) -> bool {
        eulertour::is_simple(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Multigraph(n={}, m={})", self.inner.n(), self.inner.m())
    }
}

#[pyfunction]
fn best_count(g: &PyMultigraph) -> PyResult<BigUint> {
    Ok(eulertour::best_count(&g.inner).map_err(to_py)?.0)
}

#[pyfunction]
fn count_arbs_rooted(g: &PyMultigraph, root: usize) -> PyResult<BigUint> {
    Ok(eulertour::count_arbs_rooted(&g.inner, root).map_err(to_py)?.0)
}

#[pyfunction]
fn count_arbs_total(g: &PyMultigraph) -> BigUint {
    eulertour::count_arbs_total(&g.inner).0
}

#[pyfunction]
fn acceptance_probability<'py>(py: Python<'py>, g: &PyMultigraph) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &naive::acceptance_probability_exact(&g.inner).map_err(to_py)?)
}

#[pyfunction]
fn enumerate_tours(g: &PyMultigraph) -> PyResult<Vec<Vec<usize>>> {
    Ok(eulertour::enumerate_tours(&g.inner)
        .map_err(to_py)?
        .into_iter()
        .map(|t| t.arcs().to_vec())
        .collect())
}

/// Uniform Euler tour as a list of arc ids, minimum id first.
#[pyfunction]
fn sample_tour(g: &PyMultigraph, seed: u64) -> PyResult<Vec<usize>> {
    Ok(eulertour::sample_tour_uniform(&g.inner, &mut trial_rng(seed, 0))
        .map_err(to_py)?
        .arcs()
        .to_vec())
}

/// One naive-sampler run: a tour, or `None` when the transition system splits.
#[pyfunction]
fn sample_naive(g: &PyMultigraph, seed: u64) -> PyResult<Option<Vec<usize>>> {
    Ok(naive::sample_naive(&g.inner, &mut trial_rng(seed, 0))
        .map_err(to_py)?
        .map(|t| t.arcs().to_vec()))
}

#[pyfunction]
fn approximate<'py>(py: Python<'py>, g: &PyMultigraph, kappa: u64, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| naive::approximate_seeded(&g.inner, kappa, seed)).map_err(to_py)?;
    fraction(py, &r)
}

#[pyfunction]
#[pyo3(signature = (degrees, seed, max_attempts = 1_000_000))]
fn random_simple_graph(degrees: Vec<usize>, seed: u64, max_attempts: u64) -> PyResult<PyMultigraph> {
    let d = self::degrees(degrees)?;
    let s = eulertour::sample_simple_eulerian(&d, &mut trial_rng(seed, 0), max_attempts).map_err(to_py)?;
    Ok(PyMultigraph { inner: s.graph })
}

/// Uniform configuration: `matching[i]` is the in-point paired with out-point `i`.
#[pyfunction]
fn sample_configuration(degrees: Vec<usize>, seed: u64) -> PyResult<Vec<usize>> {
    let d = self::degrees(degrees)?;
    Ok(eulertour::sample_configuration(&d, &mut trial_rng(seed, 0)).matching().to_vec())
}

#[pyfunction]
fn project(degrees: Vec<usize>, matching: Vec<usize>) -> PyResult<PyMultigraph> {
    let c = eulertour::Configuration::new(self::degrees(degrees)?, matching).map_err(to_py)?;
    Ok(PyMultigraph {
        inner: eulertour::project(&c),
    })
}

#[pyfunction]
fn forest_count(in_points: Vec<u64>, out_points: Vec<u64>, roots: Vec<usize>) -> PyResult<BigUint> {
    Ok(eulertour::forest_config_count_formula(&in_points, &out_points, &roots)
        .map_err(to_py)?
        .0)
}

#[pyfunction]
fn theory_moments<'py>(py: Python<'py>, degrees: Vec<usize>) -> PyResult<Bound<'py, PyAny>> {
    let t = experiments::theory_moments(&self::degrees(degrees)?);
    from_json(py, &serde_json::to_string(&t).expect("theory serializes"))
}

/// Exact mean and second moment of the total arborescence count over all
/// configurations, as Fractions.
#[pyfunction]
fn exact_configuration_moments<'py>(
    py: Python<'py>,
    degrees: Vec<usize>,
) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    let e = experiments::exact_configuration_moments(&self::degrees(degrees)?).map_err(to_py)?;
    Ok((fraction(py, &e.mean)?, fraction(py, &e.second_moment)?))
}

#[pyfunction]
fn simulate_w(py: Python<'_>, d: usize, k_max: usize, samples: u64, seed: u64) -> PyResult<Vec<f64>> {
    py.detach(|| experiments::simulate_w(d, k_max, samples, seed)).map_err(to_py)
}

/// Runs the oracle suite; returns a list of dicts with `name`, `cases`, `failures`.
#[pyfunction]
#[pyo3(signature = (seed = 0))]
fn run_verify<'py>(py: Python<'py>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let outcomes = py.detach(|| verify::run_all(seed));
    from_json(py, &serde_json::to_string(&outcomes).expect("outcomes serialize"))
}

/// Runs a named preset and returns the `report_v1` document as a dict.
#[pyfunction]
#[pyo3(signature = (name, seed = 0, workers = None, n = None, d = None, trials = None))]
fn run_preset<'py>(
    py: Python<'py>,
    name: &str,
    seed: u64,
    workers: Option<usize>,
    n: Option<usize>,
    d: Option<usize>,
    trials: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let overrides = Overrides {
        n,
        d,
        trials,
        max_attempts: None,
    };
    let report = py
        .detach(|| run_named_preset(name, seed, &overrides, workers))
        .map_err(to_py)?;
    from_json(py, &report.to_json())
}

#[pymodule]
fn pyeulertour(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NotEulerianError", m.py().get_type::<NotEulerianError>())?;
    m.add("AttemptsExhaustedError", m.py().get_type::<AttemptsExhaustedError>())?;
    m.add_class::<PyMultigraph>()?;
    m.add_function(wrap_pyfunction!(best_count, m)?)?;
    m.add_function(wrap_pyfunction!(count_arbs_rooted, m)?)?;
    m.add_function(wrap_pyfunction!(count_arbs_total, m)?)?;
    m.add_function(wrap_pyfunction!(acceptance_probability, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_tours, m)?)?;
    m.add_function(wrap_pyfunction!(sample_tour, m)?)?;
    m.add_function(wrap_pyfunction!(sample_naive, m)?)?;
    m.add_function(wrap_pyfunction!(approximate, m)?)?;
    m.add_function(wrap_pyfunction!(random_simple_graph, m)?)?;
    m.add_function(wrap_pyfunction!(sample_configuration, m)?)?;
    m.add_function(wrap_pyfunction!(project, m)?)?;
    m.add_function(wrap_pyfunction!(forest_count, m)?)?;
    m.add_function(wrap_pyfunction!(theory_moments, m)?)?;
    m.add_function(wrap_pyfunction!(exact_configuration_moments, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_w, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    m.add_function(wrap_pyfunction!(run_preset, m)?)?;
    m.add("__version__", eulertour::report::VERSION)?;
    Ok(())
}
