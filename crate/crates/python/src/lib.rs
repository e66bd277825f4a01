//! Python module `chordlearn`: datasets, chordal graphs, Bayesian networks,
//! the two greedy learners, evaluation metrics and the verification suite.

use chordlearn_core::data::Dataset as CoreDataset;
use chordlearn_core::eval::{fit_parameters, kl_estimate, kl_exact as core_kl_exact, Structure};
use chordlearn_core::graph::{ChordalGraph as CoreChordalGraph, UndirectedGraph};
use chordlearn_core::scoring::{
    dimension as core_dimension, score_chordal as core_score_chordal, ScoreCache,
};
use chordlearn_core::search::{
    greedy_chordal, greedy_dag, inclusion_boundary, BdeuScorer, SearchPolicy,
};
use chordlearn_core::synth::{
    ancestral_sample, random_chordal_target as core_target, rng_for, DiscreteBayesNet,
};
use chordlearn_core::verify::{find_nonoptimal_local_optimum, run_suite, VerifyLevel};
use chordlearn_core::Error;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Discrete observations, one column per variable.
#[pyclass(module = "chordlearn", skip_from_py_object)]
#[derive(Clone)]
struct Dataset {
    inner: CoreDataset,
}

#[pymethods]
impl Dataset {
    #[new]
    #[pyo3(signature = (rows, arities))]
    fn new(rows: Vec<Vec<u8>>, arities: Vec<usize>) -> PyResult<Self> {
        Ok(Dataset {
            inner: CoreDataset::from_rows(arities, &rows).map_err(to_py)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (path, arities=None))]
    fn read_csv(path: &str, arities: Option<Vec<usize>>) -> PyResult<Self> {
        Ok(Dataset {
            inner: CoreDataset::read_csv_path(path.as_ref(), arities.as_deref()).map_err(to_py)?,
        })
    }

    #[getter]
    fn n_vars(&self) -> usize {
        self.inner.n_vars()
    }

    #[getter]
    fn n_rows(&self) -> usize {
        self.inner.n_rows()
    }

    #[getter]
    fn arities(&self) -> Vec<usize> {
        self.inner.arities().to_vec()
    }

    fn row(&self, i: usize) -> PyResult<Vec<u8>> {
        if i >= self.inner.n_rows() {
            return Err(PyValueError::new_err(format!("row {i} out of range")));
        }
        Ok(self.inner.row(i))
    }

    fn __len__(&self) -> usize {
        self.inner.n_rows()
    }
}

/// An undirected chordal graph with a stored perfect ordering.
#[pyclass(module = "chordlearn", skip_from_py_object)]
#[derive(Clone)]
struct ChordalGraph {
    inner: CoreChordalGraph,
}

#[pymethods]
impl ChordalGraph {
    #[new]
    #[pyo3(signature = (n, lines=Vec::new()))]
    fn new(n: usize, lines: Vec<(usize, usize)>) -> PyResult<Self> {
        let g = UndirectedGraph::from_lines(n, lines).map_err(to_py)?;
        Ok(ChordalGraph {
            inner: CoreChordalGraph::new(g).map_err(to_py)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn lines(&self) -> Vec<(usize, usize)> {
        self.inner.lines().collect()
    }

    fn ordering(&self) -> Vec<usize> {
        self.inner.ordering().to_vec()
    }

    /// Legal single-line additions and removals, as strings such as `add 0-2`.
    fn inclusion_boundary(&self) -> Vec<String> {
        inclusion_boundary(&self.inner)
            .iter()
            .map(|m| m.to_string())
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("ChordalGraph({}, {:?})", self.inner.n(), self.lines())
    }
}

/// Whether the undirected graph on `n` vertices with these lines is chordal.
#[pyfunction]
fn is_chordal(n: usize, lines: Vec<(usize, usize)>) -> PyResult<bool> {
    Ok(chordlearn_core::graph::chordal(
        &UndirectedGraph::from_lines(n, lines).map_err(to_py)?,
    ))
}

/// A discrete Bayesian network.
#[pyclass(module = "chordlearn", skip_from_py_object)]
#[derive(Clone)]
struct BayesNet {
    inner: DiscreteBayesNet,
}

#[pymethods]
impl BayesNet {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(BayesNet {
            inner: DiscreteBayesNet::from_json(text).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn arities(&self) -> Vec<usize> {
        self.inner.arities().to_vec()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.dag().edges()
    }

    fn log_prob(&self, x: Vec<u8>) -> PyResult<f64> {
        if x.len() != self.inner.n()
            || x.iter()
                .zip(self.inner.arities())
                .any(|(&s, &r)| s as usize >= r)
        {
            return Err(PyValueError::new_err(
                "state vector does not match the network",
            ));
        }
        Ok(self.inner.log_prob(&x))
    }

    /// Ancestral sample of `count` rows from stream 0 of `seed`.
    fn sample(&self, count: usize, seed: u64) -> PyResult<Dataset> {
        Ok(Dataset {
            inner: ancestral_sample(&self.inner, count, &mut rng_for(seed, 0)).map_err(to_py)?,
        })
    }
}

/// A random decomposable target: its chordal graph and a network that factorizes over it.
#[pyfunction]
#[pyo3(signature = (n, arity=2, seed=0, clamp=false))]
fn random_chordal_target(
    n: usize,
    arity: usize,
    seed: u64,
    clamp: bool,
) -> PyResult<(ChordalGraph, BayesNet)> {
    let (g, net) = core_target(n, &vec![arity; n], clamp, &mut rng_for(seed, 0)).map_err(to_py)?;
    Ok((ChordalGraph { inner: g }, BayesNet { inner: net }))
}

/// Greedy chordal learning from the empty graph; returns the graph and the JSON-lines trace.
#[pyfunction]
#[pyo3(signature = (data, ess=1.0))]
fn learn_chordal(py: Python<'_>, data: &Dataset, ess: f64) -> PyResult<(ChordalGraph, String)> {
    let d = data.inner.clone();
    py.detach(move || {
        let scorer = BdeuScorer::new(&d, ess)?;
        let (g, trace) = greedy_chordal(
            &scorer,
            CoreChordalGraph::empty(d.n_vars()),
            SearchPolicy::default(),
        )?;
        Ok((ChordalGraph { inner: g }, trace.to_json_lines()))
    })
    .map_err(to_py)
}

/// Greedy DAG learning from the empty DAG; returns the arrows and the JSON-lines trace.
#[pyfunction]
#[pyo3(signature = (data, ess=1.0))]
fn learn_dag(py: Python<'_>, data: &Dataset, ess: f64) -> PyResult<(Vec<(usize, usize)>, String)> {
    let d = data.inner.clone();
    py.detach(move || {
        let scorer = BdeuScorer::new(&d, ess)?;
        let (dag, trace) = greedy_dag(&scorer);
        Ok((dag.edges(), trace.to_json_lines()))
    })
    .map_err(to_py)
}

/// BDeu score of a chordal graph.
#[pyfunction]
#[pyo3(signature = (graph, data, ess=1.0))]
fn score_chordal(graph: &ChordalGraph, data: &Dataset, ess: f64) -> PyResult<f64> {
    let cache = ScoreCache::new(&data.inner, ess).map_err(to_py)?;
    core_score_chordal(&graph.inner, &data.inner, &cache).map_err(to_py)
}

/// Number of free parameters of a chordal graph over variables of the given arities.
#[pyfunction]
fn dimension(graph: &ChordalGraph, arities: Vec<usize>) -> PyResult<u64> {
    if arities.len() != graph.inner.n() {
        return Err(PyValueError::new_err("one arity per vertex is required"));
    }
    Ok(core_dimension(&graph.inner, &arities))
}

/// Fits `graph` to `train` and returns `(kl, standard error)` against `target` on `test`.
#[pyfunction]
#[pyo3(signature = (graph, train, target, test, ess=1.0))]
fn fit_and_kl(
    graph: &ChordalGraph,
    train: &Dataset,
    target: &BayesNet,
    test: &Dataset,
    ess: f64,
) -> PyResult<(f64, f64)> {
    let fitted = fit_parameters(&Structure::Chordal(graph.inner.clone()), &train.inner, ess)
        .map_err(to_py)?;
    let est = kl_estimate(&target.inner, &fitted, &test.inner).map_err(to_py)?;
    Ok((est.kl, est.se))
}

/// Exact `KL(g ‖ p)` by enumerating the joint state space.
#[pyfunction]
fn kl_exact(g: &BayesNet, p: &BayesNet) -> PyResult<f64> {
    core_kl_exact(&g.inner, &p.inner).map_err(to_py)
}

/// Runs the verification suite; returns `(passed, report as JSON)`.
#[pyfunction]
#[pyo3(signature = (level="fast"))]
fn verify(py: Python<'_>, level: &str) -> PyResult<(bool, String)> {
    let level = match level {
        "fast" => VerifyLevel::Fast,
        "full" => VerifyLevel::Full,
        other => {
            return Err(PyValueError::new_err(format!(
                "level must be fast or full, got {other}"
            )))
        }
    };
    let report = py.detach(|| run_suite(level, false)).map_err(to_py)?;
    let json = serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((report.passed, json))
}

/// Searches one-latent DAG targets for a non-inclusion-optimal local optimum;
/// returns the report as JSON.
#[pyfunction]
fn latent_counterexample(py: Python<'_>) -> PyResult<String> {
    let report = py.detach(find_nonoptimal_local_optimum).map_err(to_py)?;
    serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn chordlearn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Dataset>()?;
    m.add_class::<ChordalGraph>()?;
    m.add_class::<BayesNet>()?;
    m.add_function(wrap_pyfunction!(is_chordal, m)?)?;
    m.add_function(wrap_pyfunction!(random_chordal_target, m)?)?;
    m.add_function(wrap_pyfunction!(learn_chordal, m)?)?;
    m.add_function(wrap_pyfunction!(learn_dag, m)?)?;
    m.add_function(wrap_pyfunction!(score_chordal, m)?)?;
    m.add_function(wrap_pyfunction!(dimension, m)?)?;
    m.add_function(wrap_pyfunction!(fit_and_kl, m)?)?;
    m.add_function(wrap_pyfunction!(kl_exact, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(latent_counterexample, m)?)?;
    Ok(())
}
