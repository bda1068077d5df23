//! Python bindings for `liftlab_core`. Rational values cross the boundary as
//! `fractions.Fraction`.

use liftlab_core::combi::Graph;
use liftlab_core::cover::{build_all_tk, build_tk, TkFamily};
use liftlab_core::match_protocol::match_factorization;
use liftlab_core::permext::{
    color_matrix, fooling_verify, goemans_verify, one_round_protocol, perm_factorization, quadratic_fooling_set,
    two_round_protocol, FoolingCheck,
};
use liftlab_core::protocol::{factorization_to_protocol, Factorization, MarkovianProtocol};
use liftlab_core::slack::{slack_match, slack_perm, slack_spt};
use liftlab_core::sortnet::{
    apply_network, generate, is_sorting_network, minimality, ComparatorSeq, Direction, Minimality, MinimalityMode,
    NetworkKind,
};
use liftlab_core::spt_protocol::build_spt_protocol;
use liftlab_core::{RatMatrix, Rational};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: liftlab_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((r.to_string(),))
}

fn rational(value: &Bound<'_, PyAny>) -> PyResult<Rational> {
    let text = value.str()?.to_string();
    text.parse().map_err(err)
}

fn direction(name: &str) -> PyResult<Direction> {
    match name {
        "forward" => Ok(Direction::Forward),
        "reverse" => Ok(Direction::Reverse),
        other => Err(PyValueError::new_err(format!("unknown direction {other:?}"))),
    }
}

fn graph(n: usize, edges: Option<Vec<(usize, usize)>>) -> PyResult<Graph> {
    match edges {
        Some(e) => Graph::new(n, e).map_err(err),
        None => Ok(Graph::complete(n)),
    }
}

/// Exact rational matrix with labeled rows and columns.
#[pyclass(name = "RatMatrix", module = "liftlab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRatMatrix {
    inner: RatMatrix,
}

#[pymethods]
impl PyRatMatrix {
    /// Build from a grid of values accepted by `Fraction` (ints, Fractions, "p/q" strings).
    #[new]
    #[pyo3(signature = (grid, rows=None, cols=None))]
    fn new(grid: Vec<Vec<Bound<'_, PyAny>>>, rows: Option<Vec<String>>, cols: Option<Vec<String>>) -> PyResult<Self> {
        let values = grid
            .iter()
            .map(|row| row.iter().map(rational).collect::<PyResult<Vec<_>>>())
            .collect::<PyResult<Vec<_>>>()?;
        let nrows = values.len();
        let ncols = values.first().map_or(0, Vec::len);
        let rows = rows.unwrap_or_else(|| (0..nrows).map(|i| i.to_string()).collect());
        let cols = cols.unwrap_or_else(|| (0..ncols).map(|i| i.to_string()).collect());
        RatMatrix::from_rows(rows, cols, values).map(|inner| Self { inner }).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        RatMatrix::from_json(text).map(|inner| Self { inner }).map_err(err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.nrows(), self.inner.ncols())
    }

    #[getter]
    fn rows(&self) -> Vec<String> {
        self.inner.row_labels().to_vec()
    }

    #[getter]
    fn cols(&self) -> Vec<String> {
        self.inner.col_labels().to_vec()
    }

    fn get<'py>(&self, py: Python<'py>, row: &str, col: &str) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.inner.get_by_label(row, col).map_err(err)?)
    }

    fn to_list<'py>(&self, py: Python<'py>) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        (0..self.inner.nrows())
            .map(|r| self.inner.row(r).iter().map(|v| fraction(py, v)).collect())
            .collect()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("RatMatrix({} x {})", self.inner.nrows(), self.inner.ncols())
    }
}

/// Nonnegative factorization `A B`.
#[pyclass(name = "Factorization", module = "liftlab", frozen)]
struct PyFactorization {
    inner: Factorization,
}

#[pymethods]
impl PyFactorization {
    #[getter]
    fn a(&self) -> PyRatMatrix {
        PyRatMatrix { inner: self.inner.a.clone() }
    }

    #[getter]
    fn b(&self) -> PyRatMatrix {
        PyRatMatrix { inner: self.inner.b.clone() }
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    /// True when `A B` equals `target` exactly.
    fn verify(&self, target: &PyRatMatrix) -> PyResult<bool> {
        Ok(self.inner.verify(&target.inner).map_err(err)?.is_equal())
    }

    fn __repr__(&self) -> String {
        format!("Factorization(size={})", self.inner.size())
    }
}

/// Randomized Markovian communication protocol.
#[pyclass(name = "Protocol", module = "liftlab", frozen)]
struct PyProtocol {
    inner: MarkovianProtocol,
}

#[pymethods]
impl PyProtocol {
    #[getter]
    fn rounds(&self) -> usize {
        self.inner.rounds()
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.gamma_width().width()
    }

    #[getter]
    fn x_domain(&self) -> Vec<String> {
        self.inner.x_domain().to_vec()
    }

    #[getter]
    fn y_domain(&self) -> Vec<String> {
        self.inner.y_domain().to_vec()
    }

    fn expectation<'py>(&self, py: Python<'py>, x: &str, y: &str) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.expectation_by_label(x, y).map_err(err)?)
    }

    /// `None` when the expected output equals `target` everywhere, else a description of the first mismatch.
    fn check(&self, target: &PyRatMatrix) -> PyResult<Option<String>> {
        let c = self.inner.check_correct(&target.inner).map_err(err)?;
        Ok((!c.is_correct()).then(|| c.to_string()))
    }

    fn compile(&self) -> PyResult<PyFactorization> {
        self.inner
            .compile_factorization()
            .map(|inner| PyFactorization { inner })
            .map_err(err)
    }

    #[pyo3(signature = (x, y, trials=10_000, seed=0x5eed))]
    fn simulate<'py>(&self, py: Python<'py>, x: &str, y: &str, trials: u64, seed: u64) -> PyResult<Bound<'py, PyDict>> {
        let xi = label_index(self.inner.x_domain(), x)?;
        let yi = label_index(self.inner.y_domain(), y)?;
        let r = self.inner.simulate(xi, yi, trials, seed).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("mean", fraction(py, &r.mean)?)?;
        d.set_item("variance", fraction(py, &r.variance)?)?;
        d.set_item("nonnegative", r.count_nonneg)?;
        d.set_item("trials", r.trials)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("Protocol(rounds={}, width={})", self.inner.rounds(), self.inner.gamma_width().width())
    }
}

fn label_index(domain: &[String], label: &str) -> PyResult<usize> {
    domain
        .iter()
        .position(|l| l == label)
        .ok_or_else(|| PyValueError::new_err(format!("unknown label {label:?}")))
}

/// Comparator network on wires `1..=n`.
#[pyclass(name = "Network", module = "liftlab", frozen)]
struct PyNetwork {
    inner: ComparatorSeq,
}

#[pymethods]
impl PyNetwork {
    #[new]
    fn new(n: usize, comparators: Vec<(usize, usize)>) -> PyResult<Self> {
        ComparatorSeq::new(n, comparators).map(|inner| Self { inner }).map_err(err)
    }

    /// `kind` is one of `quadratic`, `oddeven`, `batcher`.
    #[staticmethod]
    fn generate(kind: &str, n: usize) -> PyResult<Self> {
        let kind: NetworkKind = kind.parse().map_err(err)?;
        generate(kind, n).map(|inner| Self { inner }).map_err(err)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        ComparatorSeq::parse(text).map(|inner| Self { inner }).map_err(err)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn comparators(&self) -> Vec<(usize, usize)> {
        self.inner.comps().iter().map(|c| (c.i, c.j)).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[pyo3(signature = (values, direction="forward"))]
    fn apply(&self, values: Vec<i64>, direction: &str) -> PyResult<Vec<i64>> {
        apply_network(&self.inner, &values, self::direction(direction)?).map_err(err)
    }

    #[pyo3(signature = (direction="forward"))]
    fn is_sorting(&self, direction: &str) -> PyResult<bool> {
        Ok(is_sorting_network(&self.inner, self::direction(direction)?))
    }

    /// Indices of removable comparators; empty when the network is minimal.
    #[pyo3(signature = (exhaustive=false))]
    fn redundant(&self, exhaustive: bool) -> PyResult<Vec<usize>> {
        let mode = if exhaustive {
            MinimalityMode::Exhaustive
        } else {
            MinimalityMode::OneRemoval
        };
        Ok(match minimality(&self.inner, mode).map_err(err)? {
            Minimality::Minimal => Vec::new(),
            Minimality::Redundant(idx) => idx,
        })
    }

    fn __repr__(&self) -> String {
        format!("Network(n={}, size={})", self.inner.n(), self.inner.len())
    }
}

/// Slack matrix of the permutahedron on `n` elements.
#[pyfunction]
fn perm_slack(n: usize) -> PyResult<PyRatMatrix> {
    slack_perm(n).map(|s| PyRatMatrix { inner: s.matrix }).map_err(err)
}

/// Slack matrix of the spanning tree polytope of `K_n` or of the given graph.
#[pyfunction]
#[pyo3(signature = (n, edges=None, nonnegativity=false))]
fn spt_slack(n: usize, edges: Option<Vec<(usize, usize)>>, nonnegativity: bool) -> PyResult<PyRatMatrix> {
    slack_spt(&graph(n, edges)?, nonnegativity)
        .map(|s| PyRatMatrix { inner: s.matrix })
        .map_err(err)
}

/// Slack matrix of the matching polytope of `K_n` or of the given graph.
#[pyfunction]
#[pyo3(signature = (n, edges=None))]
fn match_slack(n: usize, edges: Option<Vec<(usize, usize)>>) -> PyResult<PyRatMatrix> {
    slack_match(&graph(n, edges)?)
        .map(|s| PyRatMatrix { inner: s.matrix })
        .map_err(err)
}

#[pyfunction]
fn perm_factorize(network: &PyNetwork) -> PyResult<PyFactorization> {
    perm_factorization(&network.inner)
        .map(|f| PyFactorization { inner: f.factorization })
        .map_err(err)
}

#[pyfunction]
fn perm_color_matrix(network: &PyNetwork) -> PyResult<PyRatMatrix> {
    color_matrix(&network.inner).map(|inner| PyRatMatrix { inner }).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, edges=None))]
fn match_factorize(n: usize, edges: Option<Vec<(usize, usize)>>) -> PyResult<PyFactorization> {
    let g = graph(n, edges)?;
    let tks = build_all_tk(g.n()).map_err(err)?;
    match_factorization(&g, &tks)
        .map(|inner| PyFactorization { inner })
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, edges=None))]
fn spt_protocol(n: usize, edges: Option<Vec<(usize, usize)>>) -> PyResult<PyProtocol> {
    build_spt_protocol(&graph(n, edges)?)
        .map(|inner| PyProtocol { inner })
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (network, rounds=1))]
fn perm_protocol(network: &PyNetwork, rounds: usize) -> PyResult<PyProtocol> {
    let p = match rounds {
        1 => one_round_protocol(&network.inner),
        2 => two_round_protocol(&network.inner),
        _ => return Err(PyValueError::new_err("rounds must be 1 or 2")),
    };
    p.map(|inner| PyProtocol { inner }).map_err(err)
}

/// Protocol whose expected output is the product `A B`.
#[pyfunction]
fn protocol_from_factors(a: &PyRatMatrix, b: &PyRatMatrix) -> PyResult<PyProtocol> {
    factorization_to_protocol(&a.inner, &b.inner)
        .map(|inner| PyProtocol { inner })
        .map_err(err)
}

/// Greedy family of `k`-subsets covering every `k`-matching of `K_n`.
#[pyfunction]
fn tk_family<'py>(py: Python<'py>, n: usize, k: usize) -> PyResult<Bound<'py, PyDict>> {
    let r = build_tk(n, k).map_err(err)?;
    let d = PyDict::new(py);
    let sets: Vec<Vec<usize>> = r.family.sets.iter().map(|s| s.to_vec()).collect();
    d.set_item("n", n)?;
    d.set_item("k", k)?;
    d.set_item("sets", sets)?;
    d.set_item("bound", fraction(py, &r.bound)?)?;
    d.set_item("json", r.family.to_json())?;
    Ok(d)
}

/// Check that a `T_k` JSON document covers every `k`-matching of `K_n`.
#[pyfunction]
fn tk_covers(text: &str) -> PyResult<bool> {
    let family = TkFamily::from_json(text).map_err(err)?;
    Ok(family.ensure_covers(&Graph::complete(family.n)).is_ok())
}

/// Verify the extended formulation built from `network`; returns `None` on success.
#[pyfunction]
#[pyo3(signature = (network, samples=1000, seed=0x5eed))]
fn goemans_check(network: &PyNetwork, samples: usize, seed: u64) -> PyResult<Option<String>> {
    Ok(goemans_verify(&network.inner, samples, seed).map_err(err)?.failure)
}

/// Fooling set for the quadratic network's color matrix and whether it is valid.
#[pyfunction]
fn fooling_set(n: usize) -> PyResult<(Vec<(String, String)>, bool)> {
    let f = quadratic_fooling_set(n).map_err(err)?;
    let m = color_matrix(&liftlab_core::sortnet::quadratic(n).map_err(err)?).map_err(err)?;
    let valid = matches!(fooling_verify(&m, &f).map_err(err)?, FoolingCheck::Valid);
    Ok((f.pairs, valid))
}

#[pymodule]
#[pyo3(name = "liftlab")]
fn liftlab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRatMatrix>()?;
    m.add_class::<PyFactorization>()?;
    m.add_class::<PyProtocol>()?;
    m.add_class::<PyNetwork>()?;
    m.add_function(wrap_pyfunction!(perm_slack, m)?)?;
    m.add_function(wrap_pyfunction!(spt_slack, m)?)?;
    m.add_function(wrap_pyfunction!(match_slack, m)?)?;
    m.add_function(wrap_pyfunction!(perm_factorize, m)?)?;
    m.add_function(wrap_pyfunction!(perm_color_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(match_factorize, m)?)?;
    m.add_function(wrap_pyfunction!(spt_protocol, m)?)?;
    m.add_function(wrap_pyfunction!(perm_protocol, m)?)?;
    m.add_function(wrap_pyfunction!(protocol_from_factors, m)?)?;
    m.add_function(wrap_pyfunction!(tk_family, m)?)?;
    m.add_function(wrap_pyfunction!(tk_covers, m)?)?;
    m.add_function(wrap_pyfunction!(goemans_check, m)?)?;
    m.add_function(wrap_pyfunction!(fooling_set, m)?)?;
    Ok(())
}
