//! Python bindings: `import tourney`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

use tourney_core::analysis;
use tourney_core::census::{census_bruteforce, census_document, census_fast, count_pattern};
use tourney_core::constructions::{self, Alpha, BlowupSpec};
use tourney_core::diagnostics;
use tourney_core::format;
use tourney_core::search::{self, LocalSearchConfig};
use tourney_core::{canonical_form, is_isomorphic, PatternId};

fn err(e: tourney_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.into_pyobject(py)?.into_any(),
            (_, Some(i)) => i.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(xs) => {
            let list = PyList::empty(py);
            for x in xs {
                list.append(to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let d = PyDict::new(py);
            for (k, x) in map {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn pattern(name: &str) -> PyResult<PatternId> {
    name.parse().map_err(err)
}

#[pyclass(name = "Tournament", module = "tourney", eq, frozen, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyTournament {
    inner: tourney_core::Tournament,
}

impl From<tourney_core::Tournament> for PyTournament {
    fn from(inner: tourney_core::Tournament) -> Self {
        PyTournament { inner }
    }
}

#[pymethods]
impl PyTournament {
    /// Decodes the upper-triangle bitstring; `'1'` at pair `(i, j)` means `i -> j`.
    #[new]
    fn new(n: usize, bits: &str) -> PyResult<Self> {
        tourney_core::Tournament::from_bits(n, bits).map(Self::from).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn bits(&self) -> String {
        self.inner.to_bits()
    }

    fn arc(&self, i: usize, j: usize) -> PyResult<bool> {
        if i >= self.inner.n() || j >= self.inner.n() || i == j {
            return Err(PyValueError::new_err("need two distinct vertices in range"));
        }
        Ok(self.inner.arc(i, j))
    }

    fn out_degrees(&self) -> Vec<usize> {
        self.inner.out_degrees()
    }

    fn reverse(&self) -> Self {
        self.inner.reverse().into()
    }

    fn induce(&self, vertices: Vec<usize>) -> PyResult<Self> {
        self.inner.induce(&vertices).map(Self::from).map_err(err)
    }

    fn relabel(&self, perm: Vec<usize>) -> PyResult<Self> {
        self.inner.relabel(&perm).map(Self::from).map_err(err)
    }

    fn canonical_form(&self) -> PyResult<String> {
        canonical_form(&self.inner).map(|c| c.bitstring()).map_err(err)
    }

    fn is_isomorphic(&self, other: &PyTournament) -> PyResult<bool> {
        is_isomorphic(&self.inner, &other.inner).map_err(err)
    }

    /// Exact counts and densities of all 3- and 4-vertex types.
    #[pyo3(signature = (bruteforce = false))]
    fn census<'py>(&self, py: Python<'py>, bruteforce: bool) -> PyResult<Bound<'py, PyAny>> {
        let c = if bruteforce {
            census_bruteforce(&self.inner)
        } else {
            census_fast(&self.inner)
        };
        to_py(py, &census_document(&c))
    }

    fn count(&self, pattern_name: &str) -> PyResult<u128> {
        count_pattern(&pattern(pattern_name)?, &self.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Tournament({}, {:?})", self.inner.n(), self.inner.to_bits())
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }
}

#[pyfunction]
fn transitive(n: usize) -> PyTournament {
    constructions::transitive(n).into()
}

#[pyfunction]
fn carousel(n: usize) -> PyResult<PyTournament> {
    if n < 3 {
        return Err(PyValueError::new_err("carousel needs n >= 3"));
    }
    Ok(constructions::carousel(n).into())
}

#[pyfunction]
fn carousel_class(n: usize) -> PyResult<Vec<String>> {
    constructions::carousel_class(n)
        .map(|v| v.iter().map(|c| c.bitstring()).collect())
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, seed = 0))]
fn random_tournament(n: usize, seed: u64) -> PyTournament {
    constructions::random_tournament(n, seed).into()
}

/// Returns `(tournament, levels)`; `alpha=None` picks the optimal fraction.
#[pyfunction]
#[pyo3(signature = (n, alpha = None, seed = 0, base_cutoff = 4))]
fn iterated_blowup(n: usize, alpha: Option<f64>, seed: u64, base_cutoff: usize) -> PyResult<(PyTournament, Vec<u32>)> {
    let spec = BlowupSpec {
        n,
        alpha: alpha.map_or(Alpha::Auto, Alpha::Fixed),
        seed,
        base_cutoff,
    };
    let b = constructions::iterated_blowup(&spec).map_err(err)?;
    Ok((b.tournament.into(), b.levels))
}

#[pyfunction]
fn exhaustive_max<'py>(py: Python<'py>, pattern_name: &str, n: usize) -> PyResult<Bound<'py, PyAny>> {
    let r = search::exhaustive_max(&pattern(pattern_name)?, n).map_err(err)?;
    to_py(py, &r.to_json())
}

#[pyfunction]
#[pyo3(signature = (pattern_name, n, seed = 0, restarts = 20, moves = "arc_flip"))]
fn local_search<'py>(
    py: Python<'py>,
    pattern_name: &str,
    n: usize,
    seed: u64,
    restarts: usize,
    moves: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let mut cfg = LocalSearchConfig::new(seed, restarts);
    cfg.moves = moves.parse().map_err(err)?;
    let r = search::local_search(&pattern(pattern_name)?, n, &cfg).map_err(err)?;
    to_py(py, &r.to_json())
}

#[pyfunction]
fn enumerate_tournaments(n: usize) -> PyResult<Vec<PyTournament>> {
    search::enumerate_tournaments(n)
        .map(|v| v.into_iter().map(PyTournament::from).collect())
        .map_err(err)
}

#[pyfunction]
fn c4_max_formula(n: usize) -> PyResult<u128> {
    analysis::c4_max_formula(n).map_err(err)
}

#[pyfunction]
fn alpha_objective(alpha: f64) -> PyResult<f64> {
    analysis::alpha_objective(alpha).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (tol = 1e-9))]
fn optimize_alpha<'py>(py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let r = analysis::optimize_alpha(tol).map_err(err)?;
    to_py(py, &serde_json::to_value(r).expect("serialisable"))
}

#[pyfunction]
fn closed_alpha() -> f64 {
    analysis::closed_alpha()
}

#[pyfunction]
fn closed_value() -> f64 {
    analysis::closed_value()
}

#[pyfunction]
fn diagnose<'py>(py: Python<'py>, t: &PyTournament) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &diagnostics::diagnose(&t.inner, None, None))
}

#[pyfunction]
fn read_tour(path: &str) -> PyResult<Vec<PyTournament>> {
    format::read_file(path)
        .map(|v| v.into_iter().map(PyTournament::from).collect())
        .map_err(err)
}

#[pyfunction]
fn write_tour(path: &str, tournaments: Vec<PyTournament>) -> PyResult<()> {
    let ts: Vec<_> = tournaments.into_iter().map(|t| t.inner).collect();
    format::write_file(path, &ts).map_err(err)
}

#[pymodule]
fn tourney(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTournament>()?;
    m.add_function(wrap_pyfunction!(transitive, m)?)?;
    m.add_function(wrap_pyfunction!(carousel, m)?)?;
    m.add_function(wrap_pyfunction!(carousel_class, m)?)?;
    m.add_function(wrap_pyfunction!(random_tournament, m)?)?;
    m.add_function(wrap_pyfunction!(iterated_blowup, m)?)?;
    m.add_function(wrap_pyfunction!(exhaustive_max, m)?)?;
    m.add_function(wrap_pyfunction!(local_search, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_tournaments, m)?)?;
    m.add_function(wrap_pyfunction!(c4_max_formula, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_objective, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(closed_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(closed_value, m)?)?;
    m.add_function(wrap_pyfunction!(diagnose, m)?)?;
    m.add_function(wrap_pyfunction!(read_tour, m)?)?;
    m.add_function(wrap_pyfunction!(write_tour, m)?)?;
    Ok(())
}
