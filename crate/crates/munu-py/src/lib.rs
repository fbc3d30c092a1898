//! Python bindings for the munu library.
//!
//! Exposes the functor grammar, chains, coalgebras, behavioral equivalence,
//! and the canonical metric and order. Build the importable module with
//!
//! ```text
//! cargo build -p munu-py --release --features extension-module
//! ```
//!
//! and rename `libmunu_py.so` to `munu_py.so` somewhere on `sys.path`
//! (`python/smoke_test.py` automates this).

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use munu_core as core;
use munu_core::{chains, demo, metric};

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn base_for(functor: &core::FunctorExpr, base: Option<&str>) -> PyResult<metric::BasePoint> {
    match base {
        None => metric::BasePoint::default_for(functor).map_err(err),
        Some(text) => metric::BasePoint::parse(functor, text).map_err(err),
    }
}

/// A finitary set functor expression, e.g. `Pf(Id)` or `C{a,b} * Id + C{stop}`.
#[pyclass(name = "Functor", skip_from_py_object)]
struct PyFunctor {
    inner: core::FunctorExpr,
}

#[pymethods]
impl PyFunctor {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyFunctor {
            inner: core::FunctorExpr::parse(text).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Functor({:?})", self.inner.render())
    }

    fn __str__(&self) -> String {
        self.inner.render()
    }

    /// Labels of F(X) for a carrier given as a list of atoms.
    fn apply_set(&self, carrier: Vec<String>) -> PyResult<Vec<String>> {
        let set = self
            .inner
            .apply_set(&core::FiniteSet::new(carrier))
            .map_err(err)?;
        Ok(set.iter().map(str::to_string).collect())
    }

    /// Stage sizes 0..=depth of the initial-algebra chain.
    fn initial_chain_sizes(&self, depth: usize) -> PyResult<Vec<usize>> {
        let chain = chains::initial_chain_default(&self.inner, depth).map_err(err)?;
        Ok(chain.stage_sizes())
    }

    /// Stage sizes 0..=depth of the terminal-coalgebra chain.
    fn terminal_chain_sizes(&self, depth: usize) -> PyResult<Vec<usize>> {
        let chain = chains::terminal_chain_default(&self.inner, depth).map_err(err)?;
        Ok(chain.stage_sizes())
    }

    /// Parse a term literal for this functor.
    fn term(&self, text: &str) -> PyResult<PyTerm> {
        Ok(PyTerm {
            functor: self.inner.clone(),
            inner: core::Term::parse(&self.inner, text).map_err(err)?,
        })
    }
}

/// A finite well-founded term, an element of the initial algebra.
#[pyclass(name = "Term", skip_from_py_object)]
struct PyTerm {
    functor: core::FunctorExpr,
    inner: core::Term,
}

#[pymethods]
impl PyTerm {
    fn __repr__(&self) -> String {
        format!("Term({:?})", self.inner.render())
    }

    fn __str__(&self) -> String {
        self.inner.render()
    }

    fn depth(&self) -> usize {
        self.inner.depth()
    }

    /// Depth-n projection into the terminal chain, as a printed stage value.
    fn truncate(&self, depth: usize) -> PyResult<String> {
        Ok(chains::u_bar_projection(&self.functor, &self.inner, depth)
            .map_err(err)?
            .render())
    }

    /// Embed into a pointed coalgebra over the distinct subterms.
    fn embed(&self) -> PyResult<(PyCoalgebra, String)> {
        let element = core::embed_term(&self.functor, &self.inner).map_err(err)?;
        Ok((
            PyCoalgebra {
                inner: element.coalgebra().clone(),
            },
            element.point().to_string(),
        ))
    }
}

/// A finite coalgebra in the textual format:
///
/// ```text
/// functor: Pf(Id)
/// states: {x, y}
/// x -> {x, y}
/// y -> {}
/// ```
#[pyclass(name = "Coalgebra", skip_from_py_object)]
struct PyCoalgebra {
    inner: core::Coalgebra,
}

impl PyCoalgebra {
    fn element(&self, state: &str) -> PyResult<core::RationalElement> {
        core::RationalElement::new(self.inner.clone(), state).map_err(err)
    }
}

#[pymethods]
impl PyCoalgebra {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyCoalgebra {
            inner: core::Coalgebra::parse(text).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Coalgebra(functor={:?}, states={})",
            self.inner.functor().render(),
            self.inner.states()
        )
    }

    fn __str__(&self) -> String {
        self.inner.render()
    }

    fn functor(&self) -> String {
        self.inner.functor().render()
    }

    fn states(&self) -> Vec<String> {
        self.inner.states().iter().map(str::to_string).collect()
    }

    fn render(&self) -> String {
        self.inner.render()
    }

    /// Printed depth-n behavior of a state.
    fn behavior(&self, state: &str, depth: usize) -> PyResult<String> {
        Ok(core::project(&self.element(state)?, depth).render())
    }

    /// Behavioral equality of a state here with a state of another coalgebra.
    fn equal(&self, state: &str, other: &PyCoalgebra, other_state: &str) -> PyResult<bool> {
        core::behaviorally_equal(&self.element(state)?, &other.element(other_state)?).map_err(err)
    }

    /// Ultrametric distance exponent: d = 2^-n returns n, distance 0 returns None.
    fn distance(
        &self,
        state: &str,
        other: &PyCoalgebra,
        other_state: &str,
    ) -> PyResult<Option<u32>> {
        let d = metric::distance(&self.element(state)?, &other.element(other_state)?)
            .map_err(err)?;
        Ok(d.exponent())
    }

    /// The blocks of the stabilized behavioral partition and the
    /// stabilization depth.
    fn partition(&self) -> (Vec<Vec<String>>, usize) {
        let (partition, depth) = core::behavioral_partition(&self.inner);
        (partition.blocks().to_vec(), depth)
    }

    /// Depth-n approximant of a state as a printed term.
    #[pyo3(signature = (state, n, base=None))]
    fn epsilon(&self, state: &str, n: usize, base: Option<&str>) -> PyResult<String> {
        let base = base_for(self.inner.functor(), base)?;
        Ok(metric::epsilon(&self.element(state)?, n, &base)
            .map_err(err)?
            .render())
    }

    /// The canonical order between a state here and one of another coalgebra.
    #[pyo3(signature = (state, other, other_state, base=None))]
    fn leq(
        &self,
        state: &str,
        other: &PyCoalgebra,
        other_state: &str,
        base: Option<&str>,
    ) -> PyResult<bool> {
        let base = base_for(self.inner.functor(), base)?;
        metric::leq(&self.element(state)?, &other.element(other_state)?, &base).map_err(err)
    }

    /// Minimize the reachable part from a state; returns the quotient
    /// coalgebra and its point.
    fn minimize(&self, state: &str) -> PyResult<(PyCoalgebra, String)> {
        let m = core::minimize(&self.element(state)?).map_err(err)?;
        Ok((
            PyCoalgebra {
                inner: m.coalgebra().clone(),
            },
            m.point().to_string(),
        ))
    }
}

/// Run a named demo; returns (passed, report_json).
#[pyfunction]
#[pyo3(signature = (name, params=None))]
fn run_demo(name: &str, params: Option<BTreeMap<String, String>>) -> PyResult<(bool, String)> {
    let report = demo::run_demo(name, &params.unwrap_or_default()).map_err(err)?;
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((report.passed(), json))
}

#[pymodule]
fn munu_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFunctor>()?;
    m.add_class::<PyTerm>()?;
    m.add_class::<PyCoalgebra>()?;
    m.add_function(wrap_pyfunction!(run_demo, m)?)?;
    Ok(())
}
