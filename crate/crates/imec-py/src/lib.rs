use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

use imec::distribution::{self, InterventionalSetting, SamplingOptions};
use imec::equivalence::{self, EquivalenceVerdict, Method};
use imec::graph_core::{classify, MixedGraph};
use imec::intervention::{self, TargetMultiset};
use imec::{admg_factor, maximality, resources, separation, VSet};

fn err(e: imec::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py(py: Python<'_>, v: &Value) -> PyObject {
    match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_py(py),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_py(py),
            None => n.as_f64().unwrap_or(f64::NAN).into_py(py),
        },
        Value::String(s) => s.into_py(py),
        Value::Array(xs) => PyList::new_bound(py, xs.iter().map(|x| to_py(py, x))).into_py(py),
        Value::Object(m) => {
            let d = PyDict::new_bound(py);
            for (k, x) in m {
                d.set_item(k, to_py(py, x)).expect("dict insert");
            }
            d.into_py(py)
        }
    }
}

fn verdict(py: Python<'_>, v: EquivalenceVerdict) -> PyResult<PyObject> {
    let value = serde_json::to_value(&v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(to_py(py, &value))
}

fn method(name: &str) -> PyResult<Method> {
    match name {
        "brute" => Ok(Method::Brute),
        "graphical" => Ok(Method::Graphical),
        "both" => Ok(Method::Both),
        _ => Err(PyValueError::new_err(format!(
            "unknown method {name}; use brute, graphical or both"
        ))),
    }
}

/// Mixed graph with undirected, directed and bidirected edges.
#[pyclass(name = "Graph")]
#[derive(Clone)]
struct PyGraph {
    g: MixedGraph,
}

impl PyGraph {
    fn set(&self, labels: Vec<String>) -> PyResult<VSet> {
        labels
            .iter()
            .map(|l| self.g.find_or_err(l).map_err(err))
            .collect()
    }

    fn labels_of(&self, s: VSet) -> Vec<String> {
        s.iter().map(|v| self.g.label(v).to_string()).collect()
    }

    fn targets(&self, targets: Vec<Vec<String>>) -> PyResult<TargetMultiset> {
        let t = targets
            .into_iter()
            .map(|t| self.set(t))
            .collect::<PyResult<Vec<_>>>()?;
        let t = TargetMultiset::new(t);
        t.check(&self.g).map_err(err)?;
        Ok(t)
    }
}

#[pymethods]
impl PyGraph {
    /// Parses the `nodes:` / `edge:` text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<PyGraph> {
        Ok(PyGraph {
            g: MixedGraph::parse(text).map_err(err)?,
        })
    }

    /// Embedded figure graph, e.g. `fig2-g`.
    #[staticmethod]
    fn figure(name: &str) -> PyResult<PyGraph> {
        Ok(PyGraph {
            g: resources::graph(name).map_err(err)?,
        })
    }

    fn to_text(&self) -> String {
        self.g.to_text()
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph({} vertices, {} edges)",
            self.g.n(),
            self.g.edge_count()
        )
    }

    fn __eq__(&self, other: &PyGraph) -> bool {
        self.g == other.g
    }

    fn labels(&self) -> Vec<String> {
        self.g.vertices().iter().map(|v| v.label.clone()).collect()
    }

    fn edges(&self) -> Vec<String> {
        self.g
            .edges()
            .iter()
            .map(|e| self.g.render_edge(e))
            .collect()
    }

    fn classify(&self) -> Vec<String> {
        classify(&self.g).iter().map(|c| c.to_string()).collect()
    }

    #[pyo3(signature = (a, b, c = Vec::new()))]
    fn m_separated(&self, a: Vec<String>, b: Vec<String>, c: Vec<String>) -> PyResult<bool> {
        separation::m_separated(&self.g, self.set(a)?, self.set(b)?, self.set(c)?).map_err(err)
    }

    /// Elementary statements `i _||_ j | C` of J(G).
    fn independence_model(&self) -> PyResult<Vec<String>> {
        let m = separation::independence_model(&self.g, None).map_err(err)?;
        Ok(m.triples().iter().map(|t| m.render(t)).collect())
    }

    fn interventional_graph(&self, targets: Vec<Vec<String>>) -> PyResult<PyGraph> {
        let t = self.targets(targets)?;
        Ok(PyGraph {
            g: intervention::interventional_graph(&self.g, &t).map_err(err)?,
        })
    }

    fn perfect_intervention(&self, target: Vec<String>) -> PyResult<PyGraph> {
        Ok(PyGraph {
            g: intervention::perfect_intervention(&self.g, self.set(target)?).map_err(err)?,
        })
    }

    fn maximal_completion(&self) -> PyResult<PyGraph> {
        Ok(PyGraph {
            g: maximality::maximal_completion(&self.g).map_err(err)?,
        })
    }

    fn anterior_graph(&self) -> PyGraph {
        PyGraph {
            g: maximality::anterior_graph(&self.g),
        }
    }

    fn latent_projection(&self, observed: Vec<String>) -> PyResult<PyGraph> {
        Ok(PyGraph {
            g: admg_factor::latent_projection(&self.g, self.set(observed)?).map_err(err)?,
        })
    }

    /// `(dag, latent labels)`.
    fn canonical_dag(&self) -> PyResult<(PyGraph, Vec<String>)> {
        let (d, l) = admg_factor::canonical_dag(&self.g).map_err(err)?;
        let labels = l.iter().map(|v| d.label(v).to_string()).collect();
        Ok((PyGraph { g: d }, labels))
    }

    /// `[((i, j, k), order)]` for each collider with order.
    fn colliders_with_order(&self) -> Vec<((String, String, String), usize)> {
        equivalence::colliders_with_order(&self.g)
            .iter()
            .map(|c| {
                let (i, j, k) = c.triple;
                let l = |v| self.g.label(v).to_string();
                ((l(i), l(j), l(k)), c.order)
            })
            .collect()
    }

    /// `[(head, tail)]` of an ancestrally closed set.
    fn heads(&self, a: Vec<String>) -> PyResult<Vec<(Vec<String>, Vec<String>)>> {
        let hp = admg_factor::head_partition(&self.g, self.set(a)?).map_err(err)?;
        Ok(hp
            .heads
            .iter()
            .map(|&(h, t)| (self.labels_of(h), self.labels_of(t)))
            .collect())
    }
}

#[pyfunction]
#[pyo3(signature = (g, h, method = "both"))]
fn markov_equivalent(py: Python<'_>, g: &PyGraph, h: &PyGraph, method: &str) -> PyResult<PyObject> {
    verdict(
        py,
        equivalence::markov_equivalent(&g.g, &h.g, self::method(method)?).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (g, h, targets, method = "both"))]
fn i_markov_equivalent(
    py: Python<'_>,
    g: &PyGraph,
    h: &PyGraph,
    targets: Vec<Vec<String>>,
    method: &str,
) -> PyResult<PyObject> {
    let t = g.targets(targets)?;
    verdict(
        py,
        equivalence::i_markov_equivalent(&g.g, &h.g, &t, self::method(method)?).map_err(err)?,
    )
}

#[pyfunction]
fn controlled_i_markov_equivalent(
    py: Python<'_>,
    g: &PyGraph,
    h: &PyGraph,
    targets: Vec<Vec<String>>,
) -> PyResult<PyObject> {
    let t = g.targets(targets)?;
    verdict(
        py,
        equivalence::controlled_i_markov_equivalent(&g.g, &h.g, &t).map_err(err)?,
    )
}

/// Interventional setting: one joint table per target occurrence.
#[pyclass(name = "Setting")]
struct PySetting {
    s: InterventionalSetting,
}

#[pymethods]
impl PySetting {
    fn tables(&self) -> Vec<Vec<f64>> {
        self.s.tables.iter().map(|t| t.probs().to_vec()).collect()
    }

    fn __len__(&self) -> usize {
        self.s.tables.len()
    }

    #[pyo3(signature = (g, tol = distribution::DEFAULT_TOL))]
    fn in_mi_factorization(&self, g: &PyGraph, tol: f64) -> PyResult<bool> {
        Ok(distribution::in_mi_factorization(&self.s, &g.g, tol)
            .map_err(err)?
            .passed)
    }

    /// Head factors compared only when their district in `an(H)` avoids both targets.
    #[pyo3(signature = (g, tol = distribution::DEFAULT_TOL))]
    fn in_mi_district_factorization(&self, g: &PyGraph, tol: f64) -> PyResult<bool> {
        Ok(
            distribution::in_mi_district_factorization(&self.s, &g.g, tol)
                .map_err(err)?
                .passed,
        )
    }

    #[pyo3(signature = (g, tol = distribution::DEFAULT_TOL))]
    fn imarkov_property(&self, g: &PyGraph, tol: f64) -> PyResult<bool> {
        Ok(distribution::imarkov_property_check(&self.s, &g.g, tol)
            .map_err(err)?
            .passed)
    }

    #[pyo3(signature = (g, tol = distribution::DEFAULT_TOL))]
    fn controlled_imarkov_property(&self, g: &PyGraph, tol: f64) -> PyResult<bool> {
        Ok(distribution::controlled_imarkov_check(&self.s, &g.g, tol)
            .map_err(err)?
            .passed)
    }
}

#[pyfunction]
#[pyo3(signature = (g, targets, seed = 0, shared = false))]
fn sample_setting(
    g: &PyGraph,
    targets: Vec<Vec<String>>,
    seed: u64,
    shared: bool,
) -> PyResult<PySetting> {
    let t = g.targets(targets)?;
    let s = distribution::sample_interventional_setting(
        &g.g,
        &t,
        seed,
        SamplingOptions {
            shared,
            extra: None,
        },
    )
    .map_err(err)?;
    Ok(PySetting { s })
}

/// `(passed, report text)` for an embedded figure reproduction.
#[pyfunction]
fn reproduce(fig: &str) -> PyResult<(bool, String)> {
    let r = resources::reproduce(fig).map_err(err)?;
    Ok((r.passed(), r.to_text()))
}

#[pymodule]
fn pyimec(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PySetting>()?;
    m.add_function(wrap_pyfunction!(markov_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(i_markov_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(controlled_i_markov_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(sample_setting, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce, m)?)?;
    Ok(())
}
