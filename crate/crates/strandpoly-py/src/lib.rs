//! Python bindings: a `Graph` class over the graph-file format plus
//! module-level generation and verification entry points.

use pyo3::exceptions::{PyRuntimeError, PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use strandpoly::invariant::{compute_invariant, InvariantKind};
use strandpoly::json::{parse_graph_file, AnyGraph, GraphFile, Provenance, ProvenanceStep};
use strandpoly::poly::{Basis, Polynomial};
use strandpoly::ribbon::{br_classic, br_flags, br_flags_prime};
use strandpoly::simple::{tutte_classic, tutte_flags_statesum};
use strandpoly::verify::{default_spec, run_suite, suite_names, GeneratorFamily, GeneratorSpec};
use strandpoly::Error;

fn to_py_err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Parse(_) | Error::Invalid(_) => PyValueError::new_err(msg),
        Error::FamilyMismatch(_) => PyTypeError::new_err(msg),
        Error::Internal(_) => PyRuntimeError::new_err(msg),
    }
}

fn parse_basis(basis: &str) -> PyResult<Basis> {
    match basis {
        "shifted" => Ok(Basis::Shifted),
        "standard" => Ok(Basis::Standard),
        other => Err(PyValueError::new_err(format!(
            "unknown basis {other:?} (expected \"shifted\" or \"standard\")"
        ))),
    }
}

fn json_to_py(py: Python<'_>, value: &serde_json::Value) -> PyResult<PyObject> {
    Ok(match value {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => b.into_py(py),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py(py)
            } else if let Some(u) = n.as_u64() {
                u.into_py(py)
            } else {
                n.as_f64().expect("finite JSON number").into_py(py)
            }
        }
        serde_json::Value::String(s) => s.into_py(py),
        serde_json::Value::Array(items) => {
            let list = PyList::empty_bound(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_py(py)
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new_bound(py);
            for (k, v) in map {
                dict.set_item(k, json_to_py(py, v)?)?;
            }
            dict.into_py(py)
        }
    })
}

/// Compute the named invariant in its native basis.
fn evaluate(file: &GraphFile, name: &str) -> Result<(Polynomial, Basis), Error> {
    let graph = file.to_graph()?;
    let simple_view = || match &graph {
        AnyGraph::Simple(s) => s.clone(),
        AnyGraph::Ribbon(r) => r.underlying_simple(),
        AnyGraph::Stranded(s) => s.collapsed_simple(),
    };
    let stranded_kind = |kind: InvariantKind| match &graph {
        AnyGraph::Stranded(s) => Ok((compute_invariant(s, kind)?, Basis::Shifted)),
        _ => Err(Error::FamilyMismatch(format!(
            "invariant {name} is not defined for {} graphs",
            graph.family_name()
        ))),
    };
    match name {
        "tutte" => Ok((tutte_classic(&simple_view()), Basis::Standard)),
        "tutte-flags" => Ok((tutte_flags_statesum(&simple_view()), Basis::Shifted)),
        "br" | "br-flags" | "br-flags-prime" => match &graph {
            AnyGraph::Ribbon(r) => {
                let p = match name {
                    "br" => br_classic(r)?,
                    "br-flags" => br_flags(r)?,
                    _ => br_flags_prime(r)?,
                };
                Ok((p, Basis::Shifted))
            }
            _ => Err(Error::FamilyMismatch(format!(
                "invariant {name} is not defined for {} graphs",
                graph.family_name()
            ))),
        },
        "t-frak" => stranded_kind(InvariantKind::TFrak),
        "t-prime" => stranded_kind(InvariantKind::TPrime),
        "t-second" => stranded_kind(InvariantKind::TSecond),
        "t-triple" => stranded_kind(InvariantKind::TTriple),
        "multivariate" => stranded_kind(InvariantKind::Multivariate),
        other => Err(Error::Invalid(format!(
            "unknown invariant {other:?}; known: tutte, tutte-flags, br, br-flags, \
             br-flags-prime, t-frak, t-prime, t-second, t-triple, multivariate"
        ))),
    }
}

/// A graph in any supported family, stored in the interchange format.
#[pyclass(module = "strandpoly_py")]
#[derive(Clone)]
struct Graph {
    file: GraphFile,
}

#[pymethods]
impl Graph {
    /// Parse a graph-file JSON document.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Graph> {
        Ok(Graph { file: parse_graph_file(text).map_err(to_py_err)? })
    }

    /// Load a graph file from disk.
    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Graph> {
        let file = strandpoly::json::load_graph_file(std::path::Path::new(path))
            .map_err(to_py_err)?;
        Ok(Graph { file })
    }

    /// The family tag: simple, ribbon, colored_tensor, stranded or w_colored.
    #[getter]
    fn family(&self) -> String {
        self.file.payload.family().to_string()
    }

    /// Canonical JSON rendering (deterministic; round-trips through parse).
    fn render(&self) -> String {
        self.file.render()
    }

    /// Compute an invariant, rendered as text in the requested basis.
    #[pyo3(signature = (invariant, basis = "shifted"))]
    fn invariant(&self, invariant: &str, basis: &str) -> PyResult<String> {
        let out_basis = parse_basis(basis)?;
        let (poly, native) = evaluate(&self.file, invariant).map_err(to_py_err)?;
        Ok(poly.to_basis(native, out_basis).render(out_basis))
    }

    /// Compute an invariant as a list of term dicts (coeff string, exponent map).
    #[pyo3(signature = (invariant, basis = "shifted"))]
    fn invariant_terms(
        &self,
        py: Python<'_>,
        invariant: &str,
        basis: &str,
    ) -> PyResult<PyObject> {
        let out_basis = parse_basis(basis)?;
        let (poly, native) = evaluate(&self.file, invariant).map_err(to_py_err)?;
        json_to_py(py, &poly.to_basis(native, out_basis).to_json(out_basis))
    }

    /// Edge ids, ascending.
    fn edge_ids(&self) -> PyResult<Vec<u32>> {
        Ok(match self.file.to_graph().map_err(to_py_err)? {
            AnyGraph::Simple(g) => g.edge_ids(),
            AnyGraph::Ribbon(g) => g.edge_ids(),
            AnyGraph::Stranded(g) => g.edge_ids(),
        })
    }

    /// Classification of an edge: "bridge", "regular", "self_loop" (simple);
    /// ribbon loops report twist/triviality; stranded loops report p and
    /// triviality, e.g. "self_loop(p=2, trivial)".
    fn classify_edge(&self, edge: u32) -> PyResult<String> {
        use strandpoly::ribbon::RibbonEdgeClass;
        use strandpoly::simple::EdgeClass;
        use strandpoly::stranded::StrandedEdgeClass;
        Ok(match self.file.to_graph().map_err(to_py_err)? {
            AnyGraph::Simple(g) => match g.classify_edge(edge).map_err(to_py_err)? {
                EdgeClass::Bridge => "bridge".into(),
                EdgeClass::SelfLoop => "self_loop".into(),
                EdgeClass::Regular => "regular".into(),
            },
            AnyGraph::Ribbon(g) => match g.classify_ribbon_edge(edge).map_err(to_py_err)? {
                RibbonEdgeClass::Bridge => "bridge".into(),
                RibbonEdgeClass::Regular => "regular".into(),
                RibbonEdgeClass::Loop { twisted, trivial } => format!(
                    "loop({}{})",
                    if twisted { "twisted" } else { "untwisted" },
                    if trivial { ", trivial" } else { "" }
                ),
            },
            AnyGraph::Stranded(g) => match g.classify_edge(edge).map_err(to_py_err)? {
                StrandedEdgeClass::Bridge => "bridge".into(),
                StrandedEdgeClass::Regular => "regular".into(),
                StrandedEdgeClass::SelfLoop { p, trivial, .. } => format!(
                    "self_loop(p={p}{})",
                    if trivial { ", trivial" } else { "" }
                ),
            },
        })
    }

    /// Cut an edge: remove it, leaving one new flag at each former end.
    fn cut(&self, edge: u32) -> PyResult<Graph> {
        self.apply(edge, true)
    }

    /// Contract an edge (soft contraction for stranded families).
    fn contract(&self, edge: u32) -> PyResult<Graph> {
        self.apply(edge, false)
    }

    /// Cell counts of a stranded graph as a dict (k, v, e, f_int, b_int, …).
    fn cell_counts(&self, py: Python<'_>) -> PyResult<PyObject> {
        let AnyGraph::Stranded(g) = self.file.to_graph().map_err(to_py_err)? else {
            return Err(PyTypeError::new_err(
                "cell counts are defined for stranded families only",
            ));
        };
        let c = g.cell_counts().map_err(to_py_err)?;
        let dict = PyDict::new_bound(py);
        for (key, value) in [
            ("k", c.k),
            ("v", c.v),
            ("e", c.e),
            ("f_int", c.f_int),
            ("f_ext", c.f_ext),
            ("b_int", c.b_int),
            ("b_ext", c.b_ext),
            ("c_bnd", c.c_bnd),
            ("e_bnd", c.e_bnd),
            ("f_bnd", c.f_bnd),
            ("flags", c.flags),
        ] {
            dict.set_item(key, value)?;
        }
        Ok(dict.into_py(py))
    }

    /// Expand a compact colored description to the full stranded schema.
    fn expand(&self) -> PyResult<Graph> {
        Ok(Graph { file: self.file.expand().map_err(to_py_err)? })
    }

    /// The disc-stripped canonical representative.
    fn reduce(&self) -> PyResult<Graph> {
        Ok(Graph { file: self.file.reduce().map_err(to_py_err)? })
    }

    fn __repr__(&self) -> String {
        format!("Graph(family={})", self.family())
    }
}

impl Graph {
    fn apply(&self, edge: u32, cut: bool) -> PyResult<Graph> {
        use strandpoly::json::Payload;
        // Colored families stay in their class by extending provenance.
        let provenance = match (&self.file.payload, &self.file.provenance) {
            (Payload::ColoredTensor(p), _) => {
                Some(Provenance { seed: p.clone(), steps: Vec::new() })
            }
            (Payload::WColored(_), Some(prov)) => Some(prov.clone()),
            _ => None,
        };
        if let Some(mut prov) = provenance {
            prov.steps.push(if cut {
                ProvenanceStep::Cut { edge }
            } else {
                ProvenanceStep::Contract { edge }
            });
            return Ok(Graph { file: GraphFile::from_provenance(prov).map_err(to_py_err)? });
        }
        let file = match self.file.to_graph().map_err(to_py_err)? {
            AnyGraph::Simple(g) => GraphFile::from_simple(&if cut {
                g.cut_edge(edge).map_err(to_py_err)?
            } else {
                g.contract_edge(edge).map_err(to_py_err)?
            }),
            AnyGraph::Ribbon(g) => GraphFile::from_ribbon(&if cut {
                g.cut_ribbon(edge).map_err(to_py_err)?
            } else {
                g.contract_ribbon(edge).map_err(to_py_err)?
            }),
            AnyGraph::Stranded(g) => GraphFile::from_stranded_raw(&if cut {
                g.cut(edge).map_err(to_py_err)?
            } else {
                g.contract_soft(edge).map_err(to_py_err)?
            }),
        };
        Ok(Graph { file })
    }
}

/// Generate a random graph of the given family.
#[pyfunction]
#[pyo3(signature = (family, seed, vertices = (2, 4), edges = (2, 8), flags = (0, 16)))]
fn generate(
    family: &str,
    seed: u64,
    vertices: (u32, u32),
    edges: (u32, u32),
    flags: (u32, u32),
) -> PyResult<Graph> {
    let spec = GeneratorSpec {
        family: GeneratorFamily::parse(family).map_err(to_py_err)?,
        vertices,
        edges,
        flags,
        seed,
    };
    Ok(Graph { file: strandpoly::verify::generate(&spec).map_err(to_py_err)? })
}

/// Run a verification suite; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (name, seed = 0, cases = 200, family = None))]
fn verify_suite(
    py: Python<'_>,
    name: &str,
    seed: u64,
    cases: u32,
    family: Option<&str>,
) -> PyResult<PyObject> {
    let family = family
        .map(GeneratorFamily::parse)
        .transpose()
        .map_err(to_py_err)?;
    let spec = default_spec(name, family, seed).map_err(to_py_err)?;
    let report = run_suite(name, &spec, cases).map_err(to_py_err)?;
    let value = serde_json::to_value(&report)
        .map_err(|e| PyRuntimeError::new_err(format!("report serialization: {e}")))?;
    json_to_py(py, &value)
}

/// Names of the registered verification suites, in run order.
#[pyfunction]
fn suites() -> Vec<&'static str> {
    suite_names()
}

/// The graph-file format version this module reads and writes.
#[pyfunction]
fn format_version() -> u32 {
    strandpoly::json::FORMAT_VERSION
}

#[pymodule]
fn strandpoly_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(verify_suite, m)?)?;
    m.add_function(wrap_pyfunction!(suites, m)?)?;
    m.add_function(wrap_pyfunction!(format_version, m)?)?;
    Ok(())
}
