//! Python bindings: processes, alphabets, checks by either method,
//! rewriting and closure inspection.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use seedcheck::corpus::{self, CorpusConfig, Summary};
use seedcheck::library;
use seedcheck::oracle::{BisimKind, OracleConfig};
use seedcheck::process::{self as proc_, Calculus, DefEnv};
use seedcheck::report::{self, Method};
use seedcheck::rewrite;
use seedcheck::seed::{self, SeedAlgebra, SeedConfig};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(frozen)]
struct Alphabet {
    inner: proc_::Alphabet,
}

#[pymethods]
impl Alphabet {
    /// `Alphabet("names=a,b,u channels=c,d")`; no argument gives that default.
    #[new]
    #[pyo3(signature = (spec=None))]
    fn new(spec: Option<&str>) -> PyResult<Self> {
        let inner = match spec {
            Some(s) => proc_::Alphabet::parse(s).map_err(value_err)?,
            None => proc_::Alphabet::default(),
        };
        Ok(Alphabet { inner })
    }

    #[getter]
    fn names(&self) -> Vec<String> {
        self.inner.names.iter().map(|s| s.to_string()).collect()
    }

    #[getter]
    fn channels(&self) -> Vec<String> {
        self.inner.channels.iter().map(|s| s.to_string()).collect()
    }

    #[getter]
    fn fresh(&self) -> String {
        self.inner.fresh.to_string()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

#[pyclass(frozen)]
struct Process {
    inner: proc_::Process,
    env: DefEnv,
    calculus: Calculus,
    alpha: proc_::Alphabet,
}

#[pymethods]
impl Process {
    /// Parses value-passing syntax, falling back to the basic calculus.
    /// A first line `def rp = ...` defines the recursion body.
    #[new]
    #[pyo3(signature = (text, alphabet=None))]
    fn new(text: &str, alphabet: Option<&Alphabet>) -> PyResult<Self> {
        let alpha = alphabet.map_or_else(proc_::Alphabet::default, |a| a.inner.clone());
        let mut err = None;
        for calculus in [Calculus::ValuePassing, Calculus::Basic] {
            match proc_::parse_process(text, calculus, &alpha) {
                Ok((inner, env)) => {
                    return Ok(Process {
                        inner,
                        env,
                        calculus,
                        alpha,
                    })
                }
                Err(e) => {
                    err.get_or_insert(e);
                }
            }
        }
        Err(value_err(err.expect("a calculus was tried")))
    }

    /// Constructor term of the process.
    fn encode(&self) -> String {
        proc_::encode(&self.inner).to_string()
    }

    /// Early transitions as (label, target) pairs.
    fn transitions(&self) -> PyResult<Vec<(String, String)>> {
        let v = seedcheck::lts::transitions(
            &self.inner,
            &self.env,
            seedcheck::lts::Semantics::Early,
            &self.alpha,
        )
        .map_err(value_err)?;
        Ok(v.into_iter()
            .map(|(a, p)| (a.to_string(), p.to_string()))
            .collect())
    }

    fn __str__(&self) -> String {
        proc_::print_with_env(&self.inner, &self.env)
    }

    fn __repr__(&self) -> String {
        format!("Process({:?})", self.__str__())
    }
}

#[pyclass(frozen)]
struct Report {
    inner: report::Report,
}

#[pymethods]
impl Report {
    #[getter]
    fn exit_code(&self) -> i32 {
        self.inner.exit_code
    }

    #[getter]
    fn agreement(&self) -> Option<bool> {
        self.inner.agreement
    }

    /// Verdict of the first method that ran, None on overflow or error.
    #[getter]
    fn equivalent(&self) -> Option<bool> {
        self.inner
            .oracle
            .as_ref()
            .or(self.inner.seed.as_ref())
            .and_then(|r| r.outcome.as_bool())
    }

    #[getter]
    fn oracle_equivalent(&self) -> Option<bool> {
        self.inner.oracle.as_ref().and_then(|r| r.outcome.as_bool())
    }

    #[getter]
    fn seed_equivalent(&self) -> Option<bool> {
        self.inner.seed.as_ref().and_then(|r| r.outcome.as_bool())
    }

    fn to_json(&self) -> String {
        self.inner.to_machine()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Report> {
        report::Report::from_machine(text)
            .map(|inner| Report { inner })
            .map_err(value_err)
    }

    fn __str__(&self) -> String {
        self.inner.to_text()
    }
}

fn parse_kind(kind: &str) -> PyResult<BisimKind> {
    kind.parse().map_err(value_err)
}

/// Decides `kind` for two processes; method is "oracle", "seed" or "both".
#[pyfunction]
#[pyo3(signature = (kind, p, q, method="both", state_limit=None, fuel=None))]
fn check(
    kind: &str,
    p: &Process,
    q: &Process,
    method: &str,
    state_limit: Option<usize>,
    fuel: Option<u64>,
) -> PyResult<Report> {
    let kind = parse_kind(kind)?;
    let method: Method = method.parse().map_err(PyValueError::new_err)?;
    if p.alpha != q.alpha || p.calculus != q.calculus {
        return Err(PyValueError::new_err(
            "processes use different alphabets or calculi",
        ));
    }
    if p.env != q.env && p.env.body.is_some() && q.env.body.is_some() {
        return Err(PyValueError::new_err(
            "processes carry different definitions of rp",
        ));
    }
    let env = if p.env.body.is_some() { &p.env } else { &q.env };
    let mut ocfg = OracleConfig::default();
    if let Some(n) = state_limit {
        ocfg.state_limit = n;
    }
    let mut scfg = SeedConfig::default();
    if let Some(f) = fuel {
        scfg.fuel = f;
    }
    let inner = report::run_check(
        kind, &p.inner, &q.inner, env, &p.alpha, p.calculus, method, ocfg, scfg, false,
    );
    Ok(Report { inner })
}

/// Normalizes a term in a bundled layer; returns the derivation lines.
#[pyfunction]
#[pyo3(signature = (layer, term, alphabet=None))]
fn rewrite_term(layer: &str, term: &str, alphabet: Option<&Alphabet>) -> PyResult<Vec<String>> {
    let alpha = alphabet.map_or_else(proc_::Alphabet::default, |a| a.inner.clone());
    let sig = library::get_layer(layer, &alpha).map_err(value_err)?;
    let t = sig.parse_term(term).map_err(value_err)?;
    let chain = rewrite::normalize(&t, &sig, rewrite::DEFAULT_FUEL)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(chain
        .grouped_lines(&sig)
        .iter()
        .map(|l| l.to_string())
        .collect())
}

/// Closure tree of a process seed in a layer, one line per closure.
#[pyfunction]
#[pyo3(signature = (layer, p, depth=2, label="q"))]
fn closures(layer: &str, p: &Process, depth: usize, label: &str) -> PyResult<Vec<String>> {
    let sig = library::get_layer(layer, &p.alpha).map_err(value_err)?;
    let s = seed::make_seed(&p.inner, &p.env, &sig).map_err(value_err)?;
    let mut alg =
        SeedAlgebra::for_seed(&sig, &p.alpha, &s, SeedConfig::default()).map_err(value_err)?;
    alg.closure_tree(&s.term, label, depth)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pyfunction]
fn layers() -> Vec<String> {
    library::layer_names()
        .into_iter()
        .map(String::from)
        .collect()
}

/// Hierarchy edges as (weaker, stronger) kind names.
#[pyfunction]
fn hierarchy_edges() -> Vec<(String, String)> {
    library::hierarchy()
        .edges
        .iter()
        .map(|(w, s)| (w.to_string(), s.to_string()))
        .collect()
}

/// Runs a generated corpus by both methods; returns the summary as JSON.
#[pyfunction]
#[pyo3(signature = (pairs=20, seed_value=1, named=true))]
fn run_corpus(py: Python<'_>, pairs: usize, seed_value: u64, named: bool) -> String {
    let cfg = CorpusConfig {
        pairs,
        seed_value,
        ..CorpusConfig::default()
    };
    py.detach(|| {
        let mut entries = if named {
            corpus::named_pairs()
        } else {
            Vec::new()
        };
        entries.extend(corpus::generate(&cfg));
        let outcomes = corpus::run_all(&entries, OracleConfig::default(), SeedConfig::default());
        serde_json::to_string(&Summary::of(&outcomes)).expect("summary serializes")
    })
}

#[pymodule]
fn seedcheck_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Alphabet>()?;
    m.add_class::<Process>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(rewrite_term, m)?)?;
    m.add_function(wrap_pyfunction!(closures, m)?)?;
    m.add_function(wrap_pyfunction!(layers, m)?)?;
    m.add_function(wrap_pyfunction!(hierarchy_edges, m)?)?;
    m.add_function(wrap_pyfunction!(run_corpus, m)?)?;
    Ok(())
}
