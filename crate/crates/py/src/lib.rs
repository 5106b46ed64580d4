//! Python bindings for mwlab.
//!
//! Points are exchanged as strings in the same syntax the command line uses
//! (`-3/4` for ℚ*, `(x,y)` or `O` for curve points). Reports come back as
//! `(exit_code, dict)` pairs where the dict is the JSON report.

use mwlab_cli::{parse_args, run as run_config};
use mwlab_core::mwgroup::good_prime;
use mwlab_core::{Backend, MordellWeil, Reduction};
use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A Mordell-Weil type group: `mult`, `S={2,3}` or `ec:a1,a2,a3,a4,a6`.
#[pyclass(name = "Group", frozen)]
struct PyGroup {
    backend: Backend,
}

macro_rules! with_group {
    ($self:expr, $g:ident => $body:expr) => {
        match &$self.backend {
            Backend::Multiplicative($g) => $body,
            Backend::Elliptic($g) => $body,
        }
    };
}

fn parse_points<G: MordellWeil>(g: &G, items: &[String]) -> PyResult<Vec<G::Point>> {
    items
        .iter()
        .map(|s| g.parse_point(s).map_err(value_error))
        .collect()
}

#[pymethods]
impl PyGroup {
    #[new]
    #[pyo3(signature = (backend = "mult"))]
    fn new(backend: &str) -> PyResult<Self> {
        Ok(PyGroup {
            backend: backend.parse().map_err(value_error)?,
        })
    }

    /// Canonical string form of a point.
    fn parse(&self, point: &str) -> PyResult<String> {
        with_group!(self, g => Ok(g.parse_point(point).map_err(value_error)?.to_string()))
    }

    fn add(&self, a: &str, b: &str) -> PyResult<String> {
        with_group!(self, g => {
            let (a, b) = (g.parse_point(a).map_err(value_error)?, g.parse_point(b).map_err(value_error)?);
            Ok(g.add(&a, &b).to_string())
        })
    }

    fn mul(&self, point: &str, n: i64) -> PyResult<String> {
        with_group!(self, g => {
            let p = g.parse_point(point).map_err(value_error)?;
            Ok(g.scalar_mul(&p, &BigInt::from(n)).to_string())
        })
    }

    fn torsion(&self) -> Vec<String> {
        with_group!(self, g => g.torsion_elements().iter().map(ToString::to_string).collect())
    }

    /// Whether `v` is a good prime for the group and every given point.
    fn good_prime(&self, points: Vec<String>, v: u64) -> PyResult<bool> {
        with_group!(self, g => Ok(good_prime(g, &parse_points(g, &points)?, v)))
    }

    /// `|B(F_v)|` at a prime of good reduction.
    fn group_order(&self, v: u64) -> PyResult<u64> {
        with_group!(self, g => Ok(Reduction::at(g, v).map_err(value_error)?.group_order()))
    }

    /// `ord_v` of a point.
    fn order_mod(&self, point: &str, v: u64) -> PyResult<u64> {
        with_group!(self, g => {
            let p = g.parse_point(point).map_err(value_error)?;
            Reduction::at(g, v).and_then(|r| r.order_mod(&p)).map_err(value_error)
        })
    }

    /// Whether the reduction of `point` lies in the subgroup generated by the
    /// reductions of `gens` at `v`.
    fn member_mod(&self, point: &str, gens: Vec<String>, v: u64) -> PyResult<bool> {
        with_group!(self, g => {
            let p = g.parse_point(point).map_err(value_error)?;
            let gens = parse_points(g, &gens)?;
            mwlab_core::dependence::member_mod(g, &p, &gens, v).map_err(value_error)
        })
    }

    fn __repr__(&self) -> String {
        format!("Group('{}')", self.backend)
    }
}

/// Runs a command line, without the program name, and returns the exit code
/// together with the report text.
#[pyfunction]
fn run(args: Vec<String>) -> PyResult<(i32, String)> {
    let cfg = parse_args(&args).map_err(|e| value_error(e.message))?;
    let out = run_config(&cfg);
    Ok((out.exit_code, out.report))
}

struct Common<'a> {
    backend: &'a str,
    primes: Option<(u64, u64)>,
    workers: Option<usize>,
}

impl Common<'_> {
    fn push(&self, args: &mut Vec<String>) {
        args.extend([
            "--backend".into(),
            self.backend.into(),
            "--format".into(),
            "json".into(),
        ]);
        if let Some((lo, hi)) = self.primes {
            args.extend(["--primes".into(), format!("{lo}..{hi}")]);
        }
        if let Some(w) = self.workers {
            args.extend(["--workers".into(), w.to_string()]);
        }
    }
}

fn run_json(
    py: Python<'_>,
    mut args: Vec<String>,
    common: Common<'_>,
) -> PyResult<(i32, Py<PyAny>)> {
    common.push(&mut args);
    let (code, report) = py.detach(|| run(args))?;
    let parsed = py.import("json")?.call_method1("loads", (report,))?;
    Ok((code, parsed.unbind()))
}

fn list(items: &[String]) -> String {
    items.join(";")
}

/// Scans a support condition: `erdos`, `cor22` or `thm2` (single `xs` point).
#[pyfunction]
#[pyo3(signature = (xs, ys, condition = "erdos", backend = "mult", primes = None, workers = None))]
fn support_check(
    py: Python<'_>,
    xs: Vec<String>,
    ys: Vec<String>,
    condition: &str,
    backend: &str,
    primes: Option<(u64, u64)>,
    workers: Option<usize>,
) -> PyResult<(i32, Py<PyAny>)> {
    let args = vec![
        "support-check".into(),
        "--condition".into(),
        condition.into(),
        "--xs".into(),
        list(&xs),
        "--ys".into(),
        list(&ys),
    ];
    run_json(
        py,
        args,
        Common {
            backend,
            primes,
            workers,
        },
    )
}

/// Scans `ord_v y | ord_v x` over the prime range.
#[pyfunction]
#[pyo3(signature = (x, y, backend = "mult", primes = None, workers = None))]
fn cs_check(
    py: Python<'_>,
    x: String,
    y: String,
    backend: &str,
    primes: Option<(u64, u64)>,
    workers: Option<usize>,
) -> PyResult<(i32, Py<PyAny>)> {
    let args = vec!["cs-check".into(), "--x".into(), x, "--y".into(), y];
    run_json(
        py,
        args,
        Common {
            backend,
            primes,
            workers,
        },
    )
}

/// Primes realizing the valuation pattern `ks` at `l` on the given points.
#[pyfunction]
#[pyo3(signature = (points, l, ks, max_hits = 10, backend = "mult", primes = None, workers = None))]
#[allow(clippy::too_many_arguments)]
fn find_primes(
    py: Python<'_>,
    points: Vec<String>,
    l: u64,
    ks: Vec<u32>,
    max_hits: usize,
    backend: &str,
    primes: Option<(u64, u64)>,
    workers: Option<usize>,
) -> PyResult<(i32, Py<PyAny>)> {
    let ks: Vec<String> = ks.iter().map(ToString::to_string).collect();
    let args = vec![
        "find-primes".into(),
        "--points".into(),
        list(&points),
        "--l".into(),
        l.to_string(),
        "--ks".into(),
        ks.join(","),
        "--max-hits".into(),
        max_hits.to_string(),
    ];
    run_json(
        py,
        args,
        Common {
            backend,
            primes,
            workers,
        },
    )
}

/// Searches for a prime `v` and `n = ord_v P` with `nP ≡ 0` but `nQᵢ ≢ 0`.
#[pyfunction]
#[pyo3(signature = (p, qs, l, backend = "mult", primes = None, workers = None))]
fn replay(
    py: Python<'_>,
    p: String,
    qs: Vec<String>,
    l: u64,
    backend: &str,
    primes: Option<(u64, u64)>,
    workers: Option<usize>,
) -> PyResult<(i32, Py<PyAny>)> {
    let args = vec![
        "replay".into(),
        "--p".into(),
        p,
        "--qs".into(),
        list(&qs),
        "--l".into(),
        l.to_string(),
    ];
    run_json(
        py,
        args,
        Common {
            backend,
            primes,
            workers,
        },
    )
}

/// Detects whether the points lie in the span of `lam`, with an exact
/// certificate search when the scan finds no obstruction.
#[pyfunction]
#[pyo3(signature = (points, lam, bound = 20, backend = "mult", primes = None, workers = None))]
fn detect(
    py: Python<'_>,
    points: Vec<String>,
    lam: Vec<String>,
    bound: u64,
    backend: &str,
    primes: Option<(u64, u64)>,
    workers: Option<usize>,
) -> PyResult<(i32, Py<PyAny>)> {
    let args = vec![
        "detect".into(),
        "--points".into(),
        list(&points),
        "--lambda".into(),
        list(&lam),
        "--bound".into(),
        bound.to_string(),
    ];
    run_json(
        py,
        args,
        Common {
            backend,
            primes,
            workers,
        },
    )
}

/// Recovers `d` with `Q = dP` by discrete logarithms and CRT.
#[pyfunction]
#[pyo3(signature = (p, q, backend = "mult", primes = None))]
fn recover(
    py: Python<'_>,
    p: String,
    q: String,
    backend: &str,
    primes: Option<(u64, u64)>,
) -> PyResult<(i32, Py<PyAny>)> {
    let args = vec!["recover".into(), "--p".into(), p, "--q".into(), q];
    run_json(
        py,
        args,
        Common {
            backend,
            primes,
            workers: None,
        },
    )
}

/// Runs a seeded experiment suite.
#[pyfunction]
#[pyo3(signature = (suite, trials, seed = 0, primes = None, workers = None))]
fn experiment(
    py: Python<'_>,
    suite: &str,
    trials: u32,
    seed: u64,
    primes: Option<(u64, u64)>,
    workers: Option<usize>,
) -> PyResult<(i32, Py<PyAny>)> {
    let args = vec![
        "experiment".into(),
        "--suite".into(),
        suite.into(),
        "--trials".into(),
        trials.to_string(),
        "--seed".into(),
        seed.to_string(),
    ];
    run_json(
        py,
        args,
        Common {
            backend: "mult",
            primes,
            workers,
        },
    )
}

#[pymodule]
#[pyo3(name = "mwlab")]
fn mwlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroup>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(support_check, m)?)?;
    m.add_function(wrap_pyfunction!(cs_check, m)?)?;
    m.add_function(wrap_pyfunction!(find_primes, m)?)?;
    m.add_function(wrap_pyfunction!(replay, m)?)?;
    m.add_function(wrap_pyfunction!(detect, m)?)?;
    m.add_function(wrap_pyfunction!(recover, m)?)?;
    m.add_function(wrap_pyfunction!(experiment, m)?)?;
    m.add("EXIT_OK", mwlab_cli::EXIT_OK)?;
    m.add("EXIT_VIOLATED", mwlab_cli::EXIT_VIOLATED)?;
    m.add("EXIT_INCONCLUSIVE", mwlab_cli::EXIT_INCONCLUSIVE)?;
    Ok(())
}
