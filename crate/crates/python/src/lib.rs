//! Python bindings. Exact values cross the boundary as `fractions.Fraction`, reports as
//! plain dicts (with numbers rendered as strings, as in the CLI output).

use asqlab_core::certificates::{build_counterexample, refute_unit_h, verify_certificate};
use asqlab_core::constructions::{make_c0_sum, make_fkn, make_xn, BuiltSpace, SpaceSpec};
use asqlab_core::moduli::{lasq_modulus, mvee as core_mvee, john_bound_certificate, ModulusConfig, JohnBoundConfig, DenseNorm};
use asqlab_core::oracle::enumerate_oracle;
use asqlab_core::scalar::DEFAULT_REL_TOL;
use asqlab_core::witness::{component_witness, coordinate_witness as core_coordinate, pair_witness as core_pair};
use asqlab_core::{CoordVector, Error, PolyNormSpace, Rational, Scalar, SumSpace, SumVector};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;

fn err(e: Error) -> PyErr {
    if e.is_usage() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn scalar_to_py<'py, S: Scalar>(py: Python<'py>, v: &S) -> PyResult<Bound<'py, PyAny>> {
    if S::EXACT {
        py.import("fractions")?.getattr("Fraction")?.call1((v.to_report_string(),))
    } else {
        Ok(v.to_f64().into_pyobject(py)?.into_any())
    }
}

fn parse_scalar<S: Scalar>(obj: &Bound<'_, PyAny>) -> PyResult<S> {
    if !S::EXACT {
        if let Ok(x) = obj.extract::<f64>() {
            return Ok(S::from_f64_lossy(x));
        }
    }
    // Exact mode goes through str(): ints, decimal strings and Fractions all parse exactly.
    let text = obj.str()?.to_string();
    S::parse_value(&text).map_err(err)
}

/// A dict `{index: value}` (1-based) or a dense sequence.
fn parse_vector<S: Scalar>(obj: &Bound<'_, PyAny>, dim: usize) -> PyResult<CoordVector<S>> {
    let mut entries = Vec::new();
    if let Ok(d) = obj.cast::<PyDict>() {
        for (k, v) in d.iter() {
            entries.push((k.extract::<usize>()?, parse_scalar::<S>(&v)?));
        }
    } else {
        for (i, v) in obj.try_iter()?.enumerate() {
            entries.push((i + 1, parse_scalar::<S>(&v?)?));
        }
    }
    CoordVector::from_entries(dim, entries).map_err(err)
}

fn vector_to_py<'py, S: Scalar>(py: Python<'py>, v: &CoordVector<S>) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (i, x) in v.entries() {
        d.set_item(*i, scalar_to_py(py, x)?)?;
    }
    Ok(d)
}

fn parse_dense(obj: &Bound<'_, PyAny>) -> PyResult<Vec<f64>> {
    obj.try_iter()?.map(|v| v?.extract::<f64>()).collect()
}

/// A polyhedral norm on a finite truncation, or a finite direct sum of them.
#[pyclass(name = "Space", module = "asqlab", frozen)]
struct PySpace {
    inner: BuiltSpace,
}

impl PySpace {
    fn single(&self) -> PyResult<&PolyNormSpace> {
        match &self.inner {
            BuiltSpace::Single(s) => Ok(s),
            BuiltSpace::Sum(_) => Err(PyValueError::new_err("this operation needs a single space, not a sum")),
        }
    }

    fn sum(&self) -> PyResult<&SumSpace> {
        match &self.inner {
            BuiltSpace::Sum(s) => Ok(s),
            BuiltSpace::Single(_) => Err(PyValueError::new_err("this operation needs a sum space")),
        }
    }

    fn parse_sum<S: Scalar>(&self, obj: &Bound<'_, PyAny>) -> PyResult<SumVector<S>> {
        let space = self.sum()?;
        let parts: Vec<Bound<'_, PyAny>> = obj.try_iter()?.collect::<PyResult<_>>()?;
        if parts.len() != space.components.len() {
            return Err(PyValueError::new_err(format!("expected {} components, got {}", space.components.len(), parts.len())));
        }
        space.components.iter().zip(&parts).map(|(c, p)| parse_vector(p, c.dim())).collect()
    }

    fn norm_as<'py, S: Scalar>(&self, py: Python<'py>, f: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        let n: S = match &self.inner {
            BuiltSpace::Single(s) => s.norm(&parse_vector::<S>(f, s.dim())?).map_err(err)?,
            BuiltSpace::Sum(s) => s.norm(&self.parse_sum::<S>(f)?).map_err(err)?,
        };
        scalar_to_py(py, &n)
    }
}

#[pymethods]
impl PySpace {
    /// `F_{k,n}` on `{1..m}`.
    #[staticmethod]
    fn fkn(k: usize, n: usize, m: usize) -> PyResult<Self> {
        Ok(Self { inner: BuiltSpace::Single(make_fkn(k, n, m).map_err(err)?) })
    }

    /// `X_N` on `{1..m}` with parameter `k`.
    #[staticmethod]
    #[pyo3(signature = (k, big_n, m))]
    fn xn(k: usize, big_n: usize, m: usize) -> PyResult<Self> {
        Ok(Self { inner: BuiltSpace::Single(make_xn(k, big_n, m).map_err(err)?) })
    }

    /// `c0`-sum of `X_N` spaces given as `(k, N, m)` triples.
    #[staticmethod]
    fn c0_sum(specs: Vec<(usize, usize, usize)>) -> PyResult<Self> {
        Ok(Self { inner: BuiltSpace::Sum(make_c0_sum(&specs).map_err(err)?) })
    }

    /// Same JSON format as the command line `--space` flag.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let spec = SpaceSpec::parse_json(text).map_err(err)?;
        Ok(Self { inner: spec.build().map_err(err)? })
    }

    #[getter]
    fn label(&self) -> String {
        match &self.inner {
            BuiltSpace::Single(s) => s.label().to_string(),
            BuiltSpace::Sum(s) => format!("{:?}({})", s.kind, s.components.iter().map(|c| c.label()).collect::<Vec<_>>().join(", ")),
        }
    }

    /// Dimension of a single space, or the list of component dimensions of a sum.
    #[getter]
    fn dims(&self) -> Vec<usize> {
        match &self.inner {
            BuiltSpace::Single(s) => vec![s.dim()],
            BuiltSpace::Sum(s) => s.components.iter().map(|c| c.dim()).collect(),
        }
    }

    #[getter]
    fn is_sum(&self) -> bool {
        matches!(self.inner, BuiltSpace::Sum(_))
    }

    /// Closed-form norm. Sums take one vector per component.
    #[pyo3(signature = (f, exact = false))]
    fn norm<'py>(&self, py: Python<'py>, f: &Bound<'py, PyAny>, exact: bool) -> PyResult<Bound<'py, PyAny>> {
        if exact {
            self.norm_as::<Rational>(py, f)
        } else {
            self.norm_as::<f64>(py, f)
        }
    }

    /// Norm by enumerating the norming functionals touching the support of `f`.
    #[pyo3(signature = (f, exact = false))]
    fn oracle_norm<'py>(&self, py: Python<'py>, f: &Bound<'py, PyAny>, exact: bool) -> PyResult<Bound<'py, PyAny>> {
        let s = self.single()?;
        if exact {
            scalar_to_py(py, &enumerate_oracle(s, &parse_vector::<Rational>(f, s.dim())?).map_err(err)?)
        } else {
            scalar_to_py(py, &enumerate_oracle(s, &parse_vector::<f64>(f, s.dim())?).map_err(err)?)
        }
    }

    /// The unit vector with no almost-square witness in this `X_N`.
    fn counterexample<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let f: CoordVector<Rational> = build_counterexample(self.single()?).map_err(err)?;
        vector_to_py(py, &f)
    }

    fn __repr__(&self) -> String {
        format!("Space({})", self.label())
    }
}

fn finish<'py, T: Serialize>(py: Python<'py>, r: asqlab_core::Result<T>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &r.map_err(err)?)
}

/// Witness `h = k e_l` for one unit vector of `F_{k,n}`.
#[pyfunction]
#[pyo3(signature = (space, f, exact = true))]
fn coordinate_witness<'py>(py: Python<'py>, space: &PySpace, f: &Bound<'py, PyAny>, exact: bool) -> PyResult<Bound<'py, PyAny>> {
    let s = space.single()?;
    if exact {
        finish(py, core_coordinate(s, &parse_vector::<Rational>(f, s.dim())?, 0.0))
    } else {
        finish(py, core_coordinate(s, &parse_vector::<f64>(f, s.dim())?, DEFAULT_REL_TOL))
    }
}

/// Witness `h = e_l − e_m` for finitely many unit vectors of `X_N`.
#[pyfunction]
#[pyo3(signature = (space, fs, exact = true))]
fn pair_witness<'py>(py: Python<'py>, space: &PySpace, fs: &Bound<'py, PyAny>, exact: bool) -> PyResult<Bound<'py, PyAny>> {
    let s = space.single()?;
    let items: Vec<Bound<'py, PyAny>> = fs.try_iter()?.collect::<PyResult<_>>()?;
    if exact {
        let v = items.iter().map(|f| parse_vector::<Rational>(f, s.dim())).collect::<PyResult<Vec<_>>>()?;
        finish(py, core_pair(s, &v, 0.0))
    } else {
        let v = items.iter().map(|f| parse_vector::<f64>(f, s.dim())).collect::<PyResult<Vec<_>>>()?;
        finish(py, core_pair(s, &v, DEFAULT_REL_TOL))
    }
}

/// Witness in one component of a `c0`-sum, with `max ‖x_i ± h‖ ≤ 1 + eps`.
#[pyfunction]
#[pyo3(signature = (space, xs, eps, exact = true))]
fn sum_witness<'py>(
    py: Python<'py>,
    space: &PySpace,
    xs: &Bound<'py, PyAny>,
    eps: &Bound<'py, PyAny>,
    exact: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let s = space.sum()?;
    let items: Vec<Bound<'py, PyAny>> = xs.try_iter()?.collect::<PyResult<_>>()?;
    if exact {
        let v = items.iter().map(|x| space.parse_sum::<Rational>(x)).collect::<PyResult<Vec<_>>>()?;
        finish(py, component_witness(s, &v, &parse_scalar::<Rational>(eps)?, 0.0))
    } else {
        let v = items.iter().map(|x| space.parse_sum::<f64>(x)).collect::<PyResult<Vec<_>>>()?;
        finish(py, component_witness(s, &v, &parse_scalar::<f64>(eps)?, DEFAULT_REL_TOL))
    }
}

#[derive(Serialize)]
#[serde(bound(serialize = ""))]
struct Refutation<S: Scalar> {
    certificate: asqlab_core::certificates::RefutationCertificate<S>,
    check: asqlab_core::certificates::CertificateCheck<S>,
    passed: bool,
}

fn refute_as<S: Scalar>(space: &PolyNormSpace, h: &Bound<'_, PyAny>, eps: &Bound<'_, PyAny>, tol: f64) -> PyResult<Refutation<S>> {
    let f: CoordVector<S> = build_counterexample(space).map_err(err)?;
    let h = parse_vector::<S>(h, space.dim())?;
    let certificate = refute_unit_h(space, &f, &h, &parse_scalar::<S>(eps)?, tol).map_err(err)?;
    let check = verify_certificate(space, &f, &h, &certificate, tol).map_err(err)?;
    let passed = check.passed();
    Ok(Refutation { certificate, check, passed })
}

/// Certificate that the unit vector `h` fails for the counterexample of `space` at level `eps`,
/// re-checked by the enumeration oracle.
#[pyfunction]
#[pyo3(signature = (space, h, eps, exact = true))]
fn refute<'py>(py: Python<'py>, space: &PySpace, h: &Bound<'py, PyAny>, eps: &Bound<'py, PyAny>, exact: bool) -> PyResult<Bound<'py, PyAny>> {
    let s = space.single()?;
    if exact {
        to_py(py, &refute_as::<Rational>(s, h, eps, 0.0)?)
    } else {
        to_py(py, &refute_as::<f64>(s, h, eps, DEFAULT_REL_TOL)?)
    }
}

/// Estimate of `inf_h max ‖x ± h‖` over unit `h` (upper bound; a grid lower bound in dimension ≤ 3).
#[pyfunction]
#[pyo3(signature = (space, x, starts = 32, iters = 60, seed = 0, grid_res = None))]
fn modulus<'py>(
    py: Python<'py>,
    space: &PySpace,
    x: &Bound<'py, PyAny>,
    starts: usize,
    iters: usize,
    seed: u64,
    grid_res: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let s = space.single()?;
    let x = parse_dense(x)?;
    let mut cfg = ModulusConfig::new(starts, iters, seed);
    cfg.grid_res = grid_res;
    let est = py.detach(|| lasq_modulus(s, &x, &cfg)).map_err(err)?;
    to_py(py, &est)
}

/// Minimum-volume centred ellipsoid of `±points`: `{x : xᵀQx ≤ 1}`.
#[pyfunction]
#[pyo3(signature = (points, tol = 1e-7))]
fn mvee<'py>(py: Python<'py>, points: Vec<Vec<f64>>, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let res = py.detach(|| core_mvee(&points, tol)).map_err(err)?;
    let q = res.ellipsoid.q();
    let rows: Vec<Vec<f64>> = (0..q.nrows()).map(|i| (0..q.ncols()).map(|j| q[(i, j)]).collect()).collect();
    let d = PyDict::new(py);
    d.set_item("q", PyList::new(py, rows)?)?;
    d.set_item("eigenvalues", res.ellipsoid.eigenvalues())?;
    d.set_item("iterations", res.iterations)?;
    d.set_item("gap", res.gap)?;
    d.set_item("converged", res.converged)?;
    let norms: Vec<f64> = points.iter().map(|p| res.ellipsoid.norm(p)).collect();
    d.set_item("vertex_norms", norms)?;
    Ok(d)
}

/// Checks `inf_h max ‖x ± h‖ ≥ √(1 + 1/d)` at the contact point of the polytope with
/// vertices `±points` and its John ellipsoid.
#[pyfunction]
#[pyo3(signature = (points, samples = 2000, seed = 0, grid_res = None, tol = 1e-6))]
fn john_bound<'py>(
    py: Python<'py>,
    points: Vec<Vec<f64>>,
    samples: usize,
    seed: u64,
    grid_res: Option<f64>,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = JohnBoundConfig { samples, seed, grid_res, tol };
    let rep = py.detach(|| john_bound_certificate(&points, &cfg)).map_err(err)?;
    let out = to_py(py, &rep)?;
    out.set_item("passed", rep.passed())?;
    Ok(out)
}

/// Runs the command line with `args` (without the program name) and returns its exit code.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> i32 {
    let argv: Vec<String> = std::iter::once("asqlab".to_string()).chain(args).collect();
    py.detach(|| asqlab_core::cli::run(argv))
}

#[pymodule]
fn asqlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpace>()?;
    m.add_function(wrap_pyfunction!(coordinate_witness, m)?)?;
    m.add_function(wrap_pyfunction!(pair_witness, m)?)?;
    m.add_function(wrap_pyfunction!(sum_witness, m)?)?;
    m.add_function(wrap_pyfunction!(refute, m)?)?;
    m.add_function(wrap_pyfunction!(modulus, m)?)?;
    m.add_function(wrap_pyfunction!(mvee, m)?)?;
    m.add_function(wrap_pyfunction!(john_bound, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
