//! Python bindings. Vectors are lists of floats and matrices are lists of
//! rows; reports come back as dictionaries.

use ::conewise::cover::canonicalize;
use ::conewise::demos::{self, DemoConfig};
use ::conewise::io;
use ::conewise::norms::{regular_norm, NormSpec};
use ::conewise::operators::{self as ops, LinOp};
use ::conewise::order::{self, OrderedSpace};
use ::conewise::semigroups::{self as sg, Semigroup, YosidaParams};
use ::conewise::{catalog, Error, LatticeCover, Truth};
use nalgebra::{DMatrix, DVector};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Singular(_) | Error::Overflow { .. } | Error::Numerical(_) | Error::Invariant(_) => {
            PyArithmeticError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn matrix(rows: &[Vec<f64>]) -> PyResult<DMatrix<f64>> {
    ::conewise::linalg::from_rows(rows).map_err(to_py_err)
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    ::conewise::linalg::to_rows(m)
}

fn vector(v: Vec<f64>) -> DVector<f64> {
    DVector::from_vec(v)
}

fn truth(t: Truth) -> Option<bool> {
    match t {
        Truth::True => Some(true),
        Truth::False => Some(false),
        Truth::Undecided => None,
    }
}

/// Serializes through JSON into plain Python objects.
fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// An ordered space `{x : Φx >= 0}`. Construction certifies the lattice
/// cover, so every predicate is available.
#[pyclass(name = "Space", module = "conewise", frozen)]
pub struct PySpace {
    cover: LatticeCover,
}

impl PySpace {
    fn space(&self) -> &OrderedSpace {
        self.cover.space()
    }

    fn from_space(space: OrderedSpace) -> PyResult<Self> {
        Ok(Self {
            cover: canonicalize(&space).map_err(to_py_err)?,
        })
    }
}

#[pymethods]
impl PySpace {
    /// Space from dual functionals, one row per functional.
    #[new]
    #[pyo3(signature = (dual_rays, name = String::new()))]
    fn new(dual_rays: Vec<Vec<f64>>, name: String) -> PyResult<Self> {
        let space = OrderedSpace::new(matrix(&dual_rays)?).map_err(to_py_err)?;
        Self::from_space(space.with_name(name))
    }

    /// Space from a JSON document `{"dim", "dual_rays", "name"}`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Self::from_space(io::parse_space(text).map_err(to_py_err)?)
    }

    /// The standard lattice `ℝ^n`.
    #[staticmethod]
    fn standard(n: usize) -> PyResult<Self> {
        Self::from_space(catalog::standard(n))
    }

    #[staticmethod]
    fn four_ray() -> PyResult<Self> {
        Self::from_space(catalog::four_ray())
    }

    /// Cone in `ℝ³` over a regular `k`-gon.
    #[staticmethod]
    fn polygon(k: usize) -> PyResult<Self> {
        if k < 3 {
            return Err(PyValueError::new_err("a polygon needs at least 3 sides"));
        }
        Self::from_space(catalog::polygon(k))
    }

    #[getter]
    fn name(&self) -> String {
        self.space().name().to_string()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.space().dim()
    }

    /// Canonical dual functionals after redundant rows are removed.
    #[getter]
    fn dual_rays(&self) -> Vec<Vec<f64>> {
        rows(self.space().phi())
    }

    fn to_json(&self) -> String {
        io::space_to_json(self.space())
    }

    fn contains(&self, x: Vec<f64>) -> PyResult<bool> {
        let x = vector(x);
        self.space().check_vec(&x).map_err(to_py_err)?;
        Ok(self.space().contains(&x))
    }

    /// Cover coordinates `Φx`.
    fn embed(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.cover.embed(&vector(x)).map_err(to_py_err)?.iter().copied().collect())
    }

    /// Disjointness through the lattice cover.
    fn is_disjoint(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<bool> {
        order::is_disjoint(self.space(), &vector(x), &vector(y)).map_err(to_py_err)
    }

    /// Disjointness from the upper-bound definition; `None` when undecided.
    fn is_disjoint_oracle(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<Option<bool>> {
        let v = order::is_disjoint_oracle(self.space(), &vector(x), &vector(y)).map_err(to_py_err)?;
        Ok(truth(v.truth))
    }

    /// Basis of the disjoint complement of a set of vectors, as columns
    /// listed one per entry.
    fn disjoint_complement(&self, vectors: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        let vs: Vec<DVector<f64>> = vectors.into_iter().map(vector).collect();
        let band = order::disjoint_complement(self.space(), &vs).map_err(to_py_err)?;
        Ok(band
            .basis()
            .column_iter()
            .map(|c| c.iter().copied().collect())
            .collect())
    }

    /// Every band as `{"pattern", "dim", "directed"}`.
    fn bands<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let bands = order::enumerate_bands(self.space()).map_err(to_py_err)?;
        let summaries = bands
            .iter()
            .map(|b| b.summary(self.space()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(to_py_err)?;
        to_py(py, &summaries)
    }

    /// Regular norm `inf{‖y‖ : -y <= x <= y}` for the sup norm, or the
    /// order-unit norm when `unit` is given.
    #[pyo3(signature = (x, unit = None))]
    fn regular_norm(&self, x: Vec<f64>, unit: Option<Vec<f64>>) -> PyResult<f64> {
        let norm = match unit {
            Some(u) => NormSpec::OrderUnit { u },
            None => NormSpec::Sup,
        };
        Ok(regular_norm(self.space(), &norm, &vector(x)).map_err(to_py_err)?.value)
    }

    fn __repr__(&self) -> String {
        format!(
            "Space(name={:?}, dim={}, rows={})",
            self.space().name(),
            self.space().dim(),
            self.space().num_rows()
        )
    }
}

/// A linear operator given by its matrix, optionally on a subspace spanned
/// by `domain_basis` vectors.
#[pyclass(name = "Operator", module = "conewise", frozen)]
pub struct PyOperator {
    op: LinOp,
}

#[pymethods]
impl PyOperator {
    #[new]
    #[pyo3(signature = (matrix, domain_basis = None))]
    fn new(matrix: Vec<Vec<f64>>, domain_basis: Option<Vec<Vec<f64>>>) -> PyResult<Self> {
        let mut op = LinOp::new(self::matrix(&matrix)?).map_err(to_py_err)?;
        if let Some(b) = domain_basis {
            op = op.with_domain(self::matrix(&b)?.transpose()).map_err(to_py_err)?;
        }
        Ok(Self { op })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            op: io::parse_operator(text, None).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn matrix(&self) -> Vec<Vec<f64>> {
        rows(self.op.matrix())
    }

    #[getter]
    fn dim(&self) -> usize {
        self.op.dim()
    }

    fn apply(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        if x.len() != self.op.dim() {
            return Err(PyValueError::new_err(format!(
                "vector of length {} for an operator of dimension {}",
                x.len(),
                self.op.dim()
            )));
        }
        Ok(self.op.apply(&vector(x)).iter().copied().collect())
    }

    fn to_json(&self) -> String {
        io::operator_to_json(&self.op)
    }

    fn __repr__(&self) -> String {
        format!("Operator(dim={})", self.op.dim())
    }
}

type Predicate = fn(&OrderedSpace, &LinOp) -> ::conewise::Result<ops::Verdict>;

fn verdict<'py>(py: Python<'py>, space: &PySpace, op: &PyOperator, f: Predicate) -> PyResult<Bound<'py, PyAny>> {
    let v = f(space.space(), &op.op).map_err(to_py_err)?;
    to_py(py, &v)
}

/// Verdict dictionary with `value`, `method` and an optional certificate.
#[pyfunction]
fn is_positive<'py>(py: Python<'py>, space: &PySpace, op: &PyOperator) -> PyResult<Bound<'py, PyAny>> {
    verdict(py, space, op, ops::is_positive)
}

#[pyfunction]
fn is_bipositive<'py>(py: Python<'py>, space: &PySpace, op: &PyOperator) -> PyResult<Bound<'py, PyAny>> {
    verdict(py, space, op, ops::is_bipositive)
}

#[pyfunction]
fn is_local<'py>(py: Python<'py>, space: &PySpace, op: &PyOperator) -> PyResult<Bound<'py, PyAny>> {
    verdict(py, space, op, ops::is_local)
}

#[pyfunction]
fn is_disjointness_preserving<'py>(
    py: Python<'py>,
    space: &PySpace,
    op: &PyOperator,
) -> PyResult<Bound<'py, PyAny>> {
    verdict(py, space, op, ops::is_disjointness_preserving)
}

/// `e^{tA}`.
#[pyfunction]
fn expm(a: Vec<Vec<f64>>, t: f64) -> PyResult<Vec<Vec<f64>>> {
    Ok(rows(&sg::expm(&matrix(&a)?, t).map_err(to_py_err)?))
}

/// `(λI - A)⁻¹`.
#[pyfunction]
fn resolvent(op: &PyOperator, lam: f64) -> PyResult<Vec<Vec<f64>>> {
    Ok(rows(&sg::resolvent(&op.op, lam).map_err(to_py_err)?))
}

/// `λA(λI - A)⁻¹`.
#[pyfunction]
fn yosida(op: &PyOperator, lam: f64) -> PyResult<PyOperator> {
    Ok(PyOperator {
        op: sg::yosida(&op.op, lam).map_err(to_py_err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (space, op, ts = None))]
fn thm_bounded_local<'py>(
    py: Python<'py>,
    space: &PySpace,
    op: &PyOperator,
    ts: Option<Vec<f64>>,
) -> PyResult<Bound<'py, PyAny>> {
    let ts = ts.unwrap_or_else(|| sg::default_t_grid(true));
    let r = sg::thm_bounded_local(space.space(), &op.op, &ts).map_err(to_py_err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (space, op, lambdas = None, ts = None))]
fn thm_local_resolvents<'py>(
    py: Python<'py>,
    space: &PySpace,
    op: &PyOperator,
    lambdas: Option<Vec<f64>>,
    ts: Option<Vec<f64>>,
) -> PyResult<Bound<'py, PyAny>> {
    let d = YosidaParams::default();
    let params = YosidaParams::new(lambdas.unwrap_or(d.lambdas), ts.unwrap_or(d.ts)).map_err(to_py_err)?;
    let xs = sg::convergence_samples(space.dim());
    let r = sg::thm_local_resolvents(space.space(), &op.op, &params, &xs).map_err(to_py_err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (space, op, ts = None, pairs = 32, seed = 0))]
fn thm_generator_local<'py>(
    py: Python<'py>,
    space: &PySpace,
    op: &PyOperator,
    ts: Option<Vec<f64>>,
    pairs: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let ts = ts.unwrap_or_else(|| sg::T_GRID.to_vec());
    let s = Semigroup::new(op.op.clone()).map_err(to_py_err)?;
    let r = sg::thm_generator_local(&space.cover, &s, &ts, pairs, seed, &NormSpec::Sup).map_err(to_py_err)?;
    to_py(py, &r)
}

#[pyfunction]
fn cor_positive_resolvents<'py>(
    py: Python<'py>,
    space: &PySpace,
    op: &PyOperator,
    lambda0: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let xs = sg::convergence_samples(space.dim());
    let r = sg::cor_positive_resolvents(space.space(), &op.op, lambda0, &YosidaParams::default(), &xs)
        .map_err(to_py_err)?;
    to_py(py, &r)
}

/// Heat kernel on `[0, 1]` with Neumann conditions, with its error bound.
#[pyfunction]
#[pyo3(signature = (t, x, y, target = 1e-12))]
fn diffusion_kernel<'py>(py: Python<'py>, t: f64, x: f64, y: f64, target: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &demos::diffusion_kernel(t, x, y, target).map_err(to_py_err)?)
}

/// Two functions with disjoint supports whose heat-flow images overlap.
#[pyfunction]
#[pyo3(signature = (t, grid_points = 101, target = 1e-12))]
fn diffusion_not_dp<'py>(py: Python<'py>, t: f64, grid_points: usize, target: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &demos::diffusion_not_dp(t, grid_points, target).map_err(to_py_err)?)
}

/// Every demo on its default configuration, or on a JSON configuration.
#[pyfunction]
#[pyo3(signature = (config = None))]
fn demos_all<'py>(py: Python<'py>, config: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
    let cfg: DemoConfig = match config {
        Some(text) => serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?,
        None => DemoConfig::default(),
    };
    to_py(py, &demos::demos_all(&cfg).map_err(to_py_err)?)
}

#[pymodule]
#[pyo3(name = "conewise")]
fn conewise_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpace>()?;
    m.add_class::<PyOperator>()?;
    m.add_function(wrap_pyfunction!(is_positive, m)?)?;
    m.add_function(wrap_pyfunction!(is_bipositive, m)?)?;
    m.add_function(wrap_pyfunction!(is_local, m)?)?;
    m.add_function(wrap_pyfunction!(is_disjointness_preserving, m)?)?;
    m.add_function(wrap_pyfunction!(expm, m)?)?;
    m.add_function(wrap_pyfunction!(resolvent, m)?)?;
    m.add_function(wrap_pyfunction!(yosida, m)?)?;
    m.add_function(wrap_pyfunction!(thm_bounded_local, m)?)?;
    m.add_function(wrap_pyfunction!(thm_local_resolvents, m)?)?;
    m.add_function(wrap_pyfunction!(thm_generator_local, m)?)?;
    m.add_function(wrap_pyfunction!(cor_positive_resolvents, m)?)?;
    m.add_function(wrap_pyfunction!(diffusion_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(diffusion_not_dp, m)?)?;
    m.add_function(wrap_pyfunction!(demos_all, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truth_maps_undecided_to_none() {
        assert_eq!(truth(Truth::True), Some(true));
        assert_eq!(truth(Truth::False), Some(false));
        assert_eq!(truth(Truth::Undecided), None);
    }

    #[test]
    fn matrix_round_trip() {
        let r = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        assert_eq!(rows(&matrix(&r).unwrap()), r);
    }
}
