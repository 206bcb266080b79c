//! Python bindings: profiles, dimension constants, the functionals, the
//! lemma and comparison checks, and the two test families.
//!
//! Records come back as plain dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

use hypmt_core::{functionals, geometry, profiles, sequences, verify};

fn err(e: hypmt_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_f64()) {
            (Some(i), _) if !n.is_f64() => i.into_pyobject(py)?.into_any(),
            (_, Some(f)) => f.into_pyobject(py)?.into_any(),
            _ => py.None().into_bound(py),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let list = PyList::empty(py);
            for x in a {
                list.append(to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, x) in m {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn record<'py, T: Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(x).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// Dimension-dependent constants of H^n.
#[pyclass(name = "DimensionContext", frozen)]
struct PyContext {
    inner: geometry::DimensionContext,
}

#[pymethods]
impl PyContext {
    #[new]
    fn new(n: u32) -> PyResult<Self> {
        Ok(PyContext {
            inner: geometry::make_context(n).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }
    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega()
    }
    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma()
    }
    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }
    #[getter]
    fn hardy(&self) -> f64 {
        self.inner.hardy()
    }

    fn phi(&self, t: f64) -> PyResult<f64> {
        geometry::phi(&self.inner, t).map_err(err)
    }

    fn phi_inv(&self, s: f64) -> PyResult<f64> {
        geometry::phi_inv(&self.inner, s).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("DimensionContext(n={})", self.inner.n())
    }
}

/// Non-increasing piecewise-linear profile on the measure half-line.
#[pyclass(name = "RadialProfile", frozen)]
struct PyProfile {
    inner: profiles::RadialProfile,
}

#[pymethods]
impl PyProfile {
    #[new]
    fn new(knots: Vec<f64>, values: Vec<f64>) -> PyResult<Self> {
        Ok(PyProfile {
            inner: profiles::RadialProfile::new(knots, values).map_err(err)?,
        })
    }

    #[staticmethod]
    fn random(seed: u64, n_knots: usize, support: f64, max_value: f64) -> PyResult<Self> {
        Ok(PyProfile {
            inner: profiles::random_profile(seed, n_knots, support, max_value).map_err(err)?,
        })
    }

    #[getter]
    fn knots(&self) -> Vec<f64> {
        self.inner.knots().to_vec()
    }
    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }
    #[getter]
    fn support(&self) -> f64 {
        self.inner.support()
    }
    #[getter]
    fn peak(&self) -> f64 {
        self.inner.peak()
    }

    fn __call__(&self, s: f64) -> f64 {
        self.inner.eval(s)
    }

    fn scaled(&self, c: f64) -> PyResult<Self> {
        Ok(PyProfile {
            inner: self.inner.scaled(c).map_err(err)?,
        })
    }

    fn to_json(&self, n: u32) -> String {
        profiles::ProfileDocument::new(n, &self.inner).to_json()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<(u32, Self)> {
        let doc = profiles::ProfileDocument::from_json(text).map_err(err)?;
        let n = doc.n;
        let (_, inner) = doc.into_parts().map_err(err)?;
        Ok((n, PyProfile { inner }))
    }

    fn __repr__(&self) -> String {
        format!(
            "RadialProfile(knots={}, support={})",
            self.inner.knots().len(),
            self.inner.support()
        )
    }
}

#[pyfunction]
fn hyperbolic_energy(ctx: &PyContext, v: &PyProfile) -> PyResult<f64> {
    functionals::hyperbolic_energy(&ctx.inner, &v.inner).map(|e| e.value).map_err(err)
}

#[pyfunction]
fn euclidean_energy(ctx: &PyContext, v: &PyProfile) -> f64 {
    functionals::euclidean_energy(&ctx.inner, &v.inner)
}

#[pyfunction]
fn ln_norm(ctx: &PyContext, v: &PyProfile) -> f64 {
    functionals::ln_norm(&v.inner, ctx.inner.n())
}

#[pyfunction]
fn extra_term(ctx: &PyContext, v: &PyProfile) -> f64 {
    functionals::extra_term(&ctx.inner, &v.inner)
}

#[pyfunction]
fn energy_report<'py>(py: Python<'py>, ctx: &PyContext, v: &PyProfile) -> PyResult<Bound<'py, PyAny>> {
    record(py, &functionals::energy_report(&ctx.inner, &v.inner).map_err(err)?)
}

#[pyfunction]
fn phi_n(n: u32, t: f64) -> f64 {
    functionals::phi_n(n, t)
}

#[pyfunction]
fn mt_functional(ctx: &PyContext, v: &PyProfile, alpha: f64) -> PyResult<f64> {
    functionals::mt_functional(&ctx.inner, &v.inner, alpha)
        .map(|e| e.value)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (ctx, v, alpha=None, p=None))]
fn exact_growth_ratio(ctx: &PyContext, v: &PyProfile, alpha: Option<f64>, p: Option<f64>) -> PyResult<f64> {
    let c = &ctx.inner;
    functionals::exact_growth_ratio_with(c, &v.inner, alpha.unwrap_or(c.alpha()), p.unwrap_or(c.conjugate()))
        .map(|e| e.value)
        .map_err(err)
}

#[pyfunction]
fn lemma_values<'py>(py: Python<'py>, ctx: &PyContext, t: f64) -> PyResult<Bound<'py, PyAny>> {
    record(py, &verify::lemma_values(&ctx.inner, t).map_err(err)?)
}

#[pyfunction]
fn sweep_lemma<'py>(py: Python<'py>, ctx: &PyContext, t_min: f64, t_max: f64, count: usize) -> PyResult<Bound<'py, PyAny>> {
    let grid = verify::LemmaGrid::log(t_min, t_max, count).map_err(err)?;
    record(py, &verify::sweep_lemma(&ctx.inner, &grid).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (ctx, v, strong=true))]
fn check_comparison<'py>(py: Python<'py>, ctx: &PyContext, v: &PyProfile, strong: bool) -> PyResult<Bound<'py, PyAny>> {
    record(py, &verify::check_comparison(&ctx.inner, &v.inner, strong).map_err(err)?)
}

#[pyfunction]
fn beta(a: f64, b: f64) -> PyResult<f64> {
    sequences::beta(a, b).map_err(err)
}

#[pyfunction]
fn psi_k_closed_forms<'py>(py: Python<'py>, ctx: &PyContext, k: f64, lambda: f64) -> PyResult<Bound<'py, PyAny>> {
    record(py, &sequences::psi_k_closed_forms(&ctx.inner, k, lambda).map_err(err)?)
}

#[pyfunction]
fn lower_bound(ctx: &PyContext, lambda: f64) -> PyResult<f64> {
    sequences::lower_bound(&ctx.inner, lambda).map_err(err)
}

#[pyfunction]
fn moser_c_k(ctx: &PyContext, k: f64) -> PyResult<f64> {
    sequences::moser_c_k(&ctx.inner, k).map_err(err)
}

#[pyfunction]
fn blowup_ratio<'py>(py: Python<'py>, ctx: &PyContext, k: f64, alpha: f64, p: f64) -> PyResult<Bound<'py, PyAny>> {
    record(py, &sequences::blowup_ratio(&ctx.inner, k, alpha, p).map_err(err)?)
}

#[pymodule]
fn hypmt(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyContext>()?;
    m.add_class::<PyProfile>()?;
    m.add_function(wrap_pyfunction!(hyperbolic_energy, m)?)?;
    m.add_function(wrap_pyfunction!(euclidean_energy, m)?)?;
    m.add_function(wrap_pyfunction!(ln_norm, m)?)?;
    m.add_function(wrap_pyfunction!(extra_term, m)?)?;
    m.add_function(wrap_pyfunction!(energy_report, m)?)?;
    m.add_function(wrap_pyfunction!(phi_n, m)?)?;
    m.add_function(wrap_pyfunction!(mt_functional, m)?)?;
    m.add_function(wrap_pyfunction!(exact_growth_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(lemma_values, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_lemma, m)?)?;
    m.add_function(wrap_pyfunction!(check_comparison, m)?)?;
    m.add_function(wrap_pyfunction!(beta, m)?)?;
    m.add_function(wrap_pyfunction!(psi_k_closed_forms, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(moser_c_k, m)?)?;
    m.add_function(wrap_pyfunction!(blowup_ratio, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
