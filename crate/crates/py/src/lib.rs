//! Python bindings: the base fields, ternary forms and the classification,
//! synthesis and oracle entry points. Values cross the boundary as strings
//! (exact rationals) or JSON strings; nothing is ever a float.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use soq_core::codec;
use soq_core::conjugacy;
use soq_core::cyclotomic;
use soq_core::embedding::{self, GroupSpec};
use soq_core::error::Error;
use soq_core::field::{reduce_square_class, FieldCtx};
use soq_core::oracle;
use soq_core::quadform::{self, Place, TernaryForm};

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_ctx(field: &str) -> PyResult<FieldCtx> {
    FieldCtx::parse(field).map_err(py_err)
}

fn parse_form(ctx: FieldCtx, form: &str) -> PyResult<TernaryForm> {
    let parts: Vec<&str> = form.split(',').collect();
    if parts.len() != 3 {
        return Err(PyValueError::new_err(format!(
            "form needs three comma-separated entries, got {form:?}"
        )));
    }
    let diag: Vec<_> = parts
        .iter()
        .map(|t| ctx.parse_elem(t))
        .collect::<Result<_, _>>()
        .map_err(py_err)?;
    TernaryForm::from_slice(&diag).map_err(py_err)
}

fn parse_place(place: &str) -> PyResult<Place> {
    match place {
        "oo" | "inf" | "real" => Ok(Place::Real),
        other => {
            let p: u64 = other
                .parse()
                .map_err(|_| PyValueError::new_err(format!("bad place {place:?}")))?;
            Place::finite(p).map_err(py_err)
        }
    }
}

/// The base field: Q or F_p for an odd prime p.
#[pyclass(name = "Field", frozen)]
struct PyField {
    ctx: FieldCtx,
}

#[pymethods]
impl PyField {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(PyField {
            ctx: parse_ctx(spec)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Field({})", self.ctx)
    }

    #[getter]
    fn characteristic(&self) -> u64 {
        self.ctx.characteristic()
    }

    /// Canonical square-class representative of a nonzero element.
    fn reduce_square_class(&self, x: &str) -> PyResult<String> {
        let e = self.ctx.parse_elem(x).map_err(py_err)?;
        Ok(reduce_square_class(&e).map_err(py_err)?.to_string())
    }

    fn is_square(&self, x: &str) -> PyResult<bool> {
        Ok(self.ctx.parse_elem(x).map_err(py_err)?.is_square())
    }
}

/// A nondegenerate diagonal ternary quadratic form.
#[pyclass(name = "TernaryForm", frozen)]
struct PyTernaryForm {
    form: TernaryForm,
}

#[pymethods]
impl PyTernaryForm {
    #[new]
    fn new(field: &str, form: &str) -> PyResult<Self> {
        let ctx = parse_ctx(field)?;
        Ok(PyTernaryForm {
            form: parse_form(ctx, form)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("TernaryForm({} over {})", self.form, self.form.ctx())
    }

    fn diagonal(&self) -> Vec<String> {
        self.form.diag().iter().map(|d| d.to_string()).collect()
    }

    fn disc(&self) -> PyResult<String> {
        Ok(self.form.disc().map_err(py_err)?.to_string())
    }

    fn is_isotropic(&self) -> PyResult<bool> {
        self.form.is_isotropic().map_err(py_err)
    }

    fn represents(&self, d: &str) -> PyResult<bool> {
        let d = self.form.ctx().parse_elem(d).map_err(py_err)?;
        self.form.represents(&d).map_err(py_err)
    }

    /// Exact witness vector v with q(v) = d.
    fn representation_vector(&self, d: &str) -> PyResult<Vec<String>> {
        let d = self.form.ctx().parse_elem(d).map_err(py_err)?;
        let v = quadform::find_representation_vector(&self.form, &d).map_err(py_err)?;
        Ok(v.iter().map(|x| x.to_string()).collect())
    }

    /// Nonzero v with q(v) = 0, for isotropic forms.
    fn isotropy_vector(&self) -> PyResult<Vec<String>> {
        let v = quadform::find_isotropy_vector(&self.form).map_err(py_err)?;
        Ok(v.iter().map(|x| x.to_string()).collect())
    }

    fn isometric(&self, other: &PyTernaryForm) -> PyResult<bool> {
        quadform::isometric(&self.form, &other.form).map_err(py_err)
    }

    /// Exact change of basis P with P^T Gram(other) P = Gram(self).
    fn explicit_isometry(&self, other: &PyTernaryForm) -> PyResult<Vec<Vec<String>>> {
        let w = quadform::explicit_isometry(&self.form, &other.form).map_err(py_err)?;
        let m = w.matrix();
        Ok((0..3)
            .map(|i| (0..3).map(|j| m.at(i, j).to_string()).collect())
            .collect())
    }

    fn evaluate(&self, v: Vec<String>) -> PyResult<String> {
        if v.len() != 3 {
            return Err(PyValueError::new_err("vector needs three entries"));
        }
        let ctx = self.form.ctx();
        let vv: Vec<_> = v
            .iter()
            .map(|s| ctx.parse_elem(s))
            .collect::<Result<_, _>>()
            .map_err(py_err)?;
        Ok(self.form.evaluate(&vv).to_string())
    }
}

/// Legendre symbol (a | p) in {-1, 0, 1}.
#[pyfunction]
fn legendre_symbol(a: i64, p: u64) -> PyResult<i32> {
    soq_core::field::legendre_symbol(&a.into(), p).map_err(py_err)
}

/// Hilbert symbol (a, b)_v over Q; the place is "oo", "2" or an odd prime.
#[pyfunction]
fn hilbert_symbol(a: &str, b: &str, place: &str) -> PyResult<i32> {
    let ctx = FieldCtx::Rationals;
    let a = ctx.parse_elem(a).map_err(py_err)?;
    let b = ctx.parse_elem(b).map_err(py_err)?;
    quadform::hilbert_symbol(&a, &b, parse_place(place)?).map_err(py_err)
}

/// (alpha_n, beta_n, class of (alpha_n+1)/2) over the field, or None when
/// no order-n trace exists there.
#[pyfunction]
fn alpha_beta(n: u32, field: &str) -> PyResult<Option<(String, String, Option<String>)>> {
    let ctx = parse_ctx(field)?;
    let data = cyclotomic::alpha_beta(n, ctx).map_err(py_err)?;
    Ok(data.map(|d| {
        (
            d.alpha.to_string(),
            d.beta.to_string(),
            d.half_alpha_plus_one_class.as_ref().map(|c| c.to_string()),
        )
    }))
}

/// Does the group embed into SO(q)? Returns (verdict, reason trace).
#[pyfunction]
fn embeds(group: &str, field: &str, form: &str) -> PyResult<(bool, Vec<String>)> {
    let ctx = parse_ctx(field)?;
    let q = parse_form(ctx, form)?;
    let g = GroupSpec::parse(group).map_err(py_err)?;
    let d = embedding::embeds(&g, &q).map_err(py_err)?;
    Ok((d.embeds, d.trace))
}

/// Verified generator certificate as a JSON string.
#[pyfunction]
fn synthesize(group: &str, field: &str, form: &str) -> PyResult<String> {
    let ctx = parse_ctx(field)?;
    let q = parse_form(ctx, form)?;
    let g = GroupSpec::parse(group).map_err(py_err)?;
    let set = embedding::synthesize_generators(&g, &q).map_err(py_err)?;
    serde_json::to_string(&codec::certificate_to_json(&set, ctx, &q))
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Re-verifies a certificate JSON string; returns (pass, detail).
#[pyfunction]
fn verify_certificate(cert: &str) -> PyResult<(bool, String)> {
    let value: serde_json::Value = serde_json::from_str(cert)
        .map_err(|e| PyValueError::new_err(format!("bad JSON: {e}")))?;
    match codec::verify_certificate(&value) {
        Ok(set) => Ok((
            true,
            format!(
                "{} verified: closure order {}",
                set.group.label(),
                set.presentation_check.closure_order
            ),
        )),
        Err(e) => Ok((false, e.to_string())),
    }
}

/// Conjugacy-class summary as a JSON string.
#[pyfunction]
fn conjugacy_summary(group: &str, field: &str, form: &str) -> PyResult<String> {
    let ctx = parse_ctx(field)?;
    let q = parse_form(ctx, form)?;
    let g = GroupSpec::parse(group).map_err(py_err)?;
    let s = conjugacy::conjugacy_summary(&g, &q).map_err(py_err)?;
    let mode = match &s.mode {
        conjugacy::SummaryMode::FiniteCount(c) => {
            serde_json::json!({ "count": c.to_string() })
        }
        conjugacy::SummaryMode::DecisionOnly { parameter_set } => {
            serde_json::json!({ "parameter_set": parameter_set })
        }
    };
    serde_json::to_string(&serde_json::json!({
        "group": g.label(),
        "embeds": s.embeds,
        "mode": mode,
        "classes": s.classes,
        "trace": s.trace,
    }))
    .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Whether two norm-group classes give conjugate dihedral subgroups.
#[pyfunction]
fn dihedral_same_class(c1: &str, c2: &str, n: u32, field: &str, form: &str) -> PyResult<bool> {
    let ctx = parse_ctx(field)?;
    let q = parse_form(ctx, form)?;
    let c1 = reduce_square_class(&ctx.parse_elem(c1).map_err(py_err)?).map_err(py_err)?;
    let c2 = reduce_square_class(&ctx.parse_elem(c2).map_err(py_err)?).map_err(py_err)?;
    conjugacy::dihedral_same_class(&c1, &c2, n, &q).map_err(py_err)
}

/// Brute-force subgroup census over F_p as a JSON string.
#[pyfunction]
fn oracle_census(p: u64, form: &str) -> PyResult<String> {
    let ctx = FieldCtx::prime_field(p).map_err(py_err)?;
    let q = parse_form(ctx, form)?;
    let census = oracle::subgroup_census(&q).map_err(py_err)?;
    serde_json::to_string(&codec::census_to_json(&census))
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Cross-check of every prediction against the census, as a JSON string.
#[pyfunction]
fn oracle_cross_check(p: u64, form: &str) -> PyResult<String> {
    let ctx = FieldCtx::prime_field(p).map_err(py_err)?;
    let q = parse_form(ctx, form)?;
    let report = oracle::cross_check(&q).map_err(py_err)?;
    serde_json::to_string(&codec::cross_check_to_json(&report))
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn soq_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyField>()?;
    m.add_class::<PyTernaryForm>()?;
    m.add_function(wrap_pyfunction!(legendre_symbol, m)?)?;
    m.add_function(wrap_pyfunction!(hilbert_symbol, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_beta, m)?)?;
    m.add_function(wrap_pyfunction!(embeds, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(conjugacy_summary, m)?)?;
    m.add_function(wrap_pyfunction!(dihedral_same_class, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_census, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_cross_check, m)?)?;
    Ok(())
}
