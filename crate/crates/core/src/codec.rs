//! JSON interchange: forms as arrays of rational strings, matrices as 3x3
//! arrays of rational strings, generator certificates with their verified
//! relations. Every numeric value is serialized as a string ("3/4") so no
//! number ever passes through floating point, and object keys are emitted
//! in sorted order so identical inputs produce byte-identical output.

use serde_json::{json, Map, Value};

use crate::embedding::{GeneratorSet, GroupSpec};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::linalg::Matrix;
use crate::oracle::{CensusLabel, CrossCheckReport, GroupCensus};
use crate::quadform::TernaryForm;

pub fn elem_to_string(x: &FieldElem) -> String {
    x.to_string()
}

pub fn form_to_json(q: &TernaryForm) -> Value {
    Value::Array(
        q.diag()
            .iter()
            .map(|d| Value::String(elem_to_string(d)))
            .collect(),
    )
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array(
        (0..m.dim())
            .map(|i| {
                Value::Array(
                    (0..m.dim())
                        .map(|j| Value::String(elem_to_string(m.at(i, j))))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn parse_form(ctx: FieldCtx, v: &Value) -> Result<TernaryForm> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse("form must be a JSON array".into()))?;
    if arr.len() != 3 {
        return Err(Error::Parse("form must have three entries".into()));
    }
    let diag: Vec<FieldElem> = arr
        .iter()
        .map(|x| {
            x.as_str()
                .ok_or_else(|| Error::Parse("form entries must be rational strings".into()))
                .and_then(|s| ctx.parse_elem(s))
        })
        .collect::<Result<_>>()?;
    TernaryForm::from_slice(&diag)
}

pub fn parse_matrix(ctx: FieldCtx, v: &Value) -> Result<Matrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse("matrix must be a JSON array of rows".into()))?;
    let parsed: Vec<Vec<FieldElem>> = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Parse("matrix rows must be arrays".into()))?
                .iter()
                .map(|x| {
                    x.as_str()
                        .ok_or_else(|| {
                            Error::Parse("matrix entries must be rational strings".into())
                        })
                        .and_then(|s| ctx.parse_elem(s))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Matrix::from_rows(parsed)
}

/// Parses a JSON array of matrices (a subgroup or generator list).
pub fn parse_matrices(ctx: FieldCtx, v: &Value) -> Result<Vec<Matrix>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse("expected a JSON array of matrices".into()))?;
    arr.iter().map(|m| parse_matrix(ctx, m)).collect()
}

/// Generator certificate: everything `verify_certificate` needs to re-check
/// the synthesis claims from scratch.
pub fn certificate_to_json(set: &GeneratorSet, ctx: FieldCtx, q: &TernaryForm) -> Value {
    let mut obj = Map::new();
    obj.insert("field".into(), Value::String(ctx.to_string()));
    obj.insert("form".into(), form_to_json(q));
    obj.insert("group".into(), Value::String(set.group.label()));
    obj.insert(
        "order".into(),
        Value::String(set.group.order().to_string()),
    );
    obj.insert(
        "generators".into(),
        Value::Array(
            set.gens
                .iter()
                .map(|g| matrix_to_json(g.matrix()))
                .collect(),
        ),
    );
    obj.insert(
        "relations".into(),
        Value::Array(
            set.presentation_check
                .relations
                .iter()
                .map(|r| Value::String(r.clone()))
                .collect(),
        ),
    );
    obj.insert(
        "closure_order".into(),
        Value::String(set.presentation_check.closure_order.to_string()),
    );
    Value::Object(obj)
}

/// Re-verifies a certificate: parses field, form and generators, then reruns
/// the full GeneratorSet validation (SO(q) membership, determinant, standard
/// relations, exact closure order). Returns the verified set.
pub fn verify_certificate(v: &Value) -> Result<GeneratorSet> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("certificate must be a JSON object".into()))?;
    let field = obj
        .get("field")
        .and_then(|x| x.as_str())
        .ok_or_else(|| Error::Parse("certificate is missing \"field\"".into()))?;
    let ctx = FieldCtx::parse(field)?;
    let form = obj
        .get("form")
        .ok_or_else(|| Error::Parse("certificate is missing \"form\"".into()))?;
    let q = parse_form(ctx, form)?;
    let group = obj
        .get("group")
        .and_then(|x| x.as_str())
        .ok_or_else(|| Error::Parse("certificate is missing \"group\"".into()))?;
    let group = GroupSpec::parse(group)?;
    let gens = obj
        .get("generators")
        .ok_or_else(|| Error::Parse("certificate is missing \"generators\"".into()))?;
    let gens = parse_matrices(ctx, gens)?;
    GeneratorSet::verified(group, gens, &q)
}

pub fn census_to_json(census: &GroupCensus) -> Value {
    let entries: Vec<Value> = census
        .entries
        .iter()
        .map(|e| {
            let label = match &e.label {
                CensusLabel::Regular(g) => json!({ "type": g.label() }),
                CensusLabel::PIrregular { order } => json!({
                    "p_irregular": true,
                    "order": order.to_string(),
                }),
            };
            json!({
                "label": label,
                "subgroup_count": e.subgroup_count.to_string(),
                "conjugacy_class_count": e.conjugacy_class_count.to_string(),
                "representatives": Value::Array(
                    e.representatives
                        .iter()
                        .map(|gens| {
                            Value::Array(gens.iter().map(matrix_to_json).collect())
                        })
                        .collect(),
                ),
            })
        })
        .collect();
    json!({
        "p": census.p.to_string(),
        "form": form_to_json(&census.form),
        "group_order": census.group_order.to_string(),
        "entries": entries,
    })
}

pub fn cross_check_to_json(report: &CrossCheckReport) -> Value {
    json!({
        "p": report.p.to_string(),
        "group_order": report.group_order.to_string(),
        "all_pass": report.all_pass(),
        "checks": report
            .lines
            .iter()
            .map(|l| json!({ "name": l.name, "pass": l.pass, "detail": l.detail }))
            .collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::synthesize_generators;

    #[test]
    fn certificate_round_trip() {
        let ctx = FieldCtx::Rationals;
        let q = TernaryForm::q0(ctx);
        let set = synthesize_generators(&GroupSpec::Cyclic(4), &q).unwrap();
        let cert = certificate_to_json(&set, ctx, &q);
        let back = verify_certificate(&cert).unwrap();
        assert_eq!(back.group, GroupSpec::Cyclic(4));
        assert_eq!(back.presentation_check.closure_order, 4);
    }

    #[test]
    fn tampered_certificate_fails() {
        let ctx = FieldCtx::Rationals;
        let q = TernaryForm::q0(ctx);
        let set = synthesize_generators(&GroupSpec::Dihedral(4), &q).unwrap();
        let mut cert = certificate_to_json(&set, ctx, &q);
        // perturb one entry
        cert["generators"][0][1][1] = Value::String("17".into());
        assert!(verify_certificate(&cert).is_err());
        // det -1 matrix smuggled in
        let mut cert2 = certificate_to_json(&set, ctx, &q);
        cert2["generators"][1] = matrix_to_json(&Matrix::diagonal(&[
            ctx.one(),
            ctx.one(),
            ctx.int(-1),
        ]));
        assert!(verify_certificate(&cert2).is_err());
    }

    #[test]
    fn form_parsing_round_trip() {
        let ctx = FieldCtx::Rationals;
        let q = TernaryForm::new(
            ctx.parse_elem("-1").unwrap(),
            ctx.parse_elem("2/3").unwrap(),
            ctx.parse_elem("5").unwrap(),
        )
        .unwrap();
        let v = form_to_json(&q);
        assert_eq!(v, json!(["-1", "2/3", "5"]));
        let back = parse_form(ctx, &v).unwrap();
        assert_eq!(back.diag(), q.diag());
    }

    #[test]
    fn json_output_is_deterministic() {
        let ctx = FieldCtx::prime_field(3).unwrap();
        let q = TernaryForm::q0(ctx);
        let census = crate::oracle::subgroup_census(&q).unwrap();
        let a = serde_json::to_string(&census_to_json(&census)).unwrap();
        let census2 = crate::oracle::subgroup_census(&q).unwrap();
        let b = serde_json::to_string(&census_to_json(&census2)).unwrap();
        assert_eq!(a, b);
    }
}
