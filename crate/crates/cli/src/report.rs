//! JSON documents emitted by the CLI. Integers are written as decimal
//! strings so that no consumer truncates them to 64 bits.

use cyclav::cyclicity::{IsogenyClassReport, SigmaCheck};
use cyclav::ingest::ValidationReport;
use cyclav::{BigInt, IdealLattice, IntMatrix, WeilContext};
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: &str = "1";

pub fn int(x: &BigInt) -> Value {
    Value::String(x.to_string())
}

pub fn ints(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(int).collect())
}

pub fn matrix(m: &IntMatrix) -> Value {
    Value::Array(m.rows().iter().map(|r| ints(r)).collect())
}

pub fn ideal(a: &IdealLattice) -> Value {
    json!({
        "denominator": int(a.denominator()),
        "hnf": Value::Array(a.hnf().iter().map(|r| ints(r)).collect()),
    })
}

pub fn context(ctx: &WeilContext) -> Value {
    json!({
        "p": ctx.p.to_string(),
        "r": ctx.r.to_string(),
        "q": int(&ctx.q),
        "g": ctx.g.to_string(),
        "f": ints(&ctx.f.to_descending()),
    })
}

pub fn flags(ctx: &WeilContext) -> Value {
    json!({
        "is_weil": ctx.is_weil,
        "is_ordinary": ctx.is_ordinary,
        "is_irreducible": ctx.is_irreducible,
        "point_count": int(&ctx.point_count()),
    })
}

fn sigma(s: &SigmaCheck) -> Value {
    json!({
        "ell": s.ell.to_string(),
        "stable_classes": s.stable.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
        "tau_divisible_classes": s.divisible.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
        "agrees": s.agrees,
    })
}

/// Full classification document for one context.
pub fn classification(ctx: &WeilContext, rep: &IsogenyClassReport, seconds: Option<f64>) -> Value {
    let classes: Vec<Value> = rep
        .reports
        .iter()
        .enumerate()
        .map(|(i, r)| {
            json!({
                "index": i.to_string(),
                "matrix": matrix(&r.class_ref.rep),
                "ideal": r.class_ref.ideal.as_ref().map(ideal).unwrap_or(Value::Null),
                "multiplicator_ring": ideal(&r.multiplicator_ring),
                "tau_m": int(&r.tau_m),
                "tau_one_minus_m": int(&r.tau_one_minus_m),
                "gcd_with_point_count": int(&r.gcd_with_point_count),
                "in_m_f_1": r.in_m_f_1,
                "in_m_f_2": r.in_m_f_2,
                "invariant_factors": ints(&r.invariant_factors),
                "group": ints(&r.group),
                "verdict": match r.verdict {
                    cyclav::Verdict::Cyclic => "cyclic",
                    cyclav::Verdict::NotCyclic => "not_cyclic",
                },
                "oracle_agrees": r.oracle_agrees,
            })
        })
        .collect();
    let s = &rep.summary;
    let mut doc = Map::new();
    doc.insert("schema_version".into(), SCHEMA_VERSION.into());
    doc.insert("context".into(), context(ctx));
    doc.insert("point_count".into(), int(&rep.point_count));
    doc.insert("classes".into(), Value::Array(classes));
    doc.insert("sigma_checks".into(), Value::Array(rep.sigma_checks.iter().map(sigma).collect()));
    doc.insert(
        "summary".into(),
        json!({
            "classes": s.total.to_string(),
            "cyclic": s.cyclic.to_string(),
            "not_cyclic": s.not_cyclic.to_string(),
            "index_bound": s.index_bound.to_string(),
            "certified_bound": s.certified_bound.to_string(),
            "indeterminate_pairs": s.indeterminate_pairs.to_string(),
            "oracle_agreement": s.oracle_agreement,
            "sigma_agreement": s.sigma_agreement,
            "gcd_zero_events": s.gcd_zero_events.to_string(),
        }),
    );
    doc.insert("completeness".into(), serde_json::to_value(s.completeness).unwrap_or(Value::Null));
    if let Some(t) = seconds {
        doc.insert("timing".into(), json!({ "seconds": format!("{t:.3}") }));
    }
    Value::Object(doc)
}

pub fn validation(report: &ValidationReport) -> Value {
    json!({
        "records": report.records.to_string(),
        "compared_fields": report.compared_fields.to_string(),
        "mismatches": report.mismatches.iter().map(|m| json!({
            "label": m.label,
            "field": m.field,
            "claimed": m.claimed,
            "computed": m.computed,
        })).collect::<Vec<_>>(),
    })
}

pub fn error(code: &str, message: &str) -> Value {
    json!({ "schema_version": SCHEMA_VERSION, "error": code, "message": message })
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}
