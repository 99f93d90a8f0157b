//! JSON schema of experiment configs, printed by `kahlerq schema`.

use serde_json::{json, Value};

fn number() -> Value {
    json!({"type": "number"})
}

fn count(minimum: u64) -> Value {
    json!({"type": "integer", "minimum": minimum})
}

fn object(required: &[&str], properties: Value) -> Value {
    json!({"type": "object", "additionalProperties": false, "required": required, "properties": properties})
}

fn matrix() -> Value {
    json!({"type": "array", "items": {"type": "array", "items": {"type": "number"}}})
}

fn vector() -> Value {
    json!({"type": "array", "items": {"type": "number"}})
}

fn state() -> Value {
    object(&["q", "p"], json!({"q": vector(), "p": vector(), "dims": {"type": "array", "items": count(1), "minItems": 2, "maxItems": 2}}))
}

fn operator() -> Value {
    object(&["n", "x"], json!({"n": count(1), "x": matrix(), "y": matrix()}))
}

fn grid() -> Value {
    object(
        &["x_min", "x_max", "n"],
        json!({"x_min": number(), "x_max": number(), "n": count(16), "hbar": number(), "mass": number()}),
    )
}

fn packet() -> Value {
    object(&["x0", "sigma"], json!({"x0": number(), "sigma": number(), "k": number()}))
}

fn potential() -> Value {
    json!({"oneOf": [
        object(&["kind"], json!({"kind": {"const": "harmonic"}, "omega": number()})),
        object(&["kind"], json!({"kind": {"const": "free"}})),
        object(&["kind", "values"], json!({"kind": {"const": "table"}, "values": vector()})),
    ]})
}

fn polynomial() -> Value {
    let exps = json!({"type": "array", "items": count(0)});
    object(
        &["terms"],
        json!({"terms": {"type": "array", "items": object(&["coeff"], json!({"coeff": number(), "q": exps, "p": exps}))}}),
    )
}

fn variant(kind: &str, params: Value) -> Value {
    object(
        &["kind", "seed", "params"],
        json!({
            "kind": {"const": kind},
            "seed": {"type": "integer", "minimum": 0, "maximum": u64::MAX},
            "params": params,
            "output_dir": {"type": "string"},
        }),
    )
}

pub fn config_schema() -> Value {
    let scheme = json!({"enum": ["exact_exponential", "implicit_midpoint"]});
    let stencil = json!({"enum": ["central2", "central4"]});
    json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "kahlerq experiment config",
        "oneOf": [
            variant("validate", object(&["n"], json!({"n": count(1), "tol": number(), "samples": count(1)}))),
            variant("lift", object(&["n"], json!({
                "n": count(1), "instances": count(1), "max_factors": count(1), "tol": number()}))),
            variant("evolve", object(&["t_final", "steps", "scheme"], json!({
                "hamiltonian": operator(), "n": count(1), "state": state(), "t_final": number(),
                "steps": count(1), "scheme": scheme, "stride": count(1),
                "tolerances": object(&[], json!({"hsym_drift": number(), "gnorm_drift": number(),
                    "symplectic": number(), "orthogonal": number(), "endpoint": number()}))}))),
            variant("ergodic", object(&["observable", "t_final"], json!({
                "lambdas": vector(), "hamiltonian": operator(), "state": state(), "actions": vector(),
                "angles": vector(), "observable": polynomial(), "t_final": number(),
                "expect_ergodic": {"type": "boolean"}, "steps": count(1), "samples_per_unit_time": number(),
                "grid": count(8), "gap_tol": number(), "bound": count(1), "independence_tol": number(),
                "checkpoints": count(1)}))),
            variant("tensor", object(&["dims"], json!({
                "dims": {"type": "array", "items": {"type": "array", "items": count(1), "minItems": 2, "maxItems": 2}},
                "instances": count(1), "tol": number()}))),
            variant("grid", object(&["grid", "potential"], json!({
                "grid": grid(), "potential": potential(), "levels": count(0), "level_tol": number(),
                "hsym_samples": count(0), "hsym_tol": number(), "packet": packet(), "t_final": number(),
                "norm_tol": number()}))),
            variant("commutator", object(&["grid", "profile"], json!({
                "grid": grid(), "stencil": stencil, "profile": packet(), "refinements": count(0),
                "residual_tol": number(), "ratio_range": {"type": "array", "items": number(), "minItems": 2, "maxItems": 2}}))),
        ]
    })
}
