//! Reports and shipped documents validate against the schema files.
//!
//! The validator interprets the subset of JSON Schema the shipped schemas
//! use: type, enum, pattern, required, properties, additionalProperties,
//! items (both forms), minItems, maxItems, minimum.

use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn repo_root() -> PathBuf {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.pop();
    p.pop();
    p
}

fn load(path: &str) -> Value {
    let full = repo_root().join(path);
    serde_json::from_str(&std::fs::read_to_string(&full).unwrap_or_else(|e| {
        panic!("{}: {e}", full.display());
    }))
    .unwrap()
}

fn type_matches(ty: &str, value: &Value) -> bool {
    match ty {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "string" => value.is_string(),
        "boolean" => value.is_boolean(),
        "integer" => value.as_i64().is_some() || value.as_u64().is_some(),
        "number" => value.is_number(),
        "null" => value.is_null(),
        _ => false,
    }
}

fn validate(schema: &Value, value: &Value, path: &str) -> Result<(), String> {
    let obj = match schema.as_object() {
        Some(o) => o,
        None => return Ok(()), // `{}` accepts everything
    };
    if let Some(ty) = obj.get("type").and_then(Value::as_str) {
        if !type_matches(ty, value) {
            return Err(format!("{path}: expected {ty}, got {value}"));
        }
    }
    if let Some(options) = obj.get("enum").and_then(Value::as_array) {
        if !options.contains(value) {
            return Err(format!("{path}: {value} not in enum"));
        }
    }
    if let Some(pattern) = obj.get("pattern").and_then(Value::as_str) {
        let re = regex::Regex::new(pattern).map_err(|e| format!("{path}: bad pattern: {e}"))?;
        let s = value.as_str().ok_or_else(|| format!("{path}: pattern on non-string"))?;
        if !re.is_match(s) {
            return Err(format!("{path}: `{s}` fails pattern {pattern}"));
        }
    }
    if let Some(min) = obj.get("minimum").and_then(Value::as_f64) {
        let x = value.as_f64().ok_or_else(|| format!("{path}: minimum on non-number"))?;
        if x < min {
            return Err(format!("{path}: {x} < {min}"));
        }
    }
    if let Some(map) = value.as_object() {
        if let Some(required) = obj.get("required").and_then(Value::as_array) {
            for key in required {
                let key = key.as_str().unwrap();
                if !map.contains_key(key) {
                    return Err(format!("{path}: missing required `{key}`"));
                }
            }
        }
        let props = obj.get("properties").and_then(Value::as_object);
        let additional = obj.get("additionalProperties");
        for (key, item) in map {
            if let Some(prop_schema) = props.and_then(|p| p.get(key)) {
                validate(prop_schema, item, &format!("{path}.{key}"))?;
            } else if let Some(extra) = additional {
                if extra == &Value::Bool(false) {
                    return Err(format!("{path}: unexpected property `{key}`"));
                }
                if extra.is_object() {
                    validate(extra, item, &format!("{path}.{key}"))?;
                }
            }
        }
    }
    if let Some(items) = value.as_array() {
        if let Some(min) = obj.get("minItems").and_then(Value::as_u64) {
            if (items.len() as u64) < min {
                return Err(format!("{path}: fewer than {min} items"));
            }
        }
        if let Some(max) = obj.get("maxItems").and_then(Value::as_u64) {
            if (items.len() as u64) > max {
                return Err(format!("{path}: more than {max} items"));
            }
        }
        match obj.get("items") {
            Some(Value::Array(per_slot)) => {
                for (i, (s, v)) in per_slot.iter().zip(items).enumerate() {
                    validate(s, v, &format!("{path}[{i}]"))?;
                }
            }
            Some(one @ Value::Object(_)) => {
                for (i, v) in items.iter().enumerate() {
                    validate(one, v, &format!("{path}[{i}]"))?;
                }
            }
            _ => {}
        }
    }
    Ok(())
}

fn kontact_json(args: &[&str]) -> Value {
    let out = Command::new(env!("CARGO_BIN_EXE_kontact"))
        .args(args)
        .arg("--json")
        .output()
        .expect("binary runs");
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON from {args:?}: {e}\n{}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn reports_validate_against_schema() {
    let schema = load("docs/schema/report.schema.json");
    let frontwheel = repo_root().join("docs/examples/frontwheel.json");
    let frontwheel = frontwheel.to_str().unwrap();
    for args in [
        vec!["corpus", "run", "control"],
        vec!["corpus", "list"],
        vec!["check-kcontact", frontwheel],
        vec!["closure", frontwheel],
        vec!["bracket-table", frontwheel],
        vec!["companion", frontwheel, "--theta", "1,0"],
        vec!["integrate", frontwheel, "--b1", "1", "--check-constant"],
    ] {
        let report = kontact_json(&args);
        validate(&schema, &report, "$").unwrap_or_else(|e| panic!("{args:?}: {e}"));
    }
}

#[test]
fn shipped_documents_validate_against_schema() {
    let schema = load("docs/schema/input.schema.json");
    for doc in ["frontwheel.json", "bad.json", "contact.json"] {
        let value = load(&format!("docs/examples/{doc}"));
        validate(&schema, &value, "$").unwrap_or_else(|e| panic!("{doc}: {e}"));
    }
    for doc in [
        "riccati", "isotropic", "jet", "control2", "control3", "schwarz", "brockett3",
        "gbrockett", "frontwheel",
    ] {
        let value = load(&format!("crates/core/src/corpus/data/{doc}.json"));
        validate(&schema, &value, "$").unwrap_or_else(|e| panic!("{doc}: {e}"));
    }
}
