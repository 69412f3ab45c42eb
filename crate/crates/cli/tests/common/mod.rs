use std::path::PathBuf;
use std::process::{Command, Output};

/// Run the compiled `hypsum` binary with the given arguments.
pub fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypsum"))
        .args(args)
        .env_remove("HYPSUM_REGISTRY")
        .output()
        .expect("binary runs")
}

pub fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

pub fn schema_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join("schemas")
}

/// Minimal structural validator for the shipped schema subset:
/// `type`, `required`, `properties`, `items`.
pub fn validate(value: &serde_json::Value, schema: &serde_json::Value, path: &str) {
    if let Some(ty) = schema.get("type").and_then(|t| t.as_str()) {
        let ok = match ty {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "string" => value.is_string(),
            "integer" => value.is_i64() || value.is_u64(),
            "number" => value.is_number(),
            "boolean" => value.is_boolean(),
            other => panic!("schema uses unsupported type {other:?}"),
        };
        assert!(ok, "{path}: expected {ty}, got {value}");
    }
    if let Some(req) = schema.get("required").and_then(|r| r.as_array()) {
        for name in req {
            let name = name.as_str().expect("required entries are strings");
            assert!(
                value.get(name).is_some(),
                "{path}: missing required field {name:?}"
            );
        }
    }
    if let Some(props) = schema.get("properties").and_then(|p| p.as_object()) {
        for (name, sub) in props {
            if let Some(v) = value.get(name) {
                validate(v, sub, &format!("{path}.{name}"));
            }
        }
    }
    if let Some(items) = schema.get("items") {
        if let Some(arr) = value.as_array() {
            for (i, v) in arr.iter().enumerate() {
                validate(v, items, &format!("{path}[{i}]"));
            }
        }
    }
}

pub fn validate_against(value: &serde_json::Value, schema_file: &str) {
    let text = std::fs::read_to_string(schema_dir().join(schema_file))
        .unwrap_or_else(|e| panic!("read {schema_file}: {e}"));
    let schema: serde_json::Value = serde_json::from_str(&text).expect("schema is JSON");
    validate(value, &schema, schema_file);
}
