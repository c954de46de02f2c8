//! Output envelope and the json/csv/text renderings.

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};

pub const TOOL: &str = "eschlab";

/// Wraps a command result with the fields every artifact records.
pub fn envelope(command: &str, cfg: &RunConfig, result: Value) -> Value {
    json!({
        "tool": TOOL,
        "version": eschlab_core::suite::VERSION,
        "command": command,
        "seed": cfg.seed,
        "samples": cfg.samples,
        "t": cfg.t,
        "tolerances": cfg.tolerances,
        "result": result,
    })
}

/// `path=value` leaves in document order.
pub fn flatten(value: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    walk("", value, &mut out);
    out
}

fn walk(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match value {
        Value::Object(m) if !m.is_empty() => {
            for (k, v) in m {
                walk(&join(k), v, out);
            }
        }
        Value::Array(a) if !a.is_empty() && a.iter().any(|v| v.is_object() || v.is_array()) => {
            for (i, v) in a.iter().enumerate() {
                walk(&join(&i.to_string()), v, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render(format: Format, doc: &Value) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("json values serialize");
            s.push('\n');
            s
        }
        Format::Text => flatten(doc).into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect(),
        Format::Csv => {
            let mut s = String::from("key,value\n");
            for (k, v) in flatten(doc) {
                s.push_str(&format!("{},{}\n", csv_field(&k), csv_field(&v)));
            }
            s
        }
    }
}

/// Comment lines carrying the envelope fields for tabular output.
pub fn csv_preamble(doc: &Value) -> String {
    let mut meta = Map::new();
    if let Value::Object(m) = doc {
        for (k, v) in m {
            if k != "result" {
                meta.insert(k.clone(), v.clone());
            }
        }
    }
    format!("# {}\n", Value::Object(meta))
}

/// Fixed 17-significant-digit rendering for CSV cells.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}
