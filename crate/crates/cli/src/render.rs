use std::fmt::Write;

use serde_json::Value;

pub fn json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, skip: &[&str], rows: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if prefix.is_empty() && skip.contains(&k.as_str()) {
                    continue;
                }
                flatten(&key(k), x, skip, rows);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let joined: Vec<String> = items.iter().map(scalar).collect();
            rows.push((prefix.to_string(), joined.join(" ")));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), x, skip, rows);
            }
        }
        other => rows.push((prefix.to_string(), scalar(other))),
    }
}

fn aligned(rows: &[(String, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<width$}  {v}");
    }
    out
}

/// One `key  value` line per leaf, with dotted paths for nested fields.
pub fn table(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &[], &mut rows);
    aligned(&rows)
}

/// Summary lines followed by `iteration  residual  error` per step.
pub fn convergence_table(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &["residuals", "errors", "signal", "vertices"], &mut rows);
    let mut out = aligned(&rows);
    let column = |name: &str| v.get(name).and_then(Value::as_array).cloned().unwrap_or_default();
    let residuals = column("residuals");
    let errors = column("errors");
    let _ = writeln!(out, "\n{:>9}  {:>22}  {:>22}", "iteration", "residual", "error");
    for (i, r) in residuals.iter().enumerate() {
        let e = errors.get(i).map(scalar).unwrap_or_else(|| "-".to_string());
        let _ = writeln!(out, "{i:>9}  {:>22}  {e:>22}", scalar(r));
    }
    out
}
