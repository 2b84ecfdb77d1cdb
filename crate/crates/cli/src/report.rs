//! Run reports: JSON for machines, aligned `key  value` text for people.

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Default)]
pub struct Report {
    fields: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Self::default();
        r.put("command", command);
        r
    }

    pub fn put(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.fields.insert(key.to_owned(), v);
    }

    pub fn to_json(&self) -> Value {
        Value::Object(self.fields.clone())
    }

    pub fn render_text(&self) -> String {
        let mut rows = Vec::new();
        for (k, v) in &self.fields {
            flatten(k, v, &mut rows);
        }
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in rows {
            out.push_str(&format!("{k:<width$}  {v}\n"));
        }
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, inner) in map {
                flatten(&format!("{prefix}.{k}"), inner, rows);
            }
        }
        Value::Array(items) if items.iter().all(|i| scalar(i).is_some()) => {
            let joined: Vec<String> = items.iter().filter_map(scalar).collect();
            rows.push((prefix.to_owned(), format!("[{}]", joined.join(", "))));
        }
        Value::Array(items) => {
            for (i, inner) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), inner, rows);
            }
        }
        other => rows.push((prefix.to_owned(), scalar(other).unwrap_or_default())),
    }
}

/// A value together with the oracle that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct Tagged<T> {
    pub value: T,
    pub oracle: &'static str,
}

pub fn tagged<T>(value: T, oracle: &'static str) -> Tagged<T> {
    Tagged { value, oracle }
}
