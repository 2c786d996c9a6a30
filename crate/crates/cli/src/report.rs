//! Ordered key/value reports rendered as `key = value` text or JSON.

use std::fmt::Display;

use serde_json::{Map, Value};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, Value)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    /// Scalar field, stored as its display string so rationals stay exact.
    pub fn field(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.entries
            .push((key.to_string(), Value::String(value.to_string())));
        self
    }

    pub fn int(&mut self, key: &str, value: impl Into<i128>) -> &mut Self {
        let v: i128 = value.into();
        let json = i64::try_from(v).map_or_else(|_| Value::String(v.to_string()), Value::from);
        self.entries.push((key.to_string(), json));
        self
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        self.entries.push((key.to_string(), Value::Bool(value)));
        self
    }

    /// One text line per item as `key[i] = item`, a JSON array otherwise.
    pub fn rows<T: Display>(&mut self, key: &str, rows: impl IntoIterator<Item = T>) -> &mut Self {
        let items = rows
            .into_iter()
            .map(|r| Value::String(r.to_string()))
            .collect();
        self.entries.push((key.to_string(), Value::Array(items)));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.entries {
            match value {
                Value::Array(items) => {
                    for (i, item) in items.iter().enumerate() {
                        out.push_str(&format!("{key}[{}] = {}\n", i + 1, scalar(item)));
                    }
                }
                other => out.push_str(&format!("{key} = {}\n", scalar(other))),
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let map: Map<String, Value> = self.entries.iter().cloned().collect();
        let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("plain JSON values");
        s.push('\n');
        s
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            self.to_json()
        } else {
            self.to_text()
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
