//! Structured key/value reports with a text and a JSON rendering.

use std::collections::BTreeSet;
use std::fmt::Write;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Text(String),
    List(Vec<Value>),
    Map(Report),
}

/// Ordered key/value entries.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, Value)>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<Value>) -> &mut Self {
        self.entries.push((key.into(), value.into()));
        self
    }

    pub fn with(mut self, key: impl Into<String>, value: impl Into<Value>) -> Self {
        self.push(key, value);
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn entries(&self) -> &[(String, Value)] {
        &self.entries
    }

    /// `key: value` lines, nested values indented by two spaces.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(&mut out, 0);
        out
    }

    fn write_text(&self, out: &mut String, indent: usize) {
        let pad = " ".repeat(indent);
        for (k, v) in &self.entries {
            match v {
                Value::Map(m) => {
                    let _ = writeln!(out, "{pad}{k}:");
                    m.write_text(out, indent + 2);
                }
                Value::List(items) if items.iter().any(|i| matches!(i, Value::Map(_) | Value::List(_))) => {
                    let _ = writeln!(out, "{pad}{k}:");
                    for item in items {
                        match item {
                            Value::Map(m) => {
                                let _ = writeln!(out, "{pad}  -");
                                m.write_text(out, indent + 4);
                            }
                            other => {
                                let _ = writeln!(out, "{pad}  - {}", scalar(other));
                            }
                        }
                    }
                }
                other => {
                    let _ = writeln!(out, "{pad}{k}: {}", scalar(other));
                }
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Object(
            self.entries
                .iter()
                .map(|(k, v)| (k.clone(), v.to_json()))
                .collect(),
        )
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Bool(b) => b.to_string(),
        Value::Int(i) => i.to_string(),
        Value::Text(s) => s.clone(),
        Value::List(items) => format!(
            "[{}]",
            items.iter().map(scalar).collect::<Vec<_>>().join(", ")
        ),
        Value::Map(_) => "{..}".into(),
    }
}

impl Value {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Bool(b) => (*b).into(),
            Value::Int(i) => (*i).into(),
            Value::Text(s) => s.clone().into(),
            Value::List(items) => serde_json::Value::Array(items.iter().map(Value::to_json).collect()),
            Value::Map(m) => m.to_json(),
        }
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

macro_rules! int_value {
    ($($t:ty),*) => {$(
        impl From<$t> for Value {
            fn from(i: $t) -> Self {
                Value::Int(i as i64)
            }
        }
    )*};
}
int_value!(i64, u64, u32, usize, u8);

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl From<Report> for Value {
    fn from(r: Report) -> Self {
        Value::Map(r)
    }
}

impl<T: Into<Value>> From<Vec<T>> for Value {
    fn from(v: Vec<T>) -> Self {
        Value::List(v.into_iter().map(Into::into).collect())
    }
}

impl From<&BTreeSet<u64>> for Value {
    fn from(s: &BTreeSet<u64>) -> Self {
        Value::List(s.iter().map(|&p| Value::Int(p as i64)).collect())
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(o: Option<T>) -> Self {
        match o {
            Some(v) => v.into(),
            None => Value::Text("none".into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_json_agree() {
        let r = Report::new()
            .with("name", "x")
            .with("sizes", vec![1u64, 2, 3])
            .with("nested", Report::new().with("ok", true));
        assert_eq!(r.to_text(), "name: x\nsizes: [1, 2, 3]\nnested:\n  ok: true\n");
        assert_eq!(r.to_json()["nested"]["ok"], serde_json::json!(true));
        assert_eq!(r.to_json()["sizes"], serde_json::json!([1, 2, 3]));
    }
}
