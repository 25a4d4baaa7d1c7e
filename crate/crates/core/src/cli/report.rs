//! Command reports and their canonical JSON form.
//!
//! Canonical output: object keys sorted, floats written with 17 significant
//! digits (`{:.16e}`), integers as integers, two-space indentation. Parsing
//! the output and writing it again gives the same bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Floats(Vec<f64>),
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Field::Float(x)
    }
}

impl From<usize> for Field {
    fn from(x: usize) -> Self {
        Field::Int(x as i64)
    }
}

impl From<bool> for Field {
    fn from(x: bool) -> Self {
        Field::Bool(x)
    }
}

impl From<&str> for Field {
    fn from(x: &str) -> Self {
        Field::Text(x.to_string())
    }
}

impl From<String> for Field {
    fn from(x: String) -> Self {
        Field::Text(x)
    }
}

impl From<Vec<f64>> for Field {
    fn from(x: Vec<f64>) -> Self {
        Field::Floats(x)
    }
}

fn float_value(x: f64) -> Value {
    match Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None => Value::String(format!("{x}")),
    }
}

impl Field {
    fn to_value(&self) -> Value {
        match self {
            Field::Float(x) => float_value(*x),
            Field::Int(i) => Value::from(*i),
            Field::Bool(b) => Value::Bool(*b),
            Field::Text(s) => Value::String(s.clone()),
            Field::Floats(v) => Value::Array(v.iter().map(|&x| float_value(x)).collect()),
        }
    }

    fn human(&self) -> String {
        match self {
            Field::Float(x) => format!("{x}"),
            Field::Int(i) => format!("{i}"),
            Field::Bool(b) => format!("{b}"),
            Field::Text(s) => s.clone(),
            Field::Floats(v) => {
                let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
                format!("[{}]", parts.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub command: String,
    pub argv: Vec<String>,
    /// `sha256:<hex>` of the input file, when there is one.
    pub inputs_digest: Option<String>,
    pub results: BTreeMap<String, Field>,
    pub flags: BTreeMap<String, bool>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str, argv: &[String]) -> Self {
        Self {
            command: command.to_string(),
            argv: argv.to_vec(),
            ..Self::default()
        }
    }

    pub fn result(&mut self, key: &str, value: impl Into<Field>) -> &mut Self {
        self.results.insert(key.to_string(), value.into());
        self
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        self.flags.insert(key.to_string(), value);
        self
    }

    pub fn warn(&mut self, message: impl Into<String>) -> &mut Self {
        self.warnings.push(message.into());
        self
    }

    pub fn to_value(&self) -> Value {
        let mut root = Map::new();
        root.insert("command".into(), Value::String(self.command.clone()));
        root.insert(
            "argv".into(),
            Value::Array(self.argv.iter().cloned().map(Value::String).collect()),
        );
        root.insert(
            "inputs_digest".into(),
            self.inputs_digest.clone().map_or(Value::Null, Value::String),
        );
        root.insert(
            "results".into(),
            Value::Object(self.results.iter().map(|(k, v)| (k.clone(), v.to_value())).collect()),
        );
        root.insert(
            "flags".into(),
            Value::Object(self.flags.iter().map(|(k, &v)| (k.clone(), Value::Bool(v))).collect()),
        );
        root.insert(
            "warnings".into(),
            Value::Array(self.warnings.iter().cloned().map(Value::String).collect()),
        );
        let mut versions = Map::new();
        versions.insert("qconc".into(), Value::String(env!("CARGO_PKG_VERSION").into()));
        root.insert("versions".into(), Value::Object(versions));
        Value::Object(root)
    }

    pub fn to_json(&self) -> String {
        canonical_json(&self.to_value())
    }

    /// `key: value` lines for terminals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.results {
            let _ = writeln!(out, "{k}: {}", v.human());
        }
        for (k, v) in &self.flags {
            let _ = writeln!(out, "{k}: {v}");
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

/// Serialize any JSON value canonically, with a trailing newline.
pub fn canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

fn write_number(out: &mut String, n: &Number) {
    if let Some(i) = n.as_i64() {
        let _ = write!(out, "{i}");
    } else if let Some(u) = n.as_u64() {
        let _ = write!(out, "{u}");
    } else {
        let x = n.as_f64().expect("JSON numbers are i64, u64 or f64");
        let _ = write!(out, "{x:.16e}");
    }
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_value(out: &mut String, value: &Value, level: usize) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => write_number(out, n),
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                indent(out, level + 1);
                write_value(out, item, level + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (k, key) in keys.iter().enumerate() {
                indent(out, level + 1);
                out.push_str(&serde_json::to_string(key).expect("strings serialize"));
                out.push_str(": ");
                write_value(out, &map[*key], level + 1);
                out.push_str(if k + 1 < keys.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Report {
        let mut r = Report::new("bound", &["bound".into(), "x.json".into()]);
        r.inputs_digest = Some("sha256:00".into());
        r.result("d_bound", 0.25)
            .result("rank", 4usize)
            .result("lambda", vec![0.625, 0.125, 0.125, 0.125])
            .result("label", "werner")
            .flag("clamped", false)
            .warn("nothing");
        r
    }

    #[test]
    fn keys_are_sorted_and_floats_have_17_digits() {
        let text = sample().to_json();
        assert!(text.contains("\"d_bound\": 2.5000000000000000e-1"));
        assert!(text.contains("\"rank\": 4"));
        let argv = text.find("\"argv\"").unwrap();
        let command = text.find("\"command\"").unwrap();
        let versions = text.find("\"versions\"").unwrap();
        assert!(argv < command && command < versions);
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let text = sample().to_json();
        let parsed: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(canonical_json(&parsed), text);
    }

    #[test]
    fn non_finite_floats_become_strings() {
        let mut r = Report::new("roof", &[]);
        r.result("value", f64::INFINITY);
        let text = r.to_json();
        assert!(text.contains("\"value\": \"inf\""));
        let parsed: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(canonical_json(&parsed), text);
    }

    proptest! {
        #[test]
        fn any_float_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let mut r = Report::new("p", &[]);
            r.result("x", x).result("v", vec![x, -x]);
            let text = r.to_json();
            let parsed: Value = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(canonical_json(&parsed), text.clone());
            prop_assert_eq!(parsed["results"]["x"].as_f64().unwrap().to_bits(), x.to_bits());
        }
    }
}
