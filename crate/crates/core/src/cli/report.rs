//! Machine-readable reports with bit-stable number formatting.

use serde::Serialize;
use serde_json::Value;

use super::instance::LoadError;
use crate::check::Check;
use crate::error::{Error, Witness};

/// Structured error embedded in a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pointer: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub estimates: Vec<f64>,
}

impl ErrorReport {
    fn plain(kind: &str, message: String) -> Self {
        ErrorReport { kind: kind.into(), message, witness: None, pointer: None, line: None, column: None, estimates: vec![] }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::plain("usage", message.into())
    }
}

impl From<&Error> for ErrorReport {
    fn from(e: &Error) -> Self {
        let kind = match e {
            Error::Shape(_) => "shape",
            Error::Parameter(_) => "parameter",
            Error::Domain(_) => "domain",
            Error::Invalid(_) => "invalid",
            Error::Precondition { .. } => "precondition",
            Error::Hypothesis { .. } => "hypothesis",
            Error::Resource(_) => "resource",
            Error::Numeric { .. } => "numeric",
        };
        let mut r = Self::plain(kind, e.to_string());
        r.witness = e.witness().cloned();
        if let Error::Numeric { estimates, .. } = e {
            r.estimates = estimates.clone();
        }
        r
    }
}

impl From<&LoadError> for ErrorReport {
    fn from(e: &LoadError) -> Self {
        let mut r = Self::plain(
            match e {
                LoadError::Io { .. } => "io",
                LoadError::Parse { .. } => "parse",
                LoadError::Validation { .. } => "validation",
            },
            e.to_string(),
        );
        match e {
            LoadError::Parse { line, column, .. } => {
                r.line = Some(*line);
                r.column = Some(*column);
            }
            LoadError::Validation { pointer, .. } => r.pointer = Some(pointer.clone()),
            LoadError::Io { .. } => {}
        }
        r
    }
}

/// A sub-command of `verify-all` whose preconditions the instance does not meet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    pub command: String,
    pub reason: ErrorReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub instance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub exit_code: i32,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<Skipped>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl Report {
    pub fn new(command: &str, instance: &str) -> Self {
        Report {
            tool: "lipext".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            instance: instance.into(),
            seed: None,
            exit_code: 0,
            checks: vec![],
            skipped: vec![],
            result: None,
            error: None,
            timing: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// A real with 17 significant digits, which round-trips every `f64`.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, k: usize| out.extend(std::iter::repeat_n("  ", k));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => out.push_str(&u.to_string()),
            (None, Some(i)) => out.push_str(&i.to_string()),
            _ => out.push_str(&format_real(n.as_f64().expect("finite JSON number"))),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
        Value::Array(items) if items.iter().all(|i| !i.is_array() && !i.is_object()) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, indent);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, item, indent + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&serde_json::to_string(key).expect("strings serialize"));
                out.push_str(": ");
                write_value(out, item, indent + 1);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

/// Pretty JSON with every float written by [`format_real`]. Key order follows
/// the struct definitions, so the output is deterministic.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report types serialize");
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    out
}

/// One row per check, plus one row for an embedded error.
pub fn to_csv(report: &Report) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["name", "bound", "achieved", "holds", "witness"]).expect("in-memory write");
    for c in &report.checks {
        let witness = serde_json::to_string(&c.witness).expect("witness serializes");
        w.write_record([c.name.as_str(), &format_real(c.bound), &format_real(c.achieved), if c.holds { "true" } else { "false" }, &witness])
            .expect("in-memory write");
    }
    if let Some(e) = &report.error {
        let witness = e.witness.as_ref().map_or(String::new(), |w| serde_json::to_string(w).expect("witness serializes"));
        w.write_record([format!("error/{}", e.kind).as_str(), "", "", "false", &witness]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is UTF-8")
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => to_json(report),
        Format::Csv => to_csv(report),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_have_seventeen_digits_and_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, 0.0] {
            let s = format_real(v);
            assert_eq!(s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).count(), 17);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_real(f64::INFINITY), "inf");
    }

    #[test]
    fn json_output_is_valid_and_stable() {
        let mut r = Report::new("verify-all", "x.json");
        r.checks.push(Check::at_most("a", 0.5, 1.0, 0.0, Witness::Pair { x: 0, y: 1 }));
        r.checks.push(Check::at_most("b", f64::INFINITY, 1.0, 0.0, Witness::None));
        r.result = Some(serde_json::json!({"values": [[1.0, 2.5], [3.0, 4.0]], "n": 3}));
        let text = to_json(&r);
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["checks"][0]["achieved"].as_f64(), Some(0.5));
        assert_eq!(back["checks"][1]["achieved"], "inf");
        assert_eq!(back["result"]["n"], 3);
        assert_eq!(text, to_json(&r));
    }

    #[test]
    fn csv_has_one_row_per_check() {
        let mut r = Report::new("x", "y");
        r.checks.push(Check::at_most("a", 2.0, 1.0, 0.0, Witness::Point { x: 4 }));
        let text = to_csv(&r);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("a,1.0000000000000000e0,2.0000000000000000e0,false,"));
    }
}
