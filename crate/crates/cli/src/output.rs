//! Output records, number formatting and error reporting.

use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Number, Value};

use setcount::Error;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

/// One JSON line of output.
#[derive(Debug, Serialize)]
pub struct OutputRecord {
    pub schema_version: &'static str,
    pub command: String,
    pub inputs: Value,
    pub results: Value,
}

impl OutputRecord {
    pub fn new(command: &str, inputs: Value, results: Value) -> Self {
        OutputRecord {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            inputs: normalize(inputs),
            results: normalize(results),
        }
    }
}

/// `v` rounded to 15 significant digits as a JSON number; `null` if not finite.
pub fn real(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    let text = format_real(v);
    Value::Number(text.parse::<Number>().expect("formatted real is a JSON number"))
}

/// Plain decimal for moderate magnitudes, exponent notation otherwise.
pub fn format_real(v: f64) -> String {
    if v == 0.0 {
        return "0.0".into();
    }
    let sci = format!("{v:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..15).contains(&exp) {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        let m = if m.contains('.') { m.to_string() } else { format!("{m}.0") };
        return format!("{m}e{exp}");
    }
    let decimals = (14 - exp).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        let t = s.trim_end_matches('0');
        if t.ends_with('.') {
            format!("{t}0")
        } else {
            t.to_string()
        }
    } else {
        format!("{s}.0")
    }
}

/// Rounds every floating-point number in `v` to 15 significant digits.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => real(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(items) => Value::Array(items.into_iter().map(normalize).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

/// Writes records as JSON lines or as TSV.
pub struct Printer<W: Write> {
    out: W,
    format: Format,
    header_written: bool,
}

impl<W: Write> Printer<W> {
    pub fn new(out: W, format: Format) -> Self {
        Printer { out, format, header_written: false }
    }

    pub fn record(&mut self, rec: &OutputRecord) -> std::io::Result<()> {
        match self.format {
            Format::Json => writeln!(self.out, "{}", serde_json::to_string(rec).expect("serializable")),
            Format::Tsv => {
                let rows = tsv_rows(&rec.results);
                if !self.header_written {
                    writeln!(self.out, "{}", rows.0.join("\t"))?;
                    self.header_written = true;
                }
                for row in rows.1 {
                    writeln!(self.out, "{}", row.join("\t"))?;
                }
                Ok(())
            }
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => "NA".into(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    }
}

/// Header and rows for TSV. A `rows` array of objects becomes a table;
/// anything else becomes a single row of its top-level fields.
fn tsv_rows(results: &Value) -> (Vec<String>, Vec<Vec<String>>) {
    if let Some(Value::Array(rows)) = results.get("rows") {
        let header: Vec<String> = match rows.first() {
            Some(Value::Object(m)) => m.keys().cloned().collect(),
            _ => Vec::new(),
        };
        let body = rows
            .iter()
            .map(|r| header.iter().map(|h| cell(r.get(h).unwrap_or(&Value::Null))).collect())
            .collect();
        return (header, body);
    }
    let empty = Map::new();
    let map = results.as_object().unwrap_or(&empty);
    let mut header = Vec::new();
    let mut row = Vec::new();
    flatten("", map, &mut header, &mut row);
    (header, vec![row])
}

fn flatten(prefix: &str, map: &Map<String, Value>, header: &mut Vec<String>, row: &mut Vec<String>) {
    for (k, v) in map {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(inner) => flatten(&key, inner, header, row),
            other => {
                header.push(key);
                row.push(cell(other));
            }
        }
    }
}

/// Exit status for a library error: 3 precision, 4 retry budget, 1 internal,
/// 2 for every input or domain problem.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Precision(_) => 3,
        Error::RetryBudget { .. } => 4,
        Error::InternalConsistency(_) => 1,
        _ => 2,
    }
}

/// The JSON error record written to stderr.
pub fn error_record(command: &str, e: &Error) -> Value {
    let mut err = Map::new();
    err.insert("kind".into(), Value::String(e.kind().into()));
    err.insert("message".into(), Value::String(e.to_string()));
    if let Error::RetryBudget { attempts, acceptance_estimate } = e {
        err.insert("attempts".into(), Value::from(*attempts));
        err.insert("acceptance_estimate".into(), real(*acceptance_estimate));
    }
    let mut rec = Map::new();
    rec.insert("schema_version".into(), Value::String(SCHEMA_VERSION.into()));
    rec.insert("command".into(), Value::String(command.into()));
    rec.insert("error".into(), Value::Object(err));
    Value::Object(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_have_fifteen_significant_digits() {
        assert_eq!(format_real(0.48860251190292), "0.48860251190292");
        assert_eq!(format_real(1.0 / 3.0), "0.333333333333333");
        assert_eq!(format_real(2.0), "2.0");
        assert_eq!(format_real(-1234.5), "-1234.5");
        assert_eq!(format_real(1e-7), "1.0e-7");
        assert_eq!(format_real(6.02214076e23), "6.02214076e23");
        assert_eq!(format_real(std::f64::consts::PI * 1e-3), "0.00314159265358979");
        assert_eq!(real(f64::INFINITY), Value::Null);
        assert_eq!(real(0.1).to_string(), "0.1");
    }

    #[test]
    fn normalize_rounds_nested_floats() {
        let v = serde_json::json!({"a": [0.1 + 0.2, 3], "b": {"c": 2.0f64.sqrt()}});
        assert_eq!(normalize(v).to_string(), r#"{"a":[0.3,3],"b":{"c":1.4142135623731}}"#);
    }

    #[test]
    fn tsv_tables_and_flat_records() {
        let rec = OutputRecord::new(
            "compare",
            Value::Null,
            serde_json::json!({"rows": [{"n": 1, "ratio": 0.5}, {"n": 2, "ratio": null}]}),
        );
        let mut buf = Vec::new();
        Printer::new(&mut buf, Format::Tsv).record(&rec).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n\tratio\n1\t0.5\n2\tNA\n");

        let rec = OutputRecord::new("x", Value::Null, serde_json::json!({"a": "7", "b": {"c": [1, 2]}}));
        let mut buf = Vec::new();
        Printer::new(&mut buf, Format::Tsv).record(&rec).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a\tb.c\n7\t1,2\n");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Domain("x".into())), 2);
        assert_eq!(exit_code(&Error::Precision("x".into())), 3);
        assert_eq!(exit_code(&Error::RetryBudget { attempts: 1, acceptance_estimate: 0.0 }), 4);
    }
}
