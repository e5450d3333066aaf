//! Report rendering. Every floating-point value is printed with 17
//! significant digits (`{:.16e}`) in both JSON and CSV, so the two formats
//! carry identical numbers.

use std::io::Write;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

use crate::{CliError, Format, RunConfig};

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        let s = format!("{x:.16e}");
        // explicit exponent sign, matching how serde_json prints these numbers
        match s.split_once('e') {
            Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
            _ => s,
        }
    } else {
        format!("{x}").to_lowercase()
    }
}

/// JSON number carrying exactly the [`fmt_f64`] text.
pub fn json_f64(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(Number::from_str(&fmt_f64(x)).expect("formatted float parses"))
}

/// Rewrites every float in `value` to 17-significant-digit form.
pub fn fix_precision(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                *value = json_f64(x);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(fix_precision),
        Value::Object(map) => map.values_mut().for_each(fix_precision),
        _ => {}
    }
}

/// An ordered, flat report. Numeric scalars, booleans and numeric arrays
/// go to CSV; strings and nested structures appear in JSON only.
#[derive(Default)]
pub struct Record {
    fields: Vec<(String, Value)>,
}

impl Record {
    pub fn new() -> Self {
        Record::default()
    }

    pub fn num(mut self, name: &str, x: f64) -> Self {
        self.fields.push((name.into(), json_f64(x)));
        self
    }

    pub fn int(mut self, name: &str, x: u64) -> Self {
        self.fields.push((name.into(), Value::from(x)));
        self
    }

    pub fn flag(mut self, name: &str, b: bool) -> Self {
        self.fields.push((name.into(), Value::Bool(b)));
        self
    }

    pub fn text(mut self, name: &str, s: &str) -> Self {
        self.fields.push((name.into(), Value::String(s.into())));
        self
    }

    pub fn nums(mut self, name: &str, xs: &[f64]) -> Self {
        self.fields.push((
            name.into(),
            Value::Array(xs.iter().map(|&x| json_f64(x)).collect()),
        ));
        self
    }

    pub fn value(mut self, name: &str, mut v: Value) -> Self {
        fix_precision(&mut v);
        self.fields.push((name.into(), v));
        self
    }

    pub fn to_json(&self) -> String {
        let map: Map<String, Value> = self.fields.iter().cloned().collect();
        let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("json");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut header = Vec::new();
        let mut row = Vec::new();
        let mut push = |name: String, v: &Value| match v {
            Value::Number(n) => {
                header.push(name);
                row.push(n.to_string());
            }
            Value::Bool(b) => {
                header.push(name);
                row.push(if *b { "1".into() } else { "0".into() });
            }
            Value::Null => {
                header.push(name);
                row.push("nan".into());
            }
            _ => {}
        };
        for (name, v) in &self.fields {
            match v {
                Value::Array(items) if items.iter().all(|i| i.is_number() || i.is_null()) => {
                    for (k, item) in items.iter().enumerate() {
                        push(format!("{name}_{k}"), item);
                    }
                }
                other => push(name.clone(), other),
            }
        }
        format!("{}\n{}\n", header.join(","), row.join(","))
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

pub fn emit(config: &RunConfig, text: &str) -> Result<(), CliError> {
    match &config.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Input(format!("stdout: {e}")))
        }
    }
}
