//! Machine-readable run reports.
//!
//! A report serializes to JSON (see `docs/report-schema.json`) or to CSV
//! with one record per result key. Floating-point results are emitted
//! with 12 significant digits in scientific notation, which round-trips
//! losslessly through the schema.

use std::collections::BTreeMap;

use serde::Serialize;

/// Significant digits carried by every emitted floating-point number.
pub const SIG_DIGITS: usize = 12;

pub fn fmt_sig(x: f64) -> String {
    format!("{:.*e}", SIG_DIGITS - 1, x)
}

#[derive(Clone, Debug)]
pub enum ResultValue {
    Number(f64),
    Integer(u64),
    Bool(bool),
    Text(String),
}

impl ResultValue {
    pub fn as_csv_field(&self) -> String {
        match self {
            ResultValue::Number(x) => fmt_sig(*x),
            ResultValue::Integer(i) => i.to_string(),
            ResultValue::Bool(b) => b.to_string(),
            ResultValue::Text(t) => t.clone(),
        }
    }
}

impl Serialize for ResultValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ResultValue::Number(x) => {
                if x.is_finite() {
                    let n: serde_json::Number =
                        fmt_sig(*x).parse().map_err(serde::ser::Error::custom)?;
                    n.serialize(s)
                } else {
                    s.serialize_str(&x.to_string())
                }
            }
            ResultValue::Integer(i) => s.serialize_u64(*i),
            ResultValue::Bool(b) => s.serialize_bool(*b),
            ResultValue::Text(t) => s.serialize_str(t),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub results: BTreeMap<String, ResultValue>,
    pub meta: Meta,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            results: BTreeMap::new(),
            meta: Meta {
                version: env!("CARGO_PKG_VERSION").to_string(),
                seed: None,
            },
        }
    }

    pub fn input(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn number(&mut self, key: &str, value: f64) -> &mut Self {
        self.results
            .insert(key.to_string(), ResultValue::Number(value));
        self
    }

    pub fn integer(&mut self, key: &str, value: u64) -> &mut Self {
        self.results
            .insert(key.to_string(), ResultValue::Integer(value));
        self
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        self.results
            .insert(key.to_string(), ResultValue::Bool(value));
        self
    }

    pub fn text(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.results
            .insert(key.to_string(), ResultValue::Text(value.to_string()));
        self
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.meta.seed = Some(seed);
        self
    }

    fn csv_records(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.results {
            out.push_str(&format!(
                "{},{},{}\n",
                self.command,
                key,
                value.as_csv_field()
            ));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Renders one report, or several (a sweep) as a JSON array / stacked CSV
/// records under a single header.
pub fn render(reports: &[Report], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let body = if reports.len() == 1 {
                serde_json::to_string_pretty(&reports[0])
            } else {
                serde_json::to_string_pretty(reports)
            }
            .expect("report serialization cannot fail");
            format!("{body}\n")
        }
        OutputFormat::Csv => {
            let mut out = String::from("command,key,value\n");
            for r in reports {
                out.push_str(&r.csv_records());
            }
            out
        }
    }
}
