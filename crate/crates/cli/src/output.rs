//! Report rendering. JSON objects keep keys sorted; exact rationals are
//! written as `"num/den"` strings next to an advisory float.

use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use clap::ValueEnum;
use selfsim_core::{ratio, BigInt, BigRational, BigUint};
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A command result in both shapes; the table is what `--format csv` prints.
pub struct Report {
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn render(&self, format: Format) -> io::Result<Vec<u8>> {
        match format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(&self.json)?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let mut writer = csv::Writer::from_writer(Vec::new());
                writer.write_record(&self.header)?;
                for row in &self.rows {
                    writer.write_record(row)?;
                }
                writer.into_inner().map_err(|e| e.into_error())
            }
        }
    }

    pub fn emit(&self, format: Format, output: Option<&Path>) -> io::Result<()> {
        let bytes = self.render(format)?;
        match output {
            Some(path) => fs::write(path, bytes),
            None => io::stdout().lock().write_all(&bytes),
        }
    }
}

pub fn object<const N: usize>(fields: [(&str, Value); N]) -> Value {
    Value::Object(
        fields
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect::<Map<_, _>>(),
    )
}

pub fn rational(value: &BigRational) -> Value {
    Value::String(ratio::to_string(value))
}

pub fn float(value: f64) -> Value {
    Number::from_f64(value).map_or(Value::Null, Value::Number)
}

pub fn rational_float(value: &BigRational) -> Value {
    float(ratio::to_f64(value))
}

/// Arbitrary-size integer as a JSON number.
pub fn int(value: &BigInt) -> Value {
    Value::Number(Number::from_str(&value.to_string()).expect("integers are valid JSON numbers"))
}

pub fn uint(value: &BigUint) -> Value {
    Value::Number(Number::from_str(&value.to_string()).expect("integers are valid JSON numbers"))
}

pub fn float_cell(value: f64) -> String {
    // `{:?}` keeps a decimal point and round-trips
    format!("{value:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_sorted_and_numbers_exact() {
        let big = BigInt::from(8u32).pow(40);
        let report = Report {
            json: object([
                ("z", int(&big)),
                ("a", rational(&BigRational::new(1.into(), 4.into()))),
            ]),
            header: vec!["n", "value"],
            rows: vec![vec!["0".into(), "1/1".into()]],
        };
        let text = String::from_utf8(report.render(Format::Json).unwrap()).unwrap();
        assert!(text.find("\"a\"").unwrap() < text.find("\"z\"").unwrap());
        assert!(text.contains(&big.to_string()));
        assert!(text.contains("\"1/4\""));
        let csv = String::from_utf8(report.render(Format::Csv).unwrap()).unwrap();
        assert_eq!(csv, "n,value\n0,1/1\n");
    }

    #[test]
    fn non_finite_floats_become_null() {
        assert_eq!(float(f64::INFINITY), Value::Null);
        assert_eq!(float_cell(0.5), "0.5");
        assert_eq!(float_cell(0.0), "0.0");
    }
}
