//! Result tables and their CSV form.
//!
//! Every float is written with a fixed number of decimals, so a table
//! serializes to the same bytes on every run and platform.

use std::io::Write;
use std::path::Path;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DecodingRow {
    pub length: usize,
    pub message: usize,
    pub error_rate: f64,
    pub reruns: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TamperRow {
    pub length: usize,
    pub epsilon: f64,
    pub miss_rate: f64,
    pub false_alarm_rate: f64,
    pub combined_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub delta: f64,
    pub mu: f64,
    pub nu: f64,
    pub mu_delta: f64,
    pub nu_delta: f64,
    pub kl: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ResultTable {
    Decoding(Vec<DecodingRow>),
    Tamper(Vec<TamperRow>),
    Scan(Vec<ScanRow>),
}

fn rate(v: f64) -> String {
    format!("{v:.6}")
}

fn coord(v: f64) -> String {
    format!("{v:.4}")
}

fn value(v: f64) -> String {
    format!("{v:.10}")
}

impl ResultTable {
    pub fn header(&self) -> &'static [&'static str] {
        match self {
            ResultTable::Decoding(_) => &["length", "message", "error_rate", "reruns"],
            ResultTable::Tamper(_) => &["length", "epsilon", "miss_rate", "false_alarm_rate", "combined_rate"],
            ResultTable::Scan(_) => &["delta", "mu", "nu", "mu_delta", "nu_delta", "kl"],
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ResultTable::Decoding(r) => r.len(),
            ResultTable::Tamper(r) => r.len(),
            ResultTable::Scan(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn records(&self) -> Vec<Vec<String>> {
        match self {
            ResultTable::Decoding(rows) => rows
                .iter()
                .map(|r| vec![r.length.to_string(), r.message.to_string(), rate(r.error_rate), r.reruns.to_string()])
                .collect(),
            ResultTable::Tamper(rows) => rows
                .iter()
                .map(|r| {
                    vec![
                        r.length.to_string(),
                        coord(r.epsilon),
                        rate(r.miss_rate),
                        rate(r.false_alarm_rate),
                        rate(r.combined_rate),
                    ]
                })
                .collect(),
            ResultTable::Scan(rows) => rows
                .iter()
                .map(|r| {
                    vec![
                        coord(r.delta),
                        coord(r.mu),
                        coord(r.nu),
                        value(r.mu_delta),
                        value(r.nu_delta),
                        value(r.kl),
                    ]
                })
                .collect(),
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for record in self.records() {
            w.write_record(&record)?;
        }
        w.flush()
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is ascii")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| HarnessError::io(path, e))
    }
}

/// Mean of `error_rate` over messages at `length`, or `None` if absent.
pub fn mean_error_at(rows: &[DecodingRow], length: usize) -> Option<f64> {
    let at: Vec<f64> = rows.iter().filter(|r| r.length == length).map(|r| r.error_rate).collect();
    (!at.is_empty()).then(|| at.iter().sum::<f64>() / at.len() as f64)
}

/// The row for `(length, ε)` matched on the printed value of `ε`.
pub fn tamper_row(rows: &[TamperRow], length: usize, epsilon: f64) -> Option<&TamperRow> {
    rows.iter()
        .find(|r| r.length == length && coord(r.epsilon) == coord(epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let t = ResultTable::Tamper(vec![TamperRow {
            length: 50,
            epsilon: 0.1,
            miss_rate: 0.16,
            false_alarm_rate: 0.12,
            combined_rate: 0.28,
        }]);
        assert_eq!(
            t.to_csv(),
            "length,epsilon,miss_rate,false_alarm_rate,combined_rate\n50,0.1000,0.160000,0.120000,0.280000\n"
        );
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn summaries() {
        let rows = vec![
            DecodingRow { length: 10, message: 0, error_rate: 0.5, reruns: 1 },
            DecodingRow { length: 10, message: 1, error_rate: 0.25, reruns: 1 },
        ];
        assert_eq!(mean_error_at(&rows, 10), Some(0.375));
        assert_eq!(mean_error_at(&rows, 20), None);
    }
}
