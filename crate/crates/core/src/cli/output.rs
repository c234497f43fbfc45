//! Output records and their text, JSON-lines and CSV renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::verify::{InequalityVerdict, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Inputs of one computation. Absent fields are omitted from JSON and left
/// blank in CSV.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub check: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl Inputs {
    pub fn new(check: &str) -> Self {
        Self {
            check: check.to_string(),
            ..Self::default()
        }
    }

    pub fn pair(mut self, alpha1: f64, alpha2: f64) -> Self {
        self.alpha1 = Some(alpha1);
        self.alpha2 = Some(alpha2);
        self
    }

    pub fn rho(mut self, rho: f64) -> Self {
        self.rho = Some(rho);
        self
    }

    const COLUMNS: [&'static str; 15] = [
        "check", "alpha1", "alpha2", "rho", "sigma1", "sigma2", "nu", "m", "p", "q", "z", "grid",
        "samples", "seed", "tolerance",
    ];

    fn cells(&self) -> Vec<String> {
        fn f<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(T::to_string).unwrap_or_default()
        }
        vec![
            self.check.clone(),
            f(&self.alpha1),
            f(&self.alpha2),
            f(&self.rho),
            f(&self.sigma1),
            f(&self.sigma2),
            f(&self.nu),
            f(&self.m),
            f(&self.p),
            f(&self.q),
            f(&self.z),
            f(&self.grid),
            f(&self.samples),
            f(&self.seed),
            f(&self.tolerance),
        ]
    }

    fn describe(&self) -> String {
        let mut s = self.check.clone();
        let named = Self::COLUMNS.iter().skip(1).zip(self.cells().into_iter().skip(1));
        for (name, cell) in named {
            if !cell.is_empty() {
                let _ = write!(s, " {name}={cell}");
            }
        }
        s
    }
}

/// One output row: a ratio compared against a threshold, or a bare computed
/// value (then `threshold`, `margin` and `verdict` are null).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub inputs: Inputs,
    pub ratio: f64,
    pub threshold: Option<f64>,
    pub margin: Option<f64>,
    pub verdict: Option<Verdict>,
    pub error_bound: f64,
    pub method: String,
    /// Set on Monte Carlo records: whether `error_bound` (the standard error)
    /// is a meaningful error bar.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance_finite: Option<bool>,
}

impl Record {
    pub fn value(inputs: Inputs, value: f64, error_bound: f64, method: &str) -> Self {
        Self {
            inputs,
            ratio: value,
            threshold: None,
            margin: None,
            verdict: None,
            error_bound,
            method: method.to_string(),
            variance_finite: None,
        }
    }

    pub fn verdict(inputs: Inputs, v: &InequalityVerdict, method: &str) -> Self {
        let mut inputs = inputs;
        inputs.tolerance = Some(v.tolerance);
        Self {
            inputs,
            ratio: v.ratio,
            threshold: Some(v.threshold),
            margin: Some(v.margin),
            verdict: Some(v.verdict),
            error_bound: v.error_bound,
            method: method.to_string(),
            variance_finite: None,
        }
    }

    pub fn is_violation(&self) -> bool {
        self.verdict == Some(Verdict::Violated)
    }
}

const RECORD_COLUMNS: [&str; 7] = [
    "ratio", "threshold", "margin", "verdict", "error_bound", "method", "variance_finite",
];

pub fn render(records: &[Record], summary: Option<&Summary>, format: Format) -> String {
    match format {
        Format::Json => {
            let mut out = String::new();
            for r in records {
                out.push_str(&serde_json::to_string(r).expect("records serialize"));
                out.push('\n');
            }
            if let Some(s) = summary {
                out.push_str(&serde_json::to_string(s).expect("summary serializes"));
                out.push('\n');
            }
            out
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let header: Vec<&str> = Inputs::COLUMNS.iter().chain(RECORD_COLUMNS.iter()).copied().collect();
            w.write_record(&header).expect("in-memory write");
            for r in records {
                let mut row = r.inputs.cells();
                row.push(r.ratio.to_string());
                row.push(r.threshold.map(|v| v.to_string()).unwrap_or_default());
                row.push(r.margin.map(|v| v.to_string()).unwrap_or_default());
                row.push(r.verdict.map(|v| v.as_str().to_string()).unwrap_or_default());
                row.push(r.error_bound.to_string());
                row.push(r.method.clone());
                row.push(r.variance_finite.map(|v| v.to_string()).unwrap_or_default());
                w.write_record(&row).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("flush to Vec")).expect("utf-8 cells")
        }
        Format::Text => {
            let mut out = String::new();
            for r in records {
                let _ = write!(out, "{}: {} = {:.12}", r.inputs.describe(), r.method, r.ratio);
                if let (Some(t), Some(m), Some(v)) = (r.threshold, r.margin, r.verdict) {
                    let _ = write!(out, " vs {t:.12} (margin {m:+.3e}) -> {}", v.as_str());
                }
                let _ = writeln!(out, " [error <= {:.1e}]", r.error_bound);
            }
            if let Some(s) = summary {
                out.push_str(&s.to_text());
            }
            out
        }
    }
}

/// Verdict counts per check kind.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub summary: Vec<SummaryRow>,
    /// Seconds since the Unix epoch; only present when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub check: String,
    pub holds_strict: usize,
    pub equality: usize,
    pub violated: usize,
}

impl Summary {
    pub fn from_records(records: &[Record]) -> Self {
        let mut rows: Vec<SummaryRow> = Vec::new();
        for r in records {
            let Some(v) = r.verdict else { continue };
            let idx = match rows.iter().position(|row| row.check == r.inputs.check) {
                Some(i) => i,
                None => {
                    rows.push(SummaryRow {
                        check: r.inputs.check.clone(),
                        holds_strict: 0,
                        equality: 0,
                        violated: 0,
                    });
                    rows.len() - 1
                }
            };
            let row = &mut rows[idx];
            match v {
                Verdict::HoldsStrict => row.holds_strict += 1,
                Verdict::Equality => row.equality += 1,
                Verdict::Violated => row.violated += 1,
            }
        }
        Self {
            summary: rows,
            timestamp: None,
        }
    }

    fn to_text(&self) -> String {
        let mut out = String::from("\nsummary:\n");
        if let Some(t) = self.timestamp {
            let _ = writeln!(out, "  timestamp {t}");
        }
        for row in &self.summary {
            let _ = writeln!(
                out,
                "  {:<26} holds_strict={:<5} equality={:<5} violated={}",
                row.check, row.holds_strict, row.equality, row.violated
            );
        }
        out
    }
}
