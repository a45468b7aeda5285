use std::fmt;

use aim_core::problems::Kappa;
use aim_core::symbolic::ExtReal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::args::Format;
use crate::config::RunConfig;
use crate::error::CliError;

/// Significant digits of every emitted number.
pub const OUTPUT_DIGITS: usize = 10;

/// A number rounded to [`OUTPUT_DIGITS`] significant digits; written as a
/// plain JSON number.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Num(pub f64);

impl Num {
    pub fn new(value: f64) -> Self {
        if value == 0.0 || !value.is_finite() {
            return Num(value);
        }
        let text = format!("{:.*e}", OUTPUT_DIGITS - 1, value);
        Num(text.parse().expect("formatted float parses"))
    }

    pub fn from_ext(value: &ExtReal) -> Self {
        let text = value.to_sig_string(OUTPUT_DIGITS);
        Num(text.parse().unwrap_or_else(|_| value.to_f64()))
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        f64::deserialize(d).map(Num)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub k: usize,
    pub epsilon: Num,
}

/// One eigenstate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub kappa: i32,
    pub a_tilde: Option<Num>,
    pub gamma: Option<Num>,
    pub beta: Option<Num>,
    pub n: u32,
    pub l: u32,
    pub epsilon: Option<Num>,
    pub e_physical: Option<Num>,
    pub k_converged: Option<usize>,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TracePoint>>,
}

impl StateRecord {
    /// A reduced-mode configuration that re-solves this state.
    pub fn to_config(&self) -> Result<RunConfig, CliError> {
        let kappa = Kappa::try_from(self.kappa)?;
        let missing = |what: &str| CliError::Validation(format!("record has no {what}"));
        let x = |v: Num| ExtReal::from_f64(v.0, aim_core::symbolic::DEFAULT_PRECISION);
        let a_tilde = self.a_tilde.ok_or_else(|| missing("a_tilde"))?;
        let gamma = self.gamma.ok_or_else(|| missing("gamma"))?;
        let beta = self.beta.map_or(kappa.default_beta(), |b| b.0);
        Ok(RunConfig::for_state(
            kappa,
            x(a_tilde),
            x(gamma),
            ExtReal::from_f64(beta, aim_core::symbolic::DEFAULT_PRECISION),
            self.n,
            self.l,
        ))
    }
}

/// One reference-table cell, computed against expected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub table: u8,
    pub row: String,
    pub column: String,
    pub computed: Option<Num>,
    pub expected: Num,
    pub delta: Option<Num>,
    pub tolerance: Num,
    pub pass: bool,
}

/// One wavefunction sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub kappa: i32,
    pub n: u32,
    pub l: u32,
    pub r: Num,
    pub value: Num,
}

/// Column layout for CSV output.
pub trait Tabular {
    const HEADER: &'static [&'static str];

    fn row(&self) -> Vec<String>;
}

fn cell<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(String::new, |v| v.to_string())
}

impl Tabular for StateRecord {
    const HEADER: &'static [&'static str] = &[
        "kappa", "a_tilde", "gamma", "beta", "n", "l", "epsilon", "e_physical", "k_converged", "status", "trace",
    ];

    fn row(&self) -> Vec<String> {
        let trace = self.trace.as_ref().map_or_else(String::new, |t| {
            t.iter().map(|p| format!("{}:{}", p.k, p.epsilon)).collect::<Vec<_>>().join(";")
        });
        vec![
            self.kappa.to_string(),
            cell(&self.a_tilde),
            cell(&self.gamma),
            cell(&self.beta),
            self.n.to_string(),
            self.l.to_string(),
            cell(&self.epsilon),
            cell(&self.e_physical),
            cell(&self.k_converged),
            self.status.clone(),
            trace,
        ]
    }
}

impl Tabular for CellRecord {
    const HEADER: &'static [&'static str] =
        &["table", "row", "column", "computed", "expected", "delta", "tolerance", "pass"];

    fn row(&self) -> Vec<String> {
        vec![
            self.table.to_string(),
            self.row.clone(),
            self.column.clone(),
            cell(&self.computed),
            self.expected.to_string(),
            cell(&self.delta),
            self.tolerance.to_string(),
            self.pass.to_string(),
        ]
    }
}

impl Tabular for SampleRecord {
    const HEADER: &'static [&'static str] = &["kappa", "n", "l", "r", "value"];

    fn row(&self) -> Vec<String> {
        vec![
            self.kappa.to_string(),
            self.n.to_string(),
            self.l.to_string(),
            self.r.to_string(),
            self.value.to_string(),
        ]
    }
}

/// Records as a pretty JSON array or a CSV table with header.
pub fn render<T: Serialize + Tabular>(records: &[T], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(records).map_err(|e| CliError::Output(e.to_string()))?;
            text.push('\n');
            Ok(text)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let out = |e: csv::Error| CliError::Output(e.to_string());
            w.write_record(T::HEADER).map_err(out)?;
            for r in records {
                w.write_record(r.row()).map_err(out)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
        }
    }
}
