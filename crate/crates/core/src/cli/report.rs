use std::fmt;

use num_complex::Complex64;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::numlin::{CMat, RMat};

/// Float that survives JSON: non-finite values are written as strings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_finite() {
            s.serialize_f64(v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

struct NumVisitor;

impl Visitor<'_> for NumVisitor {
    type Value = Num;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
        Ok(Num(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
        Ok(Num(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
        Ok(Num(v as f64))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
        match v {
            "inf" => Ok(Num(f64::INFINITY)),
            "-inf" => Ok(Num(f64::NEG_INFINITY)),
            "nan" => Ok(Num(f64::NAN)),
            _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(NumVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Num(Num),
    Text(String),
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(Num(v))
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Num(n) => write!(f, "{:e}", n.0),
            Value::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub name: String,
    pub value: Value,
}

/// Matrix entry: a bare number, or `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(Num),
    Complex([Num; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedMatrix {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<Entry>>,
}

impl NamedMatrix {
    pub fn real(name: &str, m: &RMat) -> Self {
        let data = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| Entry::Real(Num(m[(i, j)]))).collect()).collect();
        Self { name: name.into(), rows: m.nrows(), cols: m.ncols(), data }
    }

    pub fn complex(name: &str, m: &CMat) -> Self {
        let data = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| Entry::Complex([Num(m[(i, j)].re), Num(m[(i, j)].im)])).collect())
            .collect();
        Self { name: name.into(), rows: m.nrows(), cols: m.ncols(), data }
    }

    /// A list of complex numbers as a single row.
    pub fn list(name: &str, v: &[Complex64]) -> Self {
        Self::complex(name, &CMat::from_row_slice(1, v.len(), v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub tol: Num,
    pub grid_lo: Num,
    pub grid_hi: Num,
    pub grid_count: usize,
    pub seed: u64,
    pub format: String,
}

/// Everything a command produced. The exit code is derived from `verdict`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub command: Vec<String>,
    pub settings: Settings,
    pub verdict: String,
    pub exit_code: i32,
    pub fields: Vec<Field>,
    pub tolerances: Vec<Field>,
    pub matrices: Vec<NamedMatrix>,
    pub warnings: Vec<String>,
    pub error: Option<String>,
}

/// Exit status for a verdict.
pub fn exit_code(verdict: &str) -> i32 {
    match verdict {
        "NI" | "SNI" | "stable" | "verified" | "solved" | "built" | "realizable" => 0,
        "NotNI" | "unstable" | "unverified" | "synthesis-failed" | "assumptions-failed" | "no-stabilizing-solution"
        | "coupling-violated" | "no-solution-found" | "singular-solution" => 1,
        "Indeterminate" | "hypotheses-violated" => 2,
        "malformed-input" => 64,
        "dimension-mismatch" => 65,
        _ => 70,
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{} {}\n", self.tool, self.command.join(" ")));
        let s = &self.settings;
        out.push_str(&format!(
            "settings: tol {:e}, grid {:e}..{:e} x {}, seed {}\n",
            s.tol.0, s.grid_lo.0, s.grid_hi.0, s.grid_count, s.seed
        ));
        out.push_str(&format!("verdict: {} (exit {})\n", self.verdict, self.exit_code));
        if let Some(e) = &self.error {
            out.push_str(&format!("error: {e}\n"));
        }
        for f in &self.fields {
            out.push_str(&format!("  {} = {}\n", f.name, f.value));
        }
        if !self.tolerances.is_empty() {
            out.push_str("tolerances:\n");
            for f in &self.tolerances {
                out.push_str(&format!("  {} = {}\n", f.name, f.value));
            }
        }
        for m in &self.matrices {
            out.push_str(&format!("{} ({}x{}):\n", m.name, m.rows, m.cols));
            for row in &m.data {
                let cells: Vec<String> = row
                    .iter()
                    .map(|e| match e {
                        Entry::Real(v) => format!("{:>12.5e}", v.0),
                        Entry::Complex([re, im]) => format!("{:>12.5e}{:+.5e}i", re.0, im.0),
                    })
                    .collect();
                out.push_str(&format!("  {}\n", cells.join("  ")));
            }
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}
