use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::Value as Json;

use super::CliError;
use crate::numlin::{CMat, RMat};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    RealSs,
    ComplexSs,
    UncertainPlant,
    QuantumSpec,
    QuantumPlant,
    PhysrealSpec,
}

impl ModelKind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "real_ss" => Self::RealSs,
            "complex_ss" => Self::ComplexSs,
            "uncertain_plant" => Self::UncertainPlant,
            "quantum_spec" => Self::QuantumSpec,
            "quantum_plant" => Self::QuantumPlant,
            "physreal_spec" => Self::PhysrealSpec,
            _ => return None,
        })
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::RealSs => "real_ss",
            Self::ComplexSs => "complex_ss",
            Self::UncertainPlant => "uncertain_plant",
            Self::QuantumSpec => "quantum_spec",
            Self::QuantumPlant => "quantum_plant",
            Self::PhysrealSpec => "physreal_spec",
        }
    }

    /// Matrices that must be present.
    pub fn required(self) -> &'static [&'static str] {
        match self {
            Self::RealSs | Self::ComplexSs => &["A", "B", "C"],
            Self::UncertainPlant => &["A", "B1", "B2", "C1"],
            Self::QuantumSpec => &["M1", "M2", "N1", "N2", "S"],
            Self::QuantumPlant => &["F", "G0", "G1", "G2", "H1", "H2", "K12", "K20", "K21"],
            Self::PhysrealSpec => &["R", "Lambda"],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub schema_version: String,
    pub kind: ModelKind,
    pub matrices: BTreeMap<String, CMat>,
    pub parameters: BTreeMap<String, f64>,
}

fn malformed(msg: impl Into<String>) -> CliError {
    CliError::Malformed(msg.into())
}

fn scalar(v: &Json, at: &str) -> Result<Complex64, CliError> {
    match v {
        Json::Number(n) => Ok(Complex64::new(n.as_f64().ok_or_else(|| malformed(format!("{at}: bad number")))?, 0.0)),
        Json::Array(pair) if pair.len() == 2 => {
            let re = pair[0].as_f64().ok_or_else(|| malformed(format!("{at}: real part is not a number")))?;
            let im = pair[1].as_f64().ok_or_else(|| malformed(format!("{at}: imaginary part is not a number")))?;
            Ok(Complex64::new(re, im))
        }
        _ => Err(malformed(format!("{at}: expected a number or an [re, im] pair"))),
    }
}

fn matrix(name: &str, v: &Json) -> Result<CMat, CliError> {
    let rows = v.as_array().ok_or_else(|| malformed(format!("matrix {name} is not an array of rows")))?;
    if rows.is_empty() {
        return Ok(CMat::zeros(0, 0));
    }
    let mut data = Vec::new();
    let mut cols = None;
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| malformed(format!("matrix {name}, row {i} is not an array")))?;
        if *cols.get_or_insert(row.len()) != row.len() {
            return Err(malformed(format!("matrix {name} has rows of different lengths")));
        }
        for (j, e) in row.iter().enumerate() {
            data.push(scalar(e, &format!("{name}[{i}][{j}]"))?);
        }
    }
    let cols = cols.unwrap_or(0);
    if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(malformed(format!("matrix {name} has a non-finite entry")));
    }
    Ok(CMat::from_row_slice(rows.len(), cols, &data))
}

pub fn parse_model(text: &str) -> Result<ModelFile, CliError> {
    let root: Json = serde_json::from_str(text).map_err(|e| malformed(format!("invalid JSON: {e}")))?;
    let obj = root.as_object().ok_or_else(|| malformed("model file must be a JSON object"))?;
    let schema_version = obj
        .get("schema_version")
        .and_then(Json::as_str)
        .ok_or_else(|| malformed("missing string field schema_version"))?
        .to_string();
    if schema_version != SCHEMA_VERSION {
        return Err(malformed(format!("unsupported schema_version {schema_version:?}, expected {SCHEMA_VERSION:?}")));
    }
    let kind_str = obj.get("kind").and_then(Json::as_str).ok_or_else(|| malformed("missing string field kind"))?;
    let kind = ModelKind::parse(kind_str).ok_or_else(|| malformed(format!("unknown kind {kind_str:?}")))?;
    let mats = obj.get("matrices").and_then(Json::as_object).ok_or_else(|| malformed("missing object field matrices"))?;
    if mats.is_empty() {
        return Err(malformed("matrices is empty"));
    }
    let mut matrices = BTreeMap::new();
    for (name, v) in mats {
        matrices.insert(name.clone(), matrix(name, v)?);
    }
    for name in kind.required() {
        if !matrices.contains_key(*name) {
            return Err(malformed(format!("{} model is missing matrix {name}", kind.label())));
        }
    }
    let mut parameters = BTreeMap::new();
    if let Some(p) = obj.get("parameters") {
        let p = p.as_object().ok_or_else(|| malformed("parameters must be an object"))?;
        for (name, v) in p {
            let x = v.as_f64().ok_or_else(|| malformed(format!("parameter {name} is not a number")))?;
            parameters.insert(name.clone(), x);
        }
    }
    Ok(ModelFile { schema_version, kind, matrices, parameters })
}

impl ModelFile {
    pub fn expect_kind(&self, allowed: &[ModelKind]) -> Result<(), CliError> {
        if allowed.contains(&self.kind) {
            return Ok(());
        }
        let names: Vec<&str> = allowed.iter().map(|k| k.label()).collect();
        Err(malformed(format!("model kind {} is not accepted here (expected {})", self.kind.label(), names.join(" or "))))
    }

    pub fn get(&self, name: &str) -> Option<&CMat> {
        self.matrices.get(name)
    }

    pub fn complex(&self, name: &str) -> Result<CMat, CliError> {
        self.get(name).cloned().ok_or_else(|| malformed(format!("missing matrix {name}")))
    }

    pub fn real(&self, name: &str) -> Result<RMat, CliError> {
        let m = self.complex(name)?;
        if m.iter().any(|z| z.im != 0.0) {
            return Err(malformed(format!("matrix {name} must be real")));
        }
        Ok(m.map(|z| z.re))
    }

    /// Real matrix, or zeros of the given shape when absent.
    pub fn real_or_zeros(&self, name: &str, rows: usize, cols: usize) -> Result<RMat, CliError> {
        if self.get(name).is_some() {
            self.real(name)
        } else {
            Ok(RMat::zeros(rows, cols))
        }
    }

    pub fn parameter(&self, name: &str) -> Option<f64> {
        self.parameters.get(name).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_entries() {
        let m = parse_model(r#"{"schema_version":"1","kind":"complex_ss","matrices":{"A":[[1,[0,2]]],"B":[[1]],"C":[[1],[2]]}}"#)
            .unwrap();
        assert_eq!(m.kind, ModelKind::ComplexSs);
        assert_eq!(m.get("A").unwrap()[(0, 1)], Complex64::new(0.0, 2.0));
        assert_eq!(m.get("C").unwrap().shape(), (2, 1));
    }

    #[test]
    fn rejects_bad_input() {
        let cases = [
            "not json",
            r#"{"kind":"real_ss","matrices":{"A":[[1]]}}"#,
            r#"{"schema_version":"2","kind":"real_ss","matrices":{"A":[[1]]}}"#,
            r#"{"schema_version":"1","kind":"other","matrices":{"A":[[1]]}}"#,
            r#"{"schema_version":"1","kind":"real_ss","matrices":{}}"#,
            r#"{"schema_version":"1","kind":"real_ss","matrices":{"A":[[1]],"B":[[1]]}}"#,
            r#"{"schema_version":"1","kind":"real_ss","matrices":{"A":[[1],[1,2]],"B":[[1]],"C":[[1]]}}"#,
            r#"{"schema_version":"1","kind":"real_ss","matrices":{"A":[["x"]],"B":[[1]],"C":[[1]]}}"#,
        ];
        for c in cases {
            assert!(matches!(parse_model(c), Err(CliError::Malformed(_))), "{c}");
        }
    }

    #[test]
    fn real_accessor_rejects_complex() {
        let m = parse_model(r#"{"schema_version":"1","kind":"real_ss","matrices":{"A":[[[1,1]]],"B":[[1]],"C":[[1]]}}"#).unwrap();
        assert!(matches!(m.real("A"), Err(CliError::Malformed(_))));
    }
}
