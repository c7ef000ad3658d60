//! Problem-file schema, machine-readable reports, and curve CSV emission.

use crate::closed_forms::zeta_curve_value;
use crate::cone_synthesis::EllipticSystem;
use crate::fd_lab::{GridDomain, GridKind};
use crate::matrix_algebra::Mat;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct DomainSpec {
    pub kind: String,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub resolution: Vec<usize>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct ConeSpec {
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
    pub k: usize,
}

/// On-disk description of one problem instance.
#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct ProblemFile {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "B")]
    pub b: Vec<Vec<Vec<f64>>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    pub domain: DomainSpec,
    #[serde(default)]
    pub cone: Option<ConeSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub trials: Option<usize>,
}

fn matrix_from_json(rows: &[Vec<f64>], m: usize, what: &str) -> Result<Mat, SchemaError> {
    if rows.len() != m || rows.iter().any(|r| r.len() != m) {
        return Err(SchemaError::Invalid(format!("{what} must be {m}x{m}")));
    }
    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    Ok(Mat::from_rows(&refs))
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<ProblemFile, SchemaError> {
        let file: ProblemFile = serde_json::from_str(text)?;
        file.validate()?;
        Ok(file)
    }

    fn validate(&self) -> Result<(), SchemaError> {
        if self.n == 0 || self.m == 0 {
            return Err(SchemaError::Invalid("n and m must be positive".into()));
        }
        if self.b.len() != self.n {
            return Err(SchemaError::Invalid(format!(
                "expected {} first-order matrices, got {}",
                self.n,
                self.b.len()
            )));
        }
        for (i, b) in self.b.iter().enumerate() {
            matrix_from_json(b, self.m, &format!("B[{i}]"))?;
        }
        matrix_from_json(&self.c, self.m, "C")?;
        let dim = match self.domain.kind.as_str() {
            "interval" => 1,
            "rectangle" => 2,
            other => {
                return Err(SchemaError::Invalid(format!("unknown domain kind {other:?}")))
            }
        };
        if dim != self.n {
            return Err(SchemaError::Invalid(format!(
                "domain dimension {dim} does not match n = {}",
                self.n
            )));
        }
        if self.domain.lo.len() != dim
            || self.domain.hi.len() != dim
            || self.domain.resolution.len() != dim
        {
            return Err(SchemaError::Invalid("domain axis counts inconsistent".into()));
        }
        if let Some(cone) = &self.cone {
            matrix_from_json(&cone.p, self.m, "cone.P")?;
            if cone.k == 0 || cone.k > self.m {
                return Err(SchemaError::Invalid("cone.k must be in 1..=m".into()));
            }
        }
        Ok(())
    }

    pub fn system(&self) -> Result<EllipticSystem, SchemaError> {
        let b = self
            .b
            .iter()
            .enumerate()
            .map(|(i, rows)| matrix_from_json(rows, self.m, &format!("B[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let c = matrix_from_json(&self.c, self.m, "C")?;
        EllipticSystem::new(b, c).map_err(|e| SchemaError::Invalid(e.to_string()))
    }

    pub fn grid(&self) -> Result<GridDomain, SchemaError> {
        let kind = match self.domain.kind.as_str() {
            "interval" => GridKind::Interval,
            _ => GridKind::Rectangle,
        };
        GridDomain::new(
            kind,
            self.domain.lo.clone(),
            self.domain.hi.clone(),
            self.domain.resolution.clone(),
        )
        .map_err(|e| SchemaError::Invalid(e.to_string()))
    }
}

/// Machine-readable analysis report. Byte-identical across runs with the
/// same inputs, seed, and version, except for `timings_ms`.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub input_digest: String,
    pub seed: Option<u64>,
    pub verdicts: serde_json::Value,
    pub certificates: serde_json::Value,
    pub witnesses: serde_json::Value,
    pub timings_ms: BTreeMap<String, f64>,
    pub version: String,
}

impl Report {
    pub fn new(command: &str, input: &[u8], seed: Option<u64>) -> Report {
        Report {
            command: command.to_string(),
            input_digest: digest_hex(input),
            seed,
            verdicts: serde_json::Value::Object(Default::default()),
            certificates: serde_json::Value::Object(Default::default()),
            witnesses: serde_json::Value::Object(Default::default()),
            timings_ms: BTreeMap::new(),
            version: crate::VERSION.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }
}

pub fn digest_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Formatter writing every float with 17 significant digits so that the
/// textual report round-trips doubles exactly.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes any value to JSON with 17-significant-digit floats and
/// lexicographically ordered map keys.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value.serialize(&mut ser).expect("JSON serialization");
    String::from_utf8(buf).expect("UTF-8 JSON")
}

/// The threshold curves c -> zeta(sqrt(c) rho) sqrt(c): 400 log-spaced
/// samples of c in [1e-3, 1e4] for each rho in {0.25, 0.5, 1, 2}.
pub fn figure_csv() -> String {
    let mut out = String::from("c,value,rho\n");
    for &rho in &[0.25, 0.5, 1.0, 2.0] {
        for i in 0..400 {
            let t = i as f64 / 399.0;
            let c = 10f64.powf(-3.0 + 7.0 * t);
            let value = zeta_curve_value(c, rho);
            writeln!(out, "{c:.16e},{value:.16e},{rho}").expect("string write");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_file() -> String {
        r#"{
            "n": 1, "m": 2,
            "B": [[[0.0, -1.0], [0.0, 0.0]]],
            "C": [[-1.0, 0.0], [0.0, 0.0]],
            "domain": {"kind": "interval", "lo": [0.0], "hi": [1.0], "resolution": [101]}
        }"#
        .to_string()
    }

    #[test]
    fn parses_valid_problem() {
        let f = ProblemFile::parse(&sample_file()).unwrap();
        let sys = f.system().unwrap();
        assert_eq!((sys.n, sys.m), (1, 2));
        assert_eq!(f.grid().unwrap().resolution, vec![101]);
    }

    #[test]
    fn rejects_shape_errors() {
        // Empty B list with n = 1.
        let text = r#"{"n": 1, "m": 2, "B": [], "C": [[0.0,0.0],[0.0,0.0]],
            "domain": {"kind": "interval", "lo": [0.0], "hi": [1.0], "resolution": [11]}}"#;
        assert!(matches!(
            ProblemFile::parse(text),
            Err(SchemaError::Invalid(_))
        ));
        // Wrong C shape.
        let text = r#"{"n": 1, "m": 2, "B": [[[0.0,0.0],[0.0,0.0]]], "C": [[0.0]],
            "domain": {"kind": "interval", "lo": [0.0], "hi": [1.0], "resolution": [11]}}"#;
        assert!(ProblemFile::parse(text).is_err());
        // Domain kind/dimension mismatch.
        let text = r#"{"n": 1, "m": 1, "B": [[[0.0]]], "C": [[0.0]],
            "domain": {"kind": "rectangle", "lo": [0.0,0.0], "hi": [1.0,1.0], "resolution": [5,5]}}"#;
        assert!(ProblemFile::parse(text).is_err());
    }

    #[test]
    fn float_serialization_round_trips() {
        for &x in &[0.1, 1.0 / 3.0, 1e-300, std::f64::consts::PI, -2.5e17] {
            let json = to_canonical_json(&x);
            let back: f64 = serde_json::from_str(&json).unwrap();
            assert_eq!(back, x, "{json}");
        }
    }

    #[test]
    fn report_is_deterministic() {
        let mk = || {
            let mut r = Report::new("analyze", b"payload", Some(42));
            r.verdicts = serde_json::json!({"wmp": "fails", "margin": 0.25});
            r.to_json()
        };
        assert_eq!(mk(), mk());
        let r = Report::new("analyze", b"payload", None);
        assert_eq!(r.input_digest.len(), 64);
    }

    #[test]
    fn figure_csv_shape_and_monotonicity() {
        let csv = figure_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + 4 * 400);
        assert_eq!(lines[0], "c,value,rho");
        for chunk in lines[1..].chunks(400) {
            let values: Vec<f64> = chunk
                .iter()
                .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
                .collect();
            for w in values.windows(2) {
                assert!(w[1] > w[0], "curve not strictly increasing");
            }
        }
    }
}
