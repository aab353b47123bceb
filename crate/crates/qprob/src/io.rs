//! Result envelopes and their CSV / JSON serialization.
//!
//! CSV floats are written as `{:.16e}` (17 significant digits) so that files
//! are byte-stable across runs. JSON uses the shortest representation that
//! parses back to the same `f64`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{QprobError, Result};
use crate::quasiprob::{AtomDistribution, OutcomePairTable};
use crate::schemes::RamseyReadout;

/// Allowed deviation of a normalization sum at serialization time.
pub const NORMALIZATION_TOL: f64 = 1e-9;

pub const TABLE_COLUMNS: [&str; 7] = ["s1_index", "s2_index", "o1", "o2", "re_q", "im_q", "p_tpm"];
pub const DISTRIBUTION_COLUMNS: [&str; 3] = ["value", "re_weight", "im_weight"];
pub const READOUT_COLUMNS: [&str; 3] = ["u", "sx", "sy"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub s1_index: usize,
    pub s2_index: usize,
    pub o1: f64,
    pub o2: f64,
    pub re_q: f64,
    pub im_q: f64,
    pub p_tpm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightRow {
    pub value: f64,
    pub re_weight: f64,
    pub im_weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutRow {
    pub u: f64,
    pub sx: f64,
    pub sy: f64,
}

/// A sum that must hit `target` within `tol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    /// Sum across the named columns, checked on every row.
    RowSum { columns: Vec<String>, target: f64, tol: f64 },
    /// Sum down one column.
    ColumnSum { column: String, target: f64, tol: f64 },
    /// Trapezoid integral of `y` over `x`.
    Integral { x: String, y: String, target: f64, tol: f64 },
}

impl Constraint {
    pub fn row_sum(columns: &[&str], target: f64) -> Self {
        Constraint::RowSum {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            target,
            tol: NORMALIZATION_TOL,
        }
    }

    pub fn column_sum(column: &str, target: f64) -> Self {
        Constraint::ColumnSum {
            column: column.into(),
            target,
            tol: NORMALIZATION_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    #[serde(default)]
    pub constraints: Vec<Constraint>,
}

impl Sweep {
    pub fn new(columns: &[&str]) -> Self {
        Sweep {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn with_columns(columns: Vec<String>) -> Self {
        Sweep {
            columns,
            rows: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn constrain(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| QprobError::InvalidParameter(format!("sweep has no column `{name}`")))
    }

    /// Largest deviation over all constraints, failing on the first one
    /// outside its tolerance.
    fn check(&self) -> Result<Option<f64>> {
        let mut worst: Option<f64> = None;
        for c in &self.constraints {
            let (name, residual, tol) = match c {
                Constraint::RowSum { columns, target, tol } => {
                    let idx = columns.iter().map(|n| self.index(n)).collect::<Result<Vec<_>>>()?;
                    let r = self
                        .rows
                        .iter()
                        .map(|row| (idx.iter().map(|&j| row[j]).sum::<f64>() - target).abs())
                        .fold(0.0, f64::max);
                    (format!("row sum of {} = {target}", columns.join("+")), r, *tol)
                }
                Constraint::ColumnSum { column, target, tol } => {
                    let j = self.index(column)?;
                    let r = (self.rows.iter().map(|row| row[j]).sum::<f64>() - target).abs();
                    (format!("sum of {column} = {target}"), r, *tol)
                }
                Constraint::Integral { x, y, target, tol } => {
                    let (jx, jy) = (self.index(x)?, self.index(y)?);
                    let integral: f64 = self
                        .rows
                        .windows(2)
                        .map(|w| 0.5 * (w[1][jx] - w[0][jx]) * (w[0][jy] + w[1][jy]))
                        .sum();
                    (format!("integral of {y} d{x} = {target}"), (integral - target).abs(), *tol)
                }
            };
            if !(residual <= tol) {
                return Err(QprobError::InvariantViolation { name, residual });
            }
            worst = Some(worst.map_or(residual, |w| w.max(residual)));
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Table { rows: Vec<TableRow> },
    Distribution { atoms: Vec<WeightRow> },
    Sweep(Sweep),
    Readout { samples: Vec<ReadoutRow>, reconstructed: Vec<WeightRow> },
}

impl Payload {
    pub fn table(t: &OutcomePairTable) -> Self {
        let (n1, n2) = t.shape();
        let mut rows = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            for j in 0..n2 {
                rows.push(TableRow {
                    s1_index: i,
                    s2_index: j,
                    o1: t.outcomes1[i],
                    o2: t.outcomes2[j],
                    re_q: t.q[(i, j)].re,
                    im_q: t.q[(i, j)].im,
                    p_tpm: t.p_tpm[(i, j)],
                });
            }
        }
        Payload::Table { rows }
    }

    pub fn distribution(d: &AtomDistribution) -> Self {
        Payload::Distribution { atoms: weight_rows(d) }
    }

    pub fn readout(r: &RamseyReadout, reconstructed: &AtomDistribution) -> Self {
        Payload::Readout {
            samples: r
                .samples
                .iter()
                .map(|s| ReadoutRow { u: s.u, sx: s.sx, sy: s.sy })
                .collect(),
            reconstructed: weight_rows(reconstructed),
        }
    }

    fn values(&self) -> Vec<f64> {
        match self {
            Payload::Table { rows } => rows
                .iter()
                .flat_map(|r| [r.o1, r.o2, r.re_q, r.im_q, r.p_tpm])
                .collect(),
            Payload::Distribution { atoms } => atoms.iter().flat_map(|a| [a.value, a.re_weight, a.im_weight]).collect(),
            Payload::Sweep(s) => s.rows.iter().flatten().copied().collect(),
            Payload::Readout { samples, reconstructed } => samples
                .iter()
                .flat_map(|s| [s.u, s.sx, s.sy])
                .chain(reconstructed.iter().flat_map(|a| [a.value, a.re_weight, a.im_weight]))
                .collect(),
        }
    }

    /// Re-runs the normalization checks and reports what was measured.
    pub fn verify(&self) -> Result<Checks> {
        if let Some(bad) = self.values().into_iter().find(|v| !v.is_finite()) {
            return Err(QprobError::InvariantViolation {
                name: "finite output".into(),
                residual: bad,
            });
        }
        let sum_check = |name: &str, re: f64, im: f64| -> Result<f64> {
            let r = (re - 1.0).hypot(im);
            if r > NORMALIZATION_TOL {
                return Err(QprobError::InvariantViolation { name: name.into(), residual: r });
            }
            Ok(r)
        };
        match self {
            Payload::Table { rows } => {
                if rows.is_empty() {
                    return Err(QprobError::EmptyDistribution);
                }
                let re: f64 = rows.iter().map(|r| r.re_q).sum();
                let im: f64 = rows.iter().map(|r| r.im_q).sum();
                let p: f64 = rows.iter().map(|r| r.p_tpm).sum();
                let rq = sum_check("sum of q = 1", re, im)?;
                let rp = sum_check("sum of p_tpm = 1", p, 0.0)?;
                let aleph = rows.iter().map(|r| r.re_q.hypot(r.im_q)).sum::<f64>() - 1.0;
                Ok(Checks {
                    normalization_residual: Some(rq.max(rp)),
                    nonpositivity: Some(aleph),
                })
            }
            Payload::Distribution { atoms } => {
                if atoms.is_empty() {
                    return Err(QprobError::EmptyDistribution);
                }
                let re: f64 = atoms.iter().map(|a| a.re_weight).sum();
                let im: f64 = atoms.iter().map(|a| a.im_weight).sum();
                let r = sum_check("sum of weights = 1", re, im)?;
                let aleph = atoms.iter().map(|a| a.re_weight.hypot(a.im_weight)).sum::<f64>() - 1.0;
                Ok(Checks {
                    normalization_residual: Some(r),
                    nonpositivity: Some(aleph),
                })
            }
            Payload::Sweep(s) => {
                if s.rows.is_empty() {
                    return Err(QprobError::InvalidParameter("sweep has no rows".into()));
                }
                if let Some(r) = s.rows.iter().find(|r| r.len() != s.columns.len()) {
                    return Err(QprobError::DimensionMismatch {
                        context: "sweep row",
                        expected: s.columns.len(),
                        found: r.len(),
                    });
                }
                Ok(Checks {
                    normalization_residual: s.check()?,
                    nonpositivity: None,
                })
            }
            Payload::Readout { samples, reconstructed } => {
                if samples.is_empty() {
                    return Err(QprobError::InvalidParameter("readout has no samples".into()));
                }
                let residual = if reconstructed.is_empty() {
                    None
                } else {
                    let re: f64 = reconstructed.iter().map(|a| a.re_weight).sum();
                    let im: f64 = reconstructed.iter().map(|a| a.im_weight).sum();
                    Some(sum_check("sum of reconstructed weights = 1", re, im)?)
                };
                Ok(Checks {
                    normalization_residual: residual,
                    nonpositivity: None,
                })
            }
        }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        match self {
            Payload::Table { rows } => {
                out.write_record(TABLE_COLUMNS)?;
                for r in rows {
                    out.write_record([
                        r.s1_index.to_string(),
                        r.s2_index.to_string(),
                        fmt(r.o1),
                        fmt(r.o2),
                        fmt(r.re_q),
                        fmt(r.im_q),
                        fmt(r.p_tpm),
                    ])?;
                }
            }
            Payload::Distribution { atoms } => write_weights(&mut out, atoms)?,
            Payload::Sweep(s) => {
                out.write_record(&s.columns)?;
                for row in &s.rows {
                    out.write_record(row.iter().map(|v| fmt(*v)))?;
                }
            }
            Payload::Readout { samples, .. } => {
                out.write_record(READOUT_COLUMNS)?;
                for s in samples {
                    out.write_record([fmt(s.u), fmt(s.sx), fmt(s.sy)])?;
                }
            }
        }
        out.flush()
    }
}

fn weight_rows(d: &AtomDistribution) -> Vec<WeightRow> {
    d.atoms
        .iter()
        .map(|a| WeightRow {
            value: a.value,
            re_weight: a.weight.re,
            im_weight: a.weight.im,
        })
        .collect()
}

fn write_weights<W: Write>(out: &mut csv::Writer<W>, atoms: &[WeightRow]) -> io::Result<()> {
    out.write_record(DISTRIBUTION_COLUMNS)?;
    for a in atoms {
        out.write_record([fmt(a.value), fmt(a.re_weight), fmt(a.im_weight)])?;
    }
    Ok(())
}

/// Fixed-width scientific notation; negative zero is written as zero.
pub fn fmt(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub command: String,
    /// SHA-256 of the resolved configuration
    pub config_hash: String,
    pub version: String,
    /// seconds since the Unix epoch, `SOURCE_DATE_EPOCH` if set
    pub timestamp: u64,
}

impl Metadata {
    pub fn new<C: Serialize>(command: &str, config: &C) -> Self {
        Metadata {
            command: command.into(),
            config_hash: config_hash(config),
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp: timestamp(),
        }
    }
}

pub fn config_hash<C: Serialize>(config: &C) -> String {
    let bytes = serde_json::to_vec(config).expect("configuration serializes");
    Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn timestamp() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse().ok()) {
        return t;
    }
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct Checks {
    pub normalization_residual: Option<f64>,
    /// `-1 + sum |q|`
    pub nonpositivity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEnvelope {
    pub metadata: Metadata,
    pub checks: Checks,
    pub payload: Payload,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl ResultEnvelope {
    /// Fails if the payload does not pass its normalization checks.
    pub fn new(metadata: Metadata, payload: Payload) -> Result<Self> {
        let checks = payload.verify()?;
        Ok(ResultEnvelope { metadata, checks, payload })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("envelope serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Writes `<prefix>.csv` and/or `<prefix>.json`.
    pub fn write(&self, prefix: &Path, format: Format) -> io::Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        if matches!(format, Format::Csv | Format::Both) {
            let path = with_suffix(prefix, "csv");
            self.payload.write_csv(BufWriter::new(File::create(&path)?))?;
            written.push(path);
        }
        if matches!(format, Format::Json | Format::Both) {
            let path = with_suffix(prefix, "json");
            let mut f = BufWriter::new(File::create(&path)?);
            f.write_all(self.to_json().as_bytes())?;
            f.write_all(b"\n")?;
            f.flush()?;
            written.push(path);
        }
        Ok(written)
    }
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasiprob::Atom;
    use num_complex::Complex64;

    fn meta() -> Metadata {
        Metadata {
            command: "test".into(),
            config_hash: config_hash(&"x"),
            version: "0".into(),
            timestamp: 0,
        }
    }

    #[test]
    fn empty_distribution_is_rejected() {
        let p = Payload::distribution(&AtomDistribution { atoms: vec![] });
        assert_eq!(ResultEnvelope::new(meta(), p).unwrap_err(), QprobError::EmptyDistribution);
    }

    #[test]
    fn unnormalized_distribution_is_rejected() {
        let d = AtomDistribution {
            atoms: vec![Atom { value: 1.0, weight: Complex64::new(0.9, 0.0) }],
        };
        assert!(matches!(
            ResultEnvelope::new(meta(), Payload::distribution(&d)),
            Err(QprobError::InvariantViolation { .. })
        ));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let d = AtomDistribution {
            atoms: vec![
                Atom { value: -0.1, weight: Complex64::new(1.0 / 3.0, 1e-17) },
                Atom { value: 0.7, weight: Complex64::new(2.0 / 3.0, -1e-17) },
            ],
        };
        let env = ResultEnvelope::new(meta(), Payload::distribution(&d)).unwrap();
        assert_eq!(ResultEnvelope::from_json(&env.to_json()).unwrap(), env);
    }

    #[test]
    fn csv_uses_fixed_format() {
        let mut s = Sweep::new(&["a", "b"]);
        s.push(vec![0.1, -0.0]);
        let mut buf = Vec::new();
        Payload::Sweep(s).write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "a,b\n1.0000000000000001e-1,0.0000000000000000e0\n"
        );
    }

    #[test]
    fn sweep_constraints_are_enforced() {
        let mut s = Sweep::new(&["x", "y"]).constrain(Constraint::row_sum(&["x", "y"], 1.0));
        s.push(vec![0.25, 0.75]);
        assert_eq!(Payload::Sweep(s.clone()).verify().unwrap().normalization_residual, Some(0.0));
        s.push(vec![0.25, 0.5]);
        assert!(Payload::Sweep(s).verify().is_err());
    }
}
