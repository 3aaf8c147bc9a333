//! CSV tables, JSON reports and the stored form of a biorthogonal system.
//!
//! Numbers are written as decimal strings: multi-precision values with every mantissa
//! digit, doubles in the shortest form that reads back to the same double.

use std::path::{Path, PathBuf};

use hardedge_core::biorthogonal::{BiorthogonalSystem, EnsembleParams};
use hardedge_core::verify::{ConvergenceReport, ScalingConstants};
use hardedge_core::{PrecisionContext, Real};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::PotentialSpec;
use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

pub fn real_str(v: &Real) -> String {
    v.to_decimal_string()
}

pub fn f64_str(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

/// Header plus rows of already formatted fields.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        // Writing into a Vec cannot fail.
        w.write_record(&self.header).expect("in-memory csv");
        for r in &self.rows {
            w.write_record(r).expect("in-memory csv");
        }
        w.into_inner().expect("in-memory csv")
    }
}

/// `n, error, ratio`; the ratio is empty for experiments without one.
pub fn convergence_table(rep: &ConvergenceReport) -> Table {
    let mut t = Table::new(&["n", "error", "ratio"]);
    for (i, n) in rep.n_values.iter().enumerate() {
        let ratio = rep.ratios.get(i).map(|r| f64_str(*r)).unwrap_or_default();
        t.push(vec![n.to_string(), f64_str(rep.errors[i]), ratio]);
    }
    t
}

pub fn constants_json(c: &ScalingConstants) -> Value {
    json!({
        "theta": c.theta,
        "alpha": c.alpha,
        "rho": c.rho,
        "c": c.c,
        "ell": c.ell,
        "re_g_plus_0": c.g0_re,
        "re_gtilde_plus_0": c.gtilde0_re,
        "m_theta": c.m_theta,
    })
}

pub fn convergence_json(rep: &ConvergenceReport) -> Value {
    json!({
        "n_values": rep.n_values,
        "errors": rep.errors,
        "ratios": rep.ratios,
        "fitted_rate": rep.fitted_rate,
        "predicted_rate": rep.predicted_rate,
        "strictly_decreasing": rep.strictly_decreasing(),
        "constants": constants_json(&rep.constants),
        "c_n": rep.c_n,
        "c_tilde_n": rep.c_tilde_n,
    })
}

/// SHA-256 of the command name and its resolved configuration.
pub fn config_hash(command: &str, config: &Value) -> String {
    let canonical = json!({ "command": command, "config": config }).to_string();
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

/// The JSON document written next to every CSV.
pub fn report_document(
    command: &str,
    config: &Value,
    ctx: &PrecisionContext,
    summary: &str,
    result: Value,
) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "config_hash": config_hash(command, config),
        "precision": { "mantissa_bits": ctx.mantissa_bits, "rel_tol": ctx.rel_tol },
        "summary": summary,
        "result": result,
    })
}

/// Writes `<stem>.csv` and `<stem>.json` under `dir`, creating it if needed.
pub fn emit(
    dir: &Path,
    stem: &str,
    table: &Table,
    document: &Value,
) -> CliResult<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    write_atomic(&csv_path, &table.to_csv())?;
    let mut text = serde_json::to_vec_pretty(document).expect("json values serialize");
    text.push(b'\n');
    write_atomic(&json_path, &text)?;
    Ok((csv_path, json_path))
}

/// Write to a sibling temporary file, then rename over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

/// Stored form of a [`BiorthogonalSystem`]; every real is a full-precision decimal string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub schema_version: u32,
    pub potential: PotentialSpec,
    pub theta: String,
    pub alpha: String,
    pub n: u32,
    pub degree: usize,
    pub prec: usize,
    pub loss_bits: f64,
    pub kappas: Vec<String>,
    pub p_coeffs: Vec<Vec<String>>,
    pub q_coeffs: Vec<Vec<String>>,
    pub moments: Vec<Vec<String>>,
}

fn rows_str(rows: &[Vec<Real>]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| r.iter().map(real_str).collect())
        .collect()
}

fn parse_real(s: &str, prec: usize) -> CliResult<Real> {
    Real::parse(s, prec)
        .ok_or_else(|| CliError::Validation(format!("stored system holds a non-number {s:?}")))
}

fn rows_real(rows: &[Vec<String>], prec: usize) -> CliResult<Vec<Vec<Real>>> {
    rows.iter()
        .map(|r| r.iter().map(|s| parse_real(s, prec)).collect())
        .collect()
}

impl SystemDocument {
    pub fn from_system(sys: &BiorthogonalSystem) -> Self {
        let params = sys.params();
        SystemDocument {
            schema_version: SCHEMA_VERSION,
            potential: PotentialSpec::from(params.potential()),
            theta: real_str(params.theta()),
            alpha: real_str(params.alpha()),
            n: params.n(),
            degree: sys.degree(),
            prec: sys.prec(),
            loss_bits: sys.loss_bits(),
            kappas: sys.kappas().iter().map(real_str).collect(),
            p_coeffs: rows_str(sys.p_coeffs()),
            q_coeffs: rows_str(sys.q_coeffs()),
            moments: rows_str(sys.moments()),
        }
    }

    pub fn to_system(&self) -> CliResult<BiorthogonalSystem> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Validation(format!(
                "stored system has schema version {}",
                self.schema_version
            )));
        }
        let p = self.prec;
        let params = EnsembleParams::new(
            self.potential.to_potential(),
            parse_real(&self.theta, p)?,
            parse_real(&self.alpha, p)?,
            self.n,
        )?;
        let kappas = self
            .kappas
            .iter()
            .map(|s| parse_real(s, p))
            .collect::<CliResult<Vec<_>>>()?;
        let sys = BiorthogonalSystem::from_parts(
            params,
            p,
            rows_real(&self.p_coeffs, p)?,
            rows_real(&self.q_coeffs, p)?,
            kappas,
            rows_real(&self.moments, p)?,
        )?;
        if sys.degree() != self.degree {
            return Err(CliError::Validation(format!(
                "stored degree {} does not match {} rows",
                self.degree,
                sys.degree()
            )));
        }
        Ok(sys)
    }
}
