//! On-disk formats. Writers return bytes so commands can stage outputs before committing.

use std::fs;
use std::path::{Path, PathBuf};

use qtomo_core::analysis::FitResult;
use qtomo_core::homodyne::{QuadratureRecord, RawTrace, TraceRole};
use qtomo_core::linalg::CMatrix;
use qtomo_core::states::{PhotonDistribution, WignerGrid};
use qtomo_core::{Complex64, DensityMatrix};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable");
    out.push(b'\n');
    out
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = read_bytes(path)?;
    serde_json::from_slice(&bytes).map_err(|e| CliError::format(path, e))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

pub fn density_to_json(rho: &DensityMatrix) -> Vec<u8> {
    let n = rho.dim();
    let rows = |f: fn(Complex64) -> f64| (0..n).map(|i| (0..n).map(|j| f(rho.get(i, j))).collect()).collect();
    to_json(&DensityJson { dim: n, re: rows(|z| z.re), im: rows(|z| z.im) })
}

/// Parses a density matrix and checks the physical invariants.
pub fn density_from_json(bytes: &[u8], path: &Path) -> Result<DensityMatrix> {
    let doc: DensityJson = serde_json::from_slice(bytes).map_err(|e| CliError::format(path, e))?;
    let n = doc.dim;
    if n == 0 {
        return Err(CliError::format(path, "dim must be positive"));
    }
    let square = |m: &Vec<Vec<f64>>| m.len() == n && m.iter().all(|r| r.len() == n);
    if !square(&doc.re) || !square(&doc.im) {
        return Err(CliError::format(path, format!("re and im must be {n}x{n}")));
    }
    let elems = CMatrix::from_fn(n, |i, j| Complex64::new(doc.re[i][j], doc.im[i][j]));
    DensityMatrix::new(elems).map_err(CliError::Invariant)
}

pub fn read_density(path: &Path) -> Result<DensityMatrix> {
    density_from_json(&read_bytes(path)?, path)
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Vec<u8> {
    w.into_inner().expect("in-memory writer")
}

/// Reads a numeric CSV with exactly the given header.
fn read_table<const N: usize>(path: &Path, header: [&str; N]) -> Result<Vec<[f64; N]>> {
    let bytes = read_bytes(path)?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes.as_slice());
    let found = rdr.headers().map_err(|e| CliError::format(path, e))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(CliError::format(path, format!("expected header {:?}, found {:?}", header.join(","), found)));
    }
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::format(path, e))?;
        let mut row = [0.0; N];
        for (k, cell) in row.iter_mut().enumerate() {
            let v: f64 = rec
                .get(k)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| CliError::format(path, format!("row {}: bad value in column {}", line + 2, header[k])))?;
            if !v.is_finite() {
                return Err(CliError::format(path, format!("row {}: non-finite {}", line + 2, header[k])));
            }
            *cell = v;
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn quadratures_to_csv(records: &[QuadratureRecord]) -> Vec<u8> {
    let mut w = csv_writer();
    w.write_record(["theta", "y"]).expect("in-memory");
    for r in records {
        w.write_record([r.theta.to_string(), r.y.to_string()]).expect("in-memory");
    }
    finish(w)
}

pub fn read_quadratures(path: &Path) -> Result<Vec<QuadratureRecord>> {
    Ok(read_table(path, ["theta", "y"])?.into_iter().map(|[theta, y]| QuadratureRecord { theta, y }).collect())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RoleJson {
    Signal,
    Blocked,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TraceSidecar {
    sample_period: f64,
    pulse_period: f64,
    role: RoleJson,
}

/// Sidecar location for a trace CSV: same stem, `.json` extension.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn trace_to_csv(trace: &RawTrace) -> Vec<u8> {
    let mut w = csv_writer();
    w.write_record(["t", "v"]).expect("in-memory");
    for (i, v) in trace.samples.iter().enumerate() {
        w.write_record([(i as f64 * trace.sample_period).to_string(), v.to_string()]).expect("in-memory");
    }
    finish(w)
}

pub fn trace_sidecar(trace: &RawTrace) -> Vec<u8> {
    let role = match trace.role {
        TraceRole::Signal => RoleJson::Signal,
        TraceRole::Blocked => RoleJson::Blocked,
    };
    to_json(&TraceSidecar { sample_period: trace.sample_period, pulse_period: trace.pulse_period, role })
}

/// Reads `path` ("t,v") and its JSON sidecar.
pub fn read_trace(path: &Path) -> Result<RawTrace> {
    let side_path = sidecar_path(path);
    let side: TraceSidecar = read_json(&side_path)?;
    let rows = read_table(path, ["t", "v"])?;
    let trace = RawTrace {
        sample_period: side.sample_period,
        samples: rows.iter().map(|r| r[1]).collect(),
        pulse_period: side.pulse_period,
        role: match side.role {
            RoleJson::Signal => TraceRole::Signal,
            RoleJson::Blocked => TraceRole::Blocked,
        },
    };
    trace.validate().map_err(|e| CliError::format(&side_path, e))?;
    Ok(trace)
}

pub fn wigner_to_csv(grid: &WignerGrid) -> Vec<u8> {
    let mut w = csv_writer();
    w.write_record(["x", "y", "w"]).expect("in-memory");
    for (ix, x) in grid.x_axis.iter().enumerate() {
        for (iy, y) in grid.y_axis.iter().enumerate() {
            w.write_record([x.to_string(), y.to_string(), grid.get(ix, iy).to_string()]).expect("in-memory");
        }
    }
    finish(w)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WignerJson {
    pub x_axis: Vec<f64>,
    pub y_axis: Vec<f64>,
    /// `values[ix][iy]`.
    pub values: Vec<Vec<f64>>,
}

pub fn wigner_to_json(grid: &WignerGrid) -> Vec<u8> {
    let ny = grid.y_axis.len();
    to_json(&WignerJson {
        x_axis: grid.x_axis.clone(),
        y_axis: grid.y_axis.clone(),
        values: grid.values.chunks(ny).map(<[f64]>::to_vec).collect(),
    })
}

/// Side-by-side table "n,p_reconstructed,p_fit".
pub fn pn_to_csv(pn: &PhotonDistribution, fit: &FitResult) -> Vec<u8> {
    let mut w = csv_writer();
    w.write_record(["n", "p_reconstructed", "p_fit"]).expect("in-memory");
    for (n, p) in pn.probs.iter().enumerate() {
        w.write_record([n.to_string(), p.to_string(), fit.fitted(n).to_string()]).expect("in-memory");
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qtomo_core::states::{state_to_density, StateSpec};

    #[test]
    fn density_round_trip_is_exact() {
        let rho = state_to_density(&StateSpec::DisplacedFock { alpha: Complex64::new(1.2, -0.7), k: 1 }, 24).unwrap();
        let bytes = density_to_json(&rho);
        let back = density_from_json(&bytes, Path::new("mem")).unwrap();
        assert_eq!(back.matrix().max_abs_diff(rho.matrix()), 0.0);
    }

    #[test]
    fn density_rejects_wrong_shape_and_unphysical() {
        let p = Path::new("mem");
        let short = br#"{"dim": 2, "re": [[1, 0]], "im": [[0, 0], [0, 0]]}"#;
        assert!(matches!(density_from_json(short, p), Err(CliError::Format { .. })));
        let trace2 = br#"{"dim": 2, "re": [[1, 0], [0, 1]], "im": [[0, 0], [0, 0]]}"#;
        assert!(matches!(
            density_from_json(trace2, p),
            Err(CliError::Invariant(qtomo_core::Error::TraceNotOne { .. }))
        ));
    }

    #[test]
    fn wigner_csv_layout() {
        let grid = WignerGrid { x_axis: vec![0.0, 1.0], y_axis: vec![-1.0, 0.0, 1.0], values: (0..6).map(f64::from).collect() };
        let text = String::from_utf8(wigner_to_csv(&grid)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,y,w");
        assert_eq!(lines[1], "0,-1,0");
        assert_eq!(lines[4], "1,-1,3");
        assert_eq!(lines.len(), 7);
    }
}
