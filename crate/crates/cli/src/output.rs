//! CSV export with a JSON sidecar.
//!
//! Values are written with 17 significant digits in scientific notation, so
//! identical runs produce identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::scenario::{Settings, Trajectory};
use crate::CliError;

pub fn to_csv(traj: &Trajectory) -> String {
    let mut s = traj.columns.join(",");
    s.push('\n');
    for row in &traj.rows {
        for (i, x) in row.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            write!(s, "{x:.16e}").expect("writing to a string");
        }
        s.push('\n');
    }
    s
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
struct SidecarSettings<'a> {
    kind: &'a str,
    dt: f64,
    t_end: f64,
    param: &'a str,
    formulation: &'a str,
    method: &'a str,
    output_every: usize,
}

#[derive(Debug, Serialize)]
struct Sidecar<'a> {
    model: &'a str,
    model_sha256: String,
    csv_sha256: String,
    settings: SidecarSettings<'a>,
    rows: usize,
    columns: &'a [String],
}

/// Path of the metadata file written next to `csv`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

pub fn write(
    out: &Path,
    traj: &Trajectory,
    model_name: &str,
    kind: &str,
    model_bytes: &[u8],
    settings: &Settings,
) -> Result<(), CliError> {
    let csv = to_csv(traj);
    let meta = Sidecar {
        model: model_name,
        model_sha256: sha256_hex(model_bytes),
        csv_sha256: sha256_hex(csv.as_bytes()),
        settings: SidecarSettings {
            kind,
            dt: settings.dt,
            t_end: settings.t_end,
            param: settings.param.name(),
            formulation: settings.formulation.name(),
            method: "rk4",
            output_every: settings.output_every,
        },
        rows: traj.rows.len(),
        columns: &traj.columns,
    };
    let io = |p: &Path, e: std::io::Error| CliError::Io(format!("{}: {e}", p.display()));
    std::fs::write(out, csv).map_err(|e| io(out, e))?;
    let side = sidecar_path(out);
    let mut json = serde_json::to_string_pretty(&meta).expect("serializable metadata");
    json.push('\n');
    std::fs::write(&side, json).map_err(|e| io(&side, e))
}
