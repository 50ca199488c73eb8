//! Trajectory CSV, report JSON and atomic file writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use dynmap_core::dynamics::Trajectory;
use dynmap_core::witness::{Summary, WitnessRecord, WitnessReport};
use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::error::{CliError, CliResult};

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let err = |source| CliError::Write { path: path.to_path_buf(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(err)?;
    }
    let file_name = path.file_name().ok_or_else(|| err(std::io::Error::other("path has no file name")))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(err)
}

/// Fixed 17-significant-digit scientific notation.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_header(traj: &Trajectory) -> Vec<String> {
    let n = traj.eigenvalues.first().map_or(0, Vec::len);
    let s = traj.singular_values.first().map_or(0, Vec::len);
    let mut cols: Vec<String> = ["t", "f", "vol", "q_norm"].iter().map(|c| c.to_string()).collect();
    cols.extend((0..n).map(|i| format!("lambda_re_{i}")));
    cols.extend((0..n).map(|i| format!("lambda_im_{i}")));
    cols.extend((0..s).map(|i| format!("s_{i}")));
    cols
}

/// `t,f,vol,q_norm,lambda_re_*,lambda_im_*,s_*`, one row per grid time.
pub fn trajectory_csv(traj: &Trajectory) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_io = |e: csv::Error| CliError::Write { path: PathBuf::from("<csv>"), source: std::io::Error::other(e) };
    w.write_record(csv_header(traj)).map_err(to_io)?;
    let q_norm = traj.q_norm();
    for (i, &t) in traj.times().iter().enumerate() {
        let mut row = vec![fmt17(t), fmt17(traj.f[i]), fmt17(traj.volume[i]), fmt17(q_norm[i])];
        row.extend(traj.eigenvalues[i].iter().map(|z| fmt17(z.re)));
        row.extend(traj.eigenvalues[i].iter().map(|z| fmt17(z.im)));
        row.extend(traj.singular_values[i].iter().map(|&s| fmt17(s)));
        w.write_record(&row).map_err(to_io)?;
    }
    w.into_inner().map_err(|e| CliError::Write { path: PathBuf::from("<csv>"), source: e.into_error() })
}

#[derive(Serialize)]
struct GridInfo {
    t_max: f64,
    points: usize,
}

#[derive(Serialize)]
struct ReportFile<'a> {
    name: &'a str,
    family: &'a str,
    dim: usize,
    seed: Option<u64>,
    grid: GridInfo,
    summary: &'a Summary,
    records: &'a [WitnessRecord],
}

/// Report JSON with a fixed key order; floats use shortest round-trip form.
pub fn report_json(config: &ScenarioConfig, traj: &Trajectory, report: &WitnessReport) -> CliResult<Vec<u8>> {
    let file = ReportFile {
        name: &config.name,
        family: config.model.family.name(),
        dim: traj.dim,
        seed: config.seed,
        grid: GridInfo { t_max: config.grid.t_max, points: config.grid.points },
        summary: &report.summary,
        records: &report.records,
    };
    let mut bytes = serde_json::to_vec_pretty(&file)
        .map_err(|e| CliError::Write { path: PathBuf::from("<json>"), source: e.into() })?;
    bytes.push(b'\n');
    Ok(bytes)
}
