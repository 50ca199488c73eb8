//! The `run`, `sweep` and `list-models` subcommands.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use dynmap_core::witness::{Verdict, WitnessRecord, WitnessReport};

use crate::config::{self, Scenario};
use crate::error::{CliError, CliResult};
use crate::models;
use crate::output::{self, fmt17, write_atomic};
use crate::plot::render_svg;
use crate::scenario::{evaluate, Outcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 3;

/// Files written by one run.
#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub csv: PathBuf,
    pub report: PathBuf,
    pub plot: Option<PathBuf>,
    pub violated: bool,
    pub summary: String,
}

fn output_path(out_dir: &Path, configured: Option<&PathBuf>, default: String) -> PathBuf {
    let p = configured.cloned().unwrap_or_else(|| PathBuf::from(default));
    if p.is_absolute() {
        p
    } else {
        out_dir.join(p)
    }
}

/// Writes CSV, report and (if configured) plot for an evaluated scenario.
pub fn write_outputs(scenario: &Scenario, outcome: &Outcome, out_dir: &Path) -> CliResult<RunArtifacts> {
    let cfg = &scenario.config;
    let csv_bytes = output::trajectory_csv(&outcome.trajectory)?;
    let json = output::report_json(cfg, &outcome.trajectory, &outcome.report)?;
    let csv = output_path(out_dir, cfg.output.csv.as_ref(), format!("{}.csv", cfg.name));
    let report = output_path(out_dir, cfg.output.report.as_ref(), format!("{}.json", cfg.name));
    write_atomic(&csv, &csv_bytes)?;
    write_atomic(&report, &json)?;
    let plot = match &cfg.output.plot {
        Some(p) => {
            let path = output_path(out_dir, Some(p), String::new());
            let svg = render_svg(&csv_bytes, &cfg.output.plot_columns)?;
            write_atomic(&path, svg.as_bytes())?;
            Some(path)
        }
        None => None,
    };
    Ok(RunArtifacts {
        csv,
        report,
        plot,
        violated: outcome.report.any_violation(),
        summary: outcome.report.summary.text.clone(),
    })
}

/// Runs one scenario file; outputs resolve against `out_dir`.
pub fn run(config_path: &Path, out_dir: &Path) -> CliResult<RunArtifacts> {
    let scenario = Scenario::load(config_path)?;
    let outcome = evaluate(&scenario)?;
    write_outputs(&scenario, &outcome, out_dir)
}

/// Worker count from `DYNMAP_THREADS`, else the available parallelism.
pub fn thread_count() -> CliResult<usize> {
    match std::env::var("DYNMAP_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::config(format!("DYNMAP_THREADS must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn verdict_label(r: &WitnessRecord) -> &'static str {
    match r.verdict {
        Some(Verdict::Monotone) => "monotone",
        Some(Verdict::Violated) => "violated",
        None => "inapplicable",
    }
}

fn summary_columns(report: &WitnessReport) -> Vec<String> {
    let mut cols = Vec::new();
    for r in &report.records {
        cols.push(format!("{}_verdict", r.name));
        cols.push(format!("{}_first_violation", r.name));
        for c in &r.checks {
            cols.push(format!("{}.{}_verdict", r.name, c.name));
            cols.push(format!("{}.{}_first_violation", r.name, c.name));
        }
    }
    cols
}

fn summary_cells(report: &WitnessReport) -> Vec<String> {
    let time = |t: Option<f64>| t.map(fmt17).unwrap_or_default();
    let mut cells = Vec::new();
    for r in &report.records {
        cells.push(verdict_label(r).to_string());
        cells.push(time(r.first_violation_time));
        for c in &r.checks {
            let v = match c.verdict {
                Verdict::Monotone => "monotone",
                Verdict::Violated => "violated",
            };
            cells.push(v.to_string());
            cells.push(time(c.first_violation_time));
        }
    }
    cells
}

/// One run per value of `param`; returns the summary CSV.
///
/// All variants are validated before any computation. Runs execute on up
/// to [`thread_count`] workers; rows keep the input order. With
/// `runs_dir`, each run's CSV and report go to `<name>-<index>.{csv,json}`.
pub fn sweep(config_path: &Path, param: &str, values: &[String], runs_dir: Option<&Path>) -> CliResult<Vec<u8>> {
    let base = config::read_value(config_path)?;
    let base_dir = config::base_dir_of(config_path);
    config::get_path(&base, param)?;
    let scenarios = values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut tree = base.clone();
            config::set_path(&mut tree, param, config::parse_scalar(v))?;
            let mut s = Scenario::from_value(tree, base_dir.clone())?;
            if runs_dir.is_some() {
                let name = format!("{}-{i}", s.config.name);
                s.config.output.csv = Some(PathBuf::from(format!("{name}.csv")));
                s.config.output.report = Some(PathBuf::from(format!("{name}.json")));
                s.config.output.plot = None;
            }
            Ok(s)
        })
        .collect::<CliResult<Vec<_>>>()?;

    let results: Vec<Mutex<Option<CliResult<WitnessReport>>>> = scenarios.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = thread_count()?.min(scenarios.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(s) = scenarios.get(i) else { break };
                let result = evaluate(s).and_then(|outcome| {
                    if let Some(dir) = runs_dir {
                        write_outputs(s, &outcome, dir)?;
                    }
                    Ok(outcome.report)
                });
                *results[i].lock().expect("no poisoning") = Some(result);
            });
        }
    });

    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Write { path: PathBuf::from("<summary>"), source: std::io::Error::other(e) };
    let mut header_written = false;
    for (value, slot) in values.iter().zip(results) {
        let report = slot.into_inner().expect("no poisoning").expect("every scenario evaluated")?;
        if !header_written {
            let mut header = vec!["value".to_string()];
            header.extend(summary_columns(&report));
            w.write_record(&header).map_err(csv_err)?;
            header_written = true;
        }
        let mut row = vec![value.clone()];
        row.extend(summary_cells(&report));
        w.write_record(&row).map_err(csv_err)?;
    }
    if !header_written {
        w.write_record(["value"]).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::Write { path: PathBuf::from("<summary>"), source: e.into_error() })
}

pub fn list_models(json: bool) -> CliResult<String> {
    let entries = models::catalogue();
    if json {
        let mut s = serde_json::to_string_pretty(&entries)
            .map_err(|e| CliError::Write { path: PathBuf::from("<stdout>"), source: e.into() })?;
        s.push('\n');
        Ok(s)
    } else {
        Ok(models::render_text(&entries))
    }
}
