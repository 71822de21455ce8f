//! Batch runs from a JSON manifest into CSV rows.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use dpcp_core::io::{self, Format, ProblemKind};
use serde::{Deserialize, Serialize};

use crate::run::{solve, Algo, Limits, Mode, RunConfig};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestRun {
    /// Relative paths are taken from the manifest's directory.
    pub instance: PathBuf,
    pub problem: ProblemKind,
    #[serde(default)]
    pub algo: Algo,
    #[serde(default)]
    pub propagation: Mode,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub limits: Limits,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub runs: Vec<ManifestRun>,
}

/// One CSV row. Blank cells for values a run did not produce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub instance: String,
    pub algo: String,
    pub mode: String,
    pub status: String,
    pub cost: Option<u64>,
    pub expansions: Option<u64>,
    pub wall_time: Option<f64>,
    pub propagation_time: Option<f64>,
    pub final_gap: Option<f64>,
    pub seed: u64,
    pub error: Option<String>,
}

pub fn load_manifest(path: &Path) -> Result<Manifest, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| format!("{}:{}: {e}", path.display(), e.line()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    for run in &mut manifest.runs {
        if run.instance.is_relative() {
            run.instance = base.join(&run.instance);
        }
    }
    Ok(manifest)
}

fn execute(run: &ManifestRun) -> Row {
    let mut row = Row {
        instance: run.instance.display().to_string(),
        algo: run.algo.name().into(),
        mode: run.propagation.name().into(),
        status: "Error".into(),
        cost: None,
        expansions: None,
        wall_time: None,
        propagation_time: None,
        final_gap: None,
        seed: run.seed,
        error: None,
    };
    let outcome = run.limits.to_solver().map_err(|e| e.to_string()).and_then(|limits| {
        let inst = io::load(&run.instance, run.problem, run.format).map_err(|e| e.to_string())?;
        let cfg = RunConfig {
            algo: run.algo,
            mode: run.propagation,
            limits,
        };
        solve(&inst, &cfg).map_err(|e| e.to_string())
    });
    match outcome {
        Ok(report) => {
            row.status = format!("{:?}", report.status);
            row.cost = report.cost;
            row.expansions = Some(report.metrics.expansions);
            row.wall_time = Some(report.metrics.wall_time);
            row.propagation_time = Some(report.metrics.propagation_time);
            row.final_gap = Some(report.gap);
        }
        Err(e) => row.error = Some(e),
    }
    row
}

/// Runs every manifest entry, `jobs` at a time, and returns the rows in
/// manifest order.
pub fn run_all(manifest: &Manifest, jobs: usize) -> Vec<Row> {
    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<Option<Row>>> = Mutex::new(vec![None; manifest.runs.len()]);
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, manifest.runs.len().max(1)) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(run) = manifest.runs.get(k) else { break };
                let row = execute(run);
                rows.lock().expect("no worker panics while holding the lock")[k] = Some(row);
            });
        }
    });
    rows.into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every run reports"))
        .collect()
}

pub fn write_csv(rows: &[Row], out: impl Write) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// `(algo, mode) -> (solved, total)`, solved meaning Optimal or Infeasible.
pub fn summary(rows: &[Row]) -> BTreeMap<(String, String), (usize, usize)> {
    let mut out: BTreeMap<(String, String), (usize, usize)> = BTreeMap::new();
    for row in rows {
        let e = out.entry((row.algo.clone(), row.mode.clone())).or_default();
        e.1 += 1;
        if row.status == "Optimal" || row.status == "Infeasible" {
            e.0 += 1;
        }
    }
    out
}
