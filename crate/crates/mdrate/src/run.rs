//! The `run` command: trajectories, exponent report and manifest.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use mdrate_core::rng::splitmix64;
use mdrate_core::simulate::{classify_model, convergence_trajectory, Executor};
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, MethodSpec};
use crate::error::RunError;
use crate::exec::RayonExecutor;
use crate::output::{estimate_row, failure_row, number, CSV_HEADER};
use crate::presets::model_preset;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "MDRATE_OUT_DIR";

/// Artifact file names.
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
/// Exponent report.
pub const EXPONENTS_FILE: &str = "exponents.json";
/// Run manifest.
pub const MANIFEST_FILE: &str = "manifest.json";

/// In-memory artifacts of a run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    /// Trajectory CSV including the header line.
    pub csv: String,
    /// Exponent report.
    pub exponents: Value,
    /// Grid points whose estimator failed.
    pub failures: Vec<String>,
    /// Number of CSV data rows.
    pub rows: usize,
}

/// Seed of the trajectory at level `x`.
fn level_seed(seed: u64, x: f64) -> u64 {
    splitmix64(seed ^ x.to_bits())
}

/// Runs every level of `config` and formats the artifacts.
pub fn execute<E: Executor>(config: &ExperimentConfig, exec: &E) -> Result<RunOutput, RunError> {
    config.validate()?;
    let (model, g) = config.build()?;
    let e = &config.experiment;
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    let mut failures = Vec::new();
    let mut rows = 0;
    let mut bands = Vec::new();
    let mut exps = None;
    let mut regime = None;
    for &x in &e.x {
        let t = convergence_trajectory(
            &model,
            &g,
            x,
            &e.n_grid,
            e.method.into(),
            e.reps,
            level_seed(e.seed, x),
            e.eps,
            exec,
        )?;
        bands.push(json!({
            "x": number(x),
            "rate_limsup": number(t.rate_limsup),
            "rate_liminf": number(t.rate_liminf),
        }));
        exps.get_or_insert(t.exponents);
        regime.get_or_insert(t.regime);
        for p in &t.points {
            match &p.estimates {
                Ok(list) => {
                    for est in list {
                        csv.push_str(&estimate_row(est, t.rate_limsup, t.rate_liminf));
                        csv.push('\n');
                        rows += 1;
                    }
                }
                Err(err) => {
                    let name = match e.method {
                        MethodSpec::Crude => "crude",
                        MethodSpec::Tilted => "tilted",
                        MethodSpec::Split => "split",
                    };
                    csv.push_str(&failure_row(p.n, x, name, t.rate_limsup, t.rate_liminf));
                    csv.push('\n');
                    rows += 1;
                    failures.push(format!("n={} x={x}: {err}", p.n));
                }
            }
        }
    }
    let exps = exps.expect("at least one level");
    let moments = model.moments();
    let eta = match &config.model {
        crate::config::ModelSpec::Preset { name } => {
            model_preset(name).map(|p| p.eta).unwrap_or(moments.mean)
        }
        _ => moments.mean,
    };
    let classified = classify_model(&model, &g, eta)?;
    let names = mdrate_core::exponents::TailExponents::NAMES;
    let exponent_map: serde_json::Map<String, Value> = names
        .iter()
        .zip(exps.to_array())
        .map(|(k, v)| (k.to_string(), number(v)))
        .collect();
    let exponents = json!({
        "model": model.label(),
        "scale": g.label(),
        "rho": number(g.rho()),
        "mean": number(moments.mean),
        "variance": number(moments.variance),
        "eta": number(eta),
        "regime": classified.name(),
        "band_regime": regime.expect("at least one level").name(),
        "exponents": Value::Object(exponent_map),
        "bands": bands,
    });
    Ok(RunOutput {
        csv,
        exponents,
        failures,
        rows,
    })
}

/// Where artifacts go: the explicit directory, else the config's
/// `output`, else `$MDRATE_OUT_DIR`, else `mdrate-out`.
pub fn resolve_out_dir(explicit: Option<&Path>, config: &ExperimentConfig) -> PathBuf {
    pick_out_dir(explicit, config, std::env::var_os(OUT_DIR_ENV))
}

fn pick_out_dir(
    explicit: Option<&Path>,
    config: &ExperimentConfig,
    env: Option<OsString>,
) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    if let Some(p) = &config.experiment.output {
        return PathBuf::from(p);
    }
    match env {
        Some(p) if !p.is_empty() => PathBuf::from(p),
        _ => PathBuf::from("mdrate-out"),
    }
}

/// Manifest: config echo, seed and tool version. Contains nothing that
/// varies between identical runs.
pub fn manifest(config: &ExperimentConfig, out: &RunOutput) -> Value {
    json!({
        "schema": crate::config::SCHEMA,
        "tool": "mdrate",
        "version": env!("CARGO_PKG_VERSION"),
        "seed": config.experiment.seed,
        "config": config.to_toml(),
        "artifacts": [TRAJECTORY_FILE, EXPONENTS_FILE],
        "rows": out.rows,
        "failures": out.failures,
    })
}

/// Runs `config` with `workers` threads and writes the three artifacts to
/// `dir`. Estimator failures are written as `error` rows and then reported
/// as an error.
pub fn run(config: &ExperimentConfig, dir: &Path, workers: usize) -> Result<RunOutput, RunError> {
    let exec = RayonExecutor::new(workers)
        .map_err(|e| RunError::Validation(format!("thread pool: {e}")))?;
    let out = execute(config, &exec)?;
    fs::create_dir_all(dir)?;
    fs::write(dir.join(TRAJECTORY_FILE), &out.csv)?;
    let pretty = |v: &Value| serde_json::to_string_pretty(v).expect("json value serializes") + "\n";
    fs::write(dir.join(EXPONENTS_FILE), pretty(&out.exponents))?;
    fs::write(dir.join(MANIFEST_FILE), pretty(&manifest(config, &out)))?;
    if !out.failures.is_empty() {
        return Err(RunError::Estimator(out.failures.join("; ")));
    }
    Ok(out)
}
