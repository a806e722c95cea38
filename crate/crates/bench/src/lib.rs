//! Experiment runner for the polyschwarz preconditioners: single runs with
//! CSV residual histories and JSON summaries, and sweeps over many configs.

pub mod config;
pub mod sweep;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use polyschwarz::assembly::{
    assemble_load, assemble_operator, energy_norm, interpolate, DofMap, DEFAULT_ETA,
};
use polyschwarz::elements::build_element;
use polyschwarz::krylov::pcg;
use polyschwarz::{AdditiveSchwarz, CartesianMesh, Decomposition, Level};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{ExperimentConfig, PartialConfig, Rhs};
pub use sweep::{run_sweep, SweepReport, SweepRow, SweepSpec};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("solver: {0}")]
    Solver(#[from] polyschwarz::Error),
}

/// Contents of `<prefix>.summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub element: String,
    pub m: usize,
    pub h: f64,
    #[serde(rename = "H")]
    pub coarse_h: f64,
    pub delta: f64,
    pub overlap_layers: usize,
    pub precond: String,
    pub rhs: String,
    pub eta: Option<f64>,
    pub tol: f64,
    pub dofs: usize,
    pub subdomains: usize,
    pub coarse_dim: usize,
    pub iterations: usize,
    pub converged: bool,
    pub kappa_estimate: f64,
    pub setup_seconds: f64,
    pub solve_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub energy_error: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: Summary,
    pub relative_residuals: Vec<f64>,
}

/// Assembles, sets up and solves one experiment without touching the disk.
pub fn execute(cfg: &ExperimentConfig) -> Result<RunOutput, BenchError> {
    let family = cfg.element;
    let mesh = CartesianMesh::<f64>::new(cfg.fine_cells())?;
    let elem = build_element::<f64>(family)?;
    let dofmap = DofMap::new(mesh, family)?;
    let a = assemble_operator(&mesh, &elem, &dofmap, cfg.eta.unwrap_or(DEFAULT_ETA))?;
    let f = match cfg.rhs.manufactured() {
        Some(ms) => assemble_load(&mesh, &elem, &dofmap, |x| ms.rhs(x))?,
        None => assemble_load(&mesh, &elem, &dofmap, |_| 1.0)?,
    };

    let t = Instant::now();
    let coarse = CartesianMesh::<f64>::new(cfg.coarse_cells())?;
    let decomp = Decomposition::new(coarse, mesh, cfg.overlap_layers)?;
    let m = AdditiveSchwarz::build(cfg.precond, &decomp, &dofmap, &a)?;
    let setup_seconds = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let report = pcg(&a, &m, &f, cfg.tol, cfg.max_iters)?;
    let solve_seconds = t.elapsed().as_secs_f64();

    let energy_error = match (cfg.check_error, cfg.rhs.manufactured()) {
        (true, Some(ms)) => {
            let exact = interpolate(&dofmap, |p, q, x| ms.derivative(p, q, x));
            let e: Vec<f64> = report
                .solution
                .iter()
                .zip(&exact)
                .map(|(u, v)| u - v)
                .collect();
            Some(energy_norm(&a, &e))
        }
        _ => None,
    };

    let subdomains = match cfg.precond {
        Level::None => 0,
        _ => decomp.subdomains().len(),
    };
    let summary = Summary {
        element: family.name().to_string(),
        m: family.order(),
        h: cfg.h(),
        coarse_h: cfg.coarse_h(),
        delta: cfg.delta(),
        overlap_layers: cfg.overlap_layers,
        precond: cfg.precond.name().to_string(),
        rhs: cfg.rhs.name().to_string(),
        eta: cfg.eta,
        tol: cfg.tol,
        dofs: dofmap.free_count(),
        subdomains,
        coarse_dim: m.coarse_dim(),
        iterations: report.iterations,
        converged: report.converged,
        kappa_estimate: report.kappa_estimate,
        setup_seconds,
        solve_seconds,
        energy_error,
    };
    Ok(RunOutput {
        summary,
        relative_residuals: report.relative_residuals,
    })
}

pub fn residuals_csv(relres: &[f64]) -> String {
    let mut s = String::from("iter,relres\n");
    for (i, r) in relres.iter().enumerate() {
        s.push_str(&format!("{i},{r:.16e}\n"));
    }
    s
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), BenchError> {
    let io = |e: std::io::Error| BenchError::Io(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let mut file = fs::File::create(path).map_err(io)?;
    file.write_all(contents).map_err(io)
}

/// Runs one experiment and writes `<prefix>.residuals.csv` and
/// `<prefix>.summary.json`.
pub fn run(cfg: &ExperimentConfig) -> Result<Summary, BenchError> {
    let out = execute(cfg)?;
    write_file(
        &cfg.residuals_path(),
        residuals_csv(&out.relative_residuals).as_bytes(),
    )?;
    let json = serde_json::to_string_pretty(&out.summary).expect("summary serializes");
    write_file(&cfg.summary_path(), format!("{json}\n").as_bytes())?;
    Ok(out.summary)
}
