//! Sweeps: many configs sharing one output directory, with per-row error
//! isolation and a scalability table grouped by `(element, H/h, l, precond)`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{default_prefix, PartialConfig};
use crate::{run, write_file, BenchError, Summary};

/// Cartesian product of parameter lists, each combination laid over `base`.
/// `coarse_ratio_exponent` `k` sets `H_exponent = h_exponent - k`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Matrix {
    #[serde(default)]
    pub element: Vec<String>,
    #[serde(default)]
    pub h_exponent: Vec<u32>,
    #[serde(default, rename = "H_exponent")]
    pub coarse_exponent: Vec<u32>,
    #[serde(default)]
    pub coarse_ratio_exponent: Vec<u32>,
    #[serde(default)]
    pub overlap_layers: Vec<usize>,
    #[serde(default)]
    pub precond: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Runs executed concurrently.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub base: PartialConfig,
    #[serde(default)]
    pub matrix: Option<Matrix>,
    #[serde(default)]
    pub runs: Vec<PartialConfig>,
}

fn axis<T: Clone>(v: &[T]) -> Vec<Option<T>> {
    if v.is_empty() {
        vec![None]
    } else {
        v.iter().cloned().map(Some).collect()
    }
}

impl Matrix {
    fn expand(&self, base: &PartialConfig) -> Result<Vec<PartialConfig>, String> {
        if !self.coarse_exponent.is_empty() && !self.coarse_ratio_exponent.is_empty() {
            return Err("matrix sets both H_exponent and coarse_ratio_exponent".into());
        }
        let mut out = Vec::new();
        for e in axis(&self.element) {
            for a in axis(&self.h_exponent) {
                for b in axis(&self.coarse_exponent) {
                    for k in axis(&self.coarse_ratio_exponent) {
                        for l in axis(&self.overlap_layers) {
                            for p in axis(&self.precond) {
                                let mut top = PartialConfig {
                                    element: e.clone(),
                                    h_exponent: a,
                                    coarse_exponent: b,
                                    overlap_layers: l,
                                    precond: p.clone(),
                                    ..Default::default()
                                };
                                if let Some(k) = k {
                                    let a = a.or(base.h_exponent).unwrap_or(0);
                                    // 0 is rejected later with a message naming the constraint
                                    top.coarse_exponent = Some(a.saturating_sub(k));
                                }
                                out.push(base.clone().overlay(top));
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

impl SweepSpec {
    pub fn from_file(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))
    }

    /// Explicit runs first, then the matrix.
    pub fn configs(&self) -> Result<Vec<PartialConfig>, BenchError> {
        let mut out: Vec<PartialConfig> = self
            .runs
            .iter()
            .map(|r| self.base.clone().overlay(r.clone()))
            .collect();
        if let Some(m) = &self.matrix {
            out.extend(m.expand(&self.base).map_err(BenchError::Config)?);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Converged,
    NotConverged,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub output: Option<PathBuf>,
    pub status: RowStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub summary: Option<Summary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalabilityEntry {
    pub h: f64,
    pub iterations: usize,
    pub converged: bool,
    pub kappa_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalabilityGroup {
    pub element: String,
    pub coarse_ratio: usize,
    pub overlap_layers: usize,
    pub precond: String,
    /// Coarsest `h` first.
    pub entries: Vec<ScalabilityEntry>,
    /// Largest `|kappa_{i+1} - kappa_i| / kappa_i` over consecutive entries.
    pub max_kappa_variation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub scalability: Vec<ScalabilityGroup>,
}

impl SweepReport {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.status == RowStatus::Converged)
    }

    pub fn table(&self) -> String {
        let mut s = String::from(
            "index,element,h,H,delta,precond,dofs,iterations,converged,kappa_estimate,status\n",
        );
        for r in &self.rows {
            match &r.summary {
                Some(x) => s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}\n",
                    r.index,
                    x.element,
                    x.h,
                    x.coarse_h,
                    x.delta,
                    x.precond,
                    x.dofs,
                    x.iterations,
                    x.converged,
                    x.kappa_estimate,
                    status_name(r.status)
                )),
                None => s.push_str(&format!("{},,,,,,,,,,{}\n", r.index, status_name(r.status))),
            }
        }
        s
    }
}

fn status_name(s: RowStatus) -> &'static str {
    match s {
        RowStatus::Converged => "converged",
        RowStatus::NotConverged => "not-converged",
        RowStatus::Failed => "failed",
    }
}

fn scalability(rows: &[SweepRow]) -> Vec<ScalabilityGroup> {
    let mut groups: BTreeMap<(String, usize, usize, String), Vec<ScalabilityEntry>> =
        BTreeMap::new();
    for s in rows.iter().filter_map(|r| r.summary.as_ref()) {
        let ratio = (s.coarse_h / s.h).round() as usize;
        groups
            .entry((
                s.element.clone(),
                ratio,
                s.overlap_layers,
                s.precond.clone(),
            ))
            .or_default()
            .push(ScalabilityEntry {
                h: s.h,
                iterations: s.iterations,
                converged: s.converged,
                kappa_estimate: s.kappa_estimate,
            });
    }
    groups
        .into_iter()
        .map(
            |((element, coarse_ratio, overlap_layers, precond), mut entries)| {
                entries.sort_by(|a, b| b.h.total_cmp(&a.h));
                let max_kappa_variation = entries
                    .windows(2)
                    .map(|w| {
                        (w[1].kappa_estimate - w[0].kappa_estimate).abs() / w[0].kappa_estimate
                    })
                    .reduce(f64::max);
                ScalabilityGroup {
                    element,
                    coarse_ratio,
                    overlap_layers,
                    precond,
                    entries,
                    max_kappa_variation,
                }
            },
        )
        .collect()
}

fn run_row(index: usize, cfg: PartialConfig, dir: &Path) -> SweepRow {
    let explicit = cfg.output.clone();
    let resolved = cfg.resolve().map(|mut c| {
        let name = explicit.unwrap_or_else(|| {
            default_prefix(
                c.element,
                c.h_exponent,
                c.coarse_exponent,
                c.overlap_layers,
                c.precond,
            )
            .into()
        });
        c.output = dir.join(name);
        c
    });
    let cfg = match resolved {
        Ok(c) => c,
        Err(e) => {
            return SweepRow {
                index,
                output: None,
                status: RowStatus::Failed,
                error: Some(e.to_string()),
                summary: None,
            }
        }
    };
    match run(&cfg) {
        Ok(summary) => SweepRow {
            index,
            output: Some(cfg.output),
            status: if summary.converged {
                RowStatus::Converged
            } else {
                RowStatus::NotConverged
            },
            error: None,
            summary: Some(summary),
        },
        Err(e) => SweepRow {
            index,
            output: Some(cfg.output),
            status: RowStatus::Failed,
            error: Some(e.to_string()),
            summary: None,
        },
    }
}

/// Runs every config of `spec`, then writes `sweep.json` and `sweep.csv`
/// into the output directory. Rows fail independently.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepReport, BenchError> {
    let dir = spec
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));
    let configs = spec.configs()?;
    let workers = spec.workers.unwrap_or(1).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| BenchError::Io(e.to_string()))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        configs
            .into_par_iter()
            .enumerate()
            .map(|(i, c)| run_row(i, c, &dir))
            .collect()
    });
    let report = SweepReport {
        scalability: scalability(&rows),
        rows,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_file(&dir.join("sweep.json"), format!("{json}\n").as_bytes())?;
    write_file(&dir.join("sweep.csv"), report.table().as_bytes())?;
    Ok(report)
}
