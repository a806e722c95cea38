//! Experiment configuration: a flat JSON document whose fields can be
//! overridden from the command line.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use polyschwarz::linalg::tolerances;
use polyschwarz::{Family, Level, Manufactured};
use serde::{Deserialize, Serialize};

use crate::BenchError;

pub use polyschwarz::assembly::DEFAULT_ETA;
pub const DEFAULT_TOL: f64 = tolerances::PCG_TOL;
pub const DEFAULT_MAX_ITERS: usize = tolerances::PCG_MAX_ITERS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rhs {
    ManufacturedM2,
    ManufacturedM3,
    Ones,
}

impl Rhs {
    pub fn name(self) -> &'static str {
        match self {
            Rhs::ManufacturedM2 => "manufactured-m2",
            Rhs::ManufacturedM3 => "manufactured-m3",
            Rhs::Ones => "ones",
        }
    }

    pub fn manufactured(self) -> Option<Manufactured> {
        match self {
            Rhs::ManufacturedM2 => Some(Manufactured::Biharmonic),
            Rhs::ManufacturedM3 => Some(Manufactured::Triharmonic),
            Rhs::Ones => None,
        }
    }

    fn for_order(m: usize) -> Self {
        if m == 3 {
            Rhs::ManufacturedM3
        } else {
            Rhs::ManufacturedM2
        }
    }
}

impl fmt::Display for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rhs {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "manufactured-m2" => Ok(Rhs::ManufacturedM2),
            "manufactured-m3" => Ok(Rhs::ManufacturedM3),
            "ones" => Ok(Rhs::Ones),
            other => Err(format!(
                "unknown rhs '{other}' (manufactured-m2, manufactured-m3, ones)"
            )),
        }
    }
}

/// Config as read from a file or the command line; every field optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub element: Option<String>,
    pub h_exponent: Option<u32>,
    #[serde(rename = "H_exponent")]
    pub coarse_exponent: Option<u32>,
    pub overlap_layers: Option<usize>,
    pub eta: Option<f64>,
    pub precond: Option<String>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub rhs: Option<String>,
    pub output: Option<PathBuf>,
    pub check_error: Option<bool>,
    pub threads: Option<usize>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($f:ident),*) => {
        PartialConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl PartialConfig {
    pub fn from_file(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `top` win.
    pub fn overlay(self, top: PartialConfig) -> PartialConfig {
        let base = self;
        overlay!(
            base,
            top,
            element,
            h_exponent,
            coarse_exponent,
            overlap_layers,
            eta,
            precond,
            tol,
            max_iters,
            rhs,
            output,
            check_error,
            threads
        )
    }

    pub fn resolve(self) -> Result<ExperimentConfig, BenchError> {
        let bad = |msg: String| Err(BenchError::Config(msg));
        let Some(element) = self.element else {
            return bad("element is required".into());
        };
        let element: Family = element.parse().map_err(BenchError::Config)?;
        let Some(a) = self.h_exponent else {
            return bad("h_exponent is required".into());
        };
        let Some(b) = self.coarse_exponent else {
            return bad("H_exponent is required".into());
        };
        if a == 0 || b == 0 {
            return bad(format!(
                "exponents must be positive (h_exponent = {a}, H_exponent = {b})"
            ));
        }
        if a <= b {
            return bad(format!(
                "h must be finer than H: need h_exponent > H_exponent, got {a} <= {b}"
            ));
        }
        if a > 12 {
            return bad(format!("h_exponent = {a} exceeds the supported maximum 12"));
        }
        let layers = self.overlap_layers.unwrap_or(1);
        let ratio = 1usize << (a - b);
        if layers == 0 || layers >= ratio {
            return bad(format!(
                "overlap must satisfy 0 < l*h < H: l = {layers}, H/h = {ratio}"
            ));
        }
        let eta = match (element, self.eta) {
            (Family::C0ip, Some(eta)) if !(eta > 0.0) => {
                return bad(format!("eta must be positive, got {eta}"))
            }
            (Family::C0ip, eta) => Some(eta.unwrap_or(DEFAULT_ETA)),
            (_, Some(_)) => return bad(format!("eta applies only to c0ip, not {element}")),
            (_, None) => None,
        };
        let precond: Level = match self.precond {
            Some(p) => p.parse().map_err(BenchError::Config)?,
            None => Level::TwoLevel,
        };
        let tol = self.tol.unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol < 1.0) {
            return bad(format!("tol must lie in (0, 1), got {tol}"));
        }
        let max_iters = self.max_iters.unwrap_or(DEFAULT_MAX_ITERS);
        if max_iters == 0 {
            return bad("max_iters must be positive".into());
        }
        let m = element.order();
        let rhs = match self.rhs {
            Some(r) => r.parse().map_err(BenchError::Config)?,
            None => Rhs::for_order(m),
        };
        if let Some(ms) = rhs.manufactured() {
            if ms.order() != m {
                return bad(format!(
                    "rhs {rhs} needs an element of order m = {}, {element} has m = {m}",
                    ms.order()
                ));
            }
        }
        let check_error = self.check_error.unwrap_or(false);
        if check_error && rhs.manufactured().is_none() {
            return bad("check_error needs a manufactured rhs".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        Ok(ExperimentConfig {
            element,
            h_exponent: a,
            coarse_exponent: b,
            overlap_layers: layers,
            eta,
            precond,
            tol,
            max_iters,
            rhs,
            output: self
                .output
                .unwrap_or_else(|| PathBuf::from(default_prefix(element, a, b, layers, precond))),
            check_error,
            threads: self.threads,
        })
    }
}

pub fn default_prefix(element: Family, a: u32, b: u32, layers: usize, precond: Level) -> String {
    format!("{element}_h{a}_H{b}_l{layers}_{precond}")
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub element: Family,
    pub h_exponent: u32,
    pub coarse_exponent: u32,
    pub overlap_layers: usize,
    /// Set for c0ip only.
    pub eta: Option<f64>,
    pub precond: Level,
    pub tol: f64,
    pub max_iters: usize,
    pub rhs: Rhs,
    pub output: PathBuf,
    pub check_error: bool,
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn fine_cells(&self) -> usize {
        1 << self.h_exponent
    }

    pub fn coarse_cells(&self) -> usize {
        1 << self.coarse_exponent
    }

    pub fn h(&self) -> f64 {
        1.0 / self.fine_cells() as f64
    }

    pub fn coarse_h(&self) -> f64 {
        1.0 / self.coarse_cells() as f64
    }

    pub fn delta(&self) -> f64 {
        self.overlap_layers as f64 * self.h()
    }

    pub fn residuals_path(&self) -> PathBuf {
        with_suffix(&self.output, ".residuals.csv")
    }

    pub fn summary_path(&self) -> PathBuf {
        with_suffix(&self.output, ".summary.json")
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
