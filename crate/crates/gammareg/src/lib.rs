//! Command-line front end for `gammareg-core`: problem spec files, CSV and
//! JSON reports, and the verification suites.

pub mod app;
pub mod commands;
pub mod io;
pub mod spec;
pub mod verify;

use std::path::PathBuf;
use std::sync::Arc;

use gammareg_core::minimize::default_minimizer_tol;
use gammareg_core::subdiff::{differentiability_scan_nodes, DifferentiabilityScan};
use gammareg_core::transform::{envelope_tolerance, value_tolerance, DualGrid};
use gammareg_core::SampledFunction;
use serde_json::{json, Map, Value};

use crate::spec::{FunctionSource, ProblemSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit status for bad input.
pub const EXIT_INPUT: i32 = 1;
/// Exit status for a failed contract.
pub const EXIT_CONTRACT: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("spec key `{key}`: {message}")]
    Spec { key: String, message: String },
    #[error("spec line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] gammareg_core::Error),
}

impl CliError {
    /// Failed hypotheses of the checked statements count as failed contracts;
    /// everything else is an input error.
    pub fn exit_code(&self) -> i32 {
        use gammareg_core::Error as E;
        match self {
            CliError::Core(
                E::ConvexityHypothesisFails { .. } | E::DensityHypothesisFails { .. } | E::SubsetNotInM { .. },
            ) => EXIT_CONTRACT,
            _ => EXIT_INPUT,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    /// Overrides the minimizer tolerance.
    pub tol: Option<f64>,
    pub threads: usize,
    /// Overrides the dual grid resolution.
    pub dual_res: Option<usize>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tol: None,
            threads: 1,
            dual_res: None,
        }
    }
}

/// A loaded spec with its sampled function and effective tolerances.
pub struct Problem {
    pub spec: ProblemSpec,
    pub h: SampledFunction,
    pub dual: DualGrid,
    /// Minimizer tolerance: `--tol`, else the spec's `tol`, else the default for `h`.
    pub tol: f64,
    /// The explicit tolerance, if any; tilted functions otherwise use their own default.
    pub tol_override: Option<f64>,
    pub delta_env: f64,
    pub threads: usize,
}

impl Problem {
    pub fn new(spec: ProblemSpec, opts: &Options) -> Result<Problem, CliError> {
        let grid = Arc::new(spec.grid()?);
        let h = match &spec.function {
            FunctionSource::Expression { expr, .. } => {
                SampledFunction::from_expr(grid, expr).map_err(|e| CliError::Spec {
                    key: "expression".into(),
                    message: e.to_string(),
                })?
            }
            FunctionSource::Samples(path) => io::read_samples(path, grid)?,
        };
        let dual_res = opts.dual_res.or(spec.dual_resolution);
        let dual = DualGrid::for_function(&h, dual_res)?;
        let tol_override = opts.tol.or(spec.tol);
        let tol = tol_override.unwrap_or_else(|| default_minimizer_tol(&h));
        let delta_env = envelope_tolerance(&h, &dual);
        Ok(Problem {
            spec,
            h,
            dual,
            tol,
            tol_override,
            delta_env,
            threads: opts.threads.max(1),
        })
    }

    pub fn load(path: &std::path::Path, opts: &Options) -> Result<Problem, CliError> {
        Problem::new(ProblemSpec::load(path)?, opts)
    }

    pub fn dim(&self) -> usize {
        self.h.grid().dim()
    }

    /// Fields shared by every report.
    pub fn header(&self, command: &str) -> Map<String, Value> {
        let grid = self.h.grid();
        let json = json!({
            "schema": 1,
            "tool": "gammareg",
            "version": VERSION,
            "command": command,
            "spec": {
                "name": self.spec.name,
                "sha256": self.spec.sha256,
            },
            "grid": {
                "dim": grid.dim(),
                "resolution": grid.resolution(),
                "nodes": grid.len(),
                "spacing": io::nums(grid.spacing()),
            },
            "tolerances": {
                "eps_geom": io::num(grid.eps_geom()),
                "minimizer_tol": io::num(self.tol),
                "value_tol": io::num(value_tolerance(&self.h)),
                "delta_env": io::num(self.delta_env),
                "dual_resolution": self.dual.grid().resolution()[0],
                "dual_spacing": io::num(self.dual.max_spacing()),
            },
        });
        match json {
            Value::Object(m) => m,
            _ => unreachable!(),
        }
    }

    /// Differentiability scan over `nodes` split across `self.threads`
    /// threads; entries come back in node order whatever the thread count.
    pub fn scan(&self, nodes: &[usize], width_tol: Option<f64>) -> Result<DifferentiabilityScan, CliError> {
        let width_tol = width_tol.or(self.spec.width_tol);
        let threads = self.threads.min(nodes.len()).max(1);
        if threads == 1 {
            return Ok(differentiability_scan_nodes(&self.h, &self.dual, Some(nodes), width_tol)?);
        }
        let chunk = nodes.len().div_ceil(threads);
        let parts: Vec<_> = std::thread::scope(|s| {
            let handles: Vec<_> = nodes
                .chunks(chunk)
                .map(|c| s.spawn(move || differentiability_scan_nodes(&self.h, &self.dual, Some(c), width_tol)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("scan thread panicked")).collect()
        });
        let mut out = DifferentiabilityScan {
            entries: Vec::new(),
            scanned: 0,
            width_tol: 0.0,
        };
        for part in parts {
            let part = part?;
            out.entries.extend(part.entries);
            out.scanned += part.scanned;
            out.width_tol = part.width_tol;
        }
        Ok(out)
    }
}
