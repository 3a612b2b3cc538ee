use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::commands::{self, Command};
use crate::verify::{run_suite, Suite};
use crate::{CliError, Options, Problem, EXIT_CONTRACT, VERSION};

#[derive(Parser, Debug)]
#[command(name = "gammareg", version, about = "Convex envelopes, conjugates and minimizer sets of sampled functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
    #[command(flatten)]
    pub common: Common,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Common {
    /// Problem spec file (`verify` also takes a directory of `*.spec` files).
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    /// Directory for the reports.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Minimizer tolerance (default 1e-9 * (1 + max |h|)).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads for differentiability scans.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Dual grid resolution per axis.
    #[arg(long = "dual-res", global = true)]
    pub dual_res: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum Cmd {
    /// Conjugate on the dual grid.
    Conjugate,
    /// Convex envelope on the primal grid.
    Envelope,
    /// Lower semi-continuous hull.
    LscHull,
    /// Generalized and envelope minimizers.
    Minimizers,
    /// Subdifferential of the conjugate at the spec's tilt.
    Subdiff,
    /// Nested exhaustion over the spec's family.
    Exhaust,
    /// Maximum of a convex sum over extreme points.
    Bauer,
    /// Representing measure at the spec's `measure_at` node.
    Measure,
    /// Run verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| CliError::Io {
        path,
        message: e.to_string(),
    })
}

fn to_json(map: Map<String, Value>) -> String {
    let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("reports serialize");
    s.push('\n');
    s
}

/// Spec files under `path`: the file itself, or the sorted `*.spec` files of a directory.
fn spec_files(path: &Path) -> Result<Vec<PathBuf>, CliError> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let io_err = |e: std::io::Error| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(io_err)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "spec"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Usage(format!("no .spec files in {}", path.display())));
    }
    Ok(files)
}

/// Runs one command and writes its reports; returns the exit status.
pub fn execute(cmd: Cmd, common: &Common) -> Result<i32, CliError> {
    let spec = common
        .spec
        .as_deref()
        .ok_or_else(|| CliError::Usage("--spec is required".into()))?;
    if common.threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    if common.tol.is_some_and(|t| !(t >= 0.0 && t.is_finite())) {
        return Err(CliError::Usage("--tol must be a finite non-negative number".into()));
    }
    std::fs::create_dir_all(&common.out).map_err(|e| CliError::Io {
        path: common.out.clone(),
        message: e.to_string(),
    })?;
    let opts = Options {
        tol: common.tol,
        threads: common.threads,
        dual_res: common.dual_res,
    };
    let command = match cmd {
        Cmd::Conjugate => Command::Conjugate,
        Cmd::Envelope => Command::Envelope,
        Cmd::LscHull => Command::LscHull,
        Cmd::Minimizers => Command::Minimizers,
        Cmd::Subdiff => Command::Subdiff,
        Cmd::Exhaust => Command::Exhaust,
        Cmd::Bauer => Command::Bauer,
        Cmd::Measure => Command::Measure,
        Cmd::Verify { suite } => return verify(spec, suite, &opts, &common.out),
    };
    let p = Problem::load(spec, &opts)?;
    let report = commands::run(command, &p)?;
    write(&common.out, &format!("{}.csv", command.name()), report.table.as_str())?;
    write(&common.out, &format!("{}.json", command.name()), &to_json(report.json))?;
    Ok(if report.passed { 0 } else { EXIT_CONTRACT })
}

fn verify(spec: &Path, suite: Suite, opts: &Options, out: &Path) -> Result<i32, CliError> {
    let mut runs = Vec::new();
    let mut all_passed = true;
    for file in spec_files(spec)? {
        let p = Problem::load(&file, opts)?;
        let checks = run_suite(&p, suite)?;
        let passed = checks.iter().all(|c| c.passed);
        all_passed &= passed;
        let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        if failed.is_empty() {
            println!("{}: {} checks passed", p.spec.name, checks.len());
        } else {
            println!("{}: FAILED {}", p.spec.name, failed.join(", "));
        }
        let mut run = p.header("verify");
        run.insert("checks".into(), Value::Array(checks.iter().map(|c| c.to_json()).collect()));
        run.insert("passed".into(), json!(passed));
        runs.push(Value::Object(run));
    }
    let mut report = Map::new();
    report.insert("schema".into(), json!(1));
    report.insert("tool".into(), json!("gammareg"));
    report.insert("version".into(), json!(VERSION));
    report.insert("suite".into(), serde_json::to_value(format!("{suite:?}").to_lowercase()).unwrap());
    report.insert("runs".into(), Value::Array(runs));
    report.insert("passed".into(), json!(all_passed));
    write(out, "verify.json", &to_json(report))?;
    Ok(if all_passed { 0 } else { EXIT_CONTRACT })
}

/// Parses `args`, runs, prints a one-line diagnostic on error, and returns the exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { crate::EXIT_INPUT } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command, &cli.common) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
