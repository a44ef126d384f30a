use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use envlab_core::lie::WeightStructure;
use envlab_core::specfile::{parse_spec_file, parse_weight_list};
use envlab_core::suite::{run_suite, Suite, SuiteParams, DEFAULT_CUTOFF, DEFAULT_DEGREE, DEFAULT_WEIGHT_CUTOFF};

/// Run exact verification suites on a Lie algebra given by structure constants.
///
/// Exit status: 0 every check passed, 1 a check failed, 2 bad input,
/// 3 a resource cap forced a check to be skipped.
#[derive(Parser, Debug)]
#[command(name = "envlab", version)]
struct Cli {
    /// structure, series, hopf, cohomology, koszul, parallelize, contract, weights or all
    suite: String,
    /// Algebra description (`.alg` file)
    spec: PathBuf,
    /// Weight cutoff W of the truncation U(g)/J_{W+1}
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    cutoff: u64,
    /// Polynomial degree bound D for the dual-side checks
    #[arg(long, default_value_t = DEFAULT_DEGREE)]
    degree: u64,
    /// Cutoff for weight-sequence validation
    #[arg(long, default_value_t = DEFAULT_WEIGHT_CUTOFF)]
    weight_cutoff: u64,
    /// Override weights: `g:w1,..,wN` (grading) or `f:w1,..,wN` (filtration)
    #[arg(long)]
    weights: Option<String>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_weights(s: &str) -> Result<WeightStructure, String> {
    let (kind, list) = s.split_once(':').ok_or("expected `g:w1,..` or `f:w1,..`")?;
    let w = parse_weight_list(list)?;
    match kind.trim() {
        "g" => Ok(WeightStructure::grading(w)),
        "f" => Ok(WeightStructure::filtration(w)),
        other => Err(format!("unknown weight kind `{other}`, expected g or f")),
    }
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("envlab: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let suite: Suite = match cli.suite.parse() {
        Ok(s) => s,
        Err(e) => return input_error(e),
    };
    let spec = match parse_spec_file(&cli.spec) {
        Ok(s) => s,
        Err(e) => return input_error(format!("{}: {e}", cli.spec.display())),
    };
    let weights = match cli.weights.as_deref().map(parse_weights).transpose() {
        Ok(w) => w,
        Err(e) => return input_error(format!("--weights: {e}")),
    };
    let params = SuiteParams { cutoff: cli.cutoff, degree: cli.degree, weight_cutoff: cli.weight_cutoff, weights };
    let report = match run_suite(&spec, suite, &params) {
        Ok(r) => r,
        Err(e) => return input_error(e),
    };
    let text = report.to_json_string();
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                return input_error(format!("cannot write {}: {e}", path.display()));
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.exit_code() as u8)
}
