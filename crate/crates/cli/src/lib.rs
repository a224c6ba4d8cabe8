//! Scenario runner for the `wsmorse` library.
//!
//! Exit codes: 0 success, 1 failed acceptance criteria, 2 invalid input,
//! 3 numerical failure. Failures also write `error.json`.

pub mod commands;
pub mod output;
pub mod scenario;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use commands::{CliError, CliResult, Context, Overrides};
use scenario::{parse_list, Scenario};

#[derive(Debug, Parser)]
#[command(name = "wsmorse", version, about = "Closed-string geodesic surfaces, Jacobi fields and index forms")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Evolve a tube and write per-step residuals.
    Simulate(Common),
    /// Integrate the Jacobi matrix and locate conjugate strings.
    Jacobi(Common),
    /// Index form, positivity certificate and negative mode.
    Index(Common),
    /// Conjugate strings over a list of tidal eigenvalues.
    Sweep(Common),
    /// Run an acceptance suite (core, jacobi, indexform, geometry).
    Acceptance {
        #[arg(default_value = "core")]
        suite: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 20240611)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file, or a built-in name (flat_ring, sphere_sweep, equator).
    #[arg(long)]
    scenario: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated ε values for the negative mode.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

fn context(c: &Common) -> CliResult<Context> {
    let scenario = Scenario::load(&c.scenario)?;
    let eps = c.eps.as_deref().map(|e| parse_list("--eps", e)).transpose()?;
    Context::new(
        scenario,
        Overrides {
            out: c.out.clone(),
            seed: c.seed,
            eps,
            dt: c.dt,
        },
    )
}

fn report(err: &CliError, dir: Option<PathBuf>) -> i32 {
    let code = err.exit_code();
    let record = ErrorRecord {
        error: err.kind(),
        message: err.to_string(),
        exit_code: code,
    };
    let text = serde_json::to_string_pretty(&record).expect("serializable error");
    eprintln!("{text}");
    if let Some(dir) = dir {
        if std::fs::create_dir_all(&dir).is_ok() {
            let _ = std::fs::write(dir.join("error.json"), format!("{text}\n"));
        }
    }
    code
}

/// Parses `args` (including the program name) and runs the verb.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match cli.verb {
        Verb::Acceptance { suite, out, seed } => {
            let root = out.unwrap_or_else(|| PathBuf::from("out"));
            match commands::acceptance(&suite, seed, &root) {
                Ok(_) => 0,
                Err(e) => report(&e, Some(root)),
            }
        }
        Verb::Simulate(c) => run_verb(&c, commands::simulate),
        Verb::Jacobi(c) => run_verb(&c, commands::jacobi),
        Verb::Index(c) => run_verb(&c, commands::index),
        Verb::Sweep(c) => run_verb(&c, commands::sweep),
    }
}

fn run_verb(c: &Common, f: fn(&Context) -> CliResult<()>) -> i32 {
    let ctx = match context(c) {
        Ok(ctx) => ctx,
        Err(e) => return report(&e, None),
    };
    match f(&ctx) {
        Ok(()) => 0,
        Err(e) => report(&e, Some(ctx.out_root.join(&ctx.stamp.scenario))),
    }
}
