use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rankone::cli::{canonical, run, run_demo, Params, COMMANDS};

/// Exact p-adic and torsion-coset computations driven by JSON jobs.
#[derive(Parser, Debug)]
#[command(name = "rankone", version)]
struct Args {
    /// Subcommand, or `demo` for the built-in suite.
    #[arg(value_parser = command_name)]
    command: String,
    /// Input document; standard input when absent or `-`.
    #[arg(long, env = "RANKONE_INPUT")]
    input: Option<PathBuf>,
    /// Report destination; standard output when absent or `-`.
    #[arg(long, env = "RANKONE_OUTPUT")]
    output: Option<PathBuf>,
    #[arg(long, env = "RANKONE_PRECISION", default_value_t = 20)]
    precision: i64,
    #[arg(long, env = "RANKONE_ORDER_BOUND", default_value_t = 6)]
    order_bound: i64,
    #[arg(long, env = "RANKONE_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads for scans; 0 picks one per core.
    #[arg(long, env = "RANKONE_JOBS", default_value_t = 0)]
    jobs: usize,
}

fn command_name(s: &str) -> Result<String, String> {
    if s == "demo" || COMMANDS.contains(&s) {
        Ok(s.to_string())
    } else {
        Err(format!("expected one of: demo, {}", COMMANDS.join(", ")))
    }
}

fn is_stdio(p: &Option<PathBuf>) -> bool {
    p.as_ref().map_or(true, |p| p.as_os_str() == "-")
}

fn read_input(path: &Option<PathBuf>) -> std::io::Result<String> {
    let mut s = String::new();
    if is_stdio(path) {
        std::io::stdin().read_to_string(&mut s)?;
    } else {
        s = std::fs::read_to_string(path.as_ref().expect("checked"))?;
    }
    Ok(s)
}

fn write_report(path: &Option<PathBuf>, text: &str) -> std::io::Result<()> {
    if is_stdio(path) {
        std::io::stdout().write_all(text.as_bytes())
    } else {
        std::fs::write(path.as_ref().expect("checked"), text)
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let params = Params { precision: args.precision, order_bound: args.order_bound, seed: args.seed, jobs: args.jobs };
    if args.command == "demo" {
        let report = run_demo(&params);
        if let Err(e) = write_report(&args.output, &canonical(&report)) {
            eprintln!("rankone: cannot write report: {e}");
            return ExitCode::from(2);
        }
        return ExitCode::SUCCESS;
    }
    let text = match read_input(&args.input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("rankone: cannot read input: {e}");
            return ExitCode::from(2);
        }
    };
    let input: serde_json::Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("rankone: malformed JSON: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = run(&args.command, &input, &params);
    if let Some(msg) = &outcome.diagnostic {
        eprintln!("rankone: {msg}");
    }
    if let Some(report) = &outcome.report {
        if let Err(e) = write_report(&args.output, &canonical(report)) {
            eprintln!("rankone: cannot write report: {e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(outcome.code as u8)
}
