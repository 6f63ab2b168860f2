use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use cusp_core::report::{run, RunOptions};

/// Count the cusps of a polynomial map of the plane, by sign and by region.
///
/// The problem file has one `key = expression` per line with keys f1, f2
/// and an optional region polynomial u; cusps in {u > 0} are then counted too.
#[derive(Debug, Parser)]
#[command(name = "cusps", version)]
struct Args {
    /// Problem file, or `-` for standard input.
    input: PathBuf,
    /// Emit a JSON report.
    #[arg(long)]
    json: bool,
    /// Also isolate the cusps numerically with interval arithmetic.
    #[arg(long)]
    oracle: bool,
    /// Half-width of the square searched by the oracle.
    #[arg(long, value_name = "R", default_value_t = 16.0)]
    radius: f64,
    /// Reject inputs or intermediate polynomials above this total degree.
    #[arg(long, value_name = "N", default_value_t = 64)]
    degree_guard: u32,
    /// List the monomial basis of the quotient algebra.
    #[arg(long)]
    basis: bool,
    /// Report time spent in each phase.
    #[arg(long)]
    timings: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = run(&RunOptions {
        input_path: args.input,
        json_output: args.json,
        run_oracle: args.oracle,
        oracle_radius: args.radius,
        degree_guard: args.degree_guard,
        show_basis: args.basis,
        timings: args.timings,
    });
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.exit_code as u8)
}
