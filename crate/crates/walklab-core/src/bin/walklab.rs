//! Command-line front end for the walk laboratory.
//!
//! `walklab list` shows the registered identity checks, `walklab run`
//! executes them and reports digit agreement (optionally writing a JSON or
//! CSV report), and the two `export-*` subcommands dump exact integer data —
//! newform q-expansion coefficients and walk moments — as CSV for use by
//! external tools.
//!
//! The process exits 0 iff every executed check passed, so the binary can
//! gate a CI job directly.  `WALKLAB_DIGITS` overrides the default working
//! precision when `--digits` is not given.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use walklab_core::lfunc::{coefficients, Newform};
use walklab_core::registry::{list_checks, run_checks_configured, CheckResult};
use walklab_core::report::{write_report, ReportFormat};
use walklab_core::series::{
    variant_even_moment, w2_even_moment, w3_even_moment, w4_even_moment,
};

#[derive(Parser)]
#[command(
    name = "walklab",
    version,
    about = "High-precision checks for random-walk moments, densities and L-values"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List registered checks matching a glob filter.
    List {
        /// Glob over check ids (`*` and `?`).
        #[arg(long, default_value = "*")]
        filter: String,
    },
    /// Run checks and report digit agreement between both sides.
    Run {
        /// Glob over check ids (`*` and `?`).
        #[arg(long, default_value = "*")]
        filter: String,
        /// Working precision in decimal digits (default: per-check, mostly 30).
        #[arg(long)]
        digits: Option<u32>,
        /// Global random seed; Monte-Carlo checks derive theirs from it.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Number of worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Write a JSON report to this path.
        #[arg(long, conflicts_with = "csv")]
        json: Option<PathBuf>,
        /// Write a CSV report to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Export q-expansion coefficients of one of the eta-product newforms.
    ExportCoeffs {
        /// Form name: f2, f2_tilde, f2_hat, f3 or f4.
        #[arg(long)]
        form: String,
        /// Largest index n to export (coefficients a_1 .. a_n).
        #[arg(long = "n-max")]
        n_max: usize,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Export exact even moments W(2n) of a walk as integers (rationals for
    /// none of the supported walks).
    ExportMoments {
        /// Which walk's moments to export.
        #[arg(long, value_enum)]
        walk: MomentWalk,
        /// Largest n to export (moments W(0) .. W(2n)).
        #[arg(long = "n-max")]
        n_max: u32,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MomentWalk {
    /// Two-step uniform walk.
    W2,
    /// Three-step uniform walk.
    W3,
    /// Four-step uniform walk.
    W4,
    /// The variant walk |1 + e^{ia}| |1 + e^{ib}| + 1 (moments 1, 5, 53, ...).
    Wtilde,
}

fn env_digits() -> Option<u32> {
    let raw = std::env::var("WALKLAB_DIGITS").ok()?;
    match raw.trim().parse::<u32>() {
        Ok(d) if d >= 5 => Some(d),
        _ => {
            eprintln!("warning: ignoring WALKLAB_DIGITS={raw:?} (want an integer >= 5)");
            None
        }
    }
}

fn cmd_list(filter: &str) {
    let defs = list_checks(filter);
    for d in &defs {
        println!(
            "{:26} {:12} {:7} {:>3}d  {}",
            d.id,
            d.status.as_str(),
            d.cost.as_str(),
            d.default_digits(),
            d.description
        );
    }
    eprintln!("{} check(s) match {filter:?}", defs.len());
}

fn print_result(r: &CheckResult) {
    let mark = if r.pass { "ok " } else { "FAIL" };
    println!(
        "{mark:4} {:26} {:12} {:>4}/{:<3} digits  {:>8.2}s  @{}d",
        r.id,
        r.status.as_str(),
        r.digits_agreed,
        r.min_digits_expected,
        r.elapsed_seconds,
        r.precision_used
    );
    if !r.pass {
        println!("      lhs = {}", r.lhs_value);
        println!("      rhs = {}", r.rhs_value);
    }
}

fn cmd_run(
    filter: &str,
    digits: Option<u32>,
    seed: u64,
    jobs: usize,
    json: Option<PathBuf>,
    csv: Option<PathBuf>,
) -> ExitCode {
    let digits = digits.or_else(env_digits);
    let results = run_checks_configured(filter, digits, seed, jobs);
    if results.is_empty() {
        eprintln!("no checks match {filter:?}");
        return ExitCode::SUCCESS;
    }
    for r in &results {
        print_result(r);
    }
    let passed = results.iter().filter(|r| r.pass).count();
    let total = results.len();
    let elapsed: f64 = results.iter().map(|r| r.elapsed_seconds).sum();
    println!("{passed}/{total} checks passed in {elapsed:.1}s of check time (seed {seed})");

    // The report header records the requested global precision; when each
    // check ran at its own default, the maximum used is the honest summary.
    let precision = digits.unwrap_or_else(|| {
        results.iter().map(|r| r.precision_used).max().unwrap_or(30)
    });
    let report = json
        .map(|p| (p, ReportFormat::Json))
        .or(csv.map(|p| (p, ReportFormat::Csv)));
    if let Some((path, format)) = report {
        if let Err(e) = write_report(&results, &path, format, precision, seed) {
            eprintln!("error: cannot write report to {}: {e}", path.display());
            return ExitCode::from(2);
        }
        eprintln!("report written to {}", path.display());
    }
    if passed == total {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn cmd_export_coeffs(form: &str, n_max: usize, out: &PathBuf) -> ExitCode {
    let Some(form) = Newform::from_name(form) else {
        let names: Vec<&str> = Newform::ALL.iter().map(|f| f.name()).collect();
        eprintln!("error: unknown form {form:?}; expected one of {}", names.join(", "));
        return ExitCode::from(2);
    };
    let coeffs = coefficients(form, n_max);
    let mut text = String::from("n,a_n\n");
    for (n, a) in coeffs.iter().enumerate().skip(1).take(n_max) {
        text.push_str(&format!("{n},{a}\n"));
    }
    if let Err(e) = std::fs::write(out, text) {
        eprintln!("error: cannot write {}: {e}", out.display());
        return ExitCode::from(2);
    }
    eprintln!(
        "wrote a_1..a_{n_max} of {} (level {}, weight {}) to {}",
        form.name(),
        form.level(),
        form.weight(),
        out.display()
    );
    ExitCode::SUCCESS
}

fn cmd_export_moments(walk: MomentWalk, n_max: u32, out: &PathBuf) -> ExitCode {
    let (label, moment): (&str, fn(u32) -> rug::Integer) = match walk {
        MomentWalk::W2 => ("w2", w2_even_moment),
        MomentWalk::W3 => ("w3", w3_even_moment),
        MomentWalk::W4 => ("w4", w4_even_moment),
        MomentWalk::Wtilde => ("wtilde", variant_even_moment),
    };
    let mut text = String::from("n,moment_2n\n");
    for n in 0..=n_max {
        text.push_str(&format!("{n},{}\n", moment(n)));
    }
    if let Err(e) = std::fs::write(out, text) {
        eprintln!("error: cannot write {}: {e}", out.display());
        return ExitCode::from(2);
    }
    eprintln!("wrote {label} moments W(0)..W({}) to {}", 2 * n_max, out.display());
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List { filter } => {
            cmd_list(&filter);
            ExitCode::SUCCESS
        }
        Command::Run {
            filter,
            digits,
            seed,
            jobs,
            json,
            csv,
        } => cmd_run(&filter, digits, seed, jobs, json, csv),
        Command::ExportCoeffs { form, n_max, out } => cmd_export_coeffs(&form, n_max, &out),
        Command::ExportMoments { walk, n_max, out } => cmd_export_moments(walk, n_max, &out),
    }
}
