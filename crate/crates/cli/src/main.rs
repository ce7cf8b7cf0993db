//! `qcal`: evaluate q-exponential and q-trigonometric functions, sweep them
//! to CSV, and run the identity checker.
//!
//! Exit codes: 0 success, 1 math-domain failure (pole, outside the series
//! domain, no convergence, failed identity), 2 usage, 3 partial sweep,
//! 4 I/O.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qcal::sweep::{run_sweep, write_csv, SweepFunction, SweepSpec, SweepVar};
use qcal::verify::{parse_override, run_all, IdentityId, IdentityReport, VerifyOptions};
use qcal::{qexp, EvalConfig, EvalStatus, Execution, Method, QParam};

const EXIT_DOMAIN: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_PARTIAL: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "qcal",
    version,
    about = "q-exponential and q-trigonometric functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one function at one point.
    Eval {
        /// eq, Eq, calE, sin_q, cos_q, Sin_q, Cos_q, tan_q, calSin, calCos
        #[arg(value_parser = parse_function)]
        function: SweepFunction,
        #[arg(long, value_parser = parse_q)]
        q: QParam,
        /// Argument as `re` or `re,im`.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        z: Complex64,
        #[arg(long, default_value = "auto", value_parser = parse_method)]
        method: Method,
        #[arg(long, default_value = "1e-14")]
        rel_tol: f64,
    },
    /// Evaluate a function on a uniform grid and write CSV.
    Sweep {
        #[arg(value_parser = parse_function)]
        function: SweepFunction,
        #[arg(long, value_parser = parse_q)]
        q: QParam,
        /// x_real or x_imag_axis
        #[arg(long, default_value = "x_real", value_parser = parse_var)]
        var: SweepVar,
        #[arg(long, allow_hyphen_values = true)]
        start: f64,
        #[arg(long, allow_hyphen_values = true)]
        stop: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value = "auto", value_parser = parse_method)]
        method: Method,
        #[arg(long, default_value = "1e-14")]
        rel_tol: f64,
        /// Output path; `-` writes to stdout.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every registered identity and report residuals.
    Check {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Tolerance override `Name=value`; repeatable.
        #[arg(long = "tol", value_parser = parse_tol)]
        tol: Vec<(IdentityId, f64)>,
    },
    /// Print the radius of convergence R_q of the improved exponential series.
    Radius {
        #[arg(long, value_parser = parse_q)]
        q: QParam,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn parse_function(s: &str) -> Result<SweepFunction, String> {
    s.parse().map_err(|e: qcal::QError| e.to_string())
}

fn parse_q(s: &str) -> Result<QParam, String> {
    let q: f64 = s.parse().map_err(|e| format!("{e}"))?;
    QParam::new(q).map_err(|e| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: qcal::QError| e.to_string())
}

fn parse_var(s: &str) -> Result<SweepVar, String> {
    s.parse().map_err(|e: qcal::QError| e.to_string())
}

fn parse_tol(s: &str) -> Result<(IdentityId, f64), String> {
    parse_override(s).map_err(|e| e.to_string())
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let mut parts = s.split(',');
    let re = parts.next().unwrap_or_default().trim();
    let re: f64 = re
        .parse()
        .map_err(|e| format!("bad real part `{re}`: {e}"))?;
    let im = match parts.next() {
        Some(im) => im
            .trim()
            .parse()
            .map_err(|e| format!("bad imaginary part `{im}`: {e}"))?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(format!("expected `re` or `re,im`, got `{s}`"));
    }
    Ok(Complex64::new(re, im))
}

/// Formats `x` with 17 significant digits, fixed-point where readable.
fn sig17(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return format!("{:.16}", 0.0);
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..17).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, x)
    } else {
        format!("{x:.16e}")
    }
}

fn format_value(z: Complex64) -> String {
    if z.im == 0.0 {
        sig17(z.re)
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{} {sign} {}i", sig17(z.re), sig17(z.im.abs()))
    }
}

fn cmd_eval(
    function: SweepFunction,
    q: QParam,
    z: Complex64,
    method: Method,
    rel_tol: f64,
) -> ExitCode {
    let cfg = EvalConfig {
        rel_tol,
        method,
        ..EvalConfig::default()
    };
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    let e = function.evaluate(z, q, &cfg);
    if e.status != EvalStatus::Converged {
        let message = match e.status {
            EvalStatus::Pole => format!("pole at z = {}", format_arg(z)),
            EvalStatus::OutsideDomain => format!(
                "z = {} is outside the series domain; try --method product",
                format_arg(z)
            ),
            _ => format!("no convergence at z = {}", format_arg(z)),
        };
        eprintln!("error: {function}: {message}");
        println!("status: {}", e.status);
        return ExitCode::from(EXIT_DOMAIN);
    }
    println!("value: {}", format_value(e.value));
    match e.terms_used {
        Some(t) => println!("terms_used: {t}"),
        None => println!("terms_used: n/a"),
    }
    match e.err_estimate {
        Some(err) => println!("err_estimate: {err:e}"),
        None => println!("err_estimate: n/a"),
    }
    println!("status: {}", e.status);
    ExitCode::SUCCESS
}

fn format_arg(z: Complex64) -> String {
    if z.im == 0.0 {
        z.re.to_string()
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

fn cmd_sweep(spec: SweepSpec, out: PathBuf) -> ExitCode {
    let rows = match run_sweep(&spec, Execution::default()) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let written = if out.as_os_str() == "-" {
        write_csv(io::stdout().lock(), &rows)
    } else {
        File::create(&out).and_then(|f| write_csv(BufWriter::new(f), &rows))
    };
    if let Err(e) = written {
        eprintln!("error: cannot write {}: {e}", out.display());
        return ExitCode::from(EXIT_IO);
    }
    let failed = rows
        .iter()
        .filter(|r| r.eval.status != EvalStatus::Converged)
        .count();
    if failed > 0 {
        eprintln!("{failed} of {} rows did not converge", rows.len());
        ExitCode::from(EXIT_PARTIAL)
    } else {
        ExitCode::SUCCESS
    }
}

fn seed_from_env() -> Result<u64, String> {
    match std::env::var("QCAL_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|e| format!("QCAL_SEED must be an unsigned integer: {e}")),
        Err(_) => Ok(qcal::verify::DEFAULT_SEED),
    }
}

fn print_reports(format: Format, reports: &[IdentityReport]) -> io::Result<()> {
    let mut out = io::stdout().lock();
    match format {
        Format::Text => {
            for r in reports {
                writeln!(
                    out,
                    "{:<24} {:.3e} {}",
                    r.id.name(),
                    r.max_residual,
                    if r.passed { "PASS" } else { "FAIL" }
                )?;
            }
        }
        Format::Json => {
            let doc = serde_json::json!({ "schema": 1, "reports": reports });
            serde_json::to_writer_pretty(&mut out, &doc)?;
            writeln!(out)?;
        }
    }
    out.flush()
}

fn cmd_check(format: Format, tol: Vec<(IdentityId, f64)>) -> ExitCode {
    let seed = match seed_from_env() {
        Ok(seed) => seed,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let options = VerifyOptions {
        seed,
        tolerance_overrides: tol.into_iter().collect::<HashMap<_, _>>(),
        execution: Execution::default(),
    };
    let reports = run_all(&options);
    if let Err(e) = print_reports(format, &reports) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_IO);
    }
    if reports.iter().all(|r| r.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_DOMAIN)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Eval {
            function,
            q,
            z,
            method,
            rel_tol,
        } => cmd_eval(function, q, z, method, rel_tol),
        Command::Sweep {
            function,
            q,
            var,
            start,
            stop,
            steps,
            method,
            rel_tol,
            out,
        } => cmd_sweep(
            SweepSpec {
                function,
                q,
                var,
                start,
                stop,
                steps,
                method,
                rel_tol,
            },
            out,
        ),
        Command::Check { format, tol } => cmd_check(format, tol),
        Command::Radius { q } => {
            println!("{}", qexp::radius_of_convergence(q).radius);
            ExitCode::SUCCESS
        }
    }
}
