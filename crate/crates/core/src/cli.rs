//! `quickspace` command line.
//!
//! Exit status: 0 when every check passes, 1 when a verification fails,
//! 2 for usage errors (bad flags, unknown suite, sizes over a cap, zero
//! trials).
//!
//! Output schemas:
//!
//! - CSV: a header row, then one row per record. Rationals are `num/den`,
//!   leaves of a run are `_`.
//! - JSON: `{"command", "parameters", "rows"}` (or `"report"` for
//!   `montecarlo`). Rationals are `{"num": "...", "den": "..."}` with decimal
//!   strings; runs appear both as a tree with `null` leaves and as notation.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::{BigInt, ToPrimitive};
use serde_json::{json, Value};

use crate::error::Error;
use crate::prob_core::ExactRational;
use crate::quicksort_space::{enumerate_with_cap, run_count, DEFAULT_ENUM_CAP};
use crate::recurrence::{t_float_table, upper_bound, TExactTable, DEFAULT_EXACT_CAP};
use crate::simulator::{self, DEFAULT_PERM_CAP, DEFAULT_SEED};

pub mod verify;

use verify::{Check, Settings, Suite};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "quickspace",
    version,
    about = "Exact probability space of randomized QuickSort runs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, global = true, value_enum, default_value = "table")]
    format: OutputFormat,
    /// Largest n whose run space is enumerated.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUM_CAP)]
    cap_enum: usize,
    /// Largest n for exact rational recurrence values.
    #[arg(long, global = true, default_value_t = DEFAULT_EXACT_CAP)]
    cap_exact: usize,
    /// Largest n whose permutations are enumerated.
    #[arg(long, global = true, default_value_t = DEFAULT_PERM_CAP)]
    cap_perm: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a verification suite: core-laws, space, recurrence, splitter, simulator or all.
    Verify {
        suite: String,
        /// Sweep size for the suite (defaults differ per suite).
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// T(n) exact and floating, the 2n ln n bound and |Q_n| for n = 0..=n_max.
    Table {
        #[arg(long)]
        n_max: usize,
    },
    /// Every run of Q_n with its probability and comparison count.
    Enumerate {
        #[arg(long)]
        n: usize,
    },
    /// Monte Carlo estimate of the expected comparisons.
    Montecarlo {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

/// Runs the command in `args` (including the program name), writing output
/// to `out` and diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(CliError::Usage(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILED
        }
    }
}

enum CliError {
    Usage(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Usage(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    let c = &cli.common;
    match cli.command {
        Command::Verify {
            ref suite,
            n_max,
            trials,
            seed,
        } => {
            let suite: Suite = suite.parse()?;
            if trials == 0 {
                return Err(Error::ZeroTrials.into());
            }
            let settings = Settings {
                n_max,
                trials,
                seed,
                cap_enum: c.cap_enum,
                cap_exact: c.cap_exact,
                cap_perm: c.cap_perm,
                ..Settings::default()
            };
            settings.check(suite)?;
            let checks = verify::run_suite(suite, &settings);
            write_verify(out, c.format, suite, &settings, &checks)?;
            Ok(if checks.iter().all(|ch| ch.passed) {
                EXIT_OK
            } else {
                EXIT_FAILED
            })
        }
        Command::Table { n_max } => {
            write_table(out, c, n_max)?;
            Ok(EXIT_OK)
        }
        Command::Enumerate { n } => {
            write_enumeration(out, c, n)?;
            Ok(EXIT_OK)
        }
        Command::Montecarlo { n, trials, seed } => {
            write_monte_carlo(out, c, n, trials, seed)?;
            Ok(EXIT_OK)
        }
    }
}

/// `{"num": "...", "den": "..."}`.
pub fn rational_json(r: &ExactRational) -> Value {
    json!({ "num": r.numer().to_string(), "den": r.denom().to_string() })
}

/// Reads a rational written by [`rational_json`].
pub fn rational_from_json(v: &Value) -> Option<ExactRational> {
    let num: BigInt = v.get("num")?.as_str()?.parse().ok()?;
    let den: BigInt = v.get("den")?.as_str()?.parse().ok()?;
    if den == BigInt::from(0) {
        return None;
    }
    Some(ExactRational::new(num, den))
}

/// Always `num/den`, also for integers.
pub fn rational_csv(r: &ExactRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn float_json(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn write_json(out: &mut dyn Write, value: &Value) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

/// Left-aligned text columns separated by two spaces.
fn write_text_table(
    out: &mut dyn Write,
    headers: &[&str],
    rows: &[Vec<String>],
) -> std::io::Result<()> {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    writeln!(out, "{}", line(headers.to_vec()))?;
    for row in rows {
        writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}

fn write_verify(
    out: &mut dyn Write,
    format: OutputFormat,
    suite: Suite,
    settings: &Settings,
    checks: &[Check],
) -> Result<(), CliError> {
    let verdict = |c: &Check| if c.passed { "pass" } else { "FAIL" };
    match format {
        OutputFormat::Table => {
            let rows: Vec<Vec<String>> = checks
                .iter()
                .map(|c| {
                    vec![
                        verdict(c).to_string(),
                        c.suite.to_string(),
                        c.lemma.clone(),
                        c.parameters.clone(),
                        c.detail.clone(),
                    ]
                })
                .collect();
            write_text_table(
                out,
                &["result", "suite", "check", "parameters", "detail"],
                &rows,
            )?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            writeln!(out, "{} checks, {failed} failed", checks.len())?;
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["suite", "check", "parameters", "passed", "detail"])?;
            for c in checks {
                w.write_record([
                    c.suite,
                    &c.lemma,
                    &c.parameters,
                    &c.passed.to_string(),
                    &c.detail,
                ])?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            let value = json!({
                "command": "verify",
                "parameters": {
                    "suite": suite.name(),
                    "n_max": settings.n_max,
                    "trials": settings.trials,
                    "seed": settings.seed,
                    "cap_enum": settings.cap_enum,
                    "cap_exact": settings.cap_exact,
                    "cap_perm": settings.cap_perm,
                },
                "rows": checks,
            });
            write_json(out, &value)?;
        }
    }
    Ok(())
}

fn write_table(out: &mut dyn Write, c: &Common, n_max: usize) -> Result<(), CliError> {
    let exact = TExactTable::build_with_cap(n_max.min(c.cap_exact), c.cap_exact)?;
    let floats = t_float_table(n_max);
    let runs = |n: usize| (n <= c.cap_enum).then(|| run_count(n));
    match c.format {
        OutputFormat::Table => {
            let rows: Vec<Vec<String>> = (0..=n_max)
                .map(|n| {
                    vec![
                        n.to_string(),
                        exact.get(n).map(ToString::to_string).unwrap_or_default(),
                        format!("{:.6}", floats[n]),
                        format!("{:.6}", upper_bound(n)),
                        runs(n).map(|r| r.to_string()).unwrap_or_default(),
                    ]
                })
                .collect();
            write_text_table(out, &["n", "T(n)", "T(n) float", "2n ln n", "|Q_n|"], &rows)?;
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["n", "t_exact", "t_float", "bound", "runs"])?;
            for (n, float) in floats.iter().enumerate() {
                w.write_record([
                    n.to_string(),
                    exact.get(n).map(rational_csv).unwrap_or_default(),
                    float.to_string(),
                    upper_bound(n).to_string(),
                    runs(n).map(|r| r.to_string()).unwrap_or_default(),
                ])?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = (0..=n_max)
                .map(|n| {
                    json!({
                        "n": n,
                        "t_exact": exact.get(n).map(rational_json),
                        "t_float": float_json(floats[n]),
                        "bound": float_json(upper_bound(n)),
                        "runs": runs(n).and_then(|r| r.to_u64()),
                    })
                })
                .collect();
            write_json(
                out,
                &json!({
                    "command": "table",
                    "parameters": { "n_max": n_max, "cap_enum": c.cap_enum, "cap_exact": c.cap_exact },
                    "rows": rows,
                }),
            )?;
        }
    }
    Ok(())
}

fn write_enumeration(out: &mut dyn Write, c: &Common, n: usize) -> Result<(), CliError> {
    let space = enumerate_with_cap(n, c.cap_enum)?;
    match c.format {
        OutputFormat::Table => {
            let rows: Vec<Vec<String>> = space
                .iter()
                .map(|(run, w, t)| vec![run.to_string(), w.to_string(), t.to_string()])
                .collect();
            write_text_table(out, &["run", "q_n", "t_n"], &rows)?;
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["run", "weight", "comparisons"])?;
            for (run, weight, t) in space.iter() {
                w.write_record([run.notation("_"), rational_csv(weight), t.to_string()])?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = space
                .iter()
                .map(|(run, w, t)| {
                    json!({
                        "run": run.to_tree(),
                        "notation": run.notation("_"),
                        "weight": rational_json(w),
                        "comparisons": t,
                    })
                })
                .collect();
            write_json(
                out,
                &json!({
                    "command": "enumerate",
                    "parameters": { "n": n, "cap_enum": c.cap_enum },
                    "rows": rows,
                }),
            )?;
        }
    }
    Ok(())
}

fn write_monte_carlo(
    out: &mut dyn Write,
    c: &Common,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<(), CliError> {
    let report = simulator::monte_carlo(n, trials, seed)?;
    let reference = t_float_table(n)[n];
    let exact = (n <= c.cap_exact)
        .then(|| TExactTable::build_with_cap(n, c.cap_exact))
        .transpose()?
        .map(|t| t.values()[n].clone());
    let std_error = report.std_error();
    let z = verify::z_score(report.mean, reference, std_error);
    match c.format {
        OutputFormat::Table => {
            let mut rows = vec![
                vec!["n".to_string(), n.to_string()],
                vec!["trials".into(), report.trials.to_string()],
                vec!["seed".into(), report.seed.to_string()],
                vec!["mean".into(), format!("{:.6}", report.mean)],
                vec!["variance".into(), format!("{:.6}", report.variance)],
                vec!["min".into(), report.min.to_string()],
                vec!["max".into(), report.max.to_string()],
                vec!["T(n)".into(), format!("{reference:.6}")],
            ];
            if let Some(e) = &exact {
                rows.push(vec!["T(n) exact".into(), e.to_string()]);
            }
            rows.push(vec!["stderr".into(), format!("{std_error:.6}")]);
            rows.push(vec!["z".into(), format!("{z:.4}")]);
            write_text_table(out, &["field", "value"], &rows)?;
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record([
                "n", "trials", "seed", "mean", "variance", "min", "max", "t_float", "t_exact",
                "stderr", "z",
            ])?;
            w.write_record([
                n.to_string(),
                report.trials.to_string(),
                report.seed.to_string(),
                report.mean.to_string(),
                report.variance.to_string(),
                report.min.to_string(),
                report.max.to_string(),
                reference.to_string(),
                exact.as_ref().map(rational_csv).unwrap_or_default(),
                std_error.to_string(),
                z.to_string(),
            ])?;
            w.flush()?;
        }
        OutputFormat::Json => {
            write_json(
                out,
                &json!({
                    "command": "montecarlo",
                    "parameters": { "n": n, "trials": trials, "seed": seed },
                    "report": {
                        "n": report.n,
                        "trials": report.trials,
                        "seed": report.seed,
                        "mean": float_json(report.mean),
                        "variance": float_json(report.variance),
                        "min": report.min,
                        "max": report.max,
                        "t_float": float_json(reference),
                        "t_exact": exact.as_ref().map(rational_json),
                        "stderr": float_json(std_error),
                        "z": float_json(z),
                    },
                }),
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob_core::ratio;

    #[test]
    fn rational_encodings() {
        let r = ratio(-8, 6);
        assert_eq!(rational_csv(&r), "-4/3");
        assert_eq!(rational_csv(&ratio(2, 1)), "2/1");
        let v = rational_json(&r);
        assert_eq!(v, json!({"num": "-4", "den": "3"}));
        assert_eq!(rational_from_json(&v), Some(r));
        assert_eq!(rational_from_json(&json!({"num": "1", "den": "0"})), None);
    }

    #[test]
    fn text_table_alignment() {
        let mut buf = Vec::new();
        write_text_table(&mut buf, &["a", "bb"], &[vec!["⊥".into(), "x".into()]]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a  bb\n⊥  x\n");
    }
}
