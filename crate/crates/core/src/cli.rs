//! Command-line front end: `eval`, `compare`, `tables`, `convergence`.
//!
//! Everything except process setup lives here so it can be driven from
//! tests with in-memory streams; the binary only forwards to [`run`].

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::alt_series::{eval_canonical, eval_gideon_gurland, limit_a_zero};
use crate::args::{EvalReport, MarcumArgs, Method, TruncationPolicy};
use crate::error::{Error, Result};
use crate::laguerre_series::{
    eval_laguerre_series, eval_laguerre_series_unguarded, laguerre_partial_sums, truncation_bound,
    LaguerreCache,
};
use crate::oracle::{quadrature_q, MIN_TOL};
use crate::reference::{table_entries, TABLE_TOLERANCE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_BAD_ARGS: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;
pub const EXIT_ILL_CONDITIONED: i32 = 4;
pub const EXIT_SPREAD: i32 = 5;
pub const EXIT_TABLE_MISMATCH: i32 = 6;

/// Tolerance used by `tables`.
pub const TABLES_TOL: f64 = 1e-13;
/// Series evaluators run to `tol` times this factor, so that the printed
/// 15 significant digits are settled and not only correct to `tol`.
pub const SERIES_TARGET_FACTOR: f64 = 1e-4;
/// Quadrature tolerance for the reference column of `convergence`.
pub const CONVERGENCE_REFERENCE_TOL: f64 = 1e-13;

#[derive(Debug, Parser)]
#[command(name = "marcumq", version, about = "Generalized Marcum Q-function Q_nu(a, b)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate Q_nu(a, b) with one method.
    Eval(EvalCmd),
    /// Evaluate with all four methods and report their spread.
    Compare(CompareCmd),
    /// Reproduce the reference tables and check them.
    Tables(TablesCmd),
    /// Partial sums against the quadrature reference and the truncation bound.
    Convergence(ConvergenceCmd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Point {
    #[arg(long, allow_negative_numbers = true)]
    pub nu: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
}

#[derive(Debug, Args)]
pub struct EvalCmd {
    #[arg(long, allow_negative_numbers = true, required_unless_present = "batch")]
    pub nu: Option<f64>,
    #[arg(long, allow_negative_numbers = true, required_unless_present = "batch")]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true, required_unless_present = "batch")]
    pub b: Option<f64>,
    #[arg(long, default_value = "laguerre")]
    pub method: Method,
    #[arg(long, default_value = "1e-12", allow_negative_numbers = true)]
    pub tol: f64,
    #[arg(long, env = "MARCUMQ_MAX_TERMS", default_value_t = TruncationPolicy::DEFAULT_MAX_TERMS)]
    pub max_terms: usize,
    /// Evaluate even where the Laguerre series is flagged ill-conditioned.
    #[arg(long)]
    pub force: bool,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
    /// Read `nu,a,b` records from standard input, one per line.
    #[arg(long, conflicts_with_all = ["nu", "a", "b"])]
    pub batch: bool,
}

#[derive(Debug, Args)]
pub struct CompareCmd {
    #[command(flatten)]
    pub point: Point,
    #[arg(long, default_value = "1e-12", allow_negative_numbers = true)]
    pub tol: f64,
    #[arg(long, env = "MARCUMQ_MAX_TERMS", default_value_t = TruncationPolicy::DEFAULT_MAX_TERMS)]
    pub max_terms: usize,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TablesCmd {
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ConvergenceCmd {
    #[command(flatten)]
    pub point: Point,
    #[arg(long, default_value_t = 30)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
}

/// One evaluation as emitted by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub nu: f64,
    pub a: f64,
    pub b: f64,
    pub method: Method,
    pub value: f64,
    pub terms_used: usize,
    pub error_bound: f64,
    pub elapsed_ns: u64,
}

impl OutputRecord {
    pub fn new(args: &MarcumArgs, report: &EvalReport, elapsed_ns: u64) -> Self {
        Self {
            nu: args.nu(),
            a: args.a(),
            b: args.b(),
            method: report.method,
            value: report.value,
            terms_used: report.terms_used,
            error_bound: report.error_bound,
            elapsed_ns,
        }
    }
}

/// One row of the `convergence` report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n0: usize,
    pub value: f64,
    pub actual_err: f64,
    pub bound: f64,
    pub ratio: Option<f64>,
}

/// Process exit status for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Domain(_) => EXIT_BAD_ARGS,
        Error::NonConvergence { .. } | Error::ToleranceNotMet { .. } | Error::Infeasible { .. } => {
            EXIT_NON_CONVERGENCE
        }
        Error::IllConditioned(_) => EXIT_ILL_CONDITIONED,
        Error::Overflow(_) | Error::Consistency(_) => EXIT_FAILURE,
    }
}

/// Formats with 15 significant digits, fixed-point where that stays readable.
pub fn format_value(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.14e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp) as usize;
        format!("{v:.decimals$}")
    } else {
        sci
    }
}

/// Evaluates with the chosen method. `a = 0` goes to the limit form for
/// every method. The series run to `tol * SERIES_TARGET_FACTOR`.
pub fn evaluate(
    method: Method,
    args: &MarcumArgs,
    tol: f64,
    max_terms: usize,
    force: bool,
    cache: Option<&LaguerreCache>,
) -> Result<EvalReport> {
    if args.a() == 0.0 {
        let value = limit_a_zero(args.nu(), args.b())?;
        return Ok(EvalReport { value, terms_used: 1, error_bound: f64::EPSILON, method });
    }
    let policy = TruncationPolicy::new(tol * SERIES_TARGET_FACTOR, max_terms)?;
    match method {
        Method::Laguerre if force => eval_laguerre_series_unguarded(args, &policy, cache),
        Method::Laguerre => eval_laguerre_series(args, &policy, cache),
        Method::Canonical => eval_canonical(args, &policy),
        Method::GideonGurland => eval_gideon_gurland(args, &policy),
        Method::Quadrature => quadrature_q(args, tol.max(MIN_TOL)),
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_nanos().min(u64::MAX as u128) as u64)
}

/// Parses `argv`, runs the command, returns the exit status.
pub fn run<I, T>(argv: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Eval(cmd) => cmd_eval(&cmd, input, out, err),
        Command::Compare(cmd) => cmd_compare(&cmd, out, err),
        Command::Tables(cmd) => cmd_tables(&cmd, out, err),
        Command::Convergence(cmd) => cmd_convergence(&cmd, out),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}

#[derive(Debug)]
enum CliError {
    Lib(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult = std::result::Result<i32, CliError>;

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("tolerance must satisfy tol > 0, got {tol}")))
    }
}

/// Writes records in the requested format.
struct RecordWriter<'a> {
    format: Format,
    out: &'a mut dyn Write,
    header_done: bool,
}

impl<'a> RecordWriter<'a> {
    fn new(format: Format, out: &'a mut dyn Write) -> Self {
        Self { format, out, header_done: false }
    }

    fn write<R: Serialize>(
        &mut self,
        record: &R,
        plain: &str,
    ) -> std::result::Result<(), CliError> {
        match self.format {
            Format::Plain => writeln!(self.out, "{plain}")?,
            Format::Json => writeln!(self.out, "{}", serde_json::to_string(record)?)?,
            Format::Csv => {
                let mut w =
                    csv::WriterBuilder::new().has_headers(!self.header_done).from_writer(vec![]);
                w.serialize(record)?;
                let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
                self.out.write_all(&bytes)?;
                self.header_done = true;
            }
        }
        Ok(())
    }
}

fn cmd_eval(
    cmd: &EvalCmd,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult {
    check_tol(cmd.tol)?;
    if !cmd.batch {
        let (nu, a, b) =
            (cmd.nu.unwrap_or(f64::NAN), cmd.a.unwrap_or(f64::NAN), cmd.b.unwrap_or(f64::NAN));
        let args = MarcumArgs::new(nu, a, b)?;
        let (report, ns) =
            timed(|| evaluate(cmd.method, &args, cmd.tol, cmd.max_terms, cmd.force, None));
        let record = OutputRecord::new(&args, &report?, ns);
        RecordWriter::new(cmd.format, out).write(&record, &format_value(record.value))?;
        return Ok(EXIT_OK);
    }

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut writer = RecordWriter::new(cmd.format, out);
    let mut caches: HashMap<(u64, u64), LaguerreCache> = HashMap::new();
    let mut status = EXIT_OK;
    for (line, row) in reader.records().enumerate() {
        let row = row?;
        let fields: Vec<&str> = row.iter().collect();
        if line == 0 && fields.first().is_some_and(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        let outcome = parse_triple(&fields).and_then(|args| {
            let cache = if cmd.method == Method::Laguerre && args.a() > 0.0 {
                let key = (args.nu().to_bits(), args.a().to_bits());
                if let Entry::Vacant(slot) = caches.entry(key) {
                    let mut c = LaguerreCache::new(args.nu(), args.a())?;
                    c.extend_to(cmd.max_terms);
                    slot.insert(c);
                }
                caches.get(&key)
            } else {
                None
            };
            let (report, ns) =
                timed(|| evaluate(cmd.method, &args, cmd.tol, cmd.max_terms, cmd.force, cache));
            report.map(|r| OutputRecord::new(&args, &r, ns))
        });
        match outcome {
            Ok(record) => writer.write(&record, &format_value(record.value))?,
            Err(e) => {
                writeln!(err, "record {}: {e}", line + 1)?;
                if cmd.format == Format::Plain {
                    writeln!(writer.out, "nan")?;
                }
                if status == EXIT_OK {
                    status = exit_code(&e);
                }
            }
        }
    }
    Ok(status)
}

fn parse_triple(fields: &[&str]) -> Result<MarcumArgs> {
    if fields.len() != 3 {
        return Err(Error::Domain(format!("expected 3 fields nu,a,b, got {}", fields.len())));
    }
    let parse =
        |s: &str| s.parse::<f64>().map_err(|_| Error::Domain(format!("not a number: {s:?}")));
    MarcumArgs::new(parse(fields[0])?, parse(fields[1])?, parse(fields[2])?)
}

fn cmd_compare(cmd: &CompareCmd, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    check_tol(cmd.tol)?;
    let p = &cmd.point;
    let args = MarcumArgs::new(p.nu, p.a, p.b)?;
    let mut writer = RecordWriter::new(cmd.format, out);
    let mut values = Vec::new();
    for method in Method::ALL {
        let (report, ns) = timed(|| evaluate(method, &args, cmd.tol, cmd.max_terms, true, None));
        match report {
            Ok(r) => {
                let record = OutputRecord::new(&args, &r, ns);
                let plain = format!(
                    "{:<15} {} terms={:<4} error_bound={:.3e}",
                    method.as_str(),
                    format_value(r.value),
                    r.terms_used,
                    r.error_bound
                );
                writer.write(&record, &plain)?;
                values.push(r.value);
            }
            Err(e) => writeln!(err, "{:<15} failed: {e}", method.as_str())?,
        }
    }
    let spread = max_spread(&values);
    let line = format!("spread {spread:.3e}");
    match cmd.format {
        Format::Plain => writeln!(writer.out, "{line}")?,
        _ => writeln!(err, "{line}")?,
    }
    Ok(if spread > 100.0 * cmd.tol { EXIT_SPREAD } else { EXIT_OK })
}

/// Largest absolute difference between any two values.
pub fn max_spread(values: &[f64]) -> f64 {
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    if values.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

fn cmd_tables(cmd: &TablesCmd, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let policy = TruncationPolicy::new(
        TABLES_TOL * SERIES_TARGET_FACTOR,
        TruncationPolicy::DEFAULT_MAX_TERMS,
    )?;
    let mut writer = RecordWriter::new(cmd.format, out);
    let mut mismatches = 0;
    let mut last_row = None;
    for (nu, a, b, expected) in table_entries() {
        let args = MarcumArgs::new(nu, a, b)?;
        let (report, ns) = timed(|| eval_laguerre_series(&args, &policy, None));
        let report = report?;
        let dev = (report.value - expected).abs();
        if dev > TABLE_TOLERANCE {
            mismatches += 1;
            writeln!(
                err,
                "mismatch at nu={nu} a={a} b={b}: {} vs {expected}, |diff| = {dev:e}",
                report.value
            )?;
        }
        if cmd.format == Format::Plain && last_row != Some((a, b)) {
            writeln!(writer.out, "a = {a}, b = {b}")?;
            last_row = Some((a, b));
        }
        let plain = format!("  nu = {nu:<4} {}", format_value(report.value));
        writer.write(&OutputRecord::new(&args, &report, ns), &plain)?;
    }
    Ok(if mismatches > 0 { EXIT_TABLE_MISMATCH } else { EXIT_OK })
}

/// Rows `n0 = 1..=n_max` of the convergence report.
pub fn convergence_rows(args: &MarcumArgs, n_max: usize) -> Result<Vec<ConvergenceRow>> {
    if n_max < 2 {
        return Err(Error::Domain(format!("n_max must satisfy n_max >= 2, got {n_max}")));
    }
    let reference = quadrature_q(args, CONVERGENCE_REFERENCE_TOL)?.value;
    let partial = laguerre_partial_sums(args, n_max)?;
    Ok((1..=n_max)
        .map(|n0| {
            let value = partial[n0];
            let actual_err = (value - reference).abs();
            let bound = truncation_bound(args, n0);
            let ratio = (actual_err > 0.0).then(|| bound / actual_err);
            ConvergenceRow { n0, value, actual_err, bound, ratio }
        })
        .collect())
}

fn cmd_convergence(cmd: &ConvergenceCmd, out: &mut dyn Write) -> CliResult {
    let p = &cmd.point;
    let args = MarcumArgs::new(p.nu, p.a, p.b)?;
    let rows = convergence_rows(&args, cmd.n_max)?;
    let mut writer = RecordWriter::new(cmd.format, out);
    if cmd.format == Format::Plain {
        writeln!(
            writer.out,
            "{:>4} {:>18} {:>10} {:>10} {:>10}",
            "n0", "value", "actual_err", "bound", "ratio"
        )?;
    }
    for row in &rows {
        let ratio = row.ratio.map_or_else(|| "-".to_string(), |r| format!("{r:.3e}"));
        let plain = format!(
            "{:>4} {:>18} {:>10.3e} {:>10.3e} {:>10}",
            row.n0,
            format_value(row.value),
            row.actual_err,
            row.bound,
            ratio
        );
        writer.write(row, &plain)?;
    }
    Ok(EXIT_OK)
}
