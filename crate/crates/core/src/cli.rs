//! Command-line front end: `compute`, `verify` and `table`.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{self, Family};
use crate::kl::{self, KlError, KlTable, MatroidFamily, RecurrenceTable};
use crate::matroid::{self, characteristic_polynomial};
use crate::poly::IntPoly;
use crate::realroot::{self, all_zeros_negative, interleaves, is_real_rooted};
use crate::series::{self, GfKind};

/// Default worker count comes from this variable when `--jobs` is absent.
pub const JOBS_ENV: &str = "KLPOLY_JOBS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const SUPPORTED: &str = "\
supported combinations:
  kind            brute                               closed              recurrence
  kl              fan/square n<=8, wheel/whirl n<=7   all families        fan, wheel, whirl
  z               fan/square n<=8, wheel/whirl n<=7   all families        -
  chromatic       fan/square n<=8, wheel n<=7         fan, square, wheel  -
  characteristic  fan/square n<=8, wheel/whirl n<=7   all families        -";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unsupported: {0}\n{SUPPORTED}")]
    Unsupported(String),
    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error(transparent)]
    Kl(#[from] KlError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Unsupported(_) | CliError::Config { .. } | CliError::Kl(KlError::Index { .. }) => {
                EXIT_USAGE
            }
            _ => EXIT_FAILURE,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Fan,
    Square,
    Wheel,
    Whirl,
}

impl From<FamilyArg> for MatroidFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Fan => MatroidFamily::Fan,
            FamilyArg::Square => MatroidFamily::SquareOfPath,
            FamilyArg::Wheel => MatroidFamily::Wheel,
            FamilyArg::Whirl => MatroidFamily::Whirl,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Kl,
    Z,
    Chromatic,
    Characteristic,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Kl => "kl",
            Kind::Z => "z",
            Kind::Chromatic => "chromatic",
            Kind::Characteristic => "characteristic",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Brute,
    Closed,
    Recurrence,
}

impl From<MethodArg> for kl::Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Brute => kl::Method::Brute,
            MethodArg::Closed => kl::Method::Closed,
            MethodArg::Recurrence => kl::Method::Recurrence,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Oracle,
    Gf,
    Recurrence,
    Roots,
    Identities,
    All,
}

#[derive(Debug, Parser)]
#[command(name = "klpoly", version, about = "Exact Kazhdan-Lusztig and Z-polynomials of matroid families")]
pub struct Cli {
    /// Worker threads
    #[arg(long, global = true, env = JOBS_ENV)]
    pub jobs: Option<usize>,
    /// TOML file with defaults for `max_n` and `jobs`
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute one polynomial
    Compute {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "kl")]
        kind: Kind,
        #[arg(long, value_enum, default_value = "closed")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run verification suites; exits 1 if any check fails
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Upper index for every sweep in the selected suites
        #[arg(long)]
        max_n: Option<usize>,
        /// Truncation order for generating-function expansions
        #[arg(long)]
        order: Option<usize>,
    },
    /// Tabulate a family over a range of n
    Table {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, value_enum, default_value = "kl")]
        kind: Kind,
        #[arg(long, value_enum, default_value = "closed")]
        method: MethodArg,
        #[arg(long)]
        min_n: Option<usize>,
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Write to this file instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Optional defaults read from `--config`.
#[derive(Debug, Default, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub max_n: Option<usize>,
    pub jobs: Option<usize>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let err = |message: String| CliError::Config { path: path.to_owned(), message };
        let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        toml::from_str(&text).map_err(|e| err(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub real_rooted: bool,
    pub all_negative: bool,
    pub degree: usize,
    pub rank: usize,
}

/// One JSON Lines record; coefficients are ascending decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub family: String,
    pub n: usize,
    pub kind: Kind,
    pub method: String,
    pub coeffs: Vec<String>,
    pub flags: Flags,
}

impl OutputRecord {
    pub fn new(family: MatroidFamily, n: usize, kind: Kind, method: kl::Method, poly: &IntPoly) -> Self {
        let real_rooted = is_real_rooted(poly).unwrap_or(false);
        let all_negative = all_zeros_negative(poly).map(|c| c.holds).unwrap_or(false);
        OutputRecord {
            family: family.name().to_owned(),
            n,
            kind,
            method: method.to_string(),
            coeffs: poly.to_decimal_strings(),
            flags: Flags {
                real_rooted,
                all_negative,
                degree: poly.degree().finite().unwrap_or(0),
                rank: family.rank(n),
            },
        }
    }

    pub fn poly(&self) -> Option<IntPoly> {
        self.coeffs.iter().map(|c| c.parse().ok()).collect::<Option<Vec<_>>>().map(IntPoly::new)
    }
}

fn brute_limit(family: MatroidFamily) -> usize {
    match family {
        MatroidFamily::Fan | MatroidFamily::SquareOfPath => 8,
        MatroidFamily::Wheel | MatroidFamily::Whirl => 7,
    }
}

fn graph_family(family: MatroidFamily) -> Option<Family> {
    match family {
        MatroidFamily::Fan => Some(Family::Fan),
        MatroidFamily::SquareOfPath => Some(Family::SquareOfPath),
        MatroidFamily::Wheel => Some(Family::Wheel),
        MatroidFamily::Whirl => None,
    }
}

/// One polynomial for a family member.
pub fn compute(family: MatroidFamily, n: usize, kind: Kind, method: kl::Method) -> Result<IntPoly, CliError> {
    let unsupported = || CliError::Unsupported(format!("--family {family} --kind {kind} --method {method}"));
    if n < family.min_index() {
        return Err(KlError::Index { family, n, min: family.min_index() }.into());
    }
    if method == kl::Method::Brute && n > brute_limit(family) {
        return Err(CliError::Unsupported(format!(
            "brute force for {family} is limited to n <= {}",
            brute_limit(family)
        )));
    }
    let graph_of = |family| -> Result<graph::SimpleGraph, CliError> {
        let f = graph_family(family).ok_or_else(unsupported)?;
        Ok(graph::make_family(f, n).map_err(KlError::from)?)
    };
    Ok(match (kind, method) {
        (Kind::Kl, kl::Method::Brute) => kl::KlTable::new(&kl::family_matroid(family, n)?)?.kl().clone(),
        (Kind::Kl, kl::Method::Closed) => kl::kl_closed(family, n)?,
        (Kind::Kl, kl::Method::Recurrence) => {
            RecurrenceTable::for_family(family).map_err(|_| unsupported())?;
            kl::kl_recurrence(family, n)?
        }
        (Kind::Z, kl::Method::Brute) => kl::KlTable::new(&kl::family_matroid(family, n)?)?.z(),
        (Kind::Z, kl::Method::Closed) => kl::z_closed(family, n)?,
        (Kind::Chromatic, kl::Method::Brute) => graph::chromatic_polynomial(&graph_of(family)?),
        (Kind::Chromatic, kl::Method::Closed) => {
            let f = graph_family(family).ok_or_else(unsupported)?;
            graph::chromatic_closed(f, n).map_err(KlError::from)?
        }
        (Kind::Characteristic, kl::Method::Brute) => characteristic_polynomial(&kl::family_matroid(family, n)?),
        (Kind::Characteristic, kl::Method::Closed) => match graph_family(family) {
            // connected graphs: chi_G(t) = t chi_M(t)
            Some(f) => {
                let chi = graph::chromatic_closed(f, n).map_err(KlError::from)?;
                IntPoly::new(chi.coeffs()[1..].to_vec())
            }
            None => matroid::whirl_characteristic_closed(n),
        },
        _ => return Err(unsupported()),
    })
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs.filter(|&j| j > 0) {
        b = b.num_threads(j);
    }
    b.build().map_err(|e| CliError::Pool(e.to_string()))
}

fn write_records(out: &mut dyn Write, records: &[OutputRecord], format: Format) -> Result<(), CliError> {
    match format {
        Format::Json => {
            for r in records {
                serde_json::to_writer(&mut *out, r)?;
                writeln!(out)?;
            }
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
            w.write_record(["family", "n", "kind", "method", "degree", "real_rooted", "all_negative", "rank", "coeffs"])?;
            for r in records {
                w.write_record([
                    r.family.clone(),
                    r.n.to_string(),
                    r.kind.to_string(),
                    r.method.clone(),
                    r.flags.degree.to_string(),
                    r.flags.real_rooted.to_string(),
                    r.flags.all_negative.to_string(),
                    r.flags.rank.to_string(),
                    r.coeffs.join(" "),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Table rows in the column order `n, degree, c0..cD, real_rooted`, with
/// missing high coefficients written as 0.
fn write_table(out: &mut dyn Write, records: &[OutputRecord], format: Format) -> Result<(), CliError> {
    if format == Format::Json {
        return write_records(out, records, format);
    }
    let width = records.iter().map(|r| r.coeffs.len()).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["n".to_owned(), "degree".to_owned()];
    header.extend((0..width).map(|i| format!("c{i}")));
    header.push("real_rooted".to_owned());
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![r.n.to_string(), r.flags.degree.to_string()];
        row.extend((0..width).map(|i| r.coeffs.get(i).cloned().unwrap_or_else(|| "0".to_owned())));
        row.push(r.flags.real_rooted.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

type CheckFn = Box<dyn Fn() -> Result<bool, String> + Send + Sync>;

/// A named verification check.
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    run: CheckFn,
}

impl Check {
    fn new(suite: &'static str, name: String, run: impl Fn() -> Result<bool, String> + Send + Sync + 'static) -> Self {
        Check { suite, name, run: Box::new(run) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: Option<String>,
    pub millis: u128,
}

fn s<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

fn oracle_checks(max_n: Option<usize>, out: &mut Vec<Check>) {
    for family in MatroidFamily::ALL {
        let hi = max_n.map_or(brute_limit(family), |m| m.min(brute_limit(family)));
        for n in family.min_index()..=hi {
            out.push(Check::new("oracle", format!("{family} n={n}"), move || {
                let m = kl::family_matroid(family, n).map_err(s)?;
                let table = KlTable::new(&m).map_err(s)?;
                let p = table.kl();
                kl::verify_defining_identity(&m, p).map_err(s)?;
                let degree_ok = p.coeff(0) == 1.into() && 2 * p.degree().finite().unwrap_or(0) < n.max(1);
                let kl_ok = *p == kl::kl_closed(family, n).map_err(s)?;
                let z_ok = table.z() == kl::z_closed(family, n).map_err(s)?;
                Ok(degree_ok && kl_ok && z_ok)
            }));
        }
    }
}

fn recurrence_checks(max_n: Option<usize>, out: &mut Vec<Check>) {
    let hi = max_n.unwrap_or(40);
    for family in [MatroidFamily::Fan, MatroidFamily::Wheel, MatroidFamily::Whirl] {
        out.push(Check::new("recurrence", format!("{family} n<={hi}"), move || {
            let lo = family.min_index();
            let seq = kl::kl_recurrence_range(family, lo, hi).map_err(s)?;
            for (n, p) in (lo..=hi).zip(seq) {
                if p != kl::kl_closed(family, n).map_err(s)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }));
    }
}

fn gf_checks(order: Option<usize>, out: &mut Vec<Check>) {
    for which in GfKind::ALL {
        let order = order.unwrap_or(if which == GfKind::KlWheel { 10 } else { 12 });
        out.push(Check::new("gf", format!("{which} order={order}"), move || {
            let series = series::gf_expand(which, order).map_err(s)?;
            for n in 0..=order {
                if series.int_coeff(n).map_err(s)? != series::reference_coefficient(which, n).map_err(s)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }));
    }
}

fn root_checks(max_n: Option<usize>, out: &mut Vec<Check>) {
    let hi = max_n.unwrap_or(30);
    for family in MatroidFamily::ALL {
        out.push(Check::new("roots", format!("{family} n<={hi}"), move || {
            for n in family.min_index()..=hi {
                let p = kl::kl_closed(family, n).map_err(s)?;
                let z = kl::z_closed(family, n).map_err(s)?;
                let z_ok = if family == MatroidFamily::Wheel {
                    is_real_rooted(&z).map_err(s)?
                } else {
                    all_zeros_negative(&z).map_err(s)?.holds
                };
                if !all_zeros_negative(&p).map_err(s)?.holds || !z_ok {
                    return Ok(false);
                }
            }
            Ok(true)
        }));
    }
    let top = hi.min(25);
    out.push(Check::new("roots", format!("fan interlacing n=3..{top}"), move || {
        for n in 3..=top {
            let a = kl::kl_closed(MatroidFamily::Fan, n).map_err(s)?;
            let b = kl::kl_closed(MatroidFamily::Fan, n + 1).map_err(s)?;
            if !interleaves(&a, &b).map_err(s)? {
                return Ok(false);
            }
        }
        Ok(true)
    }));
}

fn identity_checks(max_n: Option<usize>, out: &mut Vec<Check>) {
    let bound = |default: usize| max_n.unwrap_or(default);
    let nar = bound(20);
    out.push(Check::new("identities", format!("narayana n<={nar}"), move || {
        for n in 1..=nar {
            if !realroot::verify_narayana_identity(n).map_err(s)? {
                return Ok(false);
            }
        }
        Ok(true)
    }));
    let had = bound(30);
    out.push(Check::new("identities", format!("hadamard n<={had}"), move || {
        for n in 3..=had {
            let p = kl::kl_closed(MatroidFamily::Wheel, n).map_err(s)?;
            for k in 0..=(n - 1) / 2 {
                let (a, b, c) = kl::hadamard_wheel_coeff(n, k);
                if num_rational::BigRational::from_integer(a) * b * c
                    != num_rational::BigRational::from_integer(p.coeff(k))
                {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }));
    let quad = bound(30);
    out.push(Check::new("identities", format!("wheel z quadratic n<={quad}"), move || {
        for n in 3..=quad {
            if !realroot::verify_wheel_z_quadratic(n).map_err(s)? {
                return Ok(false);
            }
        }
        Ok(true)
    }));
    let luc = bound(40);
    out.push(Check::new("identities", format!("lucas/fibonacci n<={luc}"), move || {
        for n in 3..=luc {
            if !realroot::verify_lucas_fibonacci(n).map_err(s)? {
                return Ok(false);
            }
        }
        Ok(true)
    }));
    let seq = bound(30);
    out.push(Check::new("identities", format!("n-sequence n=7..{seq}"), move || {
        for n in 7..=seq {
            if !realroot::wheel_a_is_n_sequence(n).map_err(s)? {
                return Ok(false);
            }
        }
        Ok(true)
    }));
}

/// Checks for a suite, in report order.
pub fn suite_checks(suite: Suite, max_n: Option<usize>, order: Option<usize>) -> Vec<Check> {
    let mut out = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Oracle {
        oracle_checks(max_n, &mut out);
    }
    if all || suite == Suite::Recurrence {
        recurrence_checks(max_n, &mut out);
    }
    if all || suite == Suite::Gf {
        gf_checks(order, &mut out);
    }
    if all || suite == Suite::Roots {
        root_checks(max_n, &mut out);
    }
    if all || suite == Suite::Identities {
        identity_checks(max_n, &mut out);
    }
    out
}

/// Run checks on the pool; outcomes come back in input order.
pub fn run_checks(checks: &[Check], pool: &rayon::ThreadPool) -> Vec<CheckOutcome> {
    pool.install(|| {
        checks
            .par_iter()
            .map(|c| {
                let start = Instant::now();
                let result = (c.run)();
                let millis = start.elapsed().as_millis();
                let (passed, detail) = match result {
                    Ok(p) => (p, None),
                    Err(e) => (false, Some(e)),
                };
                CheckOutcome { suite: c.suite, name: c.name.clone(), passed, detail, millis }
            })
            .collect()
    })
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let jobs = cli.jobs.or(config.jobs);
    match cli.command {
        Command::Compute { family, n, kind, method, format } => {
            let family = family.into();
            let method = method.into();
            let poly = compute(family, n, kind, method)?;
            write_records(out, &[OutputRecord::new(family, n, kind, method, &poly)], format)?;
            Ok(EXIT_OK)
        }
        Command::Table { family, kind, method, min_n, max_n, format, output } => {
            let family: MatroidFamily = family.into();
            let method: kl::Method = method.into();
            let lo = min_n.unwrap_or(family.min_index());
            let hi = max_n.or(config.max_n).unwrap_or(10);
            let pool = pool(jobs)?;
            let records = pool.install(|| {
                (lo..=hi)
                    .into_par_iter()
                    .map(|n| compute(family, n, kind, method).map(|p| OutputRecord::new(family, n, kind, method, &p)))
                    .collect::<Result<Vec<_>, _>>()
            })?;
            match output {
                Some(path) => {
                    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
                    write_table(&mut file, &records, format)?;
                    file.flush()?;
                }
                None => write_table(out, &records, format)?,
            }
            Ok(EXIT_OK)
        }
        Command::Verify { suite, max_n, order } => {
            let checks = suite_checks(suite, max_n.or(config.max_n), order);
            let pool = pool(jobs)?;
            let start = Instant::now();
            let outcomes = run_checks(&checks, &pool);
            let mut failed = 0;
            for o in &outcomes {
                let status = if o.passed { "PASS" } else { "FAIL" };
                failed += usize::from(!o.passed);
                write!(out, "{status} {:<10} {} ({} ms)", o.suite, o.name, o.millis)?;
                if let Some(d) = &o.detail {
                    write!(out, ": {d}")?;
                }
                writeln!(out)?;
            }
            writeln!(
                out,
                "{} checks, {} failed, {:.2} s",
                outcomes.len(),
                failed,
                start.elapsed().as_secs_f64()
            )?;
            Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
        }
    }
}
