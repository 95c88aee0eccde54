//! Command-line workbench for locally repairable storage codes: analyze
//! code files, compute exact size bounds and bound sweeps, decide
//! update-efficiency feasibility, and export the built-in catalog.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 for an
//! `update-feasible` run whose verdict is Infeasible (a result, not an
//! error, but scripts need to branch on it). Every failure writes a
//! single-line JSON object `{"error": ..., "kind": ...}` to stderr.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lrc_core::catalog;
use lrc_core::code_model::{min_distance, parse_code_file, format_code_file, LinearCode, ParsedCode};
use lrc_core::locality_analysis::{classical_bounds, classify};
use lrc_core::lp_bounds::{
    rlrc_bound, update_feasible, RlrcParams, UpdateParams, UpdateVerdict, FEASIBILITY_DISCLAIMER,
};
use lrc_core::Limits;

#[derive(Parser)]
#[command(
    name = "lrc",
    version,
    about = "Exact analysis and size bounds for locally repairable storage codes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a code file (or `catalog:<name>`): distance, erasure
    /// resilience, repair robustness profile, classical bounds.
    Analyze {
        /// Path to a code file, or `catalog:<name>` for a built-in code.
        code: String,
        /// Locality to analyze at (maximum helpers per repair).
        #[arg(long)]
        r: usize,
        /// Largest extra-unavailability level in the profile.
        #[arg(long, default_value_t = 0)]
        gamma_max: usize,
        /// Compare the code against the LP size bound at its own
        /// parameters.
        #[arg(long)]
        check_bound: bool,
    },
    /// Compute exact LP size bounds over a parameter grid and emit a
    /// table.
    Bound {
        /// Code length (number of storage nodes).
        #[arg(long)]
        n: usize,
        /// Field size (prime).
        #[arg(long)]
        q: u64,
        /// Erasure-recovery level.
        #[arg(long)]
        beta: usize,
        /// Locality: a single value `3` or an inclusive range `1..15`.
        #[arg(long)]
        r: String,
        /// Comma-separated unavailability levels.
        #[arg(long, default_value = "0")]
        gamma: String,
        /// Comma-separated repair-alternative requirements.
        #[arg(long, default_value = "1")]
        zeta: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        /// Write the table to a file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide update-efficiency feasibility for a parameter tuple.
    UpdateFeasible {
        /// Stored symbols.
        #[arg(long)]
        n: usize,
        /// Source symbols.
        #[arg(long)]
        k: usize,
        /// Field size (prime).
        #[arg(long)]
        q: u64,
        /// Locality.
        #[arg(long)]
        r: usize,
        /// Erasure-recovery level.
        #[arg(long)]
        beta: usize,
        /// Update cost ceiling.
        #[arg(long)]
        delta: usize,
        /// Robust repair: extra unavailable nodes (requires --zeta).
        #[arg(long, requires = "zeta")]
        gamma: Option<usize>,
        /// Robust repair: required alternatives (requires --gamma).
        #[arg(long, requires = "gamma")]
        zeta: Option<u64>,
        /// Where to write the witness JSON on a Feasible verdict.
        #[arg(long)]
        witness_out: Option<PathBuf>,
    },
    /// List, inspect, or export the built-in codes.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// One line per entry: name, parameters, verified claims.
    List,
    /// Construction and claims of one entry.
    Show { name: String },
    /// Write an entry in the code file format.
    Export { name: String, path: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

struct CliError {
    kind: &'static str,
    message: String,
    exit: u8,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { kind: "usage", message: message.into(), exit: 2 }
    }
}

impl From<lrc_core::Error> for CliError {
    fn from(e: lrc_core::Error) -> Self {
        use lrc_core::Error::*;
        let kind = match &e {
            InvalidParameter(_) => "invalid_parameter",
            NotPrime(_) => "not_prime",
            EnumerationLimit { .. } => "enumeration_limit",
            ZeroCode => "zero_code",
            Parse { .. } => "parse",
            UnknownCatalog(_) => "unknown_catalog",
            DimensionMismatch(_) => "dimension_mismatch",
            Lp(_) => "lp",
        };
        CliError { kind, message: e.to_string(), exit: 1 }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError { kind: "io", message: e.to_string(), exit: 1 }
    }
}

fn report_error(e: &CliError) {
    let obj = serde_json::json!({ "error": e.message, "kind": e.kind });
    eprintln!("{obj}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            report_error(&CliError::usage(e.to_string()));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            report_error(&e);
            ExitCode::from(e.exit)
        }
    }
}

fn limits_from_env() -> Result<Limits, CliError> {
    match std::env::var("LRC_ENUM_GUARD") {
        Ok(raw) => raw
            .trim()
            .parse::<u64>()
            .map(Limits::with_enumeration)
            .map_err(|_| CliError::usage(format!("LRC_ENUM_GUARD must be an integer, got '{raw}'"))),
        Err(_) => Ok(Limits::default()),
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let limits = limits_from_env()?;
    match cli.command {
        Command::Analyze { code, r, gamma_max, check_bound } => {
            cmd_analyze(&code, r, gamma_max, check_bound, &limits)
        }
        Command::Bound { n, q, beta, r, gamma, zeta, format, out } => {
            cmd_bound(n, q, beta, &r, &gamma, &zeta, format, out.as_deref())
        }
        Command::UpdateFeasible { n, k, q, r, beta, delta, gamma, zeta, witness_out } => {
            let robust = gamma.zip(zeta);
            cmd_update_feasible(n, k, q, r, beta, delta, robust, witness_out)
        }
        Command::Catalog { action } => cmd_catalog(action, &limits),
    }
}

// ---------------------------------------------------------------- analyze

#[derive(Serialize)]
struct ProfileRow {
    gamma: usize,
    zeta_max: u64,
}

#[derive(Serialize)]
struct BoundCheckRow {
    gamma: usize,
    zeta: u64,
    /// Exact LP optimum as an integer or `p/q` string.
    lp_optimum: String,
    dim_bound: u32,
    /// Whether the analyzed code meets the bound with equality.
    optimal: bool,
}

#[derive(Serialize)]
struct AnalysisReport {
    n: usize,
    k: usize,
    q: u64,
    /// Content fingerprint of the canonical generator matrix.
    source: String,
    /// Locality the profile was computed at.
    r: usize,
    min_distance: usize,
    beta_max: usize,
    profile: Vec<ProfileRow>,
    gopalan_ok: bool,
    singleton_ok: bool,
    notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound_check: Option<Vec<BoundCheckRow>>,
}

/// FNV-1a fingerprint of the canonical generator, stable across export
/// and re-parse.
fn fingerprint(c: &LinearCode) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |value: u64| {
        for byte in value.to_le_bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(c.q());
    eat(c.n() as u64);
    eat(c.k() as u64);
    for row in 0..c.k() {
        for col in 0..c.n() {
            eat(c.generator().get(row, col));
        }
    }
    format!("code:{hash:016x}")
}

/// Declared `kind` and `rows` headers of an already-parsed code file,
/// used to report rank-deficient inputs.
fn declared_headers(text: &str) -> (Option<String>, Option<usize>) {
    let mut kind = None;
    let mut rows = None;
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if let Some(rest) = line.strip_prefix("kind ") {
            kind = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("rows ") {
            rows = rest.trim().parse().ok();
        }
    }
    (kind, rows)
}

fn load_code(spec: &str, notes: &mut Vec<String>) -> Result<LinearCode, CliError> {
    if let Some(name) = spec.strip_prefix("catalog:") {
        return Ok(catalog::find(name)?.code);
    }
    let text = fs::read_to_string(spec)?;
    match parse_code_file(&text)? {
        ParsedCode::Storage(c) => {
            let (kind, rows) = declared_headers(&text);
            match (kind.as_deref(), rows) {
                (Some("generator"), Some(rows)) if rows > c.k() => notes.push(format!(
                    "generator file declared {rows} rows but has rank {}; dimension reduced to K={}",
                    c.k(),
                    c.k()
                )),
                (Some("parity_check"), Some(rows)) if c.n() - c.k() < rows => notes.push(format!(
                    "parity-check file declared {rows} rows but has rank {}; dimension raised to K={}",
                    c.n() - c.k(),
                    c.k()
                )),
                _ => {}
            }
            Ok(c)
        }
        ParsedCode::Update(u) => {
            notes.push(format!(
                "pseudo-systematic update code file: analyzing its stored code over {} nodes",
                u.n()
            ));
            Ok(u.stored_code())
        }
    }
}

fn cmd_analyze(
    spec: &str,
    r: usize,
    gamma_max: usize,
    check_bound: bool,
    limits: &Limits,
) -> Result<ExitCode, CliError> {
    let mut notes = Vec::new();
    let code = load_code(spec, &mut notes)?;
    let classification = classify(&code, r, gamma_max, limits)?;
    let beta_max = classification.beta_max;
    let d = beta_max + 1;

    let classical_r = r.min(code.k());
    if classical_r < r {
        notes.push(format!(
            "locality {r} exceeds the dimension; classical bounds evaluated at r={classical_r}"
        ));
    }
    let classical = classical_bounds(code.n(), code.k(), d, classical_r)?;

    let bound_check = if check_bound {
        let mut rows = Vec::new();
        for &(gamma, zeta_max) in &classification.profile.rows {
            if zeta_max == 0 {
                continue;
            }
            let params = RlrcParams::new(code.n(), code.q(), r, beta_max, gamma, zeta_max)?;
            let row = rlrc_bound(&params)?;
            rows.push(BoundCheckRow {
                gamma,
                zeta: zeta_max,
                lp_optimum: row.lp_optimum.to_string(),
                dim_bound: row.dim_bound,
                optimal: row.dim_bound as usize == code.k(),
            });
        }
        Some(rows)
    } else {
        None
    };

    let report = AnalysisReport {
        n: code.n(),
        k: code.k(),
        q: code.q(),
        source: fingerprint(&code),
        r,
        min_distance: d,
        beta_max,
        profile: classification
            .profile
            .rows
            .iter()
            .map(|&(gamma, zeta_max)| ProfileRow { gamma, zeta_max })
            .collect(),
        gopalan_ok: classical.gopalan_ok,
        singleton_ok: classical.singleton_ok,
        notes,
        bound_check,
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(ExitCode::SUCCESS)
}

// ------------------------------------------------------------------ bound

#[derive(Serialize)]
struct SweepRowJson {
    n: usize,
    q: u64,
    beta: usize,
    r: usize,
    gamma: usize,
    zeta: u64,
    lp_optimum: String,
    dim_bound: u32,
    zero_code_only: bool,
}

/// Parse `3` or an inclusive `1..15`.
fn parse_r_range(raw: &str) -> Result<std::ops::RangeInclusive<usize>, CliError> {
    let bad = || CliError::usage(format!("--r expects `3` or an inclusive range `1..15`, got '{raw}'"));
    if let Some((lo, hi)) = raw.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        Ok(lo..=hi)
    } else {
        let r: usize = raw.trim().parse().map_err(|_| bad())?;
        Ok(r..=r)
    }
}

/// Parse a comma-separated list, sorted with duplicates removed.
fn parse_list<T: std::str::FromStr + Ord + Copy>(raw: &str, flag: &str) -> Result<Vec<T>, CliError> {
    let mut values = Vec::new();
    for part in raw.split(',') {
        values.push(part.trim().parse::<T>().map_err(|_| {
            CliError::usage(format!("{flag} expects comma-separated integers, got '{raw}'"))
        })?);
    }
    values.sort_unstable();
    values.dedup();
    Ok(values)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bound(
    n: usize,
    q: u64,
    beta: usize,
    r_raw: &str,
    gamma_raw: &str,
    zeta_raw: &str,
    format: OutputFormat,
    out: Option<&std::path::Path>,
) -> Result<ExitCode, CliError> {
    let r_range = parse_r_range(r_raw)?;
    let gammas: Vec<usize> = parse_list(gamma_raw, "--gamma")?;
    let zetas: Vec<u64> = parse_list(zeta_raw, "--zeta")?;
    // Reject bad parameters up front so the table never loses rows.
    for r in r_range.clone() {
        for &gamma in &gammas {
            for &zeta in &zetas {
                RlrcParams::new(n, q, r, beta, gamma, zeta)?;
            }
        }
    }

    let rows = lrc_core::lp_bounds::bound_sweep(n, q, beta, r_range, &gammas, &zetas);
    let mut solved = Vec::with_capacity(rows.len());
    for (params, row) in rows {
        solved.push((params, row?));
    }

    let bytes = match format {
        OutputFormat::Csv => {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            wtr.write_record(["N", "q", "beta", "r", "gamma", "zeta", "lp_optimum", "dim_bound"])
                .map_err(io_from_csv)?;
            for (p, row) in &solved {
                wtr.write_record([
                    p.n.to_string(),
                    p.q.to_string(),
                    p.beta.to_string(),
                    p.r.to_string(),
                    p.gamma.to_string(),
                    p.zeta.to_string(),
                    row.lp_optimum.to_string(),
                    row.dim_bound.to_string(),
                ])
                .map_err(io_from_csv)?;
            }
            wtr.into_inner().map_err(|e| CliError {
                kind: "io",
                message: e.to_string(),
                exit: 1,
            })?
        }
        OutputFormat::Json => {
            let rows: Vec<SweepRowJson> = solved
                .iter()
                .map(|(p, row)| SweepRowJson {
                    n: p.n,
                    q: p.q,
                    beta: p.beta,
                    r: p.r,
                    gamma: p.gamma,
                    zeta: p.zeta,
                    lp_optimum: row.lp_optimum.to_string(),
                    dim_bound: row.dim_bound,
                    zero_code_only: row.zero_code_only,
                })
                .collect();
            let mut text = serde_json::to_string_pretty(&rows).expect("rows serialize");
            text.push('\n');
            text.into_bytes()
        }
    };

    match out {
        Some(path) => {
            fs::write(path, bytes)?;
            println!("wrote: {}", path.display());
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn io_from_csv(e: csv::Error) -> CliError {
    CliError { kind: "io", message: e.to_string(), exit: 1 }
}

// -------------------------------------------------------- update-feasible

#[derive(Serialize)]
struct WitnessParams {
    n: usize,
    k: usize,
    q: u64,
    r: usize,
    beta: usize,
    delta: usize,
    gamma: usize,
    zeta: u64,
}

#[derive(Serialize)]
struct WitnessFile {
    params: WitnessParams,
    feasible: bool,
    /// Always false: see `note`.
    existence_guaranteed: bool,
    note: &'static str,
    /// Satisfying code-side profile `a[t1][t2]`, exact rational strings.
    a: Vec<Vec<String>>,
    /// Satisfying dual-side profile `c[t1][t2]`, scaled by q^K.
    c: Vec<Vec<String>>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_update_feasible(
    n: usize,
    k: usize,
    q: u64,
    r: usize,
    beta: usize,
    delta: usize,
    robust: Option<(usize, u64)>,
    witness_out: Option<PathBuf>,
) -> Result<ExitCode, CliError> {
    let params = UpdateParams::new(n, k, q, r, beta, delta, robust)?;
    match update_feasible(&params)? {
        UpdateVerdict::Infeasible => {
            println!("Infeasible");
            Ok(ExitCode::from(3))
        }
        UpdateVerdict::Feasible(witness) => {
            let (gamma, zeta) = robust.unwrap_or((0, 1));
            let stringify = |m: &Vec<Vec<lrc_core::ratlp::Rational>>| {
                m.iter().map(|row| row.iter().map(|v| v.to_string()).collect()).collect()
            };
            let file = WitnessFile {
                params: WitnessParams { n, k, q, r, beta, delta, gamma, zeta },
                feasible: true,
                existence_guaranteed: false,
                note: FEASIBILITY_DISCLAIMER,
                a: stringify(&witness.a),
                c: stringify(&witness.c),
            };
            let path = witness_out.unwrap_or_else(|| {
                PathBuf::from(format!(
                    "lrc-update-witness-n{n}-k{k}-q{q}-r{r}-beta{beta}-delta{delta}.json"
                ))
            });
            let mut text = serde_json::to_string_pretty(&file).expect("witness serializes");
            text.push('\n');
            fs::write(&path, text)?;
            println!("Feasible");
            println!("note: {FEASIBILITY_DISCLAIMER}");
            println!("witness: {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

// ---------------------------------------------------------------- catalog

fn claim_tuple(p: &RlrcParams) -> String {
    format!("({},{},{},{})", p.r, p.beta, p.gamma, p.zeta)
}

fn cmd_catalog(action: CatalogAction, limits: &Limits) -> Result<ExitCode, CliError> {
    match action {
        CatalogAction::List => {
            for entry in catalog::entries() {
                let c = &entry.code;
                let d = min_distance(c, limits)?;
                let claims: Vec<String> = entry.claims.iter().map(claim_tuple).collect();
                println!(
                    "{}  [{},{},{}]_{}  claims: {}",
                    entry.name,
                    c.n(),
                    c.k(),
                    d,
                    c.q(),
                    claims.join(" ")
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        CatalogAction::Show { name } => {
            let entry = catalog::find(&name)?;
            let c = &entry.code;
            let d = min_distance(c, limits)?;
            println!("name: {}", entry.name);
            println!("parameters: [{},{},{}]_{}", c.n(), c.k(), d, c.q());
            println!("construction: {}", entry.provenance);
            println!("claims:");
            for claim in &entry.claims {
                println!(
                    "  (r={}, beta={}, gamma={}, zeta={})",
                    claim.r, claim.beta, claim.gamma, claim.zeta
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        CatalogAction::Export { name, path } => {
            let entry = catalog::find(&name)?;
            fs::write(&path, format_code_file(&ParsedCode::Storage(entry.code)))?;
            println!("wrote: {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
