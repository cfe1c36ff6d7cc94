//! Command-line front end.
//!
//! [`parse_args`] turns argv (without the program name) into a validated
//! [`CliConfig`]; [`execute`] runs it and writes the artifact. Exit codes:
//! 0 ok, 1 verification failure, 2 usage, 3 missing file, 4 malformed
//! input, 5 numeric error.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::codes::{self, ClassicalCode, Distribution};
use crate::entropy::{self, penalized_entropy};
use crate::linalg::{ComplexMatrix, DensityOperator};
use crate::penalty::Penalty;
use crate::qcode::{self, SourceEnsemble};
use crate::verify::{self, TrialConfig};

#[derive(Debug, Error)]
pub enum CliError {
    /// Help or version text; not an error, exits 0.
    #[error("{0}")]
    Help(String),
    #[error("one or more bound checks failed")]
    VerificationFailed,
    #[error("{0}")]
    Usage(String),
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Help(_) => 0,
            CliError::VerificationFailed => 1,
            CliError::Usage(_) => 2,
            CliError::FileNotFound(_) => 3,
            CliError::MalformedInput(_) => 4,
            CliError::Numeric(_) | CliError::Io(_) => 5,
        }
    }
}

fn numeric(e: impl std::fmt::Display) -> CliError {
    CliError::Numeric(e.to_string())
}

fn malformed(e: impl std::fmt::Display) -> CliError {
    CliError::MalformedInput(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Table,
}

#[derive(Debug, Parser)]
#[command(
    name = "renyi-coding",
    version,
    about = "Optimal lossless quantum codes with exponentially penalized lengths"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Von Neumann and Rényi entropies of a density operator.
    Entropy {
        #[command(flatten)]
        source: SourceArgs,
        /// Rényi orders to report; 1 is the von Neumann entropy.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.5, 2.0])]
        alpha: Vec<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Optimal code on the eigenbasis of a density operator.
    BuildCode {
        #[command(flatten)]
        source: SourceArgs,
        /// Exponential cost parameter; "inf" for the base length.
        #[arg(long, default_value = "0", allow_negative_numbers = true)]
        t: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Encode every state of an ensemble with a codebook.
    Encode {
        /// Ensemble JSON: {"probs": [...], "states": [[[re, im], ...], ...]}.
        #[arg(long)]
        input: PathBuf,
        /// Codebook JSON: {"k": 2, "words": [...], "basis": [...]}; basis defaults to the standard one.
        #[arg(long)]
        codebook: PathBuf,
        #[arg(long, default_value = "0", allow_negative_numbers = true)]
        t: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the randomized bound checks; exits 1 if any check fails.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trials per (d, k, t) cell.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Escort Shannon code lengths across a grid of cost parameters.
    SweepT {
        #[command(flatten)]
        source: SourceArgs,
        /// Comma-separated grid of t values; "inf" allowed.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true,
              default_values_t = ["0", "0.5", "1", "2", "4", "8", "16", "inf"].map(String::from))]
        t: Vec<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Per-source length of optimal block codes for K = 1..=K-max.
    BlockLimit {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value = "0", allow_negative_numbers = true)]
        t: String,
        #[arg(long = "K-max", default_value_t = 3, allow_negative_numbers = true)]
        k_max: i64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct SourceArgs {
    /// Matrix JSON file, spectrum text file, or an inline spectrum such as 0.5,0.25,0.25.
    #[arg(long)]
    input: String,
    /// Code alphabet size.
    #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
    k: i64,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
    /// Write the artifact here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Where a density operator comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceInput {
    File(PathBuf),
    Spectrum(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Entropy { alphas: Vec<f64> },
    BuildCode,
    Encode { ensemble: PathBuf, codebook: PathBuf },
    Verify { trials: usize },
    SweepT { grid: Vec<Penalty> },
    BlockLimit,
}

/// Validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub task: Task,
    pub input: Option<SourceInput>,
    pub k: u32,
    pub t: Penalty,
    pub k_max: usize,
    pub seed: u64,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
}

fn parse_penalty(s: &str) -> Result<Penalty, CliError> {
    s.parse().map_err(|e: crate::penalty::PenaltyError| CliError::Usage(e.to_string()))
}

fn parse_k(k: i64) -> Result<u32, CliError> {
    if (2..=i64::from(codes::MAX_ALPHABET)).contains(&k) {
        Ok(k as u32)
    } else {
        Err(CliError::Usage(format!(
            "--k must be between 2 and {}, got {k}",
            codes::MAX_ALPHABET
        )))
    }
}

fn parse_spectrum(text: &str) -> Option<Vec<f64>> {
    let values: Result<Vec<f64>, _> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(str::parse::<f64>)
        .collect();
    values.ok().filter(|v| !v.is_empty())
}

fn existing_file(path: &Path) -> Result<PathBuf, CliError> {
    if path.is_file() {
        Ok(path.to_path_buf())
    } else {
        Err(CliError::FileNotFound(path.to_path_buf()))
    }
}

fn source_input(arg: &str) -> Result<SourceInput, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        return Ok(SourceInput::File(path.to_path_buf()));
    }
    match parse_spectrum(arg) {
        Some(v) => Ok(SourceInput::Spectrum(v)),
        None => Err(CliError::FileNotFound(path.to_path_buf())),
    }
}

/// Parses argv without the program name.
pub fn parse_args<S: AsRef<str>>(argv: &[S]) -> Result<CliConfig, CliError> {
    let full = std::iter::once("renyi-coding").chain(argv.iter().map(AsRef::as_ref));
    let cli = Cli::try_parse_from(full).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            CliError::Help(e.render().to_string())
        }
        _ => CliError::Usage(e.render().to_string()),
    })?;

    let mut config = CliConfig {
        task: Task::BuildCode,
        input: None,
        k: 2,
        t: Penalty::ZERO,
        k_max: 3,
        seed: 0,
        format: OutputFormat::Table,
        output: None,
    };
    let out = match cli.command {
        Command::Entropy { source, alpha, out } => {
            if let Some(a) = alpha.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
                return Err(CliError::Usage(format!("--alpha must be finite and >= 0, got {a}")));
            }
            config.task = Task::Entropy { alphas: alpha };
            config.k = parse_k(source.k)?;
            config.input = Some(source_input(&source.input)?);
            out
        }
        Command::BuildCode { source, t, out } => {
            config.t = parse_penalty(&t)?;
            config.k = parse_k(source.k)?;
            config.input = Some(source_input(&source.input)?);
            out
        }
        Command::Encode { input, codebook, t, out } => {
            config.t = parse_penalty(&t)?;
            config.task = Task::Encode {
                ensemble: existing_file(&input)?,
                codebook: existing_file(&codebook)?,
            };
            out
        }
        Command::Verify { seed, trials, out } => {
            if trials == 0 {
                return Err(CliError::Usage("--trials must be at least 1".into()));
            }
            config.seed = seed;
            config.task = Task::Verify { trials };
            out
        }
        Command::SweepT { source, t, out } => {
            let grid = t.iter().map(|s| parse_penalty(s)).collect::<Result<_, _>>()?;
            config.task = Task::SweepT { grid };
            config.k = parse_k(source.k)?;
            config.input = Some(source_input(&source.input)?);
            out
        }
        Command::BlockLimit { source, t, k_max, out } => {
            if k_max < 1 {
                return Err(CliError::Usage(format!("--K-max must be at least 1, got {k_max}")));
            }
            config.task = Task::BlockLimit;
            config.t = parse_penalty(&t)?;
            config.k_max = k_max as usize;
            config.k = parse_k(source.k)?;
            config.input = Some(source_input(&source.input)?);
            out
        }
    };
    config.format = out.format;
    config.output = out.output;
    Ok(config)
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => CliError::FileNotFound(path.to_path_buf()),
        _ => CliError::Io(e),
    })
}

/// Reads a density operator from a matrix JSON file, a spectrum file, or an
/// inline spectrum. Spectra are normalized and must be non-negative.
pub fn load_density(input: &SourceInput) -> Result<DensityOperator, CliError> {
    match input {
        SourceInput::Spectrum(v) => spectrum_density(v),
        SourceInput::File(path) => {
            let text = read_file(path)?;
            let trimmed = text.trim();
            if trimmed.starts_with('{') {
                let m: ComplexMatrix = serde_json::from_str(trimmed).map_err(malformed)?;
                DensityOperator::new(m).map_err(malformed)
            } else if trimmed.starts_with('[') {
                let v: Vec<f64> = serde_json::from_str(trimmed).map_err(malformed)?;
                spectrum_density(&v)
            } else {
                let v = parse_spectrum(trimmed)
                    .ok_or_else(|| malformed(format!("{} is not a spectrum", path.display())))?;
                spectrum_density(&v)
            }
        }
    }
}

fn spectrum_density(v: &[f64]) -> Result<DensityOperator, CliError> {
    let p = Distribution::from_weights(v).map_err(malformed)?;
    DensityOperator::diagonal(p.probs()).map_err(malformed)
}

/// Amplitude written either as [re, im] or as a bare real.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum AmplitudeJson {
    Pair([f64; 2]),
    Real(f64),
}

impl From<AmplitudeJson> for Complex64 {
    fn from(a: AmplitudeJson) -> Self {
        match a {
            AmplitudeJson::Pair([re, im]) => Complex64::new(re, im),
            AmplitudeJson::Real(re) => Complex64::new(re, 0.0),
        }
    }
}

fn vectors(raw: Vec<Vec<AmplitudeJson>>) -> Vec<Vec<Complex64>> {
    raw.into_iter()
        .map(|v| v.into_iter().map(Complex64::from).collect())
        .collect()
}

#[derive(Debug, Deserialize)]
struct EnsembleJson {
    probs: Vec<f64>,
    states: Vec<Vec<AmplitudeJson>>,
}

#[derive(Debug, Deserialize)]
struct CodebookFileJson {
    k: u32,
    words: Vec<String>,
    #[serde(default)]
    basis: Option<Vec<Vec<AmplitudeJson>>>,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().copied().map(pair).collect()
}

fn round6(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = (x * 1e6).round() / 1e6;
    // avoid printing -0.000000
    format!("{:.6}", if r == 0.0 { 0.0 } else { r })
}

/// A rectangular result rendered as table or CSV.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn full(&self) -> String {
        match self {
            Cell::Num(x) if x.is_infinite() => round6(*x),
            Cell::Num(x) => x.to_string(),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn rounded(&self) -> String {
        match self {
            Cell::Num(x) => round6(*x),
            _ => self.full(),
        }
    }
}

impl Table {
    fn csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::full).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn pretty(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::rounded).collect())
            .collect();
        let widths: Vec<usize> = (0..self.header.len())
            .map(|j| {
                cells
                    .iter()
                    .map(|r| r[j].len())
                    .chain([self.header[j].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        let line = |out: &mut String, row: &[String]| {
            let padded: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:>w$}"))
                .collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        };
        let header: Vec<String> = self.header.iter().map(|h| h.to_string()).collect();
        line(&mut out, &header);
        for row in &cells {
            line(&mut out, row);
        }
        out
    }
}

fn render(format: OutputFormat, json: impl FnOnce() -> serde_json::Value, table: impl FnOnce() -> Table) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&json()).expect("serializable");
            s.push('\n');
            s
        }
        OutputFormat::Csv => table().csv(),
        OutputFormat::Table => table().pretty(),
    }
}

fn source(config: &CliConfig) -> Result<DensityOperator, CliError> {
    let input = config
        .input
        .as_ref()
        .ok_or_else(|| CliError::Usage("--input is required".into()))?;
    load_density(input)
}

fn penalty_json(t: Penalty) -> serde_json::Value {
    serde_json::to_value(t).expect("serializable")
}

fn run_entropy(config: &CliConfig, alphas: &[f64]) -> Result<String, CliError> {
    let rho = source(config)?;
    let mut orders = vec![1.0];
    orders.extend(alphas.iter().copied().filter(|&a| a != 1.0));
    let values = orders
        .iter()
        .map(|&a| entropy::entropy_of_order(&rho, a, config.k).map(|e| (a, e.value)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(numeric)?;
    Ok(render(
        config.format,
        || {
            json!({
                "k": config.k,
                "entropies": values.iter().map(|&(a, v)| json!({"alpha": a, "value": v})).collect::<Vec<_>>(),
            })
        },
        || Table {
            header: vec!["alpha", "entropy"],
            rows: values.iter().map(|&(a, v)| vec![Cell::Num(a), Cell::Num(v)]).collect(),
        },
    ))
}

fn run_build_code(config: &CliConfig) -> Result<String, CliError> {
    let rho = source(config)?;
    let enc = verify::optimal_encoder(&rho, config.k, config.t).map_err(numeric)?;
    let achieved = qcode::source_t_avg_length(&enc, &rho, config.t).map_err(numeric)?;
    let bound = penalized_entropy(&rho, config.t, config.k).map_err(numeric)?;
    let words = enc.code().words().to_vec();
    let lengths = enc.lengths();
    let eigenvalues = rho.eigenvalues().to_vec();
    Ok(render(
        config.format,
        || {
            json!({
                "k": config.k,
                "t": penalty_json(config.t),
                "words": words,
                "lengths": lengths,
                "eigenvalues": eigenvalues,
                "basis": enc.basis().iter().map(|v| pairs(v)).collect::<Vec<_>>(),
                "t_avg_length": achieved,
                "renyi_bound": bound,
                "kraft_sum": qcode::quantum_kraft_sum(&enc),
            })
        },
        || Table {
            header: vec!["index", "eigenvalue", "word", "length"],
            rows: (0..words.len())
                .map(|i| {
                    vec![
                        Cell::Int(i as u64),
                        Cell::Num(eigenvalues[i]),
                        Cell::Text(words[i].clone()),
                        Cell::Int(u64::from(lengths[i])),
                    ]
                })
                .collect(),
        },
    ))
}

fn run_encode(config: &CliConfig, ensemble: &Path, codebook: &Path) -> Result<String, CliError> {
    let ens: EnsembleJson = serde_json::from_str(&read_file(ensemble)?).map_err(malformed)?;
    let book: CodebookFileJson = serde_json::from_str(&read_file(codebook)?).map_err(malformed)?;
    let code = ClassicalCode::new(book.k, book.words).map_err(malformed)?;
    let basis = match book.basis {
        Some(b) => vectors(b),
        None => qcode::standard_basis(code.len()),
    };
    let enc = qcode::build_encoder(basis, code).map_err(malformed)?;
    let probs = Distribution::new(ens.probs).map_err(malformed)?;
    let ensemble = SourceEnsemble::new(probs, vectors(ens.states)).map_err(malformed)?;

    let encoded = ensemble
        .states()
        .iter()
        .map(|s| qcode::encode(&enc, s))
        .collect::<Result<Vec<_>, _>>()
        .map_err(malformed)?;
    let t_avg = qcode::ensemble_t_avg_length(&enc, &ensemble, config.t).map_err(numeric)?;
    let avg = qcode::ensemble_t_avg_length(&enc, &ensemble, Penalty::ZERO).map_err(numeric)?;
    let base = qcode::source_base_length(&enc, &ensemble).map_err(numeric)?;
    let per_state: Vec<(f64, f64, usize)> = encoded
        .iter()
        .map(|w| {
            (
                qcode::t_codeword_length(w, config.t),
                qcode::t_codeword_length(w, Penalty::ZERO),
                qcode::base_length(w),
            )
        })
        .collect();
    Ok(render(
        config.format,
        || {
            json!({
                "k": enc.k(),
                "t": penalty_json(config.t),
                "codewords": encoded,
                "codeword_lengths": per_state.iter().map(|&(lt, l0, b)| json!({
                    "t_length": lt, "avg_length": l0, "base_length": b,
                })).collect::<Vec<_>>(),
                "t_avg_length": t_avg,
                "avg_length": avg,
                "base_length": base,
            })
        },
        || {
            let mut rows: Vec<Vec<Cell>> = per_state
                .iter()
                .enumerate()
                .map(|(i, &(lt, l0, b))| {
                    vec![
                        Cell::Text(i.to_string()),
                        Cell::Num(ensemble.probs().probs()[i]),
                        Cell::Num(lt),
                        Cell::Num(l0),
                        Cell::Int(b as u64),
                    ]
                })
                .collect();
            rows.push(vec![
                Cell::Text("source".into()),
                Cell::Num(1.0),
                Cell::Num(t_avg),
                Cell::Num(avg),
                Cell::Int(base as u64),
            ]);
            Table {
                header: vec!["state", "prob", "t_length", "avg_length", "base_length"],
                rows,
            }
        },
    ))
}

fn run_verify(config: &CliConfig, trials: usize) -> Result<(String, bool), CliError> {
    let trial_config = TrialConfig {
        master_seed: config.seed,
        trials_per_cell: trials,
        ..TrialConfig::default()
    };
    let reports = verify::run_suite(&trial_config).map_err(numeric)?;
    let all_pass = reports.iter().all(verify::BoundReport::passed);
    let text = match config.format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&reports).expect("serializable");
            s.push('\n');
            s
        }
        OutputFormat::Csv => verify::reports_to_csv(&reports),
        OutputFormat::Table => {
            let mut summary: Vec<(verify::TheoremId, usize, usize)> = Vec::new();
            for r in &reports {
                match summary.last_mut() {
                    Some((id, n, fail)) if *id == r.theorem_id => {
                        *n += 1;
                        *fail += usize::from(!r.passed());
                    }
                    _ => summary.push((r.theorem_id, 1, usize::from(!r.passed()))),
                }
            }
            Table {
                header: vec!["check", "reports", "failed"],
                rows: summary
                    .into_iter()
                    .map(|(id, n, f)| {
                        vec![Cell::Text(id.to_string()), Cell::Int(n as u64), Cell::Int(f as u64)]
                    })
                    .collect(),
            }
            .pretty()
        }
    };
    Ok((text, all_pass))
}

/// One row of the cost sweep for the escort Shannon code.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub t: Penalty,
    pub t_avg_length: f64,
    pub renyi_bound: f64,
    pub avg_length: f64,
    pub avg_lower: f64,
    pub base_length: u32,
}

/// Escort Shannon code of ρ at each t: its t-exponential length, the Rényi
/// bound, its standard average with the tradeoff lower bound, and its base
/// length.
pub fn sweep_t(rho: &DensityOperator, k: u32, grid: &[Penalty]) -> Result<Vec<SweepRow>, CliError> {
    grid.iter()
        .map(|&t| {
            let enc = verify::escort_shannon_encoder(rho, k, t).map_err(numeric)?;
            let check = verify::check_tradeoff(rho, k, t).map_err(numeric)?;
            Ok(SweepRow {
                t,
                t_avg_length: qcode::source_t_avg_length(&enc, rho, t).map_err(numeric)?,
                renyi_bound: penalized_entropy(rho, t, k).map_err(numeric)?,
                avg_length: check.report.achieved,
                avg_lower: check.report.lower,
                base_length: check.base_length,
            })
        })
        .collect()
}

fn run_sweep(config: &CliConfig, grid: &[Penalty]) -> Result<String, CliError> {
    let rho = source(config)?;
    let rows = sweep_t(&rho, config.k, grid)?;
    Ok(render(
        config.format,
        || json!({"k": config.k, "rows": rows}),
        || Table {
            header: vec!["t", "t_avg_length", "renyi_bound", "avg_length", "avg_lower", "base_length"],
            rows: rows
                .iter()
                .map(|r| {
                    vec![
                        Cell::Text(r.t.to_string()),
                        Cell::Num(r.t_avg_length),
                        Cell::Num(r.renyi_bound),
                        Cell::Num(r.avg_length),
                        Cell::Num(r.avg_lower),
                        Cell::Int(u64::from(r.base_length)),
                    ]
                })
                .collect(),
        },
    ))
}

fn run_block_limit(config: &CliConfig) -> Result<String, CliError> {
    let rho = source(config)?;
    let points = verify::block_limit_sweep(&rho, config.k, config.t, config.k_max).map_err(numeric)?;
    Ok(render(
        config.format,
        || json!({"k": config.k, "t": penalty_json(config.t), "points": points}),
        || Table {
            header: vec!["K", "per_source_length", "lower", "upper"],
            rows: points
                .iter()
                .map(|p| {
                    vec![
                        Cell::Int(p.block as u64),
                        Cell::Num(p.per_source_length),
                        Cell::Num(p.lower),
                        Cell::Num(p.upper),
                    ]
                })
                .collect(),
        },
    ))
}

/// Runs a validated config, writing the artifact to `--output` or `out`.
///
/// A failing `verify` still writes its reports before returning
/// [`CliError::VerificationFailed`].
pub fn execute(config: &CliConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let mut passed = true;
    let text = match &config.task {
        Task::Entropy { alphas } => run_entropy(config, alphas)?,
        Task::BuildCode => run_build_code(config)?,
        Task::Encode { ensemble, codebook } => run_encode(config, ensemble, codebook)?,
        Task::Verify { trials } => {
            let (text, ok) = run_verify(config, *trials)?;
            passed = ok;
            text
        }
        Task::SweepT { grid } => run_sweep(config, grid)?,
        Task::BlockLimit => run_block_limit(config)?,
    };
    match &config.output {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    if passed {
        Ok(())
    } else {
        Err(CliError::VerificationFailed)
    }
}

/// Parses, executes and reports errors; returns the process exit code.
pub fn run<S: AsRef<str>>(argv: &[S], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = parse_args(argv).and_then(|config| execute(&config, out));
    match result {
        Ok(()) => 0,
        Err(CliError::Help(text)) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            match &e {
                CliError::Usage(text) => {
                    let _ = write!(err, "{text}");
                }
                other => {
                    let _ = writeln!(err, "error: {other}");
                }
            }
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<CliConfig, CliError> {
        parse_args(args)
    }

    fn run_text(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(args, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn negative_t_is_a_usage_error() {
        let e = parse(&["build-code", "--input", "0.5,0.5", "--t", "-1"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn verify_takes_seed() {
        let c = parse(&["verify", "--seed", "42"]).unwrap();
        assert_eq!(c.seed, 42);
        assert_eq!(c.task, Task::Verify { trials: 20 });
    }

    #[test]
    fn inline_spectrum_and_infinite_t() {
        let c = parse(&["build-code", "--input", "0.5,0.25,0.25", "--t", "inf", "--k", "3"]).unwrap();
        assert_eq!(c.input, Some(SourceInput::Spectrum(vec![0.5, 0.25, 0.25])));
        assert_eq!(c.t, Penalty::Infinite);
        assert_eq!(c.k, 3);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(parse(&["build-code", "--input", "1", "--k", "1"]).unwrap_err().exit_code(), 2);
        assert_eq!(parse(&["block-limit", "--input", "1", "--K-max", "0"]).unwrap_err().exit_code(), 2);
        assert_eq!(parse(&["frobnicate"]).unwrap_err().exit_code(), 2);
        assert_eq!(parse(&["entropy", "--input", "1", "--alpha", "-2"]).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn missing_file() {
        let e = parse(&["entropy", "--input", "/nonexistent/rho.json"]).unwrap_err();
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn help_exits_zero() {
        let (code, text) = run_text(&["--help"]);
        assert_eq!(code, 0);
        assert!(text.contains("build-code"));
    }

    #[test]
    fn entropy_of_maximally_mixed_qubit() {
        let (code, text) = run_text(&["entropy", "--input", "0.5,0.5", "--alpha", "0,0.5,2,3", "--format", "csv"]);
        assert_eq!(code, 0);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("alpha,entropy"));
        let values: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
        assert_eq!(values.len(), 5);
        for v in values {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn build_code_dyadic_json() {
        let (code, text) = run_text(&["build-code", "--input", "0.5,0.25,0.25", "--format", "json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["words"], json!(["0", "10", "11"]));
        assert_eq!(v["lengths"], json!([1, 2, 2]));
        assert_eq!(v["t_avg_length"], json!(1.5));
    }

    #[test]
    fn table_rounds_to_six_places() {
        let (code, text) = run_text(&["entropy", "--input", "0.7,0.3", "--alpha", "2"]);
        assert_eq!(code, 0);
        assert!(text.contains("0.881291"), "{text}");
    }

    #[test]
    fn malformed_spectrum_file() {
        let dir = std::env::temp_dir().join(format!("renyi-cli-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.txt");
        fs::write(&path, "not numbers").unwrap();
        let (code, _) = run_text(&["entropy", "--input", path.to_str().unwrap()]);
        assert_eq!(code, 4);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn zero_eigenvalue_sweep_is_numeric_error() {
        let (code, _) = run_text(&["sweep-t", "--input", "0.5,0.5,0"]);
        assert_eq!(code, 5);
    }

    #[test]
    fn round6_formats() {
        assert_eq!(round6(1.0), "1.000000");
        assert_eq!(round6(-1e-9), "0.000000");
        assert_eq!(round6(f64::INFINITY), "inf");
    }
}
