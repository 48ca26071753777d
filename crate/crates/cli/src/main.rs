//! `pimhash`: hash, verify, report, scale and trace on the simulated engine.
//!
//! Exit codes: 0 success, 1 digest mismatch or failed vector, 2 invalid
//! configuration or input format, 3 I/O failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pimhash::compiler::{self, CompileOptions};
use pimhash::engine::{self, EngineError, Geometry};
use pimhash::exec;
use pimhash::kat::{self, KatError};
use pimhash::keccak::{self, LaneWidth};
use pimhash::layout::TileLayout;
use pimhash::perf::{self, PerfError, TechProfile};
use pimhash::subarray::CycleCostModel;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<KatError> for CliError {
    fn from(e: KatError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<PerfError> for CliError {
    fn from(e: PerfError) -> Self {
        match e {
            PerfError::Io { path, source } => CliError::Io { path, source },
            other => CliError::Config(other.to_string()),
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

#[derive(Parser)]
#[command(name = "pimhash", version, about = "Lane-per-row in-SRAM SHA3-256 simulator")]
struct Cli {
    /// Cycles charged per LOAD command.
    #[arg(long, global = true, default_value_t = 0)]
    load_cycles: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MessageArgs {
    /// Message as hex (may be empty).
    #[arg(long, conflicts_with = "msg_file")]
    msg: Option<String>,
    /// Message bytes taken verbatim from a file.
    #[arg(long)]
    msg_file: Option<PathBuf>,
}

impl MessageArgs {
    fn load(&self) -> Result<Option<Vec<u8>>, CliError> {
        match (&self.msg, &self.msg_file) {
            (Some(h), _) => hex::decode(h.trim())
                .map(Some)
                .map_err(|e| CliError::Config(format!("--msg is not valid hex: {e}"))),
            (None, Some(p)) => read_file(p).map(Some),
            (None, None) => Ok(None),
        }
    }
}

#[derive(Args)]
struct GeometryArgs {
    /// Subarray rows; defaults to the smallest that fits the message.
    #[arg(long)]
    rows: Option<usize>,
    /// Subarray columns (a multiple of 64; one tile per 64 columns).
    #[arg(long, default_value_t = 256)]
    cols: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Hash one message on the simulator and check it against the reference.
    Hash {
        #[command(flatten)]
        message: MessageArgs,
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Print a JSON object instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Run every byte-aligned vector of a KAT file through the simulator.
    Verify {
        #[arg(long)]
        kat: PathBuf,
        #[arg(long, default_value_t = 256)]
        cols: usize,
    },
    /// Computed metrics for technology profiles next to the baseline rows.
    Report {
        /// Profile names or JSON files; all bundled profiles if omitted.
        #[arg(long)]
        profile: Vec<String>,
        #[arg(long, env = perf::PROFILE_DIR_ENV)]
        profile_dir: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Throughput against the number of parallel permutations, as CSV.
    Scale {
        #[arg(long, default_value = perf::DEFAULT_PROFILE)]
        profile: String,
        #[arg(long, env = perf::PROFILE_DIR_ENV)]
        profile_dir: Option<PathBuf>,
        /// Comma-separated permutation counts; powers of two up to 4M if omitted.
        #[arg(long, value_delimiter = ',')]
        n: Vec<u64>,
        #[arg(long)]
        cap_watts: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile a stream, write it in binary form and print its text trace.
    Trace {
        #[command(flatten)]
        message: MessageArgs,
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Permutation rounds to trace when no message is given.
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        /// Binary stream output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Text trace output; stdout if omitted.
        #[arg(long)]
        text: Option<PathBuf>,
    },
}

fn cost_model(cli: &Cli) -> CycleCostModel {
    CycleCostModel { load_cycles: cli.load_cycles, ..CycleCostModel::default() }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_file(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_hash(
    message: &MessageArgs,
    geometry: &GeometryArgs,
    json: bool,
    cost: &CycleCostModel,
) -> Result<(), CliError> {
    let msg = message.load()?.ok_or_else(|| CliError::Config("hash needs --msg or --msg-file".into()))?;
    let rows = geometry.rows.unwrap_or_else(|| Geometry::rows_for_message(msg.len()));
    let run =
        engine::hash_batch(&[&msg], Geometry { rows, cols: geometry.cols }, cost, CompileOptions::default())?;
    let digest = run.digests[0];
    let reference = keccak::sha3_256(&msg);
    let matched = digest == reference;
    if json {
        let value = serde_json::json!({
            "digest": hex::encode(digest),
            "reference": hex::encode(reference),
            "match": matched,
            "blocks": run.blocks,
            "rows_used": run.state_rows_used,
            "subarray_rows": rows,
            "commands": run.stream.len(),
            "cycles": run.report,
        });
        println!("{}", serde_json::to_string_pretty(&value).expect("JSON value serializes"));
    } else {
        let r = &run.report;
        println!("digest    {}", hex::encode(digest));
        println!("reference {}", hex::encode(reference));
        println!("match={matched}");
        println!(
            "blocks={} rows_used={} subarray={}x{}",
            run.blocks, run.state_rows_used, rows, geometry.cols
        );
        println!(
            "cycles theta={} rho={} pi={} chi={} iota={} absorb={} total={}",
            r.theta, r.rho, r.pi, r.chi, r.iota, r.absorb, r.total
        );
    }
    if matched {
        Ok(())
    } else {
        Err(CliError::Mismatch("simulated digest differs from the reference".into()))
    }
}

fn cmd_verify(path: &Path, cols: usize, cost: &CycleCostModel) -> Result<(), CliError> {
    let bytes = read_file(path)?;
    let text =
        String::from_utf8(bytes).map_err(|_| CliError::Config(format!("{}: not UTF-8", path.display())))?;
    let file = kat::parse_kat(&text)?;
    let msgs: Vec<&[u8]> = file.vectors.iter().map(|v| v.msg.as_slice()).collect();
    let digests = engine::hash_many(&msgs, cols, cost)?;
    let mut failed = Vec::new();
    for (v, d) in file.vectors.iter().zip(&digests) {
        if d.as_slice() != v.md.as_slice() || *d != keccak::sha3_256(&v.msg) {
            failed.push(v);
        }
    }
    println!(
        "vectors={} passed={} failed={} skipped={}",
        file.vectors.len(),
        file.vectors.len() - failed.len(),
        failed.len(),
        file.skipped.len()
    );
    for v in &failed {
        println!("FAIL index={} line={} len={}", v.index, v.line, v.len_bits);
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!("{} vector(s) failed", failed.len())))
    }
}

fn load_profiles(names: &[String], dir: Option<&Path>) -> Result<Vec<TechProfile>, CliError> {
    if names.is_empty() {
        return Ok(perf::bundled_profiles());
    }
    names.iter().map(|n| perf::load_profile(n, dir).map_err(CliError::from)).collect()
}

fn cmd_report(
    names: &[String],
    dir: Option<&Path>,
    format: Format,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let report = perf::report(&load_profiles(names, dir)?)?;
    let text = match format {
        Format::Text => report.to_text(),
        Format::Csv => report.to_csv()?,
        Format::Json => report.to_json() + "\n",
    };
    emit(out, &text)
}

fn cmd_scale(
    name: &str,
    dir: Option<&Path>,
    ns: &[u64],
    cap: Option<f64>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let profile = perf::load_profile(name, dir)?;
    let ns = if ns.is_empty() { perf::default_sweep_points(4 << 20) } else { ns.to_vec() };
    let points = perf::sweep(&profile, &ns, cap)?;
    emit(out, &perf::sweep_csv(&points)?)
}

fn cmd_trace(
    message: &MessageArgs,
    geometry: &GeometryArgs,
    rounds: usize,
    out: Option<&Path>,
    text: Option<&Path>,
    cost: &CycleCostModel,
) -> Result<(), CliError> {
    let msg = message.load()?;
    let rows =
        geometry.rows.unwrap_or_else(|| msg.as_ref().map_or(32, |m| Geometry::rows_for_message(m.len())));
    let mut layout = TileLayout::build(rows, geometry.cols, LaneWidth::W64).map_err(EngineError::from)?;
    let opts = CompileOptions::default();
    let stream = match &msg {
        Some(m) => compiler::compile_hash(&mut layout, m, cost, opts).map_err(EngineError::from)?.stream,
        None => {
            if rounds == 0 || rounds > 24 {
                return Err(CliError::Config("--rounds must be between 1 and 24".into()));
            }
            let mut s = pimhash::isa::CommandStream::new();
            for r in 0..rounds {
                s.extend(
                    &compiler::compile_round(&mut layout, r, cost, opts).map_err(EngineError::from)?.stream,
                );
            }
            s
        }
    };
    if let Some(p) = out {
        let bytes = stream.to_file_bytes(layout.index_bits()).map_err(|e| CliError::Config(e.to_string()))?;
        write_file(p, &bytes)?;
    }
    emit(text, &exec::render_trace(&stream, cost))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cost = cost_model(cli);
    match &cli.command {
        Command::Hash { message, geometry, json } => cmd_hash(message, geometry, *json, &cost),
        Command::Verify { kat, cols } => cmd_verify(kat, *cols, &cost),
        Command::Report { profile, profile_dir, format, out } => {
            cmd_report(profile, profile_dir.as_deref(), *format, out.as_deref())
        }
        Command::Scale { profile, profile_dir, n, cap_watts, out } => {
            cmd_scale(profile, profile_dir.as_deref(), n, *cap_watts, out.as_deref())
        }
        Command::Trace { message, geometry, rounds, out, text } => {
            cmd_trace(message, geometry, *rounds, out.as_deref(), text.as_deref(), &cost)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
