//! `schmidt`: play, certify, psi, resonance and sweep.

mod failure;
mod inputs;
mod play;
mod sweep;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use schmidt_core::certify::{jarnik_constant, theorem1_constant, PsiSpec};
use schmidt_core::par::Execution;
use schmidt_core::resonance::{psi_records, verify_hypothesis};

use crate::failure::{config_err, Failure};
use crate::inputs::Inputs;

#[derive(Parser, Debug)]
#[command(name = "schmidt", version, about = "Exact Schmidt-game strategies and badly approximable certificates")]
struct Cli {
    /// Directory for reports that are not given an explicit --output.
    #[arg(long, global = true, env = "SCHMIDT_OUT", default_value = "schmidt-out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run White's strategy against one Black adversary and certify the result.
    Play(play::PlayArgs),
    /// Brute-force badness minimum of an affine form.
    Certify(CertifyArgs),
    /// Change points of the approximation function of theta.
    Psi(PsiArgs),
    /// Lacunary resonance sequence of theta.
    Resonance(ResonanceArgs),
    /// Grid of games over alpha, beta, adversary and seed, tabulated to CSV.
    Sweep(sweep::SweepArgs),
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
enum FunctionalArg {
    Theorem1,
    Jarnik,
}

#[derive(Args, Debug, Serialize)]
struct CertifyArgs {
    /// Preset (golden, sqrt2, silver) or theta JSON file.
    #[arg(long, default_value = "golden")]
    theta: String,
    /// Shift, comma-separated rationals.
    #[arg(long, allow_hyphen_values = true)]
    eta: String,
    #[arg(long = "N", default_value_t = 1000)]
    #[serde(rename = "N")]
    n_max: u64,
    #[arg(long, value_enum, default_value = "theorem1")]
    functional: FunctionalArg,
    /// e.g. "power:c=1,sigma=1" or "table:1=1/2;4=1/9"; required for jarnik.
    #[arg(long)]
    psi: Option<String>,
    #[arg(long)]
    #[serde(skip)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct PsiArgs {
    #[arg(long, default_value = "golden")]
    theta: String,
    #[arg(long, default_value_t = 1000)]
    tmax: u64,
    /// Also check that psi_theta stays below this approximation function.
    #[arg(long)]
    check: Option<String>,
    #[arg(long)]
    #[serde(skip)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct ResonanceArgs {
    #[arg(long, default_value = "golden")]
    theta: String,
    #[arg(long = "M", default_value = "3")]
    #[serde(rename = "M")]
    m: String,
    #[arg(long, default_value_t = 1000)]
    tmax: u64,
    #[arg(long)]
    #[serde(skip)]
    output: Option<PathBuf>,
}

fn short_hash(hash: &str) -> &str {
    let hex = hash.trim_start_matches("sha256:");
    &hex[..12.min(hex.len())]
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, bytes)?;
    Ok(())
}

fn pretty(value: &serde_json::Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("json value serializes");
    bytes.push(b'\n');
    bytes
}

/// Writes to `output` when given, otherwise prints to stdout.
fn emit(value: &serde_json::Value, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => write_file(path, &pretty(value)),
        None => {
            print!("{}", String::from_utf8(pretty(value)).expect("utf8 json"));
            Ok(())
        }
    }
}

fn cmd_play(args: &play::PlayArgs, out: &Path) -> Result<(), Failure> {
    let config = play::play_config(args)?;
    let mut inputs = Inputs::default();
    let prepared = play::prepare(&config, &mut inputs)?;
    let hash = inputs.content_hash(&config);
    let run = play::play(&config, &prepared)?;
    let report = play::report(&config, &hash, &prepared, &run)?;
    let path = args
        .output
        .clone()
        .unwrap_or_else(|| out.join(format!("play-{}.json", short_hash(&hash))));
    write_file(&path, &pretty(&report))?;
    println!("{}", report["summary"].as_str().unwrap_or_default());
    println!("report: {}", path.display());
    Ok(())
}

fn cmd_certify(args: &CertifyArgs) -> Result<(), Failure> {
    let mut inputs = Inputs::default();
    let theta = inputs.theta(&args.theta)?;
    let eta = inputs::rationals("eta", &args.eta)?;
    let report = match args.functional {
        FunctionalArg::Theorem1 => theorem1_constant(&theta, &eta, args.n_max)?,
        FunctionalArg::Jarnik => {
            let text = args
                .psi
                .as_deref()
                .ok_or_else(|| config_err("--psi is required for the jarnik functional"))?;
            let psi = PsiSpec::parse(text)?;
            jarnik_constant(&theta, &eta, &psi, args.n_max)?
        }
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let value = json!({
        "command": "certify",
        "config": args,
        "input_hash": inputs.content_hash(args),
        "report": report,
    });
    emit(&value, args.output.as_deref())
}

fn cmd_psi(args: &PsiArgs) -> Result<(), Failure> {
    let mut inputs = Inputs::default();
    let theta = inputs.theta(&args.theta)?;
    let records = psi_records(&theta, args.tmax, Execution::default());
    let hypothesis = match &args.check {
        Some(text) => Some(verify_hypothesis(&theta, &PsiSpec::parse(text)?, args.tmax)?),
        None => None,
    };
    let value = json!({
        "command": "psi",
        "config": args,
        "input_hash": inputs.content_hash(args),
        "records": records,
        "hypothesis": hypothesis,
    });
    emit(&value, args.output.as_deref())
}

fn cmd_resonance(args: &ResonanceArgs) -> Result<(), Failure> {
    let mut inputs = Inputs::default();
    let theta = inputs.theta(&args.theta)?;
    let m = inputs::rational("M", &args.m)?;
    let lambda = inputs.lambda(None, &theta, &m, args.tmax)?;
    let sizes: Vec<serde_json::Value> = lambda
        .sizes_sq()
        .iter()
        .map(|t_sq| {
            let t = t_sq.sqrt();
            if &t * &t == *t_sq {
                t.to_string().parse::<i64>().map_or_else(|_| json!(t.to_string()), |v| json!(v))
            } else {
                json!(format!("sqrt({t_sq})"))
            }
        })
        .collect();
    let value = json!({
        "command": "resonance",
        "config": args,
        "input_hash": inputs.content_hash(args),
        "M": args.m,
        "sizes": sizes,
        "entries": lambda.to_json_list(),
    });
    emit(&value, args.output.as_deref())
}

fn cmd_sweep(args: &sweep::SweepArgs, out: &Path) -> Result<(), Failure> {
    let config = sweep::sweep_config(args)?;
    let mut inputs = Inputs::default();
    let rows = sweep::run(&config, &mut inputs)?;
    let hash = inputs.content_hash(&config);
    let csv_path = args
        .output
        .clone()
        .unwrap_or_else(|| out.join(format!("sweep-{}.csv", short_hash(&hash))));
    let csv = sweep::write_csv(&rows)?;
    write_file(&csv_path, &csv)?;
    let certified = rows.iter().filter(|r| r.status == "certified").count();
    let manifest = json!({
        "command": "sweep",
        "config": config,
        "input_hash": hash,
        "rows": rows.len(),
        "certified": certified,
        "csv": csv_path.file_name().map(|n| n.to_string_lossy().into_owned()),
    });
    write_file(&csv_path.with_extension("json"), &pretty(&manifest))?;
    println!("{} rows, {certified} certified", rows.len());
    println!("table: {}", csv_path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Play(args) => cmd_play(args, &cli.out),
        Command::Certify(args) => cmd_certify(args),
        Command::Psi(args) => cmd_psi(args),
        Command::Resonance(args) => cmd_resonance(args),
        Command::Sweep(args) => cmd_sweep(args, &cli.out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{failure}");
            failure.exit_code()
        }
    }
}
