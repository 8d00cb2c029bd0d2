use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use schmidt_core::adversaries::AdversaryKind;
use schmidt_core::certify::theorem1_constant;
use schmidt_core::par::{self, Execution};
use schmidt_core::rational::{fmt_q, to_f64};

use crate::failure::{config_err, Failure};
use crate::inputs::{self, Inputs};
use crate::play::{self, GameFlags, PlayConfig};

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub game: GameFlags,
    #[arg(long, default_value = "1/4,1/5,1/3")]
    pub alphas: String,
    #[arg(long, default_value = "1/2,1/3,2/3")]
    pub betas: String,
    #[arg(long, default_value = "concentric")]
    pub adversaries: String,
    #[arg(long, default_value = "0")]
    pub seeds: String,
    /// Brute-force horizon for the badness minimum at each certified eta; 0 skips it.
    #[arg(long = "N", default_value_t = 1000)]
    pub n_max: u64,
    /// CSV path; defaults to <out>/sweep-<hash>.csv.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Serialize)]
pub struct SweepConfig {
    pub base: PlayConfig,
    pub alphas: Vec<String>,
    pub betas: Vec<String>,
    pub adversaries: Vec<AdversaryKind>,
    pub seeds: Vec<u64>,
    #[serde(rename = "N")]
    pub n_max: u64,
}

#[derive(Serialize, Default)]
pub struct Row {
    pub alpha: String,
    pub beta: String,
    pub adversary: String,
    pub seed: u64,
    pub status: String,
    pub k: Option<u64>,
    pub tau_k: Option<u64>,
    pub epsilon: Option<String>,
    pub certified_planes: Option<usize>,
    pub min_residual_lb: Option<String>,
    pub resonance_margin: Option<String>,
    /// `resonance_margin / epsilon` as a float, for plotting.
    pub margin_ratio: Option<f64>,
    pub eta: Option<String>,
    pub theorem1_value: Option<String>,
    pub theorem1_minimizer: Option<String>,
}

pub fn sweep_config(args: &SweepArgs) -> Result<SweepConfig, Failure> {
    let base = play::base_config(&args.game)?;
    let adversaries = inputs::tokens(&args.adversaries)
        .iter()
        .map(|s| s.parse::<AdversaryKind>().map_err(|e| config_err(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let seeds = inputs::tokens(&args.seeds)
        .iter()
        .map(|s| s.parse::<u64>().map_err(|_| config_err(format!("bad seed {s:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let alphas = inputs::tokens(&args.alphas);
    let betas = inputs::tokens(&args.betas);
    for a in alphas.iter().chain(&betas) {
        inputs::rational("alphas/betas", a)?;
    }
    if alphas.is_empty() || betas.is_empty() || adversaries.is_empty() || seeds.is_empty() {
        return Err(config_err("sweep grid has an empty axis"));
    }
    Ok(SweepConfig {
        base,
        alphas,
        betas,
        adversaries,
        seeds,
        n_max: args.n_max,
    })
}

/// Grid points in `alpha`, `beta`, adversary, seed order.
pub fn grid(c: &SweepConfig) -> Vec<PlayConfig> {
    let mut out = Vec::new();
    for alpha in &c.alphas {
        for beta in &c.betas {
            for &adversary in &c.adversaries {
                for &seed in &c.seeds {
                    out.push(PlayConfig {
                        alpha: alpha.clone(),
                        beta: beta.clone(),
                        adversary,
                        seed,
                        trace: false,
                        ..c.base.clone()
                    });
                }
            }
        }
    }
    out
}

fn run_row(cfg: &PlayConfig, n_max: u64) -> Row {
    let mut row = Row {
        alpha: cfg.alpha.clone(),
        beta: cfg.beta.clone(),
        adversary: cfg.adversary.name().into(),
        seed: cfg.seed,
        ..Row::default()
    };
    if let Err(e) = fill_row(cfg, n_max, &mut row) {
        row.status = e.to_string();
    }
    row
}

fn fill_row(cfg: &PlayConfig, n_max: u64, row: &mut Row) -> Result<(), Failure> {
    let prepared = play::prepare(cfg, &mut Inputs::default())?;
    row.k = Some(prepared.params.k);
    row.tau_k = Some(prepared.params.tau_k);
    row.epsilon = Some(fmt_q(&prepared.params.epsilon));
    let run = play::play(cfg, &prepared)?;
    let cert = &run.certificate;
    row.status = "certified".into();
    row.certified_planes = Some(cert.handled.len());
    row.min_residual_lb = cert.min_residual_lb().map(fmt_q);
    row.eta = Some(cert.eta().iter().map(fmt_q).collect::<Vec<_>>().join(","));
    if let Some(m) = play::margin(&prepared, &run)? {
        row.margin_ratio = Some(to_f64(&(&m / &cert.epsilon)));
        row.resonance_margin = Some(fmt_q(&m));
    }
    if n_max > 0 && prepared.theta.n == cert.eta().len() {
        let report = theorem1_constant(&prepared.theta, cert.eta(), n_max)?;
        row.theorem1_value = Some(fmt_q(&report.value));
        row.theorem1_minimizer = Some(report.minimizer.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
    }
    Ok(())
}

/// Runs the grid; rows come back in grid order regardless of execution.
pub fn run(c: &SweepConfig, inputs: &mut Inputs) -> Result<Vec<Row>, Failure> {
    // read shared files once so they enter the content hash and fail early
    let theta = inputs.theta(&c.base.theta)?;
    let m = inputs::rational("M", &c.base.m)?;
    inputs.lambda(c.base.lambda.as_deref(), &theta, &m, c.base.tmax)?;
    let configs = grid(c);
    Ok(par::map_slice(Execution::default(), &configs, |cfg| run_row(cfg, c.n_max)))
}

pub fn write_csv(rows: &[Row]) -> Result<Vec<u8>, Failure> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    writer.into_inner().map_err(|e| Failure::Run(e.to_string()))
}
