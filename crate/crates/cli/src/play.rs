use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use schmidt_core::adversaries::AdversaryKind;
use schmidt_core::certify::resonance_margin;
use schmidt_core::escape::SelectConfig;
use schmidt_core::geometry::Point;
use schmidt_core::rational::fmt_q;
use schmidt_core::resonance::{ResonanceSequence, ThetaMatrix};
use schmidt_core::schedule::{derive_params_with, StrategyParams};
use schmidt_core::strategy::{run_strategy, summary, Opening, StrategyRun};
use schmidt_core::Q;

use crate::failure::{config_err, Failure};
use crate::inputs::{self, Inputs};

/// A full game description. Rationals are strings; defaults reproduce the
/// golden-mean run with `alpha = 1/4`, `beta = 1/2`, `M = 3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlayConfig {
    pub alpha: String,
    pub beta: String,
    #[serde(rename = "M")]
    pub m: String,
    /// Preset name or path to a theta JSON file.
    pub theta: String,
    /// Largest resonance size considered when deriving the sequence.
    pub tmax: u64,
    /// Resonance list file; overrides the sequence derived from theta.
    pub lambda: Option<String>,
    /// Opening center, comma-separated; the origin when absent.
    pub center: Option<String>,
    pub rho0: String,
    pub blocks: usize,
    pub adversary: AdversaryKind,
    pub seed: u64,
    pub opening: Opening,
    pub k: Option<u64>,
    pub budget: usize,
    pub max_budget: usize,
    /// Embed the full move list in the report.
    pub trace: bool,
}

impl Default for PlayConfig {
    fn default() -> Self {
        PlayConfig {
            alpha: "1/4".into(),
            beta: "1/2".into(),
            m: "3".into(),
            theta: "golden".into(),
            tmax: 1_000_000,
            lambda: None,
            center: None,
            rho0: "1/2".into(),
            blocks: 2,
            adversary: AdversaryKind::Concentric,
            seed: 0,
            opening: Opening::Driver,
            k: None,
            budget: 32,
            max_budget: 4096,
            trace: false,
        }
    }
}

/// Game flags shared by `play` and `sweep`; each overrides the config file.
#[derive(Args, Debug, Default, Clone)]
pub struct GameFlags {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "M")]
    pub m: Option<String>,
    /// Preset (golden, sqrt2, silver) or theta JSON file.
    #[arg(long)]
    pub theta: Option<String>,
    #[arg(long)]
    pub tmax: Option<u64>,
    /// Resonance list JSON file.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Opening center, e.g. "1/3" or "0,1/2".
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<String>,
    #[arg(long)]
    pub rho0: Option<String>,
    #[arg(long)]
    pub blocks: Option<usize>,
    /// driver (shrink the opening ball) or adversarial (warm-up rounds).
    #[arg(long)]
    pub opening: Option<String>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub max_budget: Option<usize>,
}

#[derive(Args, Debug)]
pub struct PlayArgs {
    #[command(flatten)]
    pub game: GameFlags,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    /// concentric, random or greedy.
    #[arg(long)]
    pub adversary: Option<AdversaryKind>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trace: bool,
    /// Report path; defaults to <out>/play-<hash>.json.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn parse_opening(text: &str) -> Result<Opening, Failure> {
    serde_json::from_value(serde_json::Value::String(text.to_string()))
        .map_err(|_| config_err(format!("--opening must be driver or adversarial, got {text:?}")))
}

pub fn base_config(flags: &GameFlags) -> Result<PlayConfig, Failure> {
    let mut c = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?
        }
        None => PlayConfig::default(),
    };
    if let Some(v) = &flags.m {
        c.m = v.clone();
    }
    if let Some(v) = &flags.theta {
        c.theta = v.clone();
    }
    if let Some(v) = flags.tmax {
        c.tmax = v;
    }
    if let Some(v) = &flags.lambda {
        c.lambda = Some(v.clone());
    }
    if let Some(v) = &flags.center {
        c.center = Some(v.clone());
    }
    if let Some(v) = &flags.rho0 {
        c.rho0 = v.clone();
    }
    if let Some(v) = flags.blocks {
        c.blocks = v;
    }
    if let Some(v) = &flags.opening {
        c.opening = parse_opening(v)?;
    }
    if let Some(v) = flags.k {
        c.k = Some(v);
    }
    if let Some(v) = flags.budget {
        c.budget = v;
    }
    if let Some(v) = flags.max_budget {
        c.max_budget = v;
    }
    Ok(c)
}

pub fn play_config(args: &PlayArgs) -> Result<PlayConfig, Failure> {
    let mut c = base_config(&args.game)?;
    if let Some(v) = &args.alpha {
        c.alpha = v.clone();
    }
    if let Some(v) = &args.beta {
        c.beta = v.clone();
    }
    if let Some(v) = args.adversary {
        c.adversary = v;
    }
    if let Some(v) = args.seed {
        c.seed = v;
    }
    c.trace |= args.trace;
    Ok(c)
}

/// Everything a game needs, parsed and validated.
pub struct Prepared {
    pub theta: ThetaMatrix,
    pub lambda: ResonanceSequence,
    pub params: StrategyParams,
    pub center: Point,
    pub rho0: Q,
}

pub fn prepare(c: &PlayConfig, inputs: &mut Inputs) -> Result<Prepared, Failure> {
    let alpha = inputs::rational("alpha", &c.alpha)?;
    let beta = inputs::rational("beta", &c.beta)?;
    let m = inputs::rational("M", &c.m)?;
    let rho0 = inputs::rational("rho0", &c.rho0)?;
    let theta = inputs.theta(&c.theta)?;
    let lambda = inputs.lambda(c.lambda.as_deref(), &theta, &m, c.tmax)?;
    let params = derive_params_with(&alpha, &beta, &m, lambda.dim(), c.k)?;
    let center = match &c.center {
        Some(text) => Point::new(inputs::rationals("center", text)?),
        None => Point::origin(lambda.dim()),
    };
    if center.dim() != lambda.dim() {
        return Err(config_err(format!(
            "center has dimension {}, resonance vectors have {}",
            center.dim(),
            lambda.dim()
        )));
    }
    Ok(Prepared {
        theta,
        lambda,
        params,
        center,
        rho0,
    })
}

pub fn play(c: &PlayConfig, p: &Prepared) -> Result<StrategyRun, Failure> {
    let select = SelectConfig {
        budget: c.budget,
        max_budget: c.max_budget,
        seed: c.seed,
        ..SelectConfig::default()
    };
    let mut black = c.adversary.build(c.seed, &p.lambda);
    Ok(run_strategy(
        &p.lambda,
        &p.params,
        p.center.clone(),
        &p.rho0,
        c.blocks,
        c.opening,
        select,
        black.as_mut(),
    )?)
}

/// `min ||u^(r) . eta||` over the certified `r`, if any.
pub fn margin(p: &Prepared, run: &StrategyRun) -> Result<Option<Q>, Failure> {
    let last_r = run.certificate.handled.iter().map(|h| h.r).max().unwrap_or(0);
    if last_r == 0 {
        return Ok(None);
    }
    Ok(Some(resonance_margin(&p.lambda, run.certificate.eta(), last_r)?))
}

pub fn report(c: &PlayConfig, hash: &str, p: &Prepared, run: &StrategyRun) -> Result<serde_json::Value, Failure> {
    let margin = margin(p, run)?;
    let mut value = serde_json::json!({
        "command": "play",
        "config": c,
        "input_hash": hash,
        "theta": p.theta.to_json(),
        "params": p.params,
        "resonance": p.lambda.to_json_list(),
        "opening": run.opening,
        "state": run.state,
        "certificate": run.certificate,
        "resonance_margin": margin.as_ref().map(fmt_q),
        "summary": summary(&run.certificate),
    });
    if c.trace {
        value["trace"] = serde_json::to_value(&run.trace)?;
    }
    Ok(value)
}
