//! White's winning strategy: blocks of `tau_k` rounds, each steering the ball
//! clear of the resonance planes that become dangerous in that block, and
//! the certificate for the limit point.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::escape::{avoid_hyperplanes, AvoidPolicy, SelectConfig, SubBlockReport};
use crate::game::{run_game, GameParams, GameState, GameTrace, Move, Policy};
use crate::geometry::{min_residual_exceeds, Ball, Hyperplane, Point};
use crate::rational::{self, fmt_q, pow_q, qb, serde_int, serde_intvec, serde_q, Q};
use crate::resonance::ResonanceSequence;
use crate::schedule::{block_schedule, dangerous_hyperplanes, BlockSchedule, StrategyParams};

/// How to proceed when the opening ball violates `rho0 * t_1 < 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Opening {
    /// The driver picks the opening ball: halve `rho0` until it fits.
    #[default]
    Driver,
    /// Black's opening ball is given: White plays concentric warm-up rounds
    /// until the radius fits.
    Adversarial,
}

/// Opening radius after adjustment and the warm-up rounds needed.
pub fn fit_opening(lambda: &ResonanceSequence, rho0: &Q, contraction: &Q, mode: Opening) -> Result<(Q, u64)> {
    if !rho0.is_positive() {
        return Err(Error::InvalidParams("rho0 must be positive".into()));
    }
    if lambda.is_empty() {
        return Err(Error::ScheduleInfeasible("resonance sequence is empty".into()));
    }
    let t1_sq = qb(lambda.t_sq(1));
    let fits = |rho: &Q| rho * rho * &t1_sq < Q::one();
    let mut rho = rho0.clone();
    let mut warmup = 0;
    while !fits(&rho) {
        match mode {
            Opening::Driver => rho /= Q::from_integer(BigInt::from(2)),
            Opening::Adversarial => {
                rho *= contraction;
                warmup += 1;
            }
        }
    }
    Ok((rho, warmup))
}

/// A plane fixed at the start of the block that handles it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandledPlane {
    pub block: usize,
    pub r: usize,
    #[serde(with = "serde_intvec")]
    pub u: Vec<BigInt>,
    #[serde(with = "serde_int")]
    pub a: BigInt,
    /// A second integer close enough to need avoiding too.
    pub neighbour: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockReport {
    pub block: usize,
    pub r_lo: usize,
    pub r_hi: usize,
    pub dangerous: usize,
    pub planes: usize,
    #[serde(with = "serde_q")]
    pub start_radius: Q,
    pub sub_blocks: Vec<SubBlockReport>,
}

/// Everything White tracks across blocks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StrategyState {
    pub params: StrategyParams,
    #[serde(skip)]
    pub lambda: Option<ResonanceSequence>,
    pub schedule: BlockSchedule,
    pub warmup_rounds: u64,
    /// Blocks completed and checked.
    pub completed_blocks: usize,
    pub handled: Vec<HandledPlane>,
    pub blocks: Vec<BlockReport>,
}

impl StrategyState {
    pub fn total_rounds(&self) -> u64 {
        self.warmup_rounds + self.schedule.blocks as u64 * self.params.tau_k
    }

    fn lambda(&self) -> &ResonanceSequence {
        self.lambda.as_ref().expect("resonance sequence attached")
    }
}

/// Both integers adjacent to `u . center` must stay more than `floor` away
/// from every point of the ball.
fn ball_clears_integers(ball: &Ball, u: &[BigInt], floor: &Q) -> std::result::Result<(), ()> {
    let v = rational::dot_int(u, ball.center.coords());
    let below = v.floor().to_integer();
    for a in [below.clone(), below + 1] {
        let h = Hyperplane::new(u.to_vec(), a).map_err(|_| ())?;
        if !min_residual_exceeds(ball, &h, floor) {
            return Err(());
        }
    }
    Ok(())
}

/// The White policy.
pub struct WhiteStrategy {
    state: StrategyState,
    select: SelectConfig,
    active: Option<AvoidPolicy>,
}

pub fn build_strategy(
    lambda: &ResonanceSequence,
    params: &StrategyParams,
    rho0: &Q,
    blocks: usize,
    opening: Opening,
    select: SelectConfig,
) -> Result<(WhiteStrategy, Q)> {
    lambda.validate()?;
    if lambda.m != params.m {
        return Err(Error::InvalidParams("resonance sequence and params disagree on M".into()));
    }
    if lambda.dim() != params.dim {
        return Err(Error::DimensionMismatch {
            expected: params.dim,
            found: lambda.dim(),
        });
    }
    let (fitted, warmup) = fit_opening(lambda, rho0, &params.contraction(), opening)?;
    let schedule = block_schedule(params, lambda, &fitted, blocks)?;
    let opening_radius = match opening {
        Opening::Driver => fitted,
        Opening::Adversarial => rho0.clone(),
    };
    let state = StrategyState {
        params: params.clone(),
        lambda: Some(lambda.clone()),
        schedule,
        warmup_rounds: warmup,
        completed_blocks: 0,
        handled: Vec::new(),
        blocks: Vec::new(),
    };
    Ok((
        WhiteStrategy {
            state,
            select,
            active: None,
        },
        opening_radius,
    ))
}

impl WhiteStrategy {
    pub fn state(&self) -> &StrategyState {
        &self.state
    }

    pub fn into_state(self) -> StrategyState {
        self.state
    }

    fn close_block(&mut self, ball: &Ball) -> Result<()> {
        let Some(mut avoid) = self.active.take() else {
            return Ok(());
        };
        avoid.complete(ball)?;
        let j = self.state.completed_blocks;
        if let Some(report) = self.state.blocks.get_mut(j) {
            report.sub_blocks = avoid.reports().to_vec();
        }
        let (_, hi) = self.state.schedule.block_range(j);
        let lambda = self.state.lambda();
        for r in 1..=hi {
            if ball_clears_integers(ball, lambda.vector(r), &self.state.params.epsilon).is_err() {
                return Err(Error::InvariantViolated { block: j, r });
            }
        }
        self.state.completed_blocks += 1;
        Ok(())
    }

    fn open_block(&mut self, j: usize, ball: &Ball) -> Result<()> {
        let (lo, hi) = self.state.schedule.block_range(j);
        let eps = self.state.params.epsilon.clone();
        let lambda = self.state.lambda().clone();
        let dangerous = dangerous_hyperplanes(ball, &lambda, lo, hi)?;
        if dangerous.len() as u64 >= self.state.params.k {
            return Err(Error::ScheduleInfeasible(format!(
                "block {j}: {} dangerous planes, k = {}",
                dangerous.len(),
                self.state.params.k
            )));
        }
        let mut planes = Vec::new();
        for (h, r) in dangerous.iter().zip(lo + 1..=hi) {
            planes.push(h.clone());
            self.state.handled.push(HandledPlane {
                block: j,
                r,
                u: h.normal.clone(),
                a: h.offset.clone(),
                neighbour: false,
            });
            for a in [&h.offset - 1, &h.offset + 1] {
                let other = Hyperplane::new(h.normal.clone(), a)?;
                if !min_residual_exceeds(ball, &other, &eps) {
                    self.state.handled.push(HandledPlane {
                        block: j,
                        r,
                        u: other.normal.clone(),
                        a: other.offset.clone(),
                        neighbour: true,
                    });
                    planes.push(other);
                }
            }
        }
        let mut select = self.select.clone();
        select.seed = select.seed.wrapping_add((j as u64).wrapping_mul(0x2545_F491_4F6C_DD1D));
        self.state.blocks.push(BlockReport {
            block: j,
            r_lo: lo,
            r_hi: hi,
            dangerous: dangerous.len(),
            planes: planes.len(),
            start_radius: ball.radius.clone(),
            sub_blocks: Vec::new(),
        });
        self.active = Some(
            avoid_hyperplanes(ball, planes, &self.state.params, select)?
                .with_residual_floor(eps)
                .with_label(format!("block j={j}")),
        );
        Ok(())
    }
}

impl Policy for WhiteStrategy {
    fn propose(&mut self, state: &GameState) -> Result<Move> {
        let round = state.round() as u64;
        let warmup = self.state.warmup_rounds;
        if round < warmup {
            return Ok(Move::noted(state.current.center.clone(), "warm-up"));
        }
        let tau = self.state.params.tau_k;
        let offset = round - warmup;
        let j = (offset / tau) as usize;
        if offset % tau == 0 {
            self.close_block(&state.current)?;
            if j < self.state.schedule.blocks {
                self.open_block(j, &state.current)?;
            }
        }
        match self.active.as_mut() {
            Some(avoid) => avoid.propose(state),
            None => Ok(Move::noted(state.current.center.clone(), "hold")),
        }
    }

    fn finish(&mut self, state: &GameState) -> Result<()> {
        if self.active.as_ref().is_some_and(AvoidPolicy::is_done) {
            self.close_block(&state.current)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedPlane {
    pub r: usize,
    #[serde(with = "serde_intvec")]
    pub u: Vec<BigInt>,
    #[serde(with = "serde_int")]
    pub a: BigInt,
    /// Rational lower bound on `min |u.p - a|` over the enclosure.
    #[serde(with = "serde_q")]
    pub residual_lb: Q,
}

/// `||u^(r) . eta|| > epsilon` for every `eta` in the enclosure and every
/// listed `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub eta_center: Point,
    #[serde(with = "serde_q")]
    pub eta_radius: Q,
    #[serde(with = "serde_q")]
    pub epsilon: Q,
    pub handled: Vec<CertifiedPlane>,
    pub params: StrategyParams,
}

impl Certificate {
    pub fn eta(&self) -> &[Q] {
        self.eta_center.coords()
    }

    pub fn min_residual_lb(&self) -> Option<&Q> {
        self.handled.iter().map(|h| &h.residual_lb).min()
    }
}

const CERTIFICATE_SQRT_BITS: u32 = 96;

/// Re-derives every handled `r` from the schedule and checks, on the final
/// ball `B(c, rho)`, that `|u.c - a| - rho |u| > epsilon` for the nearest
/// integer `a` and that the other neighbour is farther still.
pub fn certificate(state: &StrategyState, trace: &GameTrace) -> Result<Certificate> {
    let enclosure = &trace.final_ball;
    let eps = &state.params.epsilon;
    let lambda = state.lambda();
    let c = enclosure.center.coords();
    let rho = &enclosure.radius;
    let mut handled = Vec::new();
    for r in 1..=state.schedule.last_r() {
        let u = lambda.vector(r);
        let v = rational::dot_int(u, c);
        let a = rational::round_half_even(&v);
        let near = (&v - qb(&a)).abs();
        let far = Q::one() - &near;
        let t_sq = lambda.t_sq(r);
        // x > rho sqrt(t_sq)  for  x = residual - eps
        let ok = rational::gt_times_sqrt(&(&near - eps), rho, t_sq) && rational::gt_times_sqrt(&(&far - eps), rho, t_sq);
        if !ok {
            return Err(Error::CertificateFailed { r });
        }
        handled.push(CertifiedPlane {
            r,
            u: u.to_vec(),
            a,
            residual_lb: near - rho * rational::sqrt_upper(t_sq, CERTIFICATE_SQRT_BITS),
        });
    }
    Ok(Certificate {
        eta_center: enclosure.center.clone(),
        eta_radius: rho.clone(),
        epsilon: eps.clone(),
        handled,
        params: state.params.clone(),
    })
}

/// A full game of the strategy against one Black player.
pub struct StrategyRun {
    pub state: StrategyState,
    pub opening: Ball,
    pub trace: Option<GameTrace>,
    pub certificate: Certificate,
}

/// Plays `blocks` blocks from an opening ball centred at `center` with radius
/// `rho0` (adjusted per `opening`) and certifies the result.
pub fn run_strategy(
    lambda: &ResonanceSequence,
    params: &StrategyParams,
    center: Point,
    rho0: &Q,
    blocks: usize,
    opening: Opening,
    select: SelectConfig,
    black: &mut dyn Policy,
) -> Result<StrategyRun> {
    let (mut white, radius) = build_strategy(lambda, params, rho0, blocks, opening, select)?;
    let opening_ball = Ball::new(center, radius)?;
    let rounds = white.state().total_rounds() as usize;
    if rounds == 0 {
        let state = white.into_state();
        return Ok(StrategyRun {
            certificate: Certificate {
                eta_center: opening_ball.center.clone(),
                eta_radius: opening_ball.radius.clone(),
                epsilon: params.epsilon.clone(),
                handled: Vec::new(),
                params: params.clone(),
            },
            state,
            opening: opening_ball,
            trace: None,
        });
    }
    let game: GameParams = params.game_params();
    let trace = run_game(&game, &opening_ball, &mut white, black, rounds)?;
    let state = white.into_state();
    let certificate = certificate(&state, &trace)?;
    Ok(StrategyRun {
        state,
        opening: opening_ball,
        trace: Some(trace),
        certificate,
    })
}

/// `rho0 (alpha beta)^rounds`.
pub fn final_radius(params: &StrategyParams, rho0: &Q, rounds: u64) -> Q {
    rho0 * pow_q(&params.contraction(), rounds)
}

/// One-line summary of a certificate.
pub fn summary(cert: &Certificate) -> String {
    format!(
        "eta radius {}, epsilon {}, {} planes certified",
        fmt_q(&cert.eta_radius),
        fmt_q(&cert.epsilon),
        cert.handled.len()
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::{greedy_black, random_black};
    use crate::game::Concentric;
    use crate::rational::{q, qi};
    use crate::schedule::derive_params;

    fn golden_lambda() -> ResonanceSequence {
        ResonanceSequence::from_sizes(&[1, 3, 13, 55, 233, 987], &qi(3)).unwrap()
    }

    fn golden_params() -> StrategyParams {
        derive_params(&q(1, 4), &q(1, 2), &qi(3), 1).unwrap()
    }

    #[test]
    fn golden_run_certifies() {
        let lambda = golden_lambda();
        let params = golden_params();
        let run = run_strategy(
            &lambda,
            &params,
            Point::new(vec![q(1, 3)]),
            &q(1, 2),
            2,
            Opening::Driver,
            SelectConfig::default(),
            &mut Concentric,
        )
        .unwrap();
        assert_eq!(run.certificate.epsilon, q(5, 1889568));
        assert_eq!(run.certificate.handled.len(), 5);
        assert_eq!(run.state.blocks[1].dangerous, 4);
        assert_eq!(run.state.completed_blocks, 2);
        let trace = run.trace.unwrap();
        assert_eq!(trace.moves.len(), 12);
        assert_eq!(run.certificate.eta_radius, q(1, 2) * pow_q(&q(1, 8), 6));
        for h in &run.certificate.handled {
            assert!(h.residual_lb > run.certificate.epsilon);
        }
    }

    #[test]
    fn adversaries_do_not_break_invariant() {
        let lambda = golden_lambda();
        let params = golden_params();
        for seed in 0..6 {
            let mut black: Box<dyn Policy> = if seed % 2 == 0 {
                Box::new(random_black(seed))
            } else {
                Box::new(greedy_black(lambda.clone()))
            };
            let center = Point::new(vec![q(seed as i64, 7)]);
            run_strategy(&lambda, &params, center, &q(1, 2), 2, Opening::Driver, SelectConfig::default(), black.as_mut())
                .unwrap();
        }
    }

    #[test]
    fn zero_blocks_is_empty() {
        let run = run_strategy(
            &golden_lambda(),
            &golden_params(),
            Point::new(vec![q(1, 3)]),
            &q(1, 2),
            0,
            Opening::Driver,
            SelectConfig::default(),
            &mut Concentric,
        )
        .unwrap();
        assert!(run.trace.is_none());
        assert!(run.certificate.handled.is_empty());
    }

    #[test]
    fn opening_adjustments() {
        let lambda = ResonanceSequence::from_sizes(&[3, 9], &qi(3)).unwrap();
        let (rho, warm) = fit_opening(&lambda, &qi(1), &q(1, 8), Opening::Driver).unwrap();
        assert_eq!((rho, warm), (q(1, 4), 0));
        let (rho, warm) = fit_opening(&lambda, &qi(1), &q(1, 8), Opening::Adversarial).unwrap();
        assert_eq!((rho, warm), (q(1, 8), 1));
    }

    #[test]
    fn do_nothing_white_fails_certificate() {
        let lambda = golden_lambda();
        let params = golden_params();
        let (white, radius) =
            build_strategy(&lambda, &params, &q(1, 2), 2, Opening::Driver, SelectConfig::default()).unwrap();
        let state = white.into_state();
        // u^(1) = 1 and the plane y = 0 passes through the center
        let ball = Ball::new(Point::new(vec![qi(0)]), radius).unwrap();
        let trace = run_game(&params.game_params(), &ball, &mut Concentric, &mut Concentric, 6).unwrap();
        assert!(matches!(certificate(&state, &trace), Err(Error::CertificateFailed { r: 1 })));
    }
}
