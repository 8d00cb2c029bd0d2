//! Black players used to stress White's strategy.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Concentric, GameState, Move, Policy};
use crate::geometry::{rational_unit_direction, Hyperplane, Point};
use crate::rational::{self, qb, Q};
use crate::resonance::ResonanceSequence;

/// Free room for the mover's center: `(1 - f) * rho`.
fn reach(state: &GameState) -> Q {
    &state.current.radius - state.reply_radius()
}

/// Uniform random legal centers on a dyadic grid, by rejection sampling.
pub struct RandomBlack {
    rng: ChaCha8Rng,
    bits: u32,
}

pub fn random_black(seed: u64) -> RandomBlack {
    RandomBlack {
        rng: ChaCha8Rng::seed_from_u64(seed),
        bits: 16,
    }
}

impl RandomBlack {
    /// Grid resolution `2^-bits` of the unit offset.
    pub fn with_grid_bits(mut self, bits: u32) -> Self {
        self.bits = bits.clamp(1, 62);
        self
    }
}

impl Policy for RandomBlack {
    fn propose(&mut self, state: &GameState) -> Result<Move> {
        let n = state.current.dim();
        let scale: i64 = 1 << self.bits;
        let limit = (scale as i128) * (scale as i128);
        let offset: Vec<i64> = loop {
            let v: Vec<i64> = (0..n).map(|_| self.rng.random_range(-scale..=scale)).collect();
            let len_sq: i128 = v.iter().map(|&c| (c as i128) * (c as i128)).sum();
            if len_sq <= limit {
                break v;
            }
        };
        let unit = Q::new(BigInt::one(), BigInt::from(scale));
        let step = reach(state) * unit;
        let direction: Vec<Q> = offset.iter().map(|&c| Q::from_integer(BigInt::from(c))).collect();
        Ok(Move::plain(state.current.center.offset(&direction, &step)))
    }
}

/// Which planes a greedy Black chases.
#[derive(Clone, Debug)]
pub enum GreedyTargets {
    /// Nearest-integer plane of every `u^(r)`.
    Resonances(ResonanceSequence),
    Planes(Vec<Hyperplane>),
}

/// Moves towards the nearest target plane meeting White's ball: onto it when
/// within reach, otherwise a maximal step towards it. Concentric when no
/// target meets the ball.
pub struct GreedyBlack {
    targets: GreedyTargets,
    tol: Q,
}

pub fn greedy_black(lambda: ResonanceSequence) -> GreedyBlack {
    GreedyBlack {
        targets: GreedyTargets::Resonances(lambda),
        tol: Q::new(BigInt::one(), BigInt::one() << 24),
    }
}

pub fn greedy_black_planes(planes: Vec<Hyperplane>) -> GreedyBlack {
    GreedyBlack {
        targets: GreedyTargets::Planes(planes),
        tol: Q::new(BigInt::one(), BigInt::one() << 24),
    }
}

impl GreedyBlack {
    fn candidates(&self, state: &GameState) -> Vec<Hyperplane> {
        match &self.targets {
            GreedyTargets::Planes(planes) => planes.clone(),
            GreedyTargets::Resonances(lambda) => (1..=lambda.len())
                .filter_map(|r| {
                    let u = lambda.vector(r).to_vec();
                    let a = rational::round_half_even(&rational::dot_int(&u, state.current.center.coords()));
                    Hyperplane::new(u, a).ok()
                })
                .collect(),
        }
    }
}

impl Policy for GreedyBlack {
    fn propose(&mut self, state: &GameState) -> Result<Move> {
        let ball = &state.current;
        // squared distance e^2/|u|^2 of each plane meeting the ball
        let nearest = self
            .candidates(state)
            .into_iter()
            .filter(|h| h.dim() == ball.dim())
            .filter_map(|h| {
                let e = h.signed_residual(&ball.center);
                let u_sq = qb(&h.norm_sq());
                let d_sq = &e * &e / &u_sq;
                (d_sq <= &ball.radius * &ball.radius).then_some((d_sq, e, u_sq, h))
            })
            .min_by(|a, b| a.0.cmp(&b.0));
        let Some((d_sq, e, u_sq, h)) = nearest else {
            return Concentric.propose(state);
        };
        let step = reach(state);
        if d_sq <= &step * &step {
            // orthogonal projection onto the plane
            let scale = -(&e / &u_sq);
            let center = ball.center.offset(&h.normal_q(), &scale);
            return Ok(Move::noted(center, format!("onto {}", h.describe())));
        }
        let towards: Vec<Q> = h
            .normal
            .iter()
            .map(|c| if e.is_positive() { -qb(c) } else { qb(c) })
            .collect();
        let d = rational_unit_direction(&towards, &self.tol)?;
        Ok(Move::noted(
            ball.center.offset(&d, &step),
            format!("towards {}", h.describe()),
        ))
    }
}

/// Plays the listed centers, then stays concentric.
pub struct ScriptedBlack {
    centers: std::vec::IntoIter<Point>,
}

pub fn scripted_black(centers: Vec<Point>) -> ScriptedBlack {
    ScriptedBlack {
        centers: centers.into_iter(),
    }
}

impl Policy for ScriptedBlack {
    fn propose(&mut self, state: &GameState) -> Result<Move> {
        match self.centers.next() {
            Some(center) => Ok(Move::plain(center)),
            None => Concentric.propose(state),
        }
    }
}

/// Maximal step against a fixed unit direction: the worst reply to White
/// escaping along it.
pub struct RetreatBlack {
    direction: Vec<Q>,
}

pub fn retreat_black(direction: Vec<Q>) -> Result<RetreatBlack> {
    if rational::norm_sq(&direction) != Q::one() {
        return Err(Error::InvalidParams("retreat direction must be a unit vector".into()));
    }
    Ok(RetreatBlack { direction })
}

impl Policy for RetreatBlack {
    fn propose(&mut self, state: &GameState) -> Result<Move> {
        let step = -reach(state);
        Ok(Move::plain(state.current.center.offset(&self.direction, &step)))
    }
}

/// Adversary selector for configs and the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdversaryKind {
    Concentric,
    Random,
    Greedy,
}

impl AdversaryKind {
    pub const ALL: [AdversaryKind; 3] = [AdversaryKind::Concentric, AdversaryKind::Random, AdversaryKind::Greedy];

    pub fn name(self) -> &'static str {
        match self {
            AdversaryKind::Concentric => "concentric",
            AdversaryKind::Random => "random",
            AdversaryKind::Greedy => "greedy",
        }
    }

    pub fn build(self, seed: u64, lambda: &ResonanceSequence) -> Box<dyn Policy + Send> {
        match self {
            AdversaryKind::Concentric => Box::new(Concentric),
            AdversaryKind::Random => Box::new(random_black(seed)),
            AdversaryKind::Greedy => Box::new(greedy_black(lambda.clone())),
        }
    }
}

impl FromStr for AdversaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AdversaryKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown adversary {s:?} (concentric, random, greedy)")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::escape::{escape_policy, escape_target};
    use crate::game::{check_trace, run_game, GameParams, Player};
    use crate::geometry::Ball;
    use crate::rational::{q, qi};

    fn gp(n: usize) -> GameParams {
        GameParams::new(q(1, 4), q(1, 2), n).unwrap()
    }

    fn unit_ball(n: usize) -> Ball {
        Ball::new(Point::origin(n), qi(1)).unwrap()
    }

    #[test]
    fn random_is_deterministic_and_legal() {
        for n in 1..=3 {
            let run = |seed| {
                let mut w = random_black(seed + 100);
                let mut b = random_black(seed);
                run_game(&gp(n), &unit_ball(n), &mut w, &mut b, 20).unwrap()
            };
            let a = run(7);
            assert_eq!(a.to_json(), run(7).to_json());
            assert_ne!(a.to_json(), run(8).to_json());
            check_trace(&a).unwrap();
        }
    }

    #[test]
    fn greedy_projects_and_steps() {
        let plane = Hyperplane::from_i64(&[1], 0).unwrap();
        let mut b = greedy_black_planes(vec![plane.clone()]);
        let mut w = crate::game::Concentric;
        // White ball centered at 1/10 with radius 1/4: plane within reach 1/8
        let start = Ball::new(Point::new(vec![q(1, 10)]), qi(1)).unwrap();
        let trace = run_game(&gp(1), &start, &mut w, &mut b, 1).unwrap();
        assert_eq!(trace.final_ball.center, Point::new(vec![qi(0)]));
        // far plane: full step of 1/8 towards it
        let start = Ball::new(Point::new(vec![q(2, 10)]), qi(1)).unwrap();
        let trace = run_game(&gp(1), &start, &mut crate::game::Concentric, &mut greedy_black_planes(vec![plane]), 1).unwrap();
        assert_eq!(trace.final_ball.center, Point::new(vec![q(2, 10) - q(1, 8)]));
        // plane outside White's ball: concentric
        let far = Hyperplane::from_i64(&[1], 5).unwrap();
        let trace = run_game(&gp(1), &unit_ball(1), &mut crate::game::Concentric, &mut greedy_black_planes(vec![far]), 1).unwrap();
        assert_eq!(trace.final_ball.center, Point::new(vec![qi(0)]));
    }

    #[test]
    fn scripted_replay_and_illegal_move() {
        let mut w = random_black(1);
        let mut b = random_black(2);
        let original = run_game(&gp(2), &unit_ball(2), &mut w, &mut b, 5).unwrap();
        let replay = |player| scripted_black(original.centers_of(player));
        let again = run_game(&gp(2), &unit_ball(2), &mut replay(Player::White), &mut replay(Player::Black), 5).unwrap();
        assert_eq!(original.to_json(), again.to_json());

        let mut centers = vec![Point::origin(1), Point::origin(1), Point::new(vec![qi(5)])];
        centers.truncate(3);
        let err = run_game(&gp(1), &unit_ball(1), &mut crate::game::Concentric, &mut scripted_black(centers), 4).unwrap_err();
        assert!(matches!(
            err,
            Error::IllegalMove {
                player: Player::Black,
                move_index: 5
            }
        ));
        let trace = run_game(&gp(1), &unit_ball(1), &mut crate::game::Concentric, &mut scripted_black(vec![]), 3).unwrap();
        assert_eq!(trace.final_ball.center, Point::origin(1));
    }

    #[test]
    fn retreat_gives_exact_gamma_drift() {
        let params = gp(1);
        let ball = unit_ball(1);
        let target = escape_target(&ball, vec![qi(1)], &params.gamma()).unwrap();
        let mut w = escape_policy(target, 1);
        let mut b = retreat_black(vec![qi(1)]).unwrap();
        let trace = run_game(&params, &ball, &mut w, &mut b, 1).unwrap();
        assert_eq!(trace.moves[1].center, Point::new(vec![q(5, 8)]));
        assert_eq!(trace.final_ball.center.coords()[0], params.gamma());
    }

    #[test]
    fn adversary_names() {
        for kind in AdversaryKind::ALL {
            assert_eq!(kind.name().parse::<AdversaryKind>().unwrap(), kind);
        }
        assert!("nope".parse::<AdversaryKind>().is_err());
    }
}
