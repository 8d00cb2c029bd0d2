//! The (alpha, beta)-game engine.
//!
//! Black opens with a ball; White answers with a ball of radius `alpha` times
//! the current one nested inside it; Black answers with `beta` times White's,
//! and so on. Policies only propose centers: radii are forced by the engine
//! and every proposal is checked for closed-ball containment. An illegal
//! proposal aborts the game.

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ball_contains, Ball, Point};
use crate::rational::{fmt_q, pow_q, q, serde_q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    #[serde(rename = "W")]
    White,
    #[serde(rename = "B")]
    Black,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameParams {
    #[serde(with = "serde_q")]
    pub alpha: Q,
    #[serde(with = "serde_q")]
    pub beta: Q,
    pub dim: usize,
}

impl GameParams {
    pub fn new(alpha: Q, beta: Q, dim: usize) -> Result<Self> {
        if !alpha.is_positive() || alpha >= q(1, 2) {
            return Err(Error::InvalidParams(format!(
                "alpha must lie in (0, 1/2), got {}",
                fmt_q(&alpha)
            )));
        }
        if !beta.is_positive() || beta >= Q::one() {
            return Err(Error::InvalidParams(format!(
                "beta must lie in (0, 1), got {}",
                fmt_q(&beta)
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidParams("dimension must be >= 1".into()));
        }
        Ok(GameParams { alpha, beta, dim })
    }

    /// `gamma = 1 + alpha beta - 2 alpha`.
    pub fn gamma(&self) -> Q {
        Q::one() + &self.alpha * &self.beta - q(2, 1) * &self.alpha
    }

    pub fn contraction(&self) -> Q {
        &self.alpha * &self.beta
    }

    pub fn factor(&self, player: Player) -> &Q {
        match player {
            Player::White => &self.alpha,
            Player::Black => &self.beta,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GameState {
    pub params: GameParams,
    /// The ball the player to move must nest inside.
    pub current: Ball,
    pub turn: Player,
    /// Zero-based: White moves at even indices, Black at odd ones.
    pub move_index: usize,
}

impl GameState {
    /// Completed (White, Black) rounds before this move.
    pub fn round(&self) -> usize {
        self.move_index / 2
    }

    /// Radius the mover's ball will receive.
    pub fn reply_radius(&self) -> Q {
        self.params.factor(self.turn) * &self.current.radius
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Move {
    pub center: Point,
    pub note: Option<String>,
}

impl Move {
    pub fn plain(center: Point) -> Self {
        Move { center, note: None }
    }

    pub fn noted(center: Point, note: impl Into<String>) -> Self {
        Move {
            center,
            note: Some(note.into()),
        }
    }
}

/// A player: proposes the center of its next ball.
pub trait Policy {
    fn propose(&mut self, state: &GameState) -> Result<Move>;

    /// Called once after the last move with the final state, so policies can
    /// check postconditions that mature only after the opponent's reply.
    fn finish(&mut self, _state: &GameState) -> Result<()> {
        Ok(())
    }
}

/// Keeps the center fixed.
#[derive(Clone, Debug, Default)]
pub struct Concentric;

impl Policy for Concentric {
    fn propose(&mut self, state: &GameState) -> Result<Move> {
        Ok(Move::plain(state.current.center.clone()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub player: Player,
    pub center: Point,
    #[serde(with = "serde_q")]
    pub radius: Q,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl MoveRecord {
    pub fn ball(&self) -> Ball {
        Ball {
            center: self.center.clone(),
            radius: self.radius.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameTrace {
    pub params: GameParams,
    pub initial: Ball,
    pub moves: Vec<MoveRecord>,
    #[serde(rename = "final")]
    pub final_ball: Ball,
}

impl GameTrace {
    /// Every ball in play order, starting with Black's opening ball.
    pub fn balls(&self) -> Vec<Ball> {
        std::iter::once(self.initial.clone())
            .chain(self.moves.iter().map(MoveRecord::ball))
            .collect()
    }

    pub fn centers_of(&self, player: Player) -> Vec<Point> {
        self.moves
            .iter()
            .filter(|m| m.player == player)
            .map(|m| m.center.clone())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

/// Would `Ball(center, factor * radius)` nest inside the current ball?
pub fn legal_reply(state: &GameState, center: &Point) -> bool {
    if center.dim() != state.current.dim() {
        return false;
    }
    let candidate = Ball {
        center: center.clone(),
        radius: state.reply_radius(),
    };
    ball_contains(&state.current, &candidate).unwrap_or(false)
}

/// Plays `rounds` (White, Black) rounds from Black's opening ball.
pub fn run_game(
    params: &GameParams,
    initial: &Ball,
    white: &mut dyn Policy,
    black: &mut dyn Policy,
    rounds: usize,
) -> Result<GameTrace> {
    if rounds == 0 {
        return Err(Error::InvalidRounds);
    }
    if initial.dim() != params.dim {
        return Err(Error::DimensionMismatch {
            expected: params.dim,
            found: initial.dim(),
        });
    }
    if !initial.radius.is_positive() {
        return Err(Error::InvalidParams("initial radius must be positive".into()));
    }
    let mut trace = GameTrace {
        params: params.clone(),
        initial: initial.clone(),
        moves: Vec::with_capacity(2 * rounds),
        final_ball: initial.clone(),
    };
    let mut state = GameState {
        params: params.clone(),
        current: initial.clone(),
        turn: Player::White,
        move_index: 0,
    };
    for _ in 0..2 * rounds {
        let policy: &mut dyn Policy = match state.turn {
            Player::White => &mut *white,
            Player::Black => &mut *black,
        };
        let proposal = policy
            .propose(&state)
            .map_err(|e| attach_trace(e, &trace))?;
        if !legal_reply(&state, &proposal.center) {
            return Err(Error::IllegalMove {
                player: state.turn,
                move_index: state.move_index,
            });
        }
        let radius = state.reply_radius();
        trace.moves.push(MoveRecord {
            player: state.turn,
            center: proposal.center.clone(),
            radius: radius.clone(),
            note: proposal.note,
        });
        state.current = Ball {
            center: proposal.center,
            radius,
        };
        state.move_index += 1;
        state.turn = match state.turn {
            Player::White => Player::Black,
            Player::Black => Player::White,
        };
    }
    trace.final_ball = state.current.clone();
    white.finish(&state).map_err(|e| attach_trace(e, &trace))?;
    black.finish(&state).map_err(|e| attach_trace(e, &trace))?;
    Ok(trace)
}

fn attach_trace(err: Error, trace: &GameTrace) -> Error {
    match err {
        Error::EscapeAssertionFailed { detail, trace: None } => Error::EscapeAssertionFailed {
            detail,
            trace: Some(Box::new(trace.clone())),
        },
        other => other,
    }
}

/// The last ball of the trace: it encloses the limit point, and its center is
/// the reported `eta`.
pub fn limit_enclosure(trace: &GameTrace) -> Ball {
    trace.final_ball.clone()
}

/// Expected radius after `rounds` full rounds: `rho0 (alpha beta)^rounds`.
pub fn radius_after(params: &GameParams, rho0: &Q, rounds: u64) -> Q {
    rho0 * pow_q(&params.contraction(), rounds)
}

/// Checks the radius law and nesting of a trace; returns a description of the
/// first violation.
pub fn check_trace(trace: &GameTrace) -> std::result::Result<(), String> {
    let mut prev = trace.initial.clone();
    for (i, m) in trace.moves.iter().enumerate() {
        let expected_player = if i % 2 == 0 { Player::White } else { Player::Black };
        if m.player != expected_player {
            return Err(format!("move {i}: wrong player"));
        }
        let expected_radius = trace.params.factor(m.player) * &prev.radius;
        if m.radius != expected_radius {
            return Err(format!("move {i}: radius {} != {}", fmt_q(&m.radius), fmt_q(&expected_radius)));
        }
        let ball = m.ball();
        if !ball_contains(&prev, &ball).map_err(|e| e.to_string())? {
            return Err(format!("move {i}: ball not nested"));
        }
        if i % 2 == 1 {
            let rounds = (i / 2 + 1) as u64;
            if ball.radius != radius_after(&trace.params, &trace.initial.radius, rounds) {
                return Err(format!("move {i}: radius law violated"));
            }
        }
        prev = ball;
    }
    if prev != trace.final_ball {
        return Err("final ball differs from last move".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    fn params_1d() -> GameParams {
        GameParams::new(q(1, 4), q(1, 2), 1).unwrap()
    }

    fn state(turn: Player) -> GameState {
        GameState {
            params: params_1d(),
            current: Ball::new(Point(vec![qi(0)]), qi(1)).unwrap(),
            turn,
            move_index: 0,
        }
    }

    #[test]
    fn params_validation() {
        assert!(GameParams::new(q(1, 2), q(1, 2), 1).is_err());
        assert!(GameParams::new(qi(0), q(1, 2), 1).is_err());
        assert!(GameParams::new(q(1, 4), qi(1), 1).is_err());
        assert!(GameParams::new(q(1, 4), q(1, 2), 0).is_err());
        assert_eq!(params_1d().gamma(), q(5, 8));
        assert_eq!(GameParams::new(q(1, 3), q(1, 3), 2).unwrap().gamma(), q(4, 9));
    }

    #[test]
    fn legal_reply_examples() {
        let s = state(Player::White);
        assert!(legal_reply(&s, &Point(vec![q(3, 4)])));
        assert!(!legal_reply(&s, &Point(vec![q(4, 5)])));
        let s = state(Player::Black);
        assert!(legal_reply(&s, &Point(vec![qi(0)])));
        assert!(!legal_reply(&s, &Point(vec![qi(0), qi(0)])));
    }

    #[test]
    fn concentric_game_radius_law() {
        let initial = Ball::new(Point(vec![q(1, 3)]), qi(1)).unwrap();
        let trace = run_game(&params_1d(), &initial, &mut Concentric, &mut Concentric, 3).unwrap();
        assert_eq!(trace.moves.len(), 6);
        assert_eq!(trace.final_ball.radius, q(1, 512));
        assert_eq!(trace.final_ball.center, initial.center);
        assert_eq!(limit_enclosure(&trace), Ball::new(Point(vec![q(1, 3)]), q(1, 512)).unwrap());
        check_trace(&trace).unwrap();
    }

    #[test]
    fn zero_rounds_rejected() {
        let initial = Ball::new(Point(vec![qi(0)]), qi(1)).unwrap();
        assert!(matches!(
            run_game(&params_1d(), &initial, &mut Concentric, &mut Concentric, 0),
            Err(Error::InvalidRounds)
        ));
    }

    struct Jump(Q);
    impl Policy for Jump {
        fn propose(&mut self, state: &GameState) -> Result<Move> {
            Ok(Move::plain(state.current.center.offset(&[Q::one()], &self.0)))
        }
    }

    #[test]
    fn illegal_move_aborts() {
        let initial = Ball::new(Point(vec![qi(0)]), qi(1)).unwrap();
        let err = run_game(&params_1d(), &initial, &mut Jump(q(4, 5)), &mut Concentric, 2).unwrap_err();
        assert!(matches!(
            err,
            Error::IllegalMove {
                player: Player::White,
                move_index: 0
            }
        ));
    }

    #[test]
    fn trace_json_shape() {
        let initial = Ball::new(Point(vec![qi(0)]), qi(1)).unwrap();
        let trace = run_game(&params_1d(), &initial, &mut Jump(q(3, 4)), &mut Concentric, 1).unwrap();
        let json: serde_json::Value = serde_json::from_str(&trace.to_json()).unwrap();
        assert_eq!(json["params"]["alpha"], "1/4");
        assert_eq!(json["moves"][0]["player"], "W");
        assert_eq!(json["moves"][0]["center"][0], "3/4");
        assert_eq!(json["moves"][0]["radius"], "1/4");
        assert_eq!(json["moves"][1]["player"], "B");
        assert_eq!(json["final"]["radius"], "1/8");
        let back: GameTrace = serde_json::from_str(&trace.to_json()).unwrap();
        assert_eq!(back, trace);
    }
}
