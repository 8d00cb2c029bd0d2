//! White's geometric engines: escort points and cap selection, the
//! `t`-round escape into a halfspace, and multi-plane avoidance over a block
//! of `tau_k` rounds.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GameState, Move, Policy};
use crate::geometry::{
    ball_plane_distance_exceeds, halfspace_contains_ball, min_residual_exceeds, rational_unit_direction, Ball,
    Halfspace, Hyperplane, Point,
};
use crate::par::{self, Execution};
use crate::rational::{self, dot, fmt_q, norm_sq, pow_q, q, qb, serde_qvec, Q};
use crate::schedule::StrategyParams;

/// Default rationalization tolerance for directions, `2^-30`.
pub fn default_tolerance() -> Q {
    Q::new(BigInt::one(), BigInt::one() << 30)
}

/// A point of the sphere `S` bounding `ball`, opposite a hyperplane.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscortPoint {
    pub hyperplane_index: usize,
    /// Exact rational unit vector from the center towards `xi`.
    #[serde(with = "serde_qvec")]
    pub direction: Vec<Q>,
    pub xi: Point,
}

/// `xi = center + radius * d` with `d` the unit normal pointing away from the
/// plane. For a plane through the center, `d` follows the normal with its
/// first nonzero entry made positive.
pub fn escort_point(h: &Hyperplane, ball: &Ball, tol: &Q) -> Result<EscortPoint> {
    if h.dim() != ball.dim() {
        return Err(Error::DimensionMismatch {
            expected: ball.dim(),
            found: h.dim(),
        });
    }
    let e = h.signed_residual(&ball.center);
    let lead_negative = h
        .normal
        .iter()
        .find(|c| !c.is_zero())
        .is_some_and(|c| c.is_negative());
    let flip = if e.is_zero() { lead_negative } else { e.is_negative() };
    let v: Vec<Q> = h
        .normal
        .iter()
        .map(|c| if flip { -qb(c) } else { qb(c) })
        .collect();
    let direction = rational_unit_direction(&v, tol)?;
    let xi = ball.center.offset(&direction, &ball.radius);
    Ok(EscortPoint {
        hyperplane_index: 0,
        direction,
        xi,
    })
}

/// Is `min_{w in C} v.w + shift > dist * |v|` for the solid cap
/// `C = {|w| <= radius, w.x >= height}` (unit `x`, `0 < height <= radius`)?
fn cap_clearance(v: &[Q], v_sq: &Q, x: &[Q], radius: &Q, height: &Q, shift: &Q, dist: &Q) -> bool {
    let c = dot(v, x);
    let ball_minimizer_feasible = !c.is_positive() && &c * &c * radius * radius >= height * height * v_sq;
    if ball_minimizer_feasible {
        // shift - radius |v| > dist |v|
        let total = radius + dist;
        shift.is_positive() && shift * shift > &total * &total * v_sq
    } else {
        // a - dist sqrt(V) > sqrt(P), a = height c + shift
        let a = height * &c + shift;
        let p = (radius * radius - height * height) * (v_sq - &c * &c);
        if dist.is_zero() {
            return a.is_positive() && &a * &a > p;
        }
        let d2v = dist * dist * v_sq;
        if !a.is_positive() || &a * &a <= d2v {
            return false;
        }
        let l = &a * &a + &d2v - &p;
        l.is_positive() && &l * &l > Q::from_integer(BigInt::from(4)) * &a * &a * &d2v
    }
}

/// Clearance a plane must keep from the escape cap.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Clearance {
    /// Euclidean distance.
    pub distance: Q,
    /// Residual `|u.p - a|`.
    pub residual: Q,
}

/// Does `h` stay clear of the solid cap `ball ∩ {(z - center).x >= height}`
/// by the given clearance?
pub fn plane_clears_cap(ball: &Ball, x: &[Q], height: &Q, h: &Hyperplane, clearance: &Clearance) -> bool {
    let u = h.normal_q();
    let neg_u: Vec<Q> = u.iter().map(|c| -c).collect();
    let u_sq = qb(&h.norm_sq());
    let e = h.signed_residual(&ball.center);
    let side = |v: &[Q], shift: &Q| {
        cap_clearance(v, &u_sq, x, &ball.radius, height, shift, &clearance.distance)
            && cap_clearance(v, &u_sq, x, &ball.radius, height, &(shift - &clearance.residual), &Q::zero())
    };
    side(&u, &e) || side(&neg_u, &-e)
}

/// Candidate search settings for [`select_cap`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectConfig {
    /// Low-discrepancy and random candidates in the first round each.
    pub budget: usize,
    /// Doubling stops once the budget would exceed this.
    pub max_budget: usize,
    pub seed: u64,
    pub tol: Q,
    pub exec: Execution,
}

impl Default for SelectConfig {
    fn default() -> Self {
        SelectConfig {
            budget: 32,
            max_budget: 4096,
            seed: 0,
            tol: default_tolerance(),
            exec: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapSelection {
    #[serde(with = "serde_qvec")]
    pub direction: Vec<Q>,
    /// Indices of planes that verifiably miss the cap.
    pub escaped: Vec<usize>,
    pub count: usize,
    /// `ceil(omega_lb * k)`.
    pub needed: usize,
    pub candidates: usize,
}

impl CapSelection {
    pub fn meets_bound(&self) -> bool {
        self.count >= self.needed
    }
}

/// `ceil(omega_lb * k)`.
pub fn needed_escapes(params: &StrategyParams, k: usize) -> usize {
    rational::ceil_int(&(&params.omega_lb * Q::from_integer(BigInt::from(k))))
        .try_into()
        .expect("small count")
}

fn halton(index: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const PRIMES: [usize; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn low_discrepancy(n: usize, count: usize) -> Vec<Vec<f64>> {
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|i| {
                let phi = std::f64::consts::TAU * (i as f64 + 0.5) / count as f64;
                vec![phi.cos(), phi.sin()]
            })
            .collect(),
        _ => (1..=count)
            .map(|i| {
                // Halton point of the cube, pushed through a Box-Muller pair
                // per two coordinates so the direction is spread over S
                let u: Vec<f64> = (0..n + 1)
                    .map(|d| halton(i, PRIMES[d % PRIMES.len()]).clamp(1e-12, 1.0 - 1e-12))
                    .collect();
                (0..n)
                    .map(|d| {
                        let (a, b) = (u[d], u[(d + 1) % (n + 1)]);
                        (-2.0 * a.ln()).sqrt() * (std::f64::consts::TAU * b).cos()
                    })
                    .collect()
            })
            .collect(),
    }
}

fn random_directions(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..n).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect()
}

fn rationalize(v: &[f64], tol: &Q) -> Option<Vec<Q>> {
    if v.iter().any(|c| !c.is_finite()) || v.iter().all(|&c| c == 0.0) {
        return None;
    }
    let vq: Vec<Q> = v.iter().map(|&c| Q::from_float(c).expect("finite")).collect();
    rational_unit_direction(&vq, tol).ok()
}

struct Scored {
    direction: Vec<Q>,
    escaped: Vec<usize>,
}

fn better(a: &Scored, b: &Scored) -> bool {
    a.escaped.len() > b.escaped.len() || (a.escaped.len() == b.escaped.len() && a.direction < b.direction)
}

/// Searches cap directions for the one missing the most planes, each plane
/// clearing the cap by its own clearance. Returns the best found, whether or
/// not it reaches `ceil(omega_lb k)`.
pub fn select_cap_with_clearance(
    ball: &Ball,
    planes: &[Hyperplane],
    clearances: &[Clearance],
    params: &StrategyParams,
    config: &SelectConfig,
) -> Result<CapSelection> {
    if planes.is_empty() {
        return Err(Error::InvalidParams("select_cap needs at least one plane".into()));
    }
    if let Some(h) = planes.iter().find(|h| h.dim() != ball.dim()) {
        return Err(Error::DimensionMismatch {
            expected: ball.dim(),
            found: h.dim(),
        });
    }
    let n = ball.dim();
    let height = &params.gamma * &ball.radius / Q::from_integer(BigInt::from(2));
    let needed = needed_escapes(params, planes.len());
    let score = |direction: &Vec<Q>| Scored {
        direction: direction.clone(),
        escaped: planes
            .iter()
            .zip(clearances)
            .enumerate()
            .filter(|(_, (h, c))| plane_clears_cap(ball, direction, &height, h, c))
            .map(|(i, _)| i)
            .collect(),
    };

    let mut candidates: Vec<Vec<Q>> = Vec::new();
    for h in planes {
        candidates.push(escort_point(h, ball, &config.tol)?.direction);
    }
    let mut best: Option<Scored> = None;
    let mut tried = 0;
    let mut budget = config.budget.max(1);
    let mut round = 0u64;
    loop {
        if round > 0 || n > 1 {
            let fresh: Vec<Vec<f64>> = if n == 1 {
                Vec::new()
            } else {
                let mut v = low_discrepancy(n, budget);
                v.extend(random_directions(n, budget, config.seed.wrapping_add(round)));
                v
            };
            candidates.extend(fresh.iter().filter_map(|v| rationalize(v, &config.tol)));
        }
        if n == 1 {
            candidates.extend([vec![Q::one()], vec![-Q::one()]]);
        }
        let scored = par::map_slice(config.exec, &candidates, score);
        tried += candidates.len();
        candidates.clear();
        for s in scored {
            if best.as_ref().is_none_or(|b| better(&s, b)) {
                best = Some(s);
            }
        }
        let current = best.as_ref().expect("at least one candidate");
        if current.escaped.len() >= needed || n == 1 || budget * 2 > config.max_budget {
            break;
        }
        budget *= 2;
        round += 1;
    }
    let best = best.expect("at least one candidate");
    Ok(CapSelection {
        count: best.escaped.len(),
        direction: best.direction,
        escaped: best.escaped,
        needed,
        candidates: tried,
    })
}

/// Cap direction `x` whose cap `ball ∩ {(z - center).x >= gamma rho/2}` is
/// missed by at least `ceil(omega_lb k)` of the `k` planes.
pub fn select_cap(ball: &Ball, planes: &[Hyperplane], params: &StrategyParams, config: &SelectConfig) -> Result<CapSelection> {
    let clearances = vec![Clearance::default(); planes.len()];
    let selection = select_cap_with_clearance(ball, planes, &clearances, params, config)?;
    if !selection.meets_bound() {
        return Err(Error::SelectionExhausted {
            candidates: selection.candidates,
            best: selection.count,
            needed: selection.needed,
        });
    }
    Ok(selection)
}

/// The halfspace `{(z - center).x >= gamma rho / 2}` White escapes into.
pub fn escape_target(ball: &Ball, direction: Vec<Q>, gamma: &Q) -> Result<Halfspace> {
    Halfspace::new(direction, gamma * &ball.radius / Q::from_integer(BigInt::from(2)), ball.center.clone())
}

/// White's maximal shift `(1 - alpha) rho_B` along `direction`.
fn shifted_center(state: &GameState, direction: &[Q]) -> Point {
    let scale = (Q::one() - &state.params.alpha) * &state.current.radius;
    state.current.center.offset(direction, &scale)
}

fn describe_direction(d: &[Q]) -> String {
    let parts: Vec<String> = d.iter().map(|c| format!("{:.6}", rational::to_f64(c))).collect();
    format!("({})", parts.join(","))
}

/// Plays `rounds` maximal shifts towards `target.direction`, then stays
/// concentric. The containment `B ⊆ target` is asserted once the last
/// shifted round is answered.
pub struct EscapePolicy {
    target: Halfspace,
    rounds: u64,
    played: u64,
    checked: bool,
}

pub fn escape_policy(target: Halfspace, t_escape: u64) -> EscapePolicy {
    EscapePolicy {
        target,
        rounds: t_escape,
        played: 0,
        checked: false,
    }
}

impl EscapePolicy {
    fn check(&mut self, ball: &Ball) -> Result<()> {
        if self.checked || self.played < self.rounds {
            return Ok(());
        }
        self.checked = true;
        if !halfspace_contains_ball(&self.target, ball) {
            return Err(Error::escape(format!(
                "ball of radius {} not inside halfspace at height {}",
                fmt_q(&ball.radius),
                fmt_q(&self.target.height(&ball.center))
            )));
        }
        Ok(())
    }
}

impl Policy for EscapePolicy {
    fn propose(&mut self, state: &GameState) -> Result<Move> {
        self.check(&state.current)?;
        if self.played >= self.rounds {
            return Ok(Move::noted(state.current.center.clone(), "hold"));
        }
        self.played += 1;
        Ok(Move::noted(
            shifted_center(state, &self.target.direction),
            format!(
                "escape round {}/{} dir={}",
                self.played,
                self.rounds,
                describe_direction(&self.target.direction)
            ),
        ))
    }

    fn finish(&mut self, state: &GameState) -> Result<()> {
        self.check(&state.current)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubBlockReport {
    pub sub_block: u64,
    pub threatening: Vec<usize>,
    pub escaped: Vec<usize>,
    pub needed: usize,
    #[serde(with = "serde_qvec")]
    pub direction: Vec<Q>,
}

struct ActiveEscape {
    target: Option<Halfspace>,
    direction: Vec<Q>,
    rounds_left: u64,
    note: String,
}

/// Spends `tau_k` rounds steering clear of a list of planes: every `t_escape`
/// rounds it picks a cap missed by many of the planes that still come within
/// the required clearance of the current ball, and escapes into it.
///
/// Postcondition after `tau_k` rounds: every point of the ball is at distance
/// `> rho_final * gamma / 2` from every plane, and its residual exceeds the
/// configured floor.
pub struct AvoidPolicy {
    params: StrategyParams,
    planes: Vec<Hyperplane>,
    residual_floor: Q,
    config: SelectConfig,
    label: String,
    start: Ball,
    distance: Q,
    played: u64,
    sub_block: u64,
    active: Option<ActiveEscape>,
    reports: Vec<SubBlockReport>,
    completed: bool,
}

/// Avoidance policy for the block starting at `ball`.
pub fn avoid_hyperplanes(ball: &Ball, planes: Vec<Hyperplane>, params: &StrategyParams, config: SelectConfig) -> Result<AvoidPolicy> {
    if let Some(h) = planes.iter().find(|h| h.dim() != ball.dim()) {
        return Err(Error::DimensionMismatch {
            expected: ball.dim(),
            found: h.dim(),
        });
    }
    let rho_final = &ball.radius * pow_q(&params.contraction(), params.tau_k);
    Ok(AvoidPolicy {
        params: params.clone(),
        planes,
        residual_floor: Q::zero(),
        config,
        label: String::new(),
        start: ball.clone(),
        distance: rho_final * &params.gamma / Q::from_integer(BigInt::from(2)),
        played: 0,
        sub_block: 0,
        active: None,
        reports: Vec::new(),
        completed: false,
    })
}

impl AvoidPolicy {
    /// Also require `min |u.p - a| > floor` over the final ball.
    pub fn with_residual_floor(mut self, floor: Q) -> Self {
        self.residual_floor = floor;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Required Euclidean distance `rho_final * gamma / 2`.
    pub fn distance(&self) -> &Q {
        &self.distance
    }

    pub fn planes(&self) -> &[Hyperplane] {
        &self.planes
    }

    pub fn reports(&self) -> &[SubBlockReport] {
        &self.reports
    }

    pub fn rounds(&self) -> u64 {
        self.params.tau_k
    }

    pub fn is_done(&self) -> bool {
        self.played >= self.params.tau_k
    }

    fn clear(&self, ball: &Ball, h: &Hyperplane) -> bool {
        ball_plane_distance_exceeds(ball, h, &self.distance) && min_residual_exceeds(ball, h, &self.residual_floor)
    }

    /// Indices of planes the ball does not yet clear.
    pub fn threatening(&self, ball: &Ball) -> Vec<usize> {
        (0..self.planes.len())
            .filter(|&i| !self.clear(ball, &self.planes[i]))
            .collect()
    }

    fn close_escape(&mut self, ball: &Ball) -> Result<()> {
        if let Some(active) = &self.active {
            if active.rounds_left == 0 {
                if let Some(target) = &active.target {
                    if !halfspace_contains_ball(target, ball) {
                        return Err(Error::escape(format!(
                            "{}: ball not inside the escape halfspace after sub-block {}",
                            self.label, self.sub_block
                        )));
                    }
                }
                self.active = None;
            }
        }
        Ok(())
    }

    /// Checks the block postcondition on the ball answering the last round.
    pub fn complete(&mut self, ball: &Ball) -> Result<()> {
        self.close_escape(ball)?;
        if self.completed || !self.is_done() {
            return Ok(());
        }
        self.completed = true;
        if let Some(i) = self.threatening(ball).first() {
            return Err(Error::escape(format!(
                "{}: plane {} ({}) within the required clearance after {} rounds",
                self.label,
                i,
                self.planes[*i].describe(),
                self.params.tau_k
            )));
        }
        Ok(())
    }

    fn start_sub_block(&mut self, ball: &Ball) -> Result<()> {
        let threatening = self.threatening(ball);
        self.sub_block += 1;
        let t = self.params.t_escape;
        if threatening.is_empty() {
            self.active = Some(ActiveEscape {
                target: None,
                direction: Vec::new(),
                rounds_left: t,
                note: format!("{} sub={} hold", self.label, self.sub_block),
            });
            return Ok(());
        }
        let planes: Vec<Hyperplane> = threatening.iter().map(|&i| self.planes[i].clone()).collect();
        let clearances: Vec<Clearance> = planes
            .iter()
            .map(|_| Clearance {
                distance: self.distance.clone(),
                residual: self.residual_floor.clone(),
            })
            .collect();
        let mut config = self.config.clone();
        config.seed = config.seed.wrapping_add(self.sub_block.wrapping_mul(0x9E37_79B9));
        let selection = select_cap_with_clearance(ball, &planes, &clearances, &self.params, &config)?;
        let escaped: Vec<usize> = selection.escaped.iter().map(|&i| threatening[i]).collect();
        let note = format!(
            "{} sub={} dir={} escaped={:?}",
            self.label,
            self.sub_block,
            describe_direction(&selection.direction),
            escaped
        );
        self.reports.push(SubBlockReport {
            sub_block: self.sub_block,
            threatening,
            escaped,
            needed: selection.needed,
            direction: selection.direction.clone(),
        });
        self.active = Some(ActiveEscape {
            target: Some(escape_target(ball, selection.direction.clone(), &self.params.gamma)?),
            direction: selection.direction,
            rounds_left: t,
            note,
        });
        Ok(())
    }
}

impl Policy for AvoidPolicy {
    fn propose(&mut self, state: &GameState) -> Result<Move> {
        if self.played == 0 && state.current != self.start {
            return Err(Error::InvalidParams(
                "avoidance policy started from a different ball".into(),
            ));
        }
        self.close_escape(&state.current)?;
        if self.is_done() {
            self.complete(&state.current)?;
            return Ok(Move::noted(state.current.center.clone(), "hold"));
        }
        if self.active.is_none() {
            self.start_sub_block(&state.current)?;
        }
        let active = self.active.as_mut().expect("sub-block active");
        active.rounds_left -= 1;
        self.played += 1;
        let center = if active.target.is_some() {
            shifted_center(state, &active.direction)
        } else {
            state.current.center.clone()
        };
        Ok(Move::noted(center, active.note.clone()))
    }

    fn finish(&mut self, state: &GameState) -> Result<()> {
        self.complete(&state.current)
    }
}

/// `gamma * rho_B`: the exact per-round height gain of the maximal shift
/// against a Black reply pulled back as far as possible.
pub fn drift_per_round(alpha: &Q, beta: &Q, rho_b: &Q) -> Q {
    (Q::one() + alpha * beta - q(2, 1) * alpha) * rho_b
}

/// Squared length helper used by the tests and adversaries.
pub fn unit_check(d: &[Q]) -> bool {
    norm_sq(d) == Q::one()
}
