//! Derived strategy constants and the block schedule.
//!
//! Every ceiling of a logarithm ratio is proposed in floating point and then
//! settled by exact comparisons of rational powers, so the integer decisions
//! never depend on rounding.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::GameParams;
use crate::geometry::{cap_fraction, Ball, Hyperplane};
use crate::rational::{self, fmt_q, pow_q, q, qi, serde_q, Q};
use crate::resonance::ResonanceSequence;

/// Grid used to round `omega` down to a rational.
const OMEGA_GRID_BITS: u32 = 32;
const K_SCAN_LIMIT: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyParams {
    #[serde(with = "serde_q")]
    pub alpha: Q,
    #[serde(with = "serde_q")]
    pub beta: Q,
    #[serde(rename = "M", with = "serde_q")]
    pub m: Q,
    pub dim: usize,
    #[serde(with = "serde_q")]
    pub gamma: Q,
    /// Closed-form cap fraction, informational only.
    pub omega: f64,
    #[serde(with = "serde_q")]
    pub omega_lb: Q,
    pub t_escape: u64,
    pub k: u64,
    pub tau_k: u64,
    #[serde(with = "serde_q")]
    pub epsilon: Q,
}

impl StrategyParams {
    pub fn game_params(&self) -> GameParams {
        GameParams {
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            dim: self.dim,
        }
    }

    pub fn contraction(&self) -> Q {
        &self.alpha * &self.beta
    }

    /// Escape sub-blocks per block, `tau_k / t_escape`.
    pub fn sub_blocks(&self) -> u64 {
        self.tau_k / self.t_escape
    }

    /// Number of planes the averaging bound guarantees to escape out of `count`:
    /// `ceil(omega_lb * count)`.
    pub fn guaranteed_escapes(&self, count: usize) -> usize {
        let v = &self.omega_lb * qi(count as i64);
        rational::ceil_int(&v).try_into().unwrap_or(usize::MAX)
    }
}

pub fn derive_params(alpha: &Q, beta: &Q, m: &Q, n: usize) -> Result<StrategyParams> {
    derive_params_with(alpha, beta, m, n, None)
}

/// As [`derive_params`], with an optional `k` override. The override must
/// still satisfy the `k`-inequality.
pub fn derive_params_with(
    alpha: &Q,
    beta: &Q,
    m: &Q,
    n: usize,
    k_override: Option<u64>,
) -> Result<StrategyParams> {
    let game = GameParams::new(alpha.clone(), beta.clone(), n)?;
    if *m <= Q::one() {
        return Err(Error::InvalidParams(format!("M must exceed 1, got {}", fmt_q(m))));
    }
    let gamma = game.gamma();
    let a = game.contraction();
    let omega = cap_fraction(&gamma, n)?;
    let omega_lb = round_omega_down(omega, n);
    let t_escape = escape_rounds(&a, &gamma);
    let k = match k_override {
        Some(k) => {
            if !k_condition(&a, m, &omega_lb, t_escape, k) {
                return Err(Error::InvalidParams(format!(
                    "k = {k} violates the block-length inequality"
                )));
            }
            k
        }
        None => smallest_k(&a, m, &omega_lb, t_escape)?,
    };
    let tau_k = t_escape * halving_steps(&omega_lb, k);
    let epsilon = &gamma / (qi(4) * pow_q(m, 2 + k));
    Ok(StrategyParams {
        alpha: alpha.clone(),
        beta: beta.clone(),
        m: m.clone(),
        dim: n,
        gamma,
        omega,
        omega_lb,
        t_escape,
        k,
        tau_k,
        epsilon,
    })
}

fn round_omega_down(omega: f64, n: usize) -> Q {
    if n == 1 {
        // the two-point sphere: exactly one half
        return q(1, 2);
    }
    let scale = (1u64 << OMEGA_GRID_BITS) as f64;
    let units = ((omega * scale).floor() as i64 - 1).max(1);
    Q::new(BigInt::from(units), BigInt::from(1u64 << OMEGA_GRID_BITS))
}

/// Smallest `t >= 1` with `(alpha beta)^t < gamma/2`.
pub fn escape_rounds(a: &Q, gamma: &Q) -> u64 {
    let half_gamma = gamma / qi(2);
    let proposal = (rational::to_f64(&half_gamma).ln() / rational::to_f64(a).ln()).ceil();
    let mut t = if proposal.is_finite() && proposal >= 1.0 {
        proposal as u64
    } else {
        1
    };
    while t > 1 && pow_q(a, t - 1) < half_gamma {
        t -= 1;
    }
    while pow_q(a, t) >= half_gamma {
        t += 1;
    }
    t
}

/// `ceil(log k / log(1/(1 - omega)))`: the smallest `s >= 0` with
/// `k (1 - omega)^s <= 1`.
pub fn halving_steps(omega_lb: &Q, k: u64) -> u64 {
    if k <= 1 {
        return 0;
    }
    let keep = Q::one() - omega_lb;
    let kq = qi(k as i64);
    let proposal = ((k as f64).ln() / (1.0 / rational::to_f64(&keep)).ln()).ceil();
    let mut s = if proposal.is_finite() && proposal >= 0.0 {
        proposal as u64
    } else {
        0
    };
    while s > 0 && &kq * pow_q(&keep, s - 1) <= Q::one() {
        s -= 1;
    }
    while &kq * pow_q(&keep, s) > Q::one() {
        s += 1;
    }
    s
}

/// `tau_k log(1/(alpha beta)) / log M + 2 < k`, checked as
/// `(1/(alpha beta))^tau_k < M^(k-2)`.
pub fn k_condition(a: &Q, m: &Q, omega_lb: &Q, t_escape: u64, k: u64) -> bool {
    if k <= 2 {
        return false;
    }
    let tau = t_escape * halving_steps(omega_lb, k);
    pow_q(&a.recip(), tau) < pow_q(m, k - 2)
}

/// Incremental scan over unreduced integer numerators and denominators:
/// `s(k)`, `(1/a)^(t s(k))` and `M^(k-2)` are all monotone in `k`, so each
/// step costs a constant number of multiplications.
fn smallest_k(a: &Q, m: &Q, omega_lb: &Q, t_escape: u64) -> Result<u64> {
    let keep = Q::one() - omega_lb;
    let (keep_n, keep_d) = (keep.numer().clone(), keep.denom().clone());
    let inv_a_t = pow_q(&a.recip(), t_escape);
    let (ia_n, ia_d) = (inv_a_t.numer().clone(), inv_a_t.denom().clone());
    let (m_n, m_d) = (m.numer().clone(), m.denom().clone());
    // keep^s = kn/kd, (1/a)^(t s) = ln/ld, M^(k-2) = rn/rd
    let mut kn = BigInt::one();
    let mut kd = BigInt::one();
    let mut ln = BigInt::one();
    let mut ld = BigInt::one();
    let mut rn = m_n.clone();
    let mut rd = m_d.clone();
    for k in 3..=K_SCAN_LIMIT {
        if k > 3 {
            rn *= &m_n;
            rd *= &m_d;
        }
        while BigInt::from(k) * &kn > kd {
            kn *= &keep_n;
            kd *= &keep_d;
            ln *= &ia_n;
            ld *= &ia_d;
        }
        if &ln * &rd < &rn * &ld {
            return Ok(k);
        }
    }
    Err(Error::InvalidParams(format!("no k <= {K_SCAN_LIMIT} satisfies the block inequality")))
}

/// Block boundaries `r_1 = 1 <= r_2 <= ... <= r_J`. Block `j` (0-based) covers
/// rounds `j tau_k < nu <= (j+1) tau_k` and handles `r` in `(r_j, r_{j+1}]`
/// with `r_0 = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSchedule {
    #[serde(with = "serde_q")]
    pub rho0: Q,
    pub blocks: usize,
    pub r_indices: Vec<usize>,
    /// `q_j = r_{j+1} - r_j` for `j = 1 .. J-1`.
    pub q: Vec<usize>,
}

impl BlockSchedule {
    /// The `r` range `(lo, hi]` handled by block `j` (0-based).
    pub fn block_range(&self, j: usize) -> (usize, usize) {
        let lo = if j == 0 { 0 } else { self.r_indices[j - 1] };
        (lo, self.r_indices[j])
    }

    /// Largest handled `r`, or 0 for an empty schedule.
    pub fn last_r(&self) -> usize {
        self.r_indices.last().copied().unwrap_or(0)
    }
}

pub fn block_schedule(
    params: &StrategyParams,
    lambda: &ResonanceSequence,
    rho0: &Q,
    blocks: usize,
) -> Result<BlockSchedule> {
    if !rho0.is_positive() {
        return Err(Error::InvalidParams("rho0 must be positive".into()));
    }
    if lambda.is_empty() {
        return Err(Error::ScheduleInfeasible("resonance sequence is empty".into()));
    }
    // 1/t_1 > rho0
    if rho0 * rho0 * rational::qb(lambda.t_sq(1)) >= Q::one() {
        return Err(Error::ScheduleInfeasible(format!(
            "opening radius {} violates 1/t_1 > rho0",
            fmt_q(rho0)
        )));
    }
    let mut r_indices = Vec::with_capacity(blocks);
    let mut qs = Vec::new();
    if blocks == 0 {
        return Ok(BlockSchedule {
            rho0: rho0.clone(),
            blocks,
            r_indices,
            q: qs,
        });
    }
    r_indices.push(1);
    let a = params.contraction();
    let m_sq = &params.m * &params.m;
    for j in 1..blocks {
        let rho_j = rho0 * pow_q(&a, j as u64 * params.tau_k);
        // T = 1/(2 rho_j); compare t_r^2 against T^2
        let threshold_sq = (qi(4) * &rho_j * &rho_j).recip();
        let prev = *r_indices.last().expect("r_1 pushed");
        if rational::qb(lambda.t_sq(prev)) >= threshold_sq {
            return Err(Error::ScheduleInfeasible(format!(
                "block {j}: t_{prev} already reaches 1/(2 rho (alpha beta)^(j tau_k))"
            )));
        }
        let mut r = prev;
        loop {
            if r + 1 > lambda.len() {
                return Err(Error::ScheduleInfeasible(format!(
                    "block {j}: resonance sequence too short ({} vectors) to bracket threshold t = sqrt({})",
                    lambda.len(),
                    fmt_q(&threshold_sq)
                )));
            }
            if rational::qb(lambda.t_sq(r + 1)) < threshold_sq {
                r += 1;
            } else {
                break;
            }
        }
        // rho_j >= 1/(2 M^2 t_r)
        let lower = qi(2) * &m_sq * &rho_j;
        if &lower * &lower * rational::qb(lambda.t_sq(r)) < Q::one() {
            return Err(Error::ScheduleInfeasible(format!(
                "block {j}: rho (alpha beta)^(j tau_k) < 1/(2 M^2 t_r) for r = {r}; lacunarity window violated"
            )));
        }
        let q_j = r - prev;
        if q_j as u64 >= params.k {
            return Err(Error::ScheduleInfeasible(format!(
                "block {j}: q_j = {q_j} >= k = {}",
                params.k
            )));
        }
        r_indices.push(r);
        qs.push(q_j);
    }
    Ok(BlockSchedule {
        rho0: rho0.clone(),
        blocks,
        r_indices,
        q: qs,
    })
}

/// For each `r` in `(r_lo, r_hi]`, the plane `u^(r) . y = a` with `a` the
/// nearest integer (ties to even) to `u^(r) . center`.
pub fn dangerous_hyperplanes(
    ball: &Ball,
    lambda: &ResonanceSequence,
    r_lo: usize,
    r_hi: usize,
) -> Result<Vec<Hyperplane>> {
    if r_lo >= r_hi || r_hi > lambda.len() {
        return Err(Error::InvalidParams(format!(
            "need r_lo < r_hi <= {}, got ({r_lo}, {r_hi}]",
            lambda.len()
        )));
    }
    (r_lo + 1..=r_hi)
        .map(|r| {
            let u = lambda.vector(r).to_vec();
            let value = rational::dot_int(&u, ball.center.coords());
            Hyperplane::new(u, rational::round_half_even(&value))
        })
        .collect()
}

/// Exact re-check of both inequalities bracketing `rho (alpha beta)^(j tau_k)`
/// for every block boundary of a schedule.
pub fn verify_schedule(params: &StrategyParams, lambda: &ResonanceSequence, s: &BlockSchedule) -> bool {
    let a = params.contraction();
    let m_sq = &params.m * &params.m;
    s.r_indices.iter().enumerate().skip(1).all(|(j, &r)| {
        let rho_j = &s.rho0 * pow_q(&a, j as u64 * params.tau_k);
        let t_sq = rational::qb(lambda.t_sq(r));
        let two_rho = qi(2) * &rho_j;
        // 1/(2 t_r) > rho_j
        let left = &two_rho * &two_rho * &t_sq < Q::one();
        // rho_j >= 1/(2 t_{r+1})
        let next = rational::qb(lambda.t_sq(r + 1));
        let right_next = &two_rho * &two_rho * next >= Q::one();
        // rho_j >= 1/(2 M^2 t_r)
        let lower = &two_rho * &m_sq;
        let right = &lower * &lower * &t_sq >= Q::one();
        left && right_next && right && !rho_j.is_zero()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn golden_lambda() -> ResonanceSequence {
        ResonanceSequence::from_sizes(&[1, 3, 13, 55, 233, 987], &qi(3)).unwrap()
    }

    #[test]
    fn derived_constants_quarter_half() {
        let p = derive_params(&q(1, 4), &q(1, 2), &qi(3), 1).unwrap();
        assert_eq!(p.gamma, q(5, 8));
        assert_eq!(p.omega_lb, q(1, 2));
        assert_eq!(p.t_escape, 1);
        assert_eq!(p.k, 8);
        assert_eq!(p.tau_k, 3);
        assert_eq!(p.epsilon, q(5, 1889568));
    }

    #[test]
    fn gamma_third_third() {
        let p = derive_params(&q(1, 3), &q(1, 3), &qi(3), 1).unwrap();
        assert_eq!(p.gamma, q(4, 9));
    }

    #[test]
    fn out_of_range_parameters() {
        assert!(derive_params(&q(1, 2), &q(1, 2), &qi(3), 1).is_err());
        assert!(derive_params(&q(1, 4), &qi(1), &qi(3), 1).is_err());
        assert!(derive_params(&q(1, 4), &q(1, 2), &qi(1), 1).is_err());
    }

    #[test]
    fn k_override_must_satisfy_inequality() {
        // k = 9 needs tau = 4 and 8^4 > 3^7; k = 10 is the next success
        let p = derive_params_with(&q(1, 4), &q(1, 2), &qi(3), 1, Some(10)).unwrap();
        assert_eq!(p.k, 10);
        assert_eq!(p.tau_k, 4);
        assert!(derive_params_with(&q(1, 4), &q(1, 2), &qi(3), 1, Some(9)).is_err());
        assert!(derive_params_with(&q(1, 4), &q(1, 2), &qi(3), 1, Some(7)).is_err());
    }

    #[test]
    fn escape_rounds_strict_inequality() {
        // (1/4)^1 = 1/4 = gamma/2 exactly: t must move to 2
        assert_eq!(escape_rounds(&q(1, 4), &q(1, 2)), 2);
        assert_eq!(escape_rounds(&q(1, 8), &q(5, 8)), 1);
    }

    #[test]
    fn halving_steps_exact() {
        assert_eq!(halving_steps(&q(1, 2), 1), 0);
        assert_eq!(halving_steps(&q(1, 2), 2), 1);
        assert_eq!(halving_steps(&q(1, 2), 8), 3);
        assert_eq!(halving_steps(&q(1, 2), 9), 4);
    }

    #[test]
    fn golden_schedule() {
        let p = derive_params(&q(1, 4), &q(1, 2), &qi(3), 1).unwrap();
        let lambda = golden_lambda();
        let s = block_schedule(&p, &lambda, &q(1, 2), 2).unwrap();
        assert_eq!(s.r_indices, vec![1, 5]);
        assert_eq!(s.q, vec![4]);
        assert!(verify_schedule(&p, &lambda, &s));
        assert_eq!(s.block_range(0), (0, 1));
        assert_eq!(s.block_range(1), (1, 5));
    }

    #[test]
    fn schedule_too_short() {
        let p = derive_params(&q(1, 4), &q(1, 2), &qi(3), 1).unwrap();
        assert!(matches!(
            block_schedule(&p, &golden_lambda(), &q(1, 2), 3),
            Err(Error::ScheduleInfeasible(_))
        ));
    }

    #[test]
    fn schedule_rejects_large_opening_ball() {
        let p = derive_params(&q(1, 4), &q(1, 2), &qi(3), 1).unwrap();
        assert!(matches!(
            block_schedule(&p, &golden_lambda(), &qi(1), 2),
            Err(Error::ScheduleInfeasible(_))
        ));
    }

    #[test]
    fn dangerous_planes_nearest_integer() {
        let lambda = ResonanceSequence::from_sizes(&[1, 3], &qi(3)).unwrap();
        let ball = Ball::new(Point(vec![q(2, 5)]), q(1, 100)).unwrap();
        let planes = dangerous_hyperplanes(&ball, &lambda, 1, 2).unwrap();
        assert_eq!(planes, vec![Hyperplane::from_i64(&[3], 1).unwrap()]);
        // 3 * (1/2) = 3/2: tie goes to the even neighbour 2
        let ball = Ball::new(Point(vec![q(1, 2)]), q(1, 100)).unwrap();
        let planes = dangerous_hyperplanes(&ball, &lambda, 1, 2).unwrap();
        assert_eq!(planes[0].offset, BigInt::from(2));
        assert!(dangerous_hyperplanes(&ball, &lambda, 2, 2).is_err());
    }

    #[test]
    fn golden_block_has_four_planes() {
        let lambda = golden_lambda();
        let ball = Ball::new(Point(vec![q(1, 7)]), q(1, 1024)).unwrap();
        let planes = dangerous_hyperplanes(&ball, &lambda, 1, 5).unwrap();
        assert_eq!(planes.len(), 4);
        for p in &planes {
            let res = crate::geometry::resonance_residual(&ball.center, p);
            assert!(res <= q(1, 2));
        }
    }

    #[test]
    fn incremental_k_scan_matches_direct_check() {
        for (alpha, beta, n) in [(q(1, 4), q(1, 2), 2), (q(3, 32), q(1, 16), 2), (q(1, 3), q(2, 3), 3)] {
            let p = derive_params(&alpha, &beta, &qi(3), n).unwrap();
            let a = p.contraction();
            assert!(k_condition(&a, &p.m, &p.omega_lb, p.t_escape, p.k));
            for k in (p.k.saturating_sub(8)..p.k).rev() {
                assert!(!k_condition(&a, &p.m, &p.omega_lb, p.t_escape, k), "k = {k}");
            }
        }
    }
}
