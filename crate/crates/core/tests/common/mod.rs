//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the code under test except for plain data types.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn pow(base: &Q, e: u64) -> Q {
    (0..e).fold(Q::one(), |acc, _| acc * base)
}

/// Uniform rational in the open interval `(lo, hi)` with denominator `den`.
pub fn rand_q_between<R: Rng>(rng: &mut R, lo: &Q, hi: &Q, den: i64) -> Q {
    loop {
        let k = rng.random_range(0..=den);
        let x = lo + (hi - lo) * q(k, den);
        if &x > lo && &x < hi {
            return x;
        }
    }
}

/// Random legal game parameters: `alpha in (0, 1/2)`, `beta in (0, 1)`.
pub fn rand_alpha_beta<R: Rng>(rng: &mut R) -> (Q, Q) {
    let alpha = rand_q_between(rng, &qi(0), &q(1, 2), 64);
    let beta = rand_q_between(rng, &qi(0), &qi(1), 64);
    (alpha, beta)
}

/// Constants of the block strategy in one dimension, derived by direct
/// integer search.
#[derive(Debug, PartialEq)]
pub struct OracleConstants {
    pub gamma: Q,
    pub t: u64,
    pub k: u64,
    pub tau: u64,
    pub epsilon: Q,
}

/// For `n = 1` the cap fraction is exactly one half.
pub fn oracle_constants_1d(alpha: &Q, beta: &Q, m: &Q) -> OracleConstants {
    let a = alpha * beta;
    let gamma = Q::one() + &a - qi(2) * alpha;
    let half_gamma = &gamma / qi(2);
    let mut t = 1;
    while pow(&a, t) >= half_gamma {
        t += 1;
    }
    // smallest s with 2^s >= k
    let halvings = |k: u64| -> u64 {
        let mut s = 0;
        while (1u64 << s) < k {
            s += 1;
        }
        s
    };
    let inv_a = a.recip();
    let mut k = 1;
    loop {
        let tau = t * halvings(k);
        // (1/a)^tau < M^(k-2)
        let lhs = pow(&inv_a, tau);
        let rhs = if k >= 2 { pow(m, k - 2) } else { m.recip() };
        if lhs < rhs {
            break;
        }
        k += 1;
    }
    let tau = t * halvings(k);
    let epsilon = &gamma / (qi(4) * pow(m, 2 + k));
    OracleConstants {
        gamma,
        t,
        k,
        tau,
        epsilon,
    }
}

/// `||x||` for a rational.
pub fn dist_to_int(x: &Q) -> Q {
    let f = x - x.floor();
    let g = Q::one() - &f;
    if f < g {
        f
    } else {
        g
    }
}

/// Every integer vector of the box `[-t, t]^dim` except zero, in descending
/// lexicographic order.
pub fn box_desc(dim: usize, t: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut v = vec![t; dim];
    loop {
        if v.iter().any(|&c| c != 0) {
            out.push(v.clone());
        }
        let mut i = dim;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if v[i] > -t {
                v[i] -= 1;
                break;
            }
            v[i] = t;
        }
    }
}

/// `min_{0 < |y|_inf <= t} max_i || sum_j theta_ij y_j ||`, by full box scan.
pub fn naive_psi(theta: &[Vec<Q>], t: i64) -> Q {
    let n = theta[0].len();
    box_desc(n, t)
        .into_iter()
        .map(|y| {
            theta
                .iter()
                .map(|row| {
                    let s = row.iter().zip(&y).fold(Q::zero(), |acc, (th, &yj)| acc + th * qi(yj));
                    dist_to_int(&s)
                })
                .max()
                .unwrap()
        })
        .min()
        .unwrap()
}

/// `min (max_j ||L_j(x) - eta_j||)^n (max |x_i|)^m` by full box scan, with
/// `L_j(x) = sum_i theta_ij x_i`.
pub fn naive_theorem1(theta: &[Vec<Q>], eta: &[Q], big_n: i64) -> Q {
    let m = theta.len();
    let n = theta[0].len();
    box_desc(m, big_n)
        .into_iter()
        .map(|x| {
            let d = (0..n)
                .map(|j| {
                    let s = (0..m).fold(Q::zero(), |acc, i| acc + &theta[i][j] * qi(x[i]));
                    dist_to_int(&(s - &eta[j]))
                })
                .max()
                .unwrap();
            let size = x.iter().map(|c| c.abs()).max().unwrap();
            pow(&d, n as u64) * pow(&qi(size), m as u64)
        })
        .min()
        .unwrap()
}

/// `x > y sqrt(s)` for rationals `x`, `y >= 0`, `s >= 0`.
pub fn gt_sqrt(x: &Q, y: &Q, s: &Q) -> bool {
    x.is_positive() && x * x > y * y * s
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn norm_sq(a: &[Q]) -> Q {
    dot(a, a)
}

pub fn int_vec(v: &[BigInt]) -> Vec<Q> {
    v.iter().map(|c| Q::from_integer(c.clone())).collect()
}

/// Every point of the ball `B(c, rho)` is at Euclidean distance `> dist`
/// from `{u.y = a}`.
pub fn ball_far_from_plane(c: &[Q], rho: &Q, u: &[BigInt], a: &BigInt, dist: &Q) -> bool {
    let uq = int_vec(u);
    let res = (dot(&uq, c) - Q::from_integer(a.clone())).abs();
    gt_sqrt(&res, &(rho + dist), &norm_sq(&uq))
}

/// Independent miss test for the solid cap `{|w| <= rho, w.x >= h}` via the
/// disk `plane ∩ ball`: the plane misses iff it misses the ball, or the
/// highest point of that disk along `x` stays below `h`.
pub fn oracle_plane_misses_cap(c: &[Q], rho: &Q, x: &[Q], h: &Q, u: &[BigInt], a: &BigInt) -> bool {
    let uq = int_vec(u);
    let uu = norm_sq(&uq);
    let e = dot(&uq, c) - Q::from_integer(a.clone());
    if &e * &e > rho * rho * &uu {
        return true;
    }
    let ux = dot(&uq, x);
    let foot_height = -(&e * &ux) / &uu;
    let disk_r_sq = rho * rho - &e * &e / &uu;
    let slope_sq = Q::one() - &ux * &ux / &uu;
    let lhs = h - foot_height;
    lhs.is_positive() && &lhs * &lhs > disk_r_sq * slope_sq
}
