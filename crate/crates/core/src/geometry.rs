//! Exact rational geometry: balls, resonance hyperplanes, halfspaces and
//! spherical caps.
//!
//! Norms of integer vectors are irrational in general, so every comparison
//! that involves `|u|` is carried out on squares after a sign check.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::rational::{self, dot, fmt_q, norm_sq, qb, serde_intvec, serde_q, serde_qvec, Q};

pub use crate::rational::nearest_int_dist;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(#[serde(with = "serde_qvec")] pub Vec<Q>);

impl Point {
    pub fn new(coords: Vec<Q>) -> Self {
        Point(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![Q::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Q] {
        &self.0
    }

    /// `self + scale * direction`.
    pub fn offset(&self, direction: &[Q], scale: &Q) -> Point {
        Point(
            self.0
                .iter()
                .zip(direction)
                .map(|(c, d)| c + scale * d)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Point) -> Vec<Q> {
        self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()
    }

    pub fn dist_sq(&self, other: &Point) -> Q {
        norm_sq(&self.sub(other))
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(fmt_q).collect()
    }
}

/// Closed Euclidean ball with rational center and radius.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    #[serde(with = "serde_q")]
    pub radius: Q,
}

impl Ball {
    pub fn new(center: Point, radius: Q) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::InvalidParams(format!(
                "ball radius must be positive, got {}",
                fmt_q(&radius)
            )));
        }
        Ok(Ball { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }
}

/// Resonance hyperplane `{y : u . y = a}` with integer data.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hyperplane {
    #[serde(rename = "u", with = "serde_intvec")]
    pub normal: Vec<BigInt>,
    #[serde(rename = "a", with = "crate::rational::serde_int")]
    pub offset: BigInt,
}

impl Hyperplane {
    pub fn new(normal: Vec<BigInt>, offset: BigInt) -> Result<Self> {
        if normal.iter().all(Zero::is_zero) {
            return Err(Error::InvalidParams("hyperplane normal is zero".into()));
        }
        Ok(Hyperplane { normal, offset })
    }

    pub fn from_i64(normal: &[i64], offset: i64) -> Result<Self> {
        Hyperplane::new(
            normal.iter().map(|&x| BigInt::from(x)).collect(),
            BigInt::from(offset),
        )
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// `t^2 = |u|^2`.
    pub fn norm_sq(&self) -> BigInt {
        rational::norm_sq_int(&self.normal)
    }

    /// Signed residual `u . p - a`.
    pub fn signed_residual(&self, p: &Point) -> Q {
        rational::dot_int(&self.normal, p.coords()) - qb(&self.offset)
    }

    pub fn normal_q(&self) -> Vec<Q> {
        self.normal.iter().map(qb).collect()
    }

    pub fn describe(&self) -> String {
        let u: Vec<String> = self.normal.iter().map(|x| x.to_string()).collect();
        format!("u=[{}], a={}", u.join(","), self.offset)
    }
}

/// `{y : direction . (y - anchor) >= threshold}` with an exactly unit
/// rational direction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Halfspace {
    #[serde(with = "serde_qvec")]
    pub direction: Vec<Q>,
    #[serde(with = "serde_q")]
    pub threshold: Q,
    pub anchor: Point,
}

impl Halfspace {
    pub fn new(direction: Vec<Q>, threshold: Q, anchor: Point) -> Result<Self> {
        if norm_sq(&direction) != Q::one() {
            return Err(Error::InvalidParams(
                "halfspace direction must have unit squared norm".into(),
            ));
        }
        if direction.len() != anchor.dim() {
            return Err(Error::DimensionMismatch {
                expected: anchor.dim(),
                found: direction.len(),
            });
        }
        Ok(Halfspace {
            direction,
            threshold,
            anchor,
        })
    }

    /// Signed height of `p` above the boundary.
    pub fn height(&self, p: &Point) -> Q {
        dot(&self.direction, &p.sub(&self.anchor)) - &self.threshold
    }
}

/// Closed-ball containment with exact squared comparison.
pub fn ball_contains(outer: &Ball, inner: &Ball) -> Result<bool> {
    if outer.dim() != inner.dim() {
        return Err(Error::DimensionMismatch {
            expected: outer.dim(),
            found: inner.dim(),
        });
    }
    if inner.radius > outer.radius {
        return Ok(false);
    }
    let slack = &outer.radius - &inner.radius;
    Ok(outer.center.dist_sq(&inner.center) <= &slack * &slack)
}

/// `|u . p - a|`. Euclidean distance is this divided by `|u|`.
pub fn resonance_residual(p: &Point, h: &Hyperplane) -> Q {
    h.signed_residual(p).abs()
}

pub fn halfspace_contains_ball(h: &Halfspace, b: &Ball) -> bool {
    h.height(&b.center) >= b.radius
}

/// True iff every point of `ball` is at Euclidean distance `> dist` from the
/// plane: `|u.c - a| > (radius + dist) * |u|`.
pub fn ball_plane_distance_exceeds(ball: &Ball, h: &Hyperplane, dist: &Q) -> bool {
    let res = resonance_residual(&ball.center, h);
    rational::gt_times_sqrt(&res, &(&ball.radius + dist), &h.norm_sq())
}

/// True iff `min_{p in ball} |u.p - a| > bound`, i.e.
/// `|u.c - a| - bound > radius * |u|`.
pub fn min_residual_exceeds(ball: &Ball, h: &Hyperplane, bound: &Q) -> bool {
    let res = resonance_residual(&ball.center, h);
    rational::gt_times_sqrt(&(res - bound), &ball.radius, &h.norm_sq())
}

/// Rational lower bound on `min_{p in ball} |u.p - a|`, using a rational
/// upper bound on `|u|` accurate to `2^-bits`.
pub fn min_residual_lower_bound(ball: &Ball, h: &Hyperplane, bits: u32) -> Q {
    let res = resonance_residual(&ball.center, h);
    res - &ball.radius * rational::sqrt_upper(&h.norm_sq(), bits)
}

/// Squared cosine of the angular radius of the escape cap `Omega*`:
/// `cos^2(arcsin(gamma/2)) = 1 - gamma^2/4`.
pub fn escape_cap_cos_sq(gamma: &Q) -> Q {
    Q::one() - gamma * gamma / Q::from_integer(BigInt::from(4))
}

/// Is the unit direction `d` inside `Omega*(x)` for the unit direction `x`?
/// Decided by `d . x >= sqrt(1 - gamma^2/4)`.
pub fn in_escape_cap(d: &[Q], x: &[Q], gamma: &Q) -> bool {
    let c = dot(d, x);
    !c.is_negative() && &c * &c >= escape_cap_cos_sq(gamma)
}

/// Is `min_{w in C} v . w > bound` for the solid cap
/// `C = {|w| <= radius, w . x >= height}` (unit `x`, `0 < height <= radius`)?
fn min_linear_over_solid_cap_exceeds(v: &[Q], x: &[Q], radius: &Q, height: &Q, bound: &Q) -> bool {
    let c = dot(v, x);
    let vv = norm_sq(v);
    let ball_minimizer_feasible = !c.is_positive() && &c * &c * radius * radius >= height * height * &vv;
    if ball_minimizer_feasible {
        // min = -radius * |v|
        bound.is_negative() && bound * bound > radius * radius * vv
    } else {
        // min = height * c - sqrt((radius^2 - height^2) (|v|^2 - c^2))
        let lhs = height * &c - bound;
        let p = (radius * radius - height * height) * (vv - &c * &c);
        lhs.is_positive() && &lhs * &lhs > p
    }
}

/// Exact test that the hyperplane misses the solid cap
/// `ball ∩ {(z - center) . x >= height}`; missing the solid cap implies
/// missing the spherical cap `Omega(x)` it contains.
pub fn plane_misses_cap(ball: &Ball, x: &[Q], height: &Q, h: &Hyperplane) -> bool {
    let u = h.normal_q();
    let e = h.signed_residual(&ball.center);
    let neg_u: Vec<Q> = u.iter().map(|c| -c).collect();
    // u.z - a = u.w + e with w = z - center; missing means the sign is constant.
    min_linear_over_solid_cap_exceeds(&u, x, &ball.radius, height, &-e.clone())
        || min_linear_over_solid_cap_exceeds(&neg_u, x, &ball.radius, height, &e)
}

/// Normalized surface measure `omega` of the cap `Omega*(x)` of angular radius
/// `arcsin(gamma/2)` on the unit sphere of `R^n`.
pub fn cap_fraction(gamma: &Q, n: usize) -> Result<f64> {
    if !gamma.is_positive() || *gamma >= Q::one() {
        return Err(Error::InvalidParams(format!(
            "gamma must lie in (0,1), got {}",
            fmt_q(gamma)
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParams("dimension must be >= 1".into()));
    }
    let theta = (rational::to_f64(gamma) / 2.0).asin();
    Ok(match n {
        1 => 0.5,
        2 => theta / std::f64::consts::PI,
        _ => {
            let power = (n - 2) as i32;
            simpson(|phi| phi.sin().powi(power), 0.0, theta, 1 << 14)
                / simpson(|phi| phi.sin().powi(power), 0.0, std::f64::consts::PI, 1 << 16)
        }
    })
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let h = (b - a) / intervals as f64;
    let mut acc = f(a) + f(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64);
    }
    acc * h / 3.0
}

/// Monte Carlo estimate of `mu(Omega*(x))` straight from the definition
/// `{y in S : Pi(y) ⊇ Omega(x)}`: a sample `y` is counted when the minimum of
/// `z . y` over the spherical cap `{z in S : z . x >= gamma/2}` is `>= 0`.
///
/// The sample stream is split into fixed chunks with per-chunk seeds, so the
/// estimate is identical under sequential and parallel execution.
pub fn cap_fraction_monte_carlo(gamma: f64, n: usize, samples: usize, seed: u64, exec: Execution) -> f64 {
    const CHUNK: usize = 1 << 14;
    let h = gamma / 2.0;
    let rim = (1.0 - h * h).sqrt();
    let ranges = par::chunks(samples, CHUNK);
    let hits: Vec<usize> = par::map_slice(exec, &ranges, |range| {
        let chunk_index = (range.start / CHUNK) as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ chunk_index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut y = vec![0.0f64; n];
        let mut count = 0;
        for _ in range.clone() {
            let mut norm = 0.0;
            while norm == 0.0 {
                for c in y.iter_mut() {
                    *c = rng.sample(StandardNormal);
                }
                norm = y.iter().map(|c| c * c).sum::<f64>().sqrt();
            }
            // x = e_1
            let along = y[0] / norm;
            let across = (1.0 - along * along).max(0.0).sqrt();
            let min_over_cap = if n == 1 {
                // the cap is the single point x
                along
            } else if -along >= h {
                -1.0
            } else {
                h * along - rim * across
            };
            if min_over_cap >= 0.0 {
                count += 1;
            }
        }
        count
    });
    hits.iter().sum::<usize>() as f64 / samples as f64
}

/// Smallest `b` with `2^-b <= tol`.
fn bits_for(tol: &Q) -> u32 {
    let mut b = 0u32;
    let mut scale = Q::one();
    while scale > *tol {
        scale /= Q::from_integer(BigInt::from(2));
        b += 1;
    }
    b
}

/// Exact rational unit vector within `tol` of `v / |v|`.
///
/// Uses inverse stereographic projection from the pole opposite the dominant
/// axis: rational points of the projection plane map to rational points of
/// the unit sphere, and every rational point of the sphere arises this way.
pub fn rational_unit_direction(v: &[Q], tol: &Q) -> Result<Vec<Q>> {
    if v.iter().all(Zero::is_zero) {
        return Err(Error::InvalidParams("cannot normalize the zero vector".into()));
    }
    if !tol.is_positive() {
        return Err(Error::InvalidParams("tolerance must be positive".into()));
    }
    // Clear denominators; the direction is unchanged.
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let w: Vec<BigInt> = v.iter().map(|x| (x * qb(&lcm)).to_integer()).collect();
    let n = w.len();
    let k = (0..n)
        .max_by(|&i, &j| w[i].abs().cmp(&w[j].abs()).then(j.cmp(&i)))
        .expect("non-empty vector");
    let sign = if w[k].is_negative() { -Q::one() } else { Q::one() };
    if (0..n).all(|i| i == k || w[i].is_zero()) {
        let mut d = vec![Q::zero(); n];
        d[k] = sign;
        return Ok(d);
    }

    let w_norm_sq = rational::norm_sq_int(&w);
    let wq: Vec<Q> = w.iter().map(qb).collect();
    let cos_floor = Q::one() - tol * tol / Q::from_integer(BigInt::from(2));
    let mut bits = bits_for(tol) + 4;
    loop {
        let scale = BigInt::one() << bits;
        // floor(|w| * 2^bits)
        let norm_scaled = (&w_norm_sq * &scale * &scale).sqrt();
        let denom = norm_scaled + w[k].abs() * &scale;
        // s_i ≈ w_i / (|w| + |w_k|), rounded to the 2^-bits grid
        let s: Vec<Q> = (0..n)
            .filter(|&i| i != k)
            .map(|i| {
                let num = Q::new(&w[i] * &scale * &scale, denom.clone());
                Q::new(rational::round_half_even(&num), scale.clone())
            })
            .collect();
        let s_sq = norm_sq(&s);
        let denom_q = Q::one() + &s_sq;
        let mut d = Vec::with_capacity(n);
        let mut it = s.iter();
        for i in 0..n {
            if i == k {
                d.push(&sign * (Q::one() - &s_sq) / &denom_q);
            } else {
                let si = it.next().expect("one coordinate per non-pole axis");
                d.push(Q::from_integer(BigInt::from(2)) * si / &denom_q);
            }
        }
        debug_assert_eq!(norm_sq(&d), Q::one());
        // |d - w/|w||^2 < tol^2  <=>  d.w > (1 - tol^2/2) |w|
        let dw = dot(&d, &wq);
        let ok = if cos_floor.is_positive() {
            dw.is_positive() && &dw * &dw > &cos_floor * &cos_floor * qb(&w_norm_sq)
        } else {
            dw.is_positive()
        };
        if ok {
            return Ok(d);
        }
        bits += 8;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn pt(coords: &[Q]) -> Point {
        Point(coords.to_vec())
    }

    fn ball(coords: &[Q], r: Q) -> Ball {
        Ball::new(pt(coords), r).unwrap()
    }

    #[test]
    fn containment_examples() {
        let outer = ball(&[qi(0), qi(0)], qi(1));
        assert!(ball_contains(&outer, &ball(&[q(1, 2), qi(0)], q(1, 2))).unwrap());
        assert!(!ball_contains(&outer, &ball(&[q(3, 5), qi(0)], q(1, 2))).unwrap());
        assert!(ball_contains(&outer, &outer).unwrap());
        assert!(matches!(
            ball_contains(&outer, &ball(&[qi(0)], q(1, 2))),
            Err(Error::DimensionMismatch { .. })
        ));
        // larger inner radius can never be contained
        assert!(!ball_contains(&ball(&[qi(0)], qi(1)), &ball(&[qi(0)], qi(2))).unwrap());
    }

    #[test]
    fn residual_examples() {
        let h = Hyperplane::from_i64(&[3, 4], 0).unwrap();
        assert_eq!(resonance_residual(&pt(&[qi(1), qi(1)]), &h), qi(7));
        assert_eq!(resonance_residual(&pt(&[qi(4), qi(-3)]), &h), qi(0));
        let h1 = Hyperplane::from_i64(&[3], 1).unwrap();
        assert_eq!(resonance_residual(&pt(&[q(1, 3)]), &h1), qi(0));
        assert!(Hyperplane::from_i64(&[0, 0], 1).is_err());
    }

    #[test]
    fn halfspace_examples() {
        let h = Halfspace::new(vec![qi(1)], qi(0), Point::origin(1)).unwrap();
        assert!(halfspace_contains_ball(&h, &ball(&[qi(1)], q(1, 2))));
        assert!(!halfspace_contains_ball(&h, &ball(&[q(1, 4)], q(1, 2))));
        let h = Halfspace::new(vec![qi(1)], q(5, 16), Point::origin(1)).unwrap();
        assert!(halfspace_contains_ball(&h, &ball(&[q(1, 2)], q(1, 8))));
        assert!(Halfspace::new(vec![qi(1), qi(1)], qi(0), Point::origin(2)).is_err());
    }

    #[test]
    fn cap_fraction_closed_forms() {
        let g = q(5, 8);
        assert_eq!(cap_fraction(&g, 1).unwrap(), 0.5);
        let two = cap_fraction(&g, 2).unwrap();
        assert!((two - (5.0f64 / 16.0).asin() / std::f64::consts::PI).abs() < 1e-15);
        assert!((two - 0.101166).abs() < 5e-6);
        let three = cap_fraction(&g, 3).unwrap();
        let expected = (1.0 - (5.0f64 / 16.0).asin().cos()) / 2.0;
        assert!((three - expected).abs() < 1e-10);
        assert!((three - 0.025041).abs() < 5e-6);
        assert!(cap_fraction(&qi(1), 2).is_err());
        assert!(cap_fraction(&qi(0), 2).is_err());
    }

    #[test]
    fn unit_direction_examples() {
        let tol = q(1, 1000);
        assert_eq!(rational_unit_direction(&[qi(1), qi(0)], &tol).unwrap(), vec![qi(1), qi(0)]);
        assert_eq!(
            rational_unit_direction(&[qi(0), qi(0), qi(5)], &tol).unwrap(),
            vec![qi(0), qi(0), qi(1)]
        );
        assert_eq!(rational_unit_direction(&[qi(-3)], &tol).unwrap(), vec![qi(-1)]);
        let d = rational_unit_direction(&[qi(1), qi(1)], &tol).unwrap();
        assert_eq!(norm_sq(&d), Q::one());
        let err = (rational::to_f64(&d[0]) - 0.5f64.sqrt()).powi(2)
            + (rational::to_f64(&d[1]) - 0.5f64.sqrt()).powi(2);
        assert!(err < 1e-6);
        assert!(rational_unit_direction(&[qi(0), qi(0)], &tol).is_err());
    }

    #[test]
    fn unit_direction_beyond_f64_precision() {
        let tol = Q::new(BigInt::one(), BigInt::one() << 80);
        let v = vec![q(1, 3), q(-2, 7), q(5, 11)];
        let d = rational_unit_direction(&v, &tol).unwrap();
        assert_eq!(norm_sq(&d), Q::one());
        // d . v / |v| > 1 - tol^2/2, checked on squares
        let dv = dot(&d, &v);
        let c = Q::one() - &tol * &tol / qi(2);
        assert!(&dv * &dv > &c * &c * norm_sq(&v));
    }

    #[test]
    fn escape_cap_membership() {
        let g = q(5, 8);
        // same direction always inside, opposite never
        assert!(in_escape_cap(&[qi(1)], &[qi(1)], &g));
        assert!(!in_escape_cap(&[qi(-1)], &[qi(1)], &g));
        // (3/5, 4/5) vs (1, 0): cos = 3/5, cos^2 = 9/25 < 1 - 25/256
        assert!(!in_escape_cap(&[q(3, 5), q(4, 5)], &[qi(1), qi(0)], &g));
        // (24/25, 7/25): cos^2 = 576/625 = 0.9216 > 0.90234
        assert!(in_escape_cap(&[q(24, 25), q(7, 25)], &[qi(1), qi(0)], &g));
    }

    #[test]
    fn solid_cap_miss_one_dimensional() {
        let b = ball(&[qi(0)], qi(1));
        let h = q(5, 16);
        // plane 10y = 3 sits below the cap [5/16, 1]
        let p = Hyperplane::from_i64(&[10], 3).unwrap();
        assert!(plane_misses_cap(&b, &[qi(1)], &h, &p));
        // plane 2y = 1 is inside the cap
        let p = Hyperplane::from_i64(&[2], 1).unwrap();
        assert!(!plane_misses_cap(&b, &[qi(1)], &h, &p));
        // and misses the opposite cap [-1, -5/16]
        assert!(plane_misses_cap(&b, &[qi(-1)], &h, &p));
    }

    #[test]
    fn solid_cap_miss_matches_sampling() {
        // Compare the exact test with a dense sample of the solid cap in R^2.
        let b = ball(&[qi(0), qi(0)], qi(1));
        let x = [qi(1), qi(0)];
        let height = q(5, 16);
        let planes = [
            Hyperplane::from_i64(&[1, 0], 0).unwrap(),
            Hyperplane::from_i64(&[4, 3], 1).unwrap(),
            Hyperplane::from_i64(&[0, 1], 0).unwrap(),
            Hyperplane::from_i64(&[1, 1], -1).unwrap(),
            Hyperplane::from_i64(&[3, -1], 2).unwrap(),
            Hyperplane::from_i64(&[-2, 5], 4).unwrap(),
        ];
        for p in &planes {
            let exact = plane_misses_cap(&b, &x, &height, p);
            let (u0, u1, a) = (
                p.normal[0].to_string().parse::<f64>().unwrap(),
                p.normal[1].to_string().parse::<f64>().unwrap(),
                p.offset.to_string().parse::<f64>().unwrap(),
            );
            let (mut pos, mut neg) = (false, false);
            for i in 0..=400 {
                for j in 0..=400 {
                    let zx = 5.0 / 16.0 + (1.0 - 5.0 / 16.0) * i as f64 / 400.0;
                    let zy = -1.0 + 2.0 * j as f64 / 400.0;
                    if zx * zx + zy * zy > 1.0 {
                        continue;
                    }
                    let s = u0 * zx + u1 * zy - a;
                    pos |= s > 1e-9;
                    neg |= s < -1e-9;
                }
            }
            assert_eq!(exact, !(pos && neg), "plane {}", p.describe());
        }
    }

    #[test]
    fn distance_tests_on_squares() {
        let b = ball(&[qi(1), qi(1)], q(1, 10));
        let h = Hyperplane::from_i64(&[3, 4], 0).unwrap();
        // residual 7, |u| = 5: distance of the center 7/5, of the ball 13/10
        assert!(ball_plane_distance_exceeds(&b, &h, &q(129, 100)));
        assert!(!ball_plane_distance_exceeds(&b, &h, &q(13, 10)));
        // min residual over the ball = 7 - 5/10 = 13/2
        assert!(min_residual_exceeds(&b, &h, &q(649, 100)));
        assert!(!min_residual_exceeds(&b, &h, &q(13, 2)));
        let lb = min_residual_lower_bound(&b, &h, 40);
        assert!(lb <= q(13, 2) && lb > q(649, 100));
    }

    #[test]
    fn monte_carlo_agrees_with_closed_form() {
        for n in [1usize, 2, 3] {
            let mc = cap_fraction_monte_carlo(0.625, n, 200_000, 7, Execution::default());
            let exact = cap_fraction(&q(5, 8), n).unwrap();
            assert!((mc - exact).abs() < 5e-3, "n={n}: {mc} vs {exact}");
        }
    }

    #[test]
    fn monte_carlo_deterministic_across_execution() {
        let a = cap_fraction_monte_carlo(0.5, 3, 50_000, 3, Execution::Sequential);
        let b = cap_fraction_monte_carlo(0.5, 3, 50_000, 3, Execution::Parallel);
        assert_eq!(a, b);
    }
}
