mod common;

use common::*;
use num_bigint::BigInt;
use proptest::prelude::*;

use schmidt_core::certify::{resonance_margin, theorem1_constant, theorem1_constant_with};
use schmidt_core::game::{legal_reply, GameParams, GameState, Player};
use schmidt_core::geometry::{plane_misses_cap, rational_unit_direction, Ball, Hyperplane, Point};
use schmidt_core::par::Execution;
use schmidt_core::rational::{fmt_q, parse_q};
use schmidt_core::resonance::{lacunary_normalize, Approximation, ResonanceSequence, ThetaMatrix};

fn rational(range: i64, den: i64) -> impl Strategy<Value = Q> {
    (-range..=range, 1..=den).prop_map(|(n, d)| q(n, d))
}

fn point(dim: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(rational(40, 16), dim)
}

fn normal(dim: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-7i64..=7, dim).prop_filter("nonzero", |v| v.iter().any(|&c| c != 0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rationals_round_trip(x in rational(1_000_000, 1_000_000)) {
        prop_assert_eq!(parse_q(&fmt_q(&x)).unwrap(), x);
    }

    #[test]
    fn legal_reply_is_nesting(
        (c, d) in (1usize..=3).prop_flat_map(|n| (point(n), point(n))),
        rho in 1i64..=64,
        turn_black in any::<bool>(),
    ) {
        let params = GameParams::new(q(1, 4), q(1, 2), c.len()).unwrap();
        let turn = if turn_black { Player::Black } else { Player::White };
        let state = GameState {
            params: params.clone(),
            current: Ball::new(Point::new(c.clone()), q(rho, 8)).unwrap(),
            turn,
            move_index: usize::from(turn_black),
        };
        let factor = if turn_black { q(1, 2) } else { q(1, 4) };
        let slack = q(rho, 8) * (qi(1) - factor);
        let diff: Vec<Q> = d.iter().zip(&c).map(|(a, b)| a - b).collect();
        prop_assert_eq!(legal_reply(&state, &Point::new(d)), norm_sq(&diff) <= &slack * &slack);
    }

    #[test]
    fn cap_miss_matches_disk_oracle(
        (c, x, u) in (1usize..=3).prop_flat_map(|n| (point(n), point(n), normal(n))),
        rho in 1i64..=32,
        a_shift in -3i64..=3,
        gamma_num in 1i64..=15,
    ) {
        prop_assume!(x.iter().any(|v| *v != qi(0)));
        let x = rational_unit_direction(&x, &q(1, 1 << 20)).unwrap();
        let ball = Ball::new(Point::new(c.clone()), q(rho, 8)).unwrap();
        let uq: Vec<Q> = u.iter().map(|&v| qi(v)).collect();
        let a = dot(&uq, &c).round().to_integer() + BigInt::from(a_shift);
        let plane = Hyperplane::new(u.iter().map(|&v| BigInt::from(v)).collect(), a.clone()).unwrap();
        let h = q(gamma_num, 16) * q(rho, 8) / qi(2);
        prop_assert_eq!(
            plane_misses_cap(&ball, &x, &h, &plane),
            oracle_plane_misses_cap(&c, &q(rho, 8), &x, &h, &plane.normal, &a)
        );
    }

    #[test]
    fn lacunary_output_stays_in_window(
        steps in prop::collection::vec(1i64..=200, 1..12),
        m_num in 5i64..=16,
    ) {
        let m = q(m_num, 4);
        let mut size = 1i64;
        let seq: Vec<Approximation> = steps
            .iter()
            .map(|s| {
                size += s;
                Approximation {
                    u: vec![BigInt::from(size)],
                    t_sq: BigInt::from(size * size),
                    quality: q(1, size),
                }
            })
            .collect();
        let out = lacunary_normalize(&seq, &m).unwrap();
        prop_assert_eq!(out.vector(1), &seq[0].u[..]);
        prop_assert!(out.validate().is_ok());
        let m2 = &m * &m;
        for r in 2..=out.len() {
            let ratio = Q::from_integer(out.t_sq(r).clone()) / Q::from_integer(out.t_sq(r - 1).clone());
            prop_assert!(ratio >= m2 && ratio <= &m2 * &m2);
        }
    }

    #[test]
    fn margin_is_periodic(
        sizes_idx in 1usize..=4,
        eta in rational(50, 97),
        shift in -5i64..=5,
    ) {
        let lambda = ResonanceSequence::from_sizes(&[1, 3, 13, 55, 233][..=sizes_idx], &qi(3)).unwrap();
        let r = lambda.len();
        prop_assert_eq!(
            resonance_margin(&lambda, &[eta.clone()], r).unwrap(),
            resonance_margin(&lambda, &[eta + qi(shift)], r).unwrap()
        );
    }

    #[test]
    fn theorem1_non_increasing_and_execution_independent(
        num in 1i64..=996,
        eta in 0i64..=996,
        n1 in 1u64..=60,
        extra in 0u64..=60,
    ) {
        let theta = ThetaMatrix::scalar(q(num, 997));
        let eta = [q(eta, 997)];
        let small = theorem1_constant(&theta, &eta, n1).unwrap();
        let large = theorem1_constant(&theta, &eta, n1 + extra).unwrap();
        prop_assert!(large.value <= small.value);
        let seq = theorem1_constant_with(&theta, &eta, n1 + extra, Execution::Sequential).unwrap();
        prop_assert_eq!(seq, large);
    }
}
