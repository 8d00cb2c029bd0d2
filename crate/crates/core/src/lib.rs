//! Exact-arithmetic toolkit for Schmidt's `(alpha, beta)`-game.
//!
//! White's strategy steers the nested balls clear of a lacunary family of
//! resonance hyperplanes `u^(r) . y = a`, which forces the limit point `eta`
//! to satisfy `||u^(r) . eta|| > epsilon` for every handled `r`. The
//! [`certify`] module measures the resulting badness by brute force,
//! independently of the game code.
//!
//! All geometry is exact: points and radii are rationals, norms of integer
//! vectors are compared through their squares.

pub mod adversaries;
pub mod certify;
pub mod error;
pub mod escape;
pub mod game;
pub mod geometry;
pub mod par;
pub mod rational;
pub mod resonance;
pub mod schedule;
pub mod strategy;

pub use error::{Error, Result};
pub use rational::Q;
