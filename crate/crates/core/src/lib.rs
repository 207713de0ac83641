//! Entropy and pressure of nonautonomous dynamical systems, computed on
//! finite carriers.
//!
//! A nonautonomous dynamical system (NDS) is a sequence of compact metric
//! spaces `X_k` with maps `T_k: X_k -> X_{k+1}`. This crate models every
//! `X_k` by a finite carrier (symbolic words, interval grids, point clouds)
//! and evaluates:
//!
//! - Bowen metrics, Bowen balls and Birkhoff sums ([`nds`]);
//! - a zoo of systems with known answers ([`systems`]);
//! - separated/spanning sets and the 5r / 3ε disjoint-subfamily selections
//!   ([`covering`]);
//! - Carathéodory cover, packing and weighted-cover values, their critical
//!   exponents and the Bowen/packing pressure estimators ([`pressure`]);
//! - local and integrated measure-theoretic pressures and the finite
//!   Frostman dual ([`measures`]).
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![deny(missing_docs)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod bits;
pub mod covering;
mod error;
pub mod lp;
pub mod math;
pub mod measures;
pub mod nds;
pub mod pressure;
pub mod setcover;
pub mod systems;

pub use error::NdsError;
pub use nds::{
    birkhoff_sum, bowen_ball_points, bowen_ball_points_intersection, bowen_distance, compose,
    BackendKind, BowenBallSpec, LevelInfo, NdSystem, NormBound, PotentialSeq,
};

/// Result alias used across the crate.
pub type Result<T> = core::result::Result<T, NdsError>;
