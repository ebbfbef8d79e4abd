//! Solver library for the maximum weight metric triangle packing problem.
//!
//! The pipeline computes a maximum weight cycle packing, splits it into
//! short cycles, derives three candidate triangle packings (a cycle-local
//! dynamic program, a matching completion, and a derandomized
//! triplet-matching construction) and returns the best of the three.
//! Exact brute-force oracles, Monte-Carlo probability estimators, and a
//! small linear-program certificate are included so every bound the
//! solver relies on can be checked at small scale.

pub mod classify;
pub mod cyclepack;
pub mod exact;
pub mod instance;
pub mod matching;
pub mod pack1;
pub mod pack2;
pub mod pack3;
pub mod packing;
pub mod pipeline;
pub mod tradeoff;
pub mod verify;

mod blossom;

pub use instance::MetricInstance;
pub use packing::{Matching, OrientedCyclePacking, Triangle, TrianglePacking};

/// Errors produced by solver entry points.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error(
        "metric violation: w({i},{j}) = {wij} > w({i},{k}) + w({k},{j}) = {detour} (tol {tol})"
    )]
    MetricViolation {
        i: usize,
        j: usize,
        k: usize,
        wij: f64,
        detour: f64,
        tol: f64,
    },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("structural error: {0}")]
    Structural(String),
    #[error("instance too large: {0}")]
    SizeLimit(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
