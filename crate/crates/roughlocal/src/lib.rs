//! Numerics for local times of Lévy processes: path simulation, local-time
//! estimators, exact p-variation, rough-path lifts over `(L_t^x, g(x))`, Young
//! and rough-path integrals, and a verification harness for the extended
//! Itô–Tanaka formula.

pub mod checks;
pub mod config;
pub mod integrate;
pub mod ito;
pub mod levy;
pub mod lift;
pub mod local_time;
pub mod numerics;
pub mod path;
pub mod qvar;
pub mod variation;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("jump intensity is infinite at truncation level {eps}")]
    InfiniteJumpRate { eps: f64 },
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("curve needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("Young condition violated: 1/p + 1/q = {sum:.4} <= 1 (p={p}, q={q})")]
    YoungCondition { p: f64, q: f64, sum: f64 },
    #[error("sample points are not aligned with the partition")]
    MisalignedSamples,
    #[error("theta={theta} must lie in ({lo}, {hi})")]
    ThetaRange { theta: f64, lo: f64, hi: f64 },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
