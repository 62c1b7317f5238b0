// SPDX-License-Identifier: Apache-2.0
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series live in different ring contexts")]
    ContextMismatch,
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("invalid ring context: {0}")]
    InvalidContext(String),
    #[error("term of formal degree 0 where the maximal ideal is required: {0}")]
    NotInMaximalIdeal(String),
    #[error("zero lattice vector")]
    ZeroVector,
    #[error("invalid wall: {0}")]
    InvalidWall(String),
    #[error("log derivation does not decompose into z^m d_n terms: {0}")]
    Decomposition(String),
    #[error("start direction is parallel to a crossed wall")]
    DegenerateLoop,
    #[error("collision rule: {0}")]
    Collision(String),
    #[error("no generic perturbation found after {attempts} attempts (last seed {last_seed})")]
    Genericity { attempts: u32, last_seed: u64 },
    #[error("invalid tropical data: {0}")]
    Tropical(String),
    #[error("order {have} is too small, at least {need} is required")]
    InsufficientOrder { have: u32, need: u32 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
