use thiserror::Error;

/// Errors produced by the approximation and potential-theory routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("point {z} lies within {distance:e} of a cut or branch point")]
    NearSingularity { z: String, distance: f64 },

    #[error("series too short: need {needed} coefficients (indices 0..={max_index}), have {available}")]
    Truncation {
        needed: usize,
        max_index: usize,
        available: usize,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid compact: {0}")]
    InvalidCompact(String),

    #[error("discretization too coarse: {0}; increase the panel count")]
    Resolution(String),

    #[error("unsupported function family: {0}")]
    UnsupportedFamily(String),

    #[error("maximum of the energy attained at the family boundary (u = {u}); the stationary compact lies outside the circline-arc family")]
    FamilyInsufficiency { u: f64 },

    #[error("capacity filter excluded {excluded} of {total} (n, point) pairs, above the {limit_pct}% limit")]
    FilterOverflow {
        excluded: usize,
        total: usize,
        limit_pct: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
