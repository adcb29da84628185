// SPDX-License-Identifier: Apache-2.0
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("round count {0} is outside 1..=8")]
    InvalidRounds(usize),

    #[error("expected {expected} hex digits ({bits} bits), got {got}")]
    HexWidth {
        bits: u32,
        expected: usize,
        got: usize,
    },

    #[error("invalid hex string {0:?}")]
    InvalidHex(String),

    #[error("equivalence class is empty: {0}")]
    EmptyClass(&'static str),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("need at least 3 known pairs, got {0}")]
    TooFewPairs(usize),

    #[error(
        "scan of {requested} keys exceeds the in-memory budget of {limit} keys; \
         lower --keys or --compare-bits, or use the bucketed on-disk mode"
    )]
    Capacity { requested: u64, limit: u64 },

    #[error("{path}:{line}: {msg}")]
    VectorParse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
