// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("token label mismatch between matrices")]
    LabelMismatch,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("no cycle: throughput unbounded by initial tokens")]
    NoCycle,

    #[error("graph not consistent: {0}")]
    Inconsistent(String),

    #[error("unsupported rate structure: {0}")]
    UnsupportedRateStructure(String),

    #[error("deadlocked cycle: {0}")]
    DeadlockedCycle(String),

    #[error("graph not live: {0}")]
    NotLive(String),

    #[error("unsupported pattern at actor {actor} (schedule position {position}): {detail}")]
    UnsupportedPattern {
        actor: String,
        position: usize,
        detail: String,
    },

    #[error("schedule error: {0}")]
    Schedule(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("binding error: {0}")]
    Binding(String),

    #[error("infeasible region: {0}")]
    Infeasible(String),

    #[error("point outside region: {0}; look up the region containing the point first")]
    OutsideRegion(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("arithmetic overflow: {0}")]
    Overflow(String),
}
