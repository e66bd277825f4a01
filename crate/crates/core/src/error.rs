use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("graphs support at most {max} vertices, got {n}")]
    TooManyVertices { n: usize, max: usize },

    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),

    #[error("graph is not chordal: chordless cycle {cycle:?}")]
    NotChordal { cycle: Vec<usize> },

    #[error("ordering is not a perfect ordering: {0}")]
    NotPerfect(String),

    #[error("prefix vertices {0:?} are not mutually adjacent")]
    PrefixNotComplete(Vec<usize>),

    #[error("directed cycle through vertex {0}")]
    Cyclic(usize),

    #[error("invalid vertex sets: {0}")]
    InvalidSets(String),

    #[error("illegal move: {0}")]
    IllegalMove(String),

    #[error("vertex count mismatch: {left} vs {right}")]
    VertexMismatch { left: usize, right: usize },

    #[error("{what} exceeds the enumeration bound ({value} > {bound})")]
    BoundExceeded {
        what: &'static str,
        value: usize,
        bound: usize,
    },

    #[error("equivalent sample size must be positive, got {0}")]
    InvalidEss(f64),

    #[error("invalid data: {0}")]
    Data(String),

    #[error("invalid model: {0}")]
    Model(String),

    #[error("zero probability assigned to observed row {0}")]
    ZeroProbability(usize),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid config: {path}: {msg}")]
    Config { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
