//! Learning inclusion-optimal chordal graphical models from discrete data.
//!
//! The learner is a greedy hill-climber over chordal graphs whose neighbourhood
//! is the set of single-line additions and removals that keep the graph chordal.
//! Around it sit a decomposable BDeu scorer with incremental move deltas, a
//! greedy DAG comparator, synthetic data generation, evaluation metrics, and a
//! set of exhaustive checkers for the theory behind the learner.

pub mod data;
pub mod depmodel;
pub mod error;
pub mod eval;
pub mod graph;
pub mod harness;
pub mod scoring;
pub mod search;
pub mod synth;
pub mod verify;

pub use error::{Error, Result};
