//! Graph representations and the structural algorithms the learners rely on.

mod chordal;
mod dag;
pub mod text;
mod undirected;
mod vertex_set;

pub use chordal::{
    chordal, is_chordal, is_perfect_ordering, min_fill_chordalize, ChordalGraph, Chordality,
};
pub use dag::{orient_by_ordering, Dag};
pub use undirected::{line_index, UndirectedGraph};
pub use vertex_set::{VertexIter, VertexSet, MAX_VERTICES};
