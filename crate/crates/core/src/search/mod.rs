//! Hill-climbing over chordal graphs and DAGs.

mod dag_search;
mod greedy;
mod moves;
mod oracle;

pub use dag_search::{greedy_dag, DagMove};
pub use greedy::{
    graph_fingerprint, greedy_chordal, BdeuScorer, Scorer, SearchPolicy, SearchTrace, Selection,
    TraceStep, BDEU_MIN_IMPROVEMENT,
};
pub use moves::{inclusion_boundary, inclusion_boundary_with_fault, Move, MoveKind};
pub use oracle::{oracle_score_eval, OracleKind, OracleScore, SelfCheck};
