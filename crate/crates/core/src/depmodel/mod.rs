//! Conditional-independence oracles and the machinery built on them: statement
//! enumeration, model inclusion, inclusion-optimality, and axiom checkers.

mod axioms;
mod inclusion;
mod model;
mod space;
mod statement;

pub use axioms::{
    graphoid_report, sep_chain_holds, sep_chain_premise, Axiom, AxiomCounterexample, AxiomResult,
    CheckMode, GraphoidReport, GRAPHOID_EXHAUSTIVE_BOUND,
};
pub use inclusion::{
    inclusion_optimal, model_included, model_included_exhaustive, model_included_pairwise,
    Inclusion,
};
pub use model::{Backend, DependencyModel};
pub use space::{enumerate_independencies, IndependenceSet, StatementSpace, ENUMERATION_BOUND};
pub use statement::IndependenceStatement;
