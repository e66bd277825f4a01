//! Exhaustive, desk-scale checks of the theory behind the learner.

mod axiom_sweeps;
mod catalog;
mod chain;
mod chordality;
mod greedy_optimality;
mod latent;
mod suite;

pub use axiom_sweeps::{
    graphoid_sweep, sep_chain_sweep, GraphoidSweep, SepChainFailure, SepChainSweep,
};
pub use catalog::{ChordalCatalog, CATALOG_BOUND};
pub use chain::{chain_sweep, chordal_chain, ChainSweep};
pub use chordality::{
    chordality_cross_check, enumerate_chordal, naive_chordal, ChordalityCrossCheck,
};
pub use greedy_optimality::{
    analyze_target, verify_greedy_optimality, GreedyOptimalityOptions, GreedyOptimalityReport,
    TargetOutcome, Violation, GREEDY_OPTIMALITY_BOUND,
};
pub use latent::{
    dag_conjecture_probe, enumerate_dags, find_nonoptimal_local_optimum, recheck_witness,
    DagProbeReport, LatentSearchReport, LatentWitness,
};
pub use suite::{run_suite, self_check_sweep, SelfCheckSweep, SuiteReport, VerifyLevel};
