use serde::Serialize;

use super::axiom_sweeps::{graphoid_sweep, sep_chain_sweep, GraphoidSweep, SepChainSweep};
use super::catalog::ChordalCatalog;
use super::chain::{chain_sweep, ChainSweep};
use super::chordality::{chordality_cross_check, ChordalityCrossCheck};
use super::greedy_optimality::{
    verify_greedy_optimality, GreedyOptimalityOptions, GreedyOptimalityReport,
};
use super::latent::{
    dag_conjecture_probe, find_nonoptimal_local_optimum, DagProbeReport, LatentSearchReport,
};
use crate::depmodel::DependencyModel;
use crate::error::Result;
use crate::graph::UndirectedGraph;
use crate::search::OracleScore;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyLevel {
    /// Sweeps up to four vertices; seconds.
    Fast,
    /// Sweeps up to five vertices plus six-vertex chordality; minutes.
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelfCheckSweep {
    pub n: usize,
    pub targets: usize,
    pub graphs_per_target: usize,
    pub removals: usize,
    pub failing_targets: Vec<Vec<(usize, usize)>>,
}

impl SelfCheckSweep {
    pub fn passed(&self) -> bool {
        self.failing_targets.is_empty()
    }
}

/// Self-checks the oracle score for every undirected target on `n` vertices.
pub fn self_check_sweep(n: usize) -> Result<SelfCheckSweep> {
    let catalog = ChordalCatalog::new(n)?;
    let pairs = n * n.saturating_sub(1) / 2;
    let mut report = SelfCheckSweep {
        n,
        targets: 1 << pairs,
        graphs_per_target: catalog.len(),
        removals: 0,
        failing_targets: Vec::new(),
    };
    for mask in 0..1u64 << pairs {
        let t = UndirectedGraph::from_line_mask(n, mask);
        let check =
            OracleScore::new(DependencyModel::undirected(t.clone()))?.self_check(&catalog)?;
        report.removals += check.removals;
        if !check.passed() {
            report.failing_targets.push(t.lines().collect());
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub level: VerifyLevel,
    pub fault_injected: bool,
    pub passed: bool,
    pub chordality: Vec<ChordalityCrossCheck>,
    pub oracle_self_check: Vec<SelfCheckSweep>,
    pub greedy_optimality: Vec<GreedyOptimalityReport>,
    pub chain: Vec<ChainSweep>,
    pub graphoid: Vec<GraphoidSweep>,
    pub sep_chain: SepChainSweep,
    pub latent_counterexample: LatentSearchReport,
    /// Informational only; does not affect `passed`.
    pub dag_conjecture_probe: Option<DagProbeReport>,
}

/// Seed of the sampled lemma checks.
const SEP_CHAIN_SEED: u64 = 4;

/// Runs every verification sweep at the given level.
pub fn run_suite(level: VerifyLevel, inject_fault: bool) -> Result<SuiteReport> {
    let (theorem_max, chordality_max, lemma_samples) = match level {
        VerifyLevel::Fast => (4, 5, 1_000),
        VerifyLevel::Full => (5, 6, 10_000),
    };
    let chordality = (1..=chordality_max)
        .map(chordality_cross_check)
        .collect::<Result<Vec<_>>>()?;
    let oracle_self_check = (2..=4).map(self_check_sweep).collect::<Result<Vec<_>>>()?;
    let opts = GreedyOptimalityOptions {
        from_every_start: true,
        inject_fault,
    };
    let greedy_optimality = (3..=theorem_max)
        .map(|n| verify_greedy_optimality(n, opts))
        .collect::<Result<Vec<_>>>()?;
    let chain = (1..=theorem_max)
        .map(chain_sweep)
        .collect::<Result<Vec<_>>>()?;
    let graphoid = (1..=theorem_max)
        .map(graphoid_sweep)
        .collect::<Result<Vec<_>>>()?;
    let sep_chain = sep_chain_sweep(lemma_samples, 7, SEP_CHAIN_SEED)?;
    let latent_counterexample = find_nonoptimal_local_optimum()?;
    let dag_conjecture_probe = match level {
        VerifyLevel::Fast => None,
        VerifyLevel::Full => Some(dag_conjecture_probe(4)?),
    };
    let passed = chordality.iter().all(ChordalityCrossCheck::passed)
        && oracle_self_check.iter().all(SelfCheckSweep::passed)
        && greedy_optimality.iter().all(GreedyOptimalityReport::passed)
        && chain.iter().all(ChainSweep::passed)
        && graphoid.iter().all(GraphoidSweep::passed)
        && sep_chain.passed()
        && latent_counterexample.passed();
    Ok(SuiteReport {
        level,
        fault_injected: inject_fault,
        passed,
        chordality,
        oracle_self_check,
        greedy_optimality,
        chain,
        graphoid,
        sep_chain,
        latent_counterexample,
        dag_conjecture_probe,
    })
}
