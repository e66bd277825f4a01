use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use super::catalog::ChordalCatalog;
use super::greedy_optimality::analyze_target;
use crate::depmodel::{inclusion_optimal, DependencyModel, IndependenceSet, StatementSpace};
use crate::error::Result;
use crate::graph::{ChordalGraph, Dag, VertexSet};
use crate::search::{inclusion_boundary, OracleScore};

/// Every labeled DAG on `n` vertices, in a fixed order.
pub fn enumerate_dags(n: usize) -> Vec<Dag> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut parents = vec![VertexSet::EMPTY; n];
        for &(a, b) in &pairs {
            match c % 3 {
                1 => parents[b].insert(a),
                2 => parents[a].insert(b),
                _ => {}
            }
            c /= 3;
        }
        if let Ok(d) = Dag::from_parents(parents) {
            out.push(d);
        }
    }
    out
}

/// Distinct dependency models among `models`, keeping the first representative of each.
fn distinct_models(
    models: Vec<DependencyModel>,
    space: &StatementSpace,
) -> Result<Vec<DependencyModel>> {
    let mut seen: HashSet<IndependenceSet> = HashSet::new();
    let mut out = Vec::new();
    for m in models {
        if seen.insert(space.materialize(&m)?) {
            out.push(m);
        }
    }
    Ok(out)
}

/// A latent-variable target with a local optimum of the oracle score that is
/// not inclusion-optimal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatentWitness {
    /// Arrows of the generating DAG on all five vertices.
    pub dag: Vec<(usize, usize)>,
    pub latent: usize,
    /// Lines of the offending local optimum, over observed indices.
    pub graph: Vec<(usize, usize)>,
    pub score: (i64, i64),
    pub weight_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatentSearchReport {
    pub dags: usize,
    pub distinct_models: usize,
    pub uncertified: usize,
    pub witness: Option<LatentWitness>,
    pub witness_is_local_optimum: Option<bool>,
    pub witness_not_inclusion_optimal: Option<bool>,
}

impl LatentSearchReport {
    pub fn passed(&self) -> bool {
        self.witness.is_some()
            && self.witness_is_local_optimum == Some(true)
            && self.witness_not_inclusion_optimal == Some(true)
    }
}

const LATENT_VERTEX: usize = 4;

/// Searches DAGs on five vertices with vertex 4 hidden for a marginal model
/// whose oracle score has a local optimum over chordal graphs on the four
/// observed variables that is not inclusion-optimal.
pub fn find_nonoptimal_local_optimum() -> Result<LatentSearchReport> {
    let dags = enumerate_dags(LATENT_VERTEX + 1);
    let space = StatementSpace::new(LATENT_VERTEX)?;
    let models = dags
        .iter()
        .map(|d| DependencyModel::latent(d.clone(), VertexSet::singleton(LATENT_VERTEX)))
        .collect::<Result<Vec<_>>>()?;
    let models = distinct_models(models, &space)?;
    let catalog = ChordalCatalog::new(LATENT_VERTEX)?;
    let outcomes: Vec<Option<(OracleScore, Option<(usize, (i64, i64))>)>> = models
        .par_iter()
        .map(|m| {
            let (oracle, check) = OracleScore::certified(m.clone(), &catalog)?;
            if !check.passed() {
                return Ok(None);
            }
            let o = analyze_target(&oracle, &catalog, false)?;
            Ok(Some((oracle, o.non_optimal.first().copied())))
        })
        .collect::<Result<_>>()?;

    let mut report = LatentSearchReport {
        dags: dags.len(),
        distinct_models: models.len(),
        uncertified: outcomes.iter().filter(|o| o.is_none()).count(),
        witness: None,
        witness_is_local_optimum: None,
        witness_not_inclusion_optimal: None,
    };
    let found = outcomes
        .into_iter()
        .flatten()
        .find_map(|(oracle, hit)| hit.map(|h| (oracle, h)));
    if let Some((oracle, (i, score))) = found {
        let crate::depmodel::Backend::Latent { dag, .. } = oracle.target().backend() else {
            unreachable!("latent search builds latent models");
        };
        let seed = match oracle.kind() {
            crate::search::OracleKind::Gaussian { seed } => seed,
            crate::search::OracleKind::Coverage => 0,
        };
        let witness = LatentWitness {
            dag: dag.edges(),
            latent: LATENT_VERTEX,
            graph: catalog.graph(i).lines().collect(),
            score,
            weight_seed: seed,
        };
        let (local, not_optimal) = recheck_witness(&witness)?;
        report.witness = Some(witness);
        report.witness_is_local_optimum = Some(local);
        report.witness_not_inclusion_optimal = Some(not_optimal);
    }
    Ok(report)
}

/// Recomputes a witness from scratch: whether no inclusion-boundary neighbour
/// scores higher, and whether the graph fails inclusion-optimality.
pub fn recheck_witness(w: &LatentWitness) -> Result<(bool, bool)> {
    let n = w
        .dag
        .iter()
        .map(|&(a, b)| a.max(b) + 1)
        .max()
        .unwrap_or(0)
        .max(w.latent + 1);
    let dag = Dag::from_edges(n, w.dag.iter().copied())?;
    let target = DependencyModel::latent(dag, VertexSet::singleton(w.latent))?;
    let oracle = OracleScore::with_seed(target.clone(), w.weight_seed)?;
    let g = ChordalGraph::new(crate::graph::UndirectedGraph::from_lines(
        target.n_observed(),
        w.graph.iter().copied(),
    )?)?;
    let here = oracle.eval(&g)?;
    let mut local = here == w.score;
    for mv in inclusion_boundary(&g) {
        if oracle.eval(&mv.apply(&g)?)? > here {
            local = false;
        }
    }
    Ok((local, !inclusion_optimal(&g, &target)?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DagProbeReport {
    pub n: usize,
    pub dags: usize,
    pub distinct_models: usize,
    pub uncertified: usize,
    pub local_optima: usize,
    /// Targets with a local optimum that is not inclusion-optimal.
    pub targets_with_nonoptimal_optima: usize,
    pub example: Option<(Vec<(usize, usize)>, Vec<(usize, usize)>)>,
}

/// Runs the oracle-score landscape check on every DAG model on `n` vertices;
/// a report, not a pass/fail test.
pub fn dag_conjecture_probe(n: usize) -> Result<DagProbeReport> {
    let dags = enumerate_dags(n);
    let space = StatementSpace::new(n)?;
    let models = distinct_models(
        dags.iter().cloned().map(DependencyModel::dag).collect(),
        &space,
    )?;
    let catalog = ChordalCatalog::new(n)?;
    let outcomes: Vec<_> = models
        .par_iter()
        .map(|m| {
            let (oracle, check) = OracleScore::certified(m.clone(), &catalog)?;
            if !check.passed() {
                return Ok(None);
            }
            Ok(Some(analyze_target(&oracle, &catalog, false)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = DagProbeReport {
        n,
        dags: dags.len(),
        distinct_models: models.len(),
        uncertified: outcomes.iter().filter(|o| o.is_none()).count(),
        local_optima: 0,
        targets_with_nonoptimal_optima: 0,
        example: None,
    };
    for (m, o) in models.iter().zip(&outcomes) {
        let Some(o) = o else { continue };
        report.local_optima += o.local_optima.len();
        if let Some(&(i, _)) = o.non_optimal.first() {
            report.targets_with_nonoptimal_optima += 1;
            if report.example.is_none() {
                let crate::depmodel::Backend::Dag { dag } = m.backend() else {
                    unreachable!()
                };
                report.example = Some((dag.edges(), catalog.graph(i).lines().collect()));
            }
        }
    }
    Ok(report)
}
