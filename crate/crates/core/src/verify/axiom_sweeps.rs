use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::depmodel::{
    graphoid_report, sep_chain_holds, sep_chain_premise, Axiom, CheckMode, DependencyModel,
};
use crate::error::Result;
use crate::graph::{Dag, UndirectedGraph, VertexSet};
use crate::synth::rng_for;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphoidSweep {
    pub n: usize,
    pub models: usize,
    /// Line lists of undirected models failing some axiom.
    pub failures: Vec<Vec<(usize, usize)>>,
    /// Strong union must fail on the collider `0 → 2 ← 1`.
    pub collider_strong_union_violations: u64,
}

impl GraphoidSweep {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.collider_strong_union_violations > 0
    }
}

/// Exhaustive axiom check of every undirected model on `n` vertices.
pub fn graphoid_sweep(n: usize) -> Result<GraphoidSweep> {
    let pairs = n * n.saturating_sub(1) / 2;
    let failures: Vec<Option<Vec<(usize, usize)>>> = (0..1u64 << pairs)
        .into_par_iter()
        .map(|mask| {
            let g = UndirectedGraph::from_line_mask(n, mask);
            let r = graphoid_report(
                &DependencyModel::undirected(g.clone()),
                CheckMode::Exhaustive,
            )?;
            Ok((!r.passed()).then(|| g.lines().collect()))
        })
        .collect::<Result<_>>()?;
    let collider = Dag::from_edges(3, [(0, 2), (1, 2)])?;
    let cr = graphoid_report(&DependencyModel::dag(collider), CheckMode::Exhaustive)?;
    Ok(GraphoidSweep {
        n,
        models: failures.len(),
        failures: failures.into_iter().flatten().collect(),
        collider_strong_union_violations: cr.result(Axiom::StrongUnion).violations,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SepChainSweep {
    pub requested: usize,
    pub attempts: usize,
    pub premise_satisfied: usize,
    pub held: usize,
    pub failures: Vec<SepChainFailure>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SepChainFailure {
    pub graph: Vec<(usize, usize)>,
    pub chain: Vec<VertexSet>,
}

impl SepChainSweep {
    pub fn passed(&self) -> bool {
        self.premise_satisfied == self.requested && self.held == self.premise_satisfied
    }
}

fn random_graph<R: Rng>(n: usize, rng: &mut R) -> UndirectedGraph {
    let p: f64 = rng.random_range(0.2..0.7);
    let mut g = UndirectedGraph::empty(n);
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                g = g.with_line(a, b);
            }
        }
    }
    g
}

/// Breadth-first layers around a random vertex, cut at a random depth ≥ 3 and
/// ending in one vertex of the next layer; middle layers are optionally thinned.
fn layered_chain<R: Rng>(g: &UndirectedGraph, rng: &mut R) -> Option<Vec<VertexSet>> {
    let x = rng.random_range(0..g.n());
    let mut layers = vec![VertexSet::singleton(x)];
    let mut seen = layers[0];
    loop {
        let mut next = VertexSet::EMPTY;
        for v in *layers.last().unwrap() {
            next = next.union(g.neighbors(v));
        }
        let next = next.difference(seen);
        if next.is_empty() {
            break;
        }
        seen = seen.union(next);
        layers.push(next);
    }
    if layers.len() < 4 {
        return None;
    }
    let k = rng.random_range(3..layers.len());
    let ys = layers[k].to_vec();
    let y = ys[rng.random_range(0..ys.len())];
    let thin = rng.random_bool(0.5);
    let mut chain = vec![layers[0]];
    for layer in &layers[1..k] {
        let mut set = *layer;
        if thin {
            let kept: VertexSet = layer.iter().filter(|_| rng.random_bool(0.7)).collect();
            if !kept.is_empty() {
                set = kept;
            }
        }
        chain.push(set);
    }
    chain.push(VertexSet::singleton(y));
    Some(chain)
}

/// Random disjoint sets with singleton ends.
fn random_chain<R: Rng>(n: usize, rng: &mut R) -> Vec<VertexSet> {
    let mut vs: Vec<usize> = (0..n).collect();
    vs.shuffle(rng);
    let len = rng.random_range(4..=n);
    let k = rng.random_range(4..=len);
    let (ends, middle) = vs[..len].split_at(2);
    let mut chain = vec![VertexSet::singleton(ends[0])];
    let mut sets = vec![VertexSet::EMPTY; k - 2];
    for (i, &v) in middle.iter().enumerate() {
        let slot = if i < k - 2 {
            i
        } else {
            rng.random_range(0..k - 2)
        };
        sets[slot].insert(v);
    }
    chain.extend(sets);
    chain.push(VertexSet::singleton(ends[1]));
    chain
}

/// Samples premise-satisfying chains in random undirected models on 4 to
/// `max_n` vertices until `samples` are found, checking the lemma on each.
pub fn sep_chain_sweep(samples: usize, max_n: usize, seed: u64) -> Result<SepChainSweep> {
    let mut rng = rng_for(seed, 0x1e44a);
    let mut report = SepChainSweep {
        requested: samples,
        attempts: 0,
        premise_satisfied: 0,
        held: 0,
        failures: Vec::new(),
    };
    let max_attempts = samples.saturating_mul(200).max(1000);
    while report.premise_satisfied < samples && report.attempts < max_attempts {
        report.attempts += 1;
        let n = rng.random_range(4..=max_n.max(4));
        let g = random_graph(n, &mut rng);
        let chain = if report.attempts % 2 == 0 {
            match layered_chain(&g, &mut rng) {
                Some(c) => c,
                None => continue,
            }
        } else {
            random_chain(n, &mut rng)
        };
        let m = DependencyModel::undirected(g.clone());
        if !sep_chain_premise(&m, &chain)? {
            continue;
        }
        report.premise_satisfied += 1;
        if sep_chain_holds(&m, &chain)? {
            report.held += 1;
        } else if report.failures.len() < 20 {
            report.failures.push(SepChainFailure {
                graph: g.lines().collect(),
                chain,
            });
        }
    }
    Ok(report)
}
