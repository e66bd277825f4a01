use std::fmt;

use serde::{Serialize, Serializer};

use super::greedy::{fingerprint_pairs, BdeuScorer, SearchTrace, TraceStep, BDEU_MIN_IMPROVEMENT};
use crate::graph::{Dag, VertexSet};

/// Arrow moves, ordered additions, removals, reversals, then by endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DagMove {
    Add(usize, usize),
    Remove(usize, usize),
    Reverse(usize, usize),
}

impl fmt::Display for DagMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DagMove::Add(a, b) => write!(f, "add {a}->{b}"),
            DagMove::Remove(a, b) => write!(f, "remove {a}->{b}"),
            DagMove::Reverse(a, b) => write!(f, "reverse {a}->{b}"),
        }
    }
}

impl Serialize for DagMove {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn ancestors(parents: &[VertexSet], v: usize) -> VertexSet {
    let mut seen = VertexSet::EMPTY;
    let mut frontier = parents[v];
    while !frontier.is_empty() {
        seen = seen.union(frontier);
        let mut next = VertexSet::EMPTY;
        for u in frontier {
            next = next.union(parents[u]);
        }
        frontier = next.difference(seen);
    }
    seen
}

/// Best-improvement hill-climbing over DAGs from the empty graph, using single
/// arrow additions, removals and reversals that keep the graph acyclic.
pub fn greedy_dag(scorer: &BdeuScorer<'_>) -> (Dag, SearchTrace<DagMove>) {
    let data = scorer.data();
    let cache = scorer.cache();
    let n = data.n_vars();
    let f = |v: usize, pa: VertexSet| cache.local(data, v, pa);
    let mut parents = vec![VertexSet::EMPTY; n];
    let mut total: f64 = (0..n).map(|v| f(v, VertexSet::EMPTY)).sum();
    let mut trace = SearchTrace {
        initial_total: total,
        steps: Vec::new(),
        terminal: false,
    };
    loop {
        let anc: Vec<VertexSet> = (0..n).map(|v| ancestors(&parents, v)).collect();
        // Ties go to the smallest move, so the scan order does not matter.
        let mut best: Option<(DagMove, f64)> = None;
        let mut consider = |mv: DagMove, delta: f64| {
            let better = |(m, d): (DagMove, f64)| delta > d || (delta == d && mv < m);
            if delta > BDEU_MIN_IMPROVEMENT && best.is_none_or(better) {
                best = Some((mv, delta));
            }
        };
        for a in 0..n {
            for b in 0..n {
                // a -> b is addable unless it closes a cycle through b ⇝ a.
                if a != b
                    && !parents[b].contains(a)
                    && !parents[a].contains(b)
                    && !anc[a].contains(b)
                {
                    consider(
                        DagMove::Add(a, b),
                        f(b, parents[b].with(a)) - f(b, parents[b]),
                    );
                }
            }
        }
        for b in 0..n {
            for a in parents[b] {
                consider(
                    DagMove::Remove(a, b),
                    f(b, parents[b].without(a)) - f(b, parents[b]),
                );
            }
        }
        for b in 0..n {
            for a in parents[b] {
                // Reversing a -> b is legal iff no other directed path a ⇝ b exists.
                let others = parents[b].without(a);
                if others.iter().any(|p| anc[p].contains(a)) {
                    continue;
                }
                let delta =
                    f(b, others) - f(b, parents[b]) + f(a, parents[a].with(b)) - f(a, parents[a]);
                consider(DagMove::Reverse(a, b), delta);
            }
        }
        let Some((mv, delta)) = best else {
            trace.terminal = true;
            break;
        };
        match mv {
            DagMove::Add(a, b) => parents[b].insert(a),
            DagMove::Remove(a, b) => parents[b].remove(a),
            DagMove::Reverse(a, b) => {
                parents[b].remove(a);
                parents[a].insert(b);
            }
        }
        total = parents.iter().enumerate().map(|(v, &pa)| f(v, pa)).sum();
        let dag = Dag::from_parents(parents.clone()).expect("greedy moves keep the graph acyclic");
        trace.steps.push(TraceStep {
            step: trace.steps.len() + 1,
            fingerprint: fingerprint_pairs(n, dag.edges().into_iter()),
            mv,
            delta,
            total,
        });
    }
    (Dag::from_parents(parents).expect("acyclic"), trace)
}
