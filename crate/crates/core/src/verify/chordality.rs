use serde::Serialize;

use super::catalog::{ChordalCatalog, CATALOG_BOUND};
use crate::error::{Error, Result};
use crate::graph::{chordal, is_chordal, ChordalGraph, Chordality, UndirectedGraph, VertexSet};

/// Chordality by brute force: a graph is chordal iff no vertex subset of size
/// at least four induces a cycle.
pub fn naive_chordal(g: &UndirectedGraph) -> bool {
    let n = g.n();
    assert!(n <= 16, "naive oracle is exponential");
    (0u64..1 << n)
        .map(VertexSet::from_bits)
        .filter(|s| s.len() >= 4)
        .all(|s| !induces_cycle(g, s))
}

fn induces_cycle(g: &UndirectedGraph, s: VertexSet) -> bool {
    let start = VertexSet::singleton(s.first().unwrap());
    let outside = g.vertices().difference(s);
    s.iter().all(|v| g.neighbors(v).intersection(s).len() == 2) && g.reachable(start, outside) == s
}

/// All labeled chordal graphs on `n ≤ 6` vertices, in line-mask order.
pub fn enumerate_chordal(n: usize) -> Result<Vec<ChordalGraph>> {
    Ok(ChordalCatalog::new(n)?.graphs().to_vec())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChordalityCrossCheck {
    pub n: usize,
    pub graphs: usize,
    pub chordal: usize,
    /// Graphs where the fast test and the naive oracle disagree, or where a
    /// returned ordering or witness cycle is invalid.
    pub disagreements: Vec<Vec<(usize, usize)>>,
}

impl ChordalityCrossCheck {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
    }
}

fn cycle_is_chordless(g: &UndirectedGraph, cycle: &[usize]) -> bool {
    let k = cycle.len();
    let set: VertexSet = cycle.iter().collect();
    k >= 4
        && set.len() == k
        && (0..k).all(|i| g.has_line(cycle[i], cycle[(i + 1) % k]))
        && induces_cycle(g, set)
}

/// Runs the fast chordality test and the naive oracle on every labeled graph on `n` vertices.
pub fn chordality_cross_check(n: usize) -> Result<ChordalityCrossCheck> {
    if n > CATALOG_BOUND {
        return Err(Error::BoundExceeded {
            what: "chordality cross-check size",
            value: n,
            bound: CATALOG_BOUND,
        });
    }
    let pairs = n * n.saturating_sub(1) / 2;
    let mut report = ChordalityCrossCheck {
        n,
        graphs: 1 << pairs,
        chordal: 0,
        disagreements: Vec::new(),
    };
    for mask in 0..1u64 << pairs {
        let g = UndirectedGraph::from_line_mask(n, mask);
        let naive = naive_chordal(&g);
        let ok = match is_chordal(&g) {
            Chordality::Chordal(order) => naive && crate::graph::is_perfect_ordering(&g, &order),
            Chordality::NotChordal(cycle) => !naive && cycle_is_chordless(&g, &cycle),
        } && chordal(&g) == naive;
        report.chordal += naive as usize;
        if !ok {
            report.disagreements.push(g.lines().collect());
        }
    }
    Ok(report)
}
