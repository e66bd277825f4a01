//! Chordality testing and chordal graphs with a certified perfect ordering.
//!
//! Orderings here list vertices so that the *earlier* neighbours of every
//! vertex form a clique. This is the visit order of maximum cardinality
//! search, i.e. the reverse of an elimination ordering, and is the convention
//! under which directing every line from earlier to later vertex yields a DAG
//! without v-structures.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use super::undirected::UndirectedGraph;
use super::vertex_set::VertexSet;
use crate::error::{Error, Result};

/// Outcome of a chordality test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Chordality {
    /// A perfect ordering of the graph.
    Chordal(Vec<usize>),
    /// A chordless cycle of length ≥ 4, listed without repeating the first vertex.
    NotChordal(Vec<usize>),
}

impl Chordality {
    pub fn is_chordal(&self) -> bool {
        matches!(self, Chordality::Chordal(_))
    }
}

/// Maximum cardinality search, optionally forced to start with `prefix`.
/// Ties are broken by lowest vertex index.
fn max_cardinality_search(g: &UndirectedGraph, prefix: &[usize]) -> Vec<usize> {
    let n = g.n();
    let mut weight = vec![0usize; n];
    let mut visited = VertexSet::EMPTY;
    let mut order = Vec::with_capacity(n);
    for i in 0..n {
        let v = if i < prefix.len() {
            prefix[i]
        } else {
            let mut best = usize::MAX;
            let mut best_w = 0;
            for u in VertexSet::full(n).difference(visited) {
                if best == usize::MAX || weight[u] > best_w {
                    best = u;
                    best_w = weight[u];
                }
            }
            best
        };
        visited.insert(v);
        order.push(v);
        for u in g.neighbors(v).difference(visited) {
            weight[u] += 1;
        }
    }
    order
}

/// Checks the ordering with the follower test; returns the first failing
/// `(v, u, p)` where `u, p` are earlier neighbours of `v` that are not adjacent.
fn find_imperfection(g: &UndirectedGraph, order: &[usize]) -> Option<(usize, usize, usize)> {
    let n = g.n();
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut earlier = VertexSet::EMPTY;
    for &v in order {
        let preds = g.neighbors(v).intersection(earlier);
        if let Some(p) = preds.iter().max_by_key(|&u| pos[u]) {
            let rest = preds.without(p);
            if !rest.is_subset(g.neighbors(p)) {
                let u = rest.difference(g.neighbors(p)).first().unwrap();
                return Some((v, u, p));
            }
        }
        earlier.insert(v);
    }
    None
}

/// Chordless cycle through `v` whose other two cycle neighbours are `u` and `p`, if one exists.
fn cycle_through(g: &UndirectedGraph, v: usize, u: usize, p: usize) -> Option<Vec<usize>> {
    let blocked = g.neighbors(v).without(u).without(p).with(v);
    let path = g.shortest_path(u, p, blocked)?;
    let mut cycle = Vec::with_capacity(path.len() + 1);
    cycle.push(v);
    cycle.extend(path);
    Some(cycle)
}

fn normalize_cycle(mut cycle: Vec<usize>) -> Vec<usize> {
    let k = cycle.len();
    let start = (0..k).min_by_key(|&i| cycle[i]).unwrap();
    cycle.rotate_left(start);
    if k > 2 && cycle[k - 1] < cycle[1] {
        cycle[1..].reverse();
    }
    cycle
}

fn find_chordless_cycle(g: &UndirectedGraph, hint: (usize, usize, usize)) -> Vec<usize> {
    if let Some(c) = cycle_through(g, hint.0, hint.1, hint.2) {
        return normalize_cycle(c);
    }
    for v in 0..g.n() {
        let nb = g.neighbors(v).to_vec();
        for (i, &u) in nb.iter().enumerate() {
            for &p in &nb[i + 1..] {
                if !g.has_line(u, p) {
                    if let Some(c) = cycle_through(g, v, u, p) {
                        return normalize_cycle(c);
                    }
                }
            }
        }
    }
    unreachable!("imperfect ordering without a chordless cycle")
}

/// Decides chordality by maximum cardinality search followed by the follower check.
pub fn is_chordal(g: &UndirectedGraph) -> Chordality {
    let order = max_cardinality_search(g, &[]);
    match find_imperfection(g, &order) {
        None => Chordality::Chordal(order),
        Some(hint) => Chordality::NotChordal(find_chordless_cycle(g, hint)),
    }
}

/// Cheaper yes/no form of [`is_chordal`].
pub fn chordal(g: &UndirectedGraph) -> bool {
    find_imperfection(g, &max_cardinality_search(g, &[])).is_none()
}

/// True iff `order` is a permutation of the vertices of `g` in which every
/// vertex's earlier neighbours form a clique.
pub fn is_perfect_ordering(g: &UndirectedGraph, order: &[usize]) -> bool {
    let n = g.n();
    if order.len() != n || order.iter().any(|&v| v >= n) {
        return false;
    }
    let seen: VertexSet = order.iter().collect();
    if seen != VertexSet::full(n) {
        return false;
    }
    let mut earlier = VertexSet::EMPTY;
    for &v in order {
        if !g.is_complete_set(g.neighbors(v).intersection(earlier)) {
            return false;
        }
        earlier.insert(v);
    }
    true
}

/// An undirected chordal graph together with a perfect ordering.
#[derive(Clone, PartialEq, Eq)]
pub struct ChordalGraph {
    graph: UndirectedGraph,
    order: Vec<usize>,
}

impl ChordalGraph {
    /// Certifies `graph` as chordal, or returns the chordless cycle found.
    pub fn new(graph: UndirectedGraph) -> Result<Self> {
        match is_chordal(&graph) {
            Chordality::Chordal(order) => Ok(ChordalGraph { graph, order }),
            Chordality::NotChordal(cycle) => Err(Error::NotChordal { cycle }),
        }
    }

    pub fn with_ordering(graph: UndirectedGraph, order: Vec<usize>) -> Result<Self> {
        if !is_perfect_ordering(&graph, &order) {
            return Err(Error::NotPerfect(format!("{order:?}")));
        }
        Ok(ChordalGraph { graph, order })
    }

    pub fn empty(n: usize) -> Self {
        ChordalGraph {
            graph: UndirectedGraph::empty(n),
            order: (0..n).collect(),
        }
    }

    pub fn complete(n: usize) -> Self {
        ChordalGraph {
            graph: UndirectedGraph::complete(n),
            order: (0..n).collect(),
        }
    }

    pub fn graph(&self) -> &UndirectedGraph {
        &self.graph
    }

    pub fn into_graph(self) -> UndirectedGraph {
        self.graph
    }

    /// The stored perfect ordering.
    pub fn ordering(&self) -> &[usize] {
        &self.order
    }

    /// Parent sets obtained by directing each line from earlier to later in the stored ordering.
    pub fn parent_sets(&self) -> Vec<VertexSet> {
        parents_under(&self.graph, &self.order)
    }

    /// A perfect ordering that begins with `prefix`, which must induce a complete subgraph.
    pub fn ordering_with_prefix(&self, prefix: &[usize]) -> Result<Vec<usize>> {
        for &v in prefix {
            self.graph.check_vertex(v)?;
        }
        let pset: VertexSet = prefix.iter().collect();
        if pset.len() != prefix.len() || !self.graph.is_complete_set(pset) {
            return Err(Error::PrefixNotComplete(prefix.to_vec()));
        }
        let order = max_cardinality_search(&self.graph, prefix);
        debug_assert!(is_perfect_ordering(&self.graph, &order));
        Ok(order)
    }

    /// Adds line `a - b` if the result stays chordal.
    pub fn add_line(&self, a: usize, b: usize) -> Result<Self> {
        self.graph.check_vertex(a)?;
        self.graph.check_vertex(b)?;
        if a == b || self.graph.has_line(a, b) {
            return Err(Error::IllegalMove(format!("cannot add line {a}-{b}")));
        }
        ChordalGraph::new(self.graph.with_line(a, b))
    }

    /// Removes line `a - b` if the result stays chordal.
    pub fn remove_line(&self, a: usize, b: usize) -> Result<Self> {
        self.graph.check_vertex(a)?;
        self.graph.check_vertex(b)?;
        if !self.graph.has_line(a, b) {
            return Err(Error::IllegalMove(format!("line {a}-{b} is absent")));
        }
        ChordalGraph::new(self.graph.without_line(a, b))
    }
}

impl Deref for ChordalGraph {
    type Target = UndirectedGraph;
    fn deref(&self) -> &UndirectedGraph {
        &self.graph
    }
}

impl fmt::Debug for ChordalGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChordalGraph")
            .field("lines", &self.graph.lines().collect::<Vec<_>>())
            .field("order", &self.order)
            .finish()
    }
}

impl Serialize for ChordalGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.graph.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ChordalGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let g = UndirectedGraph::deserialize(d)?;
        ChordalGraph::new(g).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn parents_under(g: &UndirectedGraph, order: &[usize]) -> Vec<VertexSet> {
    let mut parents = vec![VertexSet::EMPTY; g.n()];
    let mut earlier = VertexSet::EMPTY;
    for &v in order {
        parents[v] = g.neighbors(v).intersection(earlier);
        earlier.insert(v);
    }
    parents
}

/// Greedy minimum fill-in triangulation. Returns the chordal supergraph and the
/// fill-in lines in the order they were added.
pub fn min_fill_chordalize(g: &UndirectedGraph) -> (ChordalGraph, Vec<(usize, usize)>) {
    let n = g.n();
    let mut work = g.clone();
    let mut remaining = VertexSet::full(n);
    let mut fill = Vec::new();
    let mut elimination = Vec::with_capacity(n);
    while let Some(first) = remaining.first() {
        let mut best = first;
        let mut best_fill = usize::MAX;
        for v in remaining {
            let f = missing_pairs(&work, work.neighbors(v).intersection(remaining));
            if f < best_fill {
                best = v;
                best_fill = f;
                if f == 0 {
                    break;
                }
            }
        }
        let nb = work.neighbors(best).intersection(remaining).to_vec();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if !work.has_line(a, b) {
                    work.set_line(a, b, true);
                    fill.push((a, b));
                }
            }
        }
        remaining.remove(best);
        elimination.push(best);
    }
    elimination.reverse();
    let chordal = ChordalGraph::with_ordering(work, elimination)
        .expect("elimination game always yields a perfect ordering");
    (chordal, fill)
}

fn missing_pairs(g: &UndirectedGraph, set: VertexSet) -> usize {
    let k = set.len();
    let present: usize = set
        .iter()
        .map(|v| g.neighbors(v).intersection(set).len())
        .sum::<usize>()
        / 2;
    k * k.saturating_sub(1) / 2 - present
}
