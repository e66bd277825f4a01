use std::fmt;

use serde::{Deserialize, Serialize};

use super::chordal::{is_perfect_ordering, parents_under, ChordalGraph};
use super::undirected::{check_disjoint_triple, UndirectedGraph};
use super::vertex_set::{VertexSet, MAX_VERTICES};
use crate::error::{Error, Result};

/// A directed acyclic graph stored as one parent set per vertex.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dag {
    parents: Vec<VertexSet>,
}

impl Dag {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_VERTICES);
        Dag {
            parents: vec![VertexSet::EMPTY; n],
        }
    }

    pub fn from_parents(parents: Vec<VertexSet>) -> Result<Self> {
        let n = parents.len();
        if n > MAX_VERTICES {
            return Err(Error::TooManyVertices {
                n,
                max: MAX_VERTICES,
            });
        }
        for (v, p) in parents.iter().enumerate() {
            if p.contains(v) {
                return Err(Error::SelfLoop(v));
            }
            if !p.is_subset(VertexSet::full(n)) {
                let vertex = p.difference(VertexSet::full(n)).first().unwrap();
                return Err(Error::VertexOutOfRange { vertex, n });
            }
        }
        let dag = Dag { parents };
        dag.topological_order()?;
        Ok(dag)
    }

    /// Builds a DAG from arrows `a -> b`.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut parents = vec![VertexSet::EMPTY; n];
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::VertexOutOfRange {
                    vertex: a.max(b),
                    n,
                });
            }
            parents[b].insert(a);
        }
        Dag::from_parents(parents)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.parents.len()
    }

    #[inline]
    pub fn parents(&self, v: usize) -> VertexSet {
        self.parents[v]
    }

    pub fn parent_sets(&self) -> &[VertexSet] {
        &self.parents
    }

    pub fn children(&self, v: usize) -> VertexSet {
        (0..self.n())
            .filter(|&c| self.parents[c].contains(v))
            .collect()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.parents[b].contains(a)
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(|p| p.len()).sum()
    }

    /// Arrows `(a, b)` meaning `a -> b`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = (0..self.n())
            .flat_map(|b| self.parents[b].iter().map(move |a| (a, b)))
            .collect();
        e.sort_unstable();
        e
    }

    /// Kahn's algorithm, always taking the smallest ready vertex.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let n = self.n();
        let mut done = VertexSet::EMPTY;
        let mut order = Vec::with_capacity(n);
        while order.len() < n {
            let ready = (0..n).find(|&v| !done.contains(v) && self.parents[v].is_subset(done));
            match ready {
                Some(v) => {
                    done.insert(v);
                    order.push(v);
                }
                None => {
                    let v = VertexSet::full(n).difference(done).first().unwrap();
                    return Err(Error::Cyclic(v));
                }
            }
        }
        Ok(order)
    }

    /// All ancestors of `set`, including `set` itself.
    pub fn ancestral_closure(&self, set: VertexSet) -> VertexSet {
        let mut closure = set;
        let mut frontier = set;
        while !frontier.is_empty() {
            let mut next = VertexSet::EMPTY;
            for v in frontier {
                next = next.union(self.parents[v]);
            }
            frontier = next.difference(closure);
            closure = closure.union(frontier);
        }
        closure
    }

    /// True iff a directed path `from ->* to` exists (length ≥ 0).
    pub fn has_path(&self, from: usize, to: usize) -> bool {
        self.ancestral_closure(VertexSet::singleton(to))
            .contains(from)
    }

    pub fn skeleton(&self) -> UndirectedGraph {
        let mut g = UndirectedGraph::empty(self.n());
        for (a, b) in self.edges() {
            g.set_line(a, b, true);
        }
        g
    }

    /// Moral graph: skeleton plus a line between every pair of co-parents.
    pub fn moralize(&self) -> UndirectedGraph {
        self.moralize_within(VertexSet::full(self.n()))
    }

    fn moralize_within(&self, keep: VertexSet) -> UndirectedGraph {
        let mut g = UndirectedGraph::empty(self.n());
        for v in keep {
            let pa = self.parents[v].intersection(keep).to_vec();
            for (i, &a) in pa.iter().enumerate() {
                g.set_line(a, v, true);
                for &b in &pa[i + 1..] {
                    g.set_line(a, b, true);
                }
            }
        }
        g
    }

    /// d-separation of `a` and `b` given `c`, decided on the moralized ancestral graph.
    pub fn d_separated(&self, a: VertexSet, b: VertexSet, c: VertexSet) -> Result<bool> {
        check_disjoint_triple(self.n(), a, b, c)?;
        Ok(self.d_separated_unchecked(a, b, c))
    }

    pub(crate) fn d_separated_unchecked(&self, a: VertexSet, b: VertexSet, c: VertexSet) -> bool {
        let keep = self.ancestral_closure(a.union(b).union(c));
        self.moralize_within(keep)
            .reachable(a, c.union(VertexSet::full(self.n()).difference(keep)))
            .is_disjoint(b)
    }

    /// Number of v-structures `a -> c <- b` with `a`, `b` non-adjacent.
    pub fn v_structure_count(&self) -> usize {
        let mut count = 0;
        for c in 0..self.n() {
            let pa = self.parents[c].to_vec();
            for (i, &a) in pa.iter().enumerate() {
                for &b in &pa[i + 1..] {
                    if !self.has_edge(a, b) && !self.has_edge(b, a) {
                        count += 1;
                    }
                }
            }
        }
        count
    }
}

impl fmt::Debug for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dag(n={}, edges={:?})", self.n(), self.edges())
    }
}

#[derive(Serialize, Deserialize)]
struct DagRepr {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Serialize for Dag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DagRepr {
            n: self.n(),
            edges: self.edges(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Dag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = DagRepr::deserialize(d)?;
        Dag::from_edges(r.n, r.edges).map_err(serde::de::Error::custom)
    }
}

/// Directs each line of `g` from the earlier to the later vertex of `order`,
/// which must be a perfect ordering of `g`.
pub fn orient_by_ordering(g: &ChordalGraph, order: &[usize]) -> Result<Dag> {
    if !is_perfect_ordering(g.graph(), order) {
        return Err(Error::NotPerfect(format!("{order:?}")));
    }
    Ok(Dag {
        parents: parents_under(g.graph(), order),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[usize]) -> VertexSet {
        v.iter().collect()
    }

    #[test]
    fn collider_and_chain() {
        // a=0 -> c=2 <- b=1
        let collider = Dag::from_edges(3, [(0, 2), (1, 2)]).unwrap();
        assert!(collider.d_separated(s(&[0]), s(&[1]), s(&[])).unwrap());
        assert!(!collider.d_separated(s(&[0]), s(&[1]), s(&[2])).unwrap());

        let chain = Dag::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert!(chain.d_separated(s(&[0]), s(&[2]), s(&[1])).unwrap());
        assert!(!chain.d_separated(s(&[0]), s(&[2]), s(&[])).unwrap());
    }

    #[test]
    fn descendant_of_collider_opens_path() {
        let d = Dag::from_edges(4, [(0, 2), (1, 2), (2, 3)]).unwrap();
        assert!(!d.d_separated(s(&[0]), s(&[1]), s(&[3])).unwrap());
        assert!(d.d_separated(s(&[0]), s(&[1]), s(&[])).unwrap());
    }

    #[test]
    fn moralization() {
        let collider = Dag::from_edges(3, [(0, 2), (1, 2)]).unwrap();
        let m = collider.moralize();
        assert_eq!(m.lines().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);
        let chain = Dag::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            chain.moralize().lines().collect::<Vec<_>>(),
            vec![(0, 1), (1, 2)]
        );
        assert_eq!(Dag::empty(4).moralize().line_count(), 0);
    }

    #[test]
    fn cycles_rejected() {
        assert!(matches!(
            Dag::from_edges(3, [(0, 1), (1, 2), (2, 0)]),
            Err(Error::Cyclic(_))
        ));
        assert!(matches!(
            Dag::from_edges(2, [(1, 1)]),
            Err(Error::SelfLoop(1))
        ));
    }

    #[test]
    fn orientation_examples() {
        let chain =
            ChordalGraph::new(UndirectedGraph::from_lines(3, [(0, 1), (1, 2)]).unwrap()).unwrap();
        let d = orient_by_ordering(&chain, &[0, 1, 2]).unwrap();
        assert_eq!(d.edges(), vec![(0, 1), (1, 2)]);

        let tri = ChordalGraph::complete(3);
        let d = orient_by_ordering(&tri, &[0, 1, 2]).unwrap();
        assert_eq!(d.edges(), vec![(0, 1), (0, 2), (1, 2)]);

        // (0, 2, 1) on the chain makes 1 a collider: not a perfect ordering.
        assert!(orient_by_ordering(&chain, &[0, 2, 1]).is_err());
    }
}
