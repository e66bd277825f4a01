use std::fmt;

use serde::{Deserialize, Serialize};

use super::vertex_set::{VertexSet, MAX_VERTICES};
use crate::error::{Error, Result};

/// An undirected graph on vertices `0..n` with a dense adjacency bitmask per vertex.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UndirectedGraph {
    adj: Vec<VertexSet>,
}

impl UndirectedGraph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_VERTICES, "at most {MAX_VERTICES} vertices");
        UndirectedGraph {
            adj: vec![VertexSet::EMPTY; n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        let all = VertexSet::full(n);
        for v in 0..n {
            g.adj[v] = all.without(v);
        }
        g
    }

    pub fn from_lines<I>(n: usize, lines: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n > MAX_VERTICES {
            return Err(Error::TooManyVertices {
                n,
                max: MAX_VERTICES,
            });
        }
        let mut g = Self::empty(n);
        for (a, b) in lines {
            g.check_vertex(a)?;
            g.check_vertex(b)?;
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            g.set_line(a, b, true);
        }
        Ok(g)
    }

    /// Builds a graph on at most 11 vertices from a bitmask over [`line_index`] positions.
    pub fn from_line_mask(n: usize, mask: u64) -> Self {
        let mut g = Self::empty(n);
        let mut idx = 0;
        for a in 0..n {
            for b in a + 1..n {
                if mask >> idx & 1 == 1 {
                    g.set_line(a, b, true);
                }
                idx += 1;
            }
        }
        g
    }

    /// Bitmask of lines, bit `line_index(n, a, b)` set iff `a - b` is present. Needs `n ≤ 11`.
    pub fn line_mask(&self) -> u64 {
        let n = self.n();
        assert!(n * n.saturating_sub(1) / 2 <= 64, "line mask needs n ≤ 11");
        let mut mask = 0u64;
        for (a, b) in self.lines() {
            mask |= 1u64 << line_index(n, a, b);
        }
        mask
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n())
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> VertexSet {
        self.adj[v]
    }

    #[inline]
    pub fn has_line(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    pub fn line_count(&self) -> usize {
        self.adj.iter().map(|s| s.len()).sum::<usize>() / 2
    }

    /// Lines as `(a, b)` with `a < b`, in lexicographic order.
    pub fn lines(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |a| {
            self.adj[a]
                .iter()
                .filter(move |&b| b > a)
                .map(move |b| (a, b))
        })
    }

    pub fn with_line(&self, a: usize, b: usize) -> Self {
        let mut g = self.clone();
        g.set_line(a, b, true);
        g
    }

    pub fn without_line(&self, a: usize, b: usize) -> Self {
        let mut g = self.clone();
        g.set_line(a, b, false);
        g
    }

    pub(crate) fn set_line(&mut self, a: usize, b: usize, present: bool) {
        debug_assert!(a != b);
        if present {
            self.adj[a].insert(b);
            self.adj[b].insert(a);
        } else {
            self.adj[a].remove(b);
            self.adj[b].remove(a);
        }
    }

    pub fn is_complete_set(&self, set: VertexSet) -> bool {
        set.iter().all(|v| set.without(v).is_subset(self.adj[v]))
    }

    /// Vertices reachable from `from` without entering `blocked`.
    pub fn reachable(&self, from: VertexSet, blocked: VertexSet) -> VertexSet {
        let mut seen = from.difference(blocked);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let mut next = VertexSet::EMPTY;
            for v in frontier {
                next = next.union(self.adj[v]);
            }
            frontier = next.difference(seen).difference(blocked);
            seen = seen.union(frontier);
        }
        seen
    }

    /// True iff every path between `a` and `b` goes through `c`.
    pub fn separated(&self, a: VertexSet, b: VertexSet, c: VertexSet) -> Result<bool> {
        check_disjoint_triple(self.n(), a, b, c)?;
        Ok(self.separated_unchecked(a, b, c))
    }

    #[inline]
    pub(crate) fn separated_unchecked(&self, a: VertexSet, b: VertexSet, c: VertexSet) -> bool {
        self.reachable(a, c).is_disjoint(b)
    }

    /// Breadth-first shortest path from `from` to `to` avoiding `blocked`.
    pub(crate) fn shortest_path(
        &self,
        from: usize,
        to: usize,
        blocked: VertexSet,
    ) -> Option<Vec<usize>> {
        let n = self.n();
        let mut prev = vec![usize::MAX; n];
        let mut seen = VertexSet::singleton(from);
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for w in self.adj[v].difference(seen).difference(blocked) {
                seen.insert(w);
                prev[w] = v;
                queue.push_back(w);
            }
        }
        None
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n() {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n(),
            })
        } else {
            Ok(())
        }
    }
}

impl fmt::Debug for UndirectedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UndirectedGraph(n={}, lines=", self.n())?;
        f.debug_list().entries(self.lines()).finish()?;
        f.write_str(")")
    }
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    lines: Vec<(usize, usize)>,
}

impl Serialize for UndirectedGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr {
            n: self.n(),
            lines: self.lines().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for UndirectedGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(d)?;
        UndirectedGraph::from_lines(repr.n, repr.lines).map_err(serde::de::Error::custom)
    }
}

/// Position of line `a - b` in the lexicographic enumeration of vertex pairs.
pub fn line_index(n: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

pub(crate) fn check_disjoint_triple(
    n: usize,
    a: VertexSet,
    b: VertexSet,
    c: VertexSet,
) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidSets("A and B must be nonempty".into()));
    }
    if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
        return Err(Error::InvalidSets(format!(
            "sets must be pairwise disjoint: A={a:?} B={b:?} C={c:?}"
        )));
    }
    if !a.union(b).union(c).is_subset(VertexSet::full(n)) {
        return Err(Error::InvalidSets(format!(
            "sets exceed vertex range 0..{n}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> VertexSet {
        v.iter().collect()
    }

    fn four_cycle() -> UndirectedGraph {
        UndirectedGraph::from_lines(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap()
    }

    /// Enumerates simple paths from `a` to `b` and checks each meets `c`.
    fn all_paths_blocked(g: &UndirectedGraph, a: usize, b: usize, c: VertexSet) -> bool {
        fn dfs(g: &UndirectedGraph, v: usize, b: usize, c: VertexSet, seen: VertexSet) -> bool {
            if v == b {
                return false;
            }
            for w in g.neighbors(v).difference(seen) {
                if c.contains(w) {
                    continue;
                }
                if !dfs(g, w, b, c, seen.with(w)) {
                    return false;
                }
            }
            true
        }
        dfs(g, a, b, c, VertexSet::singleton(a))
    }

    #[test]
    fn four_cycle_separation_matches_path_enumeration() {
        let g = four_cycle();
        assert!(g.separated(set(&[0]), set(&[2]), set(&[1, 3])).unwrap());
        assert!(all_paths_blocked(&g, 0, 2, set(&[1, 3])));
        assert!(!g.separated(set(&[0]), set(&[2]), set(&[1])).unwrap());
        assert!(!all_paths_blocked(&g, 0, 2, set(&[1])));
    }

    #[test]
    fn adjacent_pair_never_separated() {
        let g = four_cycle();
        assert!(!g.separated(set(&[0]), set(&[1]), VertexSet::EMPTY).unwrap());
        assert!(!g.separated(set(&[0]), set(&[1]), set(&[2, 3])).unwrap());
    }

    #[test]
    fn path_a_d_c_b_separates_a_b_by_c() {
        // a=0 b=1 c=2 d=3; lines a-d, b-c, c-d
        let g = UndirectedGraph::from_lines(4, [(0, 3), (1, 2), (2, 3)]).unwrap();
        assert!(g.separated(set(&[0]), set(&[1]), set(&[2])).unwrap());
    }

    #[test]
    fn overlapping_sets_rejected() {
        let g = four_cycle();
        assert!(g
            .separated(set(&[0]), set(&[0, 2]), VertexSet::EMPTY)
            .is_err());
        assert!(g.separated(set(&[0]), set(&[2]), set(&[0])).is_err());
        assert!(g
            .separated(VertexSet::EMPTY, set(&[2]), VertexSet::EMPTY)
            .is_err());
    }

    #[test]
    fn line_mask_round_trip() {
        let g = four_cycle();
        let m = g.line_mask();
        assert_eq!(UndirectedGraph::from_line_mask(4, m), g);
        let mut idx = 0;
        for a in 0..5 {
            for b in a + 1..5 {
                assert_eq!(line_index(5, a, b), idx);
                assert_eq!(line_index(5, b, a), idx);
                idx += 1;
            }
        }
    }

    #[test]
    fn brute_force_agreement_on_small_graphs() {
        for mask in 0..64u64 {
            let g = UndirectedGraph::from_line_mask(4, mask);
            for a in 0..4 {
                for b in a + 1..4 {
                    let rest = VertexSet::full(4).without(a).without(b);
                    for c in rest.subsets() {
                        assert_eq!(
                            g.separated_unchecked(
                                VertexSet::singleton(a),
                                VertexSet::singleton(b),
                                c
                            ),
                            all_paths_blocked(&g, a, b, c),
                        );
                    }
                }
            }
        }
    }
}
