use super::model::DependencyModel;
use super::statement::IndependenceStatement;
use crate::error::{Error, Result};
use crate::graph::{UndirectedGraph, VertexSet};

/// Largest observed-vertex count for which statement sets are materialized.
pub const ENUMERATION_BOUND: usize = 7;

/// Every canonical statement over `n` vertices, in a fixed order.
#[derive(Clone, Debug)]
pub struct StatementSpace {
    n: usize,
    statements: Vec<IndependenceStatement>,
}

impl StatementSpace {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_bound(n, ENUMERATION_BOUND)
    }

    pub fn with_bound(n: usize, bound: usize) -> Result<Self> {
        if n > bound {
            return Err(Error::BoundExceeded {
                what: "observed vertex count",
                value: n,
                bound,
            });
        }
        let all = VertexSet::full(n);
        let mut statements = Vec::new();
        for c in all.subsets() {
            let rest = all.difference(c);
            for a in rest.subsets().skip(1) {
                for b in rest.difference(a).subsets().skip(1) {
                    if a.first() < b.first() {
                        statements.push(IndependenceStatement::canonical(a, b, c));
                    }
                }
            }
        }
        Ok(StatementSpace { n, statements })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn statements(&self) -> &[IndependenceStatement] {
        &self.statements
    }

    /// The set of statements true in `m`.
    pub fn materialize(&self, m: &DependencyModel) -> Result<IndependenceSet> {
        if m.n_observed() != self.n {
            return Err(Error::VertexMismatch {
                left: m.n_observed(),
                right: self.n,
            });
        }
        Ok(self.collect(|s| m.holds(s.a(), s.b(), s.c())))
    }

    /// The separation statements of an undirected graph.
    pub fn materialize_graph(&self, g: &UndirectedGraph) -> IndependenceSet {
        assert_eq!(g.n(), self.n);
        self.collect(|s| g.separated_unchecked(s.a(), s.b(), s.c()))
    }

    fn collect(&self, mut pred: impl FnMut(&IndependenceStatement) -> bool) -> IndependenceSet {
        let mut bits = vec![0u64; self.statements.len().div_ceil(64)];
        for (i, s) in self.statements.iter().enumerate() {
            if pred(s) {
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        IndependenceSet { bits }
    }
}

/// A subset of a [`StatementSpace`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndependenceSet {
    bits: Vec<u64>,
}

impl IndependenceSet {
    pub fn contains(&self, index: usize) -> bool {
        self.bits[index / 64] >> (index % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &IndependenceSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn is_proper_subset(&self, other: &IndependenceSet) -> bool {
        self.is_subset(other) && self != other
    }

    /// `|self ∖ other|`.
    pub fn difference_len(&self, other: &IndependenceSet) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| (a & !b).count_ones() as usize)
            .sum()
    }

    /// Index of the first member of `self ∖ other`.
    pub fn first_difference(&self, other: &IndependenceSet) -> Option<usize> {
        self.bits
            .iter()
            .zip(&other.bits)
            .enumerate()
            .find_map(|(w, (a, b))| {
                let d = a & !b;
                (d != 0).then(|| w * 64 + d.trailing_zeros() as usize)
            })
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + i)
            })
        })
    }
}

/// All true statements of `m`, canonicalized, in [`StatementSpace`] order.
pub fn enumerate_independencies(m: &DependencyModel) -> Result<Vec<IndependenceStatement>> {
    let space = StatementSpace::new(m.n_observed())?;
    let set = space.materialize(m)?;
    Ok(set.indices().map(|i| space.statements()[i]).collect())
}
