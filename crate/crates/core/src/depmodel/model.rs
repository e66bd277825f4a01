use serde::{Deserialize, Serialize};

use super::statement::IndependenceStatement;
use crate::error::{Error, Result};
use crate::graph::{Dag, UndirectedGraph, VertexSet};

/// What answers the independence queries of a [`DependencyModel`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Backend {
    /// Separation in an undirected graph.
    Undirected { graph: UndirectedGraph },
    /// d-separation in a DAG.
    Dag { dag: Dag },
    /// d-separation in a DAG, queried only over the `observed` vertices.
    /// Observed index `i` of a statement refers to DAG vertex `observed[i]`.
    Latent { dag: Dag, observed: Vec<usize> },
}

/// An independence oracle over observed variables `0..n_observed()`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyModel {
    backend: Backend,
}

impl DependencyModel {
    pub fn undirected(graph: UndirectedGraph) -> Self {
        DependencyModel {
            backend: Backend::Undirected { graph },
        }
    }

    pub fn dag(dag: Dag) -> Self {
        DependencyModel {
            backend: Backend::Dag { dag },
        }
    }

    /// Marginal of `dag` after hiding `latent`; the remaining vertices keep their relative order.
    pub fn latent(dag: Dag, latent: VertexSet) -> Result<Self> {
        let all = VertexSet::full(dag.n());
        if !latent.is_subset(all) {
            return Err(Error::Model(format!("latent set {latent:?} out of range")));
        }
        let observed = all.difference(latent).to_vec();
        if observed.is_empty() {
            return Err(Error::Model("no observed vertices".into()));
        }
        Ok(DependencyModel {
            backend: Backend::Latent { dag, observed },
        })
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn n_observed(&self) -> usize {
        match &self.backend {
            Backend::Undirected { graph } => graph.n(),
            Backend::Dag { dag } => dag.n(),
            Backend::Latent { observed, .. } => observed.len(),
        }
    }

    /// True when the backend is a graph over exactly the observed vertices, so
    /// the model satisfies the graphoid axioms needed by pairwise shortcuts.
    pub fn is_graph_backed(&self) -> bool {
        !matches!(self.backend, Backend::Latent { .. })
    }

    pub fn is_independent(&self, s: &IndependenceStatement) -> Result<bool> {
        self.query(s.a(), s.b(), s.c())
    }

    /// Raw query `a ⊥ b | c`, with validation but without canonicalization.
    pub fn query(&self, a: VertexSet, b: VertexSet, c: VertexSet) -> Result<bool> {
        IndependenceStatement::new(a, b, c)?;
        let n = self.n_observed();
        let all = VertexSet::full(n);
        if !a.union(b).union(c).is_subset(all) {
            let v = a.union(b).union(c).difference(all).first().unwrap();
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        Ok(self.holds(a, b, c))
    }

    #[inline]
    pub(crate) fn holds(&self, a: VertexSet, b: VertexSet, c: VertexSet) -> bool {
        match &self.backend {
            Backend::Undirected { graph } => graph.separated_unchecked(a, b, c),
            Backend::Dag { dag } => dag.d_separated_unchecked(a, b, c),
            Backend::Latent { dag, observed } => {
                let map = |s: VertexSet| s.iter().map(|i| observed[i]).collect::<VertexSet>();
                dag.d_separated_unchecked(map(a), map(b), map(c))
            }
        }
    }
}
