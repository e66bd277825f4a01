use rayon::prelude::*;
use serde::Serialize;

use super::catalog::ChordalCatalog;
use crate::error::{Error, Result};
use crate::graph::{chordal, ChordalGraph};

/// A sequence of chordal graphs from `h` to `g`, each adding one line of `g`.
///
/// At every step the first missing line (lexicographically) whose addition
/// keeps the graph chordal is added. Failure to find one would contradict the
/// chain theorem and is reported as an error.
pub fn chordal_chain(h: &ChordalGraph, g: &ChordalGraph) -> Result<Vec<ChordalGraph>> {
    if h.n() != g.n() {
        return Err(Error::VertexMismatch {
            left: h.n(),
            right: g.n(),
        });
    }
    if let Some((a, b)) = h.lines().find(|&(a, b)| !g.has_line(a, b)) {
        return Err(Error::InvalidSets(format!(
            "line {a}-{b} of the start is not in the goal"
        )));
    }
    let mut chain = vec![h.clone()];
    let mut k = h.graph().clone();
    while k.line_count() < g.line_count() {
        let next = g
            .lines()
            .filter(|&(a, b)| !k.has_line(a, b))
            .map(|(a, b)| k.with_line(a, b))
            .find(chordal)
            .ok_or_else(|| {
                Error::Model(format!(
                    "no chordal one-line extension of {k:?} towards {g:?}"
                ))
            })?;
        k = next;
        chain.push(ChordalGraph::new(k.clone())?);
    }
    Ok(chain)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainSweep {
    pub n: usize,
    pub pairs: usize,
    pub failures: Vec<(Vec<(usize, usize)>, Vec<(usize, usize)>)>,
}

impl ChainSweep {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Builds a chain for every pair of chordal graphs `h ⊆ g` on `n` vertices.
pub fn chain_sweep(n: usize) -> Result<ChainSweep> {
    let catalog = ChordalCatalog::new(n)?;
    let results: Vec<(usize, Vec<_>)> = (0..catalog.len())
        .into_par_iter()
        .map(|gi| {
            let g = catalog.graph(gi);
            let gm = catalog.mask(gi);
            let mut pairs = 0;
            let mut failures = Vec::new();
            for hi in 0..catalog.len() {
                if catalog.mask(hi) & !gm != 0 {
                    continue;
                }
                pairs += 1;
                let h = catalog.graph(hi);
                let ok = chordal_chain(h, g).is_ok_and(|c| {
                    c.len() == g.line_count() - h.line_count() + 1
                        && c.last().map(|k| k.graph()) == Some(g.graph())
                });
                if !ok {
                    failures.push((h.lines().collect(), g.lines().collect()));
                }
            }
            (pairs, failures)
        })
        .collect();
    Ok(ChainSweep {
        n,
        pairs: results.iter().map(|r| r.0).sum(),
        failures: results.into_iter().flat_map(|r| r.1).collect(),
    })
}
