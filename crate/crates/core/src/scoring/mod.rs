//! Decomposable BDeu scoring of chordal graphs and DAGs.
//!
//! A chordal graph is scored through the DAG obtained by directing its lines
//! along a perfect ordering. Every such orientation has the same skeleton and
//! no v-structures, so the score does not depend on the ordering chosen.

mod bdeu;
mod cache;

pub use bdeu::bdeu_local_score;
pub use cache::{LocalScoreKey, ScoreCache};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::{ChordalGraph, Dag, VertexSet};
use crate::search::{Move, MoveKind};

fn check_vars(n: usize, data: &Dataset) -> Result<()> {
    if n != data.n_vars() {
        return Err(Error::VertexMismatch {
            left: n,
            right: data.n_vars(),
        });
    }
    Ok(())
}

/// Sum of local scores over the perfect-ordering orientation of `g`.
pub fn score_chordal(g: &ChordalGraph, data: &Dataset, cache: &ScoreCache) -> Result<f64> {
    check_vars(g.n(), data)?;
    cache.check(data)?;
    Ok(g.parent_sets()
        .iter()
        .enumerate()
        .map(|(v, &pa)| cache.local(data, v, pa))
        .sum())
}

pub fn score_dag(dag: &Dag, data: &Dataset, cache: &ScoreCache) -> Result<f64> {
    check_vars(dag.n(), data)?;
    cache.check(data)?;
    Ok(dag
        .parent_sets()
        .iter()
        .enumerate()
        .map(|(v, &pa)| cache.local(data, v, pa))
        .sum())
}

/// Score change `score(after) − score(before)` of a legal move.
///
/// Removing `a − b` from `g` changes the score by `f(b, S) − f(b, S ∪ {a})`
/// with `S = ne(a) ∩ ne(b)`; adding it is the negation, with `S` taken in `g`.
pub fn move_delta(g: &ChordalGraph, mv: Move, data: &Dataset, cache: &ScoreCache) -> Result<f64> {
    check_vars(g.n(), data)?;
    cache.check(data)?;
    mv.check_legal(g)?;
    Ok(move_delta_unchecked(g, mv, data, cache))
}

/// [`move_delta`] without the legality test; the caller guarantees the result is chordal.
pub(crate) fn move_delta_unchecked(
    g: &ChordalGraph,
    mv: Move,
    data: &Dataset,
    cache: &ScoreCache,
) -> f64 {
    let (a, b) = (mv.a, mv.b);
    let sep = g.neighbors(a).intersection(g.neighbors(b));
    let with_a = cache.local(data, b, sep.with(a));
    let without_a = cache.local(data, b, sep);
    match mv.kind {
        MoveKind::AddLine => with_a - without_a,
        MoveKind::RemoveLine => without_a - with_a,
    }
}

fn family_dimension(v: usize, parents: VertexSet, arities: &[usize]) -> u64 {
    parents
        .iter()
        .fold((arities[v] as u64).saturating_sub(1), |acc, p| {
            acc.saturating_mul(arities[p] as u64)
        })
}

/// Number of free parameters: `Σ_v (r_v − 1) Π_{p ∈ pa(v)} r_p` over the perfect-ordering orientation.
pub fn dimension(g: &ChordalGraph, arities: &[usize]) -> u64 {
    assert_eq!(g.n(), arities.len(), "one arity per vertex");
    g.parent_sets()
        .iter()
        .enumerate()
        .map(|(v, &pa)| family_dimension(v, pa, arities))
        .sum()
}

pub fn dag_dimension(dag: &Dag, arities: &[usize]) -> u64 {
    assert_eq!(dag.n(), arities.len(), "one arity per vertex");
    dag.parent_sets()
        .iter()
        .enumerate()
        .map(|(v, &pa)| family_dimension(v, pa, arities))
        .sum()
}
