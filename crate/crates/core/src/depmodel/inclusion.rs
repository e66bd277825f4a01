use serde::Serialize;

use super::model::DependencyModel;
use super::space::StatementSpace;
use super::statement::IndependenceStatement;
use crate::error::{Error, Result};
use crate::graph::{chordal, ChordalGraph, UndirectedGraph, VertexSet};

/// Result of testing `I(g) ⊆ I(target)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Inclusion {
    pub included: bool,
    /// A statement of `I(g)` missing from the target, when not included.
    pub violation: Option<IndependenceStatement>,
}

impl Inclusion {
    fn holds() -> Self {
        Inclusion {
            included: true,
            violation: None,
        }
    }

    fn fails(s: IndependenceStatement) -> Self {
        Inclusion {
            included: false,
            violation: Some(s),
        }
    }
}

fn check_sizes(g: &UndirectedGraph, target: &DependencyModel) -> Result<()> {
    if g.n() != target.n_observed() {
        return Err(Error::VertexMismatch {
            left: g.n(),
            right: target.n_observed(),
        });
    }
    Ok(())
}

/// Tests `I(g) ⊆ I(target)`.
///
/// Graph-backed targets satisfy symmetry, decomposition, intersection and
/// weak union, so it suffices to check `a ⊥ b | V ∖ {a, b}` for every
/// non-adjacent pair of `g`. Latent-variable targets are compared exhaustively.
pub fn model_included(g: &ChordalGraph, target: &DependencyModel) -> Result<Inclusion> {
    if target.is_graph_backed() {
        model_included_pairwise(g.graph(), target)
    } else {
        model_included_exhaustive(g.graph(), target)
    }
}

pub fn model_included_pairwise(g: &UndirectedGraph, target: &DependencyModel) -> Result<Inclusion> {
    check_sizes(g, target)?;
    let all = g.vertices();
    for a in 0..g.n() {
        for b in all.difference(g.neighbors(a)).iter().filter(|&b| b > a) {
            let (sa, sb) = (VertexSet::singleton(a), VertexSet::singleton(b));
            let rest = all.without(a).without(b);
            if !target.holds(sa, sb, rest) {
                return Ok(Inclusion::fails(IndependenceStatement::canonical(
                    sa, sb, rest,
                )));
            }
        }
    }
    Ok(Inclusion::holds())
}

pub fn model_included_exhaustive(
    g: &UndirectedGraph,
    target: &DependencyModel,
) -> Result<Inclusion> {
    check_sizes(g, target)?;
    let space = StatementSpace::new(g.n())?;
    for s in space.statements() {
        if g.separated_unchecked(s.a(), s.b(), s.c()) && !target.holds(s.a(), s.b(), s.c()) {
            return Ok(Inclusion::fails(*s));
        }
    }
    Ok(Inclusion::holds())
}

/// True iff `I(g) ⊆ I(target)` and no chordal graph obtained by deleting one
/// line of `g` still has its model inside the target.
pub fn inclusion_optimal(g: &ChordalGraph, target: &DependencyModel) -> Result<bool> {
    if !model_included(g, target)?.included {
        return Ok(false);
    }
    for (a, b) in g.lines() {
        let h = g.without_line(a, b);
        if chordal(&h) {
            let h = ChordalGraph::new(h)?;
            if model_included(&h, target)?.included {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chordal_graph(n: usize, lines: &[(usize, usize)]) -> ChordalGraph {
        ChordalGraph::new(UndirectedGraph::from_lines(n, lines.iter().copied()).unwrap()).unwrap()
    }

    // a=0 b=1 c=2 d=3, the 4-cycle a-b-c-d-a
    fn four_cycle_model() -> DependencyModel {
        DependencyModel::undirected(
            UndirectedGraph::from_lines(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap(),
        )
    }

    #[test]
    fn cycle_plus_one_chord_is_inclusion_optimal() {
        let target = four_cycle_model();
        let with_ac = chordal_graph(4, &[(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]);
        let with_bd = chordal_graph(4, &[(0, 1), (1, 2), (2, 3), (0, 3), (1, 3)]);
        for g in [&with_ac, &with_bd] {
            assert!(model_included(g, &target).unwrap().included);
            assert!(inclusion_optimal(g, &target).unwrap());
        }
    }

    #[test]
    fn complete_graph_is_not_optimal_for_four_cycle() {
        let target = four_cycle_model();
        let k4 = ChordalGraph::complete(4);
        assert!(model_included(&k4, &target).unwrap().included);
        assert!(!inclusion_optimal(&k4, &target).unwrap());
    }

    #[test]
    fn chordal_model_is_optimal_for_itself() {
        let g = chordal_graph(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)]);
        let target = DependencyModel::undirected(g.graph().clone());
        assert!(model_included(&g, &target).unwrap().included);
        assert!(inclusion_optimal(&g, &target).unwrap());
    }

    #[test]
    fn violation_is_reported() {
        let target = four_cycle_model();
        let empty = ChordalGraph::empty(4);
        let inc = model_included(&empty, &target).unwrap();
        assert!(!inc.included);
        let v = inc.violation.unwrap();
        assert!(!target.is_independent(&v).unwrap());
    }

    #[test]
    fn pairwise_and_exhaustive_agree_on_four_vertices() {
        for tmask in 0..64u64 {
            let target = DependencyModel::undirected(UndirectedGraph::from_line_mask(4, tmask));
            for gmask in 0..64u64 {
                let g = UndirectedGraph::from_line_mask(4, gmask);
                if !chordal(&g) {
                    continue;
                }
                assert_eq!(
                    model_included_pairwise(&g, &target).unwrap().included,
                    model_included_exhaustive(&g, &target).unwrap().included,
                    "target {tmask:#x} graph {gmask:#x}"
                );
            }
        }
    }
}
