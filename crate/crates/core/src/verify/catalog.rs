use crate::error::{Error, Result};
use crate::graph::{chordal, ChordalGraph, UndirectedGraph, VertexSet};
use crate::search::{inclusion_boundary, inclusion_boundary_with_fault, Move, MoveKind};

/// Largest `n` for which all labeled graphs are enumerated.
pub const CATALOG_BOUND: usize = 6;

const ABSENT: u32 = u32::MAX;

/// Every labeled chordal graph on `n` vertices, indexed by line mask, with
/// precomputed parent sets and inclusion-boundary neighbours.
#[derive(Clone, Debug)]
pub struct ChordalCatalog {
    n: usize,
    graphs: Vec<ChordalGraph>,
    parents: Vec<Vec<VertexSet>>,
    masks: Vec<u64>,
    index: Vec<u32>,
    neighbors: Vec<Vec<(Move, Option<usize>)>>,
}

impl ChordalCatalog {
    pub fn new(n: usize) -> Result<Self> {
        Self::build(n, false)
    }

    /// Builds neighbour lists with the faulty boundary enumerator; a listed
    /// neighbour that is not chordal has index `None`.
    #[doc(hidden)]
    pub fn with_fault(n: usize) -> Result<Self> {
        Self::build(n, true)
    }

    fn build(n: usize, fault: bool) -> Result<Self> {
        if n > CATALOG_BOUND {
            return Err(Error::BoundExceeded {
                what: "chordal catalog size",
                value: n,
                bound: CATALOG_BOUND,
            });
        }
        let pairs = n * n.saturating_sub(1) / 2;
        let mut index = vec![ABSENT; 1 << pairs];
        let mut graphs = Vec::new();
        let mut masks = Vec::new();
        for mask in 0..1u64 << pairs {
            let g = UndirectedGraph::from_line_mask(n, mask);
            if chordal(&g) {
                index[mask as usize] = graphs.len() as u32;
                graphs.push(ChordalGraph::new(g)?);
                masks.push(mask);
            }
        }
        let parents = graphs.iter().map(ChordalGraph::parent_sets).collect();
        let neighbors = graphs
            .iter()
            .map(|g| {
                let moves = if fault {
                    inclusion_boundary_with_fault(g)
                } else {
                    inclusion_boundary(g)
                };
                moves
                    .into_iter()
                    .map(|mv| {
                        let h = match mv.kind {
                            MoveKind::AddLine => g.with_line(mv.a, mv.b),
                            MoveKind::RemoveLine => g.without_line(mv.a, mv.b),
                        };
                        let i = index[h.line_mask() as usize];
                        (mv, (i != ABSENT).then_some(i as usize))
                    })
                    .collect()
            })
            .collect();
        Ok(ChordalCatalog {
            n,
            graphs,
            parents,
            masks,
            index,
            neighbors,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn graphs(&self) -> &[ChordalGraph] {
        &self.graphs
    }

    pub fn graph(&self, i: usize) -> &ChordalGraph {
        &self.graphs[i]
    }

    pub fn parents(&self, i: usize) -> &[VertexSet] {
        &self.parents[i]
    }

    pub fn mask(&self, i: usize) -> u64 {
        self.masks[i]
    }

    /// Catalog index of `g`, if it is chordal.
    pub fn index_of(&self, g: &UndirectedGraph) -> Option<usize> {
        if g.n() != self.n {
            return None;
        }
        let i = self.index[g.line_mask() as usize];
        (i != ABSENT).then_some(i as usize)
    }

    pub fn neighbors(&self, i: usize) -> &[(Move, Option<usize>)] {
        &self.neighbors[i]
    }
}
