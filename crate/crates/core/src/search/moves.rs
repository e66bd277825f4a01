use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{chordal, ChordalGraph, VertexSet};

/// Additions sort before removals, so the derived order on [`Move`] is the
/// deterministic neighbourhood order used for tie-breaking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    AddLine,
    RemoveLine,
}

/// A single-line change to a chordal graph; endpoints are stored with `a < b`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub kind: MoveKind,
    pub a: usize,
    pub b: usize,
}

impl Move {
    pub fn new(kind: MoveKind, a: usize, b: usize) -> Self {
        Move {
            kind,
            a: a.min(b),
            b: a.max(b),
        }
    }

    pub fn add(a: usize, b: usize) -> Self {
        Move::new(MoveKind::AddLine, a, b)
    }

    pub fn remove(a: usize, b: usize) -> Self {
        Move::new(MoveKind::RemoveLine, a, b)
    }

    pub fn reverse(self) -> Self {
        let kind = match self.kind {
            MoveKind::AddLine => MoveKind::RemoveLine,
            MoveKind::RemoveLine => MoveKind::AddLine,
        };
        Move { kind, ..self }
    }

    /// Fails unless applying the move to `g` yields a chordal graph.
    pub fn check_legal(self, g: &ChordalGraph) -> Result<()> {
        self.apply(g).map(|_| ())
    }

    pub fn apply(self, g: &ChordalGraph) -> Result<ChordalGraph> {
        let out = match self.kind {
            MoveKind::AddLine => g.add_line(self.a, self.b),
            MoveKind::RemoveLine => g.remove_line(self.a, self.b),
        };
        out.map_err(|e| match e {
            Error::NotChordal { .. } => {
                Error::IllegalMove(format!("{self} leaves the graph non-chordal"))
            }
            e => e,
        })
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verb = match self.kind {
            MoveKind::AddLine => "add",
            MoveKind::RemoveLine => "remove",
        };
        write!(f, "{verb} {}-{}", self.a, self.b)
    }
}

impl fmt::Debug for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Move {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::IllegalMove(format!("cannot parse move `{s}`"));
        let (verb, pair) = s.trim().split_once(' ').ok_or_else(bad)?;
        let (a, b) = pair.split_once('-').ok_or_else(bad)?;
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a == b {
            return Err(bad());
        }
        match verb {
            "add" => Ok(Move::add(a, b)),
            "remove" => Ok(Move::remove(a, b)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Move {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Move {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// All single-line additions and removals that keep `g` chordal, additions
/// first, each group in lexicographic endpoint order.
pub fn inclusion_boundary(g: &ChordalGraph) -> Vec<Move> {
    boundary(g, false)
}

/// [`inclusion_boundary`] with one deliberate defect: the first addition that
/// breaks chordality is listed too. Used to check that verification notices.
#[doc(hidden)]
pub fn inclusion_boundary_with_fault(g: &ChordalGraph) -> Vec<Move> {
    boundary(g, true)
}

fn boundary(g: &ChordalGraph, inject_fault: bool) -> Vec<Move> {
    let n = g.n();
    let mut adds = Vec::new();
    let mut removes = Vec::new();
    let mut fault_pending = inject_fault;
    for a in 0..n {
        for b in a + 1..n {
            if g.has_line(a, b) {
                // A removal keeps chordality iff the common neighbourhood is complete.
                let common = g.neighbors(a).intersection(g.neighbors(b));
                if g.is_complete_set(common) {
                    debug_assert!(chordal(&g.without_line(a, b)));
                    removes.push(Move::remove(a, b));
                }
            } else if !g
                .reachable(VertexSet::singleton(a), VertexSet::EMPTY)
                .contains(b)
                || chordal(&g.with_line(a, b))
            {
                adds.push(Move::add(a, b));
            } else if fault_pending {
                fault_pending = false;
                adds.push(Move::add(a, b));
            }
        }
    }
    adds.extend(removes);
    adds
}
