use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::VertexSet;

/// `A ⊥ B | C` over disjoint vertex sets with `A`, `B` nonempty.
///
/// Stored with `A` lexicographically before `B`. For disjoint sets that is the
/// same as `min(A) < min(B)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndependenceStatement {
    a: VertexSet,
    b: VertexSet,
    c: VertexSet,
}

impl IndependenceStatement {
    pub fn new(a: VertexSet, b: VertexSet, c: VertexSet) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidSets("A and B must be nonempty".into()));
        }
        if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
            return Err(Error::InvalidSets(format!(
                "sets must be pairwise disjoint: {a}|{b}|{c}"
            )));
        }
        Ok(Self::canonical(a, b, c))
    }

    #[inline]
    pub(crate) fn canonical(a: VertexSet, b: VertexSet, c: VertexSet) -> Self {
        if a.first() < b.first() {
            IndependenceStatement { a, b, c }
        } else {
            IndependenceStatement { a: b, b: a, c }
        }
    }

    pub fn pair(a: usize, b: usize, c: VertexSet) -> Result<Self> {
        Self::new(VertexSet::singleton(a), VertexSet::singleton(b), c)
    }

    pub fn a(&self) -> VertexSet {
        self.a
    }

    pub fn b(&self) -> VertexSet {
        self.b
    }

    pub fn c(&self) -> VertexSet {
        self.c
    }

    pub fn support(&self) -> VertexSet {
        self.a.union(self.b).union(self.c)
    }
}

impl fmt::Display for IndependenceStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}|{}", self.a, self.b, self.c)
    }
}

impl fmt::Debug for IndependenceStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ⊥ {} | {}", self.a, self.b, self.c)
    }
}

impl FromStr for IndependenceStatement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split('|').collect();
        if parts.len() != 3 {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected `A|B|C`, got `{s}`"),
            });
        }
        let mut sets = [VertexSet::EMPTY; 3];
        for (set, part) in sets.iter_mut().zip(&parts) {
            for tok in part.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                let v: usize = tok.parse().map_err(|_| Error::Parse {
                    line: 1,
                    msg: format!("bad vertex index `{tok}`"),
                })?;
                if v >= crate::graph::MAX_VERTICES {
                    return Err(Error::VertexOutOfRange {
                        vertex: v,
                        n: crate::graph::MAX_VERTICES,
                    });
                }
                set.insert(v);
            }
        }
        IndependenceStatement::new(sets[0], sets[1], sets[2])
    }
}
