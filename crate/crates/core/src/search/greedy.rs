use serde::Serialize;

use super::moves::{inclusion_boundary, Move};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::{ChordalGraph, UndirectedGraph};
use crate::scoring::{self, ScoreCache};

/// Smallest BDeu gain accepted as an improvement. Differences of log-gamma
/// sums at `N = 10^5` carry rounding noise near `1e-9`, so anything below this
/// is treated as a tie.
pub const BDEU_MIN_IMPROVEMENT: f64 = 1e-7;

/// A score over chordal graphs on a fixed vertex set.
pub trait Scorer: Sync {
    fn n_vars(&self) -> usize;

    fn score(&self, g: &ChordalGraph) -> f64;

    /// `score(mv(g)) − score(g)` for a legal move.
    fn move_delta(&self, g: &ChordalGraph, mv: Move) -> f64 {
        let h = mv.apply(g).expect("move_delta called with an illegal move");
        self.score(&h) - self.score(g)
    }

    /// Deltas at or below this value do not count as improvements.
    fn min_improvement(&self) -> f64 {
        0.0
    }
}

/// BDeu scorer owning its local-score cache.
#[derive(Debug)]
pub struct BdeuScorer<'a> {
    data: &'a Dataset,
    cache: ScoreCache,
}

impl<'a> BdeuScorer<'a> {
    pub fn new(data: &'a Dataset, ess: f64) -> Result<Self> {
        Ok(BdeuScorer {
            data,
            cache: ScoreCache::new(data, ess)?,
        })
    }

    pub fn data(&self) -> &'a Dataset {
        self.data
    }

    pub fn cache(&self) -> &ScoreCache {
        &self.cache
    }
}

impl Scorer for BdeuScorer<'_> {
    fn n_vars(&self) -> usize {
        self.data.n_vars()
    }

    fn score(&self, g: &ChordalGraph) -> f64 {
        g.parent_sets()
            .iter()
            .enumerate()
            .map(|(v, &pa)| self.cache.local(self.data, v, pa))
            .sum()
    }

    fn move_delta(&self, g: &ChordalGraph, mv: Move) -> f64 {
        scoring::move_delta_unchecked(g, mv, self.data, &self.cache)
    }

    fn min_improvement(&self) -> f64 {
        BDEU_MIN_IMPROVEMENT
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Selection {
    /// Take the neighbour with the largest delta; ties go to the earliest move.
    #[default]
    BestImprovement,
    /// Take the first improving neighbour in move order.
    FirstImprovement,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchPolicy {
    pub selection: Selection,
    /// Stop after this many accepted moves even if improvements remain.
    pub max_steps: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceStep<M> {
    pub step: usize,
    /// Fingerprint of the structure after the move.
    pub fingerprint: u64,
    #[serde(rename = "move")]
    pub mv: M,
    pub delta: f64,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchTrace<M = Move> {
    pub initial_total: f64,
    pub steps: Vec<TraceStep<M>>,
    /// True when the search stopped because no neighbour improved.
    pub terminal: bool,
}

#[derive(Serialize)]
struct TraceRecord<'a, M> {
    step: usize,
    #[serde(rename = "move")]
    mv: &'a M,
    delta: f64,
    total: f64,
}

impl<M: Serialize> SearchTrace<M> {
    /// One JSON object per accepted move with fields `step`, `move`, `delta`, `total`.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            let rec = TraceRecord {
                step: s.step,
                mv: &s.mv,
                delta: s.delta,
                total: s.total,
            };
            out.push_str(&serde_json::to_string(&rec).expect("trace records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn final_total(&self) -> f64 {
        self.steps.last().map_or(self.initial_total, |s| s.total)
    }
}

/// FNV-1a over the sorted line list.
pub fn graph_fingerprint(g: &UndirectedGraph) -> u64 {
    fingerprint_pairs(g.n(), g.lines())
}

pub(crate) fn fingerprint_pairs(n: usize, pairs: impl Iterator<Item = (usize, usize)>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |x: u64| {
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100_0000_01b3);
        }
    };
    eat(n as u64);
    for (a, b) in pairs {
        eat(a as u64);
        eat(b as u64);
    }
    h
}

/// Hill-climbs from `start` over the inclusion boundary until no neighbour
/// improves the score by more than `scorer.min_improvement()`.
pub fn greedy_chordal<S: Scorer + ?Sized>(
    scorer: &S,
    start: ChordalGraph,
    policy: SearchPolicy,
) -> Result<(ChordalGraph, SearchTrace)> {
    if start.n() != scorer.n_vars() {
        return Err(Error::VertexMismatch {
            left: start.n(),
            right: scorer.n_vars(),
        });
    }
    let threshold = scorer.min_improvement();
    let mut g = start;
    let mut trace = SearchTrace {
        initial_total: scorer.score(&g),
        steps: Vec::new(),
        terminal: false,
    };
    loop {
        if policy.max_steps.is_some_and(|m| trace.steps.len() >= m) {
            return Ok((g, trace));
        }
        let mut best: Option<(Move, f64)> = None;
        for mv in inclusion_boundary(&g) {
            let delta = scorer.move_delta(&g, mv);
            if delta > threshold && best.is_none_or(|(_, d)| delta > d) {
                best = Some((mv, delta));
                if policy.selection == Selection::FirstImprovement {
                    break;
                }
            }
        }
        let Some((mv, delta)) = best else {
            trace.terminal = true;
            return Ok((g, trace));
        };
        g = mv.apply(&g)?;
        trace.steps.push(TraceStep {
            step: trace.steps.len() + 1,
            fingerprint: graph_fingerprint(&g),
            mv,
            delta,
            total: scorer.score(&g),
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Rewards lines of a fixed target and penalizes all others.
    struct LineMatch(UndirectedGraph);

    impl Scorer for LineMatch {
        fn n_vars(&self) -> usize {
            self.0.n()
        }
        fn score(&self, g: &ChordalGraph) -> f64 {
            g.lines()
                .map(|(a, b)| if self.0.has_line(a, b) { 1.0 } else { -1.0 })
                .sum()
        }
    }

    #[test]
    fn climbs_to_a_chordal_target() {
        let target = UndirectedGraph::from_lines(4, [(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        let (g, trace) = greedy_chordal(
            &LineMatch(target.clone()),
            ChordalGraph::empty(4),
            SearchPolicy::default(),
        )
        .unwrap();
        assert_eq!(g.graph(), &target);
        assert!(trace.terminal);
        assert_eq!(trace.steps.len(), 4);
        // ties broken by move order
        let first: Vec<_> = trace.steps.iter().map(|s| s.mv).collect();
        assert_eq!(
            first,
            vec![
                Move::add(0, 1),
                Move::add(0, 2),
                Move::add(1, 2),
                Move::add(2, 3)
            ]
        );
        assert!(trace.steps.iter().all(|s| s.delta > 0.0));
        assert_eq!(trace.final_total(), 4.0);
        let lines = trace.to_json_lines();
        assert_eq!(lines.lines().count(), 4);
        assert!(lines.starts_with("{\"step\":1,\"move\":\"add 0-1\",\"delta\":1.0,\"total\":1.0}"));
    }

    #[test]
    fn max_steps_and_first_improvement() {
        let target = UndirectedGraph::complete(4);
        let policy = SearchPolicy {
            selection: Selection::FirstImprovement,
            max_steps: Some(2),
        };
        let (g, trace) =
            greedy_chordal(&LineMatch(target), ChordalGraph::empty(4), policy).unwrap();
        assert_eq!(g.line_count(), 2);
        assert!(!trace.terminal);
    }

    #[test]
    fn rejects_size_mismatch() {
        let s = LineMatch(UndirectedGraph::empty(3));
        assert!(greedy_chordal(&s, ChordalGraph::empty(4), SearchPolicy::default()).is_err());
    }
}
