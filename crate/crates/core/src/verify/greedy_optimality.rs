use rayon::prelude::*;
use serde::Serialize;

use super::catalog::ChordalCatalog;
use crate::depmodel::{inclusion_optimal, DependencyModel};
use crate::error::{Error, Result};
use crate::graph::UndirectedGraph;
use crate::search::{Move, OracleScore, SelfCheck};

/// Largest target size for the theorem sweep.
pub const GREEDY_OPTIMALITY_BOUND: usize = 5;

/// At most this many counterexample payloads are kept per report.
const MAX_PAYLOADS: usize = 20;

type Lines = Vec<(usize, usize)>;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// The oracle score failed its own consistency checks for this target.
    SelfCheck {
        target: Lines,
        detail: Option<String>,
    },
    /// The neighbourhood enumerator listed a move whose result is not chordal.
    IllegalNeighbour {
        target: Lines,
        graph: Lines,
        #[serde(rename = "move")]
        mv: Move,
    },
    /// A local optimum of the oracle score that is not inclusion-optimal.
    NotInclusionOptimal {
        target: Lines,
        graph: Lines,
        score: (i64, i64),
    },
}

/// What the oracle-score landscape looks like for one target.
#[derive(Clone, Debug, Default)]
pub struct TargetOutcome {
    pub self_check: SelfCheck,
    pub local_optima: Vec<usize>,
    /// Local optima that are not inclusion-optimal, with their scores.
    pub non_optimal: Vec<(usize, (i64, i64))>,
    pub illegal: Vec<(usize, Move)>,
    pub greedy_runs: usize,
}

/// Scores every catalog graph, finds all local optima over the inclusion
/// boundary, tests each for inclusion-optimality, and, when `walk` is set,
/// follows best-improvement ascent from every start.
pub fn analyze_target(
    oracle: &OracleScore,
    catalog: &ChordalCatalog,
    walk: bool,
) -> Result<TargetOutcome> {
    let mut out = TargetOutcome {
        self_check: oracle.self_check(catalog)?,
        ..TargetOutcome::default()
    };
    let scores: Vec<(i64, i64)> = catalog
        .graphs()
        .iter()
        .map(|g| oracle.eval(g))
        .collect::<Result<_>>()?;
    for i in 0..catalog.len() {
        let mut local = true;
        for &(mv, j) in catalog.neighbors(i) {
            match j {
                None => out.illegal.push((i, mv)),
                Some(j) if scores[j] > scores[i] => local = false,
                Some(_) => {}
            }
        }
        if local {
            out.local_optima.push(i);
            if !inclusion_optimal(catalog.graph(i), oracle.target())? {
                out.non_optimal.push((i, scores[i]));
            }
        }
    }
    if walk {
        for start in 0..catalog.len() {
            let mut cur = start;
            // Strictly increasing scores bound the walk by the catalog size.
            loop {
                let mut best: Option<usize> = None;
                for &(_, j) in catalog.neighbors(cur) {
                    if let Some(j) = j {
                        if scores[j] > scores[cur] && best.is_none_or(|b| scores[j] > scores[b]) {
                            best = Some(j);
                        }
                    }
                }
                match best {
                    Some(j) => cur = j,
                    None => break,
                }
            }
            debug_assert!(out.local_optima.binary_search(&cur).is_ok());
            out.greedy_runs += 1;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreedyOptimalityReport {
    pub n: usize,
    pub targets: usize,
    pub chordal_graphs: usize,
    pub self_checked_removals: usize,
    pub local_optima: usize,
    pub greedy_runs: usize,
    pub violations: usize,
    pub counterexamples: Vec<Violation>,
}

impl GreedyOptimalityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GreedyOptimalityOptions {
    /// Also run the greedy ascent from every chordal starting graph.
    pub from_every_start: bool,
    /// Use the deliberately faulty neighbourhood enumerator.
    pub inject_fault: bool,
}

/// For every undirected target on `n` vertices, certifies the oracle score and
/// checks that each of its local optima over the inclusion boundary is
/// inclusion-optimal.
pub fn verify_greedy_optimality(
    n: usize,
    opts: GreedyOptimalityOptions,
) -> Result<GreedyOptimalityReport> {
    if n > GREEDY_OPTIMALITY_BOUND {
        return Err(Error::BoundExceeded {
            what: "theorem sweep size",
            value: n,
            bound: GREEDY_OPTIMALITY_BOUND,
        });
    }
    let catalog = if opts.inject_fault {
        ChordalCatalog::with_fault(n)?
    } else {
        ChordalCatalog::new(n)?
    };
    let pairs = n * n.saturating_sub(1) / 2;
    let outcomes: Vec<(Lines, TargetOutcome)> = (0..1u64 << pairs)
        .into_par_iter()
        .map(|mask| {
            let t = UndirectedGraph::from_line_mask(n, mask);
            let oracle = OracleScore::new(DependencyModel::undirected(t.clone()))?;
            Ok((
                t.lines().collect(),
                analyze_target(&oracle, &catalog, opts.from_every_start)?,
            ))
        })
        .collect::<Result<_>>()?;

    let mut report = GreedyOptimalityReport {
        n,
        targets: outcomes.len(),
        chordal_graphs: catalog.len(),
        self_checked_removals: 0,
        local_optima: 0,
        greedy_runs: 0,
        violations: 0,
        counterexamples: Vec::new(),
    };
    let lines = |i: usize| -> Lines { catalog.graph(i).lines().collect() };
    for (target, o) in outcomes {
        report.self_checked_removals += o.self_check.removals;
        report.local_optima += o.local_optima.len();
        report.greedy_runs += o.greedy_runs;
        let mut found = Vec::new();
        if !o.self_check.passed() {
            found.push(Violation::SelfCheck {
                target: target.clone(),
                detail: o.self_check.first_violation.clone(),
            });
        }
        for &(i, mv) in &o.illegal {
            found.push(Violation::IllegalNeighbour {
                target: target.clone(),
                graph: lines(i),
                mv,
            });
        }
        for &(i, score) in &o.non_optimal {
            found.push(Violation::NotInclusionOptimal {
                target: target.clone(),
                graph: lines(i),
                score,
            });
        }
        report.violations += found.len();
        let room = MAX_PAYLOADS.saturating_sub(report.counterexamples.len());
        report.counterexamples.extend(found.into_iter().take(room));
    }
    Ok(report)
}
