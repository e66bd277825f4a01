//! Oracle scores built from a known dependency model, used to exercise the
//! search on exact independence information instead of data.
//!
//! The score of a chordal graph `G` is the pair `(−gap(G), −dim(G))`, compared
//! lexicographically. `dim` is the parameter count with binary variables and
//! `gap` measures how far the factorization of `G` is from the target:
//!
//! `gap(G) = Σ_v [h(v ∪ pa(v)) − h(pa(v))] − h(V)`
//!
//! over the perfect-ordering orientation, for a submodular set function `h`
//! whose conditional mutual information `I(A; B | S)` vanishes exactly when the
//! target has `A ⊥ B | S`. By the chain rule `gap` is a sum of such terms, so
//! it is zero iff every local Markov statement of `G` holds in the target, and
//! removing a line `a − b` raises it by exactly `I(a; b | ne(a) ∩ ne(b))`.
//!
//! For undirected targets `T`, `h(A)` counts the connected vertex sets of `T`
//! that meet `A`; then `I(A; B | S)` counts connected sets meeting `A` and `B`
//! while avoiding `S`, which is positive iff `S` fails to separate. All values
//! are integers. For DAG and latent-DAG targets, `h(A) = ½ ln det Σ_AA` for a
//! linear Gaussian model with generic edge weights, which is faithful to the
//! DAG; gaps are quantized to `1e-9` and certified by [`OracleScore::self_check`].

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::greedy::Scorer;
use super::moves::MoveKind;
use crate::depmodel::{model_included, Backend, DependencyModel, ENUMERATION_BOUND};
use crate::error::{Error, Result};
use crate::graph::{ChordalGraph, Dag, UndirectedGraph, VertexSet};
use crate::verify::ChordalCatalog;

/// Gaussian gaps are counted in units of this many nats.
const GAUSSIAN_QUANTUM: f64 = 1e-9;

/// Number of weight seeds tried by [`OracleScore::certified`].
const MAX_WEIGHT_SEEDS: u64 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Coverage,
    Gaussian { seed: u64 },
}

#[derive(Clone, Debug)]
pub struct OracleScore {
    target: DependencyModel,
    kind: OracleKind,
    n: usize,
    /// `h` for every subset of observed vertices, indexed by bitmask.
    h: Vec<f64>,
    scale: f64,
}

/// Outcome of [`OracleScore::self_check`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SelfCheck {
    pub graphs: usize,
    pub removals: usize,
    /// Graphs where `gap = 0` disagrees with `I(G) ⊆ I(target)`.
    pub consistency_violations: usize,
    /// Included/excluded or dimension orderings broken by the scalar score.
    pub ordering_violations: usize,
    /// Removals whose score change has the wrong sign.
    pub local_violations: usize,
    pub first_violation: Option<String>,
}

impl SelfCheck {
    pub fn passed(&self) -> bool {
        self.consistency_violations == 0
            && self.ordering_violations == 0
            && self.local_violations == 0
    }

    fn note(&mut self, msg: impl FnOnce() -> String) {
        if self.first_violation.is_none() {
            self.first_violation = Some(msg());
        }
    }
}

impl OracleScore {
    /// Coverage oracle for undirected targets, Gaussian oracle (seed 0) otherwise.
    pub fn new(target: DependencyModel) -> Result<Self> {
        Self::with_seed(target, 0)
    }

    /// `seed` picks the Gaussian edge weights; it is ignored for undirected targets.
    pub fn with_seed(target: DependencyModel, seed: u64) -> Result<Self> {
        let n = target.n_observed();
        if n > ENUMERATION_BOUND {
            return Err(Error::BoundExceeded {
                what: "oracle score size",
                value: n,
                bound: ENUMERATION_BOUND,
            });
        }
        let (kind, h, scale) = match target.backend() {
            Backend::Undirected { graph } => (OracleKind::Coverage, coverage_table(graph), 1.0),
            Backend::Dag { dag } => {
                let observed: Vec<usize> = (0..n).collect();
                (
                    OracleKind::Gaussian { seed },
                    gaussian_table(dag, &observed, seed)?,
                    1.0 / GAUSSIAN_QUANTUM,
                )
            }
            Backend::Latent { dag, observed } => (
                OracleKind::Gaussian { seed },
                gaussian_table(dag, observed, seed)?,
                1.0 / GAUSSIAN_QUANTUM,
            ),
        };
        Ok(OracleScore {
            target,
            kind,
            n,
            h,
            scale,
        })
    }

    /// Tries weight seeds until the self-check passes over `catalog`; returns
    /// the last attempt with its report if none does.
    pub fn certified(
        target: DependencyModel,
        catalog: &ChordalCatalog,
    ) -> Result<(Self, SelfCheck)> {
        let mut last = None;
        for seed in 0..MAX_WEIGHT_SEEDS {
            let s = Self::with_seed(target.clone(), seed)?;
            let report = s.self_check(catalog)?;
            let done = report.passed() || s.kind == OracleKind::Coverage;
            last = Some((s, report));
            if done {
                break;
            }
        }
        Ok(last.expect("at least one seed is tried"))
    }

    pub fn target(&self) -> &DependencyModel {
        &self.target
    }

    pub fn kind(&self) -> OracleKind {
        self.kind
    }

    /// Weight placed on the gap so that the scalar score orders lexicographically.
    pub fn weight(&self) -> i64 {
        1i64 << self.n
    }

    fn gap_from_parents(&self, parents: &[VertexSet]) -> i64 {
        let h = |s: VertexSet| self.h[s.bits() as usize];
        let sum: f64 = parents
            .iter()
            .enumerate()
            .map(|(v, &pa)| h(pa.with(v)) - h(pa))
            .sum();
        ((sum - h(VertexSet::full(self.n))) * self.scale).round() as i64
    }

    fn pair_from_parents(&self, parents: &[VertexSet]) -> (i64, i64) {
        let dim: i64 = parents.iter().map(|pa| 1i64 << pa.len()).sum();
        (-self.gap_from_parents(parents), -dim)
    }

    fn scalar(&self, (gap, dim): (i64, i64)) -> i64 {
        self.weight() * gap + dim
    }

    fn check_graph(&self, g: &ChordalGraph) -> Result<()> {
        if g.n() != self.n {
            return Err(Error::VertexMismatch {
                left: g.n(),
                right: self.n,
            });
        }
        Ok(())
    }

    /// The lexicographic pair `(−gap, −dim)`.
    pub fn eval(&self, g: &ChordalGraph) -> Result<(i64, i64)> {
        self.check_graph(g)?;
        Ok(self.pair_from_parents(&g.parent_sets()))
    }

    /// Certifies, over every chordal graph in `catalog`, that `gap = 0` exactly
    /// for graphs whose model is included in the target, that the scalar score
    /// ranks included graphs above the rest and smaller included graphs above
    /// larger ones, and that every chordal removal `a − b` raises the score iff
    /// `a ⊥ b | ne(a) ∩ ne(b)` holds in the target.
    pub fn self_check(&self, catalog: &ChordalCatalog) -> Result<SelfCheck> {
        if catalog.n() != self.n {
            return Err(Error::VertexMismatch {
                left: catalog.n(),
                right: self.n,
            });
        }
        let mut report = SelfCheck {
            graphs: catalog.len(),
            ..SelfCheck::default()
        };
        let pairs: Vec<(i64, i64)> = (0..catalog.len())
            .map(|i| self.pair_from_parents(catalog.parents(i)))
            .collect();
        let scores: Vec<i64> = pairs.iter().map(|&p| self.scalar(p)).collect();

        let mut worst_included = i64::MAX;
        let mut best_excluded = i64::MIN;
        for (i, g) in catalog.graphs().iter().enumerate() {
            let included = model_included(g, &self.target)?.included;
            if included != (pairs[i].0 == 0) {
                report.consistency_violations += 1;
                report.note(|| format!("gap {} but included = {included} for {g:?}", -pairs[i].0));
            }
            if included {
                worst_included = worst_included.min(scores[i]);
                // Among included graphs the score must fall strictly with dimension.
                if scores[i] != pairs[i].1 {
                    report.ordering_violations += 1;
                    report.note(|| {
                        format!(
                            "included graph {g:?} scored {} not {}",
                            scores[i], pairs[i].1
                        )
                    });
                }
            } else {
                best_excluded = best_excluded.max(scores[i]);
            }
        }
        if worst_included <= best_excluded {
            report.ordering_violations += 1;
            report.note(|| {
                format!("excluded score {best_excluded} reaches included score {worst_included}")
            });
        }

        for (i, g) in catalog.graphs().iter().enumerate() {
            for &(mv, j) in catalog.neighbors(i) {
                let (MoveKind::RemoveLine, Some(j)) = (mv.kind, j) else {
                    continue;
                };
                report.removals += 1;
                let sep = g.neighbors(mv.a).intersection(g.neighbors(mv.b));
                let indep =
                    self.target
                        .holds(VertexSet::singleton(mv.a), VertexSet::singleton(mv.b), sep);
                let ok = if indep {
                    scores[j] > scores[i]
                } else {
                    scores[j] < scores[i]
                };
                if !ok {
                    report.local_violations += 1;
                    report.note(|| {
                        format!(
                            "{mv} on {g:?}: independent = {indep}, {} -> {}",
                            scores[i], scores[j]
                        )
                    });
                }
            }
        }
        Ok(report)
    }
}

impl Scorer for OracleScore {
    fn n_vars(&self) -> usize {
        self.n
    }

    fn score(&self, g: &ChordalGraph) -> f64 {
        self.scalar(self.pair_from_parents(&g.parent_sets())) as f64
    }

    fn min_improvement(&self) -> f64 {
        0.5
    }
}

/// Evaluates the oracle score of `g` as `(−gap, −dim)`.
pub fn oracle_score_eval(s: &OracleScore, g: &ChordalGraph) -> Result<(i64, i64)> {
    s.eval(g)
}

/// `h(A)` = number of connected vertex sets of `t` meeting `A`, for every `A`.
fn coverage_table(t: &UndirectedGraph) -> Vec<f64> {
    let n = t.n();
    let size = 1usize << n;
    // inside[B] = connected nonempty sets contained in B
    let mut inside = vec![0u64; size];
    for s in 1..size {
        let set = VertexSet::from_bits(s as u64);
        let first = VertexSet::singleton(set.first().unwrap());
        let blocked = VertexSet::full(n).difference(set);
        if t.reachable(first, blocked) == set {
            inside[s] = 1;
        }
    }
    for v in 0..n {
        for s in 0..size {
            if s & (1 << v) != 0 {
                inside[s] += inside[s ^ (1 << v)];
            }
        }
    }
    let total = inside[size - 1];
    (0..size)
        .map(|a| (total - inside[(size - 1) ^ a]) as f64)
        .collect()
}

/// `½ ln det Σ_AA` for a linear Gaussian model on `dag` with random edge weights
/// of magnitude in `[0.5, 1.5)` and unit noise, restricted to `observed`.
fn gaussian_table(dag: &Dag, observed: &[usize], seed: u64) -> Result<Vec<f64>> {
    let n = dag.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = DMatrix::<f64>::zeros(n, n);
    for (u, v) in dag.edges() {
        let w: f64 = rng.random_range(0.5..1.5);
        b[(v, u)] = if rng.random_bool(0.5) { w } else { -w };
    }
    let a = (DMatrix::identity(n, n) - b)
        .try_inverse()
        .ok_or_else(|| Error::Model("singular structural matrix".into()))?;
    let sigma = &a * a.transpose();
    let k = observed.len();
    let mut h = vec![0.0; 1 << k];
    for (s, slot) in h.iter_mut().enumerate().skip(1) {
        let idx: Vec<usize> = VertexSet::from_bits(s as u64)
            .iter()
            .map(|i| observed[i])
            .collect();
        let sub = DMatrix::from_fn(idx.len(), idx.len(), |r, c| sigma[(idx[r], idx[c])]);
        let chol = sub
            .cholesky()
            .ok_or_else(|| Error::Model("covariance is not positive definite".into()))?;
        *slot = chol.l().diagonal().iter().map(|d| d.ln()).sum();
    }
    Ok(h)
}
