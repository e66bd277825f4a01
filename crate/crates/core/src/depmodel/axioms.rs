//! Brute-force checks of the five axioms characterizing undirected-graph
//! representable dependency models, and of the chain lemma built on them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::model::DependencyModel;
use crate::error::{Error, Result};
use crate::graph::VertexSet;

/// Largest model size for exhaustive axiom sweeps (`5^n` tuples).
pub const GRAPHOID_EXHAUSTIVE_BOUND: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Symmetry,
    Decomposition,
    Intersection,
    StrongUnion,
    Transitivity,
}

impl Axiom {
    pub const ALL: [Axiom; 5] = [
        Axiom::Symmetry,
        Axiom::Decomposition,
        Axiom::Intersection,
        Axiom::StrongUnion,
        Axiom::Transitivity,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

/// One counterexample tuple `(X, Y, Z, W)`; for transitivity `W` holds `γ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCounterexample {
    pub x: VertexSet,
    pub y: VertexSet,
    pub z: VertexSet,
    pub w: VertexSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomResult {
    pub axiom: Axiom,
    pub checked: u64,
    pub violations: u64,
    pub counterexample: Option<AxiomCounterexample>,
}

impl AxiomResult {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphoidReport {
    pub results: Vec<AxiomResult>,
}

impl GraphoidReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(AxiomResult::passed)
    }

    pub fn result(&self, axiom: Axiom) -> &AxiomResult {
        self.results.iter().find(|r| r.axiom == axiom).unwrap()
    }
}

struct Tally {
    results: Vec<AxiomResult>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            results: Axiom::ALL
                .iter()
                .map(|&axiom| AxiomResult {
                    axiom,
                    checked: 0,
                    violations: 0,
                    counterexample: None,
                })
                .collect(),
        }
    }

    fn record(&mut self, axiom: Axiom, ok: bool, ce: AxiomCounterexample) {
        let r = &mut self.results[axiom as usize];
        r.checked += 1;
        if !ok {
            r.violations += 1;
            r.counterexample.get_or_insert(ce);
        }
    }
}

fn check_tuple(
    m: &DependencyModel,
    t: &mut Tally,
    x: VertexSet,
    y: VertexSet,
    z: VertexSet,
    w: VertexSet,
) {
    let all = VertexSet::full(m.n_observed());
    let ce = AxiomCounterexample { x, y, z, w };
    if x.is_empty() || y.is_empty() {
        return;
    }
    let xy_z = m.holds(x, y, z);
    if w.is_empty() {
        t.record(Axiom::Symmetry, xy_z == m.holds(y, x, z), ce);
        if xy_z {
            for g in all.difference(x.union(y).union(z)) {
                let gamma = VertexSet::singleton(g);
                let ok = m.holds(x, gamma, z) || m.holds(gamma, y, z);
                t.record(
                    Axiom::Transitivity,
                    ok,
                    AxiomCounterexample { w: gamma, ..ce },
                );
            }
        }
        return;
    }
    // X ⊥ Y∪W | Z ⇒ X ⊥ Y | Z ∧ X ⊥ W | Z
    if m.holds(x, y.union(w), z) {
        t.record(Axiom::Decomposition, xy_z && m.holds(x, w, z), ce);
    }
    // X ⊥ Y | Z∪W ∧ X ⊥ W | Z∪Y ⇒ X ⊥ Y∪W | Z
    if m.holds(x, y, z.union(w)) && m.holds(x, w, z.union(y)) {
        t.record(Axiom::Intersection, m.holds(x, y.union(w), z), ce);
    }
    // X ⊥ Y | Z ⇒ X ⊥ Y | Z∪W
    if xy_z {
        t.record(Axiom::StrongUnion, m.holds(x, y, z.union(w)), ce);
    }
}

/// Checks symmetry, decomposition, intersection, strong union and transitivity
/// (with singleton `γ`) on `m` by raw oracle queries.
pub fn graphoid_report(m: &DependencyModel, mode: CheckMode) -> Result<GraphoidReport> {
    let n = m.n_observed();
    let mut tally = Tally::new();
    match mode {
        CheckMode::Exhaustive => {
            if n > GRAPHOID_EXHAUSTIVE_BOUND {
                return Err(Error::BoundExceeded {
                    what: "graphoid sweep size",
                    value: n,
                    bound: GRAPHOID_EXHAUSTIVE_BOUND,
                });
            }
            // Assign every vertex to one of X, Y, Z, W or none.
            let total = 5usize.pow(n as u32);
            for code in 0..total {
                let [x, y, z, w] = decode(code, n);
                check_tuple(m, &mut tally, x, y, z, w);
            }
        }
        CheckMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let mut sets = [VertexSet::EMPTY; 4];
                for v in 0..n {
                    let slot = rng.random_range(0..5usize);
                    if slot < 4 {
                        sets[slot].insert(v);
                    }
                }
                let [x, y, z, w] = sets;
                check_tuple(m, &mut tally, x, y, z, w);
            }
        }
    }
    Ok(GraphoidReport {
        results: tally.results,
    })
}

fn decode(mut code: usize, n: usize) -> [VertexSet; 4] {
    let mut sets = [VertexSet::EMPTY; 4];
    for v in 0..n {
        let slot = code % 5;
        code /= 5;
        if slot < 4 {
            sets[slot].insert(v);
        }
    }
    sets
}

fn validate_chain(m: &DependencyModel, chain: &[VertexSet]) -> Result<()> {
    if chain.len() < 4 {
        return Err(Error::InvalidSets(format!(
            "chain needs at least 4 sets, got {}",
            chain.len()
        )));
    }
    if chain[0].len() != 1 || chain[chain.len() - 1].len() != 1 {
        return Err(Error::InvalidSets("chain ends must be singletons".into()));
    }
    let all = VertexSet::full(m.n_observed());
    let mut seen = VertexSet::EMPTY;
    for s in chain {
        if s.is_empty() || !s.is_disjoint(seen) || !s.is_subset(all) {
            return Err(Error::InvalidSets(format!(
                "chain sets must be nonempty, disjoint and in range: {chain:?}"
            )));
        }
        seen = seen.union(*s);
    }
    Ok(())
}

/// Whether `A_{i-1} ⊥ A_{i+1} | A_i` holds for every interior `i`.
pub fn sep_chain_premise(m: &DependencyModel, chain: &[VertexSet]) -> Result<bool> {
    validate_chain(m, chain)?;
    Ok(chain.windows(3).all(|w| m.holds(w[0], w[2], w[1])))
}

/// For a chain `A_0 = {x}, ..., A_n = {y}` whose premise holds, returns whether
/// `x ⊥ A_1 ∨ ... ∨ x ⊥ A_{n-1} ∨ x ⊥ y | A_{n-1}`; vacuously true otherwise.
pub fn sep_chain_holds(m: &DependencyModel, chain: &[VertexSet]) -> Result<bool> {
    if !sep_chain_premise(m, chain)? {
        return Ok(true);
    }
    let k = chain.len() - 1;
    let x = chain[0];
    let y = chain[k];
    let marginal = chain[1..k]
        .iter()
        .any(|&ai| m.holds(x, ai, VertexSet::EMPTY));
    Ok(marginal || m.holds(x, y, chain[k - 1]))
}
