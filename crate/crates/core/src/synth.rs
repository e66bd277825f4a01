//! Random structures, parameters and datasets for synthetic experiments.

use std::path::Path;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::data::{default_names, Dataset};
use crate::error::{Error, Result};
use crate::graph::{min_fill_chordalize, orient_by_ordering, ChordalGraph, Dag, VertexSet};

/// Lower bound on every probability when clamping is requested; with two
/// states this confines parameters to `[0.05, 0.95]`.
pub const CLAMP_FLOOR: f64 = 0.05;

/// Largest parent count used for chordal targets before moralization.
pub const CHORDAL_TARGET_MAX_PARENTS: usize = 3;

/// Deterministic generator for one `(seed, stream)` pair.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A DAG with one conditional probability table per vertex.
///
/// `tables[v]` holds `q_v` rows of `r_v` probabilities, row-major. Row `j`
/// belongs to the parent configuration whose mixed-radix digits, lowest-index
/// parent varying fastest, spell `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetJson", into = "NetJson")]
pub struct DiscreteBayesNet {
    dag: Dag,
    arities: Vec<usize>,
    tables: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct NetJson {
    n: usize,
    arities: Vec<usize>,
    edges: Vec<(usize, usize)>,
    tables: Vec<Vec<f64>>,
}

impl TryFrom<NetJson> for DiscreteBayesNet {
    type Error = Error;
    fn try_from(j: NetJson) -> Result<Self> {
        if j.arities.len() != j.n {
            return Err(Error::Model(format!(
                "{} arities for {} vertices",
                j.arities.len(),
                j.n
            )));
        }
        DiscreteBayesNet::new(Dag::from_edges(j.n, j.edges)?, j.arities, j.tables)
    }
}

impl From<DiscreteBayesNet> for NetJson {
    fn from(net: DiscreteBayesNet) -> Self {
        NetJson {
            n: net.dag.n(),
            edges: net.dag.edges(),
            arities: net.arities,
            tables: net.tables,
        }
    }
}

/// Tolerance on row sums when a net is built from external tables.
const ROW_SUM_TOLERANCE: f64 = 1e-9;

impl DiscreteBayesNet {
    pub fn new(dag: Dag, arities: Vec<usize>, tables: Vec<Vec<f64>>) -> Result<Self> {
        let n = dag.n();
        if arities.len() != n || tables.len() != n {
            return Err(Error::Model(format!(
                "{n} vertices, {} arities, {} tables",
                arities.len(),
                tables.len()
            )));
        }
        if let Some(v) = arities
            .iter()
            .position(|&r| !(2..=crate::data::MAX_ARITY).contains(&r))
        {
            return Err(Error::Model(format!("vertex {v} has arity {}", arities[v])));
        }
        for (v, t) in tables.iter().enumerate() {
            let r = arities[v];
            let q = config_count(dag.parents(v), &arities)
                .ok_or_else(|| Error::Model(format!("table for vertex {v} is too large")))?;
            if t.len() != q * r {
                return Err(Error::Model(format!(
                    "table {v} has {} entries, expected {}",
                    t.len(),
                    q * r
                )));
            }
            for (j, row) in t.chunks_exact(r).enumerate() {
                let sum: f64 = row.iter().sum();
                if row.iter().any(|&p| !(0.0..=1.0).contains(&p))
                    || (sum - 1.0).abs() > ROW_SUM_TOLERANCE
                {
                    return Err(Error::Model(format!(
                        "table {v} row {j} is not a distribution"
                    )));
                }
            }
        }
        Ok(DiscreteBayesNet {
            dag,
            arities,
            tables,
        })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn n(&self) -> usize {
        self.dag.n()
    }

    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn table(&self, v: usize) -> &[f64] {
        &self.tables[v]
    }

    /// Row index of the parent configuration of `v` in the full assignment `x`.
    pub fn config_index(&self, v: usize, x: &[u8]) -> usize {
        let mut j = 0;
        let mut stride = 1;
        for p in self.dag.parents(v) {
            j += x[p] as usize * stride;
            stride *= self.arities[p];
        }
        j
    }

    /// `P(X_v = x_v | parents)` under the assignment `x`.
    pub fn cond_prob(&self, v: usize, x: &[u8]) -> f64 {
        self.tables[v][self.config_index(v, x) * self.arities[v] + x[v] as usize]
    }

    /// Natural-log joint probability of the full assignment `x`.
    pub fn log_prob(&self, x: &[u8]) -> f64 {
        (0..self.n()).map(|v| self.cond_prob(v, x).ln()).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("nets serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

pub(crate) fn config_count(parents: VertexSet, arities: &[usize]) -> Option<usize> {
    parents
        .iter()
        .try_fold(1usize, |acc, p| acc.checked_mul(arities[p]))
}

/// Random DAG: a uniform vertex order, then for each vertex a parent count
/// uniform in `0..=min(max_parents, #predecessors)` and that many predecessors
/// chosen uniformly.
pub fn random_dag<R: Rng + ?Sized>(n: usize, max_parents: usize, rng: &mut R) -> Result<Dag> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut parents = vec![VertexSet::EMPTY; n];
    for (i, &v) in order.iter().enumerate() {
        let k = rng.random_range(0..=max_parents.min(i));
        for j in sample(rng, i, k) {
            parents[v].insert(order[j]);
        }
    }
    Dag::from_parents(parents)
}

/// One Dirichlet(1, ..., 1) draw, optionally pulled toward uniform so every
/// entry is at least `floor`.
fn dirichlet_row<R: Rng + ?Sized>(r: usize, floor: Option<f64>, rng: &mut R) -> Vec<f64> {
    let mut row: Vec<f64> = (0..r).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = row.iter().sum();
    for p in &mut row {
        *p /= total;
    }
    if let Some(floor) = floor {
        // θ ↦ (1 − rλ)θ + λ keeps the sum at one and every entry ≥ λ.
        let lambda = floor.min(1.0 / r as f64);
        for p in &mut row {
            *p = (1.0 - r as f64 * lambda) * *p + lambda;
        }
    }
    row
}

/// Fills every table row of `dag` with a symmetric Dirichlet(1) draw.
pub fn random_parameters<R: Rng + ?Sized>(
    dag: &Dag,
    arities: &[usize],
    clamp: bool,
    rng: &mut R,
) -> Result<DiscreteBayesNet> {
    let floor = clamp.then_some(CLAMP_FLOOR);
    let mut tables = Vec::with_capacity(dag.n());
    for v in 0..dag.n() {
        let q = config_count(dag.parents(v), arities)
            .ok_or_else(|| Error::Model(format!("table for vertex {v} is too large")))?;
        let mut t = Vec::with_capacity(q * arities[v]);
        for _ in 0..q {
            t.extend(dirichlet_row(arities[v], floor, rng));
        }
        tables.push(t);
    }
    DiscreteBayesNet::new(dag.clone(), arities.to_vec(), tables)
}

/// Random decomposable target: a random DAG with at most three parents per
/// vertex is moralized and triangulated by minimum fill-in, and parameters are
/// drawn on the perfect-ordering orientation of the result.
pub fn random_chordal_target<R: Rng + ?Sized>(
    n: usize,
    arities: &[usize],
    clamp: bool,
    rng: &mut R,
) -> Result<(ChordalGraph, DiscreteBayesNet)> {
    let dag = random_dag(n, CHORDAL_TARGET_MAX_PARENTS, rng)?;
    let (g, _fill) = min_fill_chordalize(&dag.moralize());
    let oriented = orient_by_ordering(&g, g.ordering())?;
    let net = random_parameters(&oriented, arities, clamp, rng)?;
    Ok((g, net))
}

/// Draws `count` independent rows by sampling vertices in topological order.
pub fn ancestral_sample<R: Rng + ?Sized>(
    net: &DiscreteBayesNet,
    count: usize,
    rng: &mut R,
) -> Result<Dataset> {
    let n = net.n();
    let order = net.dag().topological_order()?;
    let mut columns = vec![Vec::with_capacity(count); n];
    let mut x = vec![0u8; n];
    for _ in 0..count {
        for &v in &order {
            let r = net.arities[v];
            let j = net.config_index(v, &x);
            let row = &net.tables[v][j * r..(j + 1) * r];
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut state = r - 1;
            for (k, &p) in row.iter().enumerate() {
                acc += p;
                if u < acc {
                    state = k;
                    break;
                }
            }
            x[v] = state as u8;
            columns[v].push(x[v]);
        }
    }
    Dataset::from_columns(default_names(n), net.arities.clone(), columns)
}
