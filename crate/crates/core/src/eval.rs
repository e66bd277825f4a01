//! Parameter fitting and the measurements reported per learned model.

use std::fs::OpenOptions;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::{orient_by_ordering, ChordalGraph, Dag, UndirectedGraph};
use crate::synth::{config_count, DiscreteBayesNet};

/// Largest joint state space enumerated by [`kl_exact`].
pub const KL_EXACT_MAX_STATES: usize = 1 << 20;

/// A learned or generating structure.
#[derive(Clone, Debug, PartialEq)]
pub enum Structure {
    Chordal(ChordalGraph),
    Dag(Dag),
}

impl Structure {
    pub fn n(&self) -> usize {
        match self {
            Structure::Chordal(g) => g.n(),
            Structure::Dag(d) => d.n(),
        }
    }

    /// The DAG whose tables are fitted: chordal graphs are directed along their stored perfect ordering.
    pub fn to_dag(&self) -> Dag {
        match self {
            Structure::Chordal(g) => {
                orient_by_ordering(g, g.ordering()).expect("stored ordering is perfect")
            }
            Structure::Dag(d) => d.clone(),
        }
    }

    pub fn skeleton(&self) -> UndirectedGraph {
        match self {
            Structure::Chordal(g) => g.graph().clone(),
            Structure::Dag(d) => d.skeleton(),
        }
    }
}

impl From<ChordalGraph> for Structure {
    fn from(g: ChordalGraph) -> Self {
        Structure::Chordal(g)
    }
}

impl From<Dag> for Structure {
    fn from(d: Dag) -> Self {
        Structure::Dag(d)
    }
}

/// Posterior-mean tables under the BDeu prior:
/// `θ_vjk = (N_vjk + α_vjk) / (N_vj + α_vj)` with `α_vjk = ess / (r_v q_v)`.
pub fn fit_parameters(structure: &Structure, data: &Dataset, ess: f64) -> Result<DiscreteBayesNet> {
    if !(ess > 0.0) || !ess.is_finite() {
        return Err(Error::InvalidEss(ess));
    }
    if structure.n() != data.n_vars() {
        return Err(Error::VertexMismatch {
            left: structure.n(),
            right: data.n_vars(),
        });
    }
    let dag = structure.to_dag();
    let arities = data.arities();
    let mut tables = Vec::with_capacity(dag.n());
    for v in 0..dag.n() {
        let r = arities[v];
        let q = config_count(dag.parents(v), arities)
            .filter(|q| q.checked_mul(r).is_some())
            .ok_or_else(|| Error::Model(format!("table for vertex {v} is too large")))?;
        let mut counts = vec![0u32; q * r];
        let mut config = vec![0usize; data.n_rows()];
        let mut stride = 1;
        for p in dag.parents(v) {
            for (c, &x) in config.iter_mut().zip(data.column(p)) {
                *c += x as usize * stride;
            }
            stride *= arities[p];
        }
        for (&c, &x) in config.iter().zip(data.column(v)) {
            counts[c * r + x as usize] += 1;
        }
        let alpha_jk = ess / (q as f64 * r as f64);
        let alpha_j = ess / q as f64;
        let mut t = Vec::with_capacity(q * r);
        for row in counts.chunks_exact(r) {
            let n_j: u32 = row.iter().sum();
            let denom = n_j as f64 + alpha_j;
            t.extend(row.iter().map(|&c| (c as f64 + alpha_jk) / denom));
        }
        tables.push(t);
    }
    DiscreteBayesNet::new(dag, arities.to_vec(), tables)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KlEstimate {
    /// Mean log-ratio `ln P_g(x) − ln P_p(x)` over the test rows, in nats.
    pub kl: f64,
    /// Sample standard deviation of the log-ratios over `√|D|`.
    pub se: f64,
}

fn check_pair(g: &DiscreteBayesNet, p: &DiscreteBayesNet) -> Result<()> {
    if g.arities() != p.arities() {
        return Err(Error::Model("nets disagree on variables or arities".into()));
    }
    Ok(())
}

/// Monte Carlo estimate of `KL(g ‖ p)` from a test set drawn from `g`.
pub fn kl_estimate(
    g: &DiscreteBayesNet,
    p: &DiscreteBayesNet,
    test: &Dataset,
) -> Result<KlEstimate> {
    check_pair(g, p)?;
    if test.arities() != g.arities() {
        return Err(Error::Data("test data does not match the nets".into()));
    }
    let m = test.n_rows();
    if m == 0 {
        return Err(Error::Data("empty test set".into()));
    }
    let mut ratios = Vec::with_capacity(m);
    for i in 0..m {
        let x = test.row(i);
        let lp = p.log_prob(&x);
        if lp == f64::NEG_INFINITY {
            return Err(Error::ZeroProbability(i));
        }
        ratios.push(g.log_prob(&x) - lp);
    }
    let mean = ratios.iter().sum::<f64>() / m as f64;
    let se = if m > 1 {
        let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
        (var / m as f64).sqrt()
    } else {
        0.0
    };
    Ok(KlEstimate { kl: mean, se })
}

/// `Σ_x P_g(x) ln(P_g(x) / P_p(x))` by enumerating every joint state.
pub fn kl_exact(g: &DiscreteBayesNet, p: &DiscreteBayesNet) -> Result<f64> {
    check_pair(g, p)?;
    let arities = g.arities();
    let states = arities
        .iter()
        .try_fold(1usize, |acc, &r| acc.checked_mul(r))
        .filter(|&s| s <= KL_EXACT_MAX_STATES)
        .ok_or(Error::BoundExceeded {
            what: "joint state space",
            value: arities
                .iter()
                .map(|&r| r as f64)
                .product::<f64>()
                .min(usize::MAX as f64) as usize,
            bound: KL_EXACT_MAX_STATES,
        })?;
    let mut x = vec![0u8; arities.len()];
    let mut kl = 0.0;
    for _ in 0..states {
        let lg = g.log_prob(&x);
        if lg > f64::NEG_INFINITY {
            kl += lg.exp() * (lg - p.log_prob(&x));
        }
        // odometer, variable 0 fastest
        for (v, xv) in x.iter_mut().enumerate() {
            *xv += 1;
            if (*xv as usize) < arities[v] {
                break;
            }
            *xv = 0;
        }
    }
    Ok(kl)
}

/// `(false positives, false negatives)`: lines only in `learned`, lines only in `target`.
pub fn line_diff(learned: &UndirectedGraph, target: &UndirectedGraph) -> Result<(usize, usize)> {
    if learned.n() != target.n() {
        return Err(Error::VertexMismatch {
            left: learned.n(),
            right: target.n(),
        });
    }
    let fp = learned
        .lines()
        .filter(|&(a, b)| !target.has_line(a, b))
        .count();
    let fnl = target
        .lines()
        .filter(|&(a, b)| !learned.has_line(a, b))
        .count();
    Ok((fp, fnl))
}

/// One line of the results table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub target_kind: String,
    pub n_vars: usize,
    pub n_obs: usize,
    pub replicate: usize,
    pub learner: String,
    pub kl: f64,
    pub kl_se: f64,
    pub dim_learned: u64,
    pub dim_target: u64,
    pub fp_lines: Option<usize>,
    pub fn_lines: Option<usize>,
    pub seed: u64,
}

/// Appends rows to a CSV file, writing the header first if the file is new or empty.
pub fn append_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let fresh = std::fs::metadata(path)
        .map(|m| m.len() == 0)
        .unwrap_or(true);
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(fresh)
        .from_writer(file);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    Ok(rdr.deserialize().collect::<std::result::Result<_, _>>()?)
}
