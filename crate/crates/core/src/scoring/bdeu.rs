use std::collections::HashMap;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::VertexSet;

/// Dense count tables are used up to this many cells (and at most ~16 per row).
const DENSE_CELLS: usize = 1 << 22;

/// `ln Γ(α + count) − ln Γ(α)`.
#[inline]
fn ln_rising(alpha: f64, count: u32) -> f64 {
    if count == 0 {
        0.0
    } else {
        libm::lgamma(alpha + count as f64) - libm::lgamma(alpha)
    }
}

/// Per-configuration contribution to the BDeu score for one observed parent configuration.
#[inline]
fn config_term(counts: &[u32], alpha_j: f64, alpha_jk: f64) -> f64 {
    let n_j: u32 = counts.iter().sum();
    if n_j == 0 {
        return 0.0;
    }
    let mut t = -ln_rising(alpha_j, n_j);
    for &c in counts {
        t += ln_rising(alpha_jk, c);
    }
    t
}

/// BDeu log marginal likelihood of `v` given `parents`:
///
/// `Σ_j [ lnΓ(α_j) − lnΓ(α_j + N_j) + Σ_k (lnΓ(α_jk + N_jk) − lnΓ(α_jk)) ]`
///
/// with `α_jk = ess / (r q)` and `α_j = ess / q`.
pub fn bdeu_local_score(v: usize, parents: VertexSet, data: &Dataset, ess: f64) -> Result<f64> {
    if !(ess > 0.0) || !ess.is_finite() {
        return Err(Error::InvalidEss(ess));
    }
    let n = data.n_vars();
    if v >= n {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    if parents.contains(v) || !parents.is_subset(VertexSet::full(n)) {
        return Err(Error::InvalidSets(format!(
            "bad parent set {parents:?} for vertex {v}"
        )));
    }
    Ok(local_score_unchecked(v, parents, data, ess))
}

pub(crate) fn local_score_unchecked(v: usize, parents: VertexSet, data: &Dataset, ess: f64) -> f64 {
    let r = data.arity(v);
    let pa: Vec<usize> = parents.to_vec();
    let q_f: f64 = pa.iter().map(|&p| data.arity(p) as f64).product();
    let alpha_j = ess / q_f;
    let alpha_jk = alpha_j / r as f64;
    if data.n_rows() == 0 {
        return 0.0;
    }
    let child = data.column(v);

    // Configuration index with the lowest-index parent varying fastest.
    let q = pa
        .iter()
        .try_fold(1usize, |acc, &p| acc.checked_mul(data.arity(p)));
    let dense_limit = DENSE_CELLS.min(16 * data.n_rows() + 1024);
    match q {
        Some(q) if q.saturating_mul(r) <= dense_limit => {
            let mut counts = vec![0u32; q * r];
            let mut config = vec![0usize; data.n_rows()];
            let mut stride = 1;
            for &p in &pa {
                for (c, &x) in config.iter_mut().zip(data.column(p)) {
                    *c += x as usize * stride;
                }
                stride *= data.arity(p);
            }
            for (c, &x) in config.iter().zip(child) {
                counts[c * r + x as usize] += 1;
            }
            counts
                .chunks_exact(r)
                .map(|row| config_term(row, alpha_j, alpha_jk))
                .sum()
        }
        _ => {
            let mut table: HashMap<Vec<u8>, Vec<u32>> = HashMap::new();
            for i in 0..data.n_rows() {
                let key: Vec<u8> = pa.iter().map(|&p| data.column(p)[i]).collect();
                table.entry(key).or_insert_with(|| vec![0; r])[child[i] as usize] += 1;
            }
            let mut keys: Vec<_> = table.keys().cloned().collect();
            keys.sort_unstable();
            keys.iter()
                .map(|k| config_term(&table[k], alpha_j, alpha_jk))
                .sum()
        }
    }
}
