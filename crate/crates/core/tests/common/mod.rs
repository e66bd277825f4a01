//! Independent reference implementations used to check the library.
//!
//! Graphs are adjacency bit rows; nothing here calls the library's graph
//! algorithms, scorers or independence oracles.

#![allow(dead_code)]

use std::collections::HashMap;

use chordlearn_core::data::Dataset;
use chordlearn_core::graph::{ChordalGraph, UndirectedGraph};
use rand::Rng;

pub type Adj = Vec<u64>;

pub fn adj_of(g: &UndirectedGraph) -> Adj {
    let mut adj = vec![0u64; g.n()];
    for a in 0..g.n() {
        for b in 0..g.n() {
            if a != b && g.has_line(a, b) {
                adj[a] |= 1 << b;
            }
        }
    }
    adj
}

pub fn adj_from_lines(n: usize, lines: &[(usize, usize)]) -> Adj {
    let mut adj = vec![0u64; n];
    for &(a, b) in lines {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    adj
}

pub fn lines_of(adj: &Adj) -> Vec<(usize, usize)> {
    let n = adj.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if adj[a] >> b & 1 == 1 {
                out.push((a, b));
            }
        }
    }
    out
}

/// All graphs on `n` vertices, indexed by a bit per pair in lexicographic order.
pub fn adj_from_mask(n: usize, mask: u64) -> Adj {
    let mut adj = vec![0u64; n];
    let mut k = 0;
    for a in 0..n {
        for b in a + 1..n {
            if mask >> k & 1 == 1 {
                adj[a] |= 1 << b;
                adj[b] |= 1 << a;
            }
            k += 1;
        }
    }
    adj
}

fn is_clique(adj: &Adj, set: u64) -> bool {
    (0..adj.len())
        .filter(|&v| set >> v & 1 == 1)
        .all(|v| set & !(1 << v) & !adj[v] == 0)
}

/// Repeatedly deletes a simplicial vertex; the graph is chordal iff this empties it.
/// Returns the elimination order (each vertex's later neighbours form a clique).
pub fn elimination_order(adj: &Adj) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut alive: u64 = if n == 64 { !0 } else { (1 << n) - 1 };
    let mut order = Vec::with_capacity(n);
    while alive != 0 {
        let v = (0..n).find(|&v| alive >> v & 1 == 1 && is_clique(adj, adj[v] & alive))?;
        order.push(v);
        alive &= !(1 << v);
    }
    Some(order)
}

pub fn is_chordal(adj: &Adj) -> bool {
    elimination_order(adj).is_some()
}

/// Whether every vertex's earlier neighbours form a clique.
pub fn earlier_neighbours_complete(adj: &Adj, order: &[usize]) -> bool {
    let mut before = 0u64;
    for &v in order {
        if !is_clique(adj, adj[v] & before) {
            return false;
        }
        before |= 1 << v;
    }
    order.len() == adj.len() && before.count_ones() as usize == adj.len()
}

/// Maximum cardinality search with uniformly random tie-breaking.
pub fn random_mcs<R: Rng>(adj: &Adj, rng: &mut R) -> Vec<usize> {
    let n = adj.len();
    let mut visited = 0u64;
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let weight = |v: usize| (adj[v] & visited).count_ones();
        let best = (0..n)
            .filter(|&v| visited >> v & 1 == 0)
            .map(weight)
            .max()
            .unwrap();
        let ties: Vec<usize> = (0..n)
            .filter(|&v| visited >> v & 1 == 0 && weight(v) == best)
            .collect();
        let v = ties[rng.random_range(0..ties.len())];
        order.push(v);
        visited |= 1 << v;
    }
    order
}

/// Whether `a` and `b` are separated by `c` (all bit sets) in the undirected graph.
pub fn separated(adj: &Adj, a: u64, b: u64, c: u64) -> bool {
    let mut seen = a & !c;
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0u64;
        for v in 0..adj.len() {
            if frontier >> v & 1 == 1 {
                next |= adj[v];
            }
        }
        next &= !seen & !c;
        seen |= next;
        frontier = next;
    }
    seen & b == 0
}

/// Log marginal likelihood of the columns in `set` treated as one joint
/// variable under a symmetric Dirichlet prior of total mass `ess`.
pub fn joint_marginal(data: &Dataset, set: u64, ess: f64) -> f64 {
    let vars: Vec<usize> = (0..data.n_vars()).filter(|&v| set >> v & 1 == 1).collect();
    let states: f64 = vars.iter().map(|&v| data.arity(v) as f64).product();
    let mut counts: HashMap<Vec<u8>, usize> = HashMap::new();
    for i in 0..data.n_rows() {
        let key: Vec<u8> = vars.iter().map(|&v| data.column(v)[i]).collect();
        *counts.entry(key).or_default() += 1;
    }
    let cell = ess / states;
    let n = data.n_rows() as f64;
    let mut s = libm::lgamma(ess) - libm::lgamma(ess + n);
    for &c in counts.values() {
        s += libm::lgamma(cell + c as f64) - libm::lgamma(cell);
    }
    s
}

/// BDeu score of a chordal graph as a sum over an elimination order of
/// `ML(v ∪ later) − ML(later)`, the clique-separator decomposition.
pub fn reference_score(adj: &Adj, data: &Dataset, ess: f64) -> f64 {
    let order = elimination_order(adj).expect("reference score needs a chordal graph");
    let mut later: u64 = order.iter().fold(0, |acc, &v| acc | 1 << v);
    let mut total = 0.0;
    for &v in &order {
        later &= !(1 << v);
        let sep = adj[v] & later;
        total += joint_marginal(data, sep | 1 << v, ess) - joint_marginal(data, sep, ess);
    }
    total
}

/// Free parameters of a chordal graph with the given arities.
pub fn reference_dimension(adj: &Adj, arities: &[usize]) -> u64 {
    let order = elimination_order(adj).unwrap();
    let mut later: u64 = order.iter().fold(0, |acc, &v| acc | 1 << v);
    let mut dim = 0u64;
    for &v in &order {
        later &= !(1 << v);
        let q: u64 = (0..adj.len())
            .filter(|&u| (adj[v] & later) >> u & 1 == 1)
            .map(|u| arities[u] as u64)
            .product();
        dim += (arities[v] as u64 - 1) * q;
    }
    dim
}

/// All chordal graphs on `n` vertices by brute force.
pub fn chordal_graphs(n: usize) -> Vec<Adj> {
    let pairs = n * n.saturating_sub(1) / 2;
    (0..1u64 << pairs)
        .map(|m| adj_from_mask(n, m))
        .filter(is_chordal)
        .collect()
}

pub fn chordal(adj: &Adj) -> ChordalGraph {
    ChordalGraph::new(UndirectedGraph::from_lines(adj.len(), lines_of(adj)).unwrap()).unwrap()
}

/// Single-line additions and removals of `adj` that leave it chordal.
pub fn chordal_neighbours(adj: &Adj) -> Vec<Adj> {
    let n = adj.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let mut h = adj.clone();
            h[a] ^= 1 << b;
            h[b] ^= 1 << a;
            if is_chordal(&h) {
                out.push(h);
            }
        }
    }
    out
}

pub fn is_subgraph(small: &Adj, big: &Adj) -> bool {
    small.iter().zip(big).all(|(s, b)| s & !b == 0)
}

/// Joint probability of a full assignment from raw conditional tables, parent
/// configurations counted with the lowest-index parent varying fastest.
pub fn joint_prob(net: &chordlearn_core::synth::DiscreteBayesNet, x: &[u8]) -> f64 {
    let ar = net.arities();
    let mut p = 1.0;
    for v in 0..net.n() {
        let mut cfg = 0usize;
        let mut radix = 1usize;
        for u in 0..net.n() {
            if net.dag().has_edge(u, v) {
                cfg += x[u] as usize * radix;
                radix *= ar[u];
            }
        }
        p *= net.table(v)[cfg * ar[v] + x[v] as usize];
    }
    p
}

/// `KL(g ‖ p)` by enumerating every joint state.
pub fn reference_kl(
    g: &chordlearn_core::synth::DiscreteBayesNet,
    p: &chordlearn_core::synth::DiscreteBayesNet,
) -> f64 {
    let ar = g.arities();
    let total: usize = ar.iter().product();
    let mut kl = 0.0;
    let mut x = vec![0u8; ar.len()];
    for mut code in 0..total {
        for (v, xv) in x.iter_mut().enumerate() {
            *xv = (code % ar[v]) as u8;
            code /= ar[v];
        }
        let pg = joint_prob(g, &x);
        if pg > 0.0 {
            kl += pg * (pg / joint_prob(p, &x)).ln();
        }
    }
    kl
}

/// Byte-level comparison of two directory trees; returns the first difference.
pub fn diff_trees(a: &std::path::Path, b: &std::path::Path) -> Option<String> {
    fn walk(root: &std::path::Path, dir: &std::path::Path, out: &mut Vec<std::path::PathBuf>) {
        let mut entries: Vec<_> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        entries.sort();
        for p in entries {
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    let (mut fa, mut fb) = (Vec::new(), Vec::new());
    walk(a, a, &mut fa);
    walk(b, b, &mut fb);
    if fa != fb {
        return Some(format!(
            "file lists differ: {} vs {} files",
            fa.len(),
            fb.len()
        ));
    }
    for f in &fa {
        if std::fs::read(a.join(f)).unwrap() != std::fs::read(b.join(f)).unwrap() {
            return Some(format!("{} differs", f.display()));
        }
    }
    None
}
