//! Reproducible experiment runs: configuration, run-directory layout, and the
//! generate, learn, eval, verify and experiment commands.
//!
//! A run directory holds `config.json`, `targets/`, `data/`, `learned/`,
//! `results.csv` and `reports/`. Every file in it is a pure function of the
//! configuration; rows are appended in grid order whatever the scheduling.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::eval::KL_EXACT_MAX_STATES;
use crate::eval::{
    append_results, fit_parameters, kl_estimate, kl_exact, line_diff, read_results, ResultRow,
    Structure,
};
use crate::graph::text::{format_dag, format_undirected, parse_dag, parse_undirected};
use crate::graph::{ChordalGraph, MAX_VERTICES};
use crate::scoring::{dag_dimension, dimension};
use crate::search::{greedy_chordal, greedy_dag, BdeuScorer, SearchPolicy};
use crate::synth::{
    ancestral_sample, random_chordal_target, random_dag, random_parameters, rng_for,
    DiscreteBayesNet,
};
use crate::verify::{run_suite, SuiteReport, VerifyLevel};

const STREAM_TARGET: u64 = 1;
const STREAM_TEST: u64 = 2;
const STREAM_TRAIN: u64 = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    /// Decomposable targets from a triangulated random DAG.
    #[default]
    Chordal,
    /// Random DAGs with bounded parent count.
    Dag,
}

impl TargetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TargetKind::Chordal => "chordal",
            TargetKind::Dag => "dag",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Learner {
    Chordal,
    Dag,
}

impl Learner {
    pub fn as_str(self) -> &'static str {
        match self {
            Learner::Chordal => "chordal",
            Learner::Dag => "dag",
        }
    }
}

/// Label of the baseline rows that refit the generating structure.
pub const TRUE_LEARNER: &str = "true";

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(usize),
    Many(Vec<usize>),
}

fn one_or_many<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<Vec<usize>, D::Error> {
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(v) => v,
    })
}

/// Experiment configuration; every field has a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub target_kind: TargetKind,
    /// One size or a list of sizes.
    #[serde(deserialize_with = "one_or_many")]
    pub n_vars: Vec<usize>,
    pub arity: usize,
    /// Parent bound for DAG targets; chordal targets always use three.
    pub max_parents: usize,
    pub n_obs: Vec<usize>,
    pub test_size: usize,
    pub ess: f64,
    pub replicates: usize,
    pub seed: u64,
    /// Pull parameters away from zero so every probability is at least 0.05.
    pub clamp: bool,
    pub learners: Vec<Learner>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            target_kind: TargetKind::Chordal,
            n_vars: vec![8],
            arity: 2,
            max_parents: 5,
            n_obs: vec![100, 1_000, 10_000],
            test_size: 10_000,
            ess: 1.0,
            replicates: 5,
            seed: 0,
            clamp: false,
            learners: vec![Learner::Chordal, Learner::Dag],
        }
    }
}

fn config_error(path: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        msg: msg.into(),
    }
}

impl ExperimentConfig {
    /// Parses and validates a JSON document; errors name the offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_vars.is_empty() {
            return Err(config_error("n_vars", "at least one size is required"));
        }
        for (i, &n) in self.n_vars.iter().enumerate() {
            if n == 0 || n > MAX_VERTICES {
                return Err(config_error(
                    format!("n_vars[{i}]"),
                    format!("must be in 1..={MAX_VERTICES}, got {n}"),
                ));
            }
            if self.target_kind == TargetKind::Dag && self.max_parents >= n {
                return Err(config_error(
                    "max_parents",
                    format!("must be below every size, but n_vars[{i}] = {n}"),
                ));
            }
        }
        if !(2..=crate::data::MAX_ARITY).contains(&self.arity) {
            return Err(config_error(
                "arity",
                format!(
                    "must be in 2..={}, got {}",
                    crate::data::MAX_ARITY,
                    self.arity
                ),
            ));
        }
        if self.n_obs.is_empty() {
            return Err(config_error(
                "n_obs",
                "at least one sample size is required",
            ));
        }
        let mut seen = HashSet::new();
        for (i, &m) in self.n_obs.iter().enumerate() {
            if !seen.insert(m) {
                return Err(config_error(
                    format!("n_obs[{i}]"),
                    format!("duplicate sample size {m}"),
                ));
            }
        }
        if self.test_size == 0 {
            return Err(config_error("test_size", "must be positive"));
        }
        if !(self.ess.is_finite() && self.ess > 0.0) {
            return Err(config_error(
                "ess",
                format!("must be a positive number, got {}", self.ess),
            ));
        }
        if self.replicates == 0 {
            return Err(config_error("replicates", "must be positive"));
        }
        let mut seen = HashSet::new();
        for (i, l) in self.learners.iter().enumerate() {
            if !seen.insert(*l) {
                return Err(config_error(
                    format!("learners[{i}]"),
                    format!("duplicate learner {}", l.as_str()),
                ));
            }
        }
        Ok(())
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix(seed), |h, &p| splitmix(h ^ splitmix(p)))
}

/// Seed of the target for one `(n_vars, replicate)` cell.
pub fn target_seed(seed: u64, n_vars: usize, replicate: usize) -> u64 {
    derive_seed(seed, &[n_vars as u64, replicate as u64])
}

/// Seed of one training set; reported in the `seed` column.
pub fn dataset_seed(seed: u64, n_vars: usize, replicate: usize, n_obs: usize) -> u64 {
    derive_seed(target_seed(seed, n_vars, replicate), &[n_obs as u64])
}

/// Paths inside a run directory.
#[derive(Clone, Debug)]
pub struct RunDir {
    root: PathBuf,
}

impl RunDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        RunDir { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn create(&self) -> Result<()> {
        for sub in ["targets", "data", "learned", "reports"] {
            fs::create_dir_all(self.root.join(sub))?;
        }
        Ok(())
    }

    pub fn config(&self) -> PathBuf {
        self.root.join("config.json")
    }

    pub fn results(&self) -> PathBuf {
        self.root.join("results.csv")
    }

    pub fn reports(&self) -> PathBuf {
        self.root.join("reports")
    }

    pub fn exact_kl(&self) -> PathBuf {
        self.reports().join("kl_exact.csv")
    }

    pub fn summary(&self) -> PathBuf {
        self.reports().join("summary.json")
    }

    fn cell(n: usize, rep: usize) -> String {
        format!("n{n}_r{rep}")
    }

    pub fn target_net(&self, n: usize, rep: usize) -> PathBuf {
        self.root
            .join("targets")
            .join(format!("{}.json", Self::cell(n, rep)))
    }

    pub fn target_structure(&self, n: usize, rep: usize, kind: TargetKind) -> PathBuf {
        let ext = match kind {
            TargetKind::Chordal => "graph",
            TargetKind::Dag => "dag",
        };
        self.root
            .join("targets")
            .join(format!("{}.{ext}", Self::cell(n, rep)))
    }

    pub fn test_data(&self, n: usize, rep: usize) -> PathBuf {
        self.root
            .join("data")
            .join(format!("{}_test.csv", Self::cell(n, rep)))
    }

    pub fn train_data(&self, n: usize, rep: usize, n_obs: usize) -> PathBuf {
        self.root
            .join("data")
            .join(format!("{}_N{n_obs}.csv", Self::cell(n, rep)))
    }

    pub fn learned(&self, n: usize, rep: usize, n_obs: usize, learner: Learner) -> PathBuf {
        let ext = match learner {
            Learner::Chordal => "graph",
            Learner::Dag => "dag",
        };
        self.root.join("learned").join(format!(
            "{}_N{n_obs}_{}.{ext}",
            Self::cell(n, rep),
            learner.as_str()
        ))
    }

    pub fn trace(&self, n: usize, rep: usize, n_obs: usize, learner: Learner) -> PathBuf {
        self.learned(n, rep, n_obs, learner)
            .with_extension("trace.jsonl")
    }
}

/// Text form of a structure: an undirected edge list for chordal graphs and
/// an arrow list for DAGs.
pub fn structure_text(s: &Structure) -> String {
    match s {
        Structure::Chordal(g) => format_undirected(g.graph()),
        Structure::Dag(d) => format_dag(d),
    }
}

/// Reads a structure file; `.dag` files hold DAGs, anything else a chordal graph.
pub fn read_structure(path: &Path) -> Result<Structure> {
    let text = fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "dag") {
        Ok(Structure::Dag(parse_dag(&text)?))
    } else {
        Ok(Structure::Chordal(ChordalGraph::new(parse_undirected(
            &text,
        )?)?))
    }
}

pub fn write_structure(path: &Path, s: &Structure) -> Result<()> {
    Ok(fs::write(path, structure_text(s))?)
}

/// A generated target with its held-out test set.
#[derive(Clone, Debug)]
pub struct Target {
    pub n_vars: usize,
    pub replicate: usize,
    pub kind: TargetKind,
    pub structure: Structure,
    pub net: DiscreteBayesNet,
    pub test: Dataset,
}

impl Target {
    pub fn dimension(&self) -> u64 {
        structure_dimension(&self.structure, self.net.arities())
    }
}

pub fn structure_dimension(s: &Structure, arities: &[usize]) -> u64 {
    match s {
        Structure::Chordal(g) => dimension(g, arities),
        Structure::Dag(d) => dag_dimension(d, arities),
    }
}

/// Draws the target and test set of one grid cell.
pub fn make_target(cfg: &ExperimentConfig, n: usize, rep: usize) -> Result<Target> {
    let seed = target_seed(cfg.seed, n, rep);
    let mut rng = rng_for(seed, STREAM_TARGET);
    let arities = vec![cfg.arity; n];
    let (structure, net) = match cfg.target_kind {
        TargetKind::Chordal => {
            let (g, net) = random_chordal_target(n, &arities, cfg.clamp, &mut rng)?;
            (Structure::Chordal(g), net)
        }
        TargetKind::Dag => {
            let dag = random_dag(n, cfg.max_parents, &mut rng)?;
            let net = random_parameters(&dag, &arities, cfg.clamp, &mut rng)?;
            (Structure::Dag(dag), net)
        }
    };
    let test = ancestral_sample(&net, cfg.test_size, &mut rng_for(seed, STREAM_TEST))?;
    Ok(Target {
        n_vars: n,
        replicate: rep,
        kind: cfg.target_kind,
        structure,
        net,
        test,
    })
}

pub fn make_train(cfg: &ExperimentConfig, target: &Target, n_obs: usize) -> Result<Dataset> {
    let seed = dataset_seed(cfg.seed, target.n_vars, target.replicate, n_obs);
    ancestral_sample(&target.net, n_obs, &mut rng_for(seed, STREAM_TRAIN))
}

fn write_target(run: &RunDir, t: &Target) -> Result<()> {
    t.net.write_json(&run.target_net(t.n_vars, t.replicate))?;
    write_structure(
        &run.target_structure(t.n_vars, t.replicate, t.kind),
        &t.structure,
    )?;
    t.test.write_csv_path(&run.test_data(t.n_vars, t.replicate))
}

/// Writes `config.json`, refusing a directory that already holds a different one.
fn claim_run_dir(run: &RunDir, cfg: &ExperimentConfig) -> Result<()> {
    run.create()?;
    let text = cfg.to_json();
    match fs::read_to_string(run.config()) {
        Ok(existing) if existing != text => Err(config_error(
            ".",
            format!(
                "{} holds a run with a different configuration",
                run.root().display()
            ),
        )),
        Ok(_) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(fs::write(run.config(), text)?),
        Err(e) => Err(e.into()),
    }
}

fn cells(cfg: &ExperimentConfig) -> Vec<(usize, usize)> {
    cfg.n_vars
        .iter()
        .flat_map(|&n| (0..cfg.replicates).map(move |r| (n, r)))
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GenerateSummary {
    pub targets: usize,
    pub train_sets: usize,
}

/// Writes every target, test set and training set of the grid.
pub fn cmd_generate(cfg: &ExperimentConfig, out: &Path) -> Result<GenerateSummary> {
    cfg.validate()?;
    let run = RunDir::new(out);
    claim_run_dir(&run, cfg)?;
    let cells = cells(cfg);
    cells.par_iter().try_for_each(|&(n, rep)| -> Result<()> {
        let t = make_target(cfg, n, rep)?;
        write_target(&run, &t)?;
        for &m in &cfg.n_obs {
            make_train(cfg, &t, m)?.write_csv_path(&run.train_data(n, rep, m))?;
        }
        Ok(())
    })?;
    Ok(GenerateSummary {
        targets: cells.len(),
        train_sets: cells.len() * cfg.n_obs.len(),
    })
}

/// A learned structure with its JSON-lines search trace.
#[derive(Clone, Debug)]
pub struct Learned {
    pub structure: Structure,
    pub trace: String,
    pub score: f64,
}

/// Greedy learning from the empty structure under BDeu.
pub fn learn(data: &Dataset, learner: Learner, ess: f64) -> Result<Learned> {
    let scorer = BdeuScorer::new(data, ess)?;
    Ok(match learner {
        Learner::Chordal => {
            let (g, trace) = greedy_chordal(
                &scorer,
                ChordalGraph::empty(data.n_vars()),
                SearchPolicy::default(),
            )?;
            Learned {
                structure: Structure::Chordal(g),
                trace: trace.to_json_lines(),
                score: trace.final_total(),
            }
        }
        Learner::Dag => {
            let (d, trace) = greedy_dag(&scorer);
            Learned {
                structure: Structure::Dag(d),
                trace: trace.to_json_lines(),
                score: trace.final_total(),
            }
        }
    })
}

/// Learns from a CSV file and writes `<stem>_<learner>.{graph,dag}` plus a
/// `.trace.jsonl` file into `out`; returns the structure path.
pub fn cmd_learn(
    data_path: &Path,
    arities: Option<&[usize]>,
    learner: Learner,
    ess: f64,
    out: &Path,
) -> Result<PathBuf> {
    let data = Dataset::read_csv_path(data_path, arities)?;
    let learned = learn(&data, learner, ess)?;
    fs::create_dir_all(out)?;
    let stem = data_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("data");
    let ext = match learner {
        Learner::Chordal => "graph",
        Learner::Dag => "dag",
    };
    let path = out.join(format!("{stem}_{}.{ext}", learner.as_str()));
    write_structure(&path, &learned.structure)?;
    fs::write(path.with_extension("trace.jsonl"), learned.trace)?;
    Ok(path)
}

/// KL measurements and line differences of one fitted structure.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub row: ResultRow,
    pub kl_exact: Option<f64>,
}

pub struct EvalInput<'a> {
    pub target_kind: &'a str,
    /// Skeleton of a decomposable target, for line differences.
    pub target_graph: Option<&'a crate::graph::UndirectedGraph>,
    pub target_net: &'a DiscreteBayesNet,
    pub target_dim: u64,
    pub train: &'a Dataset,
    pub test: &'a Dataset,
    pub replicate: usize,
    pub seed: u64,
    pub ess: f64,
    pub exact: bool,
}

/// Fits `structure` to the training data and measures it against the target.
pub fn evaluate(structure: &Structure, learner: &str, inp: &EvalInput<'_>) -> Result<Evaluation> {
    let fitted = fit_parameters(structure, inp.train, inp.ess)?;
    let est = kl_estimate(inp.target_net, &fitted, inp.test)?;
    let (fp, fnl) = match (inp.target_graph, structure) {
        (Some(t), Structure::Chordal(g)) => {
            let (fp, fnl) = line_diff(g.graph(), t)?;
            (Some(fp), Some(fnl))
        }
        _ => (None, None),
    };
    let kl_exact = if inp.exact {
        Some(kl_exact(inp.target_net, &fitted)?)
    } else {
        None
    };
    Ok(Evaluation {
        row: ResultRow {
            target_kind: inp.target_kind.to_string(),
            n_vars: structure.n(),
            n_obs: inp.train.n_rows(),
            replicate: inp.replicate,
            learner: learner.to_string(),
            kl: est.kl,
            kl_se: est.se,
            dim_learned: structure_dimension(structure, inp.target_net.arities()),
            dim_target: inp.target_dim,
            fp_lines: fp,
            fn_lines: fnl,
            seed: inp.seed,
        },
        kl_exact,
    })
}

fn exact_feasible(arities: &[usize]) -> bool {
    arities
        .iter()
        .try_fold(1usize, |acc, &r| acc.checked_mul(r))
        .is_some_and(|s| s <= KL_EXACT_MAX_STATES)
}

/// Evaluates one structure file against a target net and appends the row to `out`.
///
/// A target whose DAG has no v-structures is treated as decomposable: its
/// skeleton is the target graph for line differences and its dimension is
/// computed as a chordal graph.
pub struct EvalArgs<'a> {
    pub structure: &'a Path,
    pub net: &'a Path,
    pub train: &'a Path,
    pub test: &'a Path,
    pub ess: f64,
    pub seed: u64,
    pub out: &'a Path,
}

pub fn cmd_eval(args: &EvalArgs<'_>) -> Result<ResultRow> {
    let net = DiscreteBayesNet::read_json(args.net)?;
    let arities = net.arities().to_vec();
    let structure = read_structure(args.structure)?;
    let train = Dataset::read_csv_path(args.train, Some(&arities))?;
    let test = Dataset::read_csv_path(args.test, Some(&arities))?;
    if structure.n() != net.n() {
        return Err(Error::VertexMismatch {
            left: structure.n(),
            right: net.n(),
        });
    }
    let decomposable = net.dag().v_structure_count() == 0;
    let skeleton = net.dag().skeleton();
    let target_dim = if decomposable {
        dimension(&ChordalGraph::new(skeleton.clone())?, &arities)
    } else {
        dag_dimension(net.dag(), &arities)
    };
    let learner = match structure {
        Structure::Chordal(_) => "chordal",
        Structure::Dag(_) => "dag",
    };
    let inp = EvalInput {
        target_kind: if decomposable { "chordal" } else { "dag" },
        target_graph: decomposable.then_some(&skeleton),
        target_net: &net,
        target_dim,
        train: &train,
        test: &test,
        replicate: 0,
        seed: args.seed,
        ess: args.ess,
        exact: false,
    };
    let ev = evaluate(&structure, learner, &inp)?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    append_results(args.out, std::slice::from_ref(&ev.row))?;
    Ok(ev.row)
}

/// Runs the verification suite and writes `reports/verify_<level>.json` under `out`.
pub fn cmd_verify(level: VerifyLevel, inject_fault: bool, out: &Path) -> Result<SuiteReport> {
    let report = run_suite(level, inject_fault)?;
    let dir = out.join("reports");
    fs::create_dir_all(&dir)?;
    let name = match level {
        VerifyLevel::Fast => "verify_fast.json",
        VerifyLevel::Full => "verify_full.json",
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    fs::write(dir.join(name), text)?;
    Ok(report)
}

/// Exact KL of one fitted model, kept beside the results table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactKlRow {
    pub n_vars: usize,
    pub n_obs: usize,
    pub replicate: usize,
    pub learner: String,
    pub seed: u64,
    pub kl_exact: f64,
}

type RowKey = (usize, usize, usize, String, u64);

fn row_key(r: &ResultRow) -> RowKey {
    (r.n_vars, r.n_obs, r.replicate, r.learner.clone(), r.seed)
}

fn append_exact(path: &Path, rows: &[ExactKlRow]) -> Result<()> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(fresh)
        .from_writer(file);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_exact(path: &Path) -> Result<Vec<ExactKlRow>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut rdr = csv::Reader::from_path(path)?;
    Ok(rdr.deserialize().collect::<std::result::Result<_, _>>()?)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExperimentSummary {
    pub datasets: usize,
    pub rows_written: usize,
    pub rows_skipped: usize,
    pub failed_datasets: usize,
}

struct DatasetTask {
    cell: usize,
    n_obs: usize,
    seed: u64,
    missing: Vec<String>,
}

fn run_dataset(
    cfg: &ExperimentConfig,
    run: &RunDir,
    target: &Target,
    task: &DatasetTask,
) -> Result<Vec<Evaluation>> {
    let (n, rep) = (target.n_vars, target.replicate);
    let train = make_train(cfg, target, task.n_obs)?;
    train.write_csv_path(&run.train_data(n, rep, task.n_obs))?;
    let target_graph = match &target.structure {
        Structure::Chordal(g) => Some(g.graph()),
        Structure::Dag(_) => None,
    };
    let inp = EvalInput {
        target_kind: target.kind.as_str(),
        target_graph,
        target_net: &target.net,
        target_dim: target.dimension(),
        train: &train,
        test: &target.test,
        replicate: rep,
        seed: task.seed,
        ess: cfg.ess,
        exact: exact_feasible(target.net.arities()),
    };
    let mut out = Vec::new();
    for &learner in &cfg.learners {
        if !task.missing.iter().any(|l| l == learner.as_str()) {
            continue;
        }
        let learned = learn(&train, learner, cfg.ess)?;
        write_structure(
            &run.learned(n, rep, task.n_obs, learner),
            &learned.structure,
        )?;
        fs::write(run.trace(n, rep, task.n_obs, learner), &learned.trace)?;
        out.push(evaluate(&learned.structure, learner.as_str(), &inp)?);
    }
    if task.missing.iter().any(|l| l == TRUE_LEARNER) {
        out.push(evaluate(&target.structure, TRUE_LEARNER, &inp)?);
    }
    Ok(out)
}

/// Runs generate, learn and eval over the whole grid, appending to
/// `results.csv`. Rows already present are not recomputed, so an interrupted
/// run can be resumed by rerunning the same command.
pub fn cmd_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<ExperimentSummary> {
    cfg.validate()?;
    let run = RunDir::new(out);
    claim_run_dir(&run, cfg)?;
    let done: HashSet<RowKey> = if run.results().exists() {
        read_results(&run.results())?.iter().map(row_key).collect()
    } else {
        HashSet::new()
    };
    let done_exact: HashSet<RowKey> = read_exact(&run.exact_kl())?
        .into_iter()
        .map(|e| (e.n_vars, e.n_obs, e.replicate, e.learner, e.seed))
        .collect();

    let cells = cells(cfg);
    let targets: Vec<Target> = cells
        .par_iter()
        .map(|&(n, rep)| {
            let t = make_target(cfg, n, rep)?;
            write_target(&run, &t)?;
            Ok(t)
        })
        .collect::<Result<_>>()?;

    let mut labels: Vec<String> = cfg
        .learners
        .iter()
        .map(|l| l.as_str().to_string())
        .collect();
    labels.push(TRUE_LEARNER.to_string());
    let mut summary = ExperimentSummary::default();
    let mut tasks = Vec::new();
    for (cell, &(n, rep)) in cells.iter().enumerate() {
        for &m in &cfg.n_obs {
            summary.datasets += 1;
            let seed = dataset_seed(cfg.seed, n, rep, m);
            let missing: Vec<String> = labels
                .iter()
                .filter(|l| !done.contains(&(n, m, rep, (*l).clone(), seed)))
                .cloned()
                .collect();
            summary.rows_skipped += labels.len() - missing.len();
            if !missing.is_empty() {
                tasks.push(DatasetTask {
                    cell,
                    n_obs: m,
                    seed,
                    missing,
                });
            }
        }
    }

    let chunk = rayon::current_num_threads().max(1) * 2;
    for batch in tasks.chunks(chunk) {
        let results: Vec<Result<Vec<Evaluation>>> = batch
            .par_iter()
            .map(|t| run_dataset(cfg, &run, &targets[t.cell], t))
            .collect();
        let mut rows = Vec::new();
        let mut exact = Vec::new();
        for (task, res) in batch.iter().zip(results) {
            match res {
                Ok(evals) => {
                    for ev in evals {
                        let key = row_key(&ev.row);
                        if let Some(k) = ev.kl_exact.filter(|_| !done_exact.contains(&key)) {
                            exact.push(ExactKlRow {
                                n_vars: ev.row.n_vars,
                                n_obs: ev.row.n_obs,
                                replicate: ev.row.replicate,
                                learner: ev.row.learner.clone(),
                                seed: ev.row.seed,
                                kl_exact: k,
                            });
                        }
                        rows.push(ev.row);
                    }
                }
                Err(e) => {
                    let t = &targets[task.cell];
                    let msg = format!(
                        "n_vars={} replicate={} n_obs={}: {e}",
                        t.n_vars, t.replicate, task.n_obs
                    );
                    eprintln!("skipping dataset {msg}");
                    let mut log = OpenOptions::new()
                        .create(true)
                        .append(true)
                        .open(run.reports().join("failures.log"))?;
                    writeln!(log, "{msg}")?;
                    summary.failed_datasets += 1;
                }
            }
        }
        append_exact(&run.exact_kl(), &exact)?;
        append_results(&run.results(), &rows)?;
        summary.rows_written += rows.len();
    }
    write_summary(&run)?;
    Ok(summary)
}

/// Medians of one `(n_vars, n_obs, learner)` group.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryGroup {
    pub n_vars: usize,
    pub n_obs: usize,
    pub learner: String,
    pub count: usize,
    pub median_kl: f64,
    pub median_kl_exact: Option<f64>,
    pub median_dim_learned: f64,
    pub median_dim_target: f64,
    pub median_fp_lines: Option<f64>,
    pub median_fn_lines: Option<f64>,
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[m]
    } else {
        (values[m - 1] + values[m]) / 2.0
    })
}

/// Groups a run's results and exact-KL rows by `(n_vars, n_obs, learner)`.
pub fn summarize(run_dir: &Path) -> Result<Vec<SummaryGroup>> {
    let run = RunDir::new(run_dir);
    let rows = read_results(&run.results())?;
    let exact = read_exact(&run.exact_kl())?;
    let mut groups: BTreeMap<(usize, usize, String), (Vec<&ResultRow>, Vec<f64>)> = BTreeMap::new();
    for r in &rows {
        groups
            .entry((r.n_vars, r.n_obs, r.learner.clone()))
            .or_default()
            .0
            .push(r);
    }
    for e in &exact {
        if let Some(g) = groups.get_mut(&(e.n_vars, e.n_obs, e.learner.clone())) {
            g.1.push(e.kl_exact);
        }
    }
    Ok(groups
        .into_iter()
        .map(|((n_vars, n_obs, learner), (rs, mut ex))| {
            let col = |f: &dyn Fn(&ResultRow) -> Option<f64>| -> Option<f64> {
                let mut v: Vec<f64> = rs.iter().filter_map(|r| f(r)).collect();
                median(&mut v)
            };
            SummaryGroup {
                n_vars,
                n_obs,
                learner,
                count: rs.len(),
                median_kl: col(&|r| Some(r.kl)).unwrap_or(f64::NAN),
                median_kl_exact: median(&mut ex),
                median_dim_learned: col(&|r| Some(r.dim_learned as f64)).unwrap_or(f64::NAN),
                median_dim_target: col(&|r| Some(r.dim_target as f64)).unwrap_or(f64::NAN),
                median_fp_lines: col(&|r| r.fp_lines.map(|x| x as f64)),
                median_fn_lines: col(&|r| r.fn_lines.map(|x| x as f64)),
            }
        })
        .collect())
}

fn write_summary(run: &RunDir) -> Result<()> {
    let groups = summarize(run.root())?;
    let mut text = serde_json::to_string_pretty(&groups)?;
    text.push('\n');
    Ok(fs::write(run.summary(), text)?)
}

/// Reads a structure file together with the arities of a net, for callers
/// that need its dimension.
pub fn structure_file_dimension(structure: &Path, net: &Path) -> Result<u64> {
    let net = DiscreteBayesNet::read_json(net)?;
    Ok(structure_dimension(
        &read_structure(structure)?,
        net.arities(),
    ))
}
