mod common;

use std::fs;

use chordlearn_core::eval::read_results;
use chordlearn_core::graph::chordal;
use chordlearn_core::harness::{
    cmd_eval, cmd_experiment, cmd_generate, cmd_learn, read_structure, structure_file_dimension,
    EvalArgs, ExperimentConfig, Learner, RunDir, TargetKind,
};
use chordlearn_core::synth::DiscreteBayesNet;

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(text).unwrap()
}

#[test]
fn generate_writes_one_file_per_sample_size_plus_a_test_set() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        r#"{"target_kind": "chordal", "n_vars": 8, "seed": 1, "replicates": 1, "n_obs": [100, 1000, 10000]}"#,
    );
    cmd_generate(&cfg, dir.path()).unwrap();
    let mut data: Vec<String> = fs::read_dir(dir.path().join("data"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    data.sort();
    assert_eq!(
        data,
        [
            "n8_r0_N100.csv",
            "n8_r0_N1000.csv",
            "n8_r0_N10000.csv",
            "n8_r0_test.csv"
        ]
    );
    let test = fs::read_to_string(dir.path().join("data/n8_r0_test.csv")).unwrap();
    assert_eq!(test.lines().count(), 10_001);
    let target = read_structure(&dir.path().join("targets/n8_r0.graph")).unwrap();
    assert_eq!(target.n(), 8);
    for name in ["config.json", "targets", "data", "learned", "reports"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn dag_targets_honour_the_parent_bound() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        r#"{"target_kind": "dag", "n_vars": 12, "max_parents": 5, "replicates": 6, "n_obs": [10], "test_size": 10}"#,
    );
    assert_eq!(cfg.target_kind, TargetKind::Dag);
    cmd_generate(&cfg, dir.path()).unwrap();
    let run = RunDir::new(dir.path());
    for rep in 0..6 {
        let net = DiscreteBayesNet::read_json(&run.target_net(12, rep)).unwrap();
        assert!((0..12).all(|v| net.dag().parents(v).len() <= 5));
    }
}

#[test]
fn learn_and_eval_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg =
        config(r#"{"n_vars": 6, "seed": 2, "replicates": 1, "n_obs": [2000], "test_size": 3000}"#);
    cmd_generate(&cfg, dir.path()).unwrap();
    let run = RunDir::new(dir.path());
    let train = run.train_data(6, 0, 2000);
    let out = dir.path().join("mine");

    let learned = cmd_learn(&train, None, Learner::Chordal, 1.0, &out).unwrap();
    let structure = read_structure(&learned).unwrap();
    assert!(chordal(&structure.skeleton()));
    let trace = fs::read_to_string(learned.with_extension("trace.jsonl")).unwrap();
    for line in trace.lines() {
        let rec: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(rec["delta"].as_f64().unwrap() > 0.0);
        assert!(rec["move"].is_string() && rec["step"].is_u64() && rec["total"].is_f64());
    }
    let again = cmd_learn(
        &train,
        None,
        Learner::Chordal,
        1.0,
        &dir.path().join("again"),
    )
    .unwrap();
    assert_eq!(fs::read(&learned).unwrap(), fs::read(&again).unwrap());

    let csv = dir.path().join("eval.csv");
    let eval = |structure: &std::path::Path| {
        cmd_eval(&EvalArgs {
            structure,
            net: &run.target_net(6, 0),
            train: &train,
            test: &run.test_data(6, 0),
            ess: 1.0,
            seed: 2,
            out: &csv,
        })
        .unwrap()
    };
    let own = eval(&run.target_structure(6, 0, TargetKind::Chordal));
    assert_eq!((own.fp_lines, own.fn_lines), (Some(0), Some(0)));
    assert_eq!(own.dim_learned, own.dim_target);
    let row = eval(&learned);
    assert!(row.kl.is_finite() && row.kl >= -3.0 * row.kl_se);
    assert_eq!(
        row.dim_learned,
        structure_file_dimension(&learned, &run.target_net(6, 0)).unwrap()
    );
    let dag = cmd_learn(&train, None, Learner::Dag, 1.0, &out).unwrap();
    let dag_row = eval(&dag);
    assert_eq!(dag_row.learner, "dag");
    assert_eq!((dag_row.fp_lines, dag_row.fn_lines), (None, None));
    assert_eq!(read_results(&csv).unwrap().len(), 3);
}

#[test]
fn experiment_row_count_and_idempotent_resume() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        r#"{"n_vars": [4, 5], "replicates": 2, "n_obs": [50, 150], "test_size": 400, "seed": 8}"#,
    );
    let first = cmd_experiment(&cfg, dir.path()).unwrap();
    // grid 2 sizes x 2 replicates x 2 sample sizes, two learners plus one baseline row each
    assert_eq!(first.rows_written, 8 * 3);
    let results = RunDir::new(dir.path()).results();
    let full = fs::read(&results).unwrap();

    // simulate an interruption by dropping the last five rows, then resume
    let text = String::from_utf8(full.clone()).unwrap();
    let kept: Vec<&str> = text.lines().collect();
    fs::write(&results, kept[..kept.len() - 5].join("\n") + "\n").unwrap();
    let resumed = cmd_experiment(&cfg, dir.path()).unwrap();
    assert_eq!(resumed.rows_written, 5);
    assert_eq!(fs::read(&results).unwrap(), full);
}

#[test]
fn config_errors_report_field_paths() {
    let err = ExperimentConfig::from_json(r#"{"replicates": 0}"#).unwrap_err();
    assert!(err.to_string().contains("replicates"), "{err}");
    let err = ExperimentConfig::from_json(r#"{"learners": ["chordal", "tree"]}"#).unwrap_err();
    assert!(err.to_string().contains("learners[1]"), "{err}");
}

#[test]
fn resume_does_not_duplicate_exact_kl_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(r#"{"n_vars": 4, "replicates": 1, "n_obs": [50, 150], "test_size": 400}"#);
    cmd_experiment(&cfg, dir.path()).unwrap();
    let run = RunDir::new(dir.path());
    let exact = fs::read(run.exact_kl()).unwrap();
    let text = fs::read_to_string(run.results()).unwrap();
    let kept: Vec<&str> = text.lines().collect();
    fs::write(run.results(), kept[..kept.len() - 2].join("\n") + "\n").unwrap();
    cmd_experiment(&cfg, dir.path()).unwrap();
    assert_eq!(fs::read(run.exact_kl()).unwrap(), exact);
}
