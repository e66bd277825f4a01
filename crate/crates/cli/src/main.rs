use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use chordlearn_core::harness::{
    cmd_eval, cmd_experiment, cmd_generate, cmd_learn, cmd_verify, EvalArgs, ExperimentConfig,
    Learner,
};
use chordlearn_core::verify::VerifyLevel;
use chordlearn_core::Error;
use clap::{Parser, Subcommand, ValueEnum};

const EXIT_USAGE: u8 = 1;
const EXIT_VIOLATION: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "chordlearn",
    version,
    about = "Learn chordal graphical models and reproduce experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LearnerArg {
    Chordal,
    Dag,
}

impl From<LearnerArg> for Learner {
    fn from(l: LearnerArg) -> Self {
        match l {
            LearnerArg::Chordal => Learner::Chordal,
            LearnerArg::Dag => Learner::Dag,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Write targets, test sets and training sets for every grid cell.
    Generate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Learn a structure from a CSV dataset, starting from the empty structure.
    Learn {
        #[arg(long)]
        data: PathBuf,
        /// Comma-separated arities; inferred from the data when omitted.
        #[arg(long, value_delimiter = ',')]
        arities: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value = "chordal")]
        learner: LearnerArg,
        #[arg(long, default_value_t = 1.0)]
        ess: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a structure and append its measurements to <out>/results.csv.
    Eval {
        #[arg(long)]
        structure: PathBuf,
        /// Target network JSON.
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        ess: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the exhaustive verification suite.
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        level: LevelArg,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Use a deliberately broken neighbourhood enumerator; the suite must fail.
        #[arg(long)]
        inject_fault: bool,
    },
    /// Generate, learn and evaluate over the whole grid; resumable.
    Experiment {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        ess: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(
    path: Option<&PathBuf>,
    seed: Option<u64>,
    ess: Option<f64>,
) -> Result<ExperimentConfig, Error> {
    let mut cfg = match path {
        Some(p) => ExperimentConfig::read(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(e) = ess {
        cfg.ess = e;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Generate { config, seed, out } => {
            let cfg = load_config(config.as_ref(), seed, None)?;
            let s = cmd_generate(&cfg, &out)?;
            eprintln!(
                "wrote {} targets and {} training sets to {}",
                s.targets,
                s.train_sets,
                out.display()
            );
        }
        Command::Learn {
            data,
            arities,
            learner,
            ess,
            out,
        } => {
            let path = cmd_learn(&data, arities.as_deref(), learner.into(), ess, &out)?;
            println!("{}", path.display());
        }
        Command::Eval {
            structure,
            net,
            train,
            test,
            ess,
            seed,
            out,
        } => {
            let row = cmd_eval(&EvalArgs {
                structure: &structure,
                net: &net,
                train: &train,
                test: &test,
                ess,
                seed,
                out: &out.join("results.csv"),
            })?;
            println!(
                "kl={:.6} kl_se={:.6} dim_learned={} dim_target={}",
                row.kl, row.kl_se, row.dim_learned, row.dim_target
            );
        }
        Command::Verify {
            level,
            out,
            inject_fault,
        } => {
            let level = match level {
                LevelArg::Fast => VerifyLevel::Fast,
                LevelArg::Full => VerifyLevel::Full,
            };
            let start = Instant::now();
            let report = cmd_verify(level, inject_fault, &out)?;
            eprintln!("verification took {:.1}s", start.elapsed().as_secs_f64());
            print_verify(&report);
            if !report.passed {
                return Ok(EXIT_VIOLATION);
            }
        }
        Command::Experiment {
            config,
            seed,
            ess,
            out,
        } => {
            let cfg = load_config(config.as_ref(), seed, ess)?;
            let start = Instant::now();
            let s = cmd_experiment(&cfg, &out)?;
            eprintln!(
                "{} datasets: {} rows written, {} already present, {} failed ({:.1}s)",
                s.datasets,
                s.rows_written,
                s.rows_skipped,
                s.failed_datasets,
                start.elapsed().as_secs_f64()
            );
        }
    }
    Ok(0)
}

fn status(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn print_verify(r: &chordlearn_core::verify::SuiteReport) {
    for c in &r.chordality {
        println!(
            "chordality n={}: {} ({} graphs)",
            c.n,
            status(c.passed()),
            c.graphs
        );
    }
    for s in &r.oracle_self_check {
        println!(
            "oracle self-check n={}: {} ({} targets)",
            s.n,
            status(s.passed()),
            s.targets
        );
    }
    for p in &r.greedy_optimality {
        println!(
            "local optima n={}: {} ({} targets, {} violations)",
            p.n,
            status(p.passed()),
            p.targets,
            p.violations
        );
    }
    for c in &r.chain {
        println!(
            "chordal chains n={}: {} ({} pairs)",
            c.n,
            status(c.passed()),
            c.pairs
        );
    }
    for g in &r.graphoid {
        println!(
            "graphoid axioms n={}: {} ({} models)",
            g.n,
            status(g.passed()),
            g.models
        );
    }
    println!(
        "separation chains: {} ({}/{} held)",
        status(r.sep_chain.passed()),
        r.sep_chain.held,
        r.sep_chain.premise_satisfied
    );
    println!(
        "latent counterexample: {}",
        status(r.latent_counterexample.passed())
    );
    if let Some(p) = &r.dag_conjecture_probe {
        println!(
            "dag targets n={}: {} of {} models with a non-optimal local optimum (informational)",
            p.n, p.targets_with_nonoptimal_optima, p.distinct_models
        );
    }
    println!("overall: {}", status(r.passed));
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::InvalidEss(_) => EXIT_USAGE,
        _ => EXIT_IO,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
