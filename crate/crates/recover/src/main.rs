//! Command-line harness for the image-recovery experiments.
//!
//! Exit codes: 0 on success, 2 on validation failure (bad arguments,
//! rejected configurations, failed checks), 3 on I/O failure.

use clap::{Parser, Subcommand};
use proxsplit::hilbert::Vector;
use proxsplit::solvers::{run, Algorithm, Schedule, SolverConfig, StopReason};
use recover::config::KeyValues;
use recover::experiments::{AlgoPreset, ExperimentKind, ExperimentSpec};
use recover::image::Image;
use recover::problem_file::parse_problem;
use recover::prox_check::prox_check;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "recover",
    version,
    about = "Image recovery by proximal splitting: experiments, generic solves, prox checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in experiment (deconv, multiview, interp, phase).
    Experiment {
        /// Experiment tag: deconv | multiview | interp | phase.
        kind: String,
        /// Image side length (default 64).
        #[arg(long)]
        scale: Option<usize>,
        /// Degradation seed (default 0).
        #[arg(long)]
        seed: Option<u64>,
        /// Algorithm preset: fb|ifb|dr|fbf-s|fbf-p|pd-s|pd-p|ps-s|ps-p.
        #[arg(long)]
        algo: Option<String>,
        /// Iteration budget (default 200).
        #[arg(long)]
        iters: Option<usize>,
        /// Trace CSV output path.
        #[arg(long = "out-trace")]
        out_trace: Option<PathBuf>,
        /// Restored image (binary PGM) output path.
        #[arg(long = "out-image")]
        out_image: Option<PathBuf>,
        /// Flat key-value config file; explicit flags take precedence.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write wall-clock times into the trace CSV (breaks byte-level
        /// reproducibility of the file).
        #[arg(long)]
        timing: bool,
    },
    /// Solve a declarative problem-description file.
    Solve {
        /// Problem description (and optional run settings).
        #[arg(long)]
        config: PathBuf,
        /// Algorithm preset (default fbf-p).
        #[arg(long)]
        algo: Option<String>,
        /// Iteration budget (default 1000).
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long = "out-trace")]
        out_trace: Option<PathBuf>,
        #[arg(long = "out-image")]
        out_image: Option<PathBuf>,
        #[arg(long)]
        timing: bool,
    },
    /// Compare a named prox/projection against the brute-force oracles,
    /// e.g. `recover prox-check "huber rho=1 gamma=1 x=5"`.
    ProxCheck {
        /// Descriptor: name followed by key=value parameters.
        descriptor: Vec<String>,
    },
}

enum Failure {
    Validation(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Io(_) => 3,
        }
    }
    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Io(m) => m,
        }
    }
}

fn validation(e: impl std::fmt::Display) -> Failure {
    Failure::Validation(e.to_string())
}

fn io_failure(e: impl std::fmt::Display) -> Failure {
    Failure::Io(e.to_string())
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Experiment {
            kind,
            scale,
            seed,
            algo,
            iters,
            out_trace,
            out_image,
            config,
            timing,
        } => run_experiment_command(
            kind, scale, seed, algo, iters, out_trace, out_image, config, timing,
        ),
        Command::Solve {
            config,
            algo,
            iters,
            out_trace,
            out_image,
            timing,
        } => run_solve_command(config, algo, iters, out_trace, out_image, timing),
        Command::ProxCheck { descriptor } => run_prox_check(descriptor.join(" ")),
    };
    if let Err(f) = result {
        eprintln!("error: {}", f.message());
        std::process::exit(f.code());
    }
}

#[allow(clippy::too_many_arguments)]
fn run_experiment_command(
    kind: String,
    scale: Option<usize>,
    seed: Option<u64>,
    algo: Option<String>,
    iters: Option<usize>,
    out_trace: Option<PathBuf>,
    out_image: Option<PathBuf>,
    config: Option<PathBuf>,
    timing: bool,
) -> Result<(), Failure> {
    let kv = match config {
        Some(path) => KeyValues::load(&path).map_err(io_failure)?,
        None => KeyValues::default(),
    };
    let kind: ExperimentKind = kind.parse().map_err(validation)?;
    let default_algo = match kind {
        ExperimentKind::Deconv => AlgoPreset::Dr,
        _ => AlgoPreset::PdP,
    };
    let algo = match algo.or_else(|| kv.get("algo").map(str::to_string)) {
        Some(text) => text.parse().map_err(validation)?,
        None => default_algo,
    };
    let spec = ExperimentSpec {
        kind,
        scale: scale
            .or(kv.parsed("scale").map_err(validation)?)
            .unwrap_or(64),
        seed: seed.or(kv.parsed("seed").map_err(validation)?).unwrap_or(0),
        algo,
        iters: iters
            .or(kv.parsed("iters").map_err(validation)?)
            .unwrap_or(200),
        image: kv.get("image").map(PathBuf::from),
        out_trace: out_trace.or_else(|| kv.get("out-trace").map(PathBuf::from)),
        out_image: out_image.or_else(|| kv.get("out-image").map(PathBuf::from)),
        timing: timing || kv.get("timing") == Some("true"),
    };

    let summary = recover::run_experiment(&spec).map_err(|e| {
        // File problems surface as I/O failures, everything else as
        // validation.
        let text = format!("{e:#}");
        if text.contains("reading") || text.contains("writing") {
            io_failure(text)
        } else {
            validation(text)
        }
    })?;

    let trace = &summary.trace;
    println!(
        "experiment {} scale {} seed {} algo {}",
        spec.kind, spec.scale, spec.seed, spec.algo
    );
    println!(
        "iterations {} ({})",
        trace.iterations(),
        match trace.reason {
            StopReason::MaxIterations => "budget exhausted",
            StopReason::ToleranceReached => "iterate change below tolerance",
            StopReason::FiniteTermination => "finite termination at a solution",
        }
    );
    if let Some(rec) = trace.records.last() {
        match rec.objective {
            Some(v) => println!("final objective {v:.6e}"),
            None => println!("final objective inf (iterate outside the hard constraint)"),
        }
        println!("wall time {:.3}s", rec.time_s);
    }
    if let Some(db) = summary.final_dist_db {
        println!("final dist_ref_db {db:.2}");
    }
    if let Some(db) = summary.final_objective_db {
        println!("final objective_db {db:.2}");
    }
    if let Some(path) = &spec.out_trace {
        println!("trace written to {}", path.display());
    }
    if let Some(path) = &spec.out_image {
        println!("image written to {}", path.display());
    }
    Ok(())
}

fn run_solve_command(
    config: PathBuf,
    algo: Option<String>,
    iters: Option<usize>,
    out_trace: Option<PathBuf>,
    out_image: Option<PathBuf>,
    timing: bool,
) -> Result<(), Failure> {
    let kv = KeyValues::load(&config).map_err(io_failure)?;
    let spec = parse_problem(&kv).map_err(validation)?;
    let algo: AlgoPreset = match algo.or_else(|| kv.get("algo").map(str::to_string)) {
        Some(text) => text.parse().map_err(validation)?,
        None => AlgoPreset::FbfP,
    };
    let iters = iters
        .or(kv.parsed("iters").map_err(validation)?)
        .unwrap_or(1000);
    let out_trace = out_trace.or_else(|| kv.get("out-trace").map(PathBuf::from));
    let out_image = out_image.or_else(|| kv.get("out-image").map(PathBuf::from));

    let problem = if algo.uses_proximal_form() {
        spec.relax_fully_proximal().map_err(validation)?
    } else {
        spec.relax().map_err(validation)?
    };

    // Auto-derived safe step sizes for a generic relaxation.
    let beta = problem.primal_dual_beta();
    let smooth_beta = problem.smooth_beta();
    let dual_norms: f64 = problem
        .nonsmooth()
        .iter()
        .map(|t| t.op.norm_bound().powi(2))
        .sum::<f64>()
        .sqrt();
    let algorithm = match algo {
        AlgoPreset::Fb => Algorithm::ForwardBackward {
            gamma: Schedule::Constant(1.5 / smooth_beta.max(1e-12)),
        },
        AlgoPreset::Ifb => Algorithm::InertialForwardBackward {
            gamma: 1.0 / smooth_beta.max(1e-12),
            alpha: 3.0,
        },
        AlgoPreset::Dr => Algorithm::DouglasRachford {
            gamma: 1.0,
            lambda: Schedule::Constant(1.5),
        },
        AlgoPreset::FbfS | AlgoPreset::FbfP => Algorithm::FbfPrimalDual {
            gamma: Schedule::Constant(0.9 / beta.max(1e-12)),
        },
        AlgoPreset::PdS | AlgoPreset::PdP => {
            let t = 0.9 / (dual_norms + 0.5 * smooth_beta).max(1e-12);
            Algorithm::RenormedPrimalDual {
                tau: Schedule::Constant(t),
                sigmas: vec![Schedule::Constant(t); problem.nonsmooth().len()],
            }
        }
        AlgoPreset::PsS | AlgoPreset::PsP => Algorithm::ProjectiveSplitting {
            gamma: Schedule::Constant(0.5),
            mus: vec![
                Schedule::Constant(0.5);
                problem.nonsmooth().len() + problem.smooth().len()
            ],
            lambda: Schedule::Constant(1.8),
        },
    };
    let config = SolverConfig::new(algorithm, iters);
    let x0 = Vector::zeros(spec.shape().clone());
    let trace = run(&problem, &config, &x0, None).map_err(validation)?;

    let x = &trace.final_feasible;
    println!("solved with {algo} in {} iterations", trace.iterations());
    match problem.objective(x).map_err(validation)? {
        Some(v) => println!("objective {v:.9e}"),
        None => println!("objective inf"),
    }
    let worst = spec
        .terms()
        .iter()
        .map(|t| t.set.distance(&t.op.apply(x)))
        .fold(0.0f64, f64::max);
    println!("max constraint distance {worst:.3e}");
    if x.len() <= 32 {
        let entries: Vec<String> = x.as_slice().iter().map(|v| format!("{v:.9}")).collect();
        println!("x = [{}]", entries.join(", "));
    }
    if let Some(path) = out_trace {
        std::fs::write(&path, trace.csv_string(timing)).map_err(io_failure)?;
        println!("trace written to {}", path.display());
    }
    if let Some(path) = out_image {
        let img = Image::from_vector(x).map_err(validation)?;
        img.write_pgm(&path).map_err(io_failure)?;
        println!("image written to {}", path.display());
    }
    Ok(())
}

fn run_prox_check(descriptor: String) -> Result<(), Failure> {
    let reports = prox_check(&descriptor).map_err(validation)?;
    let mut all_pass = true;
    for report in &reports {
        println!("{report}");
        all_pass &= report.pass;
    }
    if all_pass {
        Ok(())
    } else {
        Err(Failure::Validation("prox-check failed".into()))
    }
}
