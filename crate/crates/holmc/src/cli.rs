//! The `holmc` command line.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use holmc_core::construction::{build, BuildMode, BuilderConfig};
use holmc_core::exact::solve_exact;
use holmc_core::kl::{self, SolverConfig};
use holmc_core::model;
use holmc_core::motion::{CostParams, FlowStats};
use holmc_core::synth::{generate_scene, presets, score_partition};
use holmc_core::{LiftedHypergraph, NodePartition};

use crate::bench::{self, FlowKind};
use crate::config;
use crate::format::{self, format_float, Metric, ParseError, SolutionFile, TrajectoryFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => EXIT_VERIFY,
            _ => EXIT_USAGE,
        }
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "holmc", version, about = "Higher-order lifted multicut toolkit")]
#[command(after_help = "Any flag can also be set in a key=value file passed with --config.")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic trajectory scene with ground-truth labels.
    Synth(SynthArgs),
    /// Generate a pixel-grid instance from a flow field.
    Grid(GridArgs),
    /// Build an instance from a trajectory file.
    BuildGraph(BuildArgs),
    /// Improve a decomposition with the local search heuristic.
    Solve(SolveArgs),
    /// Solve a small instance exactly by enumeration.
    SolveExact(ExactArgs),
    /// Check a solution for feasibility and recompute its objective.
    Verify(VerifyArgs),
    /// Compare a label file against ground truth.
    Eval(EvalArgs),
    /// Time the heuristic on grids of growing size.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// A rotating, pulsating disc next to a sliding block.
    Rotation,
    /// Two identical patches translating in lockstep.
    Separated,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value = "rotation")]
    pub preset: Preset,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Position noise in pixels (rotation preset).
    #[arg(long, default_value_t = 0.3)]
    pub noise: f64,
    /// Trajectory file to write.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Ground-truth label file to write.
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Side length is 2^k.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=12))]
    pub k: u32,
    #[arg(long, value_enum, default_value = "composite")]
    pub flow: FlowKind,
    #[arg(long)]
    pub lifted: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Aomc,
    Hopmc,
    Homc,
    Pairwise,
}

impl From<Mode> for BuildMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Aomc => BuildMode::Adaptive,
            Mode::Hopmc => BuildMode::Additive,
            Mode::Homc => BuildMode::HigherOrder,
            Mode::Pairwise => BuildMode::Pairwise,
        }
    }
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Trajectory file.
    pub trajectories: PathBuf,
    #[arg(long, value_enum, default_value = "aomc")]
    pub mode: Mode,
    #[arg(long)]
    pub lifted: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub theta_bar0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub theta0: f64,
    #[arg(long, default_value_t = -0.08, allow_negative_numbers = true)]
    pub theta1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta2: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta3: f64,
    /// Third-order cost at zero distance.
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub theta3_0: f64,
    /// Third-order cost slope.
    #[arg(long, default_value_t = 0.08)]
    pub theta3_1: f64,
    /// Flow variation used to normalize motion distances.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 100.0)]
    pub pairwise_cutoff: f64,
    #[arg(long, default_value_t = 12)]
    pub lift_knn: usize,
    #[arg(long, default_value_t = 40.0)]
    pub lift_dist: f64,
    #[arg(long, default_value_t = 20.0)]
    pub triple_full_dist: f64,
    #[arg(long, default_value_t = 300.0)]
    pub triple_max_dist: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Instance file.
    pub instance: PathBuf,
    /// `singletons`, `joined`, or a solution/label file.
    #[arg(long, default_value = "singletons")]
    pub init: String,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub epsilon: f64,
    /// Keep applied transformations even if they do not improve.
    #[arg(long)]
    pub no_rollback: bool,
    /// Print the objective after every outer iteration to stderr.
    #[arg(long)]
    pub trace: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    pub instance: PathBuf,
    #[arg(long, default_value_t = 12)]
    pub node_limit: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub instance: PathBuf,
    pub solution: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predicted labels (solution or label file).
    pub predicted: PathBuf,
    /// Ground-truth labels.
    pub truth: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 3)]
    pub k_min: u32,
    #[arg(long, default_value_t = 7)]
    pub k_max: u32,
    #[arg(long, value_enum, default_value = "composite")]
    pub flow: FlowKind,
    #[arg(long)]
    pub lifted: bool,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    /// Runs per instance; the fastest is reported.
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

fn parse_with<T>(path: &Path, f: impl FnOnce(&str) -> Result<T, ParseError>) -> Result<T, CliError> {
    f(&read(path)?).map_err(|source| CliError::Parse {
        path: path.into(),
        source,
    })
}

fn emit(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.into(),
            source,
        }),
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn load_instance(path: &Path) -> Result<LiftedHypergraph, CliError> {
    parse_with(path, format::parse_instance)
}

fn load_labels(path: &Path) -> Result<SolutionFile, CliError> {
    parse_with(path, format::parse_solution)
}

fn check_size(path: &Path, found: usize, expected: usize) -> Result<(), CliError> {
    if found == expected {
        Ok(())
    } else {
        Err(usage(format!(
            "{}: labels {found} nodes, instance has {expected}",
            path.display()
        )))
    }
}

fn synth(args: &SynthArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if !(args.noise >= 0.0 && args.noise.is_finite()) {
        return Err(usage("--noise must be a non-negative number"));
    }
    let spec = match args.preset {
        Preset::Rotation => presets::rotation_scene(args.seed, args.noise),
        Preset::Separated => presets::separated_objects_scene(2, 10.0, 6, 5, args.seed),
    };
    let scene = generate_scene(&spec).map_err(usage)?;
    let file = TrajectoryFile {
        frames: spec.frames,
        feature_dim: 0,
        trajectories: scene.trajectories,
    };
    emit(Some(&args.output), &format::write_trajectories(&file), stdout)?;
    if let Some(path) = &args.labels {
        let labels = SolutionFile {
            objective: None,
            partition: NodePartition::from_labels(&scene.labels),
        };
        emit(Some(path), &format::write_solution(&labels), stdout)?;
    }
    Ok(())
}

fn grid(args: &GridArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let g = bench::grid_instance(args.k, args.flow, args.lifted, &CostParams::default());
    emit(args.output.as_deref(), &format::write_instance(&g), stdout)
}

fn build_graph(args: &BuildArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let file = parse_with(&args.trajectories, format::parse_trajectories)?;
    let params = CostParams {
        theta_bar0: args.theta_bar0,
        theta0: args.theta0,
        theta1: args.theta1,
        theta2: args.theta2,
        theta3: args.theta3,
        triple_theta0: args.theta3_0,
        triple_theta1: args.theta3_1,
    };
    params.validate().map_err(usage)?;
    if !(args.sigma > 0.0 && args.sigma.is_finite()) {
        return Err(usage("--sigma must be positive"));
    }
    let config = BuilderConfig {
        mode: args.mode.into(),
        lifted: args.lifted,
        pairwise_cutoff: args.pairwise_cutoff,
        lift_knn: args.lift_knn,
        lift_dist: args.lift_dist,
        triple_full_dist: args.triple_full_dist,
        triple_max_dist: args.triple_max_dist,
        seed: args.seed,
    };
    let g = build(&file.trajectories, &FlowStats::uniform(args.sigma), &params, &config).map_err(usage)?;
    emit(args.output.as_deref(), &format::write_instance(&g), stdout)
}

struct Trace;

impl kl::Observer for Trace {
    fn on_iteration(&mut self, iteration: usize, objective: f64, labels: &[usize]) {
        let mut ids = labels.to_vec();
        ids.sort_unstable();
        ids.dedup();
        eprintln!("iteration {iteration} objective {} components {}", format_float(objective), ids.len());
    }
}

fn solve(args: &SolveArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let g = load_instance(&args.instance)?;
    let n = g.node_count();
    let start = match args.init.as_str() {
        "singletons" => NodePartition::singletons(n),
        "joined" => NodePartition::single_class(n),
        path => {
            let path = Path::new(path);
            let init = load_labels(path)?;
            check_size(path, init.partition.len(), n)?;
            // any labeling is accepted as a start; classes split into their
            // connected pieces
            model::canonicalize(&g, &init.partition)
        }
    };
    if !(args.epsilon >= 0.0 && args.epsilon.is_finite()) {
        return Err(usage("--epsilon must be a non-negative number"));
    }
    let config = SolverConfig {
        max_iter: args.max_iter,
        epsilon: args.epsilon,
        rollback: !args.no_rollback,
    };
    let sol = if args.trace {
        kl::solve_partition_observed(&g, &start, &config, &mut Trace)
    } else {
        kl::solve_partition(&g, &start, &config)
    }
    .map_err(usage)?;
    if !sol.converged {
        eprintln!("warning: stopped after {} iterations without converging", sol.iterations);
    }
    let out = SolutionFile {
        objective: Some(sol.objective),
        partition: sol.partition,
    };
    emit(args.output.as_deref(), &format::write_solution(&out), stdout)
}

fn solve_exact_cmd(args: &ExactArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let g = load_instance(&args.instance)?;
    let sol = solve_exact(&g, args.node_limit).map_err(usage)?;
    let out = SolutionFile {
        objective: Some(sol.objective),
        partition: sol.partition,
    };
    emit(args.output.as_deref(), &format::write_solution(&out), stdout)
}

/// Feasibility and objective of a solution file against an instance.
pub fn verify_solution(graph: &LiftedHypergraph, solution: &SolutionFile, tolerance: f64) -> Result<f64, String> {
    if solution.partition.len() != graph.node_count() {
        return Err(format!(
            "solution labels {} nodes, instance has {}",
            solution.partition.len(),
            graph.node_count()
        ));
    }
    let labeling = model::labeling_from_partition(graph, &solution.partition).map_err(|e| format!("infeasible: {e}"))?;
    debug_assert!(model::is_feasible(graph, &labeling));
    let objective = model::objective(graph, &labeling);
    if let Some(claimed) = solution.objective {
        if !((objective - claimed).abs() <= tolerance) {
            return Err(format!(
                "objective mismatch: file says {}, recomputed {}",
                format_float(claimed),
                format_float(objective)
            ));
        }
    }
    Ok(objective)
}

fn verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let g = load_instance(&args.instance)?;
    let sol = load_labels(&args.solution)?;
    let objective = verify_solution(&g, &sol, args.tolerance).map_err(CliError::Verification)?;
    let text = format!(
        "ok objective {} components {}\n",
        format_float(objective),
        sol.partition.num_classes()
    );
    emit(None, &text, stdout)
}

fn eval(args: &EvalArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let predicted = load_labels(&args.predicted)?;
    let truth = load_labels(&args.truth)?;
    check_size(&args.predicted, predicted.partition.len(), truth.partition.len())?;
    let s = score_partition(predicted.partition.labels(), truth.partition.labels()).map_err(usage)?;
    let text = format!(
        "{}\n{}\n{}\n{}\nclusters {}\n",
        Metric("rand", s.rand_index),
        Metric("precision", s.precision),
        Metric("recall", s.recall),
        Metric("f_measure", s.f_measure),
        predicted.partition.num_classes()
    );
    emit(None, &text, stdout)
}

fn bench_cmd(args: &BenchArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if args.k_min > args.k_max || args.k_max > 12 {
        return Err(usage("need --k-min <= --k-max <= 12"));
    }
    let config = SolverConfig {
        max_iter: args.max_iter,
        ..SolverConfig::default()
    };
    let rows = bench::run_sweep(args.k_min..=args.k_max, args.flow, args.lifted, args.repeats, &config).map_err(usage)?;
    emit(args.output.as_deref(), &bench::format_table(&rows), stdout)
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Synth(a) => synth(a, stdout),
        Command::Grid(a) => grid(a, stdout),
        Command::BuildGraph(a) => build_graph(a, stdout),
        Command::Solve(a) => solve(a, stdout),
        Command::SolveExact(a) => solve_exact_cmd(a, stdout),
        Command::Verify(a) => verify(a, stdout),
        Command::Eval(a) => eval(a, stdout),
        Command::Bench(a) => bench_cmd(a, stdout),
    }
}

/// Applies `--config`, parses and runs; returns the process exit code.
pub fn run(args: impl IntoIterator<Item = OsString>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let mut args: Vec<OsString> = args.into_iter().collect();
    let merged = config::take_config_path(&mut args).map_err(CliError::Usage).and_then(|path| {
        if let Some(path) = path {
            let path = PathBuf::from(path);
            let entries = parse_with(&path, config::parse_config)?;
            config::merge_config(&mut args, &entries);
        }
        Ok(())
    });
    if let Err(e) = merged {
        let _ = writeln!(stderr, "error: {e}");
        return e.exit_code();
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("holmc").chain(args.iter().copied()).map(OsString::from);
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_str(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["solve"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["solve", "/nonexistent/x.txt"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["solve", "x", "--config"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn grid_to_stdout() {
        let (code, out, _) = run_str(&["grid", "--k", "2", "--flow", "constant"]);
        assert_eq!(code, 0);
        let g = format::parse_instance(&out).unwrap();
        assert_eq!(g.node_count(), 16);
    }
}
