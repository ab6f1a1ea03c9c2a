//! Command-line pipeline: `generate-network`, `simulate`, `infer`,
//! `evaluate` and `sweep`.
//!
//! Every command that uses randomness takes `--seed`, and identical
//! arguments plus seed reproduce outputs byte for byte - except for a
//! `# generated-at <unix seconds>` comment line at the top of network and
//! cascade files, suppressed by the global `--deterministic` flag. CSV
//! outputs carry a header row and RFC 4180 quoting.
//!
//! Exit codes: 0 on success, 1 on a runtime failure (one-line diagnostic
//! on stderr), 2 on a usage error.

use crate::data::{read_cascades, read_network};
use crate::metrics::{evaluate, EvalReport};
use crate::model::{ModelKind, TransmissionModel};
use crate::sim::{generate_cascades, SimConfig, DEFAULT_HORIZON, DEFAULT_MIN_INFECTED};
use crate::solver::{infer_network, SolverOptions};
use crate::sweep::{run_sweep, SweepAxis, SweepBase, SweepRow, SweepSpec};
use crate::synth::{
    assign_rates, generate_topology, RateRange, Topology, DEFAULT_P_BACKWARD, DEFAULT_P_FORWARD,
};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

/// Environment variable supplying a default for `--workers`.
pub const WORKERS_ENV: &str = "NETRATE_WORKERS";

const LONG_VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "\ncascade file format: 1\nnetwork file format: 1"
);

#[derive(Parser)]
#[command(
    name = "netrate",
    version,
    long_version = LONG_VERSION,
    about = "Infer diffusion networks and transmission rates from cascade data"
)]
struct Cli {
    /// Suppress the generated-at comment so outputs are byte-reproducible.
    #[arg(long, global = true)]
    deterministic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic ground-truth network with random rates.
    GenerateNetwork(GenerateArgs),
    /// Simulate cascades over a network.
    Simulate(SimulateArgs),
    /// Infer a network from observed cascades.
    Infer(InferArgs),
    /// Compare an inferred network against ground truth.
    Evaluate(EvaluateArgs),
    /// Run a whole generate/simulate/infer/evaluate sweep along one axis.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Transmission model: exp, pow or ray.
    #[arg(long)]
    model: ModelKind,
    /// Minimum delay of the power-law model (honored only for pow).
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
}

impl ModelArgs {
    fn build(&self) -> Result<TransmissionModel> {
        Ok(TransmissionModel::new(self.model, self.delta)?)
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// kronecker-random, kronecker-hierarchical, kronecker-core or forestfire.
    #[arg(long)]
    topology: Topology,
    #[arg(long)]
    nodes: usize,
    /// Expected edge count (Kronecker topologies only).
    #[arg(long)]
    edges: Option<usize>,
    #[command(flatten)]
    model: ModelArgs,
    /// Lower bound of the uniform rate range (default depends on model).
    #[arg(long)]
    rate_lo: Option<f64>,
    /// Upper bound of the uniform rate range (default depends on model).
    #[arg(long)]
    rate_hi: Option<f64>,
    /// Forward burning probability (forestfire only).
    #[arg(long, default_value_t = DEFAULT_P_FORWARD)]
    p_forward: f64,
    /// Backward burning probability (forestfire only).
    #[arg(long, default_value_t = DEFAULT_P_BACKWARD)]
    p_backward: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    network: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    horizon: f64,
    #[arg(long, default_value_t = 1000)]
    cascades: usize,
    /// Redraw roots until a cascade observes at least this many infections.
    #[arg(long, default_value_t = DEFAULT_MIN_INFECTED)]
    min_infected: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InferArgs {
    #[arg(long)]
    cascades: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    out: PathBuf,
    /// Report edges with inferred rate above this threshold.
    #[arg(long, default_value_t = 1e-4)]
    threshold: f64,
    /// Worker threads; defaults to $NETRATE_WORKERS, then all cores.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    /// Relative objective-decrease stopping tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Print the objective breakdown at the solution.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    inferred: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// cascades, horizon or nodes.
    #[arg(long)]
    axis: SweepAxis,
    /// Strictly increasing axis values, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    #[arg(long, default_value_t = Topology::KroneckerHierarchical)]
    topology: Topology,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 64)]
    nodes: usize,
    #[arg(long, default_value_t = 128)]
    edges: usize,
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    horizon: f64,
    #[arg(long, default_value_t = 1000)]
    cascades: usize,
    #[arg(long, default_value_t = DEFAULT_MIN_INFECTED)]
    min_infected: usize,
    #[arg(long, default_value_t = DEFAULT_P_FORWARD)]
    p_forward: f64,
    #[arg(long, default_value_t = DEFAULT_P_BACKWARD)]
    p_backward: f64,
    #[arg(long, default_value_t = 1e-4)]
    threshold: f64,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

/// Run with explicit arguments (argv\[0\] included) and return the process
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = err.exit_code();
            let _ = err.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::GenerateNetwork(args) => generate_network(args, cli.deterministic),
        Command::Simulate(args) => simulate(args, cli.deterministic),
        Command::Infer(args) => infer(args, cli.deterministic),
        Command::Evaluate(args) => evaluate_cmd(args),
        Command::Sweep(args) => sweep(args),
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("netrate: {err:#}");
            1
        }
    }
}

/// Entry point for the binary.
pub fn run_from_env() -> i32 {
    run(std::env::args_os())
}

fn write_with_comment(path: &Path, body: &str, deterministic: bool) -> Result<()> {
    let mut text = String::new();
    if !deterministic {
        let stamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        text.push_str(&format!("# generated-at {stamp}\n"));
    }
    text.push_str(body);
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn resolve_workers(flag: Option<usize>) -> Result<usize> {
    if let Some(w) = flag {
        return Ok(w);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(value) => value
            .parse()
            .with_context(|| format!("parsing {WORKERS_ENV}={value}")),
        Err(_) => Ok(0),
    }
}

fn generate_network(args: &GenerateArgs, deterministic: bool) -> Result<()> {
    let model = args.model.build()?;
    let range = match (args.rate_lo, args.rate_hi) {
        (None, None) => RateRange::default_for(model.kind()),
        (lo, hi) => {
            let default = RateRange::default_for(model.kind());
            RateRange::new(lo.unwrap_or(default.lo()), hi.unwrap_or(default.hi()))?
        }
    };
    let edges = match (args.topology, args.edges) {
        (Topology::ForestFire, _) => 0,
        (_, Some(e)) => e,
        (_, None) => bail!("--edges is required for Kronecker topologies"),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let edge_list = generate_topology(
        args.topology,
        args.nodes,
        edges,
        args.p_forward,
        args.p_backward,
        &mut rng,
    )?;
    let net = assign_rates(args.nodes, &edge_list, range, &mut rng)?;
    write_with_comment(
        &args.out,
        &crate::data::network_to_string(&net),
        deterministic,
    )?;
    eprintln!(
        "generated {} ({} nodes, {} edges)",
        args.out.display(),
        net.node_count(),
        net.edge_count()
    );
    Ok(())
}

fn simulate(args: &SimulateArgs, deterministic: bool) -> Result<()> {
    let model = args.model.build()?;
    let net = read_network(&args.network)?;
    let cfg =
        SimConfig::new(model, args.horizon, args.cascades)?.min_infected(args.min_infected)?;
    let cascades = generate_cascades(&net, &cfg, args.seed)?;
    write_with_comment(
        &args.out,
        &crate::data::cascades_to_string(&cascades),
        deterministic,
    )?;
    eprintln!(
        "simulated {} cascades over {} nodes into {}",
        cascades.cascade_count(),
        net.node_count(),
        args.out.display()
    );
    Ok(())
}

fn diagnostics_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(".diag.csv");
    out.with_file_name(name)
}

fn infer(args: &InferArgs, deterministic: bool) -> Result<()> {
    let model = args.model.build()?;
    let cascades = read_cascades(&args.cascades)?;
    let opts = SolverOptions {
        max_iters: args.max_iters,
        rel_tol: args.tol,
        edge_threshold: args.threshold,
        workers: resolve_workers(args.workers)?,
        ..SolverOptions::default()
    };
    let result = infer_network(&cascades, model, &opts)?;

    write_with_comment(
        &args.out,
        &crate::data::network_to_string(&result.network),
        deterministic,
    )?;

    let diag_path = diagnostics_path(&args.out);
    let mut writer = csv::Writer::from_path(&diag_path)
        .with_context(|| format!("writing {}", diag_path.display()))?;
    writer.write_record(["node", "iters", "objective", "converged"])?;
    for d in &result.diagnostics {
        writer.write_record([
            d.node.to_string(),
            d.iterations.to_string(),
            d.objective.to_string(),
            d.converged.to_string(),
        ])?;
    }
    writer.flush()?;

    for failure in result.failed_nodes() {
        eprintln!(
            "warning: node {} not solved: {}",
            failure.node,
            failure.error.as_deref().unwrap_or("unknown")
        );
    }
    if args.verbose {
        let breakdown = crate::likelihood::breakdown(&cascades, &result.network, model)?;
        eprintln!(
            "log-likelihood at solution: {} (uninfected survival {}, infected survival {}, hazard credit {})",
            breakdown.log_likelihood(),
            breakdown.uninfected_survival,
            breakdown.infected_survival,
            breakdown.hazard_credit,
        );
    }
    eprintln!(
        "inferred {} edges over {} nodes into {} (diagnostics: {})",
        result.network.edge_count(),
        result.network.node_count(),
        args.out.display(),
        diag_path.display()
    );
    Ok(())
}

fn write_report_csv(path: &Path, report: &EvalReport) -> Result<()> {
    let mut writer =
        csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    writer.write_record([
        "precision",
        "recall",
        "accuracy",
        "norm_mae",
        "n_true",
        "n_inferred",
        "n_common",
    ])?;
    writer.write_record([
        report.precision.to_string(),
        report.recall.to_string(),
        report.accuracy.to_string(),
        report.normalized_mae.to_string(),
        report.true_edges.to_string(),
        report.inferred_edges.to_string(),
        report.common_edges.to_string(),
    ])?;
    writer.flush()?;
    Ok(())
}

fn evaluate_cmd(args: &EvaluateArgs) -> Result<()> {
    let truth = read_network(&args.truth)?;
    let inferred = read_network(&args.inferred)?;
    let report = evaluate(&truth, &inferred)?;
    write_report_csv(&args.out, &report)?;
    eprintln!(
        "precision {:.4} recall {:.4} accuracy {:.4} norm_mae {:.4} -> {}",
        report.precision,
        report.recall,
        report.accuracy,
        report.normalized_mae,
        args.out.display()
    );
    Ok(())
}

fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut writer =
        csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    writer.write_record([
        "axis",
        "value",
        "repetition",
        "precision",
        "recall",
        "accuracy",
        "norm_mae",
        "wall_time_seconds",
        "error",
    ])?;
    for row in rows {
        let metric = |f: fn(&EvalReport) -> f64| {
            row.report
                .as_ref()
                .map(|r| f(r).to_string())
                .unwrap_or_default()
        };
        writer.write_record([
            row.axis.to_string(),
            row.value.to_string(),
            row.repetition.to_string(),
            metric(|r| r.precision),
            metric(|r| r.recall),
            metric(|r| r.accuracy),
            metric(|r| r.normalized_mae),
            row.wall_time_seconds.to_string(),
            row.error.clone().unwrap_or_default(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let model = args.model.build()?;
    let spec = SweepSpec {
        axis: args.axis,
        values: args.values.clone(),
        repetitions: args.repetitions,
        base: SweepBase {
            topology: args.topology,
            model,
            nodes: args.nodes,
            edges: args.edges,
            horizon: args.horizon,
            n_cascades: args.cascades,
            min_infected: args.min_infected,
            rate_range: RateRange::default_for(model.kind()),
            p_forward: args.p_forward,
            p_backward: args.p_backward,
            seed: args.seed,
            solver: SolverOptions {
                edge_threshold: args.threshold,
                workers: resolve_workers(args.workers)?,
                ..SolverOptions::default()
            },
        },
    };
    let rows = run_sweep(&spec)?;
    write_sweep_csv(&args.out, &rows)?;
    let failures = rows.iter().filter(|r| r.error.is_some()).count();
    eprintln!(
        "swept {} over {:?}: {} rows ({} failed) -> {}",
        spec.axis,
        spec.values,
        rows.len(),
        failures,
        args.out.display()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_required_flag_is_a_usage_error() {
        assert_eq!(run(["netrate", "infer", "--model", "exp"]), 2);
    }

    #[test]
    fn unknown_subcommand_is_a_usage_error() {
        assert_eq!(run(["netrate", "transmogrify"]), 2);
    }

    #[test]
    fn version_exits_cleanly() {
        assert_eq!(run(["netrate", "--version"]), 0);
    }

    #[test]
    fn diagnostics_path_sits_next_to_the_output() {
        assert_eq!(
            diagnostics_path(Path::new("/tmp/run/inferred.txt")),
            PathBuf::from("/tmp/run/inferred.diag.csv")
        );
    }

    #[test]
    fn runtime_failures_exit_one() {
        assert_eq!(
            run([
                "netrate",
                "infer",
                "--cascades",
                "/nonexistent/cascades.txt",
                "--model",
                "exp",
                "--out",
                "/nonexistent/out.txt",
            ]),
            1
        );
    }
}
