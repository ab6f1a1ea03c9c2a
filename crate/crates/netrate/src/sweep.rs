//! Experiment sweeps: generate, simulate, infer and evaluate across one
//! swept axis, emitting one row per (axis value, repetition).
//!
//! Every cell runs a fresh seeded pipeline - new network, new cascades -
//! so repetition spread reflects topology randomness as well as cascade
//! randomness. Cell seeds are derived from the base seed and the cell
//! coordinates, which makes the whole sweep deterministic and
//! order-independent. A failing cell records its error in the row and the
//! sweep continues.

use crate::metrics::{evaluate, EvalReport};
use crate::model::TransmissionModel;
use crate::sim::{generate_cascades, SimConfig};
use crate::solver::{infer_network, SolverOptions};
use crate::synth::{assign_rates, generate_topology, RateRange, Topology};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
}

/// The quantity varied across the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Number of observed cascades.
    Cascades,
    /// Observation window length.
    Horizon,
    /// Network size; edges are set to twice the node count.
    Nodes,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::Cascades => "cascades",
            SweepAxis::Horizon => "horizon",
            SweepAxis::Nodes => "nodes",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "cascades" => Ok(SweepAxis::Cascades),
            "horizon" => Ok(SweepAxis::Horizon),
            "nodes" => Ok(SweepAxis::Nodes),
            other => Err(format!(
                "unknown sweep axis `{other}` (expected cascades, horizon or nodes)"
            )),
        }
    }
}

/// Fixed configuration shared by every cell; the swept axis overrides one
/// of these fields per value.
#[derive(Debug, Clone)]
pub struct SweepBase {
    pub topology: Topology,
    pub model: TransmissionModel,
    pub nodes: usize,
    pub edges: usize,
    pub horizon: f64,
    pub n_cascades: usize,
    pub min_infected: usize,
    pub rate_range: RateRange,
    pub p_forward: f64,
    pub p_backward: f64,
    pub seed: u64,
    pub solver: SolverOptions,
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub repetitions: usize,
    pub base: SweepBase,
}

/// One sweep cell: the evaluated metrics, or the error that stopped it.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub value: f64,
    pub repetition: usize,
    pub report: Option<EvalReport>,
    /// Wall-clock seconds spent inside network inference for this cell.
    pub wall_time_seconds: f64,
    pub error: Option<String>,
}

/// SplitMix64 finalizer; decorrelates cell seeds derived from (base,
/// axis index, repetition).
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn cell_seed(base: u64, axis_index: usize, repetition: usize) -> u64 {
    mix(base ^ mix(axis_index as u64) ^ mix((repetition as u64).wrapping_add(0x517C_C1B7)))
}

fn validate(spec: &SweepSpec) -> Result<(), SweepError> {
    if spec.values.is_empty() {
        return Err(SweepError::InvalidSpec("values must be nonempty".into()));
    }
    if !spec.values.windows(2).all(|w| w[0] < w[1]) {
        return Err(SweepError::InvalidSpec(
            "values must be strictly increasing".into(),
        ));
    }
    if spec.repetitions == 0 {
        return Err(SweepError::InvalidSpec(
            "repetitions must be at least 1".into(),
        ));
    }
    if spec.axis != SweepAxis::Horizon {
        for &v in &spec.values {
            if v < 1.0 || v.fract() != 0.0 {
                return Err(SweepError::InvalidSpec(format!(
                    "{} values must be positive integers, got {v}",
                    spec.axis
                )));
            }
        }
    }
    Ok(())
}

fn run_cell(spec: &SweepSpec, value: f64, seed: u64) -> Result<(EvalReport, f64), String> {
    let base = &spec.base;
    let (nodes, edges, horizon, n_cascades) = match spec.axis {
        SweepAxis::Cascades => (base.nodes, base.edges, base.horizon, value as usize),
        SweepAxis::Horizon => (base.nodes, base.edges, value, base.n_cascades),
        SweepAxis::Nodes => {
            let n = value as usize;
            (n, 2 * n, base.horizon, base.n_cascades)
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edge_list = generate_topology(
        base.topology,
        nodes,
        edges,
        base.p_forward,
        base.p_backward,
        &mut rng,
    )
    .map_err(|e| e.to_string())?;
    let truth =
        assign_rates(nodes, &edge_list, base.rate_range, &mut rng).map_err(|e| e.to_string())?;

    let cfg = SimConfig::new(base.model, horizon, n_cascades)
        .and_then(|c| c.min_infected(base.min_infected))
        .map_err(|e| e.to_string())?;
    let cascades = generate_cascades(&truth, &cfg, mix(seed)).map_err(|e| e.to_string())?;

    let started = Instant::now();
    let inferred = infer_network(&cascades, base.model, &base.solver).map_err(|e| e.to_string())?;
    let wall = started.elapsed().as_secs_f64();

    let report = evaluate(&truth, &inferred.network).map_err(|e| e.to_string())?;
    Ok((report, wall))
}

/// Run the sweep. Rows come back ordered by (axis value, repetition); the
/// metric columns are fully determined by the base seed.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, SweepError> {
    validate(spec)?;
    let mut rows = Vec::with_capacity(spec.values.len() * spec.repetitions);
    for (axis_index, &value) in spec.values.iter().enumerate() {
        for repetition in 0..spec.repetitions {
            let seed = cell_seed(spec.base.seed, axis_index, repetition);
            let row = match run_cell(spec, value, seed) {
                Ok((report, wall_time_seconds)) => SweepRow {
                    axis: spec.axis,
                    value,
                    repetition,
                    report: Some(report),
                    wall_time_seconds,
                    error: None,
                },
                Err(message) => SweepRow {
                    axis: spec.axis,
                    value,
                    repetition,
                    report: None,
                    wall_time_seconds: 0.0,
                    error: Some(message),
                },
            };
            rows.push(row);
        }
    }
    Ok(rows)
}
