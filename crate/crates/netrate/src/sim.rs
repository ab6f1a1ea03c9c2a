//! Continuous-time cascade simulation over a ground-truth network.
//!
//! A cascade starts at a root node at time zero. Whenever a node is
//! finalized as infected, every outgoing edge samples a transmission delay
//! from the model by inverting its survival function, and the target's
//! infection time is the earliest arrival over all incoming offers - the
//! first parent wins, later offers are ignored. Arrivals past the horizon
//! `T` are not observed and stay at the infinity sentinel.
//!
//! Expansion runs earliest-event-first on a priority queue, so each edge's
//! delay is sampled at most once per cascade, at the moment its source is
//! finalized. Draws are consumed in a canonical order - sources in
//! finalization order, their out-edges by target id - which makes cascade
//! generation reproducible from a seed and lets the whole batch be
//! generated in parallel from per-cascade substreams without changing the
//! output.

use crate::data::{Cascade, CascadeSet, DataError, Network};
use crate::model::TransmissionModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use thiserror::Error;

/// Default observation window length.
pub const DEFAULT_HORIZON: f64 = 10.0;
/// Default smallest number of observed infections per kept cascade. A
/// cascade that stops at its root carries no likelihood signal for any
/// pair, so roots are redrawn below this size.
pub const DEFAULT_MIN_INFECTED: usize = 2;
/// Root redraws allowed before a cascade is declared unreachable.
const MAX_ATTEMPTS_PER_CASCADE: usize = 1000;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("root {root} out of range for a network of {n} nodes")]
    RootOutOfRange { root: usize, n: usize },
    #[error("horizon must be positive and finite, got {0}")]
    InvalidHorizon(f64),
    #[error("min_infected must be at least 1")]
    InvalidMinInfected,
    #[error(
        "gave up on cascade {index} after {attempts} root draws: the network never \
         produced {need} infections within the horizon"
    )]
    CascadeTooSparse {
        index: usize,
        attempts: usize,
        need: usize,
    },
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Configuration of a cascade batch. Roots are drawn uniformly at random.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub horizon: f64,
    pub n_cascades: usize,
    pub model: TransmissionModel,
    pub min_infected: usize,
}

impl SimConfig {
    pub fn new(
        model: TransmissionModel,
        horizon: f64,
        n_cascades: usize,
    ) -> Result<Self, SimError> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(SimError::InvalidHorizon(horizon));
        }
        Ok(Self {
            horizon,
            n_cascades,
            model,
            min_infected: DEFAULT_MIN_INFECTED,
        })
    }

    pub fn min_infected(mut self, min_infected: usize) -> Result<Self, SimError> {
        if min_infected == 0 {
            return Err(SimError::InvalidMinInfected);
        }
        self.min_infected = min_infected;
        Ok(self)
    }
}

#[derive(Debug, PartialEq)]
struct Arrival {
    time: f64,
    node: usize,
}

impl Eq for Arrival {}

impl Ord for Arrival {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap pops the earliest arrival, ties by node id
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Arrival {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Earliest-arrival expansion with an injectable delay source. The
/// `delay` callback is invoked once per `(src, dst, rate)` edge, in
/// canonical order, when `src` is finalized inside the horizon.
pub fn simulate_cascade_with(
    net: &Network,
    horizon: f64,
    root: usize,
    mut delay: impl FnMut(usize, usize, f64) -> f64,
) -> Result<Cascade, SimError> {
    let n = net.node_count();
    if root >= n {
        return Err(SimError::RootOutOfRange { root, n });
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(SimError::InvalidHorizon(horizon));
    }

    let mut times = vec![f64::INFINITY; n];
    let mut finalized = vec![false; n];
    times[root] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Arrival {
        time: 0.0,
        node: root,
    });

    while let Some(Arrival { time, node }) = heap.pop() {
        if finalized[node] {
            continue;
        }
        finalized[node] = true;
        for &(target, rate) in net.outgoing(node) {
            if finalized[target] {
                continue;
            }
            let arrival = time + delay(node, target, rate);
            if arrival <= horizon && arrival < times[target] {
                times[target] = arrival;
                heap.push(Arrival {
                    time: arrival,
                    node: target,
                });
            }
        }
    }
    Ok(Cascade::new(times, horizon)?)
}

/// Simulate one cascade, sampling edge delays from the model with fresh
/// uniform draws from `rng`.
pub fn simulate_cascade(
    net: &Network,
    model: TransmissionModel,
    horizon: f64,
    root: usize,
    rng: &mut impl Rng,
) -> Result<Cascade, SimError> {
    simulate_cascade_with(net, horizon, root, |_, _, rate| {
        let u = 1.0 - rng.gen::<f64>();
        model
            .sample_delay(rate, u)
            .expect("stored rates are positive and u lies in (0, 1]")
    })
}

/// One cascade of a seeded batch: substream `index` of the base seed,
/// with roots redrawn until `min_infected` nodes are observed.
pub(crate) fn simulate_indexed_cascade(
    net: &Network,
    cfg: &SimConfig,
    seed: u64,
    index: usize,
) -> Result<Cascade, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let n = net.node_count();
    for _ in 0..MAX_ATTEMPTS_PER_CASCADE {
        let root = rng.gen_range(0..n);
        let cascade = simulate_cascade(net, cfg.model, cfg.horizon, root, &mut rng)?;
        if cascade.infected_count() >= cfg.min_infected {
            return Ok(cascade);
        }
    }
    Err(SimError::CascadeTooSparse {
        index,
        attempts: MAX_ATTEMPTS_PER_CASCADE,
        need: cfg.min_infected,
    })
}

/// Generate `cfg.n_cascades` independent cascades from a base seed.
/// Cascades use disjoint RNG substreams keyed by their index, so the
/// batch is deterministic and may be produced by any number of workers.
pub fn generate_cascades(
    net: &Network,
    cfg: &SimConfig,
    seed: u64,
) -> Result<CascadeSet, SimError> {
    if cfg.min_infected == 0 {
        return Err(SimError::InvalidMinInfected);
    }
    if !(cfg.horizon > 0.0 && cfg.horizon.is_finite()) {
        return Err(SimError::InvalidHorizon(cfg.horizon));
    }
    let cascades: Vec<Cascade> = (0..cfg.n_cascades)
        .into_par_iter()
        .map(|index| simulate_indexed_cascade(net, cfg, seed, index))
        .collect::<Result<_, _>>()?;
    Ok(CascadeSet::new(net.node_count(), cfg.horizon, cascades)?)
}

/// Brute-force earliest-arrival oracle: given every edge's delay up front,
/// relax all edges until no arrival improves, then truncate past-horizon
/// arrivals to infinity. Quadratic and only for testing the expansion.
#[doc(hidden)]
pub fn earliest_arrival_oracle(
    net: &Network,
    horizon: f64,
    root: usize,
    delays: &dyn Fn(usize, usize) -> f64,
) -> Cascade {
    let n = net.node_count();
    let mut arrival = vec![f64::INFINITY; n];
    arrival[root] = 0.0;
    loop {
        let mut improved = false;
        for (src, dst, _) in net.edges() {
            let offer = arrival[src] + delays(src, dst);
            if offer < arrival[dst] {
                arrival[dst] = offer;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    let times = arrival
        .into_iter()
        .map(|t| if t <= horizon { t } else { f64::INFINITY })
        .collect();
    Cascade::new(times, horizon).expect("root is always infected at time zero")
}
