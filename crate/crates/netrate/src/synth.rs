//! Synthetic ground-truth networks: stochastic Kronecker graphs, Forest
//! Fire graphs, and uniform-random transmission rates.
//!
//! Kronecker graphs are sampled pair-by-pair from the k-fold Kronecker
//! power of a 2x2 seed matrix, with probabilities scaled so the expected
//! edge count hits a target. Three seeds matching common social-network
//! structures are built in: random `[0.5 0.5; 0.5 0.5]`, hierarchical
//! `[0.9 0.1; 0.1 0.9]` and core-periphery `[0.9 0.5; 0.5 0.3]`.
//!
//! Forest Fire graphs grow one node at a time: each arrival links to a
//! uniformly chosen ambassador and then recursively "burns" outward along
//! out-links and in-links with geometric fan-out, linking to every burned
//! node. Burn probabilities default to `p_forward = 0.35`,
//! `p_backward = 0.32`, which lands near 2.4 edges per node at a thousand
//! nodes.
//!
//! All generators are deterministic functions of their parameters and the
//! RNG state; identical seeds reproduce identical networks byte for byte.

use crate::data::{DataError, Network};
use crate::model::ModelKind;
use rand::Rng;
use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Default forward burning probability of the Forest Fire generator.
pub const DEFAULT_P_FORWARD: f64 = 0.35;
/// Default backward burning probability of the Forest Fire generator.
pub const DEFAULT_P_BACKWARD: f64 = 0.32;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("Kronecker seed entries must lie in [0, 1], got {0}")]
    InvalidSeedEntry(f64),
    #[error("Kronecker iterations must be at least 1")]
    NoIterations,
    #[error("target of {target} edges is infeasible: at most {max} ordered pairs are available")]
    InfeasibleEdgeTarget { target: usize, max: usize },
    #[error("Kronecker seed has no off-diagonal probability mass to scale")]
    ZeroMass,
    #[error("burning probability must lie in [0, 1), got {0}")]
    InvalidBurnProbability(f64),
    #[error("Forest Fire needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("rate range must satisfy 0 < lo < hi, got [{lo}, {hi}]")]
    InvalidRateRange { lo: f64, hi: f64 },
    #[error("{0} nodes is not a power of two; Kronecker graphs span 2^k nodes")]
    NotPowerOfTwo(usize),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Named generator topologies exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    KroneckerRandom,
    KroneckerHierarchical,
    KroneckerCore,
    ForestFire,
}

impl Topology {
    pub fn as_str(self) -> &'static str {
        match self {
            Topology::KroneckerRandom => "kronecker-random",
            Topology::KroneckerHierarchical => "kronecker-hierarchical",
            Topology::KroneckerCore => "kronecker-core",
            Topology::ForestFire => "forestfire",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Topology {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "kronecker-random" => Ok(Topology::KroneckerRandom),
            "kronecker-hierarchical" => Ok(Topology::KroneckerHierarchical),
            "kronecker-core" => Ok(Topology::KroneckerCore),
            "forestfire" => Ok(Topology::ForestFire),
            other => Err(format!(
                "unknown topology `{other}` (expected kronecker-random, \
                 kronecker-hierarchical, kronecker-core or forestfire)"
            )),
        }
    }
}

/// 2x2 parameter matrix and iteration count of a stochastic Kronecker
/// graph; `iterations = k` yields `2^k` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KroneckerSeed {
    p: [[f64; 2]; 2],
    iterations: u32,
}

impl KroneckerSeed {
    pub fn new(p: [[f64; 2]; 2], iterations: u32) -> Result<Self, SynthError> {
        for row in &p {
            for &entry in row {
                if !(0.0..=1.0).contains(&entry) {
                    return Err(SynthError::InvalidSeedEntry(entry));
                }
            }
        }
        if iterations == 0 {
            return Err(SynthError::NoIterations);
        }
        Ok(Self { p, iterations })
    }

    pub fn random(iterations: u32) -> Result<Self, SynthError> {
        Self::new([[0.5, 0.5], [0.5, 0.5]], iterations)
    }

    pub fn hierarchical(iterations: u32) -> Result<Self, SynthError> {
        Self::new([[0.9, 0.1], [0.1, 0.9]], iterations)
    }

    pub fn core_periphery(iterations: u32) -> Result<Self, SynthError> {
        Self::new([[0.9, 0.5], [0.5, 0.3]], iterations)
    }

    /// Preset seed for a named Kronecker topology at `nodes = 2^k`.
    pub fn preset(topology: Topology, nodes: usize) -> Result<Self, SynthError> {
        if !nodes.is_power_of_two() || nodes < 2 {
            return Err(SynthError::NotPowerOfTwo(nodes));
        }
        let k = nodes.trailing_zeros();
        match topology {
            Topology::KroneckerRandom => Self::random(k),
            Topology::KroneckerHierarchical => Self::hierarchical(k),
            Topology::KroneckerCore => Self::core_periphery(k),
            Topology::ForestFire => Err(SynthError::NotPowerOfTwo(nodes)),
        }
    }

    pub fn iterations(&self) -> u32 {
        self.iterations
    }

    pub fn node_count(&self) -> usize {
        1usize << self.iterations
    }

    /// Entry `(u, v)` of the k-fold Kronecker power of the seed: the
    /// product of seed entries indexed by the bit digits of `u` and `v`.
    pub fn pair_probability(&self, u: usize, v: usize) -> f64 {
        let mut prob = 1.0;
        for bit in 0..self.iterations {
            let ub = (u >> bit) & 1;
            let vb = (v >> bit) & 1;
            prob *= self.p[ub][vb];
        }
        prob
    }

    /// Total probability mass over ordered non-diagonal pairs:
    /// `(sum of entries)^k - (p00 + p11)^k`.
    fn off_diagonal_mass(&self) -> f64 {
        let total: f64 = self.p.iter().flatten().sum();
        let diagonal = self.p[0][0] + self.p[1][1];
        total.powi(self.iterations as i32) - diagonal.powi(self.iterations as i32)
    }
}

/// Sample a directed edge set from a stochastic Kronecker graph. Each
/// ordered pair `(u, v)` with `u != v` is included independently with
/// probability `min(1, s * P_k[u, v])`, where `s` scales the off-diagonal
/// mass so that the expected edge count equals `target_edges`. One uniform
/// is drawn per ordered pair in row-major order, so the output depends
/// only on the seed and the RNG state.
pub fn kronecker_graph(
    seed: &KroneckerSeed,
    target_edges: usize,
    rng: &mut impl Rng,
) -> Result<Vec<(usize, usize)>, SynthError> {
    let n = seed.node_count();
    let max_pairs = n * (n - 1);
    if target_edges > max_pairs {
        return Err(SynthError::InfeasibleEdgeTarget {
            target: target_edges,
            max: max_pairs,
        });
    }
    let mass = seed.off_diagonal_mass();
    if target_edges > 0 && mass <= 0.0 {
        return Err(SynthError::ZeroMass);
    }
    let scale = if target_edges == 0 {
        0.0
    } else {
        target_edges as f64 / mass
    };

    let mut edges = Vec::with_capacity(target_edges + target_edges / 4);
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let p = (scale * seed.pair_probability(u, v)).min(1.0);
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Ok(edges)
}

/// Number of failures before the first success of a Bernoulli process with
/// failure probability `p`; mean `p / (1 - p)`. Draws nothing at `p = 0`.
fn geometric(p: f64, rng: &mut impl Rng) -> usize {
    if p <= 0.0 {
        return 0;
    }
    let u = 1.0 - rng.gen::<f64>();
    let k = (u.ln() / p.ln()).floor();
    if k.is_finite() && k >= 0.0 {
        k as usize
    } else {
        0
    }
}

/// Grow a directed Forest Fire graph on `n` nodes. Every arrival links to
/// a uniform ambassador and then burns outward: at each burned node the
/// fire follows a geometric number of out-links (mean
/// `p_forward / (1 - p_forward)`) and in-links (mean
/// `p_backward / (1 - p_backward)`), chosen uniformly without replacement,
/// and the arrival links to everything burned. Each burn visits a node at
/// most once - a followed link whose endpoint already burned is spent - so
/// there are no duplicate edges.
pub fn forest_fire_graph(
    n: usize,
    p_forward: f64,
    p_backward: f64,
    rng: &mut impl Rng,
) -> Result<Vec<(usize, usize)>, SynthError> {
    if n < 2 {
        return Err(SynthError::TooFewNodes(n));
    }
    for p in [p_forward, p_backward] {
        if !(0.0..1.0).contains(&p) {
            return Err(SynthError::InvalidBurnProbability(p));
        }
    }

    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut inc: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut edges = Vec::new();
    let mut visited = vec![usize::MAX; n]; // arrival stamp of the last burn that saw the node

    for v in 1..n {
        let ambassador = rng.gen_range(0..v);
        visited[ambassador] = v;
        let mut burned = vec![ambassador];
        let mut queue = VecDeque::from([ambassador]);

        while let Some(w) = queue.pop_front() {
            let forward = geometric(p_forward, rng);
            let backward = geometric(p_backward, rng);
            for (quota, links) in [(forward, &out[w]), (backward, &inc[w])] {
                let mut pool = links.clone();
                for _ in 0..quota {
                    if pool.is_empty() {
                        break;
                    }
                    let u = pool.swap_remove(rng.gen_range(0..pool.len()));
                    if visited[u] == v {
                        continue;
                    }
                    visited[u] = v;
                    burned.push(u);
                    queue.push_back(u);
                }
            }
        }

        for &u in &burned {
            edges.push((v, u));
            out[v].push(u);
            inc[u].push(v);
        }
    }
    Ok(edges)
}

/// Inclusive range of uniform transmission rates; the lower bound is
/// strictly positive because a zero rate means no edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRange {
    lo: f64,
    hi: f64,
}

impl RateRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self, SynthError> {
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(SynthError::InvalidRateRange { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// Default range per transmission family: `[0.01, 1]` for exponential
    /// and Rayleigh, `[0.01, 2]` for the power law.
    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Exponential | ModelKind::Rayleigh => Self { lo: 0.01, hi: 1.0 },
            ModelKind::PowerLaw => Self { lo: 0.01, hi: 2.0 },
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }
}

/// Attach independent uniform rates to an edge set, drawing in the given
/// edge order.
pub fn assign_rates(
    n: usize,
    edges: &[(usize, usize)],
    range: RateRange,
    rng: &mut impl Rng,
) -> Result<Network, DataError> {
    let mut net = Network::new(n);
    for &(src, dst) in edges {
        net.add_edge(src, dst, rng.gen_range(range.lo..=range.hi))?;
    }
    Ok(net)
}

/// Generate a named topology with `nodes` nodes. Kronecker topologies
/// scale toward `target_edges`; Forest Fire ignores the target and grows
/// by burning with the given probabilities.
pub fn generate_topology(
    topology: Topology,
    nodes: usize,
    target_edges: usize,
    p_forward: f64,
    p_backward: f64,
    rng: &mut impl Rng,
) -> Result<Vec<(usize, usize)>, SynthError> {
    match topology {
        Topology::ForestFire => forest_fire_graph(nodes, p_forward, p_backward, rng),
        _ => kronecker_graph(&KroneckerSeed::preset(topology, nodes)?, target_edges, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pair_probability_of_hierarchical_seed() {
        let seed = KroneckerSeed::hierarchical(2).unwrap();
        // nodes 0 = (0,0) and 3 = (1,1) differ in both bit positions
        assert!((seed.pair_probability(0, 3) - 0.01).abs() < 1e-15);
        assert!((seed.pair_probability(0, 0) - 0.81).abs() < 1e-15);
        assert!((seed.pair_probability(1, 2) - 0.01).abs() < 1e-15);
    }

    #[test]
    fn saturated_seed_yields_every_pair() {
        let seed = KroneckerSeed::new([[1.0, 1.0], [1.0, 1.0]], 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let edges = kronecker_graph(&seed, 2, &mut rng).unwrap();
        assert_eq!(edges, vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn kronecker_edge_count_near_target() {
        let seed = KroneckerSeed::random(10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let edges = kronecker_graph(&seed, 2048, &mut rng).unwrap();
        assert_eq!(seed.node_count(), 1024);
        assert!(
            (1900..=2200).contains(&edges.len()),
            "got {} edges",
            edges.len()
        );
    }

    #[test]
    fn kronecker_expected_count_matches_target() {
        let seed = KroneckerSeed::hierarchical(7).unwrap();
        let target = 256;
        let mut total = 0usize;
        for s in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            total += kronecker_graph(&seed, target, &mut rng).unwrap().len();
        }
        let mean = total as f64 / 20.0;
        assert!(
            (mean - target as f64).abs() <= 0.1 * target as f64,
            "mean edge count {mean} vs target {target}"
        );
    }

    #[test]
    fn kronecker_rejects_infeasible_targets() {
        let seed = KroneckerSeed::random(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            kronecker_graph(&seed, 13, &mut rng),
            Err(SynthError::InfeasibleEdgeTarget { max: 12, .. })
        ));
        let zero = KroneckerSeed::new([[0.0, 0.0], [0.0, 0.0]], 2).unwrap();
        assert!(matches!(
            kronecker_graph(&zero, 1, &mut rng),
            Err(SynthError::ZeroMass)
        ));
    }

    #[test]
    fn forest_fire_two_nodes_is_single_edge() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let edges = forest_fire_graph(2, 0.35, 0.32, &mut rng).unwrap();
        assert_eq!(edges, vec![(1, 0)]);
    }

    #[test]
    fn forest_fire_without_burning_is_a_tree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let edges = forest_fire_graph(50, 0.0, 0.0, &mut rng).unwrap();
        assert_eq!(edges.len(), 49);
    }

    #[test]
    fn forest_fire_default_density() {
        let mut total = 0usize;
        for s in 0..3 {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let edges =
                forest_fire_graph(1024, DEFAULT_P_FORWARD, DEFAULT_P_BACKWARD, &mut rng).unwrap();
            total += edges.len();
        }
        let density = total as f64 / 3.0 / 1024.0;
        assert!(
            (1.9..=2.9).contains(&density),
            "edges per node {density} outside 2.4 +- 0.5"
        );
    }

    #[test]
    fn forest_fire_rejects_bad_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            forest_fire_graph(1, 0.3, 0.3, &mut rng),
            Err(SynthError::TooFewNodes(1))
        ));
        assert!(matches!(
            forest_fire_graph(10, 1.0, 0.3, &mut rng),
            Err(SynthError::InvalidBurnProbability(_))
        ));
    }

    #[test]
    fn generators_have_no_self_loops_or_duplicates() {
        for s in 0..5u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let kron =
                kronecker_graph(&KroneckerSeed::core_periphery(6).unwrap(), 128, &mut rng).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let ff = forest_fire_graph(64, 0.35, 0.32, &mut rng).unwrap();
            for edges in [kron, ff] {
                let mut seen = std::collections::BTreeSet::new();
                for (u, v) in edges {
                    assert_ne!(u, v);
                    assert!(seen.insert((u, v)), "duplicate edge ({u}, {v})");
                }
            }
        }
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let run = |s: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let edges = generate_topology(
                Topology::KroneckerHierarchical,
                128,
                256,
                0.35,
                0.32,
                &mut rng,
            )
            .unwrap();
            assign_rates(128, &edges, RateRange::new(0.01, 1.0).unwrap(), &mut rng).unwrap()
        };
        let a = run(9);
        let b = run(9);
        assert_eq!(
            crate::data::network_to_string(&a),
            crate::data::network_to_string(&b)
        );
        let c = run(10);
        assert_ne!(
            crate::data::network_to_string(&a),
            crate::data::network_to_string(&c)
        );
    }

    #[test]
    fn assigned_rates_are_uniform_in_range() {
        let seed = KroneckerSeed::random(10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let edges = kronecker_graph(&seed, 2048, &mut rng).unwrap();
        let range = RateRange::new(0.01, 1.0).unwrap();
        let net = assign_rates(1024, &edges, range, &mut rng).unwrap();
        let rates: Vec<f64> = net.edges().map(|(_, _, r)| r).collect();
        assert_eq!(rates.len(), edges.len());
        assert!(rates.iter().all(|&r| (0.01..=1.0).contains(&r)));
        let mean = rates.iter().sum::<f64>() / rates.len() as f64;
        // three sigma of a uniform mean over ~2k draws
        let sigma = (0.99 / 12f64.sqrt()) / (rates.len() as f64).sqrt();
        assert!((mean - 0.505).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn degenerate_and_empty_rate_assignment() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let empty = assign_rates(4, &[], RateRange::new(0.01, 1.0).unwrap(), &mut rng).unwrap();
        assert_eq!(empty.edge_count(), 0);

        let eps = 1e-12;
        let tight = RateRange::new(0.5, 0.5 + eps).unwrap();
        let net = assign_rates(3, &[(0, 1), (1, 2)], tight, &mut rng).unwrap();
        for (_, _, r) in net.edges() {
            assert!((r - 0.5).abs() <= eps);
        }
    }

    #[test]
    fn rate_range_validation() {
        assert!(RateRange::new(0.0, 1.0).is_err());
        assert!(RateRange::new(0.5, 0.5).is_err());
        assert!(RateRange::new(0.5, 0.2).is_err());
        assert!(RateRange::new(0.01, f64::INFINITY).is_err());
    }

    #[test]
    fn topology_strings_round_trip() {
        for t in [
            Topology::KroneckerRandom,
            Topology::KroneckerHierarchical,
            Topology::KroneckerCore,
            Topology::ForestFire,
        ] {
            assert_eq!(t.as_str().parse::<Topology>().unwrap(), t);
        }
        assert!("smallworld".parse::<Topology>().is_err());
    }
}
