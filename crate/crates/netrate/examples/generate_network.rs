//! Generate the built-in synthetic topologies and summarize their shape.
//!
//! ```bash
//! cargo run --example generate_network
//! ```

use netrate::model::ModelKind;
use netrate::synth::{
    assign_rates, forest_fire_graph, kronecker_graph, KroneckerSeed, RateRange, DEFAULT_P_BACKWARD,
    DEFAULT_P_FORWARD,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn summarize(name: &str, n: usize, edges: &[(usize, usize)]) {
    let mut out_degree = vec![0usize; n];
    for &(u, _) in edges {
        out_degree[u] += 1;
    }
    let max_out = out_degree.iter().max().copied().unwrap_or(0);
    println!(
        "{name:<24} {n:>5} nodes {:>6} edges  density {:.2}  max out-degree {max_out}",
        edges.len(),
        edges.len() as f64 / n as f64,
    );
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    for (name, seed) in [
        ("kronecker-random", KroneckerSeed::random(10).unwrap()),
        (
            "kronecker-hierarchical",
            KroneckerSeed::hierarchical(10).unwrap(),
        ),
        ("kronecker-core", KroneckerSeed::core_periphery(10).unwrap()),
    ] {
        let edges = kronecker_graph(&seed, 2048, &mut rng).unwrap();
        summarize(name, seed.node_count(), &edges);
    }

    let ff = forest_fire_graph(1024, DEFAULT_P_FORWARD, DEFAULT_P_BACKWARD, &mut rng).unwrap();
    summarize("forestfire", 1024, &ff);

    // rates turn an edge set into a ground-truth diffusion network
    let net = assign_rates(
        1024,
        &ff,
        RateRange::default_for(ModelKind::Exponential),
        &mut rng,
    )
    .unwrap();
    let rates: Vec<f64> = net.edges().map(|(_, _, r)| r).collect();
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    println!(
        "\nassigned uniform rates on the forest-fire edges: mean {mean:.3}, range [{:.3}, {:.3}]",
        rates.iter().cloned().fold(f64::INFINITY, f64::min),
        rates.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
}
