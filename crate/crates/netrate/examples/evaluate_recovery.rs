//! Score network recovery at desk scale: a 64-node hierarchical Kronecker
//! graph, one batch of cascades, one inference run, one report.
//!
//! ```bash
//! cargo run --release --example evaluate_recovery
//! ```

use netrate::metrics::evaluate;
use netrate::model::ModelKind;
use netrate::model::TransmissionModel;
use netrate::sim::{generate_cascades, SimConfig};
use netrate::solver::{infer_network, SolverOptions};
use netrate::synth::{assign_rates, kronecker_graph, KroneckerSeed, RateRange};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let edges = kronecker_graph(&KroneckerSeed::hierarchical(6).unwrap(), 128, &mut rng).unwrap();
    let truth = assign_rates(
        64,
        &edges,
        RateRange::default_for(ModelKind::Exponential),
        &mut rng,
    )
    .unwrap();
    println!("truth: 64 nodes, {} edges", truth.edge_count());

    let model = TransmissionModel::exponential();
    let cfg = SimConfig::new(model, 10.0, 1500).unwrap();
    let cascades = generate_cascades(&truth, &cfg, 2).unwrap();
    println!(
        "simulated {} cascades at horizon {}",
        cascades.cascade_count(),
        cfg.horizon
    );

    let started = Instant::now();
    let result = infer_network(&cascades, model, &SolverOptions::default()).unwrap();
    println!(
        "inferred {} edges in {:.2?} ({} node problems)",
        result.network.edge_count(),
        started.elapsed(),
        result.diagnostics.len()
    );

    let report = evaluate(&truth, &result.network).unwrap();
    println!("\nprecision      {:.4}", report.precision);
    println!("recall         {:.4}", report.recall);
    println!("accuracy       {:.4}", report.accuracy);
    println!("normalized MAE {:.4}", report.normalized_mae);
    println!(
        "({} true, {} inferred, {} common)",
        report.true_edges, report.inferred_edges, report.common_edges
    );
}
