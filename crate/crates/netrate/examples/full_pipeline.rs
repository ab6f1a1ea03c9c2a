//! The whole pipeline through the file formats, like the CLI does it:
//! write a network, simulate cascades to disk, read them back, infer,
//! write the result, evaluate.
//!
//! ```bash
//! cargo run --release --example full_pipeline
//! ```

use netrate::data::{read_cascades, read_network, write_cascades, write_network};
use netrate::metrics::evaluate;
use netrate::model::{ModelKind, TransmissionModel};
use netrate::sim::{generate_cascades, SimConfig};
use netrate::solver::{infer_network, SolverOptions};
use netrate::synth::{assign_rates, generate_topology, RateRange, Topology};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> anyhow::Result<()> {
    let dir = std::env::temp_dir().join("netrate-full-pipeline");
    std::fs::create_dir_all(&dir)?;
    let model = TransmissionModel::exponential();

    // 1. ground truth
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let edges = generate_topology(
        Topology::KroneckerHierarchical,
        64,
        128,
        0.35,
        0.32,
        &mut rng,
    )?;
    let truth = assign_rates(
        64,
        &edges,
        RateRange::default_for(ModelKind::Exponential),
        &mut rng,
    )?;
    let truth_path = dir.join("net.txt");
    write_network(&truth, &truth_path)?;
    println!(
        "wrote {} ({} edges)",
        truth_path.display(),
        truth.edge_count()
    );

    // 2. cascades
    let cfg = SimConfig::new(model, 10.0, 1000)?;
    let cascades = generate_cascades(&truth, &cfg, 2)?;
    let cascade_path = dir.join("cascades.txt");
    write_cascades(&cascades, &cascade_path)?;
    println!(
        "wrote {} ({} cascades)",
        cascade_path.display(),
        cascades.cascade_count()
    );

    // 3. inference from the files alone
    let observed = read_cascades(&cascade_path)?;
    let result = infer_network(&observed, model, &SolverOptions::default())?;
    let inferred_path = dir.join("inferred.txt");
    write_network(&result.network, &inferred_path)?;
    println!(
        "wrote {} ({} edges)",
        inferred_path.display(),
        result.network.edge_count()
    );

    // 4. evaluation
    let report = evaluate(&read_network(&truth_path)?, &read_network(&inferred_path)?)?;
    println!(
        "\nprecision {:.4}  recall {:.4}  accuracy {:.4}  normalized MAE {:.4}",
        report.precision, report.recall, report.accuracy, report.normalized_mae
    );
    Ok(())
}
