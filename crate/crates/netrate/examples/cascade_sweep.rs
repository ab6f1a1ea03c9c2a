//! Sweep the number of observed cascades and watch rate estimates
//! sharpen; prints the rows as CSV.
//!
//! ```bash
//! cargo run --release --example cascade_sweep
//! ```

use netrate::model::{ModelKind, TransmissionModel};
use netrate::solver::SolverOptions;
use netrate::sweep::{run_sweep, SweepAxis, SweepBase, SweepSpec};
use netrate::synth::{RateRange, Topology, DEFAULT_P_BACKWARD, DEFAULT_P_FORWARD};

fn main() {
    let spec = SweepSpec {
        axis: SweepAxis::Cascades,
        values: vec![100.0, 400.0, 1600.0],
        repetitions: 2,
        base: SweepBase {
            topology: Topology::KroneckerHierarchical,
            model: TransmissionModel::exponential(),
            nodes: 32,
            edges: 64,
            horizon: 10.0,
            n_cascades: 0, // overridden by the swept axis
            min_infected: 2,
            rate_range: RateRange::default_for(ModelKind::Exponential),
            p_forward: DEFAULT_P_FORWARD,
            p_backward: DEFAULT_P_BACKWARD,
            seed: 7,
            solver: SolverOptions::default(),
        },
    };

    let rows = run_sweep(&spec).unwrap();
    println!("axis,value,repetition,precision,recall,accuracy,norm_mae,wall_time_seconds,error");
    for row in &rows {
        let (p, r, a, m) = row
            .report
            .as_ref()
            .map(|r| (r.precision, r.recall, r.accuracy, r.normalized_mae))
            .unwrap_or((f64::NAN, f64::NAN, f64::NAN, f64::NAN));
        println!(
            "{},{},{},{p:.4},{r:.4},{a:.4},{m:.4},{:.3},{}",
            row.axis,
            row.value,
            row.repetition,
            row.wall_time_seconds,
            row.error.as_deref().unwrap_or(""),
        );
    }
}
