//! Comparing an inferred network against ground truth.
//!
//! Edge recovery is scored on supports: precision is the fraction of
//! inferred edges present in the truth, recall the fraction of true edges
//! recovered, and accuracy is
//!
//! ```text
//! 1 - |true xor inferred| / (|true| + |inferred|)
//! ```
//!
//! which is 1 exactly on identical supports and 0 when no edge is shared.
//! Rate recovery is scored by the normalized mean absolute error over
//! true edges, `mean(|rate* - rate|/rate*)`, where an edge missing from
//! the inferred network counts as rate zero and so contributes exactly 1.
//! False-positive edges carry no true rate and are left to the support
//! metrics.

use crate::data::Network;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("networks span {a} and {b} nodes; comparison needs a shared universe")]
    NodeCountMismatch { a: usize, b: usize },
    #[error("true network has no edges; normalized MAE is undefined")]
    EmptyTruth,
}

/// Support and rate comparison of one inference run.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
    pub normalized_mae: f64,
    pub true_edges: usize,
    pub inferred_edges: usize,
    pub common_edges: usize,
    /// Precision of an empty inferred network is 1 by convention only.
    pub precision_undefined: bool,
    /// Accuracy of two empty networks is 0 by convention only.
    pub accuracy_undefined: bool,
}

fn check_universe(truth: &Network, inferred: &Network) -> Result<(), MetricsError> {
    if truth.node_count() != inferred.node_count() {
        return Err(MetricsError::NodeCountMismatch {
            a: truth.node_count(),
            b: inferred.node_count(),
        });
    }
    Ok(())
}

fn common_edges(truth: &Network, inferred: &Network) -> usize {
    inferred
        .edges()
        .filter(|&(s, d, _)| truth.has_edge(s, d))
        .count()
}

/// Precision and recall of the inferred support. An empty inferred
/// network reports precision 1 (undefined, by convention) and recall 0.
pub fn precision_recall(truth: &Network, inferred: &Network) -> Result<(f64, f64), MetricsError> {
    check_universe(truth, inferred)?;
    let common = common_edges(truth, inferred);
    let precision = if inferred.edge_count() == 0 {
        1.0
    } else {
        common as f64 / inferred.edge_count() as f64
    };
    let recall = if truth.edge_count() == 0 {
        1.0
    } else {
        common as f64 / truth.edge_count() as f64
    };
    Ok((precision, recall))
}

/// `1 - |symmetric difference| / (|true| + |inferred|)`; two networks
/// with no edges at all score 0 (the denominator is empty).
pub fn accuracy(truth: &Network, inferred: &Network) -> Result<f64, MetricsError> {
    check_universe(truth, inferred)?;
    let total = truth.edge_count() + inferred.edge_count();
    if total == 0 {
        return Ok(0.0);
    }
    let common = common_edges(truth, inferred);
    let mismatched = total - 2 * common;
    Ok(1.0 - mismatched as f64 / total as f64)
}

/// Mean over true edges of `|rate* - rate| / rate*`, with missing edges
/// contributing 1. Unchanged by scaling all rates, true and inferred, by
/// a common factor.
pub fn normalized_mae(truth: &Network, inferred: &Network) -> Result<f64, MetricsError> {
    check_universe(truth, inferred)?;
    if truth.edge_count() == 0 {
        return Err(MetricsError::EmptyTruth);
    }
    let total: f64 = truth
        .edges()
        .map(|(s, d, rate)| (rate - inferred.rate(s, d)).abs() / rate)
        .sum();
    Ok(total / truth.edge_count() as f64)
}

/// All four metrics plus edge counts in one report.
pub fn evaluate(truth: &Network, inferred: &Network) -> Result<EvalReport, MetricsError> {
    let (precision, recall) = precision_recall(truth, inferred)?;
    Ok(EvalReport {
        precision,
        recall,
        accuracy: accuracy(truth, inferred)?,
        normalized_mae: normalized_mae(truth, inferred)?,
        true_edges: truth.edge_count(),
        inferred_edges: inferred.edge_count(),
        common_edges: common_edges(truth, inferred),
        precision_undefined: inferred.edge_count() == 0,
        accuracy_undefined: truth.edge_count() + inferred.edge_count() == 0,
    })
}
