//! The cascade log-likelihood, its per-target-node decomposition, and
//! analytic gradients in the rates.
//!
//! For one cascade with horizon `T` the log-likelihood splits into three
//! sums over the rate matrix `A`:
//!
//! * a survival penalty from every infected node toward every node that
//!   stayed uninfected through `T`,
//! * a survival penalty between every time-ordered pair of infected
//!   nodes, and
//! * a hazard credit `ln(sum of hazards from earlier nodes)` for each
//!   infection.
//!
//! The first two are nonpositive and linear in each rate; the third is a
//! concave log of a linear form. The negative total is therefore convex,
//! and it depends only on time differences, never on absolute times.
//!
//! Infected nodes with no strictly earlier infection (the root, and any
//! node tied with it at the minimum time) take no hazard credit: they are
//! seeds, not propagation, so they carry no term. An infected node that
//! does have earlier infections but zero total hazard makes the observed
//! data impossible; that surfaces as the [`ZeroDensity`] signal rather
//! than a silently finite value.
//!
//! Because a rate `alpha[j][i]` only enters terms whose target is `i`,
//! the total splits into one independent problem per target node - the
//! [`NodeProblem`] - whose variables are the candidate parents of `i`
//! under the precedence index.

use crate::data::{Cascade, CascadeSet, DataError, Network};
use crate::model::TransmissionModel;
use std::fmt;

/// Total hazard mass below this is treated as an impossible observation.
pub const HAZARD_UNDERFLOW: f64 = 1e-300;

/// Signal that an infected node has zero total transmission hazard from
/// its predecessors, i.e. the observed data has zero density and the
/// log-likelihood is negatively unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroDensity {
    pub node: usize,
    pub cascade: Option<usize>,
}

impl fmt::Display for ZeroDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.cascade {
            Some(c) => write!(
                f,
                "infected node {} in cascade {} has zero total transmission hazard",
                self.node, c
            ),
            None => write!(
                f,
                "infected node {} has zero total transmission hazard",
                self.node
            ),
        }
    }
}

impl std::error::Error for ZeroDensity {}

#[derive(Debug, thiserror::Error)]
pub enum LikelihoodError {
    #[error(transparent)]
    ZeroDensity(#[from] ZeroDensity),
    #[error("rate vector has {got} entries but the problem has {expected} candidate parents")]
    LengthMismatch { expected: usize, got: usize },
    #[error("rate {rate} at position {index} is negative")]
    NegativeRate { index: usize, rate: f64 },
    #[error(transparent)]
    Data(#[from] DataError),
}

// ---------------------------------------------------------------------------
// Whole-cascade evaluation
// ---------------------------------------------------------------------------

/// Log survival of every uninfected node against every infected node:
/// `sum over infected i, uninfected m of ln S(T | t_i; alpha[i][m])`.
/// Nonpositive; zero when nothing stayed uninfected or all rates vanish.
pub fn uninfected_survival_term(c: &Cascade, net: &Network, model: TransmissionModel) -> f64 {
    let horizon = c.horizon();
    let mut total = 0.0;
    for (i, t_i) in c.infected() {
        for &(m, rate) in net.outgoing(i) {
            if !c.is_infected(m) {
                total -= rate * model.survival_weight(horizon - t_i);
            }
        }
    }
    total
}

/// Log survival between time-ordered infected pairs:
/// `sum over infected i and j with t_j < t_i of ln S(t_i | t_j; alpha[j][i])`.
pub fn infected_survival_term(c: &Cascade, net: &Network, model: TransmissionModel) -> f64 {
    let mut total = 0.0;
    for (j, i, rate) in net.edges() {
        let (t_j, t_i) = (c.time(j), c.time(i));
        if t_i.is_finite() && t_j < t_i {
            total -= rate * model.survival_weight(t_i - t_j);
        }
    }
    total
}

/// Hazard credit for each infection:
/// `sum over infected i with a strict predecessor of
/// ln(sum over j with t_j < t_i of H(t_i | t_j; alpha[j][i]))`.
/// Nodes without a strict predecessor (roots and co-roots tied at the
/// minimum time) are excluded from the outer sum.
pub fn hazard_credit_term(
    c: &Cascade,
    net: &Network,
    model: TransmissionModel,
) -> Result<f64, ZeroDensity> {
    let root_time = c.root_time();
    let mut total = 0.0;
    for (i, t_i) in c.infected() {
        if t_i <= root_time {
            continue;
        }
        let mut hazard_sum = 0.0;
        for &(j, rate) in net.incoming(i) {
            let t_j = c.time(j);
            if t_j < t_i {
                hazard_sum += rate * model.hazard_coefficient_or_zero(t_i - t_j);
            }
        }
        if hazard_sum < HAZARD_UNDERFLOW {
            return Err(ZeroDensity {
                node: i,
                cascade: None,
            });
        }
        total += hazard_sum.ln();
    }
    Ok(total)
}

/// Log-likelihood of one cascade: the sum of the three terms above.
pub fn cascade_log_likelihood(
    c: &Cascade,
    net: &Network,
    model: TransmissionModel,
) -> Result<f64, ZeroDensity> {
    Ok(uninfected_survival_term(c, net, model)
        + infected_survival_term(c, net, model)
        + hazard_credit_term(c, net, model)?)
}

/// Negative log-likelihood of a cascade set; the objective of network
/// inference. Zero on an empty set.
pub fn negative_log_likelihood(
    cs: &CascadeSet,
    net: &Network,
    model: TransmissionModel,
) -> Result<f64, ZeroDensity> {
    let mut total = 0.0;
    for (index, c) in cs.cascades().iter().enumerate() {
        total -= cascade_log_likelihood(c, net, model).map_err(|e| ZeroDensity {
            cascade: Some(index),
            ..e
        })?;
    }
    Ok(total)
}

/// Per-term totals over a cascade set, for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LikelihoodBreakdown {
    pub uninfected_survival: f64,
    pub infected_survival: f64,
    pub hazard_credit: f64,
}

impl LikelihoodBreakdown {
    pub fn log_likelihood(&self) -> f64 {
        self.uninfected_survival + self.infected_survival + self.hazard_credit
    }
}

pub fn breakdown(
    cs: &CascadeSet,
    net: &Network,
    model: TransmissionModel,
) -> Result<LikelihoodBreakdown, ZeroDensity> {
    let mut totals = LikelihoodBreakdown {
        uninfected_survival: 0.0,
        infected_survival: 0.0,
        hazard_credit: 0.0,
    };
    for (index, c) in cs.cascades().iter().enumerate() {
        totals.uninfected_survival += uninfected_survival_term(c, net, model);
        totals.infected_survival += infected_survival_term(c, net, model);
        totals.hazard_credit += hazard_credit_term(c, net, model).map_err(|e| ZeroDensity {
            cascade: Some(index),
            ..e
        })?;
    }
    Ok(totals)
}

// ---------------------------------------------------------------------------
// Per-node problems
// ---------------------------------------------------------------------------

/// One cascade in which the target was infected after at least one other
/// node: the time lags to each candidate parent infected strictly earlier.
#[derive(Debug, Clone, PartialEq)]
pub struct InfectedObservation {
    /// Index of the cascade inside the originating set.
    pub cascade: usize,
    /// `(candidate index, t_target - t_candidate)` for candidates infected
    /// strictly before the target; lags are positive.
    pub lags: Vec<(u32, f64)>,
}

/// The convex subproblem of a single target node: all likelihood terms
/// whose rate points at the target, expressed over its candidate parents.
///
/// The candidate list comes from the precedence index; pairs outside the
/// index never witness `t_j < t_i <= T`, so their optimal rate is zero
/// and they are not variables. Summing the node objectives over all
/// targets reproduces the full negative log-likelihood for any rate
/// matrix supported on the index.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeProblem {
    target: usize,
    candidates: Vec<usize>,
    infected: Vec<InfectedObservation>,
    /// Per candidate: `T - t_candidate` for every cascade in which the
    /// candidate was infected but the target was not. Each entry is a
    /// survival exposure the candidate's rate must pay for.
    exposures: Vec<Vec<f64>>,
}

impl NodeProblem {
    /// Build the subproblem of `target` with candidates taken from the
    /// cascade set's precedence index.
    pub fn build(cs: &CascadeSet, target: usize) -> Result<Self, DataError> {
        Self::with_candidates(cs, target, cs.candidate_parents(target))
    }

    /// Build the subproblem over an explicit candidate set. Candidates
    /// outside the precedence index only add zero-optimal variables; see
    /// [`crate::solver::prune`].
    pub fn with_candidates(
        cs: &CascadeSet,
        target: usize,
        mut candidates: Vec<usize>,
    ) -> Result<Self, DataError> {
        let n = cs.node_count();
        if target >= n {
            return Err(DataError::NodeOutOfRange { node: target, n });
        }
        candidates.sort_unstable();
        candidates.dedup();
        for &j in &candidates {
            if j >= n {
                return Err(DataError::NodeOutOfRange { node: j, n });
            }
            if j == target {
                return Err(DataError::SelfLoop { node: j });
            }
        }

        let mut index_of = vec![u32::MAX; n];
        for (idx, &j) in candidates.iter().enumerate() {
            index_of[j] = idx as u32;
        }

        let mut infected = Vec::new();
        let mut exposures = vec![Vec::new(); candidates.len()];
        for (cascade_index, c) in cs.cascades().iter().enumerate() {
            let t_target = c.time(target);
            if t_target.is_finite() {
                if t_target <= c.root_time() {
                    continue; // seed infection: no propagation terms
                }
                let mut lags = Vec::new();
                for &j in &candidates {
                    let t_j = c.time(j);
                    if t_j < t_target {
                        lags.push((index_of[j], t_target - t_j));
                    }
                }
                infected.push(InfectedObservation {
                    cascade: cascade_index,
                    lags,
                });
            } else {
                let horizon = c.horizon();
                for &j in &candidates {
                    let t_j = c.time(j);
                    if t_j.is_finite() {
                        exposures[index_of[j] as usize].push(horizon - t_j);
                    }
                }
            }
        }
        Ok(Self {
            target,
            candidates,
            infected,
            exposures,
        })
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn candidates(&self) -> &[usize] {
        &self.candidates
    }

    pub fn infected_observations(&self) -> &[InfectedObservation] {
        &self.infected
    }

    pub fn exposures(&self) -> &[Vec<f64>] {
        &self.exposures
    }

    /// Drop candidates never infected strictly before the target in any
    /// cascade where the target was infected, re-indexing observations.
    /// Such variables only appear in nonpositive survival terms, so their
    /// optimum is exactly zero and removal preserves the optimal value
    /// over the remaining variables. Problems built from the precedence
    /// index are already pruned.
    pub fn pruned(&self) -> NodeProblem {
        let mut witnessed = vec![false; self.candidates.len()];
        for obs in &self.infected {
            for &(idx, _) in &obs.lags {
                witnessed[idx as usize] = true;
            }
        }
        if witnessed.iter().all(|&w| w) {
            return self.clone();
        }
        let mut remap = vec![u32::MAX; self.candidates.len()];
        let mut candidates = Vec::new();
        let mut exposures = Vec::new();
        for (old, &keep) in witnessed.iter().enumerate() {
            if keep {
                remap[old] = candidates.len() as u32;
                candidates.push(self.candidates[old]);
                exposures.push(self.exposures[old].clone());
            }
        }
        let infected = self
            .infected
            .iter()
            .map(|obs| InfectedObservation {
                cascade: obs.cascade,
                lags: obs
                    .lags
                    .iter()
                    .map(|&(idx, lag)| (remap[idx as usize], lag))
                    .collect(),
            })
            .collect();
        NodeProblem {
            target: self.target,
            candidates,
            infected,
            exposures,
        }
    }

    /// Bake the model into evaluation-ready coefficients.
    pub(crate) fn compile(&self, model: TransmissionModel) -> CompiledNodeProblem {
        let mut linear = vec![0.0; self.candidates.len()];
        for (idx, exposure) in self.exposures.iter().enumerate() {
            for &dt in exposure {
                linear[idx] += model.survival_weight(dt);
            }
        }
        let rows = self
            .infected
            .iter()
            .map(|obs| {
                let mut terms = Vec::with_capacity(obs.lags.len());
                for &(idx, lag) in &obs.lags {
                    linear[idx as usize] += model.survival_weight(lag);
                    let coeff = model.hazard_coefficient_or_zero(lag);
                    if coeff > 0.0 {
                        terms.push((idx, coeff));
                    }
                }
                HazardRow {
                    cascade: obs.cascade,
                    terms,
                }
            })
            .collect();
        CompiledNodeProblem {
            target: self.target,
            linear,
            rows,
        }
    }
}

pub(crate) struct HazardRow {
    pub(crate) cascade: usize,
    pub(crate) terms: Vec<(u32, f64)>,
}

/// A node problem with the model applied: the objective is
/// `sum_j x_j * linear_j - sum_rows ln(sum_j x_j * h_j)`.
pub(crate) struct CompiledNodeProblem {
    target: usize,
    pub(crate) linear: Vec<f64>,
    pub(crate) rows: Vec<HazardRow>,
}

impl CompiledNodeProblem {
    pub(crate) fn dim(&self) -> usize {
        self.linear.len()
    }

    /// Variables that carry any coefficient at all. A variable with zero
    /// survival weight and no hazard term leaves the objective unchanged;
    /// the solver pins it at zero rather than report an arbitrary rate.
    pub(crate) fn active_mask(&self) -> Vec<bool> {
        let mut active: Vec<bool> = self.linear.iter().map(|&w| w > 0.0).collect();
        for row in &self.rows {
            for &(idx, _) in &row.terms {
                active[idx as usize] = true;
            }
        }
        active
    }

    pub(crate) fn objective(&self, x: &[f64]) -> Result<f64, ZeroDensity> {
        let mut value = 0.0;
        for (w, &xi) in self.linear.iter().zip(x) {
            value += w * xi;
        }
        for row in &self.rows {
            let mut hazard_sum = 0.0;
            for &(idx, coeff) in &row.terms {
                hazard_sum += coeff * x[idx as usize];
            }
            if hazard_sum < HAZARD_UNDERFLOW {
                return Err(ZeroDensity {
                    node: self.target,
                    cascade: Some(row.cascade),
                });
            }
            value -= hazard_sum.ln();
        }
        Ok(value)
    }

    pub(crate) fn gradient(&self, x: &[f64], grad: &mut [f64]) -> Result<(), ZeroDensity> {
        grad.copy_from_slice(&self.linear);
        for row in &self.rows {
            let mut hazard_sum = 0.0;
            for &(idx, coeff) in &row.terms {
                hazard_sum += coeff * x[idx as usize];
            }
            if hazard_sum < HAZARD_UNDERFLOW {
                return Err(ZeroDensity {
                    node: self.target,
                    cascade: Some(row.cascade),
                });
            }
            for &(idx, coeff) in &row.terms {
                grad[idx as usize] -= coeff / hazard_sum;
            }
        }
        Ok(())
    }
}

fn validate_rates(p: &NodeProblem, rates: &[f64]) -> Result<(), LikelihoodError> {
    if rates.len() != p.candidates().len() {
        return Err(LikelihoodError::LengthMismatch {
            expected: p.candidates().len(),
            got: rates.len(),
        });
    }
    for (index, &rate) in rates.iter().enumerate() {
        if rate < 0.0 {
            return Err(LikelihoodError::NegativeRate { index, rate });
        }
    }
    Ok(())
}

/// The target node's slice of the negative log-likelihood, evaluated at
/// the given candidate rates.
pub fn node_objective(
    p: &NodeProblem,
    rates: &[f64],
    model: TransmissionModel,
) -> Result<f64, LikelihoodError> {
    validate_rates(p, rates)?;
    Ok(p.compile(model).objective(rates)?)
}

/// Exact gradient of [`node_objective`] in the candidate rates: for each
/// candidate, the accumulated survival weight minus its share of each
/// cascade's hazard sum.
pub fn node_gradient(
    p: &NodeProblem,
    rates: &[f64],
    model: TransmissionModel,
) -> Result<Vec<f64>, LikelihoodError> {
    validate_rates(p, rates)?;
    let compiled = p.compile(model);
    let mut grad = vec![0.0; compiled.dim()];
    compiled.gradient(rates, &mut grad)?;
    Ok(grad)
}
