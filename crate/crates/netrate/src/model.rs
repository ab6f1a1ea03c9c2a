//! Pairwise transmission models: exponential, power-law and Rayleigh.
//!
//! Each family describes how quickly an infection travels along a single
//! directed edge. For an edge with rate `alpha` and elapsed time
//! `dt = t_i - t_j` the three quantities of interest are
//!
//! ```text
//!              density f                log survival            hazard f/S
//! exp    alpha * e^(-alpha*dt)          -alpha*dt               alpha
//! pow    (alpha/d) * (dt/d)^(-1-alpha)  -alpha*ln(dt/d)         alpha/dt
//! ray    alpha * dt * e^(-alpha*dt²/2)  -alpha*dt²/2            alpha*dt
//! ```
//!
//! where `d` is the minimum delay of the power-law family (the density is
//! zero for `dt <= d`, so its survival is 1 there). The exponential and
//! Rayleigh densities are zero for `dt <= 0`. All three log-survival and
//! hazard functions are linear in `alpha`, which is what makes the cascade
//! likelihood convex in the rates.

use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Default minimum delay of the power-law family.
pub const DEFAULT_POWER_LAW_DELAY: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("unknown transmission model `{0}` (expected exp, pow or ray)")]
    UnknownModel(String),
    #[error("power-law minimum delay must be positive and finite, got {0}")]
    InvalidDelta(f64),
    #[error("transmission rate must be nonnegative, got {0}")]
    NegativeRate(f64),
    #[error("transmission rate must be strictly positive, got {0}")]
    NonPositiveRate(f64),
    #[error("survival is queried only forward in time: t_j={t_j} > t_i={t_i}")]
    NonCausal { t_j: f64, t_i: f64 },
    #[error("hazard undefined at elapsed time {dt}; support starts after {min_dt}")]
    OutsideSupport { dt: f64, min_dt: f64 },
    #[error("uniform draw must lie in (0, 1], got {0}")]
    InvalidUniform(f64),
}

/// The parametric family of a pairwise transmission likelihood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Exponential,
    PowerLaw,
    Rayleigh,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Exponential => "exp",
            ModelKind::PowerLaw => "pow",
            ModelKind::Rayleigh => "ray",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, ModelError> {
        match s.to_ascii_lowercase().as_str() {
            "exp" => Ok(ModelKind::Exponential),
            "pow" => Ok(ModelKind::PowerLaw),
            "ray" => Ok(ModelKind::Rayleigh),
            other => Err(ModelError::UnknownModel(other.to_string())),
        }
    }
}

/// A transmission model: the family plus the minimum delay `delta` of the
/// power-law branch. `delta` is carried for every kind but ignored by the
/// exponential and Rayleigh evaluations; it is a fixed model constant, not
/// an inferred parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionModel {
    kind: ModelKind,
    delta: f64,
}

impl TransmissionModel {
    pub fn new(kind: ModelKind, delta: f64) -> Result<Self, ModelError> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(ModelError::InvalidDelta(delta));
        }
        Ok(Self { kind, delta })
    }

    pub fn exponential() -> Self {
        Self {
            kind: ModelKind::Exponential,
            delta: DEFAULT_POWER_LAW_DELAY,
        }
    }

    pub fn power_law(delta: f64) -> Result<Self, ModelError> {
        Self::new(ModelKind::PowerLaw, delta)
    }

    pub fn rayleigh() -> Self {
        Self {
            kind: ModelKind::Rayleigh,
            delta: DEFAULT_POWER_LAW_DELAY,
        }
    }

    /// Model of the given kind with the default `delta = 1`.
    pub fn from_kind(kind: ModelKind) -> Self {
        Self {
            kind,
            delta: DEFAULT_POWER_LAW_DELAY,
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Log transmission density `ln f(t_i | t_j; alpha)`.
    ///
    /// Returns `f64::NEG_INFINITY` (the zero-density signal) whenever the
    /// observation lies outside the support: `t_i <= t_j` (power law:
    /// `t_i <= t_j + delta`) or `alpha = 0`. The signal is never a finite
    /// stand-in, so an unbounded objective stays detectable.
    pub fn log_pdf(&self, alpha: f64, t_j: f64, t_i: f64) -> f64 {
        if alpha <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let dt = t_i - t_j;
        match self.kind {
            ModelKind::Exponential => {
                if dt <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    alpha.ln() - alpha * dt
                }
            }
            ModelKind::PowerLaw => {
                if dt <= self.delta {
                    f64::NEG_INFINITY
                } else {
                    (alpha / self.delta).ln() - (1.0 + alpha) * (dt / self.delta).ln()
                }
            }
            ModelKind::Rayleigh => {
                if dt <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    alpha.ln() + dt.ln() - alpha * dt * dt / 2.0
                }
            }
        }
    }

    /// Log survival `ln S(t_i | t_j; alpha)`: the log-probability that the
    /// edge has not fired by `t_i`. Always `<= 0`, exactly `0` at
    /// `alpha = 0`, and linear in `alpha`.
    pub fn log_survival(&self, alpha: f64, t_j: f64, t_i: f64) -> Result<f64, ModelError> {
        if alpha < 0.0 {
            return Err(ModelError::NegativeRate(alpha));
        }
        if t_i < t_j {
            return Err(ModelError::NonCausal { t_j, t_i });
        }
        Ok(-alpha * self.survival_weight(t_i - t_j))
    }

    /// Instantaneous transmission rate `H(t_i | t_j; alpha) = f/S`.
    /// Linear in `alpha`: exactly `alpha * hazard_coefficient(t_j, t_i)`.
    pub fn hazard(&self, alpha: f64, t_j: f64, t_i: f64) -> Result<f64, ModelError> {
        if alpha < 0.0 {
            return Err(ModelError::NegativeRate(alpha));
        }
        Ok(alpha * self.hazard_coefficient(t_j, t_i)?)
    }

    /// The factor `c` with `H = alpha * c`: 1 (exp), `1/dt` (pow),
    /// `dt` (ray).
    pub fn hazard_coefficient(&self, t_j: f64, t_i: f64) -> Result<f64, ModelError> {
        let dt = t_i - t_j;
        let min_dt = self.support_start();
        if dt <= min_dt {
            return Err(ModelError::OutsideSupport { dt, min_dt });
        }
        Ok(self.hazard_coefficient_unchecked(dt))
    }

    /// Start of the density support in elapsed time: `delta` for the power
    /// law, 0 otherwise.
    pub fn support_start(&self) -> f64 {
        match self.kind {
            ModelKind::PowerLaw => self.delta,
            _ => 0.0,
        }
    }

    /// Inverse-survival sampling: the delay `d` with `S(d) = u`.
    /// Deterministic given `u in (0, 1]`.
    pub fn sample_delay(&self, alpha: f64, u: f64) -> Result<f64, ModelError> {
        if alpha <= 0.0 {
            return Err(ModelError::NonPositiveRate(alpha));
        }
        if !(u > 0.0 && u <= 1.0) {
            return Err(ModelError::InvalidUniform(u));
        }
        Ok(match self.kind {
            ModelKind::Exponential => -u.ln() / alpha,
            ModelKind::PowerLaw => self.delta * u.powf(-1.0 / alpha),
            ModelKind::Rayleigh => (-2.0 * u.ln() / alpha).sqrt(),
        })
    }

    /// `-log S(t_j + dt | t_j) / alpha`, the per-unit-rate survival penalty:
    /// `dt` (exp), `max(ln(dt/delta), 0)` (pow), `dt²/2` (ray). Defined for
    /// any `dt >= 0` and used by the likelihood's linear terms.
    pub(crate) fn survival_weight(&self, dt: f64) -> f64 {
        match self.kind {
            ModelKind::Exponential => dt,
            ModelKind::PowerLaw => {
                if dt > self.delta {
                    (dt / self.delta).ln()
                } else {
                    0.0
                }
            }
            ModelKind::Rayleigh => dt * dt / 2.0,
        }
    }

    /// Hazard coefficient extended by zero outside the density support.
    /// The hazard credits in the likelihood sum over all time-ordered
    /// pairs; pairs outside the support contribute nothing.
    pub(crate) fn hazard_coefficient_or_zero(&self, dt: f64) -> f64 {
        if dt <= self.support_start() {
            0.0
        } else {
            self.hazard_coefficient_unchecked(dt)
        }
    }

    fn hazard_coefficient_unchecked(&self, dt: f64) -> f64 {
        match self.kind {
            ModelKind::Exponential => 1.0,
            ModelKind::PowerLaw => 1.0 / dt,
            ModelKind::Rayleigh => dt,
        }
    }
}
