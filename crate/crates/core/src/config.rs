//! Default tolerances. Every report echoes the block it was produced with.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Agreement between eigenvalues computed by different routes.
    pub eigen: f64,
    /// Linear-algebra identities (shift covariance, form vs operator).
    pub identity: f64,
    /// Slack in `λ₀(total) ≥ λ₀(base)`.
    pub monotonicity: f64,
    /// Slack in the pushdown Rayleigh inequality.
    pub pushdown: f64,
    /// Norm preservation of lifts and pushdowns.
    pub norm: f64,
    /// Allowed `λ₀(cover) − λ₀(base)` for infinite amenable covers.
    pub tame_gap: f64,
    /// Resolution of the essential-spectrum estimator.
    pub estimator: f64,
    /// Window-doubling change that flags a truncation as too small.
    pub window: f64,
    /// Return-probability plateau margin below one.
    pub plateau: f64,
    /// Residual accepted for a ground state.
    pub residual: f64,
    /// Slack in comparisons against `λ₀` of a model space.
    pub model_space: f64,
    /// Margin by which `λ_ess` must exceed `λ₀` for the strict-gap hypothesis.
    pub hypothesis: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eigen: 1e-8,
            identity: 1e-10,
            monotonicity: 1e-9,
            pushdown: 1e-9,
            norm: 1e-12,
            tame_gap: 0.05,
            estimator: 0.005,
            window: 1e-3,
            plateau: 0.05,
            residual: 1e-8,
            model_space: 1e-9,
            hypothesis: 0.01,
        }
    }
}
