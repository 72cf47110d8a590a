//! Centralized numerical tolerances.

use serde::{Deserialize, Serialize};

/// Tolerance constants shared by the identity checks and region queries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Exact-summation identities on finite-alphabet channels.
    pub discrete: f64,
    /// Quadrature-based identities on Gaussian channels.
    pub quadrature: f64,
    /// Slack for region membership and containment queries.
    pub containment: f64,
    /// Pushforward check for layer splits (p' reproduces p).
    pub pushforward: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            discrete: 1e-12,
            quadrature: 1e-6,
            containment: 1e-9,
            pushforward: 1e-9,
        }
    }
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        discrete: 1e-12,
        quadrature: 1e-6,
        containment: 1e-9,
        pushforward: 1e-9,
    };
}
