//! Greedy PGD solvers in the Lagrangian (displacement only) and Hamiltonian
//! (displacement and momentum) formulations.

pub mod hamiltonian;
pub mod lagrangian;
pub mod separated;

use std::fmt;
use std::str::FromStr;

use crate::error::PgdError;

pub use hamiltonian::{run_hpgd, HamiltonianState};
pub use lagrangian::{run_lpgd, TimeScheme};
pub use separated::SeparatedField;

/// Fixed-point and update settings shared by all PGD variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub j_max: usize,
    pub tolerance: f64,
    pub update: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            j_max: 20,
            tolerance: 1e-8,
            update: true,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> crate::Result<()> {
        if self.j_max == 0 {
            return Err(PgdError::invalid("j_max must be positive"));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(PgdError::invalid("tolerance must be positive and finite"));
        }
        Ok(())
    }
}

/// Fixed-point history of one enrichment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnrichmentLog {
    pub iterations: usize,
    /// Final stagnation of the displacement mode.
    pub stagnation: f64,
    /// Final stagnation of the momentum mode (Hamiltonian only).
    pub stagnation_p: Option<f64>,
    pub converged: bool,
    pub history: Vec<f64>,
    pub history_p: Vec<f64>,
    /// Iterations spent in the decoupled (half-size) branches.
    pub decoupled_iterations: usize,
    /// The new mode was numerically zero.
    pub zero: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Lagrangian PGD with Crank–Nicolson temporal solves.
    Lpgd1,
    /// Lagrangian PGD with Newmark temporal solves.
    Lpgd2,
    /// Hamiltonian PGD.
    Hpgd,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Lpgd1, Method::Lpgd2, Method::Hpgd];

    pub fn name(self) -> &'static str {
        match self {
            Method::Lpgd1 => "lpgd1",
            Method::Lpgd2 => "lpgd2",
            Method::Hpgd => "hpgd",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = PgdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lpgd1" | "l-pgd1" => Ok(Method::Lpgd1),
            "lpgd2" | "l-pgd2" => Ok(Method::Lpgd2),
            "hpgd" | "h-pgd" => Ok(Method::Hpgd),
            other => Err(PgdError::invalid(format!("unknown method `{other}`"))),
        }
    }
}

/// Zero-enrichment threshold relative to the current solution norm.
pub(crate) const ZERO_MODE_TOL: f64 = 1e-14;

/// `λ₀ⁿ = tⁿ/T`, `ω₀ⁿ = 1/T` with `ω₀⁰ = 0`.
pub(crate) fn initial_temporal_guess(nodes: usize, horizon: f64) -> (Vec<f64>, Vec<f64>) {
    let steps = (nodes - 1) as f64;
    let lambda = (0..nodes).map(|k| k as f64 / steps).collect();
    let mut omega = vec![1.0 / horizon; nodes];
    omega[0] = 0.0;
    (lambda, omega)
}
