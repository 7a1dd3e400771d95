//! First eigenvalue of `y'' + q y + λ y = 0` on [0, 1] with
//! `y'(0) = k₀² y(0)` and `y'(1) = -k₁² y(1)`.
//!
//! The primary route is Prüfer-angle shooting ([`lambda1`]). Two independent
//! checks live alongside it: a P1 finite-element discretization of the
//! quadratic form ([`lambda1_fd`]) and the characteristic equation of the
//! zero-potential problem ([`lambda1_zero`]).

mod fem;
mod prufer;
mod rayleigh;
mod zero;

pub use fem::lambda1_fd;
pub use prufer::{eigenfunction, lambda1, lambda1_with_eigenfunction, theta_end};
pub use rayleigh::rayleigh;
pub use zero::lambda1_zero;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Robin coefficients `(k₀², k₁²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobinBC {
    k0sq: f64,
    k1sq: f64,
}

impl RobinBC {
    pub fn new(k0sq: f64, k1sq: f64) -> Result<Self> {
        if !k0sq.is_finite() || !k1sq.is_finite() {
            return Err(Error::NonFinite("boundary coefficient".into()));
        }
        if k0sq < 0.0 || k1sq < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "boundary coefficients must be >= 0, got ({k0sq}, {k1sq})"
            )));
        }
        Ok(Self { k0sq, k1sq })
    }

    /// Neumann conditions, `k₀² = k₁² = 0`.
    pub fn neumann() -> Self {
        Self {
            k0sq: 0.0,
            k1sq: 0.0,
        }
    }

    pub fn k0sq(&self) -> f64 {
        self.k0sq
    }

    pub fn k1sq(&self) -> f64 {
        self.k1sq
    }

    /// Prüfer angle at x = 0, `arccot(k₀²) ∈ (0, π/2]`.
    pub fn theta_start(&self) -> f64 {
        1f64.atan2(self.k0sq)
    }

    /// Prüfer angle the first eigenfunction reaches at x = 1,
    /// `π - arccot(k₁²) ∈ [π/2, π)`.
    pub fn theta_target(&self) -> f64 {
        std::f64::consts::PI - 1f64.atan2(self.k1sq)
    }
}

/// How the Prüfer equation is advanced across a cell of constant potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Closed-form propagation of `(y, y')` over the cell.
    #[default]
    Exact,
    /// Fixed-step classical Runge–Kutta on the angle equation.
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Minimum RK4 steps per cell; more are taken where `|λ + q|` is large.
    pub ode_steps_per_cell: usize,
    pub theta_tolerance: f64,
    /// Bisection stops once the bracket is narrower than this times
    /// `max(1, |λ|)`.
    pub lambda_tolerance: f64,
    pub max_bracket_expansions: usize,
    pub integrator: Integrator,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            ode_steps_per_cell: 16,
            theta_tolerance: 1e-10,
            lambda_tolerance: 1e-13,
            max_bracket_expansions: 60,
            integrator: Integrator::Exact,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ode_steps_per_cell < 16 {
            return Err(Error::InvalidArgument(
                "ode_steps_per_cell must be >= 16".into(),
            ));
        }
        if !(self.theta_tolerance > 0.0) || !(self.lambda_tolerance > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be > 0".into()));
        }
        Ok(())
    }
}

/// `λ₁` together with the diagnostics of the bisection that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub lambda1: f64,
    /// `|θ(1; λ₁) - θ_target|`.
    pub residual: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenfunction_samples: Option<Vec<(f64, f64)>>,
}
