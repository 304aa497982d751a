//! Numerical laboratory for the two-dimensional Keller-Segel type Euler-Poisson system
//!
//! ```text
//! ∂ₜρ + ∇·m = 0
//! ∂ₜm + ∇·(m⊗m/ρ) + ∇ρ = ρ∇Φ − m
//! −ΔΦ = ρ
//! ```
//!
//! with a finite-volume fluid solver, a free-space Poisson solver, a mean-field
//! particle simulator and diagnostics for the virial identity, the log-HLS bound
//! and the energy inequalities that separate the `M < 8π`, `M = 8π` and `M > 8π`
//! regimes.

pub mod error;
pub mod functionals;
pub mod grid;
pub mod harness;
pub mod hydro;
pub mod particles;
pub mod poisson;
pub mod snapshot;
pub mod state;

pub use error::{Error, Result};
pub use grid::{make_grid, GridSpec, ScalarField, VectorField};
pub use state::{gaussian_state, FluidState, GaussianSpec, ModelParams};
