//! Conical Euler equations on the unit sphere.
//!
//! Under conical invariance the steady 3D compressible Euler equations reduce to a
//! five-equation system on the unit sphere, written here for an arbitrary surface
//! chart `(ξ¹, ξ²)`:
//!
//! ```text
//! ∂β(ρ√g v^β)                                   + 2ρ√g V³                  = 0
//! ∂β(√g[ρ v^α v^β + g^{αβ} P]) + Γ_γ^α_ν √g[ρ v^γ v^ν + g^{γν} P] + 3ρ√g v^α V³ = 0
//! ∂β(ρ√g v^β V³)                                + 2ρ√g (V³)² − ρ√g q_c²    = 0
//! ∂β(√g[ρE + P] v^β)                            + 2√g[ρE + P] V³           = 0
//! ```
//!
//! The crate provides
//!
//! * [`geometry`]: charts on the sphere, analytic and finite-difference metrics,
//!   Christoffel symbols, body-conforming charts;
//! * [`gas`]: the equation of state (ideal gas);
//! * [`state`]: primitive/conserved states and freestream projection;
//! * [`flux`]: fluxes, geometric sources and the quasi-linear Jacobians;
//! * [`classify`]: closed-form characteristic speeds and hyperbolic/elliptic typing;
//! * [`solver`]: a structured finite-volume discretization marched in pseudo-time;
//! * [`validate`]: independent oracles (spherical-coordinate residuals, manufactured
//!   solutions, the Taylor–Maccoll cone solution);
//! * [`io`] and [`cli`]: configuration, field files and the `conical` command.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod classify;
pub mod cli;
pub mod error;
pub mod flux;
pub mod gas;
pub mod geometry;
pub mod io;
pub mod solver;
pub mod state;
pub mod validate;

pub use error::{Error, Result};
pub use gas::{GasModel, IdealGas};
pub use geometry::{Chart, MetricData};
pub use state::{ConservedState, FreestreamSpec, PrimitiveState};
