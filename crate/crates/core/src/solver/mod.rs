//! Structured finite-volume discretization marched to steady state in pseudo-time.
//!
//! Cells tile a rectangle of the chart. Each face carries its own metric, fluxes
//! are local Lax–Friedrichs, and boundary values live in two ghost layers.

mod boundary;
mod march;
mod mesh;
mod region;
mod residual;

pub use boundary::{
    apply_boundary_conditions, Boundaries, BoundaryCondition, BoundarySet, ExactFn, PaddedField,
    GHOST,
};
pub use march::{
    freestream_field, run_to_steady, run_to_steady_observed, step, Marcher, StepReport,
};
pub use mesh::Mesh;
pub use region::{components, region_map, RegionRecord};
pub use residual::{face_fluxes, semidiscrete_residual, FaceFluxes, Problem, ResidualParts};

use crate::geometry::MetricData;
use crate::state::{conserved_to_primitive, ConservedState, PrimitiveState};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum NumericalFlux {
    #[default]
    LocalLaxFriedrichs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Reconstruction {
    #[default]
    FirstOrder,
    /// Piecewise-linear primitives with the minmod limiter.
    MusclMinmod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Integrator {
    #[default]
    ForwardEuler,
    /// Two-stage strong-stability-preserving Runge–Kutta.
    SspRk2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub cfl: f64,
    pub max_iterations: usize,
    /// Stop once the total L2 residual relative to iteration 1 drops below this.
    pub threshold: f64,
    pub flux: NumericalFlux,
    pub reconstruction: Reconstruction,
    pub integrator: Integrator,
    /// Per-cell pseudo-time steps instead of one global step.
    pub local_time_stepping: bool,
    /// Abort when the relative residual exceeds this factor.
    pub divergence_factor: f64,
    /// Worker threads; `None` uses the rayon default.
    pub threads: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: 0.8,
            max_iterations: 50_000,
            threshold: 1e-4,
            flux: NumericalFlux::LocalLaxFriedrichs,
            reconstruction: Reconstruction::FirstOrder,
            integrator: Integrator::ForwardEuler,
            local_time_stepping: false,
            divergence_factor: 1e3,
            threads: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!(
                "cfl must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        if !(self.threshold > 0.0) {
            return Err(Error::Config(format!(
                "convergence threshold must be positive, got {}",
                self.threshold
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if !(self.divergence_factor > 1.0) {
            return Err(Error::Config("divergence_factor must exceed 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(())
    }
}

/// A field of conserved states plus the history that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    /// Cell values, row-major with cell `i·n2 + j`.
    pub u: Vec<ConservedState>,
    pub iterations: usize,
    /// Per-equation L2 residuals relative to iteration 1, one row per iteration.
    pub history: Vec<[f64; 5]>,
    /// Total L2 residual relative to iteration 1.
    pub history_total: Vec<f64>,
    /// Absolute per-equation L2 residuals of iteration 1.
    pub initial_residual: [f64; 5],
    pub converged: bool,
}

impl Solution {
    pub fn new(u: Vec<ConservedState>) -> Self {
        Self {
            u,
            iterations: 0,
            history: Vec::new(),
            history_total: Vec::new(),
            initial_residual: [0.0; 5],
            converged: false,
        }
    }

    pub fn from_primitives(mesh: &Mesh, prims: &[PrimitiveState]) -> Result<Self> {
        if prims.len() != mesh.n_cells() {
            return Err(Error::Contract(format!(
                "{} states for a mesh of {} cells",
                prims.len(),
                mesh.n_cells()
            )));
        }
        let u = prims
            .iter()
            .enumerate()
            .map(|(k, p)| crate::state::primitive_to_conserved(p, mesh.cell_metric(k)))
            .collect();
        Ok(Self::new(u))
    }

    pub fn primitives(&self, mesh: &Mesh) -> Result<Vec<PrimitiveState>> {
        decode_all(&self.u, |k| mesh.cell_metric(k), mesh.n2)
    }

    pub fn final_relative_residual(&self) -> Option<f64> {
        self.history_total.last().copied()
    }
}

fn decode_all<'a>(
    u: &[ConservedState],
    metric: impl Fn(usize) -> &'a MetricData,
    n2: usize,
) -> Result<Vec<PrimitiveState>> {
    u.iter()
        .enumerate()
        .map(|(k, c)| {
            conserved_to_primitive(c, metric(k)).map_err(|e| Error::SolverFailure {
                cell: k,
                i: k / n2,
                j: k % n2,
                reason: e.to_string(),
            })
        })
        .collect()
}
