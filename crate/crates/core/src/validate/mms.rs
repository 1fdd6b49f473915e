//! Manufactured-solution order of accuracy.
//!
//! The analytic residual of a manufactured field is injected as forcing, so the
//! field solves the forced continuous problem exactly. The error measured here is the
//! discrete residual of the forced problem evaluated on the exact cell-center
//! values with exact ghost data, i.e. the local truncation error of the scheme.

use super::manufactured::{general_residual, ManufacturedField};
use crate::gas::IdealGas;
use crate::geometry::Chart;
use crate::solver::{
    semidiscrete_residual, Boundaries, BoundaryCondition, Mesh, Problem, Reconstruction, Solution,
};
use crate::{Error, Result};
use rayon::prelude::*;
use std::sync::Arc;

/// Step of the sixth-order difference used for the analytic forcing.
const FORCING_STEP: f64 = 1e-3;

#[derive(Clone)]
pub struct MmsCase {
    pub field: Arc<dyn ManufacturedField>,
    /// Meshes cover the whole chart domain.
    pub chart: Arc<dyn Chart>,
    pub reconstruction: Reconstruction,
    pub gas: IdealGas,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MmsReport {
    /// Cells per direction.
    pub sizes: Vec<usize>,
    /// Per-equation L2 error on each mesh.
    pub errors: Vec<[f64; 5]>,
    /// `log2(e_coarse / e_fine)` per successive pair.
    pub orders: Vec<[f64; 5]>,
}

impl MmsReport {
    /// Orders from the two finest meshes.
    pub fn finest_orders(&self) -> [f64; 5] {
        *self.orders.last().expect("at least two meshes")
    }
}

/// Per-equation L2 truncation error on an `n × n` mesh.
pub fn truncation_error(case: &MmsCase, n: usize) -> Result<[f64; 5]> {
    let mesh = Mesh::new(case.chart.clone(), n, n)?;
    let centers = mesh.centers();
    let exact: Vec<_> = centers.iter().map(|xi| case.field.eval(*xi)).collect();
    let forcing = centers
        .par_iter()
        .map(|xi| {
            general_residual(
                case.field.as_ref(),
                case.chart.as_ref(),
                &case.gas,
                *xi,
                FORCING_STEP,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let sol = Solution::from_primitives(&mesh, &exact)?;
    let field = case.field.clone();
    let bc = BoundaryCondition::Exact(Arc::new(move |xi| field.eval(xi)));
    let periodic = mesh.periodic;
    let pb =
        Problem::new(mesh, case.gas, Boundaries::uniform(bc, periodic))?.with_forcing(forcing)?;
    let r = semidiscrete_residual(&pb, &sol, case.reconstruction)?;
    let mut sq = [0.0; 5];
    for row in &r {
        for e in 0..5 {
            sq[e] += row[e] * row[e];
        }
    }
    Ok(sq.map(|s| (s / r.len() as f64).sqrt()))
}

/// Errors and observed orders over a sequence of meshes, each twice as fine as the
/// previous one.
pub fn mms_convergence(case: &MmsCase, sizes: &[usize]) -> Result<MmsReport> {
    if sizes.len() < 3 {
        return Err(Error::Contract(format!(
            "need at least 3 meshes, got {}",
            sizes.len()
        )));
    }
    if sizes.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::Contract(format!(
            "mesh sizes {sizes:?} are not nested by doubling"
        )));
    }
    let errors = sizes
        .par_iter()
        .map(|&n| truncation_error(case, n))
        .collect::<Result<Vec<_>>>()?;
    for (w, n) in errors.windows(2).zip(sizes.windows(2)) {
        for e in 0..5 {
            if !(w[1][e] < w[0][e]) {
                return Err(Error::Verification(format!(
                    "equation {e}: error does not decrease from {} to {} cells ({:e} -> {:e})",
                    n[0], n[1], w[0][e], w[1][e]
                )));
            }
        }
    }
    let orders = errors
        .windows(2)
        .map(|w| std::array::from_fn(|e| (w[0][e] / w[1][e]).log2()))
        .collect();
    Ok(MmsReport {
        sizes: sizes.to_vec(),
        errors,
        orders,
    })
}
