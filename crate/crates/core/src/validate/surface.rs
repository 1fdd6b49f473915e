use super::TaylorMaccollSolution;
use crate::gas::GasModel;
use crate::solver::{Mesh, Solution};
use crate::state::FreestreamSpec;
use crate::{Error, Result};

/// Azimuthal-mean surface pressure of a cone solution against Taylor–Maccoll.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceComparison {
    /// Pressure coefficient of the body row, averaged over `ξ²`.
    pub mean_cp: f64,
    pub reference_cp: f64,
    /// `|mean_cp − reference_cp| / |reference_cp|`
    pub relative_error: f64,
    /// Mean `P/P∞` of the body row and its relative error.
    pub mean_pressure_ratio: f64,
    pub pressure_ratio_error: f64,
    /// Population standard deviation of the body-row `Cp` over `|mean_cp|`.
    pub azimuthal_deviation: f64,
}

/// The body row is the first cell layer off the wall (`i = 0`), whose pressure is
/// also the wall-face pressure under the mirror condition.
pub fn compare_surface_pressure<G: GasModel + ?Sized>(
    mesh: &Mesh,
    sol: &Solution,
    gas: &G,
    fs: &FreestreamSpec,
    tm: &TaylorMaccollSolution,
) -> Result<SurfaceComparison> {
    if !sol.converged {
        return Err(Error::Verification(format!(
            "surface comparison needs a converged solution (stopped after {} iterations at relative residual {:e})",
            sol.iterations,
            sol.final_relative_residual().unwrap_or(f64::NAN)
        )));
    }
    let prims = sol.primitives(mesh)?;
    let p_inf = fs.pressure(gas)?;
    let q_inf = 0.5 * fs.rho * fs.speed().powi(2);
    let cps = (0..mesh.n2)
        .map(|j| {
            let p = &prims[mesh.index(0, j)];
            Ok((gas.pressure(p.rho, p.e)?.p - p_inf) / q_inf)
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = cps.len() as f64;
    let mean_cp = cps.iter().sum::<f64>() / n;
    let var = cps.iter().map(|c| (c - mean_cp).powi(2)).sum::<f64>() / n;
    let reference_cp = tm.pressure_coefficient();
    let mean_pressure_ratio = 1.0 + mean_cp * q_inf / p_inf;
    Ok(SurfaceComparison {
        mean_cp,
        reference_cp,
        relative_error: (mean_cp - reference_cp).abs() / reference_cp.abs(),
        mean_pressure_ratio,
        pressure_ratio_error: (mean_pressure_ratio - tm.surface_pressure).abs()
            / tm.surface_pressure,
        azimuthal_deviation: var.sqrt() / mean_cp.abs(),
    })
}
