//! Fluxes, geometric sources and quasi-linear Jacobians of the conical system.
//!
//! The system is written as `∂_β F^β(U) + S(U) = 0` with
//! `U = √g(ρ, ρv¹, ρv², ρV³, ρE)`. Jacobians are taken with respect to the
//! primitive vector `(ρ, v¹, v², V³, e)`.

use crate::gas::{GasModel, PressureEval};
use crate::geometry::MetricData;
use crate::state::{total_energy, PrimitiveState};
use crate::{Error, Result};
use nalgebra::SMatrix;

pub type FluxVector = [f64; 5];
pub type SourceVector = [f64; 5];
pub type Matrix5 = SMatrix<f64, 5, 5>;

/// Flux `F^α` (`alpha` is 0 for ξ¹, 1 for ξ²).
pub fn physical_flux<G: GasModel + ?Sized>(
    p: &PrimitiveState,
    metric: &MetricData,
    gas: &G,
    alpha: usize,
) -> Result<FluxVector> {
    let pe = gas.pressure(p.rho, p.e)?;
    Ok(physical_flux_with(p, metric, pe.p, alpha))
}

/// [`physical_flux`] with the pressure already evaluated.
#[inline]
pub fn physical_flux_with(
    p: &PrimitiveState,
    metric: &MetricData,
    pressure: f64,
    alpha: usize,
) -> FluxVector {
    let sg = metric.sqrt_g;
    let va = p.v()[alpha];
    let m = sg * p.rho * va;
    let e_tot = total_energy(p, metric);
    [
        m,
        m * p.v1 + sg * metric.g_up[0][alpha] * pressure,
        m * p.v2 + sg * metric.g_up[1][alpha] * pressure,
        m * p.v3,
        sg * (p.rho * e_tot + pressure) * va,
    ]
}

pub fn geometric_source<G: GasModel + ?Sized>(
    p: &PrimitiveState,
    metric: &MetricData,
    gas: &G,
) -> Result<SourceVector> {
    let pe = gas.pressure(p.rho, p.e)?;
    Ok(geometric_source_with(p, metric, pe.p))
}

/// [`geometric_source`] with the pressure already evaluated.
#[inline]
pub fn geometric_source_with(
    p: &PrimitiveState,
    metric: &MetricData,
    pressure: f64,
) -> SourceVector {
    let sg = metric.sqrt_g;
    let v = p.v();
    let rsg = p.rho * sg;
    let q2 = metric.norm_sq(v);
    let mut mom = [0.0; 2];
    for (a, out) in mom.iter_mut().enumerate() {
        let gam = &metric.gamma[a];
        let mut s = 0.0;
        for g in 0..2 {
            for n in 0..2 {
                s += gam[g][n] * (p.rho * v[g] * v[n] + metric.g_up[g][n] * pressure);
            }
        }
        *out = sg * s + 3.0 * rsg * v[a] * p.v3;
    }
    [
        2.0 * rsg * p.v3,
        mom[0],
        mom[1],
        2.0 * rsg * p.v3 * p.v3 - rsg * q2,
        2.0 * sg * (p.rho * total_energy(p, metric) + pressure) * p.v3,
    ]
}

/// `A^α = ∂F^α/∂(ρ, v¹, v², V³, e)`.
pub fn jacobian_a<G: GasModel + ?Sized>(
    p: &PrimitiveState,
    metric: &MetricData,
    gas: &G,
    alpha: usize,
) -> Result<Matrix5> {
    let PressureEval { p: pr, p_rho, p_e } = gas.pressure(p.rho, p.e)?;
    let PrimitiveState {
        rho, v1, v2, v3, ..
    } = *p;
    let e_tot = total_energy(p, metric);
    let h = rho * e_tot + pr;
    // covariant velocity g_{αβ}v^β
    let vl = metric.lower([v1, v2]);
    let gu = metric.g_up;
    #[rustfmt::skip]
    let a = match alpha {
        0 => Matrix5::new(
            v1,                       rho,                    0.0,             0.0,      0.0,
            v1 * v1 + gu[0][0] * p_rho, 2.0 * rho * v1,       0.0,             0.0,      gu[0][0] * p_e,
            v1 * v2 + gu[0][1] * p_rho, rho * v2,             rho * v1,        0.0,      gu[0][1] * p_e,
            v1 * v3,                  rho * v3,               0.0,             rho * v1, 0.0,
            v1 * (e_tot + p_rho),     rho * vl[0] * v1 + h,   rho * vl[1] * v1, rho * v3 * v1, v1 * (rho + p_e),
        ),
        1 => Matrix5::new(
            v2,                       0.0,                    rho,             0.0,      0.0,
            v1 * v2 + gu[1][0] * p_rho, rho * v2,             rho * v1,        0.0,      gu[1][0] * p_e,
            v2 * v2 + gu[1][1] * p_rho, 0.0,                  2.0 * rho * v2,  0.0,      gu[1][1] * p_e,
            v2 * v3,                  0.0,                    rho * v3,        rho * v2, 0.0,
            v2 * (e_tot + p_rho),     rho * vl[0] * v2,       rho * vl[1] * v2 + h, rho * v3 * v2, v2 * (rho + p_e),
        ),
        _ => return Err(Error::Contract(format!("flux direction must be 0 or 1, got {alpha}"))),
    };
    Ok(a * metric.sqrt_g)
}

/// `A₀ = ∂U/∂(ρ, v¹, v², V³, e)`.
pub fn jacobian_a0(p: &PrimitiveState, metric: &MetricData) -> Result<Matrix5> {
    let PrimitiveState {
        rho, v1, v2, v3, ..
    } = *p;
    let det = metric.sqrt_g.powi(5) * rho.powi(4);
    if !(det.abs() > 0.0) || !det.is_finite() {
        return Err(Error::InvalidState(format!(
            "singular A0 (rho = {rho}, sqrt_g = {})",
            metric.sqrt_g
        )));
    }
    let vl = metric.lower([v1, v2]);
    let e_tot = total_energy(p, metric);
    #[rustfmt::skip]
    let a0 = Matrix5::new(
        1.0,   0.0,          0.0,          0.0,      0.0,
        v1,    rho,          0.0,          0.0,      0.0,
        v2,    0.0,          rho,          0.0,      0.0,
        v3,    0.0,          0.0,          rho,      0.0,
        e_tot, rho * vl[0],  rho * vl[1],  rho * v3, rho,
    );
    Ok(a0 * metric.sqrt_g)
}
