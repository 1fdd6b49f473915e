//! Characteristic analysis of the steady conical system at a few crossflow Mach
//! numbers: closed-form eigenvalues, a numerical eigen-solve of `(A¹)⁻¹A²`, the
//! resulting type, and the pseudo-time speeds that stay real throughout.

use conical::classify::{
    classify, matrix_eigenvalues, spectrum_distance, steady_eigenvalues, steady_matrix,
    unsteady_wave_speeds,
};
use conical::geometry::spherical_metric;
use conical::{GasModel, IdealGas, PrimitiveState};

fn main() -> conical::Result<()> {
    let gas = IdealGas::default();
    let metric = spherical_metric(0.7, 0.4)?;
    let e = 1.0 / (1.4 * 0.4);
    let c = gas.sound_speed(1.0, e)?;

    println!(
        "{:>6} {:>11} {:>24} {:>24} {:>10}",
        "q_c/c", "type", "lambda-", "lambda+", "|eig err|"
    );
    for &mach_c in &[0.5, 0.9, 1.0, 1.1, 2.0] {
        // crossflow split between the two directions, physical speed q_c = mach_c·c
        let (d1, d2) = (0.8, 0.6);
        let q = mach_c * c;
        let v1 = q * d1 / metric.g_lo[0][0].sqrt();
        let v2 = q * d2 / metric.g_lo[1][1].sqrt();
        let p = PrimitiveState::new(1.0, v1, v2, 1.5, e);
        let label = classify(&p, &metric, &gas, 1e-8)?;
        let closed = steady_eigenvalues(&p, &metric, &gas)?;
        let numeric = matrix_eigenvalues(&steady_matrix(&p, &metric, &gas)?)?;
        println!(
            "{mach_c:6.2} {:>11} {:>24} {:>24} {:10.2e}",
            label.kind.as_str(),
            format!("{:.5}", closed[3]),
            format!("{:.5}", closed[4]),
            spectrum_distance(&closed, &numeric)
        );
        let n = metric.co_norm_sq([1.0, 0.0]).sqrt();
        let speeds = unsteady_wave_speeds(&p, &metric, &gas, [1.0 / n, 0.0])?;
        println!("{:>6} pseudo-time speeds along xi1: {speeds:.4?}", "");
    }
    Ok(())
}
