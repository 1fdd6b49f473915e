//! Circular cone at zero incidence: march to a steady state and compare the
//! surface pressure with the Taylor–Maccoll solution.
//!
//! `cargo run --release --example circular_cone -- [n] [muscl]`

use conical::geometry::{body_conforming_chart, BodyCurve};
use conical::solver::{
    freestream_field, run_to_steady, Boundaries, Integrator, Mesh, Problem, Reconstruction,
    SolverConfig,
};
use conical::validate::{compare_surface_pressure, taylor_maccoll};
use conical::{FreestreamSpec, IdealGas};
use std::sync::Arc;
use std::time::Instant;

fn main() -> conical::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(64);
    let muscl = args.iter().any(|a| a == "muscl");

    let gas = IdealGas::default();
    let (mach, half_angle) = (2.0, 10f64.to_radians());
    let fs = FreestreamSpec::from_mach(mach, 0.0, &gas)?;
    let chart = body_conforming_chart(
        BodyCurve::Circle { half_angle },
        BodyCurve::Circle {
            half_angle: 40f64.to_radians(),
        },
    )?;
    let pb = Problem::new(Mesh::new(Arc::new(chart), n, n)?, gas, Boundaries::cone(fs))?;
    let mut cfg = SolverConfig {
        cfl: 0.9,
        max_iterations: 100_000,
        ..SolverConfig::default()
    };
    if muscl {
        cfg.cfl = 0.5;
        cfg.reconstruction = Reconstruction::MusclMinmod;
        cfg.integrator = Integrator::SspRk2;
    }

    let t = Instant::now();
    let sol = run_to_steady(&pb, &cfg, freestream_field(&pb.mesh, &fs))?;
    println!(
        "{n}x{n} {}: {} iterations, residual {:.2e}, {:.1?}",
        if muscl {
            "MUSCL + SSP-RK2"
        } else {
            "first order"
        },
        sol.iterations,
        sol.final_relative_residual().unwrap_or(f64::NAN),
        t.elapsed()
    );

    let tm = taylor_maccoll(mach, half_angle, gas.gamma())?;
    let cmp = compare_surface_pressure(&pb.mesh, &sol, &gas, &fs, &tm)?;
    println!(
        "shock angle (Taylor-Maccoll)  {:.4} deg",
        tm.shock_angle.to_degrees()
    );
    println!(
        "surface Cp   computed {:.6}   reference {:.6}   error {:.3}%",
        cmp.mean_cp,
        cmp.reference_cp,
        100.0 * cmp.relative_error
    );
    println!(
        "surface p/p_inf computed {:.6}   reference {:.6}",
        cmp.mean_pressure_ratio, tm.surface_pressure
    );
    println!("azimuthal spread of Cp {:.2e}", cmp.azimuthal_deviation);
    Ok(())
}
