//! The projected uniform freestream is an exact steady solution. On a band of the
//! sphere with freestream data on both curves the scheme holds it up to
//! discretization error, which shrinks at the scheme's order.

use conical::geometry::{body_conforming_chart, BodyCurve};
use conical::solver::{
    freestream_field, run_to_steady, Boundaries, BoundaryCondition, Mesh, Problem, SolverConfig,
};
use conical::{FreestreamSpec, IdealGas};
use std::sync::Arc;

fn main() -> conical::Result<()> {
    let gas = IdealGas::default();
    let fs = FreestreamSpec::from_mach(2.0, 10f64.to_radians(), &gas)?;
    let cfg = SolverConfig {
        cfl: 0.9,
        threshold: 1e-8,
        ..SolverConfig::default()
    };
    let mut last: Option<f64> = None;
    println!(
        "{:>5} {:>7} {:>12} {:>7}",
        "n", "iters", "Linf error", "order"
    );
    for n in [16, 32, 64, 128] {
        let chart = body_conforming_chart(
            BodyCurve::Circle {
                half_angle: 45f64.to_radians(),
            },
            BodyCurve::Circle {
                half_angle: 70f64.to_radians(),
            },
        )?;
        let mut bcs = Boundaries::cone(fs);
        bcs.xi1_lo = BoundaryCondition::Freestream(fs);
        let pb = Problem::new(Mesh::new(Arc::new(chart), n, n)?, gas, bcs)?;
        let exact = freestream_field(&pb.mesh, &fs);
        let sol = run_to_steady(&pb, &cfg, exact.clone())?;
        let (a, b) = (exact.primitives(&pb.mesh)?, sol.primitives(&pb.mesh)?);
        let err = a
            .iter()
            .zip(&b)
            .flat_map(|(x, y)| {
                let (x, y) = (x.to_array(), y.to_array());
                (0..5).map(move |e| (x[e] - y[e]).abs())
            })
            .fold(0.0, f64::max);
        let order = last.map(|l| (l / err).log2());
        println!(
            "{n:5} {:7} {err:12.3e} {:>7}",
            sol.iterations,
            order.map_or("-".into(), |o| format!("{o:.3}"))
        );
        last = Some(err);
    }
    Ok(())
}
