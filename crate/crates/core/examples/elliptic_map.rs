//! Elliptic cone at incidence: converge, classify every cell and draw the
//! hyperbolic (`H`), elliptic (`.`) and sonic (`s`) regions, outer curve on top.
//!
//! `cargo run --release --example elliptic_map -- [n] [aoa_deg]`

use conical::classify::FlowType;
use conical::geometry::{body_conforming_chart, BodyCurve};
use conical::solver::{
    components, freestream_field, region_map, run_to_steady, Boundaries, Mesh, Problem,
    SolverConfig,
};
use conical::{FreestreamSpec, IdealGas};
use std::sync::Arc;

fn main() -> conical::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(64);
    let aoa: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(5.0);

    let gas = IdealGas::default();
    let fs = FreestreamSpec::from_mach(2.0, aoa.to_radians(), &gas)?;
    let chart = body_conforming_chart(
        BodyCurve::Ellipse {
            semi_major: 14f64.to_radians(),
            semi_minor: 7f64.to_radians(),
            major_azimuth: 0.0,
        },
        BodyCurve::Circle {
            half_angle: 45f64.to_radians(),
        },
    )?;
    let pb = Problem::new(Mesh::new(Arc::new(chart), n, n)?, gas, Boundaries::cone(fs))?;
    let cfg = SolverConfig {
        cfl: 0.9,
        max_iterations: 100_000,
        ..SolverConfig::default()
    };
    let sol = run_to_steady(&pb, &cfg, freestream_field(&pb.mesh, &fs))?;
    println!(
        "converged: {} after {} iterations",
        sol.converged, sol.iterations
    );

    let map = region_map(&pb.mesh, &sol.primitives(&pb.mesh)?, &gas, 1e-8)?;
    for i in (0..n).rev() {
        let row: String = (0..n)
            .map(|j| match map[i * n + j].label {
                FlowType::Hyperbolic => 'H',
                FlowType::Elliptic => '.',
                FlowType::Sonic => 's',
            })
            .collect();
        println!("{row}");
    }
    for label in [FlowType::Hyperbolic, FlowType::Elliptic] {
        let mask: Vec<bool> = map.iter().map(|r| r.label == label).collect();
        let comps = components(n, n, true, &mask);
        let sizes: Vec<usize> = comps.iter().map(Vec::len).collect();
        println!("{:<10} components (cells): {sizes:?}", label.as_str());
    }
    Ok(())
}
