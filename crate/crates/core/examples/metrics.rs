//! Metric tensor and Christoffel symbols: the closed-form spherical chart against
//! finite differences of its embedding, then a body-conforming chart around an
//! elliptic cone.

use conical::geometry::{
    body_conforming_chart, numerical_metric, spherical_metric, BodyCurve, Chart, SphericalChart,
};

fn main() -> conical::Result<()> {
    let sphere = SphericalChart::band(0.2, 2.9)?;
    println!("spherical chart: analytic vs differenced embedding");
    println!(
        "{:>6} {:>6} {:>10} {:>12} {:>12}",
        "phi", "theta", "sqrt_g", "|dg|", "|dGamma|"
    );
    for &(phi, theta) in &[(0.3, 0.0), (0.8, 1.0), (1.5, 2.5), (2.6, 4.0)] {
        let a = spherical_metric(phi, theta)?;
        let n = numerical_metric(&sphere, [phi, theta], 1e-4)?;
        let dg = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| (a.g_lo[i][j] - n.g_lo[i][j]).abs())
            .fold(0.0, f64::max);
        let mut dgam: f64 = 0.0;
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    dgam = dgam.max((a.gamma[k][i][j] - n.gamma[k][i][j]).abs());
                }
            }
        }
        println!(
            "{phi:6.2} {theta:6.2} {:10.6} {dg:12.3e} {dgam:12.3e}",
            a.sqrt_g
        );
    }

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
    println!("\nbody-conforming chart, elliptic cone 14 x 7 deg inside a 45 deg circle");
    println!(
        "{:>5} {:>7} {:>8} {:>10} {:>10} {:>10}",
        "xi1", "theta", "phi", "g11", "g12", "g22"
    );
    for &xi1 in &[0.0, 0.5, 1.0] {
        for k in 0..4 {
            let theta = k as f64 * std::f64::consts::FRAC_PI_4;
            let m = chart.metric([xi1, theta], 1e-4)?;
            println!(
                "{xi1:5.2} {theta:7.3} {:8.3} {:10.5} {:10.5} {:10.5}",
                chart.phi([xi1, theta]).to_degrees(),
                m.g_lo[0][0],
                m.g_lo[0][1],
                m.g_lo[1][1]
            );
        }
    }
    Ok(())
}
