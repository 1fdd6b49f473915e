//! The general-coordinate residual of a smooth field, mapped to the spherical
//! form, against a direct evaluation of the conservation laws in (φ, θ).

use conical::geometry::SphericalChart;
use conical::validate::ManufacturedField;
use conical::validate::{
    general_residual, spherical_residual_oracle, to_spherical_form, TrigField,
};
use conical::IdealGas;
use rand::SeedableRng;

fn main() -> conical::Result<()> {
    let gas = IdealGas::default();
    let chart = SphericalChart::band(0.2, 2.9)?;
    let mut rng = rand::rngs::StdRng::seed_from_u64(5);
    let field = TrigField::random(&mut rng, 3, 3.0);
    println!(
        "{:>6} {:>6} {:>13} {:>13} {:>10}",
        "phi", "theta", "R_mass", "oracle", "max diff"
    );
    for &(phi, theta) in &[(0.5, 0.3), (1.0, 2.0), (1.6, 4.5), (2.4, 5.9)] {
        let r = general_residual(&field, &chart, &gas, [phi, theta], 1e-3)?;
        let p = field.eval([phi, theta]);
        let sqrt_g = phi.sin();
        let mapped = to_spherical_form(&r, &p, sqrt_g);
        let oracle = spherical_residual_oracle(&field, &gas, phi, theta)?;
        let diff = mapped
            .iter()
            .zip(&oracle)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!(
            "{phi:6.2} {theta:6.2} {:13.6e} {:13.6e} {diff:10.2e}",
            mapped[0], oracle[0]
        );
    }
    Ok(())
}
