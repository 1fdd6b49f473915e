//! Shock angle and surface pressure of circular cones at zero incidence, from the
//! shooting solution of the Taylor–Maccoll equation.

use conical::validate::taylor_maccoll;

fn main() -> conical::Result<()> {
    let gamma = 1.4;
    for &mach in &[1.5f64, 2.0, 3.0, 5.0] {
        println!(
            "M = {mach}  (Mach angle {:.3} deg)",
            (1.0 / mach).asin().to_degrees()
        );
        println!(
            "  {:>6} {:>10} {:>10} {:>10}",
            "cone", "shock", "p_c/p_inf", "Cp"
        );
        for &deg in &[2.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0] {
            match taylor_maccoll(mach, f64::to_radians(deg), gamma) {
                Ok(tm) => println!(
                    "  {deg:6.1} {:10.4} {:10.5} {:10.5}",
                    tm.shock_angle.to_degrees(),
                    tm.surface_pressure,
                    tm.pressure_coefficient()
                ),
                Err(e) => println!("  {deg:6.1} {e}"),
            }
        }
    }

    let tm = taylor_maccoll(2.0, 10f64.to_radians(), gamma)?;
    println!("\nM = 2, 10 deg cone: profile from shock to body");
    println!(
        "{:>8} {:>9} {:>9} {:>9}",
        "theta", "v_r", "v_theta", "p/p_inf"
    );
    let step = (tm.profile.len() / 8).max(1);
    for s in tm.profile.iter().step_by(step).chain(tm.profile.last()) {
        println!(
            "{:8.3} {:9.5} {:9.5} {:9.5}",
            s.theta.to_degrees(),
            s.v_r,
            s.v_theta,
            s.pressure
        );
    }
    Ok(())
}
