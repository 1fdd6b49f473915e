//! Observed order of accuracy from manufactured solutions on a spherical patch,
//! for the first-order and the MUSCL-minmod schemes.

use conical::geometry::SphericalChart;
use conical::solver::Reconstruction;
use conical::validate::{mms_convergence, MmsCase, TrigField};
use conical::IdealGas;
use rand::SeedableRng;
use std::sync::Arc;

const EQUATIONS: [&str; 5] = ["mass", "mom1", "mom2", "mom_r", "energy"];

fn main() -> conical::Result<()> {
    let sizes = [16, 32, 64];
    let (lo, hi) = ([0.6, 0.2], [1.4, 1.0]);
    for (name, recon) in [
        ("first order", Reconstruction::FirstOrder),
        ("MUSCL-minmod", Reconstruction::MusclMinmod),
    ] {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let case = MmsCase {
            field: Arc::new(TrigField::monotone(&mut rng, lo, hi)),
            chart: Arc::new(SphericalChart::patch(lo, hi, false)?),
            reconstruction: recon,
            gas: IdealGas::default(),
        };
        let r = mms_convergence(&case, &sizes)?;
        println!("{name}");
        print!("{:>6}", "n");
        for e in EQUATIONS {
            print!(" {e:>10}");
        }
        println!();
        for (n, err) in r.sizes.iter().zip(&r.errors) {
            print!("{n:6}");
            for x in err {
                print!(" {x:10.3e}");
            }
            println!();
        }
        print!("{:>6}", "order");
        for o in r.finest_orders() {
            print!(" {o:10.3}");
        }
        println!("\n");
    }
    Ok(())
}
