//! Primitive and conserved states, crossflow quantities and the freestream.

use crate::gas::{GasModel, IdealGas};
use crate::geometry::{Chart, MetricData};
use crate::{Error, Result};

/// The five conical unknowns. `v1, v2` are the rescaled contravariant surface
/// velocity components, `v3` the radial velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrimitiveState {
    pub rho: f64,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
    pub e: f64,
}

impl PrimitiveState {
    pub fn new(rho: f64, v1: f64, v2: f64, v3: f64, e: f64) -> Self {
        Self { rho, v1, v2, v3, e }
    }

    #[inline]
    pub fn v(&self) -> [f64; 2] {
        [self.v1, self.v2]
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.rho, self.v1, self.v2, self.v3, self.e]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub fn is_valid(&self) -> bool {
        self.rho > 0.0 && self.e > 0.0 && self.to_array().iter().all(|x| x.is_finite())
    }
}

/// `√g·(ρ, ρv¹, ρv², ρV³, ρE)`: mass, ξ¹-momentum, ξ²-momentum, radial momentum, energy.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ConservedState(pub [f64; 5]);

/// `q_c = √(g_{αβ} v^α v^β)`
#[inline]
pub fn crossflow_speed(v: [f64; 2], metric: &MetricData) -> f64 {
    metric.norm_sq(v).max(0.0).sqrt()
}

/// `E = e + ½(q_c² + (V³)²)`
#[inline]
pub fn total_energy(p: &PrimitiveState, metric: &MetricData) -> f64 {
    p.e + 0.5 * (metric.norm_sq(p.v()) + p.v3 * p.v3)
}

#[inline]
pub fn primitive_to_conserved(p: &PrimitiveState, metric: &MetricData) -> ConservedState {
    let m = metric.sqrt_g * p.rho;
    ConservedState([m, m * p.v1, m * p.v2, m * p.v3, m * total_energy(p, metric)])
}

pub fn conserved_to_primitive(u: &ConservedState, metric: &MetricData) -> Result<PrimitiveState> {
    let [m, m1, m2, m3, me] = u.0;
    if !(m > 0.0) || !(metric.sqrt_g > 0.0) {
        return Err(Error::InvalidState(format!(
            "non-positive mass density {m:e} (sqrt_g = {})",
            metric.sqrt_g
        )));
    }
    let rho = m / metric.sqrt_g;
    let (v1, v2, v3) = (m1 / m, m2 / m, m3 / m);
    let e = me / m - 0.5 * (metric.norm_sq([v1, v2]) + v3 * v3);
    if !(e > 0.0) || !e.is_finite() {
        return Err(Error::InvalidState(format!(
            "non-positive internal energy {e:e} recovered from conserved state"
        )));
    }
    Ok(PrimitiveState { rho, v1, v2, v3, e })
}

/// Uniform upstream state, as a Cartesian velocity (cone axis `+z`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreestreamSpec {
    pub velocity: [f64; 3],
    pub rho: f64,
    pub e: f64,
}

impl FreestreamSpec {
    /// Checked constructor; the freestream must be supersonic.
    pub fn new<G: GasModel + ?Sized>(
        velocity: [f64; 3],
        rho: f64,
        e: f64,
        gas: &G,
    ) -> Result<Self> {
        let fs = Self { velocity, rho, e };
        let c = gas.sound_speed(rho, e)?;
        let m = fs.speed() / c;
        if !(m > 1.0) {
            return Err(Error::Config(format!(
                "freestream must be supersonic, Mach number is {m}"
            )));
        }
        Ok(fs)
    }

    /// Freestream from Mach number and angle of attack (pitch in the x–z plane),
    /// nondimensionalized by freestream density and sound speed.
    pub fn from_mach(mach: f64, aoa: f64, gas: &IdealGas) -> Result<Self> {
        let g = gas.gamma();
        let e = 1.0 / (g * (g - 1.0));
        let (s, c) = aoa.sin_cos();
        Self::new([mach * s, 0.0, mach * c], 1.0, e, gas)
    }

    pub fn speed(&self) -> f64 {
        let v = self.velocity;
        (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
    }

    pub fn pressure<G: GasModel + ?Sized>(&self, gas: &G) -> Result<f64> {
        Ok(gas.pressure(self.rho, self.e)?.p)
    }
}

/// Project the freestream onto the sphere at chart point `xi`.
///
/// `V³ = V·x̂` and `v^α = g^{αβ}(B_β·V)`. The chart's own tangents are used, so the
/// point may lie slightly outside the chart domain (ghost cells).
pub fn project_freestream<C: Chart + ?Sized>(
    fs: &FreestreamSpec,
    chart: &C,
    xi: [f64; 2],
    h: f64,
) -> PrimitiveState {
    let x = chart.embed(xi);
    let b = chart.tangents(xi, h);
    let dot = |a: [f64; 3], c: [f64; 3]| a[0] * c[0] + a[1] * c[1] + a[2] * c[2];
    let g11 = dot(b[0], b[0]);
    let g12 = dot(b[0], b[1]);
    let g22 = dot(b[1], b[1]);
    let det = g11 * g22 - g12 * g12;
    let w = [dot(b[0], fs.velocity), dot(b[1], fs.velocity)];
    let v1 = (g22 * w[0] - g12 * w[1]) / det;
    let v2 = (-g12 * w[0] + g11 * w[1]) / det;
    PrimitiveState {
        rho: fs.rho,
        v1,
        v2,
        v3: dot(x, fs.velocity),
        e: fs.e,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{spherical_metric, SphericalChart, DEFAULT_FD_STEP};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};

    #[test]
    fn crossflow_speed_examples() {
        assert_eq!(crossflow_speed([3.0, 4.0], &MetricData::flat()), 5.0);
        let m = spherical_metric(FRAC_PI_6, 0.0).unwrap();
        assert!((crossflow_speed([0.0, 2.0], &m) - 1.0).abs() < 1e-15);
        assert_eq!(crossflow_speed([0.0, 0.0], &m), 0.0);
    }

    #[test]
    fn total_energy_examples() {
        let flat = MetricData::flat();
        assert_eq!(
            total_energy(&PrimitiveState::new(1.0, 0.0, 0.0, 0.0, 2.0), &flat),
            2.0
        );
        assert_eq!(
            total_energy(&PrimitiveState::new(1.0, 3.0, 4.0, 0.0, 1.0), &flat),
            13.5
        );
    }

    #[test]
    fn energy_is_reparametrization_invariant() {
        // same physical velocity in (φ, θ) and in (φ' = 2φ, θ)
        let m = spherical_metric(0.9, 0.0).unwrap();
        let mut stretched = m;
        stretched.g_lo[0][0] = 0.25;
        stretched.g_up[0][0] = 4.0;
        let p = PrimitiveState::new(1.2, 0.3, -0.7, 1.1, 0.8);
        let q = PrimitiveState {
            v1: 2.0 * p.v1,
            ..p
        };
        assert!((total_energy(&p, &m) - total_energy(&q, &stretched)).abs() < 1e-10);
        assert!((crossflow_speed(p.v(), &m) - crossflow_speed(q.v(), &stretched)).abs() < 1e-12);
    }

    #[test]
    fn rest_state_conversion() {
        let u = primitive_to_conserved(
            &PrimitiveState::new(1.0, 0.0, 0.0, 0.0, 1.0),
            &MetricData::flat(),
        );
        assert_eq!(u.0, [1.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn negative_internal_energy_is_rejected() {
        let u = ConservedState([1.0, 2.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            conserved_to_primitive(&u, &MetricData::flat()),
            Err(Error::InvalidState(_))
        ));
        let u = ConservedState([-1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(conserved_to_primitive(&u, &MetricData::flat()).is_err());
    }

    #[test]
    fn round_trip_on_random_states() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let m = spherical_metric(rng.random_range(0.3..2.8), 0.0).unwrap();
            let p = PrimitiveState::new(
                rng.random_range(0.1..5.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(0.5..5.0),
            );
            let back = conserved_to_primitive(&primitive_to_conserved(&p, &m), &m).unwrap();
            for (a, b) in p.to_array().iter().zip(back.to_array()) {
                worst = worst.max((a - b).abs() / a.abs().max(1.0));
            }
        }
        assert!(worst <= 1e-13, "worst relative error {worst:e}");
    }

    #[test]
    fn axial_freestream_projection() {
        let gas = IdealGas::default();
        let fs = FreestreamSpec::new([0.0, 0.0, 2.0], 1.0, 1.0, &gas).unwrap();
        let chart = SphericalChart::band(0.1, 3.0).unwrap();
        let (phi, theta) = (0.7, 2.1);
        let p = project_freestream(&fs, &chart, [phi, theta], DEFAULT_FD_STEP);
        assert!((p.v3 - 2.0 * phi.cos()).abs() < 1e-14);
        assert!((p.v1 + 2.0 * phi.sin()).abs() < 1e-14);
        assert!(p.v2.abs() < 1e-14);

        let fs = FreestreamSpec {
            velocity: [0.0, 0.0, 1.0],
            rho: 1.0,
            e: 1.0,
        };
        let p = project_freestream(&fs, &chart, [FRAC_PI_2, 0.4], DEFAULT_FD_STEP);
        assert!(p.v3.abs() < 1e-15);
        let m = spherical_metric(FRAC_PI_2, 0.4).unwrap();
        assert!((crossflow_speed(p.v(), &m) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn subsonic_freestream_is_rejected() {
        let gas = IdealGas::default();
        assert!(FreestreamSpec::from_mach(0.9, 0.0, &gas).is_err());
        let fs = FreestreamSpec::from_mach(2.0, 0.0, &gas).unwrap();
        assert!((gas.sound_speed(fs.rho, fs.e).unwrap() - 1.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn projection_preserves_speed(
            phi in 0.2f64..2.9, theta in 0.0f64..std::f64::consts::TAU,
            vx in -3.0f64..3.0, vy in -3.0f64..3.0, vz in -3.0f64..3.0,
        ) {
            let chart = SphericalChart::band(0.1, 3.0).unwrap();
            let fs = FreestreamSpec { velocity: [vx, vy, vz], rho: 1.0, e: 1.0 };
            let p = project_freestream(&fs, &chart, [phi, theta], DEFAULT_FD_STEP);
            let m = spherical_metric(phi, theta).unwrap();
            let q2 = m.norm_sq(p.v()) + p.v3 * p.v3;
            prop_assert!((q2 - fs.speed().powi(2)).abs() < 1e-10);
        }
    }
}
