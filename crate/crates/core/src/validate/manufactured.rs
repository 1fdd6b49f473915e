//! Manufactured fields and the two independent residual evaluations used to check
//! the flux/source definitions.

use crate::flux::{geometric_source_with, physical_flux_with, SourceVector};
use crate::gas::GasModel;
use crate::geometry::{Chart, MetricData};
use crate::state::{FreestreamSpec, PrimitiveState};
use crate::Result;
use rand::Rng;

/// A smooth primitive field over chart coordinates with analytic derivatives.
pub trait ManufacturedField: Send + Sync {
    fn eval(&self, xi: [f64; 2]) -> PrimitiveState;

    /// `grad[a][k] = ∂q_k/∂ξ^a` for `q = (ρ, v¹, v², V³, e)`.
    fn grad(&self, xi: [f64; 2]) -> [[f64; 5]; 2];
}

/// `amplitude · sin(k₁ξ¹ + k₂ξ² + phase)`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrigTerm {
    pub amplitude: f64,
    pub k: [f64; 2],
    pub phase: f64,
}

/// Each primitive is a constant plus a sum of [`TrigTerm`]s.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigField {
    pub base: [f64; 5],
    pub terms: [Vec<TrigTerm>; 5],
}

impl TrigField {
    /// Random field with `ρ, e ∈ [0.7, 2.3]` and O(1) velocities; `modes` terms per
    /// component with wavenumbers up to `kmax`.
    pub fn random(rng: &mut impl Rng, modes: usize, kmax: f64) -> Self {
        let mut base = [0.0; 5];
        let terms = std::array::from_fn(|c| {
            let positive = c == 0 || c == 4;
            base[c] = if positive {
                rng.random_range(1.2..1.8)
            } else {
                rng.random_range(-1.0..1.0)
            };
            let budget = if positive { 0.5 } else { 0.8 };
            (0..modes)
                .map(|_| TrigTerm {
                    amplitude: rng.random_range(-1.0..1.0) * budget / modes as f64,
                    k: [rng.random_range(-kmax..kmax), rng.random_range(-kmax..kmax)],
                    phase: rng.random_range(0.0..std::f64::consts::TAU),
                })
                .collect()
        });
        Self { base, terms }
    }

    /// Single-mode field on the rectangle `[lo, hi]` whose phase `k·ξ + φ₀` sweeps
    /// `[0.2, 1.35]`, so every component is strictly monotone with one-signed
    /// curvature along both coordinates and a minmod limiter never clips it.
    pub fn monotone(rng: &mut impl Rng, lo: [f64; 2], hi: [f64; 2]) -> Self {
        let (start, span) = (0.2, 1.15);
        let mut base = [0.0; 5];
        let terms = std::array::from_fn(|c| {
            let positive = c == 0 || c == 4;
            base[c] = if positive {
                rng.random_range(1.2..1.8)
            } else {
                rng.random_range(-1.0..1.0)
            };
            let amp = rng.random_range(0.15..0.4) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let split = rng.random_range(0.3..0.7);
            let k: [f64; 2] = std::array::from_fn(|a| {
                let share = if a == 0 { split } else { 1.0 - split };
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                sign * span * share / (hi[a] - lo[a])
            });
            let min: f64 = (0..2).map(|a| (k[a] * lo[a]).min(k[a] * hi[a])).sum();
            TrigTerm {
                amplitude: amp,
                k,
                phase: start - min,
            }
        });
        Self::single_mode(base, terms)
    }

    /// Single-term field per component, used where the limiter must stay inactive:
    /// every argument `k·ξ + phase` has to remain inside `(0, π/2)` over the domain.
    pub fn single_mode(base: [f64; 5], terms: [TrigTerm; 5]) -> Self {
        Self {
            base,
            terms: terms.map(|t| vec![t]),
        }
    }
}

impl ManufacturedField for TrigField {
    fn eval(&self, xi: [f64; 2]) -> PrimitiveState {
        let q: [f64; 5] = std::array::from_fn(|c| {
            self.base[c]
                + self.terms[c]
                    .iter()
                    .map(|t| t.amplitude * (t.k[0] * xi[0] + t.k[1] * xi[1] + t.phase).sin())
                    .sum::<f64>()
        });
        PrimitiveState::from_array(q)
    }

    fn grad(&self, xi: [f64; 2]) -> [[f64; 5]; 2] {
        std::array::from_fn(|a| {
            std::array::from_fn(|c| {
                self.terms[c]
                    .iter()
                    .map(|t| {
                        t.amplitude * t.k[a] * (t.k[0] * xi[0] + t.k[1] * xi[1] + t.phase).cos()
                    })
                    .sum()
            })
        })
    }
}

/// Uniform freestream on the spherical chart `(φ, θ)`; an exact conical solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalFreestream(pub FreestreamSpec);

impl SphericalFreestream {
    fn frame(phi: f64, theta: f64) -> [[f64; 3]; 3] {
        let (s, c) = phi.sin_cos();
        let (st, ct) = theta.sin_cos();
        [
            [s * ct, s * st, c],
            [c * ct, c * st, -s],
            [-s * st, s * ct, 0.0],
        ]
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl ManufacturedField for SphericalFreestream {
    fn eval(&self, xi: [f64; 2]) -> PrimitiveState {
        let [x, bp, bt] = Self::frame(xi[0], xi[1]);
        let v = self.0.velocity;
        let s2 = xi[0].sin().powi(2);
        PrimitiveState::new(self.0.rho, dot(v, bp), dot(v, bt) / s2, dot(v, x), self.0.e)
    }

    fn grad(&self, xi: [f64; 2]) -> [[f64; 5]; 2] {
        let (phi, theta) = (xi[0], xi[1]);
        let (s, c) = phi.sin_cos();
        let (st, ct) = theta.sin_cos();
        let [x, bp, bt] = Self::frame(phi, theta);
        let v = self.0.velocity;
        // ∂φB_θ = ∂θB_φ = (−c·sθ, c·cθ, 0), ∂θB_θ = (−s·cθ, −s·sθ, 0)
        let cross = [-c * st, c * ct, 0.0];
        let dtt = [-s * ct, -s * st, 0.0];
        let vt = dot(v, bt);
        [
            [
                0.0,
                -dot(v, x),
                dot(v, cross) / (s * s) - 2.0 * c * vt / (s * s * s),
                dot(v, bp),
                0.0,
            ],
            [0.0, dot(v, cross), dot(v, dtt) / (s * s), dot(v, bt), 0.0],
        ]
    }
}

/// Signature of a geometric source given primitives, metric and pressure.
pub type SourceFn = fn(&PrimitiveState, &MetricData, f64) -> SourceVector;

/// Deliberately wrong source (sign of the crossflow term in the radial equation),
/// used to show the residual oracle catches source errors.
pub fn mutated_source(p: &PrimitiveState, m: &MetricData, pressure: f64) -> SourceVector {
    let mut s = geometric_source_with(p, m, pressure);
    s[3] += 2.0 * p.rho * m.sqrt_g * m.norm_sq(p.v());
    s
}

/// `∂_β F^β + S` of a manufactured field on a chart, with the divergence from a
/// sixth-order central difference of the flux (metric re-evaluated at each point).
pub fn general_residual<G: GasModel + ?Sized, C: Chart + ?Sized>(
    field: &dyn ManufacturedField,
    chart: &C,
    gas: &G,
    xi: [f64; 2],
    h: f64,
) -> Result<[f64; 5]> {
    general_residual_with(field, chart, gas, xi, h, geometric_source_with)
}

pub fn general_residual_with<G: GasModel + ?Sized, C: Chart + ?Sized>(
    field: &dyn ManufacturedField,
    chart: &C,
    gas: &G,
    xi: [f64; 2],
    h: f64,
    source: SourceFn,
) -> Result<[f64; 5]> {
    const W: [(f64, f64); 6] = [
        (-3.0, -1.0),
        (-2.0, 9.0),
        (-1.0, -45.0),
        (1.0, 45.0),
        (2.0, -9.0),
        (3.0, 1.0),
    ];
    let metric_h = 1e-4;
    let mut r = [0.0; 5];
    for axis in 0..2 {
        for (off, w) in W {
            let mut p = xi;
            p[axis] += off * h;
            let q = field.eval(p);
            let m = chart.metric(p, metric_h)?;
            let f = physical_flux_with(&q, &m, gas.pressure(q.rho, q.e)?.p, axis);
            for k in 0..5 {
                r[k] += w * f[k] / (60.0 * h);
            }
        }
    }
    let q = field.eval(xi);
    let m = chart.metric(xi, metric_h)?;
    let s = source(&q, &m, gas.pressure(q.rho, q.e)?.p);
    for k in 0..5 {
        r[k] += s[k];
    }
    Ok(r)
}

/// Map general-coordinate residuals on the spherical chart to the classical
/// spherical form: mass as is, surface momenta with the mass equation removed and
/// divided by `ρ√g` and `ρ` respectively, radial momentum likewise by `ρ√g`.
pub fn to_spherical_form(r: &[f64; 5], p: &PrimitiveState, sqrt_g: f64) -> [f64; 4] {
    [
        r[0],
        (r[1] - p.v1 * r[0]) / (p.rho * sqrt_g),
        (r[2] - p.v2 * r[0]) / p.rho,
        (r[3] - p.v3 * r[0]) / (p.rho * sqrt_g),
    ]
}

/// Classical conical continuity and momentum equations in spherical coordinates
/// `(φ, θ)`, evaluated from the field's analytic derivatives.
pub fn spherical_residual_oracle<G: GasModel + ?Sized>(
    field: &dyn ManufacturedField,
    gas: &G,
    phi: f64,
    theta: f64,
) -> Result<[f64; 4]> {
    let xi = [phi, theta];
    let q = field.eval(xi);
    let [dp, dt] = field.grad(xi);
    let (s, c) = phi.sin_cos();
    let pe = gas.pressure(q.rho, q.e)?;
    let pres = |d: &[f64; 5]| pe.p_rho * d[0] + pe.p_e * d[4];
    let (rho, vp, vt, vr) = (q.rho, q.v1, q.v2, q.v3);

    let mass = (dp[0] * vp + rho * dp[1]) * s
        + rho * vp * c
        + (dt[0] * vt + rho * dt[2]) * s
        + 2.0 * rho * vr * s;
    let mom_phi = vp * dp[1] + vt * dt[1] + pres(&dp) / rho + vp * vr - vt * vt * s * c;
    let mom_theta = vp * (dp[2] * s + vt * c)
        + vt * s * dt[2]
        + pres(&dt) / (rho * s)
        + vt * vr * s
        + vt * vp * c;
    let mom_r = vp * dp[3] + vt * dt[3] - vp * vp - vt * vt * s * s;
    Ok([mass, mom_phi, mom_theta, mom_r])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::IdealGas;
    use crate::geometry::SphericalChart;
    use rand::SeedableRng;

    fn fd_grad(f: &dyn ManufacturedField, xi: [f64; 2]) -> [[f64; 5]; 2] {
        let h = 1e-6;
        std::array::from_fn(|a| {
            let mut p = xi;
            let mut m = xi;
            p[a] += h;
            m[a] -= h;
            let (fp, fm) = (f.eval(p).to_array(), f.eval(m).to_array());
            std::array::from_fn(|k| (fp[k] - fm[k]) / (2.0 * h))
        })
    }

    #[test]
    fn analytic_gradients_match_differences() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(8);
        let gas = IdealGas::default();
        let fields: Vec<Box<dyn ManufacturedField>> = vec![
            Box::new(TrigField::random(&mut rng, 3, 2.0)),
            Box::new(SphericalFreestream(
                FreestreamSpec::new([0.4, -0.3, 1.9], 1.0, 1.8, &gas).unwrap(),
            )),
        ];
        for f in &fields {
            let xi = [0.9, 2.2];
            let (a, b) = (f.grad(xi), fd_grad(f.as_ref(), xi));
            for d in 0..2 {
                for k in 0..5 {
                    assert!(
                        (a[d][k] - b[d][k]).abs() < 1e-7,
                        "{d} {k}: {} vs {}",
                        a[d][k],
                        b[d][k]
                    );
                }
            }
        }
    }

    #[test]
    fn axisymmetric_mass_reduces_to_one_dimensional_form() {
        let f = TrigField {
            base: [1.5, 0.3, 0.0, 0.8, 2.0],
            terms: [
                vec![TrigTerm {
                    amplitude: 0.2,
                    k: [1.3, 0.0],
                    phase: 0.4,
                }],
                vec![TrigTerm {
                    amplitude: 0.5,
                    k: [0.7, 0.0],
                    phase: 1.0,
                }],
                vec![],
                vec![TrigTerm {
                    amplitude: 0.1,
                    k: [2.0, 0.0],
                    phase: 0.0,
                }],
                vec![],
            ],
        };
        let gas = IdealGas::default();
        let phi = 0.8;
        let r = spherical_residual_oracle(&f, &gas, phi, 1.0).unwrap();
        let q = f.eval([phi, 1.0]);
        let d = f.grad([phi, 1.0])[0];
        let (s, c) = phi.sin_cos();
        let one_d = (d[0] * q.v1 + q.rho * d[1]) * s + q.rho * q.v1 * c + 2.0 * q.rho * q.v3 * s;
        assert!((r[0] - one_d).abs() < 1e-14);
    }

    #[test]
    fn residual_routes_agree_on_a_random_field() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(21);
        let gas = IdealGas::default();
        let chart = SphericalChart::band(0.2, 2.9).unwrap();
        let f = TrigField::random(&mut rng, 3, 2.0);
        let xi = [1.1, 0.7];
        let r = general_residual(&f, &chart, &gas, xi, 1e-3).unwrap();
        let t = to_spherical_form(&r, &f.eval(xi), xi[0].sin());
        let o = spherical_residual_oracle(&f, &gas, xi[0], xi[1]).unwrap();
        for k in 0..4 {
            assert!((t[k] - o[k]).abs() < 1e-10, "{k}: {} vs {}", t[k], o[k]);
        }
        let bad = general_residual_with(&f, &chart, &gas, xi, 1e-3, mutated_source).unwrap();
        let t = to_spherical_form(&bad, &f.eval(xi), xi[0].sin());
        assert!((t[3] - o[3]).abs() > 1e-3);
    }
}
