//! Taylor–Maccoll solution for a circular cone at zero incidence, by shooting on the
//! shock angle.
//!
//! Velocities inside the shooter are scaled by the maximum adiabatic speed `V_max`.
//! Between shock and body the flow is isentropic and the polar velocity obeys
//!
//! ```text
//! V_r'' = [V_r V_θ² − A(2V_r + V_θ cot θ)] / (A − V_θ²),   A = (γ−1)/2 (1 − V_r² − V_θ²)
//! ```
//!
//! with `V_θ = V_r'`. The cone surface is where `V_θ` first vanishes.

use crate::{Error, Result};

/// State between shock and body on one ray, normalized by freestream values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileSample {
    /// Polar angle from the cone axis.
    pub theta: f64,
    /// Radial and polar velocity over `V∞`.
    pub v_r: f64,
    pub v_theta: f64,
    pub pressure: f64,
    pub density: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaylorMaccollSolution {
    pub mach: f64,
    pub half_angle: f64,
    pub gamma: f64,
    /// Shock angle from the axis (rad).
    pub shock_angle: f64,
    /// `ρ_c/ρ∞`, `P_c/P∞` and `|V_c|/V∞` on the cone surface.
    pub surface_density: f64,
    pub surface_pressure: f64,
    pub surface_speed: f64,
    /// `|V_θ|/V∞` left at the surface by the shooting.
    pub surface_normal_velocity: f64,
    /// Samples from the shock (first) to the body (last).
    pub profile: Vec<ProfileSample>,
}

impl TaylorMaccollSolution {
    /// `(P_c − P∞) / (½ρ∞V∞²)`.
    pub fn pressure_coefficient(&self) -> f64 {
        2.0 * (self.surface_pressure - 1.0) / (self.gamma * self.mach * self.mach)
    }
}

/// Minimum number of steps between shock and axis, and the local error bound per step.
const MIN_STEPS: usize = 2000;
const STEP_TOL: f64 = 1e-14;

struct Shot {
    cone_angle: f64,
    /// `(θ, V_r, V_θ)` in `V_max` units.
    path: Vec<(f64, f64, f64)>,
    /// Post-shock `p₂/p∞`, `ρ₂/ρ∞` and speed `V₂/V_max`.
    p2: f64,
    rho2: f64,
    v2: f64,
}

fn rhs(gamma: f64, theta: f64, y: [f64; 2]) -> [f64; 2] {
    let [vr, vt] = y;
    let a = 0.5 * (gamma - 1.0) * (1.0 - vr * vr - vt * vt);
    [
        vt,
        (vr * vt * vt - a * (2.0 * vr + vt / theta.tan())) / (a - vt * vt),
    ]
}

fn rk4(gamma: f64, theta: f64, y: [f64; 2], h: f64) -> [f64; 2] {
    let add = |y: [f64; 2], k: [f64; 2], s: f64| [y[0] + s * k[0], y[1] + s * k[1]];
    let k1 = rhs(gamma, theta, y);
    let k2 = rhs(gamma, theta + 0.5 * h, add(y, k1, 0.5 * h));
    let k3 = rhs(gamma, theta + 0.5 * h, add(y, k2, 0.5 * h));
    let k4 = rhs(gamma, theta + h, add(y, k3, h));
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Oblique shock at `beta`, then integrate toward the axis until `V_θ = 0`.
fn shoot(mach: f64, gamma: f64, beta: f64) -> Option<Shot> {
    let g = gamma;
    let mn2 = (mach * beta.sin()).powi(2);
    if mn2 <= 1.0 {
        return None;
    }
    let m2n2 = (1.0 + 0.5 * (g - 1.0) * mn2) / (g * mn2 - 0.5 * (g - 1.0));
    let m2 = mach * mach;
    let delta = (2.0 / beta.tan() * (m2 * beta.sin().powi(2) - 1.0)
        / (m2 * (g + (2.0 * beta).cos()) + 2.0))
        .atan();
    let mach2 = m2n2.sqrt() / (beta - delta).sin();
    let v2 = (2.0 / ((g - 1.0) * mach2 * mach2) + 1.0).powf(-0.5);
    let p2 = 1.0 + 2.0 * g / (g + 1.0) * (mn2 - 1.0);
    let rho2 = (g + 1.0) * mn2 / ((g - 1.0) * mn2 + 2.0);

    let mut y = [v2 * (beta - delta).cos(), -v2 * (beta - delta).sin()];
    let mut theta = beta;
    // just behind a weak shock the normal velocity is nearly sonic and the equation
    // is close to singular, so the step is adapted by step doubling
    let h_max = beta / MIN_STEPS as f64;
    let mut h = -h_max * 1e-6;
    let mut path = vec![(theta, y[0], y[1])];
    while theta > 1e-6 {
        let full = rk4(g, theta, y, h);
        let mid = rk4(g, theta, y, 0.5 * h);
        let half = rk4(g, theta + 0.5 * h, mid, 0.5 * h);
        let err = (half[0] - full[0]).abs().max((half[1] - full[1]).abs()) / 15.0;
        if !err.is_finite() {
            if h.abs() < 1e-15 {
                return None;
            }
            h *= 0.25;
            continue;
        }
        if err > STEP_TOL && h.abs() > 1e-15 {
            h *= (0.9 * (STEP_TOL / err).powf(0.2)).max(0.1);
            continue;
        }
        if half[1] >= 0.0 {
            // V_θ crosses zero inside this step: bisect on the step length
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..200 {
                let m = 0.5 * (lo + hi);
                if sub_step(g, theta, y, m * h)[1] < 0.0 {
                    lo = m;
                } else {
                    hi = m;
                }
                if hi - lo < 1e-17 {
                    break;
                }
            }
            let s = 0.5 * (lo + hi);
            let end = sub_step(g, theta, y, s * h);
            let cone_angle = theta + s * h;
            path.push((cone_angle, end[0], end[1]));
            return Some(Shot {
                cone_angle,
                path,
                p2,
                rho2,
                v2,
            });
        }
        theta += h;
        y = half;
        path.push((theta, y[0], y[1]));
        let grow = if err > 0.0 {
            (0.9 * (STEP_TOL / err).powf(0.2)).min(4.0)
        } else {
            4.0
        };
        h = (h * grow).max(-h_max).max(-theta);
    }
    None
}

/// Two half RK4 steps, matching the accuracy of accepted steps.
fn sub_step(g: f64, theta: f64, y: [f64; 2], h: f64) -> [f64; 2] {
    let mid = rk4(g, theta, y, 0.5 * h);
    rk4(g, theta + 0.5 * h, mid, 0.5 * h)
}

/// Conical shock and surface state for a cone of `half_angle` (rad) in a freestream
/// of Mach `mach`, weak-shock branch.
pub fn taylor_maccoll(mach: f64, half_angle: f64, gamma: f64) -> Result<TaylorMaccollSolution> {
    if !(mach > 1.0 && mach.is_finite()) {
        return Err(Error::Contract(format!(
            "freestream must be supersonic, got M = {mach}"
        )));
    }
    if !(half_angle > 0.0 && half_angle < std::f64::consts::FRAC_PI_2) {
        return Err(Error::Contract(format!(
            "cone half-angle {half_angle} outside (0, pi/2)"
        )));
    }
    if !(gamma > 1.0) {
        return Err(Error::Contract(format!("gamma must exceed 1, got {gamma}")));
    }
    let mu = (1.0 / mach).asin();
    let cone = |b: f64| shoot(mach, gamma, b).map(|s| s.cone_angle);

    // largest cone angle over shock angles: golden-section search
    let (mut a, mut b) = (mu + 1e-9, std::f64::consts::FRAC_PI_2 - 1e-9);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let f = |x: f64| cone(x).unwrap_or(f64::NEG_INFINITY);
    let (mut x1, mut x2) = (b - r * (b - a), a + r * (b - a));
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > 1e-10 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    let beta_max = 0.5 * (a + b);
    let max_cone = f(beta_max);
    if !(max_cone >= half_angle) {
        return Err(Error::NoAttachedSolution(format!(
            "cone half-angle {:.4} deg exceeds the detachment angle {:.4} deg at M = {mach}",
            half_angle.to_degrees(),
            max_cone.to_degrees()
        )));
    }

    // weak branch: cone angle increases with shock angle on (mu, beta_max). The
    // shooting is ill-conditioned right at the Mach angle, so the lower end walks
    // down from beta_max instead of starting there.
    let mut gap = 0.5 * (beta_max - mu);
    let mut lo = mu + gap;
    while !(f(lo) < half_angle) {
        gap *= 0.5;
        lo = mu + gap;
        if gap < 1e-12 {
            return Err(Error::NoAttachedSolution(format!(
                "no weak-branch shock angle below {beta_max} for half-angle {half_angle}"
            )));
        }
    }
    let mut hi = beta_max;
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < half_angle {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let beta = 0.5 * (lo + hi);
    let shot = shoot(mach, gamma, beta)
        .ok_or_else(|| Error::NoAttachedSolution("shooting failed at the root".into()))?;

    let g = gamma;
    // V_max/V∞
    let vmax = (2.0 / ((g - 1.0) * mach * mach) + 1.0).sqrt();
    let iso = |vr: f64, vt: f64| (1.0 - vr * vr - vt * vt) / (1.0 - shot.v2 * shot.v2);
    let profile: Vec<ProfileSample> = shot
        .path
        .iter()
        .map(|&(theta, vr, vt)| {
            let t = iso(vr, vt);
            ProfileSample {
                theta,
                v_r: vr * vmax,
                v_theta: vt * vmax,
                pressure: shot.p2 * t.powf(g / (g - 1.0)),
                density: shot.rho2 * t.powf(1.0 / (g - 1.0)),
            }
        })
        .collect();
    let last = *profile.last().expect("non-empty path");
    Ok(TaylorMaccollSolution {
        mach,
        half_angle,
        gamma,
        shock_angle: beta,
        surface_density: last.density,
        surface_pressure: last.pressure,
        surface_speed: last.v_r.hypot(last.v_theta),
        surface_normal_velocity: last.v_theta.abs(),
        profile,
    })
}
