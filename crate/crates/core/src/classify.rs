//! Characteristic analysis of the steady system and of its pseudo-time extension.
//!
//! The steady system is hyperbolic where the crossflow is supersonic (`q_c > c`)
//! and elliptic where it is subsonic. Adding a pseudo-time derivative gives a system
//! whose wave speeds `v·w, v·w ± c` are real everywhere.

use crate::flux::{jacobian_a, jacobian_a0, Matrix5};
use crate::gas::GasModel;
use crate::geometry::MetricData;
use crate::state::{crossflow_speed, PrimitiveState};
use crate::{Error, Result};
use nalgebra::{DMatrix, Matrix2, SMatrix, Schur};
use num_complex::Complex64;

/// Default sonic tolerance, relative to `c`.
const SCHUR_MAX_ITERATIONS: usize = 10_000;

pub const DEFAULT_SONIC_TOL: f64 = 1e-8;

/// Relative tolerance for the time-like degeneracy of `ξ¹`.
const DEGENERACY_TOL: f64 = 1e-10;

/// Tolerance on `g^{αβ}w_αw_β = 1` for direction arguments.
const NORMALIZATION_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FlowType {
    Hyperbolic,
    Elliptic,
    Sonic,
}

impl FlowType {
    pub fn as_str(&self) -> &'static str {
        match self {
            FlowType::Hyperbolic => "hyperbolic",
            FlowType::Elliptic => "elliptic",
            FlowType::Sonic => "sonic",
        }
    }
}

impl std::str::FromStr for FlowType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hyperbolic" => Ok(FlowType::Hyperbolic),
            "elliptic" => Ok(FlowType::Elliptic),
            "sonic" => Ok(FlowType::Sonic),
            other => Err(Error::FieldFormat(format!("unknown flow type '{other}'"))),
        }
    }
}

/// Type of the steady system at a point; `margin = q_c − c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TypeLabel {
    pub kind: FlowType,
    pub margin: f64,
}

/// Label from crossflow speed and sound speed.
pub fn classify_speeds(q_c: f64, c: f64, tol: f64) -> TypeLabel {
    let margin = q_c - c;
    let kind = if margin > tol * c {
        FlowType::Hyperbolic
    } else if margin < -tol * c {
        FlowType::Elliptic
    } else {
        FlowType::Sonic
    };
    TypeLabel { kind, margin }
}

pub fn classify<G: GasModel + ?Sized>(
    p: &PrimitiveState,
    metric: &MetricData,
    gas: &G,
    tol: f64,
) -> Result<TypeLabel> {
    let c = gas.sound_speed(p.rho, p.e)?;
    Ok(classify_speeds(crossflow_speed(p.v(), metric), c, tol))
}

/// The acoustic pair `(v¹v² − c²g¹² ∓ (c/√g)√(q_c² − c²)) / ((v¹)² − g¹¹c²)`.
fn acoustic_pair(v: [f64; 2], c: f64, metric: &MetricData) -> Result<[Complex64; 2]> {
    let g11 = metric.g_up[0][0];
    let den = v[0] * v[0] - g11 * c * c;
    let scale = v[0] * v[0] + g11 * c * c;
    if den.abs() <= DEGENERACY_TOL * scale {
        return Err(Error::DegenerateDirection(format!(
            "xi1 is not time-like: (v1)^2 - g^11 c^2 = {den:e}"
        )));
    }
    let num = v[0] * v[1] - c * c * metric.g_up[0][1];
    let q2 = metric.norm_sq(v);
    let mut rad = q2 - c * c;
    // rounding noise around the sonic point is a double root
    if rad.abs() <= 4.0 * f64::EPSILON * (q2 + c * c) {
        rad = 0.0;
    }
    let root = if rad >= 0.0 {
        Complex64::new(rad.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-rad).sqrt())
    };
    let k = c / metric.sqrt_g;
    Ok([(num - k * root) / den, (num + k * root) / den])
}

/// Eigenvalues of `(A¹)⁻¹A²`: the triple `v²/v¹` followed by the acoustic pair.
pub fn steady_eigenvalues<G: GasModel + ?Sized>(
    p: &PrimitiveState,
    metric: &MetricData,
    gas: &G,
) -> Result<[Complex64; 5]> {
    let c = gas.sound_speed(p.rho, p.e)?;
    let scale = p.v1.abs().max(p.v2.abs()).max(c * metric.g_up[0][0].sqrt());
    if p.v1.abs() <= DEGENERACY_TOL * scale {
        return Err(Error::DegenerateDirection(format!(
            "xi1 is not time-like: v1 = {:e}",
            p.v1
        )));
    }
    let [lm, lp] = acoustic_pair(p.v(), c, metric)?;
    let s = Complex64::new(p.v2 / p.v1, 0.0);
    Ok([s, s, s, lm, lp])
}

/// Characteristic slopes of the potential equation, which coincide with the
/// acoustic pair of the full system.
pub fn potential_eigenvalues<G: GasModel + ?Sized>(
    p: &PrimitiveState,
    metric: &MetricData,
    gas: &G,
) -> Result<[Complex64; 2]> {
    let c = gas.sound_speed(p.rho, p.e)?;
    acoustic_pair(p.v(), c, metric)
}

/// First-order form `M₁ ∂₁u + M₂ ∂₂u = 0` of the potential equation in
/// `u = (∂₁Φ, ∂₂Φ)`, with coefficients `a_{ij} = g^{ij} − v^iv^j/c²`; the second row
/// is irrotationality. Returns `(M₁, M₂)`.
pub fn potential_system<G: GasModel + ?Sized>(
    p: &PrimitiveState,
    metric: &MetricData,
    gas: &G,
) -> Result<(Matrix2<f64>, Matrix2<f64>)> {
    let c = gas.sound_speed(p.rho, p.e)?;
    let v = p.v();
    let a = |i: usize, j: usize| metric.g_up[i][j] - v[i] * v[j] / (c * c);
    let m1 = Matrix2::new(a(0, 0), a(0, 1), 0.0, 1.0);
    let m2 = Matrix2::new(a(0, 1), a(1, 1), -1.0, 0.0);
    Ok((m1, m2))
}

/// Pseudo-time wave speeds along a covariant direction `w` with `g^{αβ}w_αw_β = 1`.
pub fn unsteady_wave_speeds<G: GasModel + ?Sized>(
    p: &PrimitiveState,
    metric: &MetricData,
    gas: &G,
    w: [f64; 2],
) -> Result<[f64; 5]> {
    let n = metric.co_norm_sq(w);
    if !((n - 1.0).abs() <= NORMALIZATION_TOL) {
        return Err(Error::Contract(format!(
            "direction not metric-normalized: g^ab w_a w_b = {n}"
        )));
    }
    let c = gas.sound_speed(p.rho, p.e)?;
    let vw = p.v1 * w[0] + p.v2 * w[1];
    Ok([vw, vw, vw, vw - c, vw + c])
}

/// Largest pseudo-time speed in coordinate units for fluxes along `ξ^axis`:
/// `(|v·ŵ| + c)·√g^{αα}` with `ŵ` the normalized coordinate covector.
#[inline]
pub fn coordinate_wave_speed(v: [f64; 2], c: f64, metric: &MetricData, axis: usize) -> f64 {
    let norm = metric.g_up[axis][axis].sqrt();
    v[axis].abs() + c * norm
}

/// Eigenvalues of a small dense matrix by a real Schur decomposition. The QR sweep
/// can stall at a one-ulp tolerance on repeated roots, so the tolerance is relaxed
/// step by step until it converges.
pub fn matrix_eigenvalues<const N: usize>(m: &SMatrix<f64, N, N>) -> Result<Vec<Complex64>> {
    let d = DMatrix::from_column_slice(N, N, m.as_slice());
    for scale in [4.0, 16.0, 64.0, 256.0] {
        if let Some(schur) = Schur::try_new(d.clone(), scale * f64::EPSILON, SCHUR_MAX_ITERATIONS) {
            return Ok(schur.complex_eigenvalues().iter().copied().collect());
        }
    }
    Err(Error::Verification(
        "Schur iteration did not converge".into(),
    ))
}

/// `(A¹)⁻¹A²`, whose spectrum is the steady characteristic set.
pub fn steady_matrix<G: GasModel + ?Sized>(
    p: &PrimitiveState,
    metric: &MetricData,
    gas: &G,
) -> Result<Matrix5> {
    let a1 = jacobian_a(p, metric, gas, 0)?;
    let a2 = jacobian_a(p, metric, gas, 1)?;
    let inv = a1
        .try_inverse()
        .ok_or_else(|| Error::DegenerateDirection("A1 is singular".into()))?;
    Ok(inv * a2)
}

/// `A₀⁻¹(w₁A¹ + w₂A²)`, whose spectrum is the pseudo-time wave-speed set.
pub fn unsteady_matrix<G: GasModel + ?Sized>(
    p: &PrimitiveState,
    metric: &MetricData,
    gas: &G,
    w: [f64; 2],
) -> Result<Matrix5> {
    let a0 = jacobian_a0(p, metric)?;
    let aw = jacobian_a(p, metric, gas, 0)? * w[0] + jacobian_a(p, metric, gas, 1)? * w[1];
    let inv = a0
        .try_inverse()
        .ok_or_else(|| Error::InvalidState("A0 is singular".into()))?;
    Ok(inv * aw)
}

/// Largest distance from each value in `a` to its partner in `b`, pairing greedily
/// by nearest remaining value, relative to `max(1, |a|)`.
pub fn spectrum_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "spectra of different sizes");
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("non-empty");
        used[k] = true;
        worst = worst.max(d / x.norm().max(1.0));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::IdealGas;
    use crate::geometry::{spherical_metric, SphericalChart, DEFAULT_FD_STEP};
    use crate::state::{project_freestream, FreestreamSpec};
    use proptest::prelude::*;

    /// Ideal gas state with the requested sound speed at ρ = 1.
    fn state_with_c(v: [f64; 2], v3: f64, c: f64) -> PrimitiveState {
        let g = IdealGas::default();
        let e = c * c / (g.gamma() * (g.gamma() - 1.0));
        PrimitiveState::new(1.0, v[0], v[1], v3, e)
    }

    #[test]
    fn closed_form_example() {
        let g = IdealGas::default();
        let p = state_with_c([1.0, 0.0], 0.0, 0.5);
        let l = steady_eigenvalues(&p, &MetricData::flat(), &g).unwrap();
        for z in &l[..3] {
            assert_eq!(*z, Complex64::new(0.0, 0.0));
        }
        let expect = 0.5 * 0.75f64.sqrt() / 0.75;
        assert!((l[3].re + expect).abs() < 1e-12 && l[3].im == 0.0);
        assert!((l[4].re - expect).abs() < 1e-12);
        assert!((expect - 0.577_35).abs() < 1e-5);

        let num = matrix_eigenvalues(&steady_matrix(&p, &MetricData::flat(), &g).unwrap()).unwrap();
        assert!(spectrum_distance(&l, &num) < 1e-8);
    }

    #[test]
    fn sonic_state_has_double_root() {
        let g = IdealGas::default();
        let m = spherical_metric(0.7, 0.0).unwrap();
        // q_c = c with v1 = c·cos(a), v2 = c·sin(a)/sinφ
        let c = 0.8;
        let (s, _) = 0.7f64.sin_cos();
        let a = 0.3f64;
        let p = state_with_c([c * a.cos(), c * a.sin() / s], 0.2, c);
        let l = steady_eigenvalues(&p, &m, &g).unwrap();
        assert!((l[3] - l[4]).norm() < 1e-7);
    }

    #[test]
    fn subsonic_crossflow_gives_complex_pair() {
        let g = IdealGas::default();
        let p = state_with_c([0.5, 0.2], 0.1, 1.0);
        let l = steady_eigenvalues(&p, &MetricData::flat(), &g).unwrap();
        assert!(l[3].im != 0.0);
        assert!((l[3] - l[4].conj()).norm() < 1e-14);
    }

    #[test]
    fn degenerate_direction_is_an_error() {
        let g = IdealGas::default();
        let p = state_with_c([1.0, 0.3], 0.0, 1.0);
        assert!(matches!(
            steady_eigenvalues(&p, &MetricData::flat(), &g),
            Err(Error::DegenerateDirection(_))
        ));
        let p = state_with_c([0.0, 2.0], 0.0, 1.0);
        assert!(matches!(
            steady_eigenvalues(&p, &MetricData::flat(), &g),
            Err(Error::DegenerateDirection(_))
        ));
    }

    #[test]
    fn classification_rule() {
        assert_eq!(
            classify_speeds(0.9, 1.0, DEFAULT_SONIC_TOL).kind,
            FlowType::Elliptic
        );
        assert_eq!(
            classify_speeds(1.0, 1.0, DEFAULT_SONIC_TOL).kind,
            FlowType::Sonic
        );
        assert_eq!(
            classify_speeds(1.1, 1.0, DEFAULT_SONIC_TOL).kind,
            FlowType::Hyperbolic
        );
        assert!((classify_speeds(0.9, 1.0, 0.0).margin + 0.1).abs() < 1e-15);

        let g = IdealGas::default();
        let fs = FreestreamSpec::from_mach(2.0, 0.0, &g).unwrap();
        let chart = SphericalChart::band(0.1, 3.0).unwrap();
        let p = project_freestream(&fs, &chart, [1.2, 0.4], DEFAULT_FD_STEP);
        let m = spherical_metric(1.2, 0.4).unwrap();
        assert_eq!(
            classify(&p, &m, &g, DEFAULT_SONIC_TOL).unwrap().kind,
            FlowType::Hyperbolic
        );
    }

    #[test]
    fn rest_state_wave_speeds() {
        let g = IdealGas::default();
        let p = state_with_c([0.0, 0.0], 0.5, 1.3);
        let m = spherical_metric(0.6, 0.0).unwrap();
        let w = [0.0, 0.6f64.sin()];
        let l = unsteady_wave_speeds(&p, &m, &g, w).unwrap();
        assert!(l[..3].iter().all(|x| *x == 0.0));
        assert!((l[3] + 1.3).abs() < 1e-12 && (l[4] - 1.3).abs() < 1e-12);
        assert!(matches!(
            unsteady_wave_speeds(&p, &m, &g, [0.0, 1.0]),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn coordinate_speed_scales_normalized_speed() {
        let g = IdealGas::default();
        let m = spherical_metric(0.4, 0.0).unwrap();
        let p = state_with_c([0.3, -1.5], 0.0, 1.0);
        let c = g.sound_speed(p.rho, p.e).unwrap();
        for axis in 0..2 {
            let mut w = [0.0; 2];
            w[axis] = 1.0 / m.g_up[axis][axis].sqrt();
            let l = unsteady_wave_speeds(&p, &m, &g, w).unwrap();
            let top = l.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            let scaled = top * m.g_up[axis][axis].sqrt();
            assert!((coordinate_wave_speed(p.v(), c, &m, axis) - scaled).abs() < 1e-12);
        }
    }

    #[test]
    fn potential_matrix_spectrum() {
        let g = IdealGas::default();
        let m = spherical_metric(1.1, 0.0).unwrap();
        let p = state_with_c([1.4, 0.9], 0.3, 1.0);
        let (m1, m2) = potential_system(&p, &m, &g).unwrap();
        let num = matrix_eigenvalues(&(m1.try_inverse().unwrap() * m2)).unwrap();
        let exact = potential_eigenvalues(&p, &m, &g).unwrap();
        assert!(spectrum_distance(&exact, &num) < 1e-8);
        assert!(exact.iter().all(|z| z.im == 0.0));
    }

    proptest! {
        #[test]
        fn label_agrees_with_margin(q in 0.0f64..3.0, c in 0.1f64..3.0) {
            let t = classify_speeds(q, c, DEFAULT_SONIC_TOL);
            match t.kind {
                FlowType::Hyperbolic => prop_assert!(t.margin > 0.0),
                FlowType::Elliptic => prop_assert!(t.margin < 0.0),
                FlowType::Sonic => prop_assert!(t.margin.abs() <= DEFAULT_SONIC_TOL * c),
            }
        }

        #[test]
        fn unsteady_speeds_do_not_depend_on_axis_labels(
            v1 in -2.0f64..2.0, v2 in -2.0f64..2.0, t in 0.0f64..std::f64::consts::TAU, phi in 0.3f64..2.8,
        ) {
            let g = IdealGas::default();
            let m = spherical_metric(phi, 0.0).unwrap();
            let p = state_with_c([v1, v2], 0.0, 1.0);
            let raw = [t.cos(), t.sin()];
            let n = m.co_norm_sq(raw).sqrt();
            let w = [raw[0] / n, raw[1] / n];
            let a = unsteady_wave_speeds(&p, &m, &g, w).unwrap();
            // swap the coordinate labels
            let mut ms = m;
            ms.g_lo = [[m.g_lo[1][1], m.g_lo[1][0]], [m.g_lo[0][1], m.g_lo[0][0]]];
            ms.g_up = [[m.g_up[1][1], m.g_up[1][0]], [m.g_up[0][1], m.g_up[0][0]]];
            let ps = PrimitiveState { v1: p.v2, v2: p.v1, ..p };
            let b = unsteady_wave_speeds(&ps, &ms, &g, [w[1], w[0]]).unwrap();
            for k in 0..5 {
                prop_assert!((a[k] - b[k]).abs() < 1e-12);
            }
        }
    }
}
