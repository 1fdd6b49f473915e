//! Numeric checks of the characteristic analysis, the residual oracle and the MMS
//! orders, each condensed to one [`CheckRecord`].

use super::manufactured::{
    general_residual_with, mutated_source, spherical_residual_oracle, to_spherical_form,
    ManufacturedField, SourceFn, SphericalFreestream, TrigField,
};
use super::mms::{mms_convergence, MmsCase};
use crate::classify::{
    matrix_eigenvalues, potential_eigenvalues, potential_system, spectrum_distance,
    steady_eigenvalues, steady_matrix, unsteady_matrix, unsteady_wave_speeds,
};
use crate::flux::{geometric_source_with, jacobian_a, physical_flux, Matrix5};
use crate::gas::{GasModel, IdealGas};
use crate::geometry::{MetricData, SphericalChart};
use crate::solver::Reconstruction;
use crate::state::{crossflow_speed, FreestreamSpec, PrimitiveState};
use crate::{Error, Result};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::sync::Arc;

/// Outcome of one check: `value` is compared against `tolerance` (or a range).
#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub key: String,
    pub value: f64,
    pub tolerance: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckRecord {
    fn at_most(key: &str, value: f64, tol: f64, detail: String) -> Self {
        Self {
            key: key.into(),
            value,
            tolerance: format!("<= {tol:e}"),
            passed: value <= tol,
            detail,
        }
    }

    fn within(key: &str, value: f64, lo: f64, hi: f64, detail: String) -> Self {
        Self {
            key: key.into(),
            value,
            tolerance: format!("[{lo}, {hi}]"),
            passed: (lo..=hi).contains(&value),
            detail,
        }
    }

    fn failed(key: &str, err: Error) -> Self {
        Self {
            key: key.into(),
            value: f64::NAN,
            tolerance: "-".into(),
            passed: false,
            detail: err.to_string(),
        }
    }
}

fn record(key: &str, r: Result<CheckRecord>) -> CheckRecord {
    r.unwrap_or_else(|e| CheckRecord::failed(key, e))
}

/// Random positive-definite metric: `g_11, g_22 ∈ [0.3, 3]`, correlation below 0.8,
/// `√g` consistent, Christoffel symbols O(1) and symmetric in the lower pair.
pub fn random_metric(rng: &mut impl Rng) -> MetricData {
    let a: f64 = rng.random_range(0.3..3.0);
    let d: f64 = rng.random_range(0.3..3.0);
    let b = rng.random_range(-0.8..0.8) * (a * d).sqrt();
    let mut gamma = [[[0.0; 2]; 2]; 2];
    for plane in gamma.iter_mut() {
        let x = rng.random_range(-1.0..1.0);
        *plane = [
            [rng.random_range(-1.0..1.0), x],
            [x, rng.random_range(-1.0..1.0)],
        ];
    }
    MetricData::from_lower([[a, b], [b, d]], gamma).expect("positive definite by construction")
}

/// Random state with crossflow Mach number `q_c/c` drawn from `mach`.
pub fn random_state(
    rng: &mut impl Rng,
    metric: &MetricData,
    gas: &IdealGas,
    mach: std::ops::Range<f64>,
) -> PrimitiveState {
    let rho = rng.random_range(0.3..3.0);
    let c: f64 = rng.random_range(0.5..2.0);
    let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let raw = [t.cos(), t.sin()];
    let n = crossflow_speed(raw, metric);
    let q = rng.random_range(mach) * c;
    let e = c * c / (gas.gamma() * (gas.gamma() - 1.0));
    PrimitiveState::new(
        rho,
        q * raw[0] / n,
        q * raw[1] / n,
        rng.random_range(-2.0..2.0),
        e,
    )
}

/// Flux Jacobians against central differences of the flux in primitive variables.
pub fn jacobian_fidelity(samples: usize, seed: u64) -> CheckRecord {
    let key = "jacobian_fidelity";
    record(
        key,
        (|| {
            let gas = IdealGas::default();
            let mut rng = StdRng::seed_from_u64(seed);
            let mut worst: f64 = 0.0;
            for _ in 0..samples {
                let m = random_metric(&mut rng);
                let p = random_state(&mut rng, &m, &gas, 0.2..3.0);
                for axis in 0..2 {
                    let a = jacobian_a(&p, &m, &gas, axis)?;
                    let x = p.to_array();
                    let mut fd = Matrix5::zeros();
                    for k in 0..5 {
                        let h = 1e-5 * x[k].abs().max(1.0);
                        let (mut xp, mut xm) = (x, x);
                        xp[k] += h;
                        xm[k] -= h;
                        let fp = physical_flux(&PrimitiveState::from_array(xp), &m, &gas, axis)?;
                        let fm = physical_flux(&PrimitiveState::from_array(xm), &m, &gas, axis)?;
                        for r in 0..5 {
                            fd[(r, k)] = (fp[r] - fm[r]) / (2.0 * h);
                        }
                    }
                    let scale = a.amax().max(1.0);
                    worst = worst.max((a - fd).amax() / scale);
                }
            }
            Ok(CheckRecord::at_most(
                key,
                worst,
                1e-6,
                format!("{samples} states, both directions"),
            ))
        })(),
    )
}

/// Numeric spectrum of `(A¹)⁻¹A²` against the closed form on hyperbolic states, and
/// the spread of the triple root.
pub fn steady_spectrum(samples: usize, seed: u64) -> [CheckRecord; 2] {
    let run = || -> Result<(f64, f64)> {
        let gas = IdealGas::default();
        let mut rng = StdRng::seed_from_u64(seed);
        let (mut worst, mut spread): (f64, f64) = (0.0, 0.0);
        let mut done = 0;
        while done < samples {
            let m = random_metric(&mut rng);
            let p = random_state(&mut rng, &m, &gas, 1.05..3.0);
            let c = gas.sound_speed(p.rho, p.e)?;
            let den = p.v1 * p.v1 - m.g_up[0][0] * c * c;
            // keep ξ¹ well away from characteristic
            if p.v1.abs() < 0.1 * c || den.abs() < 0.1 * c * c * m.g_up[0][0] {
                continue;
            }
            done += 1;
            let exact = steady_eigenvalues(&p, &m, &gas)?;
            let num = matrix_eigenvalues(&steady_matrix(&p, &m, &gas)?)?;
            worst = worst.max(spectrum_distance(&exact, &num));
            let s = exact[0];
            let mut near: Vec<Complex64> = num.clone();
            near.sort_by(|a, b| (a - s).norm().total_cmp(&(b - s).norm()));
            let triple = &near[..3];
            for x in triple {
                for y in triple {
                    spread = spread.max((x - y).norm() / s.norm().max(1.0));
                }
            }
        }
        Ok((worst, spread))
    };
    match run() {
        Ok((w, s)) => [
            CheckRecord::at_most(
                "steady_eigenvalues",
                w,
                1e-8,
                format!("{samples} hyperbolic states"),
            ),
            CheckRecord::at_most(
                "steady_triple_root",
                s,
                1e-7,
                "spread of the v2/v1 triple".into(),
            ),
        ],
        Err(e) => [
            CheckRecord::failed("steady_eigenvalues", e),
            CheckRecord::failed(
                "steady_triple_root",
                Error::Verification("not evaluated".into()),
            ),
        ],
    }
}

/// Bisection on the realness of the acoustic pair along `v = t·v̂`; the located
/// transition is compared with the sonic point `t* = c/|v̂|`.
pub fn type_transition(seed: u64) -> CheckRecord {
    let key = "type_transition";
    record(
        key,
        (|| {
            let gas = IdealGas::default();
            let mut rng = StdRng::seed_from_u64(seed);
            let mut worst: f64 = 0.0;
            for _ in 0..20 {
                let m = random_metric(&mut rng);
                let base = random_state(&mut rng, &m, &gas, 1.0..1.0 + f64::EPSILON);
                let c = gas.sound_speed(base.rho, base.e)?;
                let dir = [base.v1 / c, base.v2 / c];
                let sonic = c / crossflow_speed(dir, &m);
                let at = |t: f64| PrimitiveState {
                    v1: t * dir[0],
                    v2: t * dir[1],
                    ..base
                };
                let complex = |t: f64| -> Result<bool> {
                    Ok(steady_eigenvalues(&at(t), &m, &gas)?[3].im != 0.0)
                };
                let (mut lo, mut hi) = (0.5 * sonic, 2.0 * sonic);
                if !complex(lo)? || complex(hi)? {
                    return Err(Error::Verification(
                        "family does not cross the sonic point".into(),
                    ));
                }
                while hi - lo > 1e-14 * sonic {
                    let mid = 0.5 * (lo + hi);
                    if complex(mid)? {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                worst = worst.max((0.5 * (lo + hi) - sonic).abs() / sonic);
            }
            Ok(CheckRecord::at_most(
                key,
                worst,
                1e-10,
                "20 families, relative to the sonic parameter".into(),
            ))
        })(),
    )
}

/// Spectrum of `A₀⁻¹(w₁A¹ + w₂A²)` against `{v·w ×3, v·w ± c}`.
pub fn pseudo_time_speeds(samples: usize, seed: u64) -> CheckRecord {
    let key = "pseudo_time_speeds";
    record(
        key,
        (|| {
            let gas = IdealGas::default();
            let mut rng = StdRng::seed_from_u64(seed);
            let mut worst: f64 = 0.0;
            for _ in 0..samples {
                let m = random_metric(&mut rng);
                let p = random_state(&mut rng, &m, &gas, 0.0..3.0);
                let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let raw = [t.cos(), t.sin()];
                let n = m.co_norm_sq(raw).sqrt();
                let w = [raw[0] / n, raw[1] / n];
                let exact = unsteady_wave_speeds(&p, &m, &gas, w)?.map(|x| Complex64::new(x, 0.0));
                let num = matrix_eigenvalues(&unsteady_matrix(&p, &m, &gas, w)?)?;
                worst = worst.max(spectrum_distance(&exact, &num));
                for z in &num {
                    worst = worst.max(z.im.abs());
                }
            }
            Ok(CheckRecord::at_most(
                key,
                worst,
                1e-8,
                format!("{samples} states, subsonic and supersonic crossflow"),
            ))
        })(),
    )
}

/// Potential-pair eigenvalues against the last two full-system eigenvalues, and the
/// numeric spectrum of `M₁⁻¹M₂`.
pub fn potential_consistency(samples: usize, seed: u64) -> [CheckRecord; 2] {
    let run = || -> Result<(f64, f64)> {
        let gas = IdealGas::default();
        let mut rng = StdRng::seed_from_u64(seed);
        let (mut same, mut num_err): (f64, f64) = (0.0, 0.0);
        let mut done = 0;
        while done < samples {
            let m = random_metric(&mut rng);
            let p = random_state(&mut rng, &m, &gas, 0.1..3.0);
            let (full, pot) = match (
                steady_eigenvalues(&p, &m, &gas),
                potential_eigenvalues(&p, &m, &gas),
            ) {
                (Ok(f), Ok(q)) => (f, q),
                (Err(Error::DegenerateDirection(_)), _)
                | (_, Err(Error::DegenerateDirection(_))) => continue,
                (Err(e), _) | (_, Err(e)) => return Err(e),
            };
            done += 1;
            for k in 0..2 {
                same = same.max((full[3 + k] - pot[k]).norm() / pot[k].norm().max(1.0));
            }
            let (m1, m2) = potential_system(&p, &m, &gas)?;
            let inv = m1
                .try_inverse()
                .ok_or_else(|| Error::DegenerateDirection("M1 singular".into()))?;
            num_err = num_err.max(spectrum_distance(&pot, &matrix_eigenvalues(&(inv * m2))?));
        }
        Ok((same, num_err))
    };
    match run() {
        Ok((a, b)) => [
            CheckRecord::at_most("potential_pair", a, 1e-12, format!("{samples} states")),
            CheckRecord::at_most(
                "potential_numeric",
                b,
                1e-8,
                "eigenvalues of M1^-1 M2".into(),
            ),
        ],
        Err(e) => [
            CheckRecord::failed("potential_pair", e),
            CheckRecord::failed(
                "potential_numeric",
                Error::Verification("not evaluated".into()),
            ),
        ],
    }
}

/// General-coordinate residuals on the spherical chart, transformed to the spherical
/// momentum form, against the spherical oracle on random smooth fields.
pub fn oracle_equivalence(fields: usize, seed: u64, source: SourceFn) -> CheckRecord {
    let key = "oracle_equivalence";
    record(
        key,
        (|| {
            let gas = IdealGas::default();
            let chart = SphericalChart::band(0.2, std::f64::consts::PI - 0.2)?;
            let mut rng = StdRng::seed_from_u64(seed);
            let mut worst: f64 = 0.0;
            for _ in 0..fields {
                let f = TrigField::random(&mut rng, 3, 2.0);
                for _ in 0..5 {
                    let xi = [
                        rng.random_range(0.4..2.7),
                        rng.random_range(0.0..std::f64::consts::TAU),
                    ];
                    let r = general_residual_with(&f, &chart, &gas, xi, 1e-3, source)?;
                    let t = to_spherical_form(&r, &f.eval(xi), xi[0].sin());
                    let o = spherical_residual_oracle(&f, &gas, xi[0], xi[1])?;
                    for k in 0..4 {
                        worst = worst.max((t[k] - o[k]).abs());
                    }
                }
            }
            Ok(CheckRecord::at_most(
                key,
                worst,
                1e-10,
                format!("{fields} fields, 5 points each"),
            ))
        })(),
    )
}

/// The spherical oracle on uniform axial freestream.
pub fn freestream_oracle(seed: u64) -> CheckRecord {
    let key = "freestream_oracle";
    record(
        key,
        (|| {
            let gas = IdealGas::default();
            let mut rng = StdRng::seed_from_u64(seed);
            let mut worst: f64 = 0.0;
            for _ in 0..50 {
                let fs = FreestreamSpec::from_mach(rng.random_range(1.5..4.0), 0.0, &gas)?;
                let f = SphericalFreestream(fs);
                let (phi, theta) = (
                    rng.random_range(0.2..2.9),
                    rng.random_range(0.0..std::f64::consts::TAU),
                );
                for r in spherical_residual_oracle(&f, &gas, phi, theta)? {
                    worst = worst.max(r.abs());
                }
            }
            Ok(CheckRecord::at_most(
                key,
                worst,
                1e-12,
                "50 random points".into(),
            ))
        })(),
    )
}

/// Truncation-error orders on `[8, 16, 32]` for both reconstructions.
pub fn mms_short(seed: u64) -> [CheckRecord; 2] {
    let (lo, hi) = ([0.6, 0.2], [1.4, 1.0]);
    let mut rng = StdRng::seed_from_u64(seed);
    let field = Arc::new(TrigField::monotone(&mut rng, lo, hi));
    let chart = match SphericalChart::patch(lo, hi, false) {
        Ok(c) => Arc::new(c),
        Err(e) => {
            return [
                CheckRecord::failed("mms_first_order", e),
                CheckRecord::failed(
                    "mms_second_order",
                    Error::Verification("not evaluated".into()),
                ),
            ]
        }
    };
    let run = |key: &str, recon, lo: f64, hi: f64| {
        let case = MmsCase {
            field: field.clone(),
            chart: chart.clone(),
            reconstruction: recon,
            gas: IdealGas::default(),
        };
        record(
            key,
            mms_convergence(&case, &[8, 16, 32]).map(|r| {
                let o = r.finest_orders();
                let (min, max) = o
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
                        (a.min(*x), b.max(*x))
                    });
                let value = if min < lo { min } else { max };
                CheckRecord::within(key, value, lo, hi, format!("orders {o:.3?}"))
            }),
        )
    };
    [
        run("mms_first_order", Reconstruction::FirstOrder, 0.8, 1.3),
        run("mms_second_order", Reconstruction::MusclMinmod, 1.7, 2.3),
    ]
}

/// Named groups of checks run by `conical verify`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Oracle,
    Eigen,
    Mms,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::Oracle, Suite::Eigen, Suite::Mms];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Oracle => "oracle",
            Suite::Eigen => "eigen",
            Suite::Mms => "mms",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown suite '{s}' (expected oracle, eigen or mms)"
                ))
            })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Replace the geometric source by [`mutated_source`] in the oracle suite.
    pub mutate_source: bool,
}

pub fn run_suite(suite: Suite, opts: VerifyOptions) -> Vec<CheckRecord> {
    match suite {
        Suite::Oracle => {
            let source: SourceFn = if opts.mutate_source {
                mutated_source
            } else {
                geometric_source_with
            };
            vec![oracle_equivalence(20, 5, source), freestream_oracle(6)]
        }
        Suite::Eigen => {
            let mut v = vec![jacobian_fidelity(200, 1)];
            v.extend(steady_spectrum(1000, 2));
            v.push(type_transition(3));
            v.push(pseudo_time_speeds(500, 4));
            v.extend(potential_consistency(500, 7));
            v
        }
        Suite::Mms => mms_short(8).to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        for s in Suite::ALL {
            for r in run_suite(s, VerifyOptions::default()) {
                assert!(r.passed, "{r:?}");
            }
        }
    }

    #[test]
    fn source_mutation_is_caught() {
        let r = run_suite(
            Suite::Oracle,
            VerifyOptions {
                mutate_source: true,
            },
        );
        assert!(!r[0].passed, "{:?}", r[0]);
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}
