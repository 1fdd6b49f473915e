use crate::{Error, Result};
use std::f64::consts::TAU;

/// Periodic cubic spline through samples `(θ_k, y_k)` on `[0, 2π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicSpline {
    theta: Vec<f64>,
    y: Vec<f64>,
    /// second derivatives at the knots
    m: Vec<f64>,
}

impl PeriodicSpline {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidGeometry(
                "periodic spline needs at least 3 points".into(),
            ));
        }
        let mut pts: Vec<(f64, f64)> = points
            .iter()
            .map(|&(t, y)| (t.rem_euclid(TAU), y))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = pts.len();
        for k in 0..n {
            let next = if k + 1 < n {
                pts[k + 1].0
            } else {
                pts[0].0 + TAU
            };
            if next - pts[k].0 <= 1e-12 {
                return Err(Error::InvalidGeometry(format!(
                    "duplicate spline abscissa near theta = {}",
                    pts[k].0
                )));
            }
        }
        let theta: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let h = |k: usize| {
            if k + 1 < n {
                theta[k + 1] - theta[k]
            } else {
                theta[0] + TAU - theta[n - 1]
            }
        };
        // cyclic tridiagonal: h_{k-1} M_{k-1} + 2(h_{k-1}+h_k) M_k + h_k M_{k+1} = rhs_k
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for k in 0..n {
            let km = (k + n - 1) % n;
            let kp = (k + 1) % n;
            let (hm, hk) = (h(km), h(k));
            sub[k] = hm;
            diag[k] = 2.0 * (hm + hk);
            sup[k] = hk;
            rhs[k] = 6.0 * ((y[kp] - y[k]) / hk - (y[k] - y[km]) / hm);
        }
        let m = solve_cyclic(&sub, &diag, &sup, &rhs);
        Ok(Self { theta, y, m })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.theta.len();
        let t = t.rem_euclid(TAU);
        // interval k with theta[k] <= t < theta[k+1] (wrapping)
        let k = match self.theta.partition_point(|&x| x <= t) {
            0 => n - 1,
            p => p - 1,
        };
        let kp = (k + 1) % n;
        let t0 = self.theta[k];
        let t1 = if kp == 0 {
            self.theta[0] + TAU
        } else {
            self.theta[kp]
        };
        let t = if t < t0 { t + TAU } else { t };
        let h = t1 - t0;
        let a = (t1 - t) / h;
        let b = (t - t0) / h;
        a * self.y[k]
            + b * self.y[kp]
            + ((a * a * a - a) * self.m[k] + (b * b * b - b) * self.m[kp]) * h * h / 6.0
    }
}

/// Sherman–Morrison reduction of a cyclic tridiagonal system to two Thomas solves.
fn solve_cyclic(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let alpha = sup[n - 1]; // A[n-1][0]
    let beta = sub[0]; // A[0][n-1]
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= alpha * beta / gamma;
    let x = thomas(sub, &d, sup, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = thomas(sub, &d, sup, &u);
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for k in 1..n {
        let den = diag[k] - sub[k] * c[k - 1];
        c[k] = sup[k] / den;
        d[k] = (rhs[k] - sub[k] * d[k - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for k in (0..n - 1).rev() {
        x[k] = d[k] - c[k] * x[k + 1];
    }
    x
}
