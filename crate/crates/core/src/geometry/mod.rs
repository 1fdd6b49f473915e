//! Charts on the unit sphere and their metric data.
//!
//! All charts expose the unit-radius embedding only. The metric `g_{αβ}` is the
//! induced metric of the unit sphere, so every quantity here is already free of the
//! radial scaling.

mod charts;
mod spline;

pub use charts::{
    body_conforming_chart, body_conforming_chart_with_margin, check_injective, BodyConformingChart,
    BodyCurve, SphericalChart, DEFAULT_POLE_MARGIN,
};
pub use spline::PeriodicSpline;

use crate::{Error, Result};

/// Plain 2×2 matrix, row-major.
pub type Mat2 = [[f64; 2]; 2];

/// Default finite-difference step for numerical metrics.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Metric tensor, inverse, area density and Christoffel symbols at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricData {
    /// `g_{αβ}`
    pub g_lo: Mat2,
    /// `g^{αβ}`
    pub g_up: Mat2,
    /// `√det(g_{αβ})`
    pub sqrt_g: f64,
    /// `gamma[α][γ][ν]` is `Γ_γ^α_ν`, symmetric in `(γ, ν)`.
    pub gamma: [Mat2; 2],
}

impl MetricData {
    /// Build from the covariant metric and Christoffel symbols, inverting and
    /// checking positive definiteness.
    pub fn from_lower(g_lo: Mat2, gamma: [Mat2; 2]) -> Result<Self> {
        let det = g_lo[0][0] * g_lo[1][1] - g_lo[0][1] * g_lo[1][0];
        if !(g_lo[0][0] > 0.0 && det > 0.0) || !det.is_finite() {
            return Err(Error::Domain(format!(
                "metric not positive definite (g11 = {}, det = {det})",
                g_lo[0][0]
            )));
        }
        let g_up = [
            [g_lo[1][1] / det, -g_lo[0][1] / det],
            [-g_lo[1][0] / det, g_lo[0][0] / det],
        ];
        Ok(Self {
            g_lo,
            g_up,
            sqrt_g: det.sqrt(),
            gamma,
        })
    }

    /// Euclidean patch: identity metric, vanishing connection.
    pub fn flat() -> Self {
        Self {
            g_lo: [[1.0, 0.0], [0.0, 1.0]],
            g_up: [[1.0, 0.0], [0.0, 1.0]],
            sqrt_g: 1.0,
            gamma: [[[0.0; 2]; 2]; 2],
        }
    }

    /// Same metric with `√g` replaced (used to probe homogeneity in `√g`).
    pub fn with_sqrt_g(mut self, sqrt_g: f64) -> Self {
        self.sqrt_g = sqrt_g;
        self
    }

    /// Lower a contravariant vector: `v_α = g_{αβ} v^β`.
    #[inline]
    pub fn lower(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.g_lo[0][0] * v[0] + self.g_lo[0][1] * v[1],
            self.g_lo[1][0] * v[0] + self.g_lo[1][1] * v[1],
        ]
    }

    /// Raise a covariant vector: `w^α = g^{αβ} w_β`.
    #[inline]
    pub fn raise(&self, w: [f64; 2]) -> [f64; 2] {
        [
            self.g_up[0][0] * w[0] + self.g_up[0][1] * w[1],
            self.g_up[1][0] * w[0] + self.g_up[1][1] * w[1],
        ]
    }

    /// `g_{αβ} v^α v^β`
    #[inline]
    pub fn norm_sq(&self, v: [f64; 2]) -> f64 {
        let l = self.lower(v);
        l[0] * v[0] + l[1] * v[1]
    }

    /// `g^{αβ} w_α w_β`
    #[inline]
    pub fn co_norm_sq(&self, w: [f64; 2]) -> f64 {
        let r = self.raise(w);
        r[0] * w[0] + r[1] * w[1]
    }
}

/// Coordinate rectangle of a chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartDomain {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    /// Periodic directions wrap and never use one-sided stencils.
    pub periodic: [bool; 2],
}

impl ChartDomain {
    pub fn contains(&self, xi: [f64; 2]) -> bool {
        (0..2).all(|a| self.periodic[a] || (xi[a] >= self.lo[a] && xi[a] <= self.hi[a]))
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartKind {
    AnalyticSpherical,
    NumericalEmbedding,
}

/// A coordinate system on (a region of) the unit sphere.
pub trait Chart: Send + Sync + std::fmt::Debug {
    /// Unit 3-vector for the coordinates `xi`.
    fn embed(&self, xi: [f64; 2]) -> [f64; 3];

    fn domain(&self) -> ChartDomain;

    fn kind(&self) -> ChartKind;

    /// Tangent vectors `B_α = ∂x/∂ξ^α`.
    fn tangents(&self, xi: [f64; 2], h: f64) -> [[f64; 3]; 2] {
        numerical_tangents(self, xi, h)
    }

    /// Metric data at `xi`; numerical charts difference the embedding with step `h`.
    fn metric(&self, xi: [f64; 2], h: f64) -> Result<MetricData> {
        numerical_metric(self, xi, h)
    }
}

/// Closed-form metric of the spherical chart, `φ` (zenith) ~ index 1, `θ` ~ index 2.
pub fn spherical_metric(phi: f64, theta: f64) -> Result<MetricData> {
    let _ = theta;
    let (s, c) = phi.sin_cos();
    if !(phi > 0.0 && phi < std::f64::consts::PI) || s.abs() < 1e-14 {
        return Err(Error::Domain(format!(
            "spherical chart evaluated at pole (phi = {phi})"
        )));
    }
    let s2 = s * s;
    Ok(MetricData {
        g_lo: [[1.0, 0.0], [0.0, s2]],
        g_up: [[1.0, 0.0], [0.0, 1.0 / s2]],
        sqrt_g: s,
        gamma: [[[0.0, 0.0], [0.0, -s * c]], [[0.0, c / s], [c / s, 0.0]]],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stencil {
    Central,
    Forward,
    Backward,
}

fn stencil(domain: &ChartDomain, axis: usize, x: f64, h: f64) -> Stencil {
    if domain.periodic[axis] {
        Stencil::Central
    } else if x - h < domain.lo[axis] {
        Stencil::Forward
    } else if x + h > domain.hi[axis] {
        Stencil::Backward
    } else {
        Stencil::Central
    }
}

/// Second-order first derivative of a vector-valued function along one axis.
fn derivative<const N: usize>(
    f: impl Fn([f64; 2]) -> Result<[f64; N]>,
    xi: [f64; 2],
    axis: usize,
    h: f64,
    st: Stencil,
) -> Result<[f64; N]> {
    let at = |k: f64| {
        let mut p = xi;
        p[axis] += k * h;
        f(p)
    };
    let mut out = [0.0; N];
    match st {
        Stencil::Central => {
            let (a, b) = (at(1.0)?, at(-1.0)?);
            for n in 0..N {
                out[n] = (a[n] - b[n]) / (2.0 * h);
            }
        }
        Stencil::Forward => {
            let (f0, f1, f2) = (at(0.0)?, at(1.0)?, at(2.0)?);
            for n in 0..N {
                out[n] = (-3.0 * f0[n] + 4.0 * f1[n] - f2[n]) / (2.0 * h);
            }
        }
        Stencil::Backward => {
            let (f0, f1, f2) = (at(0.0)?, at(-1.0)?, at(-2.0)?);
            for n in 0..N {
                out[n] = (3.0 * f0[n] - 4.0 * f1[n] + f2[n]) / (2.0 * h);
            }
        }
    }
    Ok(out)
}

/// Tangent vectors by differencing the embedding.
pub fn numerical_tangents<C: Chart + ?Sized>(chart: &C, xi: [f64; 2], h: f64) -> [[f64; 3]; 2] {
    let dom = chart.domain();
    let embed = |p: [f64; 2]| Ok(chart.embed(p));
    let mut b = [[0.0; 3]; 2];
    for (axis, out) in b.iter_mut().enumerate() {
        let st = stencil(&dom, axis, xi[axis], h);
        // embedding is infallible
        *out = derivative(embed, xi, axis, h, st).expect("embedding");
    }
    b
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn lower_metric_from_tangents(b: &[[f64; 3]; 2]) -> Mat2 {
    let g12 = dot3(b[0], b[1]);
    [[dot3(b[0], b[0]), g12], [g12, dot3(b[1], b[1])]]
}

/// Finite-difference metric data for an arbitrary chart.
///
/// `g_{αβ} = B_α · B_β` with `B_α` from central differences of the embedding
/// (one-sided second order near non-periodic domain edges). Christoffel symbols
/// come from differencing that metric field with the same step.
pub fn numerical_metric<C: Chart + ?Sized>(chart: &C, xi: [f64; 2], h: f64) -> Result<MetricData> {
    let dom = chart.domain();
    let degenerate = |reason: String| Error::ChartDegenerate {
        xi1: xi[0],
        xi2: xi[1],
        reason,
    };
    let g_at = |p: [f64; 2]| -> Result<[f64; 4]> {
        let g = lower_metric_from_tangents(&chart.tangents(p, h));
        Ok([g[0][0], g[0][1], g[1][0], g[1][1]])
    };
    let g_lo = {
        let g = g_at(xi)?;
        [[g[0], g[1]], [g[2], g[3]]]
    };
    let det = g_lo[0][0] * g_lo[1][1] - g_lo[0][1] * g_lo[1][0];
    if !(g_lo[0][0] > 0.0 && det > 0.0) {
        return Err(degenerate(format!(
            "metric not positive definite (g11 = {}, det = {det:e})",
            g_lo[0][0]
        )));
    }

    // dg[n][b][c] = ∂g_{bc}/∂ξ^n
    let mut dg = [[[0.0; 2]; 2]; 2];
    for (n, d) in dg.iter_mut().enumerate() {
        let st = stencil(&dom, n, xi[n], h);
        let v = derivative(g_at, xi, n, h, st)?;
        *d = [[v[0], v[1]], [v[2], v[3]]];
    }

    let inv = [
        [g_lo[1][1] / det, -g_lo[0][1] / det],
        [-g_lo[1][0] / det, g_lo[0][0] / det],
    ];
    let mut gamma = [[[0.0; 2]; 2]; 2];
    for a in 0..2 {
        for c in 0..2 {
            for n in 0..2 {
                let mut s = 0.0;
                for b in 0..2 {
                    s += inv[a][b] * (dg[n][b][c] + dg[c][b][n] - dg[b][c][n]);
                }
                gamma[a][c][n] = 0.5 * s;
            }
        }
    }
    MetricData::from_lower(g_lo, gamma).map_err(|e| degenerate(e.to_string()))
}
