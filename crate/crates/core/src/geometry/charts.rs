use super::{spherical_metric, Chart, ChartDomain, ChartKind, MetricData, PeriodicSpline};
use crate::{Error, Result};
use std::f64::consts::{PI, TAU};

/// Minimum distance (rad) every chart keeps from the poles φ = 0, π.
pub const DEFAULT_POLE_MARGIN: f64 = 1e-3;

fn sphere_point(phi: f64, theta: f64) -> [f64; 3] {
    let (s, c) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    [s * ct, s * st, c]
}

/// Traditional spherical coordinates `(φ, θ)` restricted to a rectangle.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalChart {
    domain: ChartDomain,
}

impl SphericalChart {
    /// Band `φ ∈ [phi_lo, phi_hi]` over the full azimuth (periodic in θ).
    pub fn band(phi_lo: f64, phi_hi: f64) -> Result<Self> {
        Self::patch([phi_lo, 0.0], [phi_hi, TAU], true)
    }

    /// Rectangle `[lo, hi]` in `(φ, θ)`; `periodic_theta` requires the full azimuth.
    pub fn patch(lo: [f64; 2], hi: [f64; 2], periodic_theta: bool) -> Result<Self> {
        Self::with_margin(lo, hi, periodic_theta, DEFAULT_POLE_MARGIN)
    }

    pub fn with_margin(
        lo: [f64; 2],
        hi: [f64; 2],
        periodic_theta: bool,
        margin: f64,
    ) -> Result<Self> {
        if !(lo[0] >= margin && hi[0] <= PI - margin && lo[0] < hi[0] && lo[1] < hi[1]) {
            return Err(Error::InvalidGeometry(format!(
                "spherical patch [{}, {}] x [{}, {}] violates the pole margin {margin}",
                lo[0], hi[0], lo[1], hi[1]
            )));
        }
        if periodic_theta && ((hi[1] - lo[1]) - TAU).abs() > 1e-12 {
            return Err(Error::InvalidGeometry(
                "periodic azimuth requires a 2π-wide theta range".into(),
            ));
        }
        Ok(Self {
            domain: ChartDomain {
                lo,
                hi,
                periodic: [false, periodic_theta],
            },
        })
    }
}

impl Chart for SphericalChart {
    fn embed(&self, xi: [f64; 2]) -> [f64; 3] {
        sphere_point(xi[0], xi[1])
    }

    fn domain(&self) -> ChartDomain {
        self.domain
    }

    fn kind(&self) -> ChartKind {
        ChartKind::AnalyticSpherical
    }

    fn tangents(&self, xi: [f64; 2], _h: f64) -> [[f64; 3]; 2] {
        let (s, c) = xi[0].sin_cos();
        let (st, ct) = xi[1].sin_cos();
        [[c * ct, c * st, -s], [-s * st, s * ct, 0.0]]
    }

    fn metric(&self, xi: [f64; 2], _h: f64) -> Result<MetricData> {
        spherical_metric(xi[0], xi[1])
    }
}

/// Cross-section curve `φ(θ)` of a cone with vertex at the origin and axis `+z`.
#[derive(Clone, Debug, PartialEq)]
pub enum BodyCurve {
    /// Circular cone of the given half-angle.
    Circle { half_angle: f64 },
    /// Elliptic cone: `tan φ = 1/√(cos²(θ−θ₀)/tan²a + sin²(θ−θ₀)/tan²b)`.
    Ellipse {
        semi_major: f64,
        semi_minor: f64,
        major_azimuth: f64,
    },
    /// `φ(θ) = mean + amplitude·cos(mode·θ)`.
    Cosine {
        mean: f64,
        amplitude: f64,
        mode: u32,
    },
    /// Sampled `(θ, φ)` points joined by a periodic cubic spline.
    Spline(PeriodicSpline),
}

impl BodyCurve {
    pub fn phi(&self, theta: f64) -> f64 {
        match self {
            BodyCurve::Circle { half_angle } => *half_angle,
            BodyCurve::Ellipse {
                semi_major,
                semi_minor,
                major_azimuth,
            } => {
                let (a, b) = (semi_major.tan(), semi_minor.tan());
                let (s, c) = (theta - major_azimuth).sin_cos();
                (1.0 / ((c * c) / (a * a) + (s * s) / (b * b)).sqrt()).atan()
            }
            BodyCurve::Cosine {
                mean,
                amplitude,
                mode,
            } => mean + amplitude * (*mode as f64 * theta).cos(),
            BodyCurve::Spline(s) => s.eval(theta),
        }
    }
}

/// Chart blending from a body curve (`ξ¹ = 0`) to an outer curve (`ξ¹ = 1`) along
/// meridians; `ξ²` is the azimuth and wraps.
#[derive(Clone, Debug, PartialEq)]
pub struct BodyConformingChart {
    pub body: BodyCurve,
    pub outer: BodyCurve,
}

impl BodyConformingChart {
    /// Zenith angle of the chart point.
    pub fn phi(&self, xi: [f64; 2]) -> f64 {
        let pb = self.body.phi(xi[1]);
        pb + xi[0] * (self.outer.phi(xi[1]) - pb)
    }
}

impl Chart for BodyConformingChart {
    fn embed(&self, xi: [f64; 2]) -> [f64; 3] {
        sphere_point(self.phi(xi), xi[1])
    }

    fn domain(&self) -> ChartDomain {
        ChartDomain {
            lo: [0.0, 0.0],
            hi: [1.0, TAU],
            periodic: [false, true],
        }
    }

    fn kind(&self) -> ChartKind {
        ChartKind::NumericalEmbedding
    }
}

/// Validate the curves and build the body-conforming chart.
///
/// Requires `margin < φ_b(θ) < φ_o(θ) < π − margin` at every sampled azimuth.
pub fn body_conforming_chart(body: BodyCurve, outer: BodyCurve) -> Result<BodyConformingChart> {
    body_conforming_chart_with_margin(body, outer, DEFAULT_POLE_MARGIN)
}

pub fn body_conforming_chart_with_margin(
    body: BodyCurve,
    outer: BodyCurve,
    margin: f64,
) -> Result<BodyConformingChart> {
    const SAMPLES: usize = 1440;
    for k in 0..SAMPLES {
        let t = k as f64 * TAU / SAMPLES as f64;
        let (pb, po) = (body.phi(t), outer.phi(t));
        if !(pb.is_finite() && po.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "non-finite curve at theta = {t}"
            )));
        }
        if pb < margin || po > PI - margin {
            return Err(Error::InvalidGeometry(format!(
                "curve within pole margin at theta = {t} (body {pb}, outer {po})"
            )));
        }
        if pb >= po {
            return Err(Error::InvalidGeometry(format!(
                "body curve crosses outer curve at theta = {t} (body {pb}, outer {po})"
            )));
        }
    }
    Ok(BodyConformingChart { body, outer })
}

/// Sampled injectivity check: on an `n × n` interior grid, distinct samples must map
/// to distinct points and the surface orientation must not flip.
pub fn check_injective<C: Chart + ?Sized>(chart: &C, n: usize) -> Result<()> {
    let dom = chart.domain();
    let coord = |a: usize, k: usize| {
        let w = dom.width(a);
        if dom.periodic[a] {
            dom.lo[a] + w * k as f64 / n as f64
        } else {
            dom.lo[a] + w * (k as f64 + 0.5) / n as f64
        }
    };
    let mut pts = Vec::with_capacity(n * n);
    let mut orientation = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let xi = [coord(0, i), coord(1, j)];
            let x = chart.embed(xi);
            let b = chart.tangents(xi, super::DEFAULT_FD_STEP);
            let cross = [
                b[0][1] * b[1][2] - b[0][2] * b[1][1],
                b[0][2] * b[1][0] - b[0][0] * b[1][2],
                b[0][0] * b[1][1] - b[0][1] * b[1][0],
            ];
            let o = cross[0] * x[0] + cross[1] * x[1] + cross[2] * x[2];
            if o == 0.0 || (orientation != 0.0 && o.signum() != orientation.signum()) {
                return Err(Error::InvalidGeometry(format!(
                    "chart orientation degenerates near xi = ({}, {})",
                    xi[0], xi[1]
                )));
            }
            orientation = o;
            pts.push((xi, x));
        }
    }
    let min_sep = 1e-9;
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            let (pa, pb) = (pts[a].1, pts[b].1);
            let d2 = (pa[0] - pb[0]).powi(2) + (pa[1] - pb[1]).powi(2) + (pa[2] - pb[2]).powi(2);
            if d2 < min_sep * min_sep {
                return Err(Error::InvalidGeometry(format!(
                    "chart overlaps itself: xi = {:?} and {:?} map to the same point",
                    pts[a].0, pts[b].0
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::numerical_metric;

    fn deg(x: f64) -> f64 {
        x.to_radians()
    }

    fn circular() -> BodyConformingChart {
        body_conforming_chart(
            BodyCurve::Circle {
                half_angle: deg(10.0),
            },
            BodyCurve::Circle {
                half_angle: deg(40.0),
            },
        )
        .unwrap()
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]
        #[test]
        fn mesh_metric_is_symmetric_positive_definite(
            mean in 0.1f64..0.8,
            amp in 0.0f64..0.08,
            mode in 1u32..5,
            gap in 0.2f64..1.5,
        ) {
            let chart = body_conforming_chart(
                BodyCurve::Cosine { mean, amplitude: amp, mode },
                BodyCurve::Circle { half_angle: mean + amp + gap },
            )
            .unwrap();
            let n = 12;
            for i in 0..n {
                for j in 0..n {
                    let xi = [(i as f64 + 0.5) / n as f64, (j as f64 + 0.5) * TAU / n as f64];
                    let m = chart.metric(xi, 1e-4).unwrap();
                    let g = m.g_lo;
                    proptest::prop_assert_eq!(g[0][1], g[1][0]);
                    proptest::prop_assert!(g[0][0] > 0.0 && g[0][0] * g[1][1] - g[0][1] * g[1][0] > 0.0);
                    for k in 0..2 {
                        proptest::prop_assert!((m.gamma[k][0][1] - m.gamma[k][1][0]).abs() <= 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn embedding_is_unit_norm() {
        let chart = circular();
        let sph = SphericalChart::band(0.2, 2.5).unwrap();
        for k in 0..50 {
            let xi = [k as f64 / 49.0, k as f64 * 0.13];
            let x = chart.embed(xi);
            assert!(((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt() - 1.0).abs() < 1e-12);
            let y = sph.embed([0.2 + 2.3 * k as f64 / 49.0, k as f64 * 0.13]);
            assert!(((y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn body_line_lies_on_cone_circle() {
        let chart = circular();
        for k in 0..16 {
            let t = k as f64 * 0.4;
            let x = chart.embed([0.0, t]);
            assert!((x[2].acos() - deg(10.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn cosine_body_traces_given_curve() {
        let body = BodyCurve::Cosine {
            mean: deg(10.0),
            amplitude: deg(3.0),
            mode: 2,
        };
        let chart = body_conforming_chart(
            body,
            BodyCurve::Circle {
                half_angle: deg(40.0),
            },
        )
        .unwrap();
        for k in 0..32 {
            let t = k as f64 * TAU / 32.0;
            let x = chart.embed([0.0, t]);
            let expected = deg(10.0) + deg(3.0) * (2.0 * t).cos();
            assert!((x[2].acos() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn ellipse_hits_its_semi_axes() {
        let e = BodyCurve::Ellipse {
            semi_major: deg(14.0),
            semi_minor: deg(8.0),
            major_azimuth: 0.5 * PI,
        };
        assert!((e.phi(0.5 * PI) - deg(14.0)).abs() < 1e-14);
        assert!((e.phi(0.0) - deg(8.0)).abs() < 1e-14);
    }

    #[test]
    fn circular_annulus_metric_is_theta_independent() {
        let chart = circular();
        let base = numerical_metric(&chart, [0.37, 0.0], 1e-4).unwrap();
        for k in 1..20 {
            let m = numerical_metric(&chart, [0.37, k as f64 * 0.31], 1e-4).unwrap();
            for a in 0..2 {
                for b in 0..2 {
                    assert!((m.g_lo[a][b] - base.g_lo[a][b]).abs() < 1e-9);
                    for c in 0..2 {
                        assert!((m.gamma[a][b][c] - base.gamma[a][b][c]).abs() < 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn crossing_curves_are_rejected() {
        let r = body_conforming_chart(
            BodyCurve::Cosine {
                mean: deg(20.0),
                amplitude: deg(15.0),
                mode: 2,
            },
            BodyCurve::Circle {
                half_angle: deg(30.0),
            },
        );
        assert!(matches!(r, Err(Error::InvalidGeometry(_))));
        let pole = body_conforming_chart(
            BodyCurve::Circle { half_angle: 1e-4 },
            BodyCurve::Circle {
                half_angle: deg(30.0),
            },
        );
        assert!(pole.is_err());
    }

    #[test]
    fn injectivity_by_sampling() {
        check_injective(&circular(), 24).unwrap();
        check_injective(&SphericalChart::band(0.3, 2.0).unwrap(), 24).unwrap();
    }

    #[test]
    fn spherical_patch_respects_pole_margin() {
        assert!(SphericalChart::band(0.0, 1.0).is_err());
        assert!(SphericalChart::band(0.5, PI).is_err());
        assert!(SphericalChart::patch([0.5, 0.0], [1.0, 1.0], true).is_err());
    }
}
