use crate::geometry::{Chart, MetricData, DEFAULT_FD_STEP};
use crate::{Error, Result};
use std::sync::Arc;

/// Uniform `n1 × n2` grid over a rectangle of a chart, with cached metric data.
///
/// Faces normal to `ξ¹` are indexed `i·n2 + j` for `i ∈ 0..=n1` (face `i` sits at
/// `lo₁ + i·Δξ¹`); faces normal to `ξ²` are indexed `i·(n2+1) + j` for `j ∈ 0..=n2`.
#[derive(Clone, Debug)]
pub struct Mesh {
    chart: Arc<dyn Chart>,
    pub n1: usize,
    pub n2: usize,
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    /// Cell widths `(Δξ¹, Δξ²)`.
    pub d: [f64; 2],
    /// Whether `ξ²` wraps around.
    pub periodic: bool,
    /// Step used for numerical metrics and tangents.
    pub fd_step: f64,
    cells: Vec<MetricData>,
    faces1: Vec<MetricData>,
    faces2: Vec<MetricData>,
}

impl Mesh {
    /// Mesh over the whole chart domain.
    pub fn new(chart: Arc<dyn Chart>, n1: usize, n2: usize) -> Result<Self> {
        let dom = chart.domain();
        Self::with_bounds(chart, dom.lo, dom.hi, n1, n2)
    }

    /// Mesh over `[lo, hi]`; `ξ²` is periodic when the chart is and the bounds span
    /// its full period.
    pub fn with_bounds(
        chart: Arc<dyn Chart>,
        lo: [f64; 2],
        hi: [f64; 2],
        n1: usize,
        n2: usize,
    ) -> Result<Self> {
        if n1 < 2 || n2 < 2 {
            return Err(Error::Config(format!(
                "mesh needs at least 2x2 cells, got {n1}x{n2}"
            )));
        }
        let dom = chart.domain();
        for a in 0..2 {
            if !(hi[a] > lo[a]) {
                return Err(Error::InvalidGeometry(format!(
                    "empty mesh range along xi{}",
                    a + 1
                )));
            }
            let inside =
                dom.periodic[a] || (lo[a] >= dom.lo[a] - 1e-12 && hi[a] <= dom.hi[a] + 1e-12);
            if !inside {
                return Err(Error::InvalidGeometry(format!(
                    "mesh range along xi{} leaves the chart domain",
                    a + 1
                )));
            }
        }
        if dom.periodic[0] {
            return Err(Error::InvalidGeometry(
                "periodic xi1 is not supported".into(),
            ));
        }
        let periodic = dom.periodic[1] && ((hi[1] - lo[1]) - dom.width(1)).abs() < 1e-12;
        let d = [(hi[0] - lo[0]) / n1 as f64, (hi[1] - lo[1]) / n2 as f64];
        let h = DEFAULT_FD_STEP;
        let at = |xi: [f64; 2]| chart.metric(xi, h);

        let mut cells = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            for j in 0..n2 {
                cells.push(at([
                    lo[0] + (i as f64 + 0.5) * d[0],
                    lo[1] + (j as f64 + 0.5) * d[1],
                ])?);
            }
        }
        let mut faces1 = Vec::with_capacity((n1 + 1) * n2);
        for i in 0..=n1 {
            for j in 0..n2 {
                faces1.push(at([
                    lo[0] + i as f64 * d[0],
                    lo[1] + (j as f64 + 0.5) * d[1],
                ])?);
            }
        }
        let mut faces2 = Vec::with_capacity(n1 * (n2 + 1));
        for i in 0..n1 {
            let row = faces2.len();
            for j in 0..=n2 {
                if periodic && j == n2 {
                    // the wrap face must be bit-identical to face 0
                    let first = faces2[row];
                    faces2.push(first);
                } else {
                    faces2.push(at([
                        lo[0] + (i as f64 + 0.5) * d[0],
                        lo[1] + j as f64 * d[1],
                    ])?);
                }
            }
        }
        Ok(Self {
            chart,
            n1,
            n2,
            lo,
            hi,
            d,
            periodic,
            fd_step: h,
            cells,
            faces1,
            faces2,
        })
    }

    pub fn chart(&self) -> &dyn Chart {
        self.chart.as_ref()
    }

    pub fn chart_arc(&self) -> Arc<dyn Chart> {
        self.chart.clone()
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.n1 * self.n2
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n2 + j
    }

    /// Cell area in coordinate space.
    pub fn area(&self) -> f64 {
        self.d[0] * self.d[1]
    }

    /// Center of cell `(i, j)`; indices outside the grid give ghost centers.
    pub fn center(&self, i: isize, j: isize) -> [f64; 2] {
        [
            self.lo[0] + (i as f64 + 0.5) * self.d[0],
            self.lo[1] + (j as f64 + 0.5) * self.d[1],
        ]
    }

    pub fn centers(&self) -> Vec<[f64; 2]> {
        (0..self.n1)
            .flat_map(|i| (0..self.n2).map(move |j| (i, j)))
            .map(|(i, j)| self.center(i as isize, j as isize))
            .collect()
    }

    #[inline]
    pub fn cell_metric(&self, k: usize) -> &MetricData {
        &self.cells[k]
    }

    #[inline]
    pub fn cell_metrics(&self) -> &[MetricData] {
        &self.cells
    }

    /// Metric at the `ξ¹`-normal face `i` of column `j`.
    #[inline]
    pub fn face1_metric(&self, i: usize, j: usize) -> &MetricData {
        &self.faces1[i * self.n2 + j]
    }

    /// Metric at the `ξ²`-normal face `j` of row `i`.
    #[inline]
    pub fn face2_metric(&self, i: usize, j: usize) -> &MetricData {
        &self.faces2[i * (self.n2 + 1) + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{body_conforming_chart, BodyCurve, SphericalChart};

    #[test]
    fn cached_metric_is_positive_definite() {
        let chart = body_conforming_chart(
            BodyCurve::Cosine {
                mean: 0.2,
                amplitude: 0.05,
                mode: 2,
            },
            BodyCurve::Circle { half_angle: 0.8 },
        )
        .unwrap();
        let mesh = Mesh::new(Arc::new(chart), 8, 16).unwrap();
        assert!(mesh.periodic);
        for m in mesh.cell_metrics() {
            let det = m.g_lo[0][0] * m.g_lo[1][1] - m.g_lo[0][1] * m.g_lo[1][0];
            assert!(m.g_lo[0][0] > 0.0 && det > 0.0);
            assert!((m.sqrt_g - det.sqrt()).abs() < 1e-12);
        }
        assert!(mesh.area() > 0.0);
        for i in 0..mesh.n1 {
            assert_eq!(mesh.face2_metric(i, 0), mesh.face2_metric(i, mesh.n2));
        }
    }

    #[test]
    fn patch_mesh_is_not_periodic() {
        let chart = SphericalChart::patch([0.5, 0.0], [1.0, 1.0], false).unwrap();
        let mesh = Mesh::new(Arc::new(chart), 4, 4).unwrap();
        assert!(!mesh.periodic);
        assert_eq!(mesh.center(0, 0), [0.5 + 0.0625, 0.125]);
        assert!(Mesh::with_bounds(mesh.chart_arc(), [0.4, 0.0], [1.0, 1.0], 4, 4).is_err());
    }
}
