use super::boundary::{apply_boundary_conditions, Boundaries, BoundarySet, PaddedField, GHOST};
use super::{Mesh, Reconstruction, Solution};
use crate::classify::coordinate_wave_speed;
use crate::flux::{geometric_source_with, physical_flux_with};
use crate::gas::{sound_speed_from, GasModel, IdealGas};
use crate::geometry::MetricData;
use crate::state::{
    conserved_to_primitive, primitive_to_conserved, ConservedState, PrimitiveState,
};
use crate::{Error, Result};
use rayon::prelude::*;

/// Mesh, gas, boundary conditions and optional forcing: everything the residual needs.
#[derive(Debug)]
pub struct Problem<G: GasModel = IdealGas> {
    pub mesh: Mesh,
    pub gas: G,
    pub bcs: BoundarySet,
    /// Subtracted from the residual of each cell (manufactured-solution forcing).
    pub forcing: Option<Vec<[f64; 5]>>,
}

impl<G: GasModel> Problem<G> {
    pub fn new(mesh: Mesh, gas: G, boundaries: Boundaries) -> Result<Self> {
        let bcs = BoundarySet::new(boundaries, &mesh)?;
        Ok(Self {
            mesh,
            gas,
            bcs,
            forcing: None,
        })
    }

    pub fn with_forcing(mut self, forcing: Vec<[f64; 5]>) -> Result<Self> {
        if forcing.len() != self.mesh.n_cells() {
            return Err(Error::Contract(
                "forcing length does not match the mesh".into(),
            ));
        }
        self.forcing = Some(forcing);
        Ok(self)
    }
}

/// Face-normal numerical fluxes of one residual evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceFluxes {
    /// `ξ¹` faces, `i·n2 + j`, `i ∈ 0..=n1`.
    pub f1: Vec<[f64; 5]>,
    /// `ξ²` faces, `i·(n2+1) + j`, `j ∈ 0..=n2`.
    pub f2: Vec<[f64; 5]>,
}

/// Residual split into flux divergence and geometric source.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualParts {
    pub divergence: Vec<[f64; 5]>,
    pub source: Vec<[f64; 5]>,
}

#[inline]
fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

#[inline]
fn reconstruct(
    recon: Reconstruction,
    ll: &PrimitiveState,
    l: &PrimitiveState,
    r: &PrimitiveState,
    rr: &PrimitiveState,
) -> (PrimitiveState, PrimitiveState) {
    match recon {
        Reconstruction::FirstOrder => (*l, *r),
        Reconstruction::MusclMinmod => {
            let (a, b, c, d) = (ll.to_array(), l.to_array(), r.to_array(), rr.to_array());
            let mut ql = [0.0; 5];
            let mut qr = [0.0; 5];
            for k in 0..5 {
                ql[k] = b[k] + 0.5 * minmod(b[k] - a[k], c[k] - b[k]);
                qr[k] = c[k] - 0.5 * minmod(c[k] - b[k], d[k] - c[k]);
            }
            let (ql, qr) = (
                PrimitiveState::from_array(ql),
                PrimitiveState::from_array(qr),
            );
            if ql.rho > 0.0 && ql.e > 0.0 && qr.rho > 0.0 && qr.e > 0.0 {
                (ql, qr)
            } else {
                (*l, *r)
            }
        }
    }
}

/// Local Lax–Friedrichs flux through a face along `ξ^axis`.
#[inline]
fn llf<G: GasModel + ?Sized>(
    gas: &G,
    ql: &PrimitiveState,
    qr: &PrimitiveState,
    m: &MetricData,
    axis: usize,
) -> Result<[f64; 5]> {
    let (pl, pr) = (gas.pressure(ql.rho, ql.e)?, gas.pressure(qr.rho, qr.e)?);
    let (cl, cr) = (
        sound_speed_from(ql.rho, &pl)?,
        sound_speed_from(qr.rho, &pr)?,
    );
    let lam =
        coordinate_wave_speed(ql.v(), cl, m, axis).max(coordinate_wave_speed(qr.v(), cr, m, axis));
    let (fl, fr) = (
        physical_flux_with(ql, m, pl.p, axis),
        physical_flux_with(qr, m, pr.p, axis),
    );
    let (ul, ur) = (
        primitive_to_conserved(ql, m).0,
        primitive_to_conserved(qr, m).0,
    );
    let mut f = [0.0; 5];
    for k in 0..5 {
        f[k] = 0.5 * (fl[k] + fr[k]) - 0.5 * lam * (ur[k] - ul[k]);
    }
    Ok(f)
}

fn first_error(results: Vec<Result<()>>) -> Result<()> {
    results.into_iter().find(|r| r.is_err()).unwrap_or(Ok(()))
}

/// Scratch arrays for repeated residual evaluation.
#[derive(Debug)]
pub(crate) struct Workspace {
    pub prim: PaddedField,
    pub f1: Vec<[f64; 5]>,
    pub f2: Vec<[f64; 5]>,
    pub res: Vec<[f64; 5]>,
    pub src: Vec<[f64; 5]>,
    /// `λ¹/Δξ¹ + λ²/Δξ²` per cell.
    pub rate: Vec<f64>,
    row_sq: Vec<[f64; 5]>,
}

impl Workspace {
    pub fn new(mesh: &Mesh) -> Self {
        let (n1, n2) = (mesh.n1, mesh.n2);
        Self {
            prim: PaddedField::new(n1, n2),
            f1: vec![[0.0; 5]; (n1 + 1) * n2],
            f2: vec![[0.0; 5]; n1 * (n2 + 1)],
            res: vec![[0.0; 5]; n1 * n2],
            src: vec![[0.0; 5]; n1 * n2],
            rate: vec![0.0; n1 * n2],
            row_sq: vec![[0.0; 5]; n1],
        }
    }

    /// Decode `u` into the padded primitive field and fill ghosts.
    pub fn load<G: GasModel>(&mut self, pb: &Problem<G>, u: &[ConservedState]) -> Result<()> {
        let mesh = &pb.mesh;
        let (n1, n2) = (mesh.n1, mesh.n2);
        let width = self.prim.width();
        let results: Vec<Result<()>> =
            self.prim
                .data
                .par_chunks_mut(width)
                .skip(GHOST)
                .take(n1)
                .enumerate()
                .map(|(i, row)| {
                    for j in 0..n2 {
                        let k = i * n2 + j;
                        row[GHOST + j] = conserved_to_primitive(&u[k], mesh.cell_metric(k))
                            .map_err(|e| Error::SolverFailure {
                                cell: k,
                                i,
                                j,
                                reason: e.to_string(),
                            })?;
                    }
                    Ok(())
                })
                .collect();
        first_error(results)?;
        apply_boundary_conditions(&mut self.prim, mesh, &pb.bcs);
        Ok(())
    }

    /// Full residual into `res`; returns per-equation sums of squares.
    pub fn evaluate<G: GasModel>(
        &mut self,
        pb: &Problem<G>,
        u: &[ConservedState],
        recon: Reconstruction,
    ) -> Result<[f64; 5]> {
        self.load(pb, u)?;
        let mesh = &pb.mesh;
        let gas = &pb.gas;
        let (n2, d) = (mesh.n2, mesh.d);
        let prim = &self.prim;

        let results: Vec<Result<()>> = self
            .f1
            .par_chunks_mut(n2)
            .enumerate()
            .map(|(i, row)| {
                let i = i as isize;
                for (j, out) in row.iter_mut().enumerate() {
                    let jj = j as isize;
                    let (ql, qr) = reconstruct(
                        recon,
                        prim.get(i - 2, jj),
                        prim.get(i - 1, jj),
                        prim.get(i, jj),
                        prim.get(i + 1, jj),
                    );
                    *out = llf(gas, &ql, &qr, mesh.face1_metric(i as usize, j), 0)?;
                }
                Ok(())
            })
            .collect();
        first_error(results)?;

        let results: Vec<Result<()>> = self
            .f2
            .par_chunks_mut(n2 + 1)
            .enumerate()
            .map(|(i, row)| {
                let ii = i as isize;
                for (j, out) in row.iter_mut().enumerate() {
                    let jj = j as isize;
                    let (ql, qr) = reconstruct(
                        recon,
                        prim.get(ii, jj - 2),
                        prim.get(ii, jj - 1),
                        prim.get(ii, jj),
                        prim.get(ii, jj + 1),
                    );
                    *out = llf(gas, &ql, &qr, mesh.face2_metric(i, j), 1)?;
                }
                Ok(())
            })
            .collect();
        first_error(results)?;

        let (f1, f2) = (&self.f1, &self.f2);
        let forcing = pb.forcing.as_deref();
        let results: Vec<Result<()>> = self
            .res
            .par_chunks_mut(n2)
            .zip(self.src.par_chunks_mut(n2))
            .zip(self.rate.par_chunks_mut(n2))
            .zip(self.row_sq.par_iter_mut())
            .enumerate()
            .map(|(i, (((res, src), rate), sq))| {
                *sq = [0.0; 5];
                for j in 0..n2 {
                    let k = i * n2 + j;
                    let p = prim.get(i as isize, j as isize);
                    let m = mesh.cell_metric(k);
                    let pe = gas.pressure(p.rho, p.e)?;
                    let c = sound_speed_from(p.rho, &pe)?;
                    let s = geometric_source_with(p, m, pe.p);
                    let (a, b) = (&f1[i * n2 + j], &f1[(i + 1) * n2 + j]);
                    let (l, r) = (&f2[i * (n2 + 1) + j], &f2[i * (n2 + 1) + j + 1]);
                    for e in 0..5 {
                        let mut v = (b[e] - a[e]) / d[0] + (r[e] - l[e]) / d[1] + s[e];
                        if let Some(f) = forcing {
                            v -= f[k][e];
                        }
                        res[j][e] = v;
                        sq[e] += v * v;
                    }
                    src[j] = s;
                    rate[j] = coordinate_wave_speed(p.v(), c, m, 0) / d[0]
                        + coordinate_wave_speed(p.v(), c, m, 1) / d[1];
                }
                Ok(())
            })
            .collect();
        first_error(results)?;

        let mut total = [0.0; 5];
        for row in &self.row_sq {
            for e in 0..5 {
                total[e] += row[e];
            }
        }
        Ok(total)
    }
}

/// `R = Σ_faces F̂ / Δξ + S` per cell (minus any forcing); steady state is `R = 0`.
pub fn semidiscrete_residual<G: GasModel>(
    pb: &Problem<G>,
    sol: &Solution,
    recon: Reconstruction,
) -> Result<Vec<[f64; 5]>> {
    let mut ws = Workspace::new(&pb.mesh);
    ws.evaluate(pb, &sol.u, recon)?;
    Ok(ws.res)
}

/// Numerical face fluxes together with the divergence/source split of the residual.
pub fn face_fluxes<G: GasModel>(
    pb: &Problem<G>,
    sol: &Solution,
    recon: Reconstruction,
) -> Result<(FaceFluxes, ResidualParts)> {
    let mut ws = Workspace::new(&pb.mesh);
    ws.evaluate(pb, &sol.u, recon)?;
    let (n2, d) = (pb.mesh.n2, pb.mesh.d);
    let divergence = (0..pb.mesh.n_cells())
        .map(|k| {
            let (i, j) = (k / n2, k % n2);
            let (a, b) = (&ws.f1[i * n2 + j], &ws.f1[(i + 1) * n2 + j]);
            let (l, r) = (&ws.f2[i * (n2 + 1) + j], &ws.f2[i * (n2 + 1) + j + 1]);
            std::array::from_fn(|e| (b[e] - a[e]) / d[0] + (r[e] - l[e]) / d[1])
        })
        .collect();
    Ok((
        FaceFluxes {
            f1: ws.f1,
            f2: ws.f2,
        },
        ResidualParts {
            divergence,
            source: ws.src,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{
        body_conforming_chart, BodyCurve, Chart, ChartDomain, ChartKind, SphericalChart,
    };
    use crate::solver::{freestream_field, BoundaryCondition};
    use crate::state::FreestreamSpec;
    use std::sync::Arc;

    /// A patch whose metric is replaced by the Euclidean one.
    #[derive(Debug)]
    struct FlatPatch;

    impl Chart for FlatPatch {
        fn embed(&self, xi: [f64; 2]) -> [f64; 3] {
            SphericalChart::band(0.5, 2.5).unwrap().embed(xi)
        }
        fn domain(&self) -> ChartDomain {
            ChartDomain {
                lo: [1.0, 0.0],
                hi: [1.3, 0.3],
                periodic: [false, false],
            }
        }
        fn kind(&self) -> ChartKind {
            ChartKind::NumericalEmbedding
        }
        fn metric(&self, _xi: [f64; 2], _h: f64) -> Result<MetricData> {
            Ok(MetricData::flat())
        }
    }

    fn cone_problem(n1: usize, n2: usize) -> (Problem, FreestreamSpec) {
        let gas = IdealGas::default();
        let fs = FreestreamSpec::from_mach(2.0, 0.1, &gas).unwrap();
        let chart = body_conforming_chart(
            BodyCurve::Circle { half_angle: 0.2 },
            BodyCurve::Circle { half_angle: 0.6 },
        )
        .unwrap();
        let mesh = Mesh::new(Arc::new(chart), n1, n2).unwrap();
        (Problem::new(mesh, gas, Boundaries::cone(fs)).unwrap(), fs)
    }

    /// Freestream with a smooth bump, so that every term of the residual is active.
    fn perturbed(pb: &Problem, fs: &FreestreamSpec) -> Solution {
        let mut s = freestream_field(&pb.mesh, fs);
        for (k, u) in s.u.iter_mut().enumerate() {
            let b = 1.0 + 0.05 * ((k as f64) * 0.37).sin();
            for x in u.0.iter_mut() {
                *x *= b;
            }
        }
        s
    }

    #[test]
    fn constant_state_on_flat_metric_leaves_only_the_source() {
        let p = PrimitiveState::new(1.2, 0.4, -0.3, 0.7, 2.1);
        let mesh = Mesh::new(Arc::new(FlatPatch), 3, 3).unwrap();
        let bc = BoundaryCondition::Exact(Arc::new(move |_| p));
        let pb = Problem::new(mesh, IdealGas::default(), Boundaries::uniform(bc, false)).unwrap();
        let sol = Solution::from_primitives(&pb.mesh, &vec![p; 9]).unwrap();
        for recon in [Reconstruction::FirstOrder, Reconstruction::MusclMinmod] {
            let (_, parts) = face_fluxes(&pb, &sol, recon).unwrap();
            let r = semidiscrete_residual(&pb, &sol, recon).unwrap();
            let s = crate::flux::geometric_source(&p, &MetricData::flat(), &pb.gas).unwrap();
            for k in 0..9 {
                assert!(parts.divergence[k].iter().all(|d| d.abs() < 1e-13));
                for e in 0..5 {
                    assert!((r[k][e] - s[e]).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn flux_divergence_telescopes_to_boundary_flux() {
        let (pb, fs) = cone_problem(12, 16);
        let sol = perturbed(&pb, &fs);
        let (n1, n2, d) = (pb.mesh.n1, pb.mesh.n2, pb.mesh.d);
        for recon in [Reconstruction::FirstOrder, Reconstruction::MusclMinmod] {
            let (f, parts) = face_fluxes(&pb, &sol, recon).unwrap();
            for e in 0..5 {
                let total: f64 = parts.divergence.iter().map(|r| r[e] * d[0] * d[1]).sum();
                let mut boundary = 0.0;
                let mut scale: f64 = 0.0;
                for j in 0..n2 {
                    let (a, b) = (f.f1[j][e], f.f1[n1 * n2 + j][e]);
                    boundary += (b - a) * d[1];
                    scale = scale.max(a.abs()).max(b.abs());
                }
                for i in 0..n1 {
                    let (a, b) = (f.f2[i * (n2 + 1)][e], f.f2[i * (n2 + 1) + n2][e]);
                    assert_eq!(a, b, "periodic wrap faces must agree");
                    boundary += (b - a) * d[0];
                }
                let rel = (total - boundary).abs() / (scale * d[1] * n2 as f64).max(1e-300);
                assert!(rel < 1e-10, "{e}: {total} vs {boundary}");
            }
        }
    }

    #[test]
    fn invalid_state_reports_the_cell() {
        let (pb, fs) = cone_problem(4, 6);
        let mut sol = freestream_field(&pb.mesh, &fs);
        sol.u[9].0[0] = -1.0;
        match semidiscrete_residual(&pb, &sol, Reconstruction::FirstOrder) {
            Err(Error::SolverFailure { cell, i, j, .. }) => assert_eq!((cell, i, j), (9, 1, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn freestream_residual_shrinks_under_refinement() {
        let gas = IdealGas::default();
        let fs = FreestreamSpec::from_mach(2.0, 0.3, &gas).unwrap();
        let chart: Arc<dyn Chart> =
            Arc::new(SphericalChart::patch([0.8, 0.3], [1.4, 0.9], false).unwrap());
        let norm = |n: usize| {
            let mesh = Mesh::new(chart.clone(), n, n).unwrap();
            let pb = Problem::new(
                mesh,
                gas,
                Boundaries::uniform(BoundaryCondition::Freestream(fs), false),
            )
            .unwrap();
            let sol = freestream_field(&pb.mesh, &fs);
            let r = semidiscrete_residual(&pb, &sol, Reconstruction::FirstOrder).unwrap();
            (r.iter().flatten().map(|x| x * x).sum::<f64>() / r.len() as f64).sqrt()
        };
        let (a, b, c) = (norm(8), norm(16), norm(32));
        assert!(
            (a / b).log2() >= 0.9 && (b / c).log2() >= 0.9,
            "{a} {b} {c}"
        );
    }
}
