use super::Mesh;
use crate::geometry::MetricData;
use crate::state::{project_freestream, FreestreamSpec, PrimitiveState};
use crate::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// Number of ghost layers on each side.
pub const GHOST: usize = 2;

/// Exact state as a function of chart coordinates.
pub type ExactFn = Arc<dyn Fn([f64; 2]) -> PrimitiveState + Send + Sync>;

#[derive(Clone)]
pub enum BoundaryCondition {
    /// Inviscid wall: the face-normal crossflow component is reflected.
    SlipWall,
    /// Dirichlet data from the projected freestream at ghost centers.
    Freestream(FreestreamSpec),
    /// Dirichlet data from an exact field at ghost centers.
    Exact(ExactFn),
    /// Zeroth-order extrapolation of the adjacent cell.
    Extrapolate,
    /// Azimuthal wrap (only on the `ξ²` sides of a periodic mesh).
    Periodic,
}

impl fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryCondition::SlipWall => write!(f, "SlipWall"),
            BoundaryCondition::Freestream(fs) => write!(f, "Freestream({fs:?})"),
            BoundaryCondition::Exact(_) => write!(f, "Exact(..)"),
            BoundaryCondition::Extrapolate => write!(f, "Extrapolate"),
            BoundaryCondition::Periodic => write!(f, "Periodic"),
        }
    }
}

/// Conditions on the four sides of the chart rectangle.
#[derive(Clone, Debug)]
pub struct Boundaries {
    pub xi1_lo: BoundaryCondition,
    pub xi1_hi: BoundaryCondition,
    pub xi2_lo: BoundaryCondition,
    pub xi2_hi: BoundaryCondition,
}

impl Boundaries {
    /// Cone problem: wall at the body, freestream at the outer curve, azimuthal wrap.
    pub fn cone(fs: FreestreamSpec) -> Self {
        Self {
            xi1_lo: BoundaryCondition::SlipWall,
            xi1_hi: BoundaryCondition::Freestream(fs),
            xi2_lo: BoundaryCondition::Periodic,
            xi2_hi: BoundaryCondition::Periodic,
        }
    }

    /// The same condition on every non-periodic side.
    pub fn uniform(bc: BoundaryCondition, periodic: bool) -> Self {
        let side2 = if periodic {
            BoundaryCondition::Periodic
        } else {
            bc.clone()
        };
        Self {
            xi1_lo: bc.clone(),
            xi1_hi: bc,
            xi2_lo: side2.clone(),
            xi2_hi: side2,
        }
    }
}

/// Primitive states on the grid plus [`GHOST`] layers on every side.
#[derive(Clone, Debug, PartialEq)]
pub struct PaddedField {
    pub n1: usize,
    pub n2: usize,
    pub data: Vec<PrimitiveState>,
}

impl PaddedField {
    pub fn new(n1: usize, n2: usize) -> Self {
        let zero = PrimitiveState::new(0.0, 0.0, 0.0, 0.0, 0.0);
        Self {
            n1,
            n2,
            data: vec![zero; (n1 + 2 * GHOST) * (n2 + 2 * GHOST)],
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.n2 + 2 * GHOST
    }

    #[inline]
    pub fn idx(&self, i: isize, j: isize) -> usize {
        (i + GHOST as isize) as usize * self.width() + (j + GHOST as isize) as usize
    }

    #[inline]
    pub fn get(&self, i: isize, j: isize) -> &PrimitiveState {
        &self.data[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: isize, j: isize, p: PrimitiveState) {
        let k = self.idx(i, j);
        self.data[k] = p;
    }
}

#[derive(Clone, Debug)]
enum SideFill {
    Wall,
    Fixed(Vec<PrimitiveState>),
    Extrapolate,
    Periodic,
}

/// Boundary conditions resolved against a mesh, with Dirichlet ghost values cached.
#[derive(Clone, Debug)]
pub struct BoundarySet {
    pub spec: Boundaries,
    // xi1_lo, xi1_hi, xi2_lo, xi2_hi; fixed ghosts stored layer-major
    sides: [SideFill; 4],
}

impl BoundarySet {
    pub fn new(spec: Boundaries, mesh: &Mesh) -> Result<Self> {
        use BoundaryCondition as B;
        let (n1, n2) = (mesh.n1 as isize, mesh.n2 as isize);
        let g = GHOST as isize;
        let chart = mesh.chart();
        let h = mesh.fd_step;
        let resolve = |bc: &BoundaryCondition, side: usize| -> Result<SideFill> {
            let along_xi2 = side >= 2;
            if mesh.periodic && along_xi2 != matches!(bc, B::Periodic) {
                return Err(Error::Config(if along_xi2 {
                    "xi2 sides of a periodic mesh must be periodic".into()
                } else {
                    "periodic condition is only valid on xi2 sides of a periodic mesh".into()
                }));
            }
            if !mesh.periodic && matches!(bc, B::Periodic) {
                return Err(Error::Config(
                    "periodic condition on a non-periodic mesh".into(),
                ));
            }
            let ghosts = || -> Vec<[f64; 2]> {
                let mut out = Vec::new();
                for layer in 0..g {
                    match side {
                        0 => (0..n2).for_each(|j| out.push(mesh.center(-1 - layer, j))),
                        1 => (0..n2).for_each(|j| out.push(mesh.center(n1 + layer, j))),
                        2 => (0..n1).for_each(|i| out.push(mesh.center(i, -1 - layer))),
                        _ => (0..n1).for_each(|i| out.push(mesh.center(i, n2 + layer))),
                    }
                }
                out
            };
            Ok(match bc {
                B::SlipWall => SideFill::Wall,
                B::Extrapolate => SideFill::Extrapolate,
                B::Periodic => SideFill::Periodic,
                B::Freestream(fs) => SideFill::Fixed(
                    ghosts()
                        .into_iter()
                        .map(|xi| project_freestream(fs, chart, xi, h))
                        .collect(),
                ),
                B::Exact(f) => SideFill::Fixed(ghosts().into_iter().map(|xi| f(xi)).collect()),
            })
        };
        let sides = [
            resolve(&spec.xi1_lo, 0)?,
            resolve(&spec.xi1_hi, 1)?,
            resolve(&spec.xi2_lo, 2)?,
            resolve(&spec.xi2_hi, 3)?,
        ];
        Ok(Self { spec, sides })
    }
}

/// Reflect the `axis`-normal component: `v' = v − 2 v^n g^{α n}/g^{nn}`.
#[inline]
pub(crate) fn reflect(p: &PrimitiveState, metric: &MetricData, axis: usize) -> PrimitiveState {
    let vn = p.v()[axis];
    let gnn = metric.g_up[axis][axis];
    let k = 2.0 * vn / gnn;
    PrimitiveState {
        v1: p.v1 - k * metric.g_up[0][axis],
        v2: p.v2 - k * metric.g_up[1][axis],
        ..*p
    }
}

/// Fill the ghost layers of `field` from its interior.
pub fn apply_boundary_conditions(field: &mut PaddedField, mesh: &Mesh, bcs: &BoundarySet) {
    let (n1, n2) = (mesh.n1 as isize, mesh.n2 as isize);
    let g = GHOST as isize;

    // ξ² sides first so that periodic columns are complete
    for (side, fill) in bcs.sides.iter().enumerate().skip(2) {
        for i in 0..n1 {
            for layer in 0..g {
                let (ghost, mirror, edge) = if side == 2 {
                    (-1 - layer, layer, 0)
                } else {
                    (n2 + layer, n2 - 1 - layer, n2)
                };
                let p = match fill {
                    SideFill::Periodic => {
                        let src = if side == 2 { n2 - 1 - layer } else { layer };
                        *field.get(i, src)
                    }
                    SideFill::Wall => reflect(
                        field.get(i, mirror),
                        mesh.face2_metric(i as usize, edge as usize),
                        1,
                    ),
                    SideFill::Extrapolate => *field.get(i, if side == 2 { 0 } else { n2 - 1 }),
                    SideFill::Fixed(v) => v[(layer * n1 + i) as usize],
                };
                field.set(i, ghost, p);
            }
        }
    }

    for (side, fill) in bcs.sides.iter().enumerate().take(2) {
        for j in 0..n2 {
            for layer in 0..g {
                let (ghost, mirror, edge) = if side == 0 {
                    (-1 - layer, layer, 0)
                } else {
                    (n1 + layer, n1 - 1 - layer, n1)
                };
                let p = match fill {
                    SideFill::Wall => reflect(
                        field.get(mirror, j),
                        mesh.face1_metric(edge as usize, j as usize),
                        0,
                    ),
                    SideFill::Extrapolate => *field.get(if side == 0 { 0 } else { n1 - 1 }, j),
                    SideFill::Fixed(v) => v[(layer * n2 + j) as usize],
                    SideFill::Periodic => unreachable!("xi1 is never periodic"),
                };
                field.set(ghost, j, p);
            }
        }
    }
}
