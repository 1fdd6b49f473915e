//! TOML run configuration.
//!
//! All quantities are nondimensional (freestream density, freestream sound speed,
//! unit sphere). Angles in the file are in degrees.

use crate::gas::{GasModel, IdealGas};
use crate::geometry::{
    body_conforming_chart_with_margin, BodyCurve, Chart, PeriodicSpline, DEFAULT_POLE_MARGIN,
};
use crate::solver::{
    Boundaries, BoundaryCondition, Integrator, Mesh, NumericalFlux, Problem, Reconstruction,
    SolverConfig,
};
use crate::state::FreestreamSpec;
use crate::validate::taylor_maccoll;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;

const BLOCKS: [&str; 6] = ["geometry", "mesh", "gas", "freestream", "solver", "output"];
const SOLVER_KEYS: [&str; 8] = [
    "cfl",
    "threshold",
    "max_iterations",
    "divergence_factor",
    "threads",
    "reconstruction",
    "integrator",
    "flux",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryBlock,
    pub mesh: MeshBlock,
    pub gas: GasBlock,
    pub freestream: FreestreamBlock,
    pub solver: SolverBlock,
    pub output: OutputBlock,
}

/// A cross-section curve `φ(θ)`, angles in degrees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CurveSpec {
    Circle {
        half_angle: f64,
    },
    Ellipse {
        semi_major: f64,
        semi_minor: f64,
        #[serde(default)]
        major_azimuth: f64,
    },
    Cosine {
        mean: f64,
        amplitude: f64,
        mode: u32,
    },
    /// `[θ, φ]` samples joined by a periodic cubic spline.
    Spline {
        points: Vec<[f64; 2]>,
    },
}

impl CurveSpec {
    pub fn to_curve(&self) -> Result<BodyCurve> {
        let r = f64::to_radians;
        Ok(match self {
            CurveSpec::Circle { half_angle } => BodyCurve::Circle {
                half_angle: r(*half_angle),
            },
            CurveSpec::Ellipse {
                semi_major,
                semi_minor,
                major_azimuth,
            } => BodyCurve::Ellipse {
                semi_major: r(*semi_major),
                semi_minor: r(*semi_minor),
                major_azimuth: r(*major_azimuth),
            },
            CurveSpec::Cosine {
                mean,
                amplitude,
                mode,
            } => BodyCurve::Cosine {
                mean: r(*mean),
                amplitude: r(*amplitude),
                mode: *mode,
            },
            CurveSpec::Spline { points } => BodyCurve::Spline(PeriodicSpline::new(
                &points
                    .iter()
                    .map(|p| (r(p[0]), r(p[1])))
                    .collect::<Vec<_>>(),
            )?),
        })
    }
}

/// What sits at the `ξ¹ = 0` curve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InnerBoundary {
    /// Cone surface.
    #[default]
    Wall,
    /// No body: freestream on both curves (an annulus of the sphere).
    Freestream,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryBlock {
    pub body: CurveSpec,
    pub outer: CurveSpec,
    #[serde(default)]
    pub inner_boundary: InnerBoundary,
    /// Minimum distance of both curves from the poles (rad).
    #[serde(default = "default_pole_margin")]
    pub pole_margin: f64,
}

fn default_pole_margin() -> f64 {
    DEFAULT_POLE_MARGIN
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshBlock {
    pub n1: usize,
    pub n2: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasBlock {
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreestreamBlock {
    pub mach: Option<f64>,
    /// Pitch angle in the x–z plane (degrees); only with `mach`.
    #[serde(default)]
    pub aoa: f64,
    /// Velocity vector, as an alternative to `mach`/`aoa`.
    pub velocity: Option<[f64; 3]>,
    #[serde(default = "one")]
    pub rho: f64,
    /// Specific internal energy; defaults to the value giving unit sound speed.
    pub e: Option<f64>,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverBlock {
    pub cfl: f64,
    pub max_iterations: usize,
    pub threshold: f64,
    #[serde(default = "default_flux")]
    pub flux: String,
    #[serde(default = "default_reconstruction")]
    pub reconstruction: String,
    #[serde(default = "default_integrator")]
    pub integrator: String,
    #[serde(default)]
    pub local_time_stepping: bool,
    #[serde(default = "default_divergence")]
    pub divergence_factor: f64,
    pub threads: Option<usize>,
}

fn default_flux() -> String {
    "llf".into()
}
fn default_reconstruction() -> String {
    "first-order".into()
}
fn default_integrator() -> String {
    "forward-euler".into()
}
fn default_divergence() -> f64 {
    1e3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub directory: String,
    /// Write a field snapshot every this many iterations (0: final field only).
    #[serde(default)]
    pub snapshot_every: usize,
    #[serde(default = "default_formats")]
    pub formats: Vec<FieldFormat>,
}

fn default_formats() -> Vec<FieldFormat> {
    vec![FieldFormat::Text]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FieldFormat {
    Text,
    Binary,
}

/// Everything needed to march one case.
#[derive(Debug)]
pub struct RunSetup {
    pub problem: Problem,
    pub solver: SolverConfig,
    pub freestream: FreestreamSpec,
}

/// 1-based line of `key` inside `[block]`, for error messages.
fn locate(src: &str, block: &str, key: &str) -> Option<usize> {
    let mut inside = false;
    for (n, line) in src.lines().enumerate() {
        let t = line.trim();
        if t.starts_with('[') {
            let name = t.trim_matches(|c| c == '[' || c == ']').trim();
            inside = name == block || name.starts_with(&format!("{block}."));
            if inside && key.is_empty() {
                return Some(n + 1);
            }
            continue;
        }
        if inside && !key.is_empty() {
            if let Some((k, _)) = t.split_once('=') {
                if k.trim() == key {
                    return Some(n + 1);
                }
            }
        }
    }
    None
}

impl RunConfig {
    pub fn from_toml(src: &str) -> Result<Self> {
        let table: toml::Table = src
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(format!("{}", e).trim_end().to_string()))?;
        for block in BLOCKS {
            if !table.contains_key(block) {
                return Err(Error::Config(format!("missing [{block}] block")));
            }
        }
        let cfg: RunConfig = toml::from_str(src)
            .map_err(|e| Error::Config(format!("{}", e).trim_end().to_string()))?;
        cfg.check(src)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)?;
        Self::from_toml(&src).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    fn at(src: &str, block: &str, key: &str, msg: String) -> Error {
        match locate(src, block, key).or_else(|| locate(src, block, "")) {
            Some(line) => Error::Config(format!("line {line}: [{block}] {msg}")),
            None => Error::Config(format!("[{block}] {msg}")),
        }
    }

    pub fn gas(&self) -> Result<IdealGas> {
        IdealGas::new(self.gas.gamma)
    }

    pub fn freestream_spec(&self) -> Result<FreestreamSpec> {
        let gas = self.gas()?;
        let f = &self.freestream;
        let g = gas.gamma();
        let e = f.e.unwrap_or(1.0 / (g * (g - 1.0)));
        let velocity = match (f.mach, f.velocity) {
            (Some(m), None) => {
                let c = gas.sound_speed_ideal(f.rho, e)?;
                let (s, co) = f.aoa.to_radians().sin_cos();
                [m * c * s, 0.0, m * c * co]
            }
            (None, Some(v)) => v,
            _ => {
                return Err(Error::Config(
                    "give exactly one of `mach` or `velocity`".into(),
                ))
            }
        };
        FreestreamSpec::new(velocity, f.rho, e, &gas)
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        let s = &self.solver;
        let flux = match s.flux.as_str() {
            "llf" | "local-lax-friedrichs" => NumericalFlux::LocalLaxFriedrichs,
            other => return Err(Error::Config(format!("unknown flux '{other}'"))),
        };
        let reconstruction = match s.reconstruction.as_str() {
            "first-order" => Reconstruction::FirstOrder,
            "muscl-minmod" => Reconstruction::MusclMinmod,
            other => {
                return Err(Error::Config(format!(
                    "unknown reconstruction '{other}' (first-order or muscl-minmod)"
                )))
            }
        };
        let integrator = match s.integrator.as_str() {
            "forward-euler" => Integrator::ForwardEuler,
            "ssp-rk2" => Integrator::SspRk2,
            other => {
                return Err(Error::Config(format!(
                    "unknown integrator '{other}' (forward-euler or ssp-rk2)"
                )))
            }
        };
        let cfg = SolverConfig {
            cfl: s.cfl,
            max_iterations: s.max_iterations,
            threshold: s.threshold,
            flux,
            reconstruction,
            integrator,
            local_time_stepping: s.local_time_stepping,
            divergence_factor: s.divergence_factor,
            threads: s.threads,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn chart(&self) -> Result<Arc<dyn Chart>> {
        let g = &self.geometry;
        Ok(Arc::new(body_conforming_chart_with_margin(
            g.body.to_curve()?,
            g.outer.to_curve()?,
            g.pole_margin,
        )?))
    }

    /// Cross-field checks, with errors anchored at the offending line.
    fn check(&self, src: &str) -> Result<()> {
        let gas = self
            .gas()
            .map_err(|e| Self::at(src, "gas", "gamma", e.to_string()))?;
        let fs = self
            .freestream_spec()
            .map_err(|e| Self::at(src, "freestream", "mach", e.to_string()))?;
        if self.mesh.n1 < 2 || self.mesh.n2 < 2 {
            return Err(Self::at(
                src,
                "mesh",
                "n1",
                "needs at least 2 cells per direction".into(),
            ));
        }
        self.solver_config().map_err(|e| {
            let msg = e.to_string();
            let key = SOLVER_KEYS
                .iter()
                .find(|k| msg.contains(**k))
                .copied()
                .unwrap_or("");
            Self::at(src, "solver", key, msg)
        })?;
        self.chart()
            .map_err(|e| Self::at(src, "geometry", "body", e.to_string()))?;
        if self.output.formats.is_empty() {
            return Err(Self::at(
                src,
                "output",
                "formats",
                "at least one format is required".into(),
            ));
        }

        // attached-shock sanity: the widest body meridian must carry an attached shock
        // that, tilted by the incidence, stays inside the outer curve
        if self.geometry.inner_boundary == InnerBoundary::Wall {
            let body = self.geometry.body.to_curve()?;
            let outer = self.geometry.outer.to_curve()?;
            let samples = (0..720).map(|k| k as f64 * std::f64::consts::TAU / 720.0);
            let widest = samples.clone().map(|t| body.phi(t)).fold(0.0, f64::max);
            let nearest = samples.map(|t| outer.phi(t)).fold(f64::INFINITY, f64::min);
            let c = gas.sound_speed(fs.rho, fs.e)?;
            let mach = fs.speed() / c;
            let incidence = (fs.velocity[0].hypot(fs.velocity[1])).atan2(fs.velocity[2]);
            let tm = taylor_maccoll(mach, widest, gas.gamma())
                .map_err(|e| Self::at(src, "geometry", "body", e.to_string()))?;
            if tm.shock_angle + incidence >= nearest {
                return Err(Self::at(
                    src,
                    "geometry",
                    "outer",
                    format!(
                        "outer curve ({:.2} deg) lies inside the expected shock ({:.2} deg)",
                        nearest.to_degrees(),
                        (tm.shock_angle + incidence).to_degrees()
                    ),
                ));
            }
        }
        Ok(())
    }

    /// Mesh, boundary conditions and solver settings.
    pub fn build(&self) -> Result<RunSetup> {
        let gas = self.gas()?;
        let freestream = self.freestream_spec()?;
        let mesh = Mesh::new(self.chart()?, self.mesh.n1, self.mesh.n2)?;
        let mut bcs = Boundaries::cone(freestream);
        if self.geometry.inner_boundary == InnerBoundary::Freestream {
            bcs.xi1_lo = BoundaryCondition::Freestream(freestream);
        }
        Ok(RunSetup {
            problem: Problem::new(mesh, gas, bcs)?,
            solver: self.solver_config()?,
            freestream,
        })
    }
}
