use super::residual::{Problem, Workspace};
use super::{Integrator, Mesh, Solution, SolverConfig};
use crate::gas::GasModel;
use crate::state::{
    conserved_to_primitive, primitive_to_conserved, project_freestream, ConservedState,
    FreestreamSpec,
};
use crate::{Error, Result};
use rayon::prelude::*;

const MAX_RETRIES: usize = 10;

/// What one pseudo-time update did.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepReport {
    /// Global step (or the CFL-limited step of the fastest cell with local stepping).
    pub dt: f64,
    /// Number of times the step was halved.
    pub retries: usize,
}

/// Projected freestream at every cell center.
pub fn freestream_field(mesh: &Mesh, fs: &FreestreamSpec) -> Solution {
    let u = mesh
        .centers()
        .iter()
        .enumerate()
        .map(|(k, xi)| {
            primitive_to_conserved(
                &project_freestream(fs, mesh.chart(), *xi, mesh.fd_step),
                mesh.cell_metric(k),
            )
        })
        .collect();
    Solution::new(u)
}

/// Pseudo-time marching state for one problem.
pub struct Marcher<'a, G: GasModel> {
    pb: &'a Problem<G>,
    cfg: SolverConfig,
    ws: Workspace,
    sol: Solution,
    res0: Vec<[f64; 5]>,
    stage: Vec<ConservedState>,
    trial: Vec<ConservedState>,
}

impl<'a, G: GasModel> Marcher<'a, G> {
    pub fn new(pb: &'a Problem<G>, cfg: SolverConfig, init: Solution) -> Result<Self> {
        cfg.validate()?;
        if init.u.len() != pb.mesh.n_cells() {
            return Err(Error::Contract(format!(
                "initial field has {} cells, mesh has {}",
                init.u.len(),
                pb.mesh.n_cells()
            )));
        }
        let n = init.u.len();
        Ok(Self {
            pb,
            cfg,
            ws: Workspace::new(&pb.mesh),
            sol: init,
            res0: vec![[0.0; 5]; n],
            stage: vec![ConservedState::default(); n],
            trial: vec![ConservedState::default(); n],
        })
    }

    /// Current field and history.
    pub fn solution(&self) -> &Solution {
        &self.sol
    }

    pub fn into_solution(self) -> Solution {
        self.sol
    }

    fn max_rate(&self) -> f64 {
        self.ws.rate.iter().fold(0.0f64, |a, &b| a.max(b))
    }

    /// `out = base − scale·dt_k·R`, with `dt_k` global or per cell.
    fn axpy(
        out: &mut [ConservedState],
        base: &[ConservedState],
        res: &[[f64; 5]],
        rate: &[f64],
        dt: f64,
        lts: bool,
    ) {
        out.par_iter_mut()
            .zip(base.par_iter())
            .zip(res.par_iter())
            .zip(rate.par_iter())
            .for_each(|(((o, b), r), q)| {
                let h = if lts { dt / q } else { dt };
                for e in 0..5 {
                    o.0[e] = b.0[e] - h * r[e];
                }
            });
    }

    /// Index of the first cell that does not decode.
    fn first_invalid(&self, u: &[ConservedState]) -> Option<(usize, String)> {
        let mesh = &self.pb.mesh;
        u.par_iter()
            .enumerate()
            .filter_map(|(k, c)| {
                conserved_to_primitive(c, mesh.cell_metric(k))
                    .err()
                    .map(|e| (k, e.to_string()))
            })
            .min_by_key(|(k, _)| *k)
    }

    /// One update from the residual already stored in the workspace.
    fn update(&mut self) -> Result<StepReport> {
        let lts = self.cfg.local_time_stepping;
        let top = self.max_rate();
        if !(top > 0.0 && top.is_finite()) {
            return Err(Error::SolverFailure {
                cell: 0,
                i: 0,
                j: 0,
                reason: format!("invalid wave-speed bound {top}"),
            });
        }
        // with local stepping `dt` is the CFL number and each cell divides by its rate
        let base_dt = if lts {
            self.cfg.cfl
        } else {
            self.cfg.cfl / top
        };
        self.res0.copy_from_slice(&self.ws.res);
        let rate0 = self.ws.rate.clone();
        let mut failure = None;
        for retry in 0..=MAX_RETRIES {
            let dt = base_dt * 0.5f64.powi(retry as i32);
            match self.try_update(dt, &rate0) {
                Ok(()) => {
                    std::mem::swap(&mut self.sol.u, &mut self.trial);
                    let reported = if lts { dt / top } else { dt };
                    return Ok(StepReport {
                        dt: reported,
                        retries: retry,
                    });
                }
                Err(e) => failure = Some(e),
            }
        }
        Err(failure.expect("at least one attempt"))
    }

    fn try_update(&mut self, dt: f64, rate0: &[f64]) -> Result<()> {
        let lts = self.cfg.local_time_stepping;
        let invalid = |me: &Self, u: &[ConservedState]| -> Result<()> {
            match me.first_invalid(u) {
                Some((k, reason)) => Err(Error::SolverFailure {
                    cell: k,
                    i: k / me.pb.mesh.n2,
                    j: k % me.pb.mesh.n2,
                    reason,
                }),
                None => Ok(()),
            }
        };
        match self.cfg.integrator {
            Integrator::ForwardEuler => {
                Self::axpy(&mut self.trial, &self.sol.u, &self.res0, rate0, dt, lts);
                invalid(self, &self.trial)
            }
            Integrator::SspRk2 => {
                Self::axpy(&mut self.stage, &self.sol.u, &self.res0, rate0, dt, lts);
                invalid(self, &self.stage)?;
                self.ws
                    .evaluate(self.pb, &self.stage, self.cfg.reconstruction)?;
                Self::axpy(&mut self.trial, &self.stage, &self.ws.res, rate0, dt, lts);
                self.trial
                    .par_iter_mut()
                    .zip(self.sol.u.par_iter())
                    .for_each(|(t, u)| {
                        for e in 0..5 {
                            t.0[e] = 0.5 * (u.0[e] + t.0[e]);
                        }
                    });
                invalid(self, &self.trial)
            }
        }
    }

    /// Evaluate the residual of the current field and record its norms.
    fn record(&mut self) -> Result<f64> {
        let sq = self
            .ws
            .evaluate(self.pb, &self.sol.u, self.cfg.reconstruction)?;
        let n = self.pb.mesh.n_cells() as f64;
        let norms: [f64; 5] = std::array::from_fn(|e| (sq[e] / n).sqrt());
        let total = norms.iter().map(|x| x * x).sum::<f64>().sqrt();
        if self.sol.history.is_empty() {
            self.sol.initial_residual = norms;
        }
        let init = self.sol.initial_residual;
        let init_total = init.iter().map(|x| x * x).sum::<f64>().sqrt();
        let rel = |x: f64, r: f64| if r > 0.0 { x / r } else { 0.0 };
        let row: [f64; 5] = std::array::from_fn(|e| {
            // an equation that starts balanced is measured against the total
            let r = if init[e] > 1e-14 * init_total {
                init[e]
            } else {
                init_total
            };
            rel(norms[e], r)
        });
        let rel_total = if init_total > 0.0 {
            total / init_total
        } else if total > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        self.sol.history.push(row);
        self.sol.history_total.push(rel_total);
        self.sol.iterations = self.sol.history.len();
        Ok(rel_total)
    }

    /// Residual evaluation plus one update, without convergence bookkeeping.
    pub fn step_once(&mut self) -> Result<StepReport> {
        self.ws
            .evaluate(self.pb, &self.sol.u, self.cfg.reconstruction)?;
        self.update()
    }

    /// March until converged, out of iterations, or diverged.
    pub fn run(&mut self) -> Result<()> {
        self.run_observed(|_| Ok(()))
    }

    /// As [`Marcher::run`], calling `observe` after every update.
    pub fn run_observed(&mut self, mut observe: impl FnMut(&Solution) -> Result<()>) -> Result<()> {
        let max = self.cfg.max_iterations;
        for _ in 0..max {
            let rel = self.record()?;
            let it = self.sol.iterations;
            if !rel.is_finite() || rel > self.cfg.divergence_factor {
                return Err(Error::Divergence {
                    iteration: it,
                    relative: rel,
                });
            }
            if self.cfg.threshold.is_finite() && rel < self.cfg.threshold {
                self.sol.converged = true;
                return Ok(());
            }
            self.update()?;
            observe(&self.sol)?;
            if !self.cfg.threshold.is_finite() {
                break;
            }
        }
        self.sol.converged = false;
        Ok(())
    }
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

/// March `init` to a steady state under `cfg`.
pub fn run_to_steady<G: GasModel>(
    pb: &Problem<G>,
    cfg: &SolverConfig,
    init: Solution,
) -> Result<Solution> {
    let threads = cfg.threads;
    with_pool(threads, || {
        let mut m = Marcher::new(pb, cfg.clone(), init)?;
        m.run()?;
        Ok(m.into_solution())
    })?
}

/// [`run_to_steady`] with a callback after every update (snapshots, progress).
pub fn run_to_steady_observed<G: GasModel>(
    pb: &Problem<G>,
    cfg: &SolverConfig,
    init: Solution,
    observe: impl FnMut(&Solution) -> Result<()> + Send,
) -> Result<Solution> {
    with_pool(cfg.threads, || {
        let mut m = Marcher::new(pb, cfg.clone(), init)?;
        m.run_observed(observe)?;
        Ok(m.into_solution())
    })?
}

/// One pseudo-time update of `sol`.
pub fn step<G: GasModel>(
    pb: &Problem<G>,
    cfg: &SolverConfig,
    sol: &Solution,
) -> Result<(Solution, StepReport)> {
    with_pool(cfg.threads, || {
        let mut m = Marcher::new(pb, cfg.clone(), sol.clone())?;
        let report = m.step_once()?;
        Ok((m.into_solution(), report))
    })?
}
