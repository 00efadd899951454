//! Stochastic steppers and the driver loop.

mod rng;
mod step;

use std::fmt;
use std::str::FromStr;

pub use rng::StepRandomness;
pub use step::{
    deterministic_successor, jump_probability, jump_successor, mcwf_step, nmep_step, nmqj_step,
    MAX_JUMP_PROBABILITY,
};

use crate::ensemble::{SignedEnsemble, DEFAULT_CONSOLIDATION_TOL};
use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, Operator, C64};
use crate::models::LindbladModel;
use step::StepContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Mcwf,
    Nmep,
    Nmqj,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Mcwf => "mcwf",
            SolverKind::Nmep => "nmep",
            SolverKind::Nmqj => "nmqj",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mcwf" => Ok(SolverKind::Mcwf),
            "nmep" => Ok(SolverKind::Nmep),
            "nmqj" => Ok(SolverKind::Nmqj),
            other => Err(Error::InvalidParameter(format!("unknown solver kind `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub kind: SolverKind,
    pub t0: f64,
    pub t_max: f64,
    pub dt: f64,
    pub n_ensemble: i64,
    pub seed: u64,
    pub consolidation_tol: f64,
    pub consolidation_stride: usize,
    pub record_stride: usize,
}

impl SolverConfig {
    pub fn new(kind: SolverKind, t0: f64, t_max: f64, dt: f64, n_ensemble: i64, seed: u64) -> Self {
        SolverConfig {
            kind,
            t0,
            t_max,
            dt,
            n_ensemble,
            seed,
            consolidation_tol: DEFAULT_CONSOLIDATION_TOL,
            consolidation_stride: 1,
            record_stride: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return bad(format!("dt must be > 0, got {}", self.dt));
        }
        if !self.t0.is_finite() || !self.t_max.is_finite() || (self.t_max - self.t0) / self.dt < 1.0 - 1e-9 {
            return bad(format!("need (t_max - t0)/dt >= 1, got t0={} t_max={} dt={}", self.t0, self.t_max, self.dt));
        }
        if self.n_ensemble < 1 {
            return bad(format!("n_ensemble must be >= 1, got {}", self.n_ensemble));
        }
        if !(self.consolidation_tol >= 0.0) {
            return bad(format!("consolidation_tol must be >= 0, got {}", self.consolidation_tol));
        }
        if self.consolidation_stride == 0 || self.record_stride == 0 {
            return bad("strides must be >= 1".into());
        }
        Ok(())
    }

    /// Number of steps, `round((t_max − t0)/dt)`.
    pub fn n_steps(&self) -> usize {
        ((self.t_max - self.t0) / self.dt).round() as usize
    }

    /// Time at the start of step `k`.
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    /// Whether the state after `k` steps is recorded.
    pub fn records(&self, k: usize) -> bool {
        k % self.record_stride == 0 || k == self.n_steps()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    /// `tr(O σ)` for each observable.
    pub expectations: Vec<C64>,
    pub n_members: usize,
    pub total_count: i64,
    /// Trace of the reconstructed density matrix.
    pub trace: f64,
    /// The reconstructed (signed-ensemble) density matrix.
    pub density: DensityMatrix,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub records: Vec<StepRecord>,
    pub ensemble: SignedEnsemble,
}

fn record(step: usize, t: f64, ensemble: &SignedEnsemble, observables: &[Operator]) -> Result<StepRecord> {
    let rho = ensemble.density_matrix()?;
    let expectations = observables.iter().map(|o| rho.expectation(o)).collect::<Result<_>>()?;
    Ok(StepRecord {
        step,
        t,
        expectations,
        n_members: ensemble.len(),
        total_count: ensemble.count_sum(),
        trace: rho.trace().re,
        density: rho,
    })
}

/// Advances `initial` from `t0` to `t_max`, calling `on_record` for every
/// recorded step (including step 0). Returns the final ensemble.
pub fn run_with(
    model: &dyn LindbladModel,
    cfg: &SolverConfig,
    initial: SignedEnsemble,
    observables: &[Operator],
    mut on_record: impl FnMut(&StepRecord),
) -> Result<SignedEnsemble> {
    cfg.validate()?;
    if initial.total() != cfg.n_ensemble {
        return Err(Error::InvalidParameter(format!(
            "initial ensemble total {} differs from n_ensemble {}",
            initial.total(),
            cfg.n_ensemble
        )));
    }
    if initial.dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), found: initial.dim() });
    }
    let rnd = StepRandomness::new(cfg.seed);
    let n_steps = cfg.n_steps();
    let mut ensemble = initial;
    on_record(&record(0, cfg.t0, &ensemble, observables)?);

    for k in 0..n_steps {
        let t = cfg.time(k);
        let annotate = |e: Error| Error::Step { step: k, t, source: Box::new(e) };
        let ctx = StepContext::new(model, t, cfg.dt, k as u64).map_err(annotate)?;
        let next = match cfg.kind {
            SolverKind::Nmep => step::nmep_step_with(&ensemble, &ctx, &rnd),
            SolverKind::Mcwf => step::mcwf_step_with(&ensemble, &ctx, &rnd),
            SolverKind::Nmqj => step::nmqj_step_with(&ensemble, &ctx, &rnd, cfg.consolidation_tol),
        }
        .map_err(annotate)?;
        ensemble = if (k + 1) % cfg.consolidation_stride == 0 {
            next.consolidate(cfg.consolidation_tol)
        } else {
            next
        };
        let sum = ensemble.count_sum();
        if sum != cfg.n_ensemble {
            return Err(annotate(Error::CountNotConserved { expected: cfg.n_ensemble, found: sum }));
        }
        if cfg.records(k + 1) {
            on_record(&record(k + 1, cfg.time(k + 1), &ensemble, observables).map_err(annotate)?);
        }
    }
    Ok(ensemble)
}

/// [`run_with`] collecting every record.
pub fn run(
    model: &dyn LindbladModel,
    cfg: &SolverConfig,
    initial: SignedEnsemble,
    observables: &[Operator],
) -> Result<Trajectory> {
    let mut records = Vec::new();
    let ensemble = run_with(model, cfg, initial, observables, |r| records.push(r.clone()))?;
    Ok(Trajectory { records, ensemble })
}
