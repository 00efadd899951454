//! Deterministic integration of the master equation and series comparison.

use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, DensityMatrix, Operator, C64};
use crate::models::{Channel, LindbladModel};

/// `−i[H, ρ] + Σ_l γ_l (A_l ρ A_l† − ½{A_l†A_l, ρ})` at time `t`.
pub fn generator_rhs(rho: &Operator, model: &dyn LindbladModel, t: f64) -> Result<Operator> {
    if rho.dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), found: rho.dim() });
    }
    let h = model.hamiltonian(t)?;
    let channels = model.channels(t)?;
    apply_generator(rho, &h, &channels)
}

fn apply_generator(rho: &Operator, h: &Operator, channels: &[Channel]) -> Result<Operator> {
    let mut out = h.commutator(rho)?.scale(C64::new(0.0, -1.0));
    for ch in channels {
        if ch.rate == 0.0 {
            continue;
        }
        let a = &ch.operator;
        let a_dag = a.adjoint();
        let sandwich = a.matmul(rho)?.matmul(&a_dag)?;
        let anti = a_dag.matmul(a)?.anticommutator(rho)?;
        out.add_scaled(&sandwich, C64::new(ch.rate, 0.0))?;
        out.add_scaled(&anti, C64::new(-0.5 * ch.rate, 0.0))?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceConfig {
    pub t0: f64,
    pub t_max: f64,
    pub dt: f64,
    pub record_stride: usize,
    pub monitor_positivity: bool,
    pub positivity_tol: f64,
}

impl ReferenceConfig {
    pub fn new(t0: f64, t_max: f64, dt: f64) -> Self {
        ReferenceConfig { t0, t_max, dt, record_stride: 1, monitor_positivity: false, positivity_tol: 1e-9 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_max >= self.t0) {
            return Err(Error::InvalidParameter(format!("t_max {} precedes t0 {}", self.t_max, self.t0)));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidParameter("record_stride must be >= 1".into()));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        ((self.t_max - self.t0) / self.dt).round() as usize
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn records(&self, k: usize) -> bool {
        k % self.record_stride == 0 || k == self.n_steps()
    }
}

#[derive(Clone, Debug)]
pub struct ReferenceRecord {
    pub step: usize,
    pub t: f64,
    pub expectations: Vec<C64>,
    pub trace: f64,
    pub hermiticity_defect: f64,
    pub min_eigenvalue: Option<f64>,
    pub rho: DensityMatrix,
}

fn reference_record(
    step: usize,
    t: f64,
    rho: &Operator,
    observables: &[Operator],
    cfg: &ReferenceConfig,
) -> Result<ReferenceRecord> {
    let rho = DensityMatrix::from_matrix_unchecked(rho.clone());
    let expectations = observables.iter().map(|o| rho.expectation(o)).collect::<Result<_>>()?;
    let min_eigenvalue = if cfg.monitor_positivity { Some(min_eigenvalue(&rho)?) } else { None };
    Ok(ReferenceRecord {
        step,
        t,
        expectations,
        trace: rho.trace().re,
        hermiticity_defect: rho.matrix().hermiticity_defect(),
        min_eigenvalue,
        rho,
    })
}

/// Classic fixed-step RK4, calling `on_record` on every recorded step.
pub fn rk4_run_with(
    model: &dyn LindbladModel,
    cfg: &ReferenceConfig,
    rho0: &DensityMatrix,
    observables: &[Operator],
    mut on_record: impl FnMut(&ReferenceRecord),
) -> Result<DensityMatrix> {
    cfg.validate()?;
    if rho0.dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), found: rho0.dim() });
    }
    let dt = cfg.dt;
    let mut rho = rho0.matrix().clone();
    // Kahan compensation for ρ += increment; over 10⁴–10⁵ steps the plain sum's
    // rounding would otherwise dominate the fourth-order truncation error.
    let mut carry = Operator::zeros(rho.dim());
    on_record(&reference_record(0, cfg.t0, &rho, observables, cfg)?);
    for k in 0..cfg.n_steps() {
        let t = cfg.time(k);
        let annotate = |e: Error| Error::Step { step: k, t, source: Box::new(e) };
        let stage = |r: &Operator, s: f64| generator_rhs(r, model, s).map_err(annotate);
        let k1 = stage(&rho, t)?;
        let k2 = stage(&(&rho + &(&k1 * (0.5 * dt))), t + 0.5 * dt)?;
        let k3 = stage(&(&rho + &(&k2 * (0.5 * dt))), t + 0.5 * dt)?;
        let k4 = stage(&(&rho + &(&k3 * dt)), t + dt)?;
        let increment = &(&(&k1 + &k4) + &(&(&k2 + &k3) * 2.0)) * (dt / 6.0);
        let corrected = &increment - &carry;
        let sum = &rho + &corrected;
        carry = &(&sum - &rho) - &corrected;
        rho = sum;
        if cfg.records(k + 1) {
            on_record(&reference_record(k + 1, cfg.time(k + 1), &rho, observables, cfg).map_err(annotate)?);
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(rho))
}

pub fn rk4_run(
    model: &dyn LindbladModel,
    cfg: &ReferenceConfig,
    rho0: &DensityMatrix,
    observables: &[Operator],
) -> Result<Vec<ReferenceRecord>> {
    let mut records = Vec::new();
    rk4_run_with(model, cfg, rho0, observables, |r| records.push(r.clone()))?;
    Ok(records)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PositivityViolation {
    pub t: f64,
    pub eigenvalue: f64,
}

/// Earliest recorded state whose smallest eigenvalue is below `−tol`.
pub fn positivity_report<'a>(
    states: impl IntoIterator<Item = (f64, &'a DensityMatrix)>,
    tol: f64,
) -> Result<Option<PositivityViolation>> {
    for (t, rho) in states {
        let eigenvalue = min_eigenvalue(rho)?;
        if eigenvalue < -tol {
            return Ok(Some(PositivityViolation { t, eigenvalue }));
        }
    }
    Ok(None)
}

/// A time series with named real columns.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Series {
    pub t: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl Series {
    pub fn new(t: Vec<f64>) -> Self {
        Series { t, columns: Vec::new() }
    }

    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        if values.len() != self.t.len() {
            return Err(Error::DimensionMismatch { expected: self.t.len(), found: values.len() });
        }
        self.columns.push((name.into(), values));
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// Per-column error statistics of `b` against `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnError {
    pub column: String,
    pub max_abs: f64,
    pub rmse: f64,
}

/// Time grids must agree within this absolute tolerance.
pub const GRID_TOL: f64 = 1e-9;

pub fn compare_series(a: &Series, b: &Series, columns: &[&str]) -> Result<Vec<ColumnError>> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch { row: a.len().min(b.len()) });
    }
    if let Some(row) = a.t.iter().zip(&b.t).position(|(x, y)| (x - y).abs() > GRID_TOL) {
        return Err(Error::GridMismatch { row });
    }
    columns
        .iter()
        .map(|&name| {
            let missing = || Error::InvalidParameter(format!("column `{name}` not present in both series"));
            let (x, y) = (a.column(name).ok_or_else(missing)?, b.column(name).ok_or_else(missing)?);
            let mut max_abs: f64 = 0.0;
            let mut sq = 0.0;
            for (u, v) in x.iter().zip(y) {
                let d = (u - v).abs();
                max_abs = max_abs.max(d);
                sq += d * d;
            }
            let rmse = if x.is_empty() { 0.0 } else { (sq / x.len() as f64).sqrt() };
            Ok(ColumnError { column: name.to_string(), max_abs, rmse })
        })
        .collect()
}
