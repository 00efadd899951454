//! Transmon qubit under 1/f^α noise in dimensionless time s = ω_q t / 2π.
//!
//! ```text
//! dρ/ds = −i[H_S(s), ρ] + Σ_j 2c D_jj(s) (A_j ρ A_j† − ½{A_j†A_j, ρ})
//! H_S(s) = −(π + c ω̄_LS(s)) σ_z
//! d̄(s) = U D U†,  A_j = Σ_k U_kj σ_k,  (σ_1, σ_2) = (σ₊, σ₋)
//! ```

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig2, Operator, C64};
use crate::models::quadrature::TransmonTables;
use crate::models::{Channel, LindbladModel};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransmonParams {
    /// Spectral exponent of the 1/f^α noise, in (0, 2).
    pub alpha: f64,
    /// Dimensionless system-bath coupling.
    pub c: f64,
    /// Dimensionless end time.
    pub s_max: f64,
    /// Quadrature table size.
    pub table_points: usize,
}

impl TransmonParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(Error::InvalidExponent { alpha: self.alpha, reason: "must lie in (0, 2)" });
        }
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::InvalidParameter(format!("transmon c must be > 0, got {}", self.c)));
        }
        if !(self.s_max > 0.0) || !self.s_max.is_finite() {
            return Err(Error::InvalidParameter(format!("transmon s_max must be > 0, got {}", self.s_max)));
        }
        if self.table_points < 1000 {
            return Err(Error::InvalidParameter(format!(
                "transmon table_points must be >= 1000, got {}",
                self.table_points
            )));
        }
        Ok(())
    }

    /// Quadrature tables over x ∈ [0, 2π s_max].
    pub fn tables(&self) -> Result<TransmonTables> {
        self.validate()?;
        TransmonTables::new(self.alpha, 2.0 * PI * self.s_max, self.table_points)
    }
}

/// Coefficients (γ̄₊, γ̄₋, ω̄_LS) at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransmonRates {
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub omega_ls: f64,
}

impl TransmonRates {
    /// The Hermitian coefficient matrix d̄.
    pub fn coefficient_matrix(&self) -> Operator {
        let off = -0.5 * (self.gamma_plus + self.gamma_minus);
        let mut d = Operator::zeros(2);
        d.set(0, 0, C64::new(self.gamma_plus, 0.0));
        d.set(0, 1, C64::new(off, -self.omega_ls));
        d.set(1, 0, C64::new(off, self.omega_ls));
        d.set(1, 1, C64::new(self.gamma_minus, 0.0));
        d
    }
}

/// Effective channels and Hamiltonian at one instant.
#[derive(Clone, Debug)]
pub struct TransmonChannels {
    /// 2c·D_jj.
    pub rates: [f64; 2],
    pub operators: [Operator; 2],
    pub hamiltonian: Operator,
    /// Columns are the eigenvectors of d̄, in channel order.
    pub unitary: Operator,
}

type Gauge = [C64; 4];

#[derive(Clone, Debug)]
pub struct TransmonModel {
    params: TransmonParams,
    tables: TransmonTables,
    prefactor: f64,
    /// Continuity-aligned eigenvector matrix at every table node, row-major.
    gauge: Vec<Gauge>,
}

impl TransmonModel {
    pub fn new(params: TransmonParams) -> Result<Self> {
        params.validate()?;
        if params.alpha == 1.0 {
            return Err(Error::InvalidExponent { alpha: 1.0, reason: "Γ(α−1) has a pole at α = 1" });
        }
        let tables = params.tables()?;
        let prefactor = 2.0 * gamma(params.alpha - 1.0) / params.alpha;
        let mut model = TransmonModel { params, tables, prefactor, gauge: Vec::new() };
        model.gauge = model.build_gauge()?;
        Ok(model)
    }

    pub fn params(&self) -> &TransmonParams {
        &self.params
    }

    pub fn tables(&self) -> &TransmonTables {
        &self.tables
    }

    fn rates_from(&self, f_cos: f64, f_sin: f64) -> TransmonRates {
        let (sin, cos) = (PI * self.params.alpha / 2.0).sin_cos();
        TransmonRates {
            gamma_plus: self.prefactor * (sin * f_cos + cos * f_sin),
            gamma_minus: self.prefactor * (sin * f_cos - cos * f_sin),
            omega_ls: self.prefactor * sin * f_sin,
        }
    }

    pub fn rates(&self, s: f64) -> Result<TransmonRates> {
        let (f_cos, f_sin) = self
            .tables
            .lookup(2.0 * PI * s)
            .ok_or(Error::OutOfTableRange { s, s_max: self.params.s_max })?;
        Ok(self.rates_from(f_cos, f_sin))
    }

    /// Eigenvectors along the table grid, each aligned to its predecessor.
    /// Node 1 fixes the order (descending eigenvalue); node 0, where d̄ = 0,
    /// copies node 1.
    fn build_gauge(&self) -> Result<Vec<Gauge>> {
        let mut gauge = Vec::with_capacity(self.tables.len());
        let mut prev: Option<Gauge> = None;
        for (_, f_cos, f_sin) in self.tables.nodes().skip(1) {
            let eig = hermitian_eig2(&self.rates_from(f_cos, f_sin).coefficient_matrix())?;
            let u = to_gauge(&eig.vectors);
            let aligned = match prev {
                Some(reference) => align(u, &reference).0,
                None => u,
            };
            gauge.push(aligned);
            prev = Some(aligned);
        }
        gauge.insert(0, gauge[0]);
        Ok(gauge)
    }

    pub fn channels_at(&self, s: f64) -> Result<TransmonChannels> {
        let rates = self.rates(s)?;
        let eig = hermitian_eig2(&rates.coefficient_matrix())?;
        let node = ((2.0 * PI * s / self.tables.step()).round() as usize).clamp(1, self.gauge.len() - 1);
        let (u, swapped) = align(to_gauge(&eig.vectors), &self.gauge[node]);
        let values = if swapped { [eig.values[1], eig.values[0]] } else { eig.values };

        let sigma = [Operator::sigma_plus(), Operator::sigma_minus()];
        let mut operators = [Operator::zeros(2), Operator::zeros(2)];
        for (j, op) in operators.iter_mut().enumerate() {
            for (k, s_k) in sigma.iter().enumerate() {
                op.add_scaled(s_k, u[2 * k + j])?;
            }
        }
        let two_c = 2.0 * self.params.c;
        Ok(TransmonChannels {
            rates: [two_c * values[0], two_c * values[1]],
            operators,
            hamiltonian: Operator::sigma_z().scale_real(-(PI + self.params.c * rates.omega_ls)),
            unitary: Operator::new(2, u.to_vec())?,
        })
    }
}

fn to_gauge(u: &Operator) -> Gauge {
    [u.get(0, 0), u.get(0, 1), u.get(1, 0), u.get(1, 1)]
}

/// Reorders and rephases the columns of `u` to maximize overlap with
/// `reference`; each aligned column has a real positive overlap.
fn align(u: Gauge, reference: &Gauge) -> (Gauge, bool) {
    let overlap = |i: usize, j: usize| reference[i].conj() * u[j] + reference[2 + i].conj() * u[2 + j];
    let direct = overlap(0, 0).norm() + overlap(1, 1).norm();
    let crossed = overlap(0, 1).norm() + overlap(1, 0).norm();
    let swapped = crossed > direct;
    let order = if swapped { [1, 0] } else { [0, 1] };
    let mut out = [C64::new(0.0, 0.0); 4];
    for (target, &source) in order.iter().enumerate() {
        let o = overlap(target, source);
        let phase = if o.norm() > 0.0 { o.conj() / o.norm() } else { C64::new(1.0, 0.0) };
        out[target] = u[source] * phase;
        out[2 + target] = u[2 + source] * phase;
    }
    (out, swapped)
}

impl LindbladModel for TransmonModel {
    fn dim(&self) -> usize {
        2
    }

    fn hamiltonian(&self, s: f64) -> Result<Operator> {
        let rates = self.rates(s)?;
        Ok(Operator::sigma_z().scale_real(-(PI + self.params.c * rates.omega_ls)))
    }

    fn channels(&self, s: f64) -> Result<Vec<Channel>> {
        let ch = self.channels_at(s)?;
        let [a1, a2] = ch.operators;
        Ok(vec![Channel::new(a1, ch.rates[0]), Channel::new(a2, ch.rates[1])])
    }
}
