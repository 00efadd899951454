//! Central spin dephased by ZZ coupling to a bath of identical spins.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, Operator, C64};
use crate::models::{Channel, LindbladModel};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinStarParams {
    /// Coupling strength; the natural frequency unit.
    pub alpha: f64,
    /// Number of bath spins.
    pub n_spins: u32,
    /// Bath inverse temperature times bath level splitting, βΩ.
    pub beta_omega: f64,
}

impl SpinStarParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("spin-star alpha must be > 0, got {}", self.alpha)));
        }
        if self.n_spins == 0 {
            return Err(Error::InvalidParameter("spin-star n_spins must be >= 1".into()));
        }
        if !self.beta_omega.is_finite() {
            return Err(Error::InvalidParameter("spin-star beta_omega must be finite".into()));
        }
        Ok(())
    }

    fn denominator(&self, t: f64) -> f64 {
        (4.0 * self.alpha * t).cos() + (-self.beta_omega).cosh()
    }

    /// Lamb shift δ(t).
    pub fn lamb_shift(&self, t: f64) -> f64 {
        self.alpha * self.n_spins as f64 * (-self.beta_omega).sinh() / self.denominator(t)
    }

    /// Dephasing rate γ(t); negative on (π/4α, π/2α) modulo π/2α.
    pub fn rate(&self, t: f64) -> f64 {
        self.alpha * self.n_spins as f64 * (4.0 * self.alpha * t).sin() / self.denominator(t)
    }

    /// Coherence factor f(t) = (cos 2αt − i tanh(−βΩ/2) sin 2αt)^N.
    pub fn coherence_factor(&self, t: f64) -> Complex64 {
        let phase = 2.0 * self.alpha * t;
        let base = C64::new(phase.cos(), -(-self.beta_omega / 2.0).tanh() * phase.sin());
        base.powu(self.n_spins)
    }
}

/// Reduced dynamics `dρ/dt = −i[δ(t)σ_z, ρ] + γ(t)(σ_z ρ σ_z − ρ)`.
///
/// The dissipator `γ(A ρ A† − ½{A†A, ρ})` with `A = σ_z` equals
/// `γ(σ_z ρ σ_z − ρ)`, so the model exposes a single σ_z channel.
#[derive(Clone, Debug)]
pub struct SpinStarModel {
    params: SpinStarParams,
    sigma_z: Operator,
}

impl SpinStarModel {
    pub fn new(params: SpinStarParams) -> Result<Self> {
        params.validate()?;
        Ok(SpinStarModel { params, sigma_z: Operator::sigma_z() })
    }

    pub fn params(&self) -> &SpinStarParams {
        &self.params
    }
}

impl LindbladModel for SpinStarModel {
    fn dim(&self) -> usize {
        2
    }

    fn hamiltonian(&self, t: f64) -> Result<Operator> {
        Ok(self.sigma_z.scale_real(self.params.lamb_shift(t)))
    }

    fn channels(&self, t: f64) -> Result<Vec<Channel>> {
        Ok(vec![Channel::new(self.sigma_z.clone(), self.params.rate(t))])
    }
}

/// Exact reduced state at time `t` (with `t₀ = 0`): populations are frozen
/// and ρ₀₁ is multiplied by f(t).
pub fn spin_star_analytic(params: &SpinStarParams, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    if rho0.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: rho0.dim() });
    }
    let f = params.coherence_factor(t);
    let mut m = rho0.matrix().clone();
    m.set(0, 1, rho0.get(0, 1) * f);
    m.set(1, 0, rho0.get(1, 0) * f.conj());
    Ok(DensityMatrix::from_matrix_unchecked(m))
}
