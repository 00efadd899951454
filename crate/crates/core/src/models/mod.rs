//! Time-dependent Lindblad-type models.
//!
//! A model supplies, at any time `t`, the Hamiltonian `H_S(t)` and a set of
//! jump channels `(A_l(t), γ_l(t))` with real, possibly negative, rates. The
//! generator is
//!
//! ```text
//! dρ/dt = −i[H_S, ρ] + Σ_l γ_l (A_l ρ A_l† − ½{A_l†A_l, ρ})
//! ```

mod quadrature;
mod spin_star;
mod tabulated;
mod transmon;

pub use quadrature::{gauss_legendre, TransmonTables};
pub use spin_star::{spin_star_analytic, SpinStarModel, SpinStarParams};
pub use tabulated::{parse_complex, RateTable, TabulatedModel};
pub use transmon::{TransmonChannels, TransmonModel, TransmonParams, TransmonRates};

use crate::error::{Error, Result};
use crate::linalg::{Operator, C64};

/// A jump channel evaluated at a fixed time.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    pub operator: Operator,
    pub rate: f64,
}

impl Channel {
    pub fn new(operator: Operator, rate: f64) -> Self {
        Channel { operator, rate }
    }
}

pub trait LindbladModel: Send + Sync {
    fn dim(&self) -> usize;

    fn hamiltonian(&self, t: f64) -> Result<Operator>;

    fn channels(&self, t: f64) -> Result<Vec<Channel>>;
}

/// `H_eff(t) = H_S(t) − (i/2) Σ_l γ_l(t) A_l†(t) A_l(t)`
pub fn effective_hamiltonian(model: &dyn LindbladModel, t: f64) -> Result<Operator> {
    let h = model.hamiltonian(t)?;
    let channels = model.channels(t)?;
    effective_hamiltonian_from(&h, &channels)
}

pub(crate) fn effective_hamiltonian_from(h: &Operator, channels: &[Channel]) -> Result<Operator> {
    let mut h_eff = h.clone();
    for ch in channels {
        if ch.rate == 0.0 {
            continue;
        }
        let a_dag_a = ch.operator.adjoint().matmul(&ch.operator)?;
        h_eff.add_scaled(&a_dag_a, C64::new(0.0, -0.5 * ch.rate))?;
    }
    Ok(h_eff)
}

type OperatorFn = Box<dyn Fn(f64) -> Operator + Send + Sync>;
type RateFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A channel given by closures of time.
pub struct JumpChannel {
    operator_at: OperatorFn,
    rate_at: RateFn,
}

impl JumpChannel {
    pub fn new(
        operator_at: impl Fn(f64) -> Operator + Send + Sync + 'static,
        rate_at: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        JumpChannel { operator_at: Box::new(operator_at), rate_at: Box::new(rate_at) }
    }

    /// Constant operator with a time-dependent rate.
    pub fn fixed(operator: Operator, rate_at: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        JumpChannel::new(move |_| operator.clone(), rate_at)
    }

    pub fn constant(operator: Operator, rate: f64) -> Self {
        JumpChannel::fixed(operator, move |_| rate)
    }

    pub fn operator_at(&self, t: f64) -> Operator {
        (self.operator_at)(t)
    }

    pub fn rate_at(&self, t: f64) -> f64 {
        (self.rate_at)(t)
    }
}

/// A model assembled from closures; handy for ad-hoc models and tests.
pub struct CustomModel {
    dim: usize,
    hamiltonian_at: OperatorFn,
    channels: Vec<JumpChannel>,
}

impl CustomModel {
    pub fn new(
        dim: usize,
        hamiltonian_at: impl Fn(f64) -> Operator + Send + Sync + 'static,
        channels: Vec<JumpChannel>,
    ) -> Self {
        CustomModel { dim, hamiltonian_at: Box::new(hamiltonian_at), channels }
    }

    /// Time-independent Hamiltonian and channels.
    pub fn constant(hamiltonian: Operator, channels: Vec<(Operator, f64)>) -> Self {
        let dim = hamiltonian.dim();
        let channels = channels.into_iter().map(|(a, g)| JumpChannel::constant(a, g)).collect();
        CustomModel::new(dim, move |_| hamiltonian.clone(), channels)
    }
}

impl LindbladModel for CustomModel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn hamiltonian(&self, t: f64) -> Result<Operator> {
        let h = (self.hamiltonian_at)(t);
        check_dim(self.dim, &h)?;
        Ok(h)
    }

    fn channels(&self, t: f64) -> Result<Vec<Channel>> {
        self.channels
            .iter()
            .map(|ch| {
                let a = ch.operator_at(t);
                check_dim(self.dim, &a)?;
                Ok(Channel::new(a, ch.rate_at(t)))
            })
            .collect()
    }
}

fn check_dim(dim: usize, op: &Operator) -> Result<()> {
    if op.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: op.dim() });
    }
    Ok(())
}
