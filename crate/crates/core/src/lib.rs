//! Signed-ensemble Monte-Carlo unraveling of time-local master equations with
//! rates of either sign, plus MCWF/NMQJ baselines and an RK4 reference.

pub mod cli;
pub mod ensemble;
pub mod error;
pub mod linalg;
pub mod models;
pub mod reference;
pub mod solvers;

pub use ensemble::{EnsembleMember, SignedEnsemble, DEFAULT_CONSOLIDATION_TOL};
pub use error::{Error, Result};
pub use linalg::{hermitian_eig2, min_eigenvalue, DensityMatrix, Eig2, Operator, StateVector, C64};
