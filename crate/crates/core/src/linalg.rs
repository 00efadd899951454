//! Dense complex linear algebra for small Hilbert spaces.
//!
//! States live inline (no heap) up to dimension 4, which covers every model
//! in this crate; larger dimensions spill to the heap transparently.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Norms at or below this are treated as exactly zero.
pub const ZERO_NORM: f64 = 1e-300;

/// Components with modulus at or below this are skipped when fixing the global phase.
pub const PHASE_THRESHOLD: f64 = 1e-12;

/// Tolerance used for Hermiticity checks on inputs.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub(crate) type Amplitudes = SmallVec<[C64; 4]>;

/// A vector of complex amplitudes. Normalization is not enforced by the type;
/// ensemble members are kept normalized by the solvers.
#[derive(Clone, PartialEq)]
pub struct StateVector {
    amps: Amplitudes,
}

impl StateVector {
    pub fn new(amps: &[C64]) -> Self {
        assert!(!amps.is_empty(), "state vector needs dim >= 1");
        StateVector { amps: SmallVec::from_slice(amps) }
    }

    pub(crate) fn from_amplitudes(amps: Amplitudes) -> Self {
        debug_assert!(!amps.is_empty());
        StateVector { amps }
    }

    pub fn from_real(amps: &[f64]) -> Self {
        StateVector { amps: amps.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    /// The computational basis vector |k⟩.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        let mut amps: Amplitudes = SmallVec::from_elem(C64::new(0.0, 0.0), dim);
        amps[k] = C64::new(1.0, 0.0);
        StateVector { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, factor: C64) -> StateVector {
        StateVector { amps: self.amps.iter().map(|a| a * factor).collect() }
    }

    /// Euclidean distance ‖self − other‖.
    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalize(&self) -> Result<StateVector> {
        let norm = self.norm();
        if norm <= ZERO_NORM || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(self.scale(C64::new(1.0 / norm, 0.0)))
    }

    /// Removes the global phase by rotating the first component with modulus
    /// above [`PHASE_THRESHOLD`] onto the positive real axis.
    pub fn canonical_phase(&self) -> Result<StateVector> {
        let lead = self
            .amps
            .iter()
            .find(|a| a.norm() > PHASE_THRESHOLD)
            .ok_or(Error::ZeroVector)?;
        let r = lead.norm();
        let rotation = lead.conj() / r;
        let mut amps: Amplitudes = self.amps.iter().map(|a| a * rotation).collect();
        // Pin the imaginary part of the leading component to exactly zero.
        let k = self.amps.iter().position(|a| a.norm() > PHASE_THRESHOLD).unwrap();
        amps[k] = C64::new(amps[k].re, 0.0);
        Ok(StateVector { amps })
    }

    /// |self⟩⟨self| as a dense matrix.
    pub fn projector(&self) -> Operator {
        let n = self.dim();
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = self.amps[i] * self.amps[j].conj();
            }
        }
        Operator { dim: n, data }
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.amps.iter()).finish()
    }
}

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<C64>,
}

impl Operator {
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("operator dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: data.len() });
        }
        Ok(Operator { dim, data })
    }

    pub fn from_rows(rows: &[&[C64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
            }
            data.extend_from_slice(row);
        }
        Operator::new(dim, data)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> =
            rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect();
        let refs: Vec<&[C64]> = rows.iter().map(|r| r.as_slice()).collect();
        Operator::from_rows(&refs)
    }

    pub fn zeros(dim: usize) -> Self {
        Operator { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Operator::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Operator::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = *v;
        }
        m
    }

    pub fn sigma_x() -> Self {
        Operator::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    pub fn sigma_y() -> Self {
        let z = C64::new(0.0, 0.0);
        Operator::from_rows(&[&[z, C64::new(0.0, -1.0)], &[C64::new(0.0, 1.0), z]]).unwrap()
    }

    pub fn sigma_z() -> Self {
        Operator::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap()
    }

    /// σ₊ = |0⟩⟨1|, raising towards the σ_z = +1 state |0⟩.
    pub fn sigma_plus() -> Self {
        Operator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap()
    }

    /// σ₋ = |1⟩⟨0|.
    pub fn sigma_minus() -> Self {
        Operator::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap()
    }

    /// |i⟩⟨j|
    pub fn matrix_unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Operator::zeros(dim);
        m.data[i * dim + j] = C64::new(1.0, 0.0);
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.dim + j] = value;
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.dim() });
        }
        Ok(self.apply_unchecked(v))
    }

    pub(crate) fn apply_unchecked(&self, v: &StateVector) -> StateVector {
        let n = self.dim;
        let amps = (0..n)
            .map(|i| {
                let row = &self.data[i * n..(i + 1) * n];
                row.iter().zip(v.amplitudes()).map(|(a, b)| a * b).sum()
            })
            .collect();
        StateVector::from_amplitudes(amps)
    }

    /// ⟨v|self|v⟩
    pub fn expectation(&self, v: &StateVector) -> Result<C64> {
        Ok(v.inner(&self.apply(v)?))
    }

    pub fn adjoint(&self) -> Operator {
        let n = self.dim;
        let mut out = Operator::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut out = Operator::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: C64) -> Operator {
        Operator { dim: self.dim, data: self.data.iter().map(|a| a * factor).collect() }
    }

    pub fn scale_real(&self, factor: f64) -> Operator {
        Operator { dim: self.dim, data: self.data.iter().map(|a| a * factor).collect() }
    }

    /// self += factor · other
    pub fn add_scaled(&mut self, other: &Operator, factor: C64) -> Result<()> {
        self.check_dim(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * factor;
        }
        Ok(())
    }

    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        Ok(&self.matmul(other)? - &other.matmul(self)?)
    }

    pub fn anticommutator(&self, other: &Operator) -> Result<Operator> {
        Ok(&self.matmul(other)? + &other.matmul(self)?)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// Largest entrywise modulus of self − self†.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    fn check_dim(&self, other: &Operator) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[C64]> = self.data.chunks(self.dim).collect();
        f.debug_list().entries(rows).finish()
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        Operator {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        Operator {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scale_real(rhs)
    }
}

/// A density matrix. Hermitian with unit trace for physical states, but
/// positivity is not assumed: signed ensembles and unphysical generators can
/// both produce negative eigenvalues.
#[derive(Clone, PartialEq)]
pub struct DensityMatrix(Operator);

impl DensityMatrix {
    pub fn new(matrix: Operator) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: defect });
        }
        Ok(DensityMatrix(matrix))
    }

    pub(crate) fn from_matrix_unchecked(matrix: Operator) -> Self {
        DensityMatrix(matrix)
    }

    pub fn pure(state: &StateVector) -> Self {
        DensityMatrix(state.projector())
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn matrix(&self) -> &Operator {
        &self.0
    }

    pub fn into_matrix(self) -> Operator {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0.get(i, j)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// trace(observable · ρ)
    pub fn expectation(&self, observable: &Operator) -> Result<C64> {
        Ok(observable.matmul(&self.0)?.trace())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        min_eigenvalue(self)
    }
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Eigen-decomposition of a 2×2 Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Eig2 {
    /// Descending.
    pub values: [f64; 2],
    /// Columns are the eigenvectors matching `values`.
    pub vectors: Operator,
}

/// Closed-form eigen-decomposition `m = U diag(λ₁, λ₂) U†` with λ₁ ≥ λ₂.
///
/// Each eigenvector's phase is fixed so that its larger-magnitude component
/// is positive real (the first component wins a tie).
pub fn hermitian_eig2(m: &Operator) -> Result<Eig2> {
    if m.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: m.dim() });
    }
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: defect });
    }
    let a = m.get(0, 0).re;
    let d = m.get(1, 1).re;
    let b = m.get(0, 1);
    let mean = 0.5 * (a + d);
    let half_gap = 0.5 * (a - d);
    let radius = half_gap.hypot(b.norm());
    let values = [mean + radius, mean - radius];

    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let columns: [[C64; 2]; 2] = if b.norm() <= f64::EPSILON * (a.abs() + d.abs()).max(f64::MIN_POSITIVE) {
        // Diagonal up to rounding: basis vectors ordered by eigenvalue.
        if a >= d {
            [[one, zero], [zero, one]]
        } else {
            [[zero, one], [one, zero]]
        }
    } else {
        let mut cols = [[zero; 2]; 2];
        for (k, &lambda) in values.iter().enumerate() {
            // (m − λ) v = 0 has the two candidate solutions below; the longer
            // one is better conditioned.
            let v1 = [b, C64::new(lambda - a, 0.0)];
            let v2 = [C64::new(lambda - d, 0.0), b.conj()];
            let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
            let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
            let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
            let n = n.sqrt();
            cols[k] = [v[0] / n, v[1] / n];
        }
        cols
    };

    let mut u = Operator::zeros(2);
    for (k, col) in columns.iter().enumerate() {
        let lead = if col[0].norm() >= col[1].norm() { col[0] } else { col[1] };
        let rotation = lead.conj() / lead.norm();
        for i in 0..2 {
            u.set(i, k, col[i] * rotation);
        }
    }
    Ok(Eig2 { values, vectors: u })
}

/// Smallest eigenvalue of a Hermitian matrix via a full dense eigensolve.
pub fn min_eigenvalue(rho: &DensityMatrix) -> Result<f64> {
    let m = rho.matrix();
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: defect });
    }
    let eig = m.to_nalgebra().symmetric_eigenvalues();
    Ok(eig.iter().copied().fold(f64::INFINITY, f64::min))
}
