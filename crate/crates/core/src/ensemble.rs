//! Signed ensembles of pure states.
//!
//! An ensemble `{(|ψ_α⟩, N_α)}` represents `ρ = (1/N) Σ_α N_α |ψ_α⟩⟨ψ_α|`
//! with integer counts that may be negative and always sum to `N`.

use std::collections::HashMap;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, Operator, StateVector, C64};

/// Consolidation tolerance used when none is configured.
pub const DEFAULT_CONSOLIDATION_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleMember {
    pub state: StateVector,
    pub count: i64,
}

impl EnsembleMember {
    pub fn new(state: StateVector, count: i64) -> Self {
        EnsembleMember { state, count }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignedEnsemble {
    members: Vec<EnsembleMember>,
    total: i64,
}

impl SignedEnsemble {
    /// Builds an ensemble; the total is the sum of the member counts.
    pub fn new(members: Vec<EnsembleMember>) -> Result<Self> {
        let dim = members.first().ok_or(Error::EmptyEnsemble)?.state.dim();
        if let Some(bad) = members.iter().find(|m| m.state.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.state.dim() });
        }
        let total: i64 = members.iter().map(|m| m.count).sum();
        if total <= 0 {
            return Err(Error::InvalidParameter(format!(
                "ensemble total count must be positive, got {total}"
            )));
        }
        Ok(SignedEnsemble { members, total })
    }

    /// A single member holding all `total` counts.
    pub fn pure(state: StateVector, total: i64) -> Result<Self> {
        SignedEnsemble::new(vec![EnsembleMember::new(state, total)])
    }

    /// Successor ensemble with the same total. Used by the steppers, which
    /// check conservation themselves.
    pub(crate) fn with_members(&self, members: Vec<EnsembleMember>) -> Self {
        SignedEnsemble { members, total: self.total }
    }

    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn total(&self) -> i64 {
        self.total
    }

    pub fn dim(&self) -> usize {
        self.members.first().map_or(0, |m| m.state.dim())
    }

    pub fn count_sum(&self) -> i64 {
        self.members.iter().map(|m| m.count).sum()
    }

    /// Σ_α |N_α|
    pub fn absolute_count(&self) -> i64 {
        self.members.iter().map(|m| m.count.abs()).sum()
    }

    /// `(1/N) Σ_α N_α |ψ_α⟩⟨ψ_α|`, accumulated on the upper triangle and
    /// mirrored so the result is Hermitian bit-for-bit.
    pub fn density_matrix(&self) -> Result<DensityMatrix> {
        if self.members.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        let n = self.dim();
        let mut m = Operator::zeros(n);
        for member in &self.members {
            let w = member.count as f64;
            let a = member.state.amplitudes();
            for i in 0..n {
                for j in i..n {
                    let v = m.get(i, j) + a[i] * a[j].conj() * w;
                    m.set(i, j, v);
                }
            }
        }
        let norm = 1.0 / self.total as f64;
        for i in 0..n {
            let d = m.get(i, i).re * norm;
            m.set(i, i, C64::new(d, 0.0));
            for j in i + 1..n {
                let v = m.get(i, j) * norm;
                m.set(i, j, v);
                m.set(j, i, v.conj());
            }
        }
        Ok(DensityMatrix::from_matrix_unchecked(m))
    }

    /// `(1/N) Σ_α N_α ⟨ψ_α|O|ψ_α⟩`
    pub fn expectation(&self, observable: &Operator) -> Result<C64> {
        if self.members.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        if observable.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: observable.dim() });
        }
        let mut acc = C64::new(0.0, 0.0);
        for member in &self.members {
            acc += observable.expectation(&member.state)? * member.count as f64;
        }
        Ok(acc / self.total as f64)
    }

    /// Canonicalizes phases, merges members whose canonical states are closer
    /// than `tol`, and drops zero counts. The total is unchanged.
    ///
    /// Members are visited in order; each joins the earliest group whose
    /// anchor (first member) lies within `tol`, otherwise it starts a new
    /// group. A group keeps the state of its largest-|count| member (earliest
    /// on ties) and the sum of the counts.
    pub fn consolidate(&self, tol: f64) -> SignedEnsemble {
        assert!(tol > 0.0, "consolidation tolerance must be positive");
        let mut index = CellIndex::new(tol);
        let mut groups: Vec<Group> = Vec::new();

        for (k, member) in self.members.iter().enumerate() {
            let state = member.state.canonical_phase().unwrap_or_else(|_| member.state.clone());
            let found = index
                .candidates(&state)
                .filter(|&g| groups[g].anchor.distance(&state) < tol)
                .min();
            match found {
                Some(g) => groups[g].absorb(k, member.count, state),
                None => {
                    index.insert(&state, groups.len());
                    groups.push(Group::new(k, member.count, state));
                }
            }
        }

        let members = groups
            .into_iter()
            .filter(|g| g.count != 0)
            .map(|g| EnsembleMember::new(g.representative, g.count))
            .collect();
        SignedEnsemble { members, total: self.total }
    }
}

struct Group {
    anchor: StateVector,
    representative: StateVector,
    best: (i64, usize),
    count: i64,
}

impl Group {
    fn new(order: usize, count: i64, state: StateVector) -> Self {
        Group { anchor: state.clone(), representative: state, best: (count.abs(), order), count }
    }

    fn absorb(&mut self, order: usize, count: i64, state: StateVector) {
        self.count += count;
        if count.abs() > self.best.0 {
            self.best = (count.abs(), order);
            self.representative = state;
        }
    }
}

type CellKey = SmallVec<[i64; 8]>;

/// Uniform grid over the real coordinates of canonical states.
///
/// Cells are much wider than the merge tolerance, so a query only has to
/// look at a neighbouring cell along coordinates that sit within `tol` of a
/// cell face; usually that is just the home cell.
struct CellIndex {
    tol: f64,
    width: f64,
    cells: HashMap<CellKey, SmallVec<[usize; 2]>>,
}

impl CellIndex {
    const WIDTH_IN_TOLS: f64 = 64.0;

    fn new(tol: f64) -> Self {
        CellIndex { tol, width: tol * Self::WIDTH_IN_TOLS, cells: HashMap::new() }
    }

    fn coordinates(state: &StateVector) -> impl Iterator<Item = f64> + '_ {
        state.amplitudes().iter().flat_map(|a| [a.re, a.im])
    }

    fn key(&self, state: &StateVector) -> CellKey {
        Self::coordinates(state).map(|x| (x / self.width).floor() as i64).collect()
    }

    fn insert(&mut self, state: &StateVector, group: usize) {
        self.cells.entry(self.key(state)).or_default().push(group);
    }

    fn candidates<'a>(&'a self, state: &StateVector) -> impl Iterator<Item = usize> + 'a {
        let mut keys: Vec<CellKey> = vec![CellKey::new()];
        for x in Self::coordinates(state) {
            let cell = (x / self.width).floor();
            let base = cell as i64;
            let low = x - cell * self.width < self.tol;
            let high = (cell + 1.0) * self.width - x < self.tol;
            let mut offsets: SmallVec<[i64; 3]> = SmallVec::new();
            offsets.push(0);
            if low {
                offsets.push(-1);
            }
            if high {
                offsets.push(1);
            }
            if offsets.len() == 1 {
                for k in keys.iter_mut() {
                    k.push(base);
                }
            } else {
                keys = keys
                    .into_iter()
                    .flat_map(|k| {
                        offsets.iter().map(move |o| {
                            let mut k = k.clone();
                            k.push(base + o);
                            k
                        })
                    })
                    .collect();
            }
        }
        keys.into_iter()
            .filter_map(move |k| self.cells.get(&k))
            .flat_map(|groups| groups.iter().copied())
    }
}
