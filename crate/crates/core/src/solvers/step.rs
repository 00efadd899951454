//! Single-step update rules.
//!
//! Step functions return the successor ensemble without consolidation; the
//! driver merges members on its configured stride.

use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use smallvec::SmallVec;

use crate::ensemble::{EnsembleMember, SignedEnsemble};
use crate::error::{Error, Result};
use crate::linalg::{Operator, StateVector, C64};
use crate::models::{effective_hamiltonian_from, Channel, LindbladModel};
use crate::solvers::rng::StepRandomness;

/// Jump probabilities above this mean δt is too coarse for a first-order step.
pub const MAX_JUMP_PROBABILITY: f64 = 0.1;

/// Below this many members the per-member work runs on the calling thread.
const PARALLEL_THRESHOLD: usize = 256;

/// `δt |γ| ‖A ψ‖²`.
pub fn jump_probability(state: &StateVector, channel: &Channel, t: f64, dt: f64) -> Result<f64> {
    if channel.rate == 0.0 {
        return Ok(0.0);
    }
    let image = channel.operator.apply(state)?;
    checked_probability(dt * channel.rate.abs() * image.norm_sqr(), 0, t)
}

fn checked_probability(p: f64, channel: usize, t: f64) -> Result<f64> {
    if p > MAX_JUMP_PROBABILITY || !p.is_finite() {
        return Err(Error::StepTooLarge { probability: p, channel, t });
    }
    Ok(p)
}

/// `normalize((1 − i H_eff(t) δt) ψ)`.
pub fn deterministic_successor(
    state: &StateVector,
    model: &dyn LindbladModel,
    t: f64,
    dt: f64,
) -> Result<StateVector> {
    let h = model.hamiltonian(t)?;
    let channels = model.channels(t)?;
    let propagator = euler_propagator(&effective_hamiltonian_from(&h, &channels)?, dt);
    propagator.apply(state)?.normalize()
}

/// `normalize(A ψ)`.
pub fn jump_successor(state: &StateVector, channel: &Channel) -> Result<StateVector> {
    channel.operator.apply(state)?.normalize()
}

fn euler_propagator(h_eff: &Operator, dt: f64) -> Operator {
    let mut m = Operator::identity(h_eff.dim());
    m.add_scaled(h_eff, C64::new(0.0, -dt)).expect("same dimension");
    m
}

/// A channel after merging, remembering the index of its first constituent.
#[derive(Clone, Debug)]
pub(crate) struct ActiveChannel {
    pub id: usize,
    pub operator: Operator,
    pub rate: f64,
}

/// Everything a step needs that does not depend on the member.
pub(crate) struct StepContext {
    pub t: f64,
    pub dt: f64,
    pub step: u64,
    /// Number of channels reported by the model, before merging.
    pub n_channels: usize,
    pub channels: Vec<ActiveChannel>,
    pub propagator: Operator,
}

impl StepContext {
    pub fn new(model: &dyn LindbladModel, t: f64, dt: f64, step: u64) -> Result<Self> {
        let h = model.hamiltonian(t)?;
        let raw = model.channels(t)?;
        let n_channels = raw.len();
        let channels = merge_channels(raw);
        let merged: Vec<Channel> =
            channels.iter().map(|c| Channel::new(c.operator.clone(), c.rate)).collect();
        let propagator = euler_propagator(&effective_hamiltonian_from(&h, &merged)?, dt);
        Ok(StepContext { t, dt, step, n_channels, channels, propagator })
    }
}

/// Sums the rates of channels whose operators are identical. Opposite rates on
/// one operator then cancel exactly instead of producing jumps of both signs.
pub(crate) fn merge_channels(channels: Vec<Channel>) -> Vec<ActiveChannel> {
    let mut merged: Vec<ActiveChannel> = Vec::with_capacity(channels.len());
    for (id, ch) in channels.into_iter().enumerate() {
        match merged.iter_mut().find(|m| m.operator == ch.operator) {
            Some(m) => m.rate += ch.rate,
            None => merged.push(ActiveChannel { id, operator: ch.operator, rate: ch.rate }),
        }
    }
    merged
}

type Successors = SmallVec<[EnsembleMember; 4]>;

/// Samples the jump branches of one member; returns them with their summed count.
fn sample_jumps(
    ctx: &StepContext,
    rnd: &StepRandomness,
    index: usize,
    member: &EnsembleMember,
) -> Result<(Successors, i64)> {
    let mut out = Successors::new();
    let mut jumped = 0i64;
    let magnitude = member.count.unsigned_abs();
    for ch in &ctx.channels {
        if ch.rate == 0.0 {
            continue;
        }
        let image = ch.operator.apply_unchecked(&member.state);
        let p = checked_probability(ctx.dt * ch.rate.abs() * image.norm_sqr(), ch.id, ctx.t)?;
        if p == 0.0 {
            continue;
        }
        let mut rng = rnd.substream(ctx.step, index as u64, ch.id as u64);
        let k = Binomial::new(magnitude, p).expect("probability in [0, 0.1]").sample(&mut rng) as i64;
        if k == 0 {
            continue;
        }
        let count = if (member.count > 0) == (ch.rate > 0.0) { k } else { -k };
        jumped += count;
        out.push(EnsembleMember::new(image.normalize()?, count));
    }
    Ok((out, jumped))
}

/// Deterministic branch first, then the jump branches.
fn branch_member(
    ctx: &StepContext,
    rnd: &StepRandomness,
    index: usize,
    member: &EnsembleMember,
) -> Result<Successors> {
    let (mut out, jumped) = sample_jumps(ctx, rnd, index, member)?;
    let stay = member.count - jumped;
    if stay != 0 {
        let det = ctx.propagator.apply_unchecked(&member.state).normalize()?;
        out.insert(0, EnsembleMember::new(det, stay));
    }
    Ok(out)
}

fn map_members<F>(ensemble: &SignedEnsemble, f: F) -> Result<Vec<EnsembleMember>>
where
    F: Fn(usize, &EnsembleMember) -> Result<Successors> + Sync,
{
    let members = ensemble.members();
    let results: Vec<Result<Successors>> = if members.len() >= PARALLEL_THRESHOLD {
        members.par_iter().enumerate().map(|(i, m)| f(i, m)).collect()
    } else {
        members.iter().enumerate().map(|(i, m)| f(i, m)).collect()
    };
    let mut out = Vec::with_capacity(members.len() + members.len() / 8 + 4);
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

pub(crate) fn nmep_step_with(ensemble: &SignedEnsemble, ctx: &StepContext, rnd: &StepRandomness) -> Result<SignedEnsemble> {
    let members = map_members(ensemble, |i, m| branch_member(ctx, rnd, i, m))?;
    Ok(ensemble.with_members(members))
}

pub(crate) fn mcwf_step_with(ensemble: &SignedEnsemble, ctx: &StepContext, rnd: &StepRandomness) -> Result<SignedEnsemble> {
    if let Some(ch) = ctx.channels.iter().find(|c| c.rate < 0.0) {
        return Err(Error::NegativeRate { channel: ch.id, rate: ch.rate, t: ctx.t });
    }
    nmep_step_with(ensemble, ctx, rnd)
}

pub(crate) fn nmqj_step_with(
    ensemble: &SignedEnsemble,
    ctx: &StepContext,
    rnd: &StepRandomness,
    tol: f64,
) -> Result<SignedEnsemble> {
    let members = ensemble.members();
    if let Some((i, m)) = members.iter().enumerate().find(|(_, m)| m.count <= 0) {
        return Err(Error::NonPositiveCount { member: i, count: m.count });
    }
    let negative: Vec<&ActiveChannel> = ctx.channels.iter().filter(|c| c.rate < 0.0).collect();
    if negative.is_empty() {
        return nmep_step_with(ensemble, ctx, rnd);
    }

    let canonical: Vec<StateVector> =
        members.iter().map(|m| m.state.canonical_phase()).collect::<Result<_>>()?;
    let deterministic: Vec<StateVector> = members
        .iter()
        .map(|m| ctx.propagator.apply_unchecked(&m.state).normalize())
        .collect::<Result<_>>()?;

    // reverse[α] lists (channel, source α′, probability) triples for reverse jumps out of α.
    let mut reverse: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); members.len()];
    for ch in &negative {
        for (source, m) in members.iter().enumerate() {
            let image = ch.operator.apply_unchecked(&m.state);
            let weight = image.norm_sqr();
            if weight == 0.0 {
                continue;
            }
            let jump_state = image.normalize()?.canonical_phase()?;
            let target = canonical
                .iter()
                .position(|c| c.distance(&jump_state) < tol)
                .ok_or(Error::ReverseTargetMissing { channel: ch.id, source_member: source, t: ctx.t })?;
            let p = m.count as f64 / members[target].count as f64 * ch.rate.abs() * ctx.dt * weight;
            reverse[target].push((ch.id, source, p));
        }
    }

    let positive = StepContext {
        t: ctx.t,
        dt: ctx.dt,
        step: ctx.step,
        n_channels: ctx.n_channels,
        channels: ctx.channels.iter().filter(|c| c.rate > 0.0).cloned().collect(),
        propagator: ctx.propagator.clone(),
    };

    let mut out = Vec::with_capacity(members.len() + 4);
    for (alpha, member) in members.iter().enumerate() {
        let (jumps, jumped) = sample_jumps(&positive, rnd, alpha, member)?;
        let mut stay = member.count - jumped;

        let total_p: f64 = reverse[alpha].iter().map(|r| r.2).sum();
        if total_p > 1.0 {
            let channel = reverse[alpha].first().map_or(0, |r| r.0);
            return Err(Error::StepTooLarge { probability: total_p, channel, t: ctx.t });
        }
        let mut moved = Vec::new();
        let mut remaining_p = 1.0;
        // One stream past the forward channel indices serves all reverse draws of α.
        let mut rng = rnd.substream(ctx.step, alpha as u64, ctx.n_channels as u64);
        for &(_, source, p) in &reverse[alpha] {
            if stay <= 0 || remaining_p <= 0.0 {
                break;
            }
            let conditional = (p / remaining_p).clamp(0.0, 1.0);
            remaining_p -= p;
            let k = Binomial::new(stay as u64, conditional).expect("valid probability").sample(&mut rng) as i64;
            if k > 0 {
                stay -= k;
                moved.push(EnsembleMember::new(deterministic[source].clone(), k));
            }
        }
        if stay != 0 {
            out.push(EnsembleMember::new(deterministic[alpha].clone(), stay));
        }
        out.extend(jumps.iter().cloned());
        out.extend(moved);
    }
    Ok(ensemble.with_members(out))
}

/// One NMEP step at time `t` (unconsolidated).
pub fn nmep_step(
    ensemble: &SignedEnsemble,
    model: &dyn LindbladModel,
    t: f64,
    dt: f64,
    step: u64,
    rnd: &StepRandomness,
) -> Result<SignedEnsemble> {
    nmep_step_with(ensemble, &StepContext::new(model, t, dt, step)?, rnd)
}

/// One MCWF step; rejects negative rates.
pub fn mcwf_step(
    ensemble: &SignedEnsemble,
    model: &dyn LindbladModel,
    t: f64,
    dt: f64,
    step: u64,
    rnd: &StepRandomness,
) -> Result<SignedEnsemble> {
    mcwf_step_with(ensemble, &StepContext::new(model, t, dt, step)?, rnd)
}

/// One NMQJ step; negative channels act as reverse jumps between members whose
/// states are related by the channel operator up to `tol`.
pub fn nmqj_step(
    ensemble: &SignedEnsemble,
    model: &dyn LindbladModel,
    t: f64,
    dt: f64,
    step: u64,
    rnd: &StepRandomness,
    tol: f64,
) -> Result<SignedEnsemble> {
    nmqj_step_with(ensemble, &StepContext::new(model, t, dt, step)?, rnd, tol)
}
