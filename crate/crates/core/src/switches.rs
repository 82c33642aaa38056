//! RF-switch minimization.
//!
//! Starting from an optimized codebook with every port switched, each
//! iteration hardwires ports and re-optimizes the rest:
//!
//! 1. every switched port whose state is identical across all coders is
//!    hardwired to that state; otherwise
//! 2. the single `(port, state)` whose forcing gives the lowest mean
//!    correlation is hardwired (ports scanned in increasing order, state 0
//!    before 1, first minimum wins);
//! 3. the remaining switched bits are re-optimized by the GA, seeded with
//!    the current codebook.
//!
//! The loop stops when the new mean correlation exceeds `g* + delta_g` (or
//! reaches it), returning the previous iteration, or when no port can be
//! removed without making two coders equal.

use alloc::format;
use alloc::vec::Vec;

use crate::bundle::AntennaBundle;
use crate::codebook::{duplicate_pairs, pair_mean, Codebook, SwitchPartition};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::ga::{ga_optimize_constrained, GaParams};
use crate::linalg::CVector;
use crate::network::AntennaCoder;
use crate::pattern::BasisDecomposition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Ports already constant across the codebook were hardwired.
    Identical,
    /// One port was forced to a common state.
    Forced,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub branch: Branch,
    /// Ports hardwired in this iteration with their states (0-based).
    pub hardwired: Vec<(usize, bool)>,
    pub switch_count: usize,
    pub mean_correlation: f64,
    pub codebook: Codebook,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// `g - g* >= delta_g` at the last attempted iteration.
    Threshold,
    /// Fewer switches could not keep the coders distinct.
    MinimumSwitches,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchMinimization {
    pub codebook: Codebook,
    pub partition: SwitchPartition,
    /// Accepted iterations in order.
    pub trace: Vec<IterationRecord>,
    /// The iteration that crossed the threshold, if any.
    pub rejected: Option<IterationRecord>,
    pub stop: StopReason,
}

impl SwitchMinimization {
    pub fn switch_count(&self) -> usize {
        self.partition.switch_count()
    }
}

/// Smallest switch count that can realize `p` distinct coders.
pub fn minimum_switches(p: usize) -> usize {
    let mut s = 0;
    while (1usize << s) < p {
        s += 1;
    }
    s
}

pub fn minimize_switches<E: Executor>(
    bundle: &AntennaBundle,
    decomp: &BasisDecomposition,
    baseline: &Codebook,
    g_star: f64,
    delta_g: f64,
    params: &GaParams,
    exec: &E,
) -> Result<SwitchMinimization> {
    if !(delta_g > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "delta_g must be positive, got {delta_g}"
        )));
    }
    if !(0.0..=1.0).contains(&g_star) {
        return Err(Error::InvalidParameter(format!("g* must be in [0, 1], got {g_star}")));
    }
    if let Some(g) = baseline.g_star() {
        if g != g_star {
            return Err(Error::InvalidParameter(format!(
                "baseline was optimized against g* = {g}, not {g_star}"
            )));
        }
    }
    if baseline.q() != bundle.q() {
        return Err(Error::DimensionMismatch(format!(
            "baseline has {} ports, antenna has {}",
            baseline.q(),
            bundle.q()
        )));
    }
    params.validate()?;
    let p = baseline.p();
    let q = baseline.q();
    let floor = minimum_switches(p);

    let finish = |cb: &Codebook| cb.clone().with_g_star(g_star).with_delta_g(delta_g);
    let mut current = baseline.clone();
    let mut trace = Vec::new();
    let mut iteration: u64 = 0;
    loop {
        let partition = current.partition().clone();
        if partition.switch_count() <= floor {
            return Ok(SwitchMinimization {
                codebook: finish(&current),
                partition,
                trace,
                rejected: None,
                stop: StopReason::MinimumSwitches,
            });
        }
        iteration += 1;

        let identical: Vec<(usize, bool)> = partition
            .switched()
            .iter()
            .filter_map(|&v| {
                let s = current.coders()[0].get(v);
                current.coders().iter().all(|c| c.get(v) == s).then_some((v, s))
            })
            .collect();
        let mut next = partition.clone();
        let (branch, hardwired, seed) = if !identical.is_empty() {
            for &(v, s) in &identical {
                next.hardwire(v, s)?;
            }
            (Branch::Identical, identical, current.coders().to_vec())
        } else {
            let (v, s, coders) = best_forced_port(bundle, decomp, &current, exec)?;
            next.hardwire(v, s)?;
            (Branch::Forced, alloc::vec![(v, s)], coders)
        };

        // The seed is evaluated first and only a strictly better codebook
        // replaces it, so an already optimal codebook comes back unchanged.
        let iter_params = params.with_seed(params.seed.wrapping_add(iteration));
        let chosen = ga_optimize_constrained(bundle, decomp, p, &next, &[seed], &iter_params, exec)?;
        debug_assert_eq!(chosen.q(), q);
        let record = IterationRecord {
            branch,
            hardwired,
            switch_count: chosen.partition().switch_count(),
            mean_correlation: chosen.mean_correlation(),
            codebook: chosen.clone(),
        };
        if chosen.mean_correlation() - g_star >= delta_g {
            return Ok(SwitchMinimization {
                codebook: finish(&current),
                partition,
                trace,
                rejected: Some(record),
                stop: StopReason::Threshold,
            });
        }
        trace.push(record);
        current = chosen;
    }
}

/// Scans every switched port and both states, returning the forced
/// codebook with the lowest objective.
fn best_forced_port<E: Executor>(
    bundle: &AntennaBundle,
    decomp: &BasisDecomposition,
    current: &Codebook,
    exec: &E,
) -> Result<(usize, bool, Vec<AntennaCoder>)> {
    let switched = current.partition().switched().to_vec();
    let candidates: Vec<(usize, bool)> = switched.iter().flat_map(|&v| [(v, false), (v, true)]).collect();
    let scores = exec.map(candidates.len(), |i| {
        let (v, s) = candidates[i];
        let coders = forced(current.coders(), v, s);
        objective(bundle, decomp, &coders)
    });
    let mut best: Option<(usize, f64)> = None;
    for (i, score) in scores.into_iter().enumerate() {
        let score = score?;
        if best.is_none_or(|(_, b)| score < b) {
            best = Some((i, score));
        }
    }
    let (i, _) = best.ok_or_else(|| Error::InvalidCodebook("no switched port left to force".into()))?;
    let (v, s) = candidates[i];
    Ok((v, s, forced(current.coders(), v, s)))
}

fn forced(coders: &[AntennaCoder], v: usize, s: bool) -> Vec<AntennaCoder> {
    coders
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.set(v, s);
            c
        })
        .collect()
}

/// Mean correlation plus one per duplicate pair.
fn objective(bundle: &AntennaBundle, decomp: &BasisDecomposition, coders: &[AntennaCoder]) -> Result<f64> {
    let units = coders
        .iter()
        .map(|c| crate::codebook::unit_pattern_coder(bundle, decomp, c))
        .collect::<Result<Vec<CVector>>>()?;
    let refs: Vec<&CVector> = units.iter().collect();
    let bits: Vec<&[bool]> = coders.iter().map(|c| c.bits()).collect();
    Ok(pair_mean(&refs, &bits) + duplicate_pairs(&bits) as f64)
}

/// Best mean correlation available with at most `s` switches, for every
/// switch count visited by a run (baseline included). A codebook that needs
/// `s` switches also works with more, so the curve is a running minimum.
pub fn correlation_vs_switches(baseline: &Codebook, run: &SwitchMinimization) -> Vec<(usize, f64, Codebook)> {
    let mut visited: Vec<&Codebook> = Vec::with_capacity(run.trace.len() + 2);
    visited.push(baseline);
    visited.extend(run.trace.iter().map(|r| &r.codebook));
    if let Some(r) = &run.rejected {
        visited.push(&r.codebook);
    }
    visited.sort_by_key(|cb| cb.partition().switch_count());
    let mut out: Vec<(usize, f64, Codebook)> = Vec::new();
    for cb in visited {
        let s = cb.partition().switch_count();
        let g = cb.mean_correlation();
        let prev = out.last().map(|o| (o.1, o.2.clone()));
        let (g, chosen) = match prev {
            Some((pg, pcb)) if pg <= g => (pg, pcb),
            _ => (g, cb.clone()),
        };
        if let Some(last) = out.last_mut() {
            if last.0 == s {
                if g < last.1 {
                    *last = (s, g, chosen);
                }
                continue;
            }
        }
        out.push((s, g, chosen));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn switch_floor() {
        assert_eq!(minimum_switches(2), 1);
        assert_eq!(minimum_switches(4), 2);
        assert_eq!(minimum_switches(5), 3);
        assert_eq!(minimum_switches(8), 3);
    }
}
