//! Monte Carlo check of the coherence bound for cyclic Legendre matrices.

use std::collections::HashSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dictionary::{cyclic_data_1d, legendre_dictionary_with_cap, MultiIndex, ScalingTransform};
use crate::dynamics::{substream, uniform_state, State1D};
use crate::error::{Error, Result};

/// Extremes of one or more coherence trials against the bound
/// `12 p³ 3ᵖ √(n log n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub n: usize,
    pub p: u32,
    /// Largest `|⟨A_j, A_k⟩|` over distinct columns.
    pub max_offdiag_inner: f64,
    /// Largest `|‖A_j‖² − n|`.
    pub max_norm_deviation: f64,
    pub bound: f64,
    pub trials: usize,
    pub violations: usize,
    /// Mean and standard error of `‖A_j‖²` over all columns and trials.
    pub mean_norm_sq: f64,
    pub norm_sq_std_err: f64,
}

pub fn coherence_bound(n: usize, p: u32) -> f64 {
    let nf = n as f64;
    12.0 * f64::from(p).powi(3) * 3f64.powi(p as i32) * (nf * nf.ln()).sqrt()
}

/// Probability, under uniform sampling, that the bound is allowed to fail.
pub fn coherence_failure_probability(n: usize, p: u32) -> f64 {
    let pf = f64::from(p);
    let e = std::f64::consts::E;
    (e / pf + e / (2.0 * pf * pf)).powf(2.0 * pf) * (n as f64).powf(-2.0 * pf / 11.0)
}

fn check_hypothesis(n: usize, p: u32) -> Result<()> {
    if p == 0 || 2 * (p as usize).pow(2) > n {
        return Err(Error::Hypothesis(format!("coherence bound needs 2p² ≤ n, got n = {n}, p = {p}")));
    }
    Ok(())
}

/// Index of the cyclic shift that moves every variable by `s`.
fn shift_index(mi: &MultiIndex, s: usize, n: usize) -> MultiIndex {
    MultiIndex::from_pairs(mi.factors().iter().map(|&(v, e)| ((v + s) % n, e)))
}

/// One representative column per orbit of the cyclic shift action.
fn orbit_representatives(columns: &[MultiIndex], n: usize) -> Vec<usize> {
    let mut seen: HashSet<MultiIndex> = HashSet::new();
    let mut reps = Vec::new();
    for (j, mi) in columns.iter().enumerate() {
        if seen.contains(mi) {
            continue;
        }
        reps.push(j);
        for s in 0..n {
            seen.insert(shift_index(mi, s, n));
        }
    }
    reps
}

struct TrialStats {
    offdiag: f64,
    deviation: f64,
    norm_sum: f64,
    norm_sq_sum: f64,
    count: usize,
}

/// Since the row set of the full cyclic matrix is closed under shifts, the
/// Gram matrix is shift invariant; products of orbit representatives with
/// every column therefore cover all distinct pairs.
fn trial_stats(u: &State1D<f64>, p: u32) -> Result<TrialStats> {
    let n = u.len();
    let data = cyclic_data_1d(u);
    let a = legendre_dictionary_with_cap(&data, p, ScalingTransform::identity(), u128::MAX)?;
    let reps = orbit_representatives(&a.columns, n);
    let canon: DMatrix<f64> = a.entries.select_columns(&reps);
    let gram = a.entries.tr_mul(&canon);
    let mut offdiag = 0f64;
    let mut deviation = 0f64;
    let (mut norm_sum, mut norm_sq_sum) = (0.0, 0.0);
    for (k, &j) in reps.iter().enumerate() {
        for (i, &g) in gram.column(k).iter().enumerate() {
            if i == j {
                deviation = deviation.max((g - n as f64).abs());
            } else {
                offdiag = offdiag.max(g.abs());
            }
        }
    }
    for col in a.entries.column_iter() {
        let s = col.norm_squared();
        norm_sum += s;
        norm_sq_sum += s * s;
    }
    Ok(TrialStats { offdiag, deviation, norm_sum, norm_sq_sum, count: a.ncols() })
}

/// Draws `u ~ U[−1, 1]ⁿ`, builds the unnormalized cyclic Legendre matrix of
/// order `p`, and compares its coherence to the bound.
pub fn coherence_trial(n: usize, p: u32, seed: u64) -> Result<CoherenceReport> {
    coherence_study(n, p, seed, 1)
}

/// `trials` independent draws, trial `t` using substream `t` of `seed`.
pub fn coherence_study(n: usize, p: u32, seed: u64, trials: usize) -> Result<CoherenceReport> {
    check_hypothesis(n, p)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    let bound = coherence_bound(n, p);
    let mut report = CoherenceReport {
        n,
        p,
        max_offdiag_inner: 0.0,
        max_norm_deviation: 0.0,
        bound,
        trials,
        violations: 0,
        mean_norm_sq: 0.0,
        norm_sq_std_err: 0.0,
    };
    let (mut sum, mut sum_sq, mut count) = (0.0, 0.0, 0usize);
    for t in 0..trials {
        let u = trial_state(n, seed, t)?;
        let stats = trial_stats(&u, p)?;
        report.max_offdiag_inner = report.max_offdiag_inner.max(stats.offdiag);
        report.max_norm_deviation = report.max_norm_deviation.max(stats.deviation);
        if stats.offdiag > bound || stats.deviation > bound {
            report.violations += 1;
        }
        sum += stats.norm_sum;
        sum_sq += stats.norm_sq_sum;
        count += stats.count;
    }
    let mean = sum / count as f64;
    let var = (sum_sq / count as f64 - mean * mean).max(0.0);
    report.mean_norm_sq = mean;
    // columns within a trial are correlated; count trials, not columns
    report.norm_sq_std_err = (var / trials as f64).sqrt();
    Ok(report)
}

/// Draws a state uniform on `[−1, 1]ⁿ`; exposed for tests reproducing trials.
pub fn trial_state(n: usize, seed: u64, trial: usize) -> Result<State1D<f64>> {
    uniform_state(n, &mut substream(seed, trial as u64))
}
