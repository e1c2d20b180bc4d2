//! Reading a support set off a coefficient vector.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// How the reported support is extracted from coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum SupportRule {
    /// Indices with `|c_j| > ratio · max |c|`.
    Relative { ratio: f64 },
    /// The `s` largest magnitudes, lower index first among ties.
    Largest { s: usize },
    /// Indices whose column contribution `|c_j| · ‖A_j‖` exceeds `ratio · σ`.
    ///
    /// Unlike [`SupportRule::Relative`] this compares terms in the units of
    /// the fitted velocity, so it is insensitive to how the monomial columns
    /// happen to be scaled.
    Contribution { ratio: f64 },
}

impl Default for SupportRule {
    fn default() -> Self {
        SupportRule::Contribution { ratio: 1.0 }
    }
}

/// Column norms and noise level needed by [`SupportRule::Contribution`].
#[derive(Debug, Clone, Copy)]
pub struct SupportScale<'a, T> {
    pub column_norms: &'a [T],
    pub sigma: T,
}

/// Sorted support indices of `c` under `rule`.
///
/// `scale` is only consulted by [`SupportRule::Contribution`]; without it that
/// rule treats every column as unit norm and σ as zero.
pub fn select_support<T: Real>(c: &[T], rule: SupportRule, scale: Option<SupportScale<'_, T>>) -> Vec<usize> {
    match rule {
        SupportRule::Contribution { ratio } => {
            let weight = |j: usize| scale.map_or(T::one(), |s| s.column_norms[j]);
            let contrib: Vec<T> = (0..c.len()).map(|j| c[j].abs() * weight(j)).collect();
            let max = contrib.iter().fold(T::zero(), |m, x| m.max(*x));
            if max.is_zero() {
                return Vec::new();
            }
            let sigma = scale.map_or(T::zero(), |s| s.sigma);
            // A vanishing σ would keep round-off; floor the cut relative to the largest term.
            let cut = (T::lit(ratio) * sigma).max(max * T::lit(1e-12));
            (0..c.len()).filter(|&j| contrib[j] > cut).collect()
        }
        SupportRule::Relative { ratio } => {
            let max = c.iter().fold(T::zero(), |m, x| m.max(x.abs()));
            if max.is_zero() {
                return Vec::new();
            }
            let cut = max * T::lit(ratio);
            (0..c.len()).filter(|&j| c[j].abs() > cut).collect()
        }
        SupportRule::Largest { s } => largest(c, s),
    }
}

/// Indices of the `s` largest-magnitude entries (ties → lower index), sorted.
pub fn largest<T: Real>(c: &[T], s: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..c.len()).collect();
    idx.sort_by(|&i, &j| {
        c[j].abs()
            .partial_cmp(&c[i].abs())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    idx.truncate(s);
    idx.sort_unstable();
    idx
}
