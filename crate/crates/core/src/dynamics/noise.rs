use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use super::integrate::Burst;
use super::state::State;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Identifier of the generator behind every seeded stream in this crate.
pub const RNG_ALGORITHM: &str = "chacha20";

/// Seeded generator used for all random draws.
pub fn rng_from_seed(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Independent stream for trial `index` of a run seeded with `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Additive measurement noise model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseSpec {
    #[default]
    None,
    Gaussian { variance: f64, seed: u64 },
    Uniform { half_width: f64, seed: u64 },
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpec::None => Ok(()),
            NoiseSpec::Gaussian { variance: p, .. } | NoiseSpec::Uniform { half_width: p, .. } => {
                if p >= 0.0 && p.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "noise level must be finite and nonnegative, got {p}"
                    )))
                }
            }
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(
            self,
            NoiseSpec::None
                | NoiseSpec::Gaussian { variance: 0.0, .. }
                | NoiseSpec::Uniform { half_width: 0.0, .. }
        )
    }

    /// Same distribution with a different seed.
    pub fn reseeded(&self, seed: u64) -> Self {
        match *self {
            NoiseSpec::None => NoiseSpec::None,
            NoiseSpec::Gaussian { variance, .. } => NoiseSpec::Gaussian { variance, seed },
            NoiseSpec::Uniform { half_width, .. } => NoiseSpec::Uniform { half_width, seed },
        }
    }

    /// Perturbs every value of `state` in storage order, drawing from `rng`.
    pub fn perturb<S: State<T>, T: Real>(&self, state: &mut S, rng: &mut impl Rng) -> Result<()> {
        self.validate()?;
        if self.is_none() {
            return Ok(());
        }
        match *self {
            NoiseSpec::Gaussian { variance, .. } => {
                let dist = Normal::new(0.0, variance.sqrt())
                    .map_err(|e| Error::InvalidParameter(e.to_string()))?;
                state.map_in_place(|x| x + T::lit(dist.sample(rng)));
            }
            NoiseSpec::Uniform { half_width, .. } => {
                let dist = Uniform::new_inclusive(-half_width, half_width)
                    .map_err(|e| Error::InvalidParameter(e.to_string()))?;
                state.map_in_place(|x| x + T::lit(dist.sample(rng)));
            }
            NoiseSpec::None => {}
        }
        Ok(())
    }

    fn seed(&self) -> u64 {
        match *self {
            NoiseSpec::None => 0,
            NoiseSpec::Gaussian { seed, .. } | NoiseSpec::Uniform { seed, .. } => seed,
        }
    }
}

/// Adds i.i.d. noise to every entry of every recorded snapshot. The draw order
/// is snapshot by snapshot, so equal seeds give bit-identical results.
pub fn add_noise<S: State<T>, T: Real>(burst: &Burst<S, T>, spec: &NoiseSpec) -> Result<Burst<S, T>> {
    spec.validate()?;
    let mut out = burst.clone();
    if spec.is_none() {
        return Ok(out);
    }
    let mut rng = rng_from_seed(spec.seed());
    for snap in out.snapshots.iter_mut() {
        spec.perturb(snap, &mut rng)?;
    }
    Ok(out)
}
