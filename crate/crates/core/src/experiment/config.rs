//! JSON experiment configuration with per-system defaults.

use serde::{Deserialize, Serialize};

use crate::dynamics::{GrayScottParams, NoiseSpec};
use crate::error::{Error, Result};
use crate::solver::{SolverConfig, SupportRule};

/// Benchmark system and its physical parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SystemSpec {
    Lorenz96 {
        #[serde(default = "default_n")]
        n: usize,
        #[serde(default = "default_forcing")]
        forcing: f64,
    },
    Burgers2d {
        #[serde(default = "default_n")]
        n: usize,
        #[serde(default = "default_alpha")]
        alpha: f64,
    },
    Grayscott {
        #[serde(default = "default_n")]
        n: usize,
        /// Grid spacing `h` of the nine-point Laplacian (grid units by default).
        #[serde(default = "default_spacing")]
        spacing: f64,
        #[serde(default = "default_r_u")]
        r_u: f64,
        #[serde(default = "default_r_v")]
        r_v: f64,
        #[serde(default = "default_f")]
        f: f64,
        #[serde(default = "default_k")]
        k: f64,
    },
}

fn default_n() -> usize {
    128
}
fn default_forcing() -> f64 {
    8.0
}
fn default_alpha() -> f64 {
    1e-2
}
fn default_spacing() -> f64 {
    1.0
}
fn default_r_u() -> f64 {
    0.3
}
fn default_r_v() -> f64 {
    0.15
}
fn default_f() -> f64 {
    0.055
}
fn default_k() -> f64 {
    0.063
}

impl SystemSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SystemSpec::Lorenz96 { .. } => "lorenz96",
            SystemSpec::Burgers2d { .. } => "burgers2d",
            SystemSpec::Grayscott { .. } => "grayscott",
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            SystemSpec::Lorenz96 { n, .. } | SystemSpec::Burgers2d { n, .. } | SystemSpec::Grayscott { n, .. } => n,
        }
    }

    pub fn components(&self) -> usize {
        match self {
            SystemSpec::Grayscott { .. } => 2,
            _ => 1,
        }
    }

    pub fn grayscott_params(&self) -> Option<GrayScottParams> {
        match *self {
            SystemSpec::Grayscott { r_u, r_v, f, k, .. } => Some(GrayScottParams { r_u, r_v, f, k }),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SystemSpec::Lorenz96 { n, forcing } => {
                if n < 4 {
                    return Err(Error::Config(format!("Lorenz 96 needs n ≥ 4, got {n}")));
                }
                if !forcing.is_finite() {
                    return Err(Error::Config("forcing must be finite".into()));
                }
            }
            SystemSpec::Burgers2d { n, alpha } => {
                if n < 3 {
                    return Err(Error::Config(format!("grid side must be at least 3, got {n}")));
                }
                if !(alpha > 0.0) {
                    return Err(Error::Config(format!("viscosity must be positive, got {alpha}")));
                }
            }
            SystemSpec::Grayscott { n, spacing, .. } => {
                if n < 3 {
                    return Err(Error::Config(format!("grid side must be at least 3, got {n}")));
                }
                if !(spacing > 0.0) {
                    return Err(Error::Config(format!("grid spacing must be positive, got {spacing}")));
                }
                self.grayscott_params().unwrap().validate()?;
            }
        }
        Ok(())
    }
}

/// Which recorded data the measurement noise corrupts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseTarget {
    /// Only the snapshots feeding the data matrix; velocities use clean data.
    #[default]
    DataMatrix,
    /// Every recorded snapshot, so velocities see the noise too.
    Snapshots,
}

/// Exact-versus-learned simulation used for the solution error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonSpec {
    pub horizon: f64,
    pub dt: f64,
}

/// One experiment. Omitted fields take the defaults of the chosen system
/// (see [`ExperimentConfig::resolve`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bursts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_fine: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_target: Option<NoiseTarget>,
    /// Block side (points per axis).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<usize>,
    /// First index (1D) or `[row, col]` of the block; see [`default_block_origin`]
    /// for what an omitted value means.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_origin: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    /// Constraint radius per component; a single value applies to all.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<SupportRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub debias: Option<bool>,
    /// Also fit the dense least-squares baseline.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonSpec>,
    #[serde(default)]
    pub seed: u64,
}

/// Configuration with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub system: SystemSpec,
    pub bursts: usize,
    pub dt_fine: f64,
    pub record_times: Vec<f64>,
    pub noise: NoiseSpec,
    pub noise_target: NoiseTarget,
    pub block: usize,
    pub block_origin: Option<Vec<usize>>,
    pub radius: usize,
    pub degree: u32,
    pub sigma: Vec<f64>,
    pub solver: SolverConfig,
    pub support: SupportRule,
    pub debias: bool,
    pub baseline: bool,
    pub comparison: Option<ComparisonSpec>,
    pub seed: u64,
}

/// Constraint radius used when none is configured, calibrated per system,
/// noise level and data layout.
pub fn default_sigma(system: &SystemSpec, noise: &NoiseSpec, bursts: usize, block: usize) -> Vec<f64> {
    match *system {
        SystemSpec::Lorenz96 { .. } => {
            let var = match *noise {
                NoiseSpec::Gaussian { variance, .. } => variance,
                _ => 0.0,
            };
            // rows: noise levels 0.2 %, 0.1 %, 0.05 %; columns: the three
            // block/burst layouts
            let table = [[0.3515, 0.53575, 0.4075], [0.3607, 0.5074, 0.7143], [0.3380, 0.5002, 0.6888]];
            let row = if var >= 0.0015 {
                0
            } else if var >= 0.00075 {
                1
            } else {
                2
            };
            let col = if block >= 45 {
                2
            } else if bursts >= 4 {
                1
            } else {
                0
            };
            vec![table[row][col]]
        }
        SystemSpec::Burgers2d { .. } => vec![26.3609],
        SystemSpec::Grayscott { f, .. } => {
            if f > 0.04 {
                vec![5.5707e-5, 5.2655e-5]
            } else if f > 0.022 {
                vec![6.3055e-5, 6.0194e-5]
            } else {
                vec![6.3321e-5, 6.0579e-5]
            }
        }
    }
}

/// Where the block sits when the config does not say.
///
/// Lorenz 96 uses the centre. The Burgers block goes to the corner, away from
/// the Gaussian bump, because near the bump the forward-difference velocity
/// error alone is two orders of magnitude above the default σ. The Gray-Scott
/// block straddles the lower edge of the H region so that `v` takes both of
/// its levels; a block wholly inside or outside H leaves `v` nearly constant.
pub fn default_block_origin(system: &SystemSpec) -> Option<Vec<usize>> {
    match *system {
        SystemSpec::Lorenz96 { .. } => None,
        SystemSpec::Burgers2d { .. } => Some(vec![0, 0]),
        SystemSpec::Grayscott { n, .. } => Some(vec![56 * n / 128, 52 * n / 128]),
    }
}

impl ExperimentConfig {
    pub fn new(system: SystemSpec) -> Self {
        Self {
            system,
            bursts: None,
            dt_fine: None,
            record_times: None,
            noise: None,
            noise_target: None,
            block: None,
            block_origin: None,
            radius: None,
            degree: None,
            sigma: None,
            solver: None,
            support: None,
            debias: None,
            baseline: None,
            comparison: None,
            seed: 0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    /// Fills unset fields with the defaults of the configured system.
    pub fn resolve(&self) -> Result<Resolved> {
        self.system.validate()?;
        let (bursts, dt_fine, t1, block, radius, degree, noise) = match self.system {
            SystemSpec::Lorenz96 { .. } => {
                (2, 5e-5, 1e-2, 25, 10, 3, NoiseSpec::Gaussian { variance: 0.002, seed: self.seed })
            }
            SystemSpec::Burgers2d { .. } => (4, 5e-8, 1e-5, 7, 2, 2, NoiseSpec::None),
            SystemSpec::Grayscott { .. } => (3, 1e-6, 1e-5, 7, 1, 3, NoiseSpec::None),
        };
        let bursts = self.bursts.unwrap_or(bursts);
        let block = self.block.unwrap_or(block);
        let noise = self.noise.unwrap_or(noise);
        let sigma = match &self.sigma {
            Some(s) => s.clone(),
            None => default_sigma(&self.system, &noise, bursts, block),
        };
        let r = Resolved {
            system: self.system,
            bursts,
            dt_fine: self.dt_fine.unwrap_or(dt_fine),
            record_times: self.record_times.clone().unwrap_or_else(|| vec![0.0, t1]),
            noise,
            noise_target: self.noise_target.unwrap_or_default(),
            block,
            block_origin: self.block_origin.clone().or_else(|| default_block_origin(&self.system)),
            radius: self.radius.unwrap_or(radius),
            degree: self.degree.unwrap_or(degree),
            sigma,
            solver: self.solver.unwrap_or_default(),
            support: self.support.unwrap_or_default(),
            debias: self.debias.unwrap_or(true),
            baseline: self.baseline.unwrap_or(false),
            comparison: self.comparison,
            seed: self.seed,
        };
        r.validate()?;
        Ok(r)
    }
}

impl Resolved {
    fn validate(&self) -> Result<()> {
        if self.bursts == 0 {
            return Err(Error::Config("at least one burst is required".into()));
        }
        if !(1..=3).contains(&self.degree) {
            return Err(Error::Config(format!("degree must be 1, 2 or 3, got {}", self.degree)));
        }
        if !(self.dt_fine > 0.0) {
            return Err(Error::Config(format!("dt_fine must be positive, got {}", self.dt_fine)));
        }
        if self.record_times.len() < 2 {
            return Err(Error::Config("at least two record times are required".into()));
        }
        if self.block == 0 || self.block > self.system.n() {
            return Err(Error::Config(format!("block size {} does not fit n = {}", self.block, self.system.n())));
        }
        let comps = self.system.components();
        if self.sigma.len() != 1 && self.sigma.len() != comps {
            return Err(Error::Config(format!("expected 1 or {comps} sigma values, got {}", self.sigma.len())));
        }
        if self.sigma.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
            return Err(Error::Config("sigma must be finite and nonnegative".into()));
        }
        if let Some(o) = &self.block_origin {
            let want = if matches!(self.system, SystemSpec::Lorenz96 { .. }) { 1 } else { 2 };
            if o.len() != want {
                return Err(Error::Config(format!("block_origin needs {want} entries, got {}", o.len())));
            }
        }
        if let Some(c) = self.comparison {
            if !(c.dt > 0.0 && c.horizon >= 0.0) {
                return Err(Error::Config("comparison needs dt > 0 and horizon ≥ 0".into()));
            }
        }
        self.noise.validate()?;
        self.solver.validate()?;
        Ok(())
    }

    pub fn sigma_for(&self, component: usize) -> f64 {
        if self.sigma.len() == 1 {
            self.sigma[0]
        } else {
            self.sigma[component]
        }
    }
}
