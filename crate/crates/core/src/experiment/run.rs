//! The end-to-end learning pipeline for one configuration.

use nalgebra::DVector;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, NoiseTarget, Resolved, SystemSpec};
use super::systems::{exact_coefficients, with_benchmark, Benchmark, BenchmarkVisitor};
use crate::analysis::{coefficient_error, solution_error, support_check, RecoveryMetrics, SupportCheck};
use crate::dictionary::{
    fit_scaling_all, legendre_dictionary, legendre_to_monomial, monomial_dictionary, normalize_columns, stack_bursts,
    Basis, Block, CoefficientVector, CyclicDataMatrix, DictionaryMatrix, Domain, LocalVar, MultiIndex, Offset,
    PolynomialModel, ScalingTransform,
};
use crate::dynamics::{add_noise, approximate_velocity, integrate, substream, Burst, GrayScottParams, RNG_ALGORITHM};
use crate::error::Result;
use crate::solver::{
    debias_refit, douglas_rachford_with, least_squares_baseline, select_support, BasisPursuitProblem, GraphProjector,
    SupportScale,
};

/// One labelled coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub term: String,
    pub value: f64,
}

/// Learned equation and diagnostics for one state component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentResult {
    pub component: String,
    pub sigma: f64,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
    pub gamma: f64,
    /// Nonzero learned monomial coefficients in dictionary order.
    pub coefficients: Vec<Term>,
    pub support: Vec<String>,
    pub exact_support: Vec<String>,
    pub metrics: RecoveryMetrics,
    /// Coefficient error before debiasing.
    pub e_c_lbp: f64,
    /// Coefficient error of the dense least-squares fit, when requested.
    pub e_c_ls: Option<f64>,
    pub support_check: SupportCheck,
    /// Why the solution error is missing, if the comparison failed.
    pub e_u_failure: Option<String>,
    /// Full learned coefficient vector over the dictionary columns.
    #[serde(skip)]
    pub learned: Vec<f64>,
    #[serde(skip)]
    pub exact: Vec<f64>,
}

/// Everything an experiment produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub system: String,
    pub rng: String,
    pub config: ExperimentConfig,
    pub record_times: Vec<f64>,
    pub dictionary_rows: usize,
    pub dictionary_cols: usize,
    pub scaling: ScalingTransform<f64>,
    pub components: Vec<ComponentResult>,
    /// Rates recovered from the learned stencils (Gray-Scott only).
    pub learned_parameters: Option<GrayScottParams>,
    #[serde(skip)]
    pub columns: Vec<MultiIndex>,
    #[serde(skip)]
    pub variables: Vec<LocalVar>,
}

impl ExperimentResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    /// Learned equations as evaluable models, one per component.
    pub fn learned_models(&self) -> Result<Vec<PolynomialModel<f64>>> {
        self.components
            .iter()
            .map(|c| {
                PolynomialModel::from_coefficients(
                    &self.columns,
                    &self.variables,
                    &CoefficientVector::new(c.learned.clone(), Basis::Monomial),
                )
            })
            .collect()
    }
}

/// Assembled regression problem shared by all components.
pub(crate) struct Assembled<S> {
    pub legendre: DictionaryMatrix<f64>,
    pub monomial: DictionaryMatrix<f64>,
    pub velocities: Vec<Vec<f64>>,
    pub first_state: S,
}

pub(crate) fn block_for(cfg: &Resolved, domain: Domain) -> Block {
    match (&cfg.block_origin, domain) {
        (Some(o), Domain::Line(_)) => Block::Interval { start: o[0], len: cfg.block },
        (Some(o), Domain::Grid(_)) => Block::Square { row: o[0], col: o[1], size: cfg.block },
        (None, d) => Block::centered(d, cfg.block),
    }
}

pub(crate) fn simulate_bursts<B: Benchmark>(b: &B, cfg: &Resolved) -> Result<Vec<Burst<B::S, f64>>> {
    (0..cfg.bursts)
        .map(|k| {
            let mut rng = substream(cfg.seed, k as u64);
            let s0 = b.initial(&mut rng)?;
            let mut burst = integrate(|s| b.rhs(s), s0, cfg.dt_fine, &cfg.record_times)?;
            burst.burst_id = k;
            Ok(burst)
        })
        .collect()
}

/// Steps 1–6: data, noise, velocities, scaling, Legendre dictionary,
/// normalization (plus the matching monomial dictionary).
pub(crate) fn assemble<B: Benchmark>(b: &B, cfg: &Resolved) -> Result<Assembled<B::S>> {
    let clean = simulate_bursts(b, cfg).map_err(|e| e.at("simulate"))?;
    let block = block_for(cfg, b.domain());
    let mut data: Vec<CyclicDataMatrix<f64>> = Vec::new();
    let mut velocities: Vec<Vec<f64>> = vec![Vec::new(); b.components()];
    for burst in &clean {
        let noisy = if cfg.noise.is_none() {
            burst.clone()
        } else {
            let seed = substream(noise_seed(cfg), burst.burst_id as u64).next_u64();
            add_noise(burst, &cfg.noise.reseeded(seed)).map_err(|e| e.at("noise"))?
        };
        let vel_source = match cfg.noise_target {
            NoiseTarget::DataMatrix => burst,
            NoiseTarget::Snapshots => &noisy,
        };
        let vel = approximate_velocity(vel_source).map_err(|e| e.at("velocity"))?;
        for (i, v) in vel.iter().enumerate() {
            let d = b
                .local_data(&noisy.snapshots[i], cfg.radius, &block)
                .map_err(|e| e.at("data"))?
                .with_source(burst.burst_id, noisy.times[i]);
            for (c, out) in velocities.iter_mut().enumerate() {
                out.extend(d.centers.iter().map(|&s| b.value(v, c, s)));
            }
            data.push(d);
        }
    }
    let scaling = fit_scaling_all(&data).map_err(|e| e.at("scaling"))?;
    let mut leg_parts = Vec::with_capacity(data.len());
    let mut mono_parts = Vec::with_capacity(data.len());
    for d in &data {
        let rows = vec![0.0; d.nrows()];
        leg_parts.push((legendre_dictionary(d, cfg.degree, scaling).map_err(|e| e.at("dictionary"))?, rows.clone()));
        mono_parts.push((monomial_dictionary(d, cfg.degree).map_err(|e| e.at("dictionary"))?, rows));
    }
    let (legendre, _) = stack_bursts(leg_parts).map_err(|e| e.at("dictionary"))?;
    let (monomial, _) = stack_bursts(mono_parts).map_err(|e| e.at("dictionary"))?;
    let legendre = normalize_columns(&legendre).map_err(|e| e.at("normalize"))?;
    Ok(Assembled { legendre, monomial, velocities, first_state: clean[0].snapshots[0].clone() })
}

fn noise_seed(cfg: &Resolved) -> u64 {
    match cfg.noise {
        crate::dynamics::NoiseSpec::Gaussian { seed, .. } | crate::dynamics::NoiseSpec::Uniform { seed, .. } => seed,
        crate::dynamics::NoiseSpec::None => 0,
    }
}

/// Runs the learning algorithm and evaluates it against the exact system.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let cfg = config.resolve()?;
    with_benchmark(&cfg.system, Runner { config, cfg: &cfg })
}

struct Runner<'a> {
    config: &'a ExperimentConfig,
    cfg: &'a Resolved,
}

impl BenchmarkVisitor for Runner<'_> {
    type Output = Result<ExperimentResult>;

    fn visit<B: Benchmark + Sync>(self, b: &B) -> Result<ExperimentResult> {
        let cfg = self.cfg;
        let asm = assemble(b, cfg)?;
        let a_l = &asm.legendre;
        let labels = asm.monomial.labels();
        let projector = GraphProjector::new(a_l.entries.clone()).map_err(|e| e.at("solve"))?;
        let mono_norms: Vec<f64> = asm.monomial.entries.column_iter().map(|col| col.norm()).collect();
        let mut components = Vec::with_capacity(b.components());
        for c in 0..b.components() {
            let sigma = cfg.sigma_for(c);
            let v = &asm.velocities[c];
            let problem = BasisPursuitProblem::new(a_l.entries.clone(), DVector::from_column_slice(v), sigma)
                .map_err(|e| e.at("solve"))?;
            let sol = douglas_rachford_with(&projector, &problem, &cfg.solver).map_err(|e| e.at("solve"))?;
            let c_l = CoefficientVector::new(sol.c.clone(), Basis::Legendre);
            let c_m = legendre_to_monomial(&c_l, a_l).map_err(|e| e.at("basis_map"))?;
            let exact = exact_coefficients(&asm.monomial.columns, &asm.monomial.variables, &b.exact_terms(c))
                .map_err(|e| e.at("metrics"))?;
            let e_c_lbp = coefficient_error(&exact, &c_m.values).map_err(|e| e.at("metrics"))?;
            let scale = Some(SupportScale { column_norms: &mono_norms, sigma });
            let (learned, support) = if cfg.debias {
                debias_refit(&asm.monomial.entries, v, &c_m.values, cfg.support, scale, Some(&labels))
                    .map_err(|e| e.at("debias"))?
            } else {
                let s = select_support(&c_m.values, cfg.support, scale);
                (c_m.values.clone(), s)
            };
            let exact_support: Vec<usize> = (0..exact.len()).filter(|&j| exact[j] != 0.0).collect();
            let e_c = coefficient_error(&exact, &learned).map_err(|e| e.at("metrics"))?;
            let c_min = exact_support.iter().map(|&j| exact[j].abs()).fold(f64::INFINITY, f64::min);
            let check = support_check(&learned, &exact_support, sigma, c_min, 1.0);
            let e_c_ls = if cfg.baseline {
                let ls = least_squares_baseline(&asm.monomial.entries, v).map_err(|e| e.at("baseline"))?;
                Some(coefficient_error(&exact, &ls).map_err(|e| e.at("baseline"))?)
            } else {
                None
            };
            components.push(ComponentResult {
                component: crate::dictionary::COMPONENT_NAMES[c].to_string(),
                sigma,
                iterations: sol.iterations,
                converged: sol.converged,
                residual: sol.residual,
                gamma: sol.gamma,
                coefficients: learned
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| **x != 0.0)
                    .map(|(j, &x)| Term { term: labels[j].clone(), value: x })
                    .collect(),
                support: support.iter().map(|&j| labels[j].clone()).collect(),
                exact_support: exact_support.iter().map(|&j| labels[j].clone()).collect(),
                metrics: RecoveryMetrics { e_c, e_u: None, support_exact: support == exact_support },
                e_c_lbp,
                e_c_ls,
                support_check: check,
                e_u_failure: None,
                learned,
                exact,
            });
        }
        let mut result = ExperimentResult {
            system: cfg.system.name().to_string(),
            rng: RNG_ALGORITHM.to_string(),
            config: self.config.clone(),
            record_times: cfg.record_times.clone(),
            dictionary_rows: a_l.nrows(),
            dictionary_cols: a_l.ncols(),
            scaling: a_l.scaling.expect("Legendre dictionaries carry their scaling"),
            components,
            learned_parameters: None,
            columns: asm.monomial.columns.clone(),
            variables: asm.monomial.variables.clone(),
        };
        if let SystemSpec::Grayscott { spacing, .. } = cfg.system {
            result.learned_parameters = Some(aggregate_grayscott(
                &result.columns,
                &result.variables,
                &result.components[0].learned,
                &result.components[1].learned,
                spacing,
            ));
        }
        if let Some(cmp) = cfg.comparison {
            let models = result.learned_models()?;
            match compare(b, &asm.first_state, &models, cmp.horizon, cmp.dt) {
                Ok(errors) => {
                    for (comp, e) in result.components.iter_mut().zip(errors) {
                        comp.metrics.e_u = Some(e);
                    }
                }
                Err(e) => {
                    for comp in result.components.iter_mut() {
                        comp.e_u_failure = Some(e.to_string());
                    }
                }
            }
        }
        Ok(result)
    }
}

/// Right-hand side of the learned system built from compiled models.
pub(crate) fn learned_rhs<'a, B: Benchmark>(
    b: &'a B,
    models: &[PolynomialModel<f64>],
) -> Result<impl Fn(&B::S) -> Result<B::S> + 'a> {
    let compiled = models.iter().map(|m| b.compile(m)).collect::<Result<Vec<_>>>()?;
    Ok(move |s: &B::S| {
        let fields: Vec<Vec<f64>> = (0..b.components()).map(|c| b.component(s, c)).collect();
        let refs: Vec<&[f64]> = fields.iter().map(|f| f.as_slice()).collect();
        let out = compiled.iter().map(|m| m.apply(&refs)).collect::<Result<Vec<_>>>()?;
        Ok(b.assemble(s, out))
    })
}

/// Relative error per component between exact and learned evolutions from
/// `start` over `horizon`.
pub(crate) fn compare<B: Benchmark>(
    b: &B,
    start: &B::S,
    models: &[PolynomialModel<f64>],
    horizon: f64,
    dt: f64,
) -> Result<Vec<f64>> {
    let times = comparison_times(horizon, dt);
    let exact = integrate(|s| b.rhs(s), start.clone(), dt, &times).map_err(|e| e.at("compare_exact"))?;
    let rhs = learned_rhs(b, models)?;
    let learned = integrate(rhs, start.clone(), dt, &times).map_err(|e| e.at("compare_learned"))?;
    let (ue, ul) = (exact.snapshots.last().unwrap(), learned.snapshots.last().unwrap());
    (0..b.components())
        .map(|c| solution_error(&b.component(ue, c), &b.component(ul, c)).map_err(|e| e.at("compare")))
        .collect()
}

/// `[0, T]` snapped to a whole number of steps (just `[0]` when `T` rounds to 0).
pub(crate) fn comparison_times(horizon: f64, dt: f64) -> Vec<f64> {
    let steps = (horizon / dt).round();
    if steps < 1.0 {
        vec![0.0]
    } else {
        vec![0.0, steps * dt]
    }
}

/// Recovers `(r_u, r_v, f, k)` from learned Gray-Scott stencils: the nine
/// Laplacian weights sum to zero, so the linear `v` coefficients sum to
/// `−(f + k)`, the off-centre weights sum to `r·(10/3)/h²`, and the `u`
/// equation's constant is `f`.
pub fn aggregate_grayscott(
    columns: &[MultiIndex],
    variables: &[LocalVar],
    c_u: &[f64],
    c_v: &[f64],
    h: f64,
) -> GrayScottParams {
    let linear = |coeffs: &[f64], comp: usize| {
        let (mut all, mut off) = (0.0, 0.0);
        for (j, mi) in columns.iter().enumerate() {
            if let [(var, 1)] = mi.factors() {
                let v = variables[*var];
                if v.component == comp {
                    all += coeffs[j];
                    if v.offset != Offset::Grid(0, 0) {
                        off += coeffs[j];
                    }
                }
            }
        }
        (all, off)
    };
    let constant = columns.iter().position(MultiIndex::is_constant).map_or(0.0, |j| c_u[j]);
    let (_, off_u) = linear(c_u, 0);
    let (all_v, off_v) = linear(c_v, 1);
    let scale = h * h * 3.0 / 10.0;
    GrayScottParams { r_u: off_u * scale, r_v: off_v * scale, f: constant, k: -all_v - constant }
}

