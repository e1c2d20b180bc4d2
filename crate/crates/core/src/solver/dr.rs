//! Douglas-Rachford splitting for `min ‖c‖₁ s.t. ‖A c − V‖₂ ≤ σ`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::prox::{project_ball_in_place, shrink, GraphProjector};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `(A, V, σ)` of the constrained ℓ1 problem.
#[derive(Debug, Clone)]
pub struct BasisPursuitProblem<T: Real> {
    pub a: DMatrix<T>,
    pub v: DVector<T>,
    pub sigma: T,
}

impl<T: Real> BasisPursuitProblem<T> {
    pub fn new(a: DMatrix<T>, v: DVector<T>, sigma: T) -> Result<Self> {
        if a.nrows() != v.len() {
            return Err(Error::Dimension(format!(
                "dictionary has {} rows but velocity has {}",
                a.nrows(),
                v.len()
            )));
        }
        if a.ncols() == 0 || a.nrows() == 0 {
            return Err(Error::Dimension("empty dictionary".into()));
        }
        if !(sigma >= T::zero()) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma must be finite and nonnegative, got {sigma}")));
        }
        Ok(Self { a, v, sigma })
    }
}

/// Iteration parameters. `gamma = None` selects `gamma_scale · ‖AᵀV‖_∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub gamma: Option<f64>,
    pub gamma_scale: f64,
    pub mu: f64,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { gamma: None, gamma_scale: 0.05, mu: 1.0, max_iters: 100_000, tol: 1e-8 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::InvalidParameter(format!("gamma must be positive, got {g}")));
            }
        }
        if !(self.gamma_scale > 0.0 && self.gamma_scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma_scale must be positive, got {}", self.gamma_scale)));
        }
        if !(self.mu > 0.0 && self.mu <= 2.0) {
            return Err(Error::InvalidParameter(format!("mu must lie in (0, 2], got {}", self.mu)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

/// Output of [`douglas_rachford`]; `c` is in the dictionary's basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution<T> {
    pub c: Vec<T>,
    pub w: Vec<T>,
    pub iterations: usize,
    pub residual: T,
    pub converged: bool,
    pub gamma: T,
}

impl<T: Real> Solution<T> {
    /// JSON record with labelled coefficients and the configuration used.
    pub fn to_json(&self, labels: &[String], config: &SolverConfig) -> serde_json::Value {
        let coefficients: serde_json::Map<String, serde_json::Value> = labels
            .iter()
            .zip(&self.c)
            .filter(|(_, c)| !c.is_zero())
            .map(|(l, c)| (l.clone(), serde_json::json!(c.as_f64())))
            .collect();
        serde_json::json!({
            "coefficients": coefficients,
            "residual": self.residual.as_f64(),
            "iterations": self.iterations,
            "converged": self.converged,
            "gamma": self.gamma.as_f64(),
            "config": config,
        })
    }
}

/// Step size used when the configuration does not fix one.
pub fn default_gamma<T: Real>(a: &DMatrix<T>, v: &DVector<T>, scale: f64) -> T {
    let g = a.tr_mul(v).amax() * T::lit(scale);
    if g > T::zero() {
        g
    } else {
        T::lit(scale)
    }
}

/// Douglas-Rachford iteration on `F₁(w, c) = ‖c‖₁ + ι_{B_σ(V)}(w)` and
/// `F₂ = ι_{w = Ac}`, started from `(w̃, c̃) = (V, 0)`. Exhausting
/// `max_iters` is reported through `converged = false`.
pub fn douglas_rachford<T: Real>(problem: &BasisPursuitProblem<T>, config: &SolverConfig) -> Result<Solution<T>> {
    config.validate()?;
    let projector = GraphProjector::new(problem.a.clone())?;
    douglas_rachford_with(&projector, problem, config)
}

/// As [`douglas_rachford`] but reusing a factored projector for `problem.a`.
pub fn douglas_rachford_with<T: Real>(
    projector: &GraphProjector<T>,
    problem: &BasisPursuitProblem<T>,
    config: &SolverConfig,
) -> Result<Solution<T>> {
    config.validate()?;
    let a = projector.matrix();
    if a.shape() != problem.a.shape() {
        return Err(Error::Dimension("projector built for a different dictionary".into()));
    }
    let v = &problem.v;
    let sigma = problem.sigma;
    let gamma = match config.gamma {
        Some(g) => T::lit(g),
        None => default_gamma(a, v, config.gamma_scale),
    };
    let mu = T::lit(config.mu);
    let half_mu = mu / T::lit(2.0);
    let keep = T::one() - half_mu;
    let tol = T::lit(config.tol);
    let two = T::lit(2.0);

    let mut wt = v.clone();
    let mut ct = DVector::zeros(a.ncols());
    let mut rw = DVector::zeros(a.nrows());
    let mut rc = DVector::zeros(a.ncols());
    let mut iterations = 0;
    let mut stalled = false;
    while iterations < config.max_iters {
        iterations += 1;
        // reflected prox of F₁
        rw.copy_from(&wt);
        project_ball_in_place(rw.as_mut_slice(), v.as_slice(), sigma);
        rw *= two;
        rw -= &wt;
        for (r, &c) in rc.iter_mut().zip(ct.iter()) {
            *r = two * shrink(c, gamma) - c;
        }
        // reflected prox of F₂, then relaxation
        let (pw, pc) = projector.apply(&rw, &rc);
        let mut step = T::zero();
        let mut scale = T::zero();
        for ((x, &p), &r) in ct.iter_mut().zip(pc.iter()).zip(rc.iter()) {
            let new = keep * *x + half_mu * (two * p - r);
            let d = new - *x;
            step += d * d;
            scale += new * new;
            *x = new;
        }
        for ((x, &p), &r) in wt.iter_mut().zip(pw.iter()).zip(rw.iter()) {
            *x = keep * *x + half_mu * (two * p - r);
        }
        if !step.is_finite() {
            return Err(Error::Numerical(format!("Douglas-Rachford iterate became non-finite at step {iterations}")));
        }
        if step.sqrt() <= tol * (T::one() + scale.sqrt()) {
            stalled = true;
            break;
        }
    }
    let mut w = wt.clone();
    project_ball_in_place(w.as_mut_slice(), v.as_slice(), sigma);
    let c: Vec<T> = ct.iter().map(|&x| shrink(x, gamma)).collect();
    let residual = (a * DVector::from_column_slice(&c) - v).norm();
    // A stalled iterate is feasible only to roughly √tol relative accuracy.
    let slack = sigma * tol.sqrt() + T::lit(1e-10) * (T::one() + v.norm());
    Ok(Solution {
        c,
        w: w.as_slice().to_vec(),
        iterations,
        residual,
        converged: stalled && residual <= sigma + slack,
        gamma,
    })
}
