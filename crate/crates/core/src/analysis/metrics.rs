//! Sampling-rate calculator, error metrics and support diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{dist2, norm2, Real};
use crate::solver::largest;

/// Right-hand side of the burst-count bound `144 p⁶ 9ᵖ s² log n / n` and
/// whether a single burst suffices.
pub fn sample_complexity(n: usize, p: u32, s: usize) -> Result<(f64, bool)> {
    if n < 2 || p < 1 || s < 1 {
        return Err(Error::InvalidParameter(format!("need n ≥ 2, p ≥ 1, s ≥ 1; got n = {n}, p = {p}, s = {s}")));
    }
    let pf = f64::from(p);
    let sf = s as f64;
    let nf = n as f64;
    let k = 144.0 * pf.powi(6) * 9f64.powi(p as i32) * sf * sf * nf.ln() / nf;
    Ok((k, k <= 1.0))
}

/// `‖c_exact − c‖₂ / ‖c_exact‖₂`.
pub fn coefficient_error<T: Real>(c_exact: &[T], c_learned: &[T]) -> Result<f64> {
    relative_error(c_exact, c_learned)
}

/// `‖u_exact(T) − u(T)‖₂ / ‖u_exact(T)‖₂` over flattened fields.
pub fn solution_error<T: Real>(u_exact: &[T], u_learned: &[T]) -> Result<f64> {
    relative_error(u_exact, u_learned)
}

fn relative_error<T: Real>(exact: &[T], other: &[T]) -> Result<f64> {
    if exact.len() != other.len() {
        return Err(Error::Dimension(format!("lengths differ: {} vs {}", exact.len(), other.len())));
    }
    let den = norm2(exact).as_f64();
    if !(den > 0.0) {
        return Err(Error::UndefinedMetric("reference vector is zero".into()));
    }
    Ok(dist2(exact, other).as_f64() / den)
}

/// Result of [`support_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportCheck {
    /// The `s` largest entries of the learned vector sit exactly on the true support.
    pub matches: bool,
    /// Whether `σ < c_min / (2 d s)` holds for the assumed constant `d`.
    pub prop2_condition: bool,
    /// The threshold `c_min / (2 d s)` itself.
    pub noise_threshold: f64,
}

/// Compares the `s` largest-magnitude learned coefficients with `s_true`.
pub fn support_check<T: Real>(
    c_learned: &[T],
    s_true: &[usize],
    sigma: f64,
    c_min: f64,
    d_assumed: f64,
) -> SupportCheck {
    let s = s_true.len();
    let mut truth = s_true.to_vec();
    truth.sort_unstable();
    truth.dedup();
    let matches = largest(c_learned, s) == truth;
    let noise_threshold = if s == 0 { f64::INFINITY } else { c_min / (2.0 * d_assumed * s as f64) };
    SupportCheck { matches, prop2_condition: sigma < noise_threshold, noise_threshold }
}

/// Recovery quality of one experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryMetrics {
    pub e_c: f64,
    pub e_u: Option<f64>,
    pub support_exact: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn burst_bound_formula() {
        let (k, ok) = sample_complexity(3, 1, 1).unwrap();
        assert!((k - 144.0 * 9.0 * 3f64.ln() / 3.0).abs() < 1e-9);
        assert!((k - 474.6).abs() < 0.1);
        assert!(!ok);
        let (k2, _) = sample_complexity(3, 1, 2).unwrap();
        assert!((k2 / k - 4.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert_eq!(coefficient_error(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert!((coefficient_error(&[1.0, 0.0], &[1.1, 0.0]).unwrap() - 0.1).abs() < 1e-12);
        assert!(matches!(coefficient_error(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::UndefinedMetric(_))));
        let u = [1.0, -2.0, 3.0];
        let v: Vec<f64> = u.iter().map(|x| 1.01 * x).collect();
        assert!((solution_error(&u, &v).unwrap() - 0.01).abs() < 1e-12);
    }

    #[test]
    fn support() {
        let c = [0.0, 2.0, 0.0, -1.0];
        assert!(support_check(&c, &[1, 3], 0.0, 1.0, 1.0).matches);
        assert!(!support_check(&[0.0, 2.0, 1.5, 1.0], &[1, 3], 0.0, 1.0, 1.0).matches);
        let chk = support_check(&c, &[1, 3], 0.1, 1.0, 1.0);
        assert!(chk.prop2_condition && (chk.noise_threshold - 0.25).abs() < 1e-15);
    }
}
