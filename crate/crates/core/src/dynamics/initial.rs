//! Random initial conditions for the benchmark experiments.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Uniform};

use super::state::{State1D, State2D, TwoComponentState};
use crate::error::Result;
use crate::scalar::Real;

fn uniform_sym(rng: &mut impl Rng) -> f64 {
    // inclusive range is infallible for these bounds
    Uniform::new_inclusive(-1.0, 1.0).unwrap().sample(rng)
}

/// `u(0) ~ U[-1, 1]ⁿ`.
pub fn uniform_state<T: Real>(n: usize, rng: &mut impl Rng) -> Result<State1D<T>> {
    State1D::new((0..n).map(|_| T::lit(uniform_sym(rng))).collect())
}

/// Grid with i.i.d. `U[-1, 1]` entries.
pub fn uniform_grid<T: Real>(n: usize, spacing: f64, rng: &mut impl Rng) -> Result<State2D<T>> {
    let values = (0..n * n).map(|_| T::lit(uniform_sym(rng))).collect();
    State2D::new(n, T::lit(spacing), values)
}

/// `u₀(x, y) = 50 sin(8π(x − ½)) exp(−((x − ½)² + (y − ½)²)/0.05) + ν` with
/// `x = i/n`, `y = j/n` and `ν ~ U[-1, 1]`.
pub fn burgers_initial<T: Real>(n: usize, rng: &mut impl Rng) -> Result<State2D<T>> {
    let h = 1.0 / n as f64;
    let mut values = Vec::with_capacity(n * n);
    for i in 0..n {
        let x = i as f64 * h - 0.5;
        for j in 0..n {
            let y = j as f64 * h - 0.5;
            let smooth = 50.0 * (8.0 * PI * x).sin() * (-(x * x + y * y) / 0.05).exp();
            values.push(T::lit(smooth + uniform_sym(rng)));
        }
    }
    State2D::new(n, T::lit(h), values)
}

/// Indicator of an "H" in the unit square: two vertical bars joined by a
/// crossbar through the centre.
pub fn in_h_region(x: f64, y: f64) -> bool {
    let bars = ((0.30..=0.40).contains(&y) || (0.60..=0.70).contains(&y)) && (0.25..=0.75).contains(&x);
    let cross = (0.30..=0.70).contains(&y) && (0.45..=0.55).contains(&x);
    bars || cross
}

/// `u₀ = 1 + 0.2ν`, `v₀ = 1_H + 0.02ν'`, where `ν` and `ν'` are independent
/// uniform fields (all of `ν` is drawn first). A shared draw would make `v₀`
/// an affine function of `u₀` inside and outside `H`.
pub fn grayscott_initial<T: Real>(n: usize, spacing: f64, rng: &mut impl Rng) -> Result<TwoComponentState<T>> {
    let u: Vec<T> = (0..n * n).map(|_| T::lit(1.0 + 0.2 * uniform_sym(rng))).collect();
    let mut v = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let inside = in_h_region(i as f64 / n as f64, j as f64 / n as f64);
            v.push(T::lit(if inside { 1.0 } else { 0.0 } + 0.02 * uniform_sym(rng)));
        }
    }
    TwoComponentState::new(
        State2D::new(n, T::lit(spacing), u)?,
        State2D::new(n, T::lit(spacing), v)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::noise::rng_from_seed;

    #[test]
    fn uniform_states_stay_in_range() {
        let mut rng = rng_from_seed(1);
        let s: State1D<f64> = uniform_state(500, &mut rng).unwrap();
        assert!(s.values().iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn h_region_contains_centre_and_excludes_corners() {
        assert!(in_h_region(0.5, 0.5));
        assert!(in_h_region(0.3, 0.35));
        assert!(!in_h_region(0.05, 0.05));
        assert!(!in_h_region(0.3, 0.5));
    }

    #[test]
    fn grayscott_initial_ranges() {
        let mut rng = rng_from_seed(2);
        let s: TwoComponentState<f64> = grayscott_initial(32, 1.0, &mut rng).unwrap();
        assert!(s.u.values().iter().all(|v| (0.8..=1.2).contains(v)));
        assert!(s.v.values().iter().all(|v| (-0.02..=1.02).contains(v)));
    }
}
