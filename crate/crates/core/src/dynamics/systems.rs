//! Right-hand sides of the benchmark systems. All use periodic index wrap.

use serde::{Deserialize, Serialize};

use super::state::{State1D, State2D, TwoComponentState};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Lorenz 96: `u̇_j = −u_{j−2} u_{j−1} + u_{j−1} u_{j+1} − u_j + F`.
pub fn lorenz96_rhs<T: Real>(u: &State1D<T>, forcing: T) -> Result<State1D<T>> {
    let n = u.len();
    if n < 4 {
        return Err(Error::Dimension(format!(
            "Lorenz 96 needs at least 4 components, got {n}"
        )));
    }
    let x = u.values();
    let out = (0..n)
        .map(|j| {
            let m2 = x[(j + n - 2) % n];
            let m1 = x[(j + n - 1) % n];
            let p1 = x[(j + 1) % n];
            -m2 * m1 + m1 * p1 - x[j] + forcing
        })
        .collect();
    Ok(State1D::from_raw(out))
}

/// Semi-discrete 2D viscous Burgers variant
/// `u_t = αΔu + u u_x + u u_y` with centered squared differences.
pub fn burgers2d_rhs<T: Real>(u: &State2D<T>, alpha: T) -> Result<State2D<T>> {
    if !(alpha > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "viscosity must be positive, got {alpha}"
        )));
    }
    let n = u.side();
    let h = u.spacing();
    let diff = alpha / (h * h);
    let adv = T::one() / (T::lit(4.0) * h);
    let x = u.values();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let ip = (i + 1) % n;
        let im = (i + n - 1) % n;
        for j in 0..n {
            let jp = (j + 1) % n;
            let jm = (j + n - 1) % n;
            let c = x[i * n + j];
            let e = x[ip * n + j];
            let w = x[im * n + j];
            let no = x[i * n + jp];
            let so = x[i * n + jm];
            let lap = e + w + no + so - T::lit(4.0) * c;
            out.push(diff * lap + adv * (e * e - w * w) + adv * (no * no - so * so));
        }
    }
    Ok(u.with_values(out))
}

/// Nine-point discrete Laplacian with the four distinct diagonal neighbours:
/// `(2/(3h²))(E+W+N+S−5C) + (1/(6h²))(NE+NW+SE+SW)`.
pub fn laplacian9<T: Real>(u: &State2D<T>) -> State2D<T> {
    let n = u.side();
    let h2 = u.spacing() * u.spacing();
    let edge = T::lit(2.0) / (T::lit(3.0) * h2);
    let corner = T::one() / (T::lit(6.0) * h2);
    let x = u.values();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let ip = (i + 1) % n;
        let im = (i + n - 1) % n;
        for j in 0..n {
            let jp = (j + 1) % n;
            let jm = (j + n - 1) % n;
            let c = x[i * n + j];
            let edges = x[ip * n + j] + x[im * n + j] + x[i * n + jp] + x[i * n + jm];
            let corners = x[ip * n + jp] + x[im * n + jp] + x[ip * n + jm] + x[im * n + jm];
            out.push(edge * (edges - T::lit(5.0) * c) + corner * corners);
        }
    }
    u.with_values(out)
}

/// Gray-Scott reaction and diffusion rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrayScottParams {
    pub r_u: f64,
    pub r_v: f64,
    pub f: f64,
    pub k: f64,
}

impl GrayScottParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_u > 0.0 && self.r_v > 0.0) {
            return Err(Error::InvalidParameter(
                "diffusion rates must be positive".into(),
            ));
        }
        if !(self.f >= 0.0 && self.k >= 0.0) {
            return Err(Error::InvalidParameter(
                "feed and kill rates must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Semi-discrete Gray-Scott system on the nine-point Laplacian:
/// `u̇ = r_u Δu − uv² + f(1−u)`, `v̇ = r_v Δv + uv² − (f+k)v`.
pub fn grayscott_rhs<T: Real>(
    state: &TwoComponentState<T>,
    params: &GrayScottParams,
) -> Result<TwoComponentState<T>> {
    params.validate()?;
    if !state.u.same_shape_as(&state.v) {
        return Err(Error::Dimension("u and v grids differ".into()));
    }
    let (r_u, r_v) = (T::lit(params.r_u), T::lit(params.r_v));
    let (f, k) = (T::lit(params.f), T::lit(params.k));
    let lu = laplacian9(&state.u);
    let lv = laplacian9(&state.v);
    let (u, v) = (state.u.values(), state.v.values());
    let mut du = Vec::with_capacity(u.len());
    let mut dv = Vec::with_capacity(u.len());
    for idx in 0..u.len() {
        let uvv = u[idx] * v[idx] * v[idx];
        du.push(r_u * lu.values()[idx] - uvv + f * (T::one() - u[idx]));
        dv.push(r_v * lv.values()[idx] + uvv - (f + k) * v[idx]);
    }
    Ok(TwoComponentState {
        u: state.u.with_values(du),
        v: state.v.with_values(dv),
    })
}

impl<T: Real> State2D<T> {
    pub(crate) fn same_shape_as(&self, other: &Self) -> bool {
        self.side() == other.side() && self.spacing() == other.spacing()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, h: f64, f: impl Fn(usize, usize) -> f64) -> State2D<f64> {
        State2D::from_fn(n, h, f).unwrap()
    }

    #[test]
    fn lorenz_fixed_point_and_zero_state() {
        let u = State1D::constant(8, 8.0).unwrap();
        let r = lorenz96_rhs(&u, 8.0).unwrap();
        assert!(r.values().iter().all(|&v| v == 0.0));

        let z = State1D::constant(6, 0.0).unwrap();
        let r = lorenz96_rhs(&z, 8.0).unwrap();
        assert!(r.values().iter().all(|&v| v == 8.0));
    }

    #[test]
    fn lorenz_hand_evaluation_n4() {
        // component 1: -u3 u4 + u4 u2 - u1 = -12 + 8 - 1
        let u = State1D::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let r = lorenz96_rhs(&u, 0.0).unwrap();
        assert_eq!(r.values()[0], -5.0);
        // component 2: -u4 u1 + u1 u3 - u2 = -4 + 3 - 2
        assert_eq!(r.values()[1], -3.0);
        // component 3: -u1 u2 + u2 u4 - u3 = -2 + 8 - 3
        assert_eq!(r.values()[2], 3.0);
        // component 4: -u2 u3 + u3 u1 - u4 = -6 + 3 - 4
        assert_eq!(r.values()[3], -7.0);
    }

    #[test]
    fn lorenz_rejects_short_state() {
        let u = State1D::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(lorenz96_rhs(&u, 8.0), Err(Error::Dimension(_))));
    }

    #[test]
    fn burgers_constant_field_is_stationary() {
        let u = grid(8, 1.0 / 8.0, |_, _| 3.7);
        let r = burgers2d_rhs(&u, 0.01).unwrap();
        assert!(r.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn burgers_hot_spot_center_value() {
        let n = 128;
        let u = grid(n, 1.0 / 128.0, |i, j| if i == 40 && j == 70 { 1.0 } else { 0.0 });
        let r = burgers2d_rhs(&u, 1e-2).unwrap();
        assert!((r.get(40, 70) + 655.36).abs() < 1e-9);
        // east neighbour sees diffusion in and the squared term from its west side
        let expected_east = 163.84 - 32.0;
        assert!((r.get(41, 70) - expected_east).abs() < 1e-9);
    }

    #[test]
    fn burgers_linear_field_has_no_interior_diffusion() {
        let n = 16;
        let h = 1.0 / n as f64;
        let u = grid(n, h, |i, _| i as f64 * h);
        let r = burgers2d_rhs(&u, 1.0).unwrap();
        // remaining term is the advective ((i+1)^2 - (i-1)^2) h^2 / (4h) = i h
        for i in 1..n - 1 {
            assert!((r.get(i, 5) - i as f64 * h).abs() < 1e-12);
        }
    }

    #[test]
    fn nine_point_laplacian_annihilates_constants_and_linear_fields() {
        let c = grid(7, 0.5, |_, _| 2.0);
        assert!(laplacian9(&c).values().iter().all(|v| v.abs() < 1e-12));
        let lin = grid(9, 1.0, |i, j| i as f64 + 2.0 * j as f64);
        let l = laplacian9(&lin);
        for i in 1..8 {
            for j in 1..8 {
                assert!(l.get(i, j).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn grayscott_homogeneous_steady_state() {
        let u = grid(6, 1.0, |_, _| 1.0);
        let v = grid(6, 1.0, |_, _| 0.0);
        let s = TwoComponentState::new(u, v).unwrap();
        let p = GrayScottParams { r_u: 0.3, r_v: 0.15, f: 0.055, k: 0.063 };
        let r = grayscott_rhs(&s, &p).unwrap();
        assert!(r.u.values().iter().chain(r.v.values()).all(|&x| x == 0.0));
    }

    #[test]
    fn grayscott_rejects_bad_rates() {
        let u = grid(4, 1.0, |_, _| 1.0);
        let s = TwoComponentState::new(u.clone(), u).unwrap();
        let p = GrayScottParams { r_u: 0.0, r_v: 0.15, f: 0.055, k: 0.063 };
        assert!(grayscott_rhs(&s, &p).is_err());
    }
}
