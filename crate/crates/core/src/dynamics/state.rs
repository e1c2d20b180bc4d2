use crate::error::{Error, Result};
use crate::scalar::Real;

/// Operations the integrator and noise model need from a state type.
pub trait State<T: Real>: Clone + std::fmt::Debug {
    /// Flat views over every stored value, component by component.
    fn slices(&self) -> Vec<&[T]>;
    fn slices_mut(&mut self) -> Vec<&mut [T]>;
    fn same_shape(&self, other: &Self) -> bool;

    /// `self += alpha * other`.
    fn add_scaled(&mut self, alpha: T, other: &Self) {
        debug_assert!(self.same_shape(other));
        for (dst, src) in self.slices_mut().into_iter().zip(other.slices()) {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d += alpha * s;
            }
        }
    }

    fn all_finite(&self) -> bool {
        self.slices()
            .iter()
            .all(|s| s.iter().all(|v| v.is_finite()))
    }

    fn map_in_place(&mut self, mut f: impl FnMut(T) -> T) {
        for s in self.slices_mut() {
            for v in s.iter_mut() {
                *v = f(*v);
            }
        }
    }

    /// All values concatenated in storage order.
    fn to_flat(&self) -> Vec<T> {
        self.slices().concat()
    }

    fn len(&self) -> usize {
        self.slices().iter().map(|s| s.len()).sum()
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// State of a system with one periodic index, `u ∈ ℝⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct State1D<T> {
    values: Vec<T>,
}

impl<T: Real> State1D<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Dimension("empty 1D state".into()));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite state entry".into()));
        }
        Ok(Self { values })
    }

    /// Builds without validation; used by right-hand sides whose output may
    /// legitimately overflow during a diverging integration.
    pub(crate) fn from_raw(values: Vec<T>) -> Self {
        Self { values }
    }

    pub fn constant(n: usize, value: T) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Periodic access: `at(-1) == at(n - 1)`.
    #[inline]
    pub fn at(&self, j: isize) -> T {
        let n = self.values.len() as isize;
        self.values[j.rem_euclid(n) as usize]
    }

    /// Cyclic left shift by `s`: entry `j` of the result is entry `j + s` of `self`.
    pub fn shifted(&self, s: isize) -> Self {
        let n = self.len();
        Self {
            values: (0..n).map(|j| self.at(j as isize + s)).collect(),
        }
    }
}

impl<T: Real> State<T> for State1D<T> {
    fn slices(&self) -> Vec<&[T]> {
        vec![&self.values]
    }
    fn slices_mut(&mut self) -> Vec<&mut [T]> {
        vec![&mut self.values]
    }
    fn same_shape(&self, other: &Self) -> bool {
        self.values.len() == other.values.len()
    }
}

/// Square periodic grid stored row-major; `values[i * n + j] = u_{i,j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct State2D<T> {
    n: usize,
    spacing: T,
    values: Vec<T>,
}

impl<T: Real> State2D<T> {
    pub fn new(n: usize, spacing: T, values: Vec<T>) -> Result<Self> {
        if n == 0 || values.len() != n * n {
            return Err(Error::Dimension(format!(
                "grid of side {n} needs {} values, got {}",
                n * n,
                values.len()
            )));
        }
        if !(spacing > T::zero()) || !spacing.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid spacing must be positive, got {spacing}"
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite state entry".into()));
        }
        Ok(Self { n, spacing, values })
    }

    /// Grid on the unit square, `h = 1/n`.
    pub fn unit_square(n: usize, values: Vec<T>) -> Result<Self> {
        Self::new(n, T::one() / T::lit(n as f64), values)
    }

    pub fn from_fn(n: usize, spacing: T, f: impl Fn(usize, usize) -> T) -> Result<Self> {
        let values = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self::new(n, spacing, values)
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.n + j]
    }

    /// Periodic access in both indices.
    #[inline]
    pub fn at(&self, i: isize, j: isize) -> T {
        let n = self.n as isize;
        self.values[(i.rem_euclid(n) * n + j.rem_euclid(n)) as usize]
    }

    /// Cyclic shift: entry `(i, j)` of the result is entry `(i + di, j + dj)`.
    pub fn shifted(&self, di: isize, dj: isize) -> Self {
        let n = self.n;
        let values = (0..n * n)
            .map(|k| self.at((k / n) as isize + di, (k % n) as isize + dj))
            .collect();
        Self {
            n,
            spacing: self.spacing,
            values,
        }
    }

    pub(crate) fn with_values(&self, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), self.n * self.n);
        Self {
            n: self.n,
            spacing: self.spacing,
            values,
        }
    }
}

impl<T: Real> State<T> for State2D<T> {
    fn slices(&self) -> Vec<&[T]> {
        vec![&self.values]
    }
    fn slices_mut(&mut self) -> Vec<&mut [T]> {
        vec![&mut self.values]
    }
    fn same_shape(&self, other: &Self) -> bool {
        self.n == other.n && self.spacing == other.spacing
    }
}

/// Two concentrations on a shared grid (Gray-Scott `u` and `v`).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoComponentState<T> {
    pub u: State2D<T>,
    pub v: State2D<T>,
}

impl<T: Real> TwoComponentState<T> {
    pub fn new(u: State2D<T>, v: State2D<T>) -> Result<Self> {
        if !u.same_shape(&v) {
            return Err(Error::Dimension(format!(
                "components disagree: {}x{} (h={}) vs {}x{} (h={})",
                u.n, u.n, u.spacing, v.n, v.n, v.spacing
            )));
        }
        Ok(Self { u, v })
    }

    pub fn shifted(&self, di: isize, dj: isize) -> Self {
        Self {
            u: self.u.shifted(di, dj),
            v: self.v.shifted(di, dj),
        }
    }
}

impl<T: Real> State<T> for TwoComponentState<T> {
    fn slices(&self) -> Vec<&[T]> {
        vec![&self.u.values, &self.v.values]
    }
    fn slices_mut(&mut self) -> Vec<&mut [T]> {
        vec![&mut self.u.values, &mut self.v.values]
    }
    fn same_shape(&self, other: &Self) -> bool {
        self.u.same_shape(&other.u) && self.v.same_shape(&other.v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_access_wraps() {
        let s = State1D::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.at(-1), 3.0);
        assert_eq!(s.at(3), 1.0);
        assert_eq!(s.shifted(1).values(), &[2.0, 3.0, 1.0]);
    }

    #[test]
    fn grid_rejects_bad_shapes() {
        assert!(State2D::<f64>::new(3, 0.1, vec![0.0; 8]).is_err());
        assert!(State2D::<f64>::new(2, 0.0, vec![0.0; 4]).is_err());
        let u = State2D::<f64>::unit_square(2, vec![0.0; 4]).unwrap();
        let v = State2D::<f64>::unit_square(3, vec![0.0; 9]).unwrap();
        assert!(matches!(
            TwoComponentState::new(u, v),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn add_scaled_updates_every_component() {
        let u = State2D::<f64>::unit_square(2, vec![1.0; 4]).unwrap();
        let mut s = TwoComponentState::new(u.clone(), u).unwrap();
        let d = s.clone();
        s.add_scaled(0.5, &d);
        assert!(s.to_flat().iter().all(|&v| v == 1.5));
    }
}
