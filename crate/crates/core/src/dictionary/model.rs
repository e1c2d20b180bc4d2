//! Sparse polynomial right-hand sides evaluated over whole periodic domains.

use serde::{Deserialize, Serialize};

use super::matrix::{Basis, CoefficientVector};
use super::multi_index::{LocalVar, MultiIndex, Offset};
use crate::dynamics::{State1D, State2D, TwoComponentState};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// One component equation `u̇_site = Σ c_k · Π var^pow`, where each variable
/// is read at `site + offset` with periodic wrap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialModel<T> {
    pub variables: Vec<LocalVar>,
    pub terms: Vec<(MultiIndex, T)>,
}

impl<T: Real> PolynomialModel<T> {
    /// Keeps the nonzero monomial coefficients of `c`.
    pub fn from_coefficients(columns: &[MultiIndex], variables: &[LocalVar], c: &CoefficientVector<T>) -> Result<Self> {
        if c.basis != Basis::Monomial {
            return Err(Error::InvalidParameter("model needs monomial coefficients".into()));
        }
        if c.values.len() != columns.len() {
            return Err(Error::Dimension(format!(
                "{} coefficients for {} columns",
                c.values.len(),
                columns.len()
            )));
        }
        let terms = columns
            .iter()
            .zip(&c.values)
            .filter(|(_, v)| !v.is_zero())
            .map(|(m, &v)| (m.clone(), v))
            .collect();
        Ok(Self { variables: variables.to_vec(), terms })
    }

    fn check_line(&self) -> Result<()> {
        if self.variables.iter().any(|v| v.component != 0 || !matches!(v.offset, Offset::Line(_))) {
            return Err(Error::Dimension("model variables are not single-component 1D offsets".into()));
        }
        Ok(())
    }

    fn check_grid(&self, components: usize) -> Result<()> {
        if self
            .variables
            .iter()
            .any(|v| v.component >= components || !matches!(v.offset, Offset::Grid(..)))
        {
            return Err(Error::Dimension("model variables do not match a 2D state".into()));
        }
        Ok(())
    }

    /// Precomputes wrapped neighbour indices for a ring of `n` points.
    pub fn compile_line(&self, n: usize) -> Result<CompiledModel<T>> {
        self.check_line()?;
        let tables = self
            .variables
            .iter()
            .map(|v| match v.offset {
                Offset::Line(o) => (0, (0..n as i64).map(|j| (j + o).rem_euclid(n as i64) as usize).collect()),
                Offset::Grid(..) => unreachable!(),
            })
            .collect();
        Ok(self.compiled(tables, n))
    }

    /// Precomputes wrapped neighbour indices (row-major) on an `n × n` grid
    /// with `components` fields.
    pub fn compile_grid(&self, n: usize, components: usize) -> Result<CompiledModel<T>> {
        self.check_grid(components)?;
        let ni = n as i64;
        let tables = self
            .variables
            .iter()
            .map(|v| match v.offset {
                Offset::Grid(di, dj) => {
                    let mut idx = Vec::with_capacity(n * n);
                    for i in 0..ni {
                        for j in 0..ni {
                            idx.push(((i + di).rem_euclid(ni) * ni + (j + dj).rem_euclid(ni)) as usize);
                        }
                    }
                    (v.component, idx)
                }
                Offset::Line(_) => unreachable!(),
            })
            .collect();
        Ok(self.compiled(tables, n * n))
    }

    fn compiled(&self, tables: Vec<(usize, Vec<usize>)>, sites: usize) -> CompiledModel<T> {
        let terms = self
            .terms
            .iter()
            .map(|(mi, c)| {
                let factors = mi
                    .factors()
                    .iter()
                    .flat_map(|&(var, pow)| std::iter::repeat_n(var, pow as usize))
                    .collect();
                (*c, factors)
            })
            .collect();
        CompiledModel { tables, terms, sites }
    }

    pub fn rhs_line(&self, u: &State1D<T>) -> Result<State1D<T>> {
        let m = self.compile_line(u.len())?;
        Ok(State1D::from_raw(m.apply(&[u.values()])?))
    }

    pub fn rhs_grid(&self, u: &State2D<T>) -> Result<State2D<T>> {
        let m = self.compile_grid(u.side(), 1)?;
        Ok(u.with_values(m.apply(&[u.values()])?))
    }

    /// Evaluates this (single-equation) model over a two-component state.
    pub fn rhs_component(&self, state: &TwoComponentState<T>) -> Result<State2D<T>> {
        let m = self.compile_grid(state.u.side(), 2)?;
        Ok(state.u.with_values(m.apply(&[state.u.values(), state.v.values()])?))
    }
}

/// A [`PolynomialModel`] bound to a concrete periodic domain.
#[derive(Debug, Clone)]
pub struct CompiledModel<T> {
    tables: Vec<(usize, Vec<usize>)>,
    terms: Vec<(T, Vec<usize>)>,
    sites: usize,
}

impl<T: Real> CompiledModel<T> {
    /// Right-hand side at every site; `fields[c]` holds component `c`.
    pub fn apply(&self, fields: &[&[T]]) -> Result<Vec<T>> {
        if fields.iter().any(|f| f.len() != self.sites) || self.tables.iter().any(|(c, _)| *c >= fields.len()) {
            return Err(Error::Dimension("fields do not match the compiled domain".into()));
        }
        let mut vals = vec![T::zero(); self.tables.len()];
        let mut out = Vec::with_capacity(self.sites);
        for s in 0..self.sites {
            for (slot, (c, idx)) in vals.iter_mut().zip(&self.tables) {
                *slot = fields[*c][idx[s]];
            }
            let mut total = T::zero();
            for (c, factors) in &self.terms {
                let mut t = *c;
                for &f in factors {
                    t *= vals[f];
                }
                total += t;
            }
            out.push(total);
        }
        Ok(out)
    }
}
