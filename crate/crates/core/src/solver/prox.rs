//! Closed-form proximal operators of the two halves of the basis pursuit
//! objective.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Componentwise shrinkage `c_j − γ·sign(c_j)` when `|c_j| > γ`, else 0.
pub fn soft_threshold<T: Real>(c: &[T], gamma: T) -> Vec<T> {
    c.iter().map(|&x| shrink(x, gamma)).collect()
}

#[inline]
pub(crate) fn shrink<T: Real>(x: T, gamma: T) -> T {
    if x > gamma {
        x - gamma
    } else if x < -gamma {
        x + gamma
    } else {
        T::zero()
    }
}

/// Euclidean projection of `w` onto the closed ball of radius `sigma` about `v`.
pub fn project_ball<T: Real>(w: &[T], v: &[T], sigma: T) -> Vec<T> {
    let mut out = w.to_vec();
    project_ball_in_place(&mut out, v, sigma);
    out
}

pub(crate) fn project_ball_in_place<T: Real>(w: &mut [T], v: &[T], sigma: T) {
    let d = crate::scalar::dist2(w, v);
    if d <= sigma {
        return;
    }
    let s = sigma / d;
    for (wi, &vi) in w.iter_mut().zip(v) {
        *wi = vi + s * (*wi - vi);
    }
}

/// Proximal map of `γ(‖c‖₁ + ι_{‖w−V‖≤σ})`: the halves act independently.
pub fn prox_f1<T: Real>(w: &[T], c: &[T], gamma: T, v: &[T], sigma: T) -> (Vec<T>, Vec<T>) {
    (project_ball(w, v, sigma), soft_threshold(c, gamma))
}

/// Projection onto the graph `{(w, c) : w = A c}` with a cached Cholesky
/// factor. The smaller of `I + AᵀA` and `I + AAᵀ` is factored; in the wide
/// case the solve goes through the Woodbury identity
/// `(I + AᵀA)⁻¹ = I − Aᵀ(I + AAᵀ)⁻¹A`.
#[derive(Debug, Clone)]
pub struct GraphProjector<T: Real> {
    a: DMatrix<T>,
    factor: Cholesky<T, Dyn>,
    wide: bool,
}

impl<T: Real> GraphProjector<T> {
    pub fn new(a: DMatrix<T>) -> Result<Self> {
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical("dictionary has non-finite entries".into()));
        }
        let (m, n) = a.shape();
        let wide = m < n;
        let gram = if wide {
            &a * a.transpose() + DMatrix::identity(m, m)
        } else {
            a.tr_mul(&a) + DMatrix::identity(n, n)
        };
        let factor =
            Cholesky::new(gram).ok_or_else(|| Error::Numerical("Cholesky factorization of I + AᵀA failed".into()))?;
        Ok(Self { a, factor, wide })
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.a
    }

    /// Returns `(A z, z)` with `z = (I + AᵀA)⁻¹(c + Aᵀw)`.
    pub fn apply(&self, w: &DVector<T>, c: &DVector<T>) -> (DVector<T>, DVector<T>) {
        let rhs = c + self.a.tr_mul(w);
        let z = if self.wide {
            let t = self.factor.solve(&(&self.a * &rhs));
            rhs - self.a.tr_mul(&t)
        } else {
            self.factor.solve(&rhs)
        };
        (&self.a * &z, z)
    }
}

/// One-shot [`GraphProjector::apply`]; factorizes on every call.
pub fn prox_f2<T: Real>(w: &[T], c: &[T], a: &DMatrix<T>) -> Result<(Vec<T>, Vec<T>)> {
    if w.len() != a.nrows() || c.len() != a.ncols() {
        return Err(Error::Dimension(format!(
            "prox_f2: w has {} and c has {} entries for a {}x{} matrix",
            w.len(),
            c.len(),
            a.nrows(),
            a.ncols()
        )));
    }
    let p = GraphProjector::new(a.clone())?;
    let (w2, z) = p.apply(&DVector::from_column_slice(w), &DVector::from_column_slice(c));
    Ok((w2.as_slice().to_vec(), z.as_slice().to_vec()))
}
