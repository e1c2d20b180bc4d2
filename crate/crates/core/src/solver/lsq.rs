//! Least-squares refits: support-restricted debiasing and the dense
//! minimum-norm baseline.

use nalgebra::{DMatrix, DVector};

use super::support::{select_support, SupportRule, SupportScale};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative tolerance below which a column counts as dependent on earlier ones.
const DEPENDENCE_TOL: f64 = 1e-10;

/// Least-squares fit of `V` using only the columns in `support`; zeros
/// elsewhere. Columns are equilibrated before the QR solve. On rank
/// deficiency the error lists the offending column indices (as given by
/// `labels` when supplied).
pub fn debias<T: Real>(a: &DMatrix<T>, v: &[T], support: &[usize], labels: Option<&[String]>) -> Result<Vec<T>> {
    if v.len() != a.nrows() {
        return Err(Error::Dimension(format!("velocity has {} entries for {} rows", v.len(), a.nrows())));
    }
    let mut out = vec![T::zero(); a.ncols()];
    if support.is_empty() {
        return Ok(out);
    }
    if let Some(&bad) = support.iter().find(|&&j| j >= a.ncols()) {
        return Err(Error::Dimension(format!("support index {bad} out of range")));
    }
    let name = |j: usize| labels.and_then(|l| l.get(j).cloned()).unwrap_or_else(|| format!("column {j}"));
    if support.len() > a.nrows() {
        return Err(Error::RankDeficient(support.iter().skip(a.nrows()).map(|&j| name(j)).collect()));
    }
    let mut sub = a.select_columns(support);
    let mut norms = Vec::with_capacity(support.len());
    for (k, mut col) in sub.column_iter_mut().enumerate() {
        let n = col.norm();
        if !(n > T::zero()) {
            return Err(Error::RankDeficient(vec![name(support[k])]));
        }
        col /= n;
        norms.push(n);
    }
    // modified Gram-Schmidt to name dependent columns
    let mut q: Vec<DVector<T>> = Vec::with_capacity(support.len());
    let mut dependent = Vec::new();
    for (k, col) in sub.column_iter().enumerate() {
        let mut r = col.clone_owned();
        for b in &q {
            let d = b.dot(&r);
            r.axpy(-d, b, T::one());
        }
        let rn = r.norm();
        if rn <= T::lit(DEPENDENCE_TOL) {
            dependent.push(name(support[k]));
        } else {
            q.push(r / rn);
        }
    }
    if !dependent.is_empty() {
        return Err(Error::RankDeficient(dependent));
    }
    let qr = sub.qr();
    let rhs = qr.q().tr_mul(&DVector::from_column_slice(v));
    let x = qr
        .r()
        .solve_upper_triangular(&rhs)
        .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
    for ((&j, &xj), &n) in support.iter().zip(x.iter()).zip(&norms) {
        out[j] = xj / n;
    }
    Ok(out)
}

/// Minimum-norm minimizer of `‖A c − V‖₂` via the SVD pseudo-inverse.
pub fn least_squares_baseline<T: Real>(a: &DMatrix<T>, v: &[T]) -> Result<Vec<T>> {
    if v.len() != a.nrows() {
        return Err(Error::Dimension(format!("velocity has {} entries for {} rows", v.len(), a.nrows())));
    }
    if a.is_empty() {
        return Err(Error::Dimension("empty dictionary".into()));
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = smax * T::eps() * T::lit(a.nrows().max(a.ncols()) as f64);
    let x = svd
        .solve(&DVector::from_column_slice(v), eps)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    Ok(x.as_slice().to_vec())
}

/// Debiases on the selected support, re-selecting until the support is stable.
///
/// Least squares on a support can push a marginal term below the cut, so the
/// fit is repeated on the new set, for a bounded number of passes.
pub fn debias_refit<T: Real>(
    a: &DMatrix<T>,
    v: &[T],
    c: &[T],
    rule: SupportRule,
    scale: Option<SupportScale<'_, T>>,
    labels: Option<&[String]>,
) -> Result<(Vec<T>, Vec<usize>)> {
    const MAX_PASSES: usize = 8;
    let mut support = select_support(c, rule, scale);
    let mut pass = 0;
    loop {
        let fit = debias(a, v, &support, labels)?;
        let next = select_support(&fit, rule, scale);
        pass += 1;
        if next == support || next.is_empty() || pass == MAX_PASSES {
            return Ok((fit, support));
        }
        support = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn debias_exact_and_empty() {
        let a = DMatrix::from_row_slice(4, 3, &[1.0, 0.0, 2.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 2.0, -1.0, 1.0]);
        let c = DVector::from_column_slice(&[1.5, 0.0, -2.0]);
        let v = &a * c;
        let got: Vec<f64> = debias(&a, v.as_slice(), &[0, 2], None).unwrap();
        assert!((got[0] - 1.5).abs() < 1e-12 && got[1] == 0.0 && (got[2] + 2.0).abs() < 1e-12);
        assert_eq!(debias(&a, v.as_slice(), &[], None).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn debias_names_dependent_columns() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 1.0, 2.0, 1.0, 0.0, 0.0, 1.0]);
        let labels = vec!["1".to_string(), "u[0]".to_string(), "u[1]".to_string()];
        match debias(&a, &[1.0, 2.0, 3.0], &[0, 1, 2], Some(&labels)) {
            Err(Error::RankDeficient(cols)) => assert_eq!(cols, vec!["u[0]".to_string()]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn baseline() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let x: Vec<f64> = least_squares_baseline(&a, &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-12 && (x[1] - 1.4).abs() < 1e-12);
        let wide = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let x: Vec<f64> = least_squares_baseline(&wide, &[2.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
        assert_eq!(least_squares_baseline(&wide, &[0.0]).unwrap(), vec![0.0, 0.0]);
    }
}
