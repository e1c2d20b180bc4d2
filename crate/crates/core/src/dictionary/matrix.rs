//! Monomial and tensorized-Legendre dictionaries over data matrices.

use std::collections::HashMap;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::data::{CyclicDataMatrix, ScalingTransform};
use super::multi_index::{graded_multi_indices, LocalVar, MultiIndex, DEFAULT_COLUMN_CAP};
use super::polynomial::{compose_affine, legendre_values, normalized_legendre_coeffs};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Function family spanning a dictionary's columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Monomial,
    Legendre,
}

/// Candidate functions (columns) evaluated on data rows.
#[derive(Debug, Clone, PartialEq)]
pub struct DictionaryMatrix<T: Real> {
    pub entries: DMatrix<T>,
    pub columns: Vec<MultiIndex>,
    pub variables: Vec<LocalVar>,
    pub basis: Basis,
    /// Accumulated norms divided out by [`normalize_columns`].
    pub column_norms: Option<Vec<T>>,
    /// Affine map applied to the data before evaluating a Legendre basis.
    pub scaling: Option<ScalingTransform<T>>,
}

impl<T: Real> DictionaryMatrix<T> {
    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn labels(&self) -> Vec<String> {
        self.columns.iter().map(|m| m.label(&self.variables)).collect()
    }

    pub fn max_degree(&self) -> u32 {
        self.columns.iter().map(MultiIndex::total_degree).max().unwrap_or(0)
    }

    /// Position of each column keyed by its multi-index.
    pub fn column_lookup(&self) -> HashMap<&MultiIndex, usize> {
        self.columns.iter().enumerate().map(|(i, m)| (m, i)).collect()
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self {
            entries: self.entries.select_columns(cols),
            columns: cols.iter().map(|&c| self.columns[c].clone()).collect(),
            variables: self.variables.clone(),
            basis: self.basis,
            column_norms: self.column_norms.as_ref().map(|n| cols.iter().map(|&c| n[c]).collect()),
            scaling: self.scaling,
        }
    }
}

/// Coefficients over a dictionary's columns, tagged with their basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector<T> {
    pub values: Vec<T>,
    pub basis: Basis,
}

impl<T: Real> CoefficientVector<T> {
    pub fn new(values: Vec<T>, basis: Basis) -> Self {
        Self { values, basis }
    }

    pub fn zeros(n: usize, basis: Basis) -> Self {
        Self { values: vec![T::zero(); n], basis }
    }

    /// Indices of nonzero entries.
    pub fn support(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn as_dvector(&self) -> DVector<T> {
        DVector::from_column_slice(&self.values)
    }
}

/// Evaluates `per_var(value, table)` for every entry, then multiplies factor
/// tables column by column.
fn evaluate<T: Real>(
    data: &CyclicDataMatrix<T>,
    columns: &[MultiIndex],
    p: usize,
    per_value: impl Fn(T, &mut [T]),
) -> DMatrix<T> {
    let (m, nv) = (data.nrows(), data.ncols());
    // table[(var * (p + 1) + k) * m + row] = φ_k(x_{row, var})
    let mut table = vec![T::zero(); nv * (p + 1) * m];
    let mut buf = vec![T::zero(); p + 1];
    for var in 0..nv {
        for row in 0..m {
            per_value(data.rows[(row, var)], &mut buf);
            for k in 0..=p {
                table[(var * (p + 1) + k) * m + row] = buf[k];
            }
        }
    }
    let mut out = DMatrix::from_element(m, columns.len(), T::one());
    for (c, mi) in columns.iter().enumerate() {
        let mut col = out.column_mut(c);
        for &(var, pow) in mi.factors() {
            let base = (var * (p + 1) + pow as usize) * m;
            for (dst, &f) in col.iter_mut().zip(&table[base..base + m]) {
                *dst *= f;
            }
        }
    }
    out
}

/// All monomials of total degree `≤ p` in the data's local variables, in
/// graded lexicographic order.
pub fn monomial_dictionary<T: Real>(data: &CyclicDataMatrix<T>, p: u32) -> Result<DictionaryMatrix<T>> {
    monomial_dictionary_with_cap(data, p, DEFAULT_COLUMN_CAP)
}

pub fn monomial_dictionary_with_cap<T: Real>(
    data: &CyclicDataMatrix<T>,
    p: u32,
    cap: u128,
) -> Result<DictionaryMatrix<T>> {
    if p < 1 {
        return Err(Error::InvalidParameter("degree must be at least 1".into()));
    }
    let columns = graded_multi_indices(data.ncols(), p, cap)?;
    let entries = evaluate(data, &columns, p as usize, |x, out| {
        out[0] = T::one();
        for k in 1..out.len() {
            out[k] = out[k - 1] * x;
        }
    });
    Ok(DictionaryMatrix {
        entries,
        columns,
        variables: data.variables.clone(),
        basis: Basis::Monomial,
        column_norms: None,
        scaling: None,
    })
}

/// Tensorized normalized Legendre polynomials evaluated on `scaling`-mapped
/// data; same column order as [`monomial_dictionary`].
pub fn legendre_dictionary<T: Real>(
    data: &CyclicDataMatrix<T>,
    p: u32,
    scaling: ScalingTransform<T>,
) -> Result<DictionaryMatrix<T>> {
    legendre_dictionary_with_cap(data, p, scaling, DEFAULT_COLUMN_CAP)
}

pub fn legendre_dictionary_with_cap<T: Real>(
    data: &CyclicDataMatrix<T>,
    p: u32,
    scaling: ScalingTransform<T>,
    cap: u128,
) -> Result<DictionaryMatrix<T>> {
    if p < 1 {
        return Err(Error::InvalidParameter("degree must be at least 1".into()));
    }
    let tol = T::lit(1e-9);
    if let Some(bad) = data
        .rows
        .iter()
        .map(|&x| scaling.apply(x))
        .find(|x| x.abs() > T::one() + tol)
    {
        return Err(Error::Scaling(bad.as_f64()));
    }
    let columns = graded_multi_indices(data.ncols(), p, cap)?;
    let entries = evaluate(data, &columns, p as usize, |x, out| {
        let y = scaling.apply(x).max(-T::one()).min(T::one());
        legendre_values(y, out.len() - 1, out);
    });
    Ok(DictionaryMatrix {
        entries,
        columns,
        variables: data.variables.clone(),
        basis: Basis::Legendre,
        column_norms: None,
        scaling: Some(scaling),
    })
}

/// Divides every column by its Euclidean norm and records the norm.
pub fn normalize_columns<T: Real>(a: &DictionaryMatrix<T>) -> Result<DictionaryMatrix<T>> {
    let mut out = a.clone();
    let mut norms = a.column_norms.clone().unwrap_or_else(|| vec![T::one(); a.ncols()]);
    for (c, mut col) in out.entries.column_iter_mut().enumerate() {
        let n = col.norm();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::DegenerateColumn(a.columns[c].label(&a.variables)));
        }
        col /= n;
        norms[c] *= n;
    }
    out.column_norms = Some(norms);
    Ok(out)
}

/// Row-wise concatenation of per-burst dictionaries and velocities.
pub fn stack_bursts<T: Real>(parts: Vec<(DictionaryMatrix<T>, Vec<T>)>) -> Result<(DictionaryMatrix<T>, Vec<T>)> {
    let mut iter = parts.into_iter();
    let (first, v0) = iter
        .next()
        .ok_or_else(|| Error::InsufficientData("nothing to stack".into()))?;
    if first.nrows() != v0.len() {
        return Err(Error::Dimension(format!(
            "dictionary has {} rows but velocity has {}",
            first.nrows(),
            v0.len()
        )));
    }
    let mut blocks = vec![first.entries.clone()];
    let mut velocity = v0;
    for (d, v) in iter {
        if d.columns != first.columns
            || d.variables != first.variables
            || d.basis != first.basis
            || d.scaling != first.scaling
            || d.column_norms != first.column_norms
        {
            return Err(Error::ColumnMismatch);
        }
        if d.nrows() != v.len() {
            return Err(Error::Dimension(format!(
                "dictionary has {} rows but velocity has {}",
                d.nrows(),
                v.len()
            )));
        }
        blocks.push(d.entries);
        velocity.extend(v);
    }
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut entries = DMatrix::zeros(rows, first.ncols());
    let mut at = 0;
    for b in blocks {
        entries.rows_mut(at, b.nrows()).copy_from(&b);
        at += b.nrows();
    }
    Ok((DictionaryMatrix { entries, ..first }, velocity))
}

/// Re-expresses coefficients of a (possibly normalized) Legendre dictionary
/// as monomial coefficients in the original, unscaled variables. The two
/// representations agree pointwise.
pub fn legendre_to_monomial<T: Real>(
    c_l: &CoefficientVector<T>,
    a: &DictionaryMatrix<T>,
) -> Result<CoefficientVector<T>> {
    if a.basis != Basis::Legendre || c_l.basis != Basis::Legendre {
        return Err(Error::InvalidParameter("expected Legendre coefficients and dictionary".into()));
    }
    let scaling = a
        .scaling
        .ok_or_else(|| Error::MissingMetadata("Legendre dictionary has no scaling transform".into()))?;
    if c_l.values.len() != a.ncols() {
        return Err(Error::Dimension(format!(
            "{} coefficients for {} columns",
            c_l.values.len(),
            a.ncols()
        )));
    }
    let p = a.max_degree() as usize;
    // univariate L_k(a u + b) as polynomials in u
    let factors: Vec<Vec<T>> = normalized_legendre_coeffs::<T>(p)
        .iter()
        .map(|c| compose_affine(c, scaling.a, scaling.b))
        .collect();
    let lookup = a.column_lookup();
    let mut out = vec![T::zero(); a.ncols()];
    let mut terms: Vec<(Vec<(usize, u32)>, T)> = Vec::new();
    for (j, mi) in a.columns.iter().enumerate() {
        let mut weight = c_l.values[j];
        if weight.is_zero() {
            continue;
        }
        if let Some(norms) = &a.column_norms {
            weight /= norms[j];
        }
        // expand Π_v L_{e_v}(a u_v + b)
        terms.clear();
        terms.push((Vec::new(), weight));
        for &(var, pow) in mi.factors() {
            let poly = &factors[pow as usize];
            let mut next = Vec::with_capacity(terms.len() * poly.len());
            for (mono, coef) in &terms {
                for (m, &pc) in poly.iter().enumerate() {
                    if pc.is_zero() {
                        continue;
                    }
                    let mut mono = mono.clone();
                    if m > 0 {
                        mono.push((var, m as u32));
                    }
                    next.push((mono, *coef * pc));
                }
            }
            terms = next;
        }
        for (mono, coef) in terms.drain(..) {
            let key = MultiIndex::from_pairs(mono);
            let idx = lookup.get(&key).ok_or_else(|| {
                Error::Dimension(format!("monomial {} missing from dictionary", key.label(&a.variables)))
            })?;
            out[*idx] += coef;
        }
    }
    Ok(CoefficientVector::new(out, Basis::Monomial))
}

/// Writes the dictionary (and optionally the velocity) as CSV with a header
/// of canonical column labels; the velocity column is headed `V`.
pub fn write_dictionary_csv<T: Real>(a: &DictionaryMatrix<T>, velocity: Option<&[T]>, out: impl Write) -> Result<()> {
    if let Some(v) = velocity {
        if v.len() != a.nrows() {
            return Err(Error::Dimension("velocity length differs from row count".into()));
        }
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = a.labels();
    if velocity.is_some() {
        header.push("V".to_string());
    }
    w.write_record(&header)?;
    for r in 0..a.nrows() {
        let mut rec: Vec<String> = a.entries.row(r).iter().map(|x| x.to_string()).collect();
        if let Some(v) = velocity {
            rec.push(v[r].to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a headed numeric CSV such as [`write_dictionary_csv`] produces,
/// returning the header labels and the matrix.
pub fn read_matrix_csv(input: impl std::io::Read) -> Result<(Vec<String>, nalgebra::DMatrix<f64>)> {
    let mut r = csv::Reader::from_reader(input);
    let labels: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut values = Vec::new();
    let mut rows = 0;
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != labels.len() {
            return Err(Error::Dimension(format!("row {} has {} fields, header has {}", i + 1, rec.len(), labels.len())));
        }
        for field in rec.iter() {
            let x: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("row {}: `{field}` is not a number", i + 1)))?;
            values.push(x);
        }
        rows += 1;
    }
    Ok((labels.clone(), nalgebra::DMatrix::from_row_slice(rows, labels.len(), &values)))
}
