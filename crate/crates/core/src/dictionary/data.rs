//! Cyclic-permutation data matrices and their localized, restricted forms.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::multi_index::{LocalVar, Offset};
use crate::dynamics::{State1D, State2D, TwoComponentState};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Periodic index domain the rows of a data matrix are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    /// `n` points on a ring.
    Line(usize),
    /// `n × n` periodic grid.
    Grid(usize),
}

impl Domain {
    fn side(&self) -> usize {
        match *self {
            Domain::Line(n) | Domain::Grid(n) => n,
        }
    }
}

/// Site whose cyclic permutation produced a row: the point at offset zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Site {
    Line(usize),
    Grid(usize, usize),
}

/// Index set of the sub-domain a data matrix is restricted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Block {
    /// `len` consecutive points starting at `start`.
    Interval { start: usize, len: usize },
    /// `size × size` square with top-left corner `(row, col)`.
    Square { row: usize, col: usize, size: usize },
}

impl Block {
    /// Block of `size` (per axis) centred in the domain.
    pub fn centered(domain: Domain, size: usize) -> Self {
        match domain {
            Domain::Line(n) => Block::Interval { start: (n - size.min(n)) / 2, len: size },
            Domain::Grid(n) => {
                let c = (n - size.min(n)) / 2;
                Block::Square { row: c, col: c, size }
            }
        }
    }

    pub fn sites(&self, domain: Domain) -> Result<Vec<Site>> {
        match (*self, domain) {
            (Block::Interval { start, len }, Domain::Line(n)) => {
                if len == 0 || len > n || start >= n {
                    return Err(Error::Dimension(format!(
                        "interval block (start {start}, len {len}) does not fit a ring of {n}"
                    )));
                }
                Ok((0..len).map(|k| Site::Line((start + k) % n)).collect())
            }
            (Block::Square { row, col, size }, Domain::Grid(n)) => {
                if size == 0 || size > n || row >= n || col >= n {
                    return Err(Error::Dimension(format!(
                        "square block ({row}, {col}) of size {size} does not fit a {n}x{n} grid"
                    )));
                }
                let mut out = Vec::with_capacity(size * size);
                for a in 0..size {
                    for b in 0..size {
                        out.push(Site::Grid((row + a) % n, (col + b) % n));
                    }
                }
                Ok(out)
            }
            _ => Err(Error::Dimension("block kind does not match the domain".into())),
        }
    }
}

/// Rows are cyclic permutations of one snapshot (optionally localized to a
/// stencil and restricted to a block). Entry `(r, c)` is the value of
/// `variables[c].component` at `centers[r] + variables[c].offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicDataMatrix<T: Real> {
    pub rows: DMatrix<T>,
    pub variables: Vec<LocalVar>,
    pub centers: Vec<Site>,
    pub domain: Domain,
    pub burst_id: usize,
    pub time: f64,
}

impl<T: Real> CyclicDataMatrix<T> {
    pub fn nrows(&self) -> usize {
        self.rows.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.rows.ncols()
    }

    pub fn with_source(mut self, burst_id: usize, time: f64) -> Self {
        self.burst_id = burst_id;
        self.time = time;
        self
    }

    pub fn min_max(&self) -> (T, T) {
        self.rows.iter().fold(
            (T::max_value().unwrap(), T::min_value().unwrap()),
            |(lo, hi), &x| (lo.min(x), hi.max(x)),
        )
    }
}

/// Stencil offsets within radius `r` in cyclic order `0, 1, …, r, −r, …, −1`,
/// dropping offsets that coincide modulo `n`.
pub fn window_offsets(r: usize, n: usize) -> Vec<i64> {
    let r = r as i64;
    let n = n as i64;
    let mut seen = vec![false; n as usize];
    (0..=r)
        .chain(-r..0)
        .filter(|&o| {
            let k = o.rem_euclid(n) as usize;
            !std::mem::replace(&mut seen[k], true)
        })
        .collect()
}

fn grid_window(r: usize, n: usize, component: usize) -> Vec<LocalVar> {
    let offs = window_offsets(r, n);
    let mut out = Vec::with_capacity(offs.len() * offs.len());
    for &di in &offs {
        for &dj in &offs {
            out.push(LocalVar::grid(component, di, dj));
        }
    }
    out
}

fn build<T: Real>(
    centers: Vec<Site>,
    variables: Vec<LocalVar>,
    domain: Domain,
    value: impl Fn(Site, &LocalVar) -> T,
) -> CyclicDataMatrix<T> {
    let rows = DMatrix::from_fn(centers.len(), variables.len(), |r, c| value(centers[r], &variables[c]));
    CyclicDataMatrix { rows, variables, centers, domain, burst_id: 0, time: 0.0 }
}

fn line_value<T: Real>(u: &State1D<T>, site: Site, var: &LocalVar) -> T {
    match (site, var.offset) {
        (Site::Line(c), Offset::Line(o)) => u.at(c as isize + o as isize),
        _ => unreachable!("1D matrix with non-1D labels"),
    }
}

fn grid_value<T: Real>(grid: &State2D<T>, site: Site, var: &LocalVar) -> T {
    match (site, var.offset) {
        (Site::Grid(i, j), Offset::Grid(di, dj)) => grid.at(i as isize + di as isize, j as isize + dj as isize),
        _ => unreachable!("2D matrix with non-2D labels"),
    }
}

/// `n × n` matrix whose row `i` is `u` cyclically shifted left by `i`.
pub fn cyclic_data_1d<T: Real>(u: &State1D<T>) -> CyclicDataMatrix<T> {
    let n = u.len();
    let centers = (0..n).map(Site::Line).collect();
    let vars = (0..n as i64).map(|o| LocalVar::line(0, o)).collect();
    build(centers, vars, Domain::Line(n), |s, v| line_value(u, s, v))
}

/// `n² × n²` matrix: one row per pair of row/column shifts `(γ, τ)` in
/// lexicographic order, each holding the shifted grid in row-major order.
pub fn cyclic_data_2d<T: Real>(u: &State2D<T>) -> CyclicDataMatrix<T> {
    let n = u.side();
    let centers = (0..n * n).map(|k| Site::Grid(k / n, k % n)).collect();
    let vars = (0..n * n).map(|k| LocalVar::grid(0, (k / n) as i64, (k % n) as i64)).collect();
    build(centers, vars, Domain::Grid(n), |s, v| grid_value(u, s, v))
}

/// Two-component analogue of [`cyclic_data_2d`]: the `u` variables followed
/// by the `v` variables, both under the same shift.
pub fn multicomponent_data<T: Real>(state: &TwoComponentState<T>) -> Result<CyclicDataMatrix<T>> {
    if state.u.side() != state.v.side() {
        return Err(Error::Dimension("u and v grids differ".into()));
    }
    let n = state.u.side();
    let centers = (0..n * n).map(|k| Site::Grid(k / n, k % n)).collect();
    let vars = (0..2)
        .flat_map(|c| (0..n * n).map(move |k| LocalVar::grid(c, (k / n) as i64, (k % n) as i64)))
        .collect();
    Ok(build(centers, vars, Domain::Grid(n), |s, v| {
        if v.component == 0 {
            grid_value(&state.u, s, v)
        } else {
            grid_value(&state.v, s, v)
        }
    }))
}

/// Keeps the stencil of radius `r` around each row's centre (per component,
/// per axis) and the rows whose centre lies in `block`. Values come from the
/// input's full set of cyclic offsets, so halos wrap periodically.
pub fn localize_restrict<T: Real>(data: &CyclicDataMatrix<T>, r: usize, block: &Block) -> Result<CyclicDataMatrix<T>> {
    let n = data.domain.side();
    let sites = block.sites(data.domain)?;
    let components = {
        let mut c: Vec<usize> = data.variables.iter().map(|v| v.component).collect();
        c.dedup();
        c
    };
    let wanted: Vec<LocalVar> = components
        .iter()
        .flat_map(|&c| match data.domain {
            Domain::Line(n) => window_offsets(r, n).into_iter().map(|o| LocalVar::line(c, o)).collect::<Vec<_>>(),
            Domain::Grid(n) => grid_window(r, n, c),
        })
        .collect();
    let canon = |v: &LocalVar| -> (usize, Offset) {
        let m = |o: i64| o.rem_euclid(n as i64);
        match v.offset {
            Offset::Line(o) => (v.component, Offset::Line(m(o))),
            Offset::Grid(i, j) => (v.component, Offset::Grid(m(i), m(j))),
        }
    };
    let col_of = wanted
        .iter()
        .map(|w| {
            data.variables
                .iter()
                .position(|v| canon(v) == canon(w))
                .ok_or_else(|| Error::Dimension(format!("input matrix lacks variable {w}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let row_of = sites
        .iter()
        .map(|s| {
            data.centers
                .iter()
                .position(|c| c == s)
                .ok_or_else(|| Error::Dimension(format!("input matrix lacks a row centred at {s:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = DMatrix::from_fn(row_of.len(), col_of.len(), |a, b| data.rows[(row_of[a], col_of[b])]);
    Ok(CyclicDataMatrix {
        rows,
        variables: wanted,
        centers: sites,
        domain: data.domain,
        burst_id: data.burst_id,
        time: data.time,
    })
}

/// Localized and restricted matrix built directly from a 1D state, without
/// forming the full `n × n` matrix.
pub fn local_data_1d<T: Real>(u: &State1D<T>, r: usize, block: &Block) -> Result<CyclicDataMatrix<T>> {
    let domain = Domain::Line(u.len());
    let sites = block.sites(domain)?;
    let vars = window_offsets(r, u.len()).into_iter().map(|o| LocalVar::line(0, o)).collect();
    Ok(build(sites, vars, domain, |s, v| line_value(u, s, v)))
}

/// Direct 2D counterpart of [`local_data_1d`].
pub fn local_data_2d<T: Real>(u: &State2D<T>, r: usize, block: &Block) -> Result<CyclicDataMatrix<T>> {
    let domain = Domain::Grid(u.side());
    let sites = block.sites(domain)?;
    Ok(build(sites, grid_window(r, u.side(), 0), domain, |s, v| grid_value(u, s, v)))
}

/// Direct two-component counterpart of [`local_data_1d`]: `u` window then
/// `v` window.
pub fn local_data_multi<T: Real>(state: &TwoComponentState<T>, r: usize, block: &Block) -> Result<CyclicDataMatrix<T>> {
    if state.u.side() != state.v.side() {
        return Err(Error::Dimension("u and v grids differ".into()));
    }
    let n = state.u.side();
    let domain = Domain::Grid(n);
    let sites = block.sites(domain)?;
    let mut vars = grid_window(r, n, 0);
    vars.extend(grid_window(r, n, 1));
    Ok(build(sites, vars, domain, |s, v| {
        if v.component == 0 {
            grid_value(&state.u, s, v)
        } else {
            grid_value(&state.v, s, v)
        }
    }))
}

/// Affine map `u ↦ a·u + b` applied to data before building a Legendre
/// dictionary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingTransform<T> {
    pub a: T,
    pub b: T,
}

impl<T: Real> ScalingTransform<T> {
    pub fn identity() -> Self {
        Self { a: T::one(), b: T::zero() }
    }

    #[inline]
    pub fn apply(&self, x: T) -> T {
        self.a * x + self.b
    }

    /// Map sending `[lo, hi]` onto `[-1, 1]`.
    pub fn from_range(lo: T, hi: T) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::DegenerateScaling(lo.as_f64()));
        }
        let w = hi - lo;
        Ok(Self { a: T::lit(2.0) / w, b: -(hi + lo) / w })
    }
}

/// One global affine map taking the range of `data` onto `[-1, 1]`.
pub fn fit_scaling<T: Real>(data: &CyclicDataMatrix<T>) -> Result<ScalingTransform<T>> {
    fit_scaling_all(std::slice::from_ref(data))
}

/// Global scaling over several data matrices (all bursts of an experiment).
pub fn fit_scaling_all<T: Real>(data: &[CyclicDataMatrix<T>]) -> Result<ScalingTransform<T>> {
    if data.iter().all(|d| d.rows.is_empty()) {
        return Err(Error::InsufficientData("no data to scale".into()));
    }
    let (lo, hi) = data
        .iter()
        .filter(|d| !d.rows.is_empty())
        .map(|d| d.min_max())
        .fold((T::max_value().unwrap(), T::min_value().unwrap()), |(a, b), (c, d)| (a.min(c), b.max(d)));
    ScalingTransform::from_range(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(v: &[f64]) -> State1D<f64> {
        State1D::new(v.to_vec()).unwrap()
    }

    #[test]
    fn one_dimensional_rows_are_left_shifts() {
        let m = cyclic_data_1d(&line(&[1.0, 2.0, 3.0]));
        let expect = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 3.0, 1.0, 3.0, 1.0, 2.0]);
        assert_eq!(m.rows, expect);
        let single = cyclic_data_1d(&line(&[4.0]));
        assert_eq!(single.rows.shape(), (1, 1));
    }

    #[test]
    fn columns_are_permutations_of_the_state() {
        let u = [0.3, -1.0, 2.5, 7.0, 0.0];
        let m = cyclic_data_1d(&line(&u));
        let mut sorted_u = u.to_vec();
        sorted_u.sort_by(f64::total_cmp);
        for c in 0..5 {
            let mut col: Vec<f64> = m.rows.column(c).iter().copied().collect();
            col.sort_by(f64::total_cmp);
            assert_eq!(col, sorted_u);
        }
    }

    #[test]
    fn two_dimensional_permutation_matches_worked_example() {
        // u_{i,j} = 10 i + j with 1-based labels, so 23 stands for u_{2,3}
        let g = State2D::from_fn(3, 1.0 / 3.0, |i, j| (10 * (i + 1) + (j + 1)) as f64).unwrap();
        let m = cyclic_data_2d(&g);
        // rows {1,2,3} -> {2,3,1}, columns {1,2,3} -> {3,1,2}: shift (1, 2)
        let row = m.centers.iter().position(|&c| c == Site::Grid(1, 2)).unwrap();
        let got: Vec<f64> = m.rows.row(row).iter().copied().collect();
        assert_eq!(got, [23.0, 21.0, 22.0, 33.0, 31.0, 32.0, 13.0, 11.0, 12.0]);
        let first: Vec<f64> = m.rows.row(0).iter().copied().collect();
        assert_eq!(first, g.values());
    }

    #[test]
    fn two_dimensional_rows_are_distinct_permutations() {
        let g = State2D::from_fn(3, 1.0, |i, j| (3 * i + j) as f64).unwrap();
        let m = cyclic_data_2d(&g);
        let mut rows: Vec<Vec<i64>> = (0..9)
            .map(|r| m.rows.row(r).iter().map(|&x| x as i64).collect())
            .collect();
        for r in &rows {
            let mut s = r.clone();
            s.sort();
            assert_eq!(s, (0..9).collect::<Vec<i64>>());
        }
        rows.sort();
        rows.dedup();
        assert_eq!(rows.len(), 9);
    }

    #[test]
    fn multicomponent_layout() {
        let u = State2D::from_fn(3, 1.0, |i, j| (3 * i + j) as f64).unwrap();
        let s = TwoComponentState::new(u.clone(), u.clone()).unwrap();
        let m = multicomponent_data(&s).unwrap();
        assert_eq!(m.rows.shape(), (9, 18));
        for r in 0..9 {
            for c in 0..9 {
                assert_eq!(m.rows[(r, c)], m.rows[(r, c + 9)]);
            }
        }
        let v = State2D::from_fn(3, 1.0, |i, j| -((3 * i + j) as f64)).unwrap();
        let m = multicomponent_data(&TwoComponentState::new(u.clone(), v.clone()).unwrap()).unwrap();
        let first: Vec<f64> = m.rows.row(0).iter().copied().collect();
        assert_eq!(first, [u.values(), v.values()].concat());
    }

    #[test]
    fn restriction_of_labelled_ring_by_hand() {
        // u_k = k with 1-based labels on a ring of 9
        let u = line(&(1..=9).map(|k| k as f64).collect::<Vec<_>>());
        let full = cyclic_data_1d(&u);
        let block = Block::Interval { start: 2, len: 5 };
        let m = localize_restrict(&full, 2, &block).unwrap();
        #[rustfmt::skip]
        let expect = DMatrix::from_row_slice(5, 5, &[
            3.0, 4.0, 5.0, 1.0, 2.0,
            4.0, 5.0, 6.0, 2.0, 3.0,
            5.0, 6.0, 7.0, 3.0, 4.0,
            6.0, 7.0, 8.0, 4.0, 5.0,
            7.0, 8.0, 9.0, 5.0, 6.0,
        ]);
        assert_eq!(m.rows, expect);
        assert_eq!(local_data_1d(&u, 2, &block).unwrap().rows, expect);
    }

    #[test]
    fn covering_radius_recovers_full_matrix() {
        let u = line(&[0.5, -0.1, 0.9, 0.4, -0.6, 0.2, 0.8, -0.3, 0.7]);
        let full = cyclic_data_1d(&u);
        let m = localize_restrict(&full, 4, &Block::Interval { start: 0, len: 9 }).unwrap();
        assert_eq!(m.rows, full.rows);
        // a radius past the domain collapses duplicate offsets
        let m = localize_restrict(&full, 7, &Block::Interval { start: 0, len: 9 }).unwrap();
        assert_eq!(m.ncols(), 9);
    }

    #[test]
    fn nine_point_multicomponent_restriction_matches_worked_example() {
        // 1-based u_{i,j} encoded as 10 i + j, v = -u
        let n = 8;
        let u = State2D::from_fn(n, 1.0, |i, j| (10 * (i + 1) + (j + 1)) as f64).unwrap();
        let v = State2D::from_fn(n, 1.0, |i, j| -((10 * (i + 1) + (j + 1)) as f64)).unwrap();
        let s = TwoComponentState::new(u, v).unwrap();
        let block = Block::Square { row: 2, col: 2, size: 3 };
        let m = local_data_multi(&s, 1, &block).unwrap();
        assert_eq!(m.rows.shape(), (9, 18));
        let first: Vec<f64> = m.rows.row(0).iter().take(9).copied().collect();
        assert_eq!(first, [33.0, 34.0, 32.0, 43.0, 44.0, 42.0, 23.0, 24.0, 22.0]);
        let last: Vec<f64> = m.rows.row(8).iter().take(9).copied().collect();
        assert_eq!(last, [55.0, 56.0, 54.0, 65.0, 66.0, 64.0, 45.0, 46.0, 44.0]);
        assert_eq!(m.rows[(0, 9)], -33.0);
        let full = multicomponent_data(&s).unwrap();
        assert_eq!(localize_restrict(&full, 1, &block).unwrap().rows, m.rows);
    }

    #[test]
    fn seven_by_seven_block_with_radius_two() {
        let g = State2D::from_fn(16, 1.0, |i, j| (i * 16 + j) as f64).unwrap();
        let m = local_data_2d(&g, 2, &Block::Square { row: 1, col: 12, size: 7 }).unwrap();
        assert_eq!(m.rows.shape(), (49, 25));
        // halo wraps at the right edge: centre (1, 15) at offset (0, 2) reads column 1
        let r = m.centers.iter().position(|&c| c == Site::Grid(1, 15)).unwrap();
        let c = m.variables.iter().position(|v| *v == LocalVar::grid(0, 0, 2)).unwrap();
        assert_eq!(m.rows[(r, c)], (16 + 1) as f64);
    }

    #[test]
    fn oversized_block_is_rejected() {
        let u = line(&[1.0, 2.0, 3.0]);
        assert!(local_data_1d(&u, 1, &Block::Interval { start: 0, len: 4 }).is_err());
        let g = State2D::from_fn(4, 1.0, |_, _| 0.0).unwrap();
        assert!(local_data_2d(&g, 1, &Block::Square { row: 0, col: 0, size: 5 }).is_err());
    }

    #[test]
    fn scaling_fits() {
        let cases = [((0.0, 2.0), (1.0, -1.0)), ((-1.0, 1.0), (1.0, 0.0)), ((5.0, 15.0), (0.2, -2.0))];
        for ((lo, hi), (a, b)) in cases {
            let m = cyclic_data_1d(&line(&[lo, hi, (lo + hi) / 2.0]));
            let s = fit_scaling(&m).unwrap();
            assert!((s.a - a).abs() < 1e-15 && (s.b - b).abs() < 1e-15, "{s:?}");
            assert!((s.apply(lo) + 1.0).abs() < 1e-15);
            assert!((s.apply(hi) - 1.0).abs() < 1e-15);
        }
        let flat = cyclic_data_1d(&line(&[3.0, 3.0]));
        assert!(matches!(fit_scaling(&flat), Err(Error::DegenerateScaling(_))));
    }
}
