//! Uniform access to the three benchmarks for the experiment pipeline.

use rand_chacha::ChaCha20Rng;

use super::config::SystemSpec;
use crate::dictionary::{
    local_data_1d, local_data_2d, local_data_multi, Block, CompiledModel, CyclicDataMatrix, Domain, LocalVar,
    MultiIndex, PolynomialModel, Site,
};
use crate::dynamics::{
    burgers2d_rhs, burgers_initial, grayscott_initial, grayscott_rhs, lorenz96_rhs, uniform_state, GrayScottParams,
    State, State1D, State2D, TwoComponentState,
};
use crate::error::{Error, Result};

/// Monomial terms of one exact component equation: `(factors, coefficient)`.
pub type ExactTerms = Vec<(Vec<(LocalVar, u32)>, f64)>;

/// What the pipeline needs from a benchmark.
pub(crate) trait Benchmark {
    type S: State<f64> + Send + Sync;

    fn domain(&self) -> Domain;
    fn components(&self) -> usize;
    fn initial(&self, rng: &mut ChaCha20Rng) -> Result<Self::S>;
    fn rhs(&self, s: &Self::S) -> Result<Self::S>;
    fn local_data(&self, s: &Self::S, r: usize, block: &Block) -> Result<CyclicDataMatrix<f64>>;
    /// Component `c` of `s` at `site`.
    fn value(&self, s: &Self::S, c: usize, site: Site) -> f64;
    /// Component `c` as a flat vector.
    fn component(&self, s: &Self::S, c: usize) -> Vec<f64>;
    fn exact_terms(&self, c: usize) -> ExactTerms;
    fn compile(&self, model: &PolynomialModel<f64>) -> Result<CompiledModel<f64>>;
    /// Builds a state of this system's shape from per-component values.
    fn assemble(&self, like: &Self::S, comps: Vec<Vec<f64>>) -> Self::S;
}

pub(crate) struct Lorenz {
    pub n: usize,
    pub forcing: f64,
}

pub(crate) struct Burgers {
    pub n: usize,
    pub alpha: f64,
}

pub(crate) struct GrayScott {
    pub n: usize,
    pub spacing: f64,
    pub params: GrayScottParams,
}

fn grid_site(s: Site) -> (usize, usize) {
    match s {
        Site::Grid(i, j) => (i, j),
        Site::Line(_) => unreachable!("grid systems only produce grid sites"),
    }
}

impl Benchmark for Lorenz {
    type S = State1D<f64>;

    fn domain(&self) -> Domain {
        Domain::Line(self.n)
    }
    fn components(&self) -> usize {
        1
    }
    fn initial(&self, rng: &mut ChaCha20Rng) -> Result<Self::S> {
        uniform_state(self.n, rng)
    }
    fn rhs(&self, s: &Self::S) -> Result<Self::S> {
        lorenz96_rhs(s, self.forcing)
    }
    fn local_data(&self, s: &Self::S, r: usize, block: &Block) -> Result<CyclicDataMatrix<f64>> {
        local_data_1d(s, r, block)
    }
    fn value(&self, s: &Self::S, _: usize, site: Site) -> f64 {
        match site {
            Site::Line(j) => s.values()[j],
            Site::Grid(..) => unreachable!("ring system only produces line sites"),
        }
    }
    fn component(&self, s: &Self::S, _: usize) -> Vec<f64> {
        s.values().to_vec()
    }
    fn exact_terms(&self, _: usize) -> ExactTerms {
        let u = |o| LocalVar::line(0, o);
        vec![
            (vec![(u(-2), 1), (u(-1), 1)], -1.0),
            (vec![(u(-1), 1), (u(1), 1)], 1.0),
            (vec![(u(0), 1)], -1.0),
            (vec![], self.forcing),
        ]
    }
    fn compile(&self, model: &PolynomialModel<f64>) -> Result<CompiledModel<f64>> {
        model.compile_line(self.n)
    }
    fn assemble(&self, _: &Self::S, mut comps: Vec<Vec<f64>>) -> Self::S {
        State1D::from_raw(comps.swap_remove(0))
    }
}

impl Benchmark for Burgers {
    type S = State2D<f64>;

    fn domain(&self) -> Domain {
        Domain::Grid(self.n)
    }
    fn components(&self) -> usize {
        1
    }
    fn initial(&self, rng: &mut ChaCha20Rng) -> Result<Self::S> {
        burgers_initial(self.n, rng)
    }
    fn rhs(&self, s: &Self::S) -> Result<Self::S> {
        burgers2d_rhs(s, self.alpha)
    }
    fn local_data(&self, s: &Self::S, r: usize, block: &Block) -> Result<CyclicDataMatrix<f64>> {
        local_data_2d(s, r, block)
    }
    fn value(&self, s: &Self::S, _: usize, site: Site) -> f64 {
        let (i, j) = grid_site(site);
        s.get(i, j)
    }
    fn component(&self, s: &Self::S, _: usize) -> Vec<f64> {
        s.values().to_vec()
    }
    fn exact_terms(&self, _: usize) -> ExactTerms {
        let h = 1.0 / self.n as f64;
        let u = |i, j| LocalVar::grid(0, i, j);
        let d = self.alpha / (h * h);
        let a = 1.0 / (4.0 * h);
        vec![
            (vec![(u(0, 0), 1)], -4.0 * d),
            (vec![(u(1, 0), 1)], d),
            (vec![(u(-1, 0), 1)], d),
            (vec![(u(0, 1), 1)], d),
            (vec![(u(0, -1), 1)], d),
            (vec![(u(1, 0), 2)], a),
            (vec![(u(-1, 0), 2)], -a),
            (vec![(u(0, 1), 2)], a),
            (vec![(u(0, -1), 2)], -a),
        ]
    }
    fn compile(&self, model: &PolynomialModel<f64>) -> Result<CompiledModel<f64>> {
        model.compile_grid(self.n, 1)
    }
    fn assemble(&self, like: &Self::S, mut comps: Vec<Vec<f64>>) -> Self::S {
        like.with_values(comps.swap_remove(0))
    }
}

/// Nine-point Laplacian terms of `rate · Δ_h` acting on component `c`,
/// with `extra` added to the centre coefficient.
fn laplacian_terms(c: usize, rate: f64, h: f64, extra: f64) -> ExactTerms {
    let w = |i, j| LocalVar::grid(c, i, j);
    let edge = rate * 2.0 / (3.0 * h * h);
    let corner = rate / (6.0 * h * h);
    let mut t: ExactTerms = vec![(vec![(w(0, 0), 1)], -5.0 * edge + extra)];
    for (i, j) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
        t.push((vec![(w(i, j), 1)], edge));
    }
    for (i, j) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
        t.push((vec![(w(i, j), 1)], corner));
    }
    t
}

impl Benchmark for GrayScott {
    type S = TwoComponentState<f64>;

    fn domain(&self) -> Domain {
        Domain::Grid(self.n)
    }
    fn components(&self) -> usize {
        2
    }
    fn initial(&self, rng: &mut ChaCha20Rng) -> Result<Self::S> {
        grayscott_initial(self.n, self.spacing, rng)
    }
    fn rhs(&self, s: &Self::S) -> Result<Self::S> {
        grayscott_rhs(s, &self.params)
    }
    fn local_data(&self, s: &Self::S, r: usize, block: &Block) -> Result<CyclicDataMatrix<f64>> {
        local_data_multi(s, r, block)
    }
    fn value(&self, s: &Self::S, c: usize, site: Site) -> f64 {
        let (i, j) = grid_site(site);
        if c == 0 {
            s.u.get(i, j)
        } else {
            s.v.get(i, j)
        }
    }
    fn component(&self, s: &Self::S, c: usize) -> Vec<f64> {
        if c == 0 {
            s.u.values().to_vec()
        } else {
            s.v.values().to_vec()
        }
    }
    fn exact_terms(&self, c: usize) -> ExactTerms {
        let GrayScottParams { r_u, r_v, f, k } = self.params;
        let uvv = vec![(LocalVar::grid(0, 0, 0), 1), (LocalVar::grid(1, 0, 0), 2)];
        if c == 0 {
            let mut t = laplacian_terms(0, r_u, self.spacing, -f);
            t.push((uvv, -1.0));
            t.push((vec![], f));
            t
        } else {
            let mut t = laplacian_terms(1, r_v, self.spacing, -(f + k));
            t.push((uvv, 1.0));
            t
        }
    }
    fn compile(&self, model: &PolynomialModel<f64>) -> Result<CompiledModel<f64>> {
        model.compile_grid(self.n, 2)
    }
    fn assemble(&self, like: &Self::S, mut comps: Vec<Vec<f64>>) -> Self::S {
        let v = comps.pop().expect("two components");
        let u = comps.pop().expect("two components");
        TwoComponentState { u: like.u.with_values(u), v: like.v.with_values(v) }
    }
}

/// Places exact terms onto a dictionary's columns.
pub fn exact_coefficients(columns: &[MultiIndex], variables: &[LocalVar], terms: &ExactTerms) -> Result<Vec<f64>> {
    let mut out = vec![0.0; columns.len()];
    for (factors, c) in terms {
        let mut pairs = Vec::with_capacity(factors.len());
        for (var, pow) in factors {
            let idx = variables.iter().position(|v| v == var).ok_or_else(|| {
                Error::Config(format!("exact model uses {var}, which lies outside the localization radius"))
            })?;
            pairs.push((idx, *pow));
        }
        let mi = MultiIndex::from_pairs(pairs);
        let j = columns
            .iter()
            .position(|m| *m == mi)
            .ok_or_else(|| Error::Config(format!("exact term {} exceeds the dictionary degree", mi.label(variables))))?;
        out[j] += *c;
    }
    Ok(out)
}

pub(crate) fn with_benchmark<R>(spec: &SystemSpec, f: impl BenchmarkVisitor<Output = R>) -> R {
    match *spec {
        SystemSpec::Lorenz96 { n, forcing } => f.visit(&Lorenz { n, forcing }),
        SystemSpec::Burgers2d { n, alpha } => f.visit(&Burgers { n, alpha }),
        SystemSpec::Grayscott { n, spacing, .. } => {
            f.visit(&GrayScott { n, spacing, params: spec.grayscott_params().unwrap() })
        }
    }
}

/// Generic callback over the concrete benchmark type.
pub(crate) trait BenchmarkVisitor {
    type Output;
    fn visit<B: Benchmark + Sync>(self, bench: &B) -> Self::Output;
}
