use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling on the number of dictionary columns.
pub const DEFAULT_COLUMN_CAP: u128 = 10_000_000;

/// Spatial offset of a local variable relative to the row's centre site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Offset {
    Line(i64),
    Grid(i64, i64),
}

/// One column of a data matrix: a component (`u`, `v`, ...) at an offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LocalVar {
    pub component: usize,
    pub offset: Offset,
}

pub const COMPONENT_NAMES: [&str; 4] = ["u", "v", "w", "z"];

impl LocalVar {
    pub fn line(component: usize, offset: i64) -> Self {
        Self { component, offset: Offset::Line(offset) }
    }

    pub fn grid(component: usize, di: i64, dj: i64) -> Self {
        Self { component, offset: Offset::Grid(di, dj) }
    }
}

impl fmt::Display for LocalVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = COMPONENT_NAMES.get(self.component).copied().unwrap_or("x");
        match self.offset {
            Offset::Line(o) => write!(f, "{name}[{o}]"),
            Offset::Grid(i, j) => write!(f, "{name}[{i},{j}]"),
        }
    }
}

/// Exponents of a monomial (or tensorized Legendre term) over local
/// variables, stored as `(variable index, power)` pairs sorted by index with
/// nonzero powers only.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex {
    factors: Vec<(usize, u32)>,
}

impl MultiIndex {
    pub fn constant() -> Self {
        Self { factors: Vec::new() }
    }

    /// Builds from arbitrary `(variable, power)` pairs; repeated variables are
    /// merged and zero powers dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut factors: Vec<(usize, u32)> = Vec::new();
        let mut all: Vec<_> = pairs.into_iter().filter(|&(_, p)| p > 0).collect();
        all.sort_unstable();
        for (v, p) in all {
            match factors.last_mut() {
                Some((lv, lp)) if *lv == v => *lp += p,
                _ => factors.push((v, p)),
            }
        }
        Self { factors }
    }

    /// From a nondecreasing list of variables, e.g. `[0, 0, 3]` is `x0² x3`.
    pub fn from_variables(vars: &[usize]) -> Self {
        Self::from_pairs(vars.iter().map(|&v| (v, 1)))
    }

    pub fn factors(&self) -> &[(usize, u32)] {
        &self.factors
    }

    pub fn total_degree(&self) -> u32 {
        self.factors.iter().map(|&(_, p)| p).sum()
    }

    pub fn power_of(&self, var: usize) -> u32 {
        self.factors
            .iter()
            .find(|&&(v, _)| v == var)
            .map_or(0, |&(_, p)| p)
    }

    pub fn is_constant(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn label(&self, vars: &[LocalVar]) -> String {
        if self.factors.is_empty() {
            return "1".to_string();
        }
        self.factors
            .iter()
            .map(|&(v, p)| {
                let name = vars.get(v).map_or_else(|| format!("x{v}"), |lv| lv.to_string());
                if p == 1 {
                    name
                } else {
                    format!("{name}^{p}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Binomial coefficient `C(n, k)` in 128-bit arithmetic, saturating.
pub fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Number of monomials of total degree at most `p` in `n_vars` variables.
pub fn column_count(n_vars: usize, p: u32) -> u128 {
    binomial(n_vars as u128 + p as u128, p as u128)
}

/// All multi-indices of total degree `≤ p` in graded lexicographic order:
/// degree by degree, and within a degree the nondecreasing variable tuples in
/// lexicographic order (`1, x0, x1, …, x0², x0x1, …`).
pub fn graded_multi_indices(n_vars: usize, p: u32, cap: u128) -> Result<Vec<MultiIndex>> {
    let requested = column_count(n_vars, p);
    if requested > cap {
        return Err(Error::Capacity { requested, cap });
    }
    let mut out = Vec::with_capacity(requested as usize);
    out.push(MultiIndex::constant());
    let mut tuple: Vec<usize> = Vec::new();
    for d in 1..=p as usize {
        if n_vars == 0 {
            break;
        }
        tuple.clear();
        tuple.resize(d, 0);
        loop {
            out.push(MultiIndex::from_variables(&tuple));
            // advance to the next nondecreasing tuple
            let mut pos = d;
            while pos > 0 && tuple[pos - 1] == n_vars - 1 {
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            let next = tuple[pos - 1] + 1;
            for t in tuple[pos - 1..].iter_mut() {
                *t = next;
            }
        }
    }
    Ok(out)
}
