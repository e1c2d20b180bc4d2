//! Side-by-side exact and learned evolutions written as CSV grids.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::run::{learned_rhs, simulate_bursts, ExperimentResult};
use super::systems::{with_benchmark, Benchmark, BenchmarkVisitor};
use crate::dictionary::{PolynomialModel, COMPONENT_NAMES};
use crate::dynamics::{State, State1D, State2D};
use crate::error::{Error, Result};

/// Files written by [`emit_fields`] and whether the learned run blew up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldsReport {
    pub files: Vec<PathBuf>,
    /// Time at which the learned system stopped being finite, if it did.
    pub learned_diverged_at: Option<f64>,
    /// Largest absolute entry of each written difference grid, in order.
    pub max_abs_difference: Vec<f64>,
}

/// Simulates the exact system and the learned equations from the first
/// burst's initial state and writes `exact_*`, `learned_*` and `diff_*`
/// CSV grids for every requested time. `dt` defaults to the configured
/// comparison step, else `dt_fine`.
pub fn emit_fields(result: &ExperimentResult, times: &[f64], dt: Option<f64>, dir: &Path) -> Result<FieldsReport> {
    let models = result.learned_models()?;
    emit_fields_with(result, &models, times, dt, dir)
}

/// As [`emit_fields`] but with explicit models standing in for the learned
/// equations.
pub fn emit_fields_with(
    result: &ExperimentResult,
    models: &[PolynomialModel<f64>],
    times: &[f64],
    dt: Option<f64>,
    dir: &Path,
) -> Result<FieldsReport> {
    let cfg = result.config.resolve()?;
    let dt = dt.or(cfg.comparison.map(|c| c.dt)).unwrap_or(cfg.dt_fine);
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter("field time step must be positive".into()));
    }
    if times.iter().any(|t| !(*t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("field times must be nonnegative and nondecreasing".into()));
    }
    std::fs::create_dir_all(dir)?;
    with_benchmark(&cfg.system, Emitter { cfg: &cfg, models, times, dt, dir })
}

struct Emitter<'a> {
    cfg: &'a super::config::Resolved,
    models: &'a [PolynomialModel<f64>],
    times: &'a [f64],
    dt: f64,
    dir: &'a Path,
}

impl BenchmarkVisitor for Emitter<'_> {
    type Output = Result<FieldsReport>;

    fn visit<B: Benchmark + Sync>(self, b: &B) -> Result<FieldsReport> {
        let mut cfg = self.cfg.clone();
        cfg.bursts = 1;
        let start = simulate_bursts(b, &cfg)?.remove(0).snapshots.remove(0);
        let rhs = learned_rhs(b, self.models)?;
        let mut exact = start.clone();
        let mut learned = Some(start);
        let mut step = 0usize;
        let mut report = FieldsReport { files: Vec::new(), learned_diverged_at: None, max_abs_difference: Vec::new() };
        for (idx, &t) in self.times.iter().enumerate() {
            let target = (t / self.dt).round() as usize;
            while step < target {
                let d = b.rhs(&exact)?;
                exact.add_scaled(self.dt, &d);
                if !exact.all_finite() {
                    return Err(Error::Divergence { step: step + 1, time: (step + 1) as f64 * self.dt });
                }
                if let Some(l) = learned.as_mut() {
                    let ok = rhs(l).map(|d| l.add_scaled(self.dt, &d)).is_ok() && l.all_finite();
                    if !ok {
                        report.learned_diverged_at = Some((step + 1) as f64 * self.dt);
                        learned = None;
                    }
                }
                step += 1;
            }
            for (c, name) in COMPONENT_NAMES.iter().enumerate().take(b.components()) {
                let e = b.component(&exact, c);
                report.files.push(write(b, &e, self.dir, &format!("exact_{name}_{idx}.csv"))?);
                if let Some(l) = &learned {
                    let l = b.component(l, c);
                    report.files.push(write(b, &l, self.dir, &format!("learned_{name}_{idx}.csv"))?);
                    let diff: Vec<f64> = e.iter().zip(&l).map(|(x, y)| x - y).collect();
                    report.max_abs_difference.push(diff.iter().fold(0.0, |m, x| m.max(x.abs())));
                    report.files.push(write(b, &diff, self.dir, &format!("diff_{name}_{idx}.csv"))?);
                }
            }
        }
        Ok(report)
    }
}

pub(crate) fn write<B: Benchmark>(b: &B, values: &[f64], dir: &Path, name: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    let out = BufWriter::new(File::create(&path)?);
    match b.domain() {
        crate::dictionary::Domain::Line(_) => crate::dynamics::write_line_csv(&State1D::from_raw(values.to_vec()), out)?,
        crate::dictionary::Domain::Grid(n) => {
            crate::dynamics::write_grid_csv(&State2D::new(n, 1.0, values.to_vec())?, out)?
        }
    }
    Ok(path)
}
