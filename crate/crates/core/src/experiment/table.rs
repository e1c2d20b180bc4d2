//! Parameter sweeps producing the error tables.

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::ExperimentConfig;
use super::run::{run_experiment, ExperimentResult};
use crate::dynamics::NoiseSpec;
use crate::error::{Error, Result};

/// A base configuration and a list of JSON overrides merged onto it; every
/// override is run once per seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: Value,
    /// Each entry may carry a `"label"` naming its table row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overrides: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
}

/// Recursive JSON merge: objects merge key by key, anything else replaces.
pub fn merge_json(base: &mut Value, patch: &Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                merge_json(b.entry(k.clone()).or_insert(Value::Null), v);
            }
        }
        (b, p) => *b = p.clone(),
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Labelled experiment configurations in sweep order.
    pub fn expand(&self) -> Result<Vec<(String, ExperimentConfig)>> {
        let overrides = match &self.overrides {
            Some(o) if o.is_empty() => return Err(Error::Config("sweep has no overrides".into())),
            Some(o) => o.clone(),
            None => vec![Value::Object(Default::default())],
        };
        let mut out = Vec::new();
        for (i, o) in overrides.iter().enumerate() {
            let mut patch = o.clone();
            let label = patch
                .as_object_mut()
                .and_then(|m| m.remove("label"))
                .and_then(|l| l.as_str().map(str::to_string))
                .unwrap_or_else(|| format!("row{i}"));
            let mut merged = self.base.clone();
            merge_json(&mut merged, &patch);
            let cfg: ExperimentConfig =
                serde_json::from_value(merged).map_err(|e| Error::Config(format!("{label}: {e}")))?;
            match &self.seeds {
                Some(seeds) => {
                    for &s in seeds {
                        let mut c = cfg.clone();
                        c.seed = s;
                        out.push((label.clone(), c));
                    }
                }
                None => out.push((label, cfg)),
            }
        }
        Ok(out)
    }
}

/// One line of an error table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: String,
    pub system: String,
    pub component: String,
    pub seed: String,
    pub n: usize,
    pub p: u32,
    pub s: usize,
    pub noise: f64,
    pub block: usize,
    pub bursts: usize,
    pub rows: usize,
    pub cols: usize,
    pub e_c: Option<f64>,
    pub e_c_lbp: Option<f64>,
    pub e_c_ls: Option<f64>,
    pub e_u: Option<f64>,
    pub support_exact: Option<bool>,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub error: String,
}

/// Rows in configuration order followed by per-label means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub rows: Vec<TableRow>,
}

fn noise_level(n: &NoiseSpec) -> f64 {
    match *n {
        NoiseSpec::None => 0.0,
        NoiseSpec::Gaussian { variance, .. } => variance,
        NoiseSpec::Uniform { half_width, .. } => half_width,
    }
}

fn rows_for(label: &str, cfg: &ExperimentConfig, outcome: &Result<ExperimentResult>) -> Vec<TableRow> {
    let resolved = cfg.resolve().ok();
    let blank = |component: &str, error: String| TableRow {
        label: label.to_string(),
        system: cfg.system.name().to_string(),
        component: component.to_string(),
        seed: cfg.seed.to_string(),
        n: cfg.system.n(),
        p: resolved.as_ref().map_or(0, |r| r.degree),
        s: 0,
        noise: resolved.as_ref().map_or(0.0, |r| noise_level(&r.noise)),
        block: resolved.as_ref().map_or(0, |r| r.block),
        bursts: resolved.as_ref().map_or(0, |r| r.bursts),
        rows: 0,
        cols: 0,
        e_c: None,
        e_c_lbp: None,
        e_c_ls: None,
        e_u: None,
        support_exact: None,
        iterations: None,
        converged: None,
        error,
    };
    match outcome {
        Err(e) => vec![blank("*", e.to_string())],
        Ok(r) => r
            .components
            .iter()
            .map(|c| TableRow {
                s: c.exact_support.len(),
                rows: r.dictionary_rows,
                cols: r.dictionary_cols,
                e_c: Some(c.metrics.e_c),
                e_c_lbp: Some(c.e_c_lbp),
                e_c_ls: c.e_c_ls,
                e_u: c.metrics.e_u,
                support_exact: Some(c.metrics.support_exact),
                iterations: Some(c.iterations),
                converged: Some(c.converged),
                ..blank(&c.component, c.e_u_failure.clone().unwrap_or_default())
            })
            .collect(),
    }
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.collect::<Option<Vec<_>>>()?;
    if v.is_empty() {
        None
    } else {
        Some(v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// Runs every configuration (up to `jobs` at a time), recording failures per
/// row. Rows keep configuration order regardless of scheduling.
pub fn run_table(configs: &[(String, ExperimentConfig)], jobs: usize) -> Result<(Table, Vec<Result<ExperimentResult>>)> {
    if configs.is_empty() {
        return Err(Error::Config("empty sweep".into()));
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<ExperimentResult>>>> = configs.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, configs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= configs.len() {
                    break;
                }
                let r = run_experiment(&configs[i].1);
                *slots[i].lock().expect("slot lock") = Some(r);
            });
        }
    });
    let outcomes: Vec<Result<ExperimentResult>> =
        slots.into_iter().map(|m| m.into_inner().expect("slot lock").expect("every row ran")).collect();
    let mut rows = Vec::new();
    for ((label, cfg), out) in configs.iter().zip(&outcomes) {
        rows.extend(rows_for(label, cfg, out));
    }
    let mut groups: Vec<(String, String)> = Vec::new();
    for r in &rows {
        let key = (r.label.clone(), r.component.clone());
        if r.error.is_empty() && !groups.contains(&key) {
            groups.push(key);
        }
    }
    let mut means = Vec::new();
    for (label, comp) in groups {
        let members: Vec<&TableRow> =
            rows.iter().filter(|r| r.label == label && r.component == comp && r.e_c.is_some()).collect();
        if members.len() < 2 {
            continue;
        }
        let first = members[0];
        means.push(TableRow {
            seed: "mean".into(),
            e_c: mean(members.iter().map(|r| r.e_c)),
            e_c_lbp: mean(members.iter().map(|r| r.e_c_lbp)),
            e_c_ls: mean(members.iter().map(|r| r.e_c_ls)),
            e_u: mean(members.iter().map(|r| r.e_u)),
            support_exact: Some(members.iter().all(|r| r.support_exact == Some(true))),
            iterations: None,
            converged: Some(members.iter().all(|r| r.converged == Some(true))),
            ..first.clone()
        });
    }
    rows.extend(means);
    Ok((Table { rows }, outcomes))
}

impl Table {
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}
