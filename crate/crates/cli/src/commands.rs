use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use cyclic_sparse::analysis::{coherence_study, CoherenceReport};
use cyclic_sparse::dictionary::read_matrix_csv;
use cyclic_sparse::experiment::{
    emit_fields, run_experiment, run_table, write_dictionaries, write_simulation, ExperimentConfig, SweepConfig,
};
use cyclic_sparse::solver::{
    debias_refit, douglas_rachford, select_support, BasisPursuitProblem, SolverConfig, SupportRule, SupportScale,
};
use nalgebra::DVector;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::Global;

/// Reads a config file, echoes its bytes into the output directory unchanged
/// and returns the text.
fn load_and_echo(path: &Path, g: &Global) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("config: cannot read {}", path.display()))?;
    fs::create_dir_all(&g.out).with_context(|| format!("output: cannot create {}", g.out.display()))?;
    fs::write(g.out.join("config.json"), &bytes).context("output: cannot echo config")?;
    String::from_utf8(bytes).context("config: not UTF-8")
}

fn experiment_config(path: &Path, g: &Global) -> Result<ExperimentConfig> {
    let text = load_and_echo(path, g)?;
    let mut cfg = ExperimentConfig::from_json(&text).context("config")?;
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    if let Some(d) = g.debias_override() {
        cfg.debias = Some(d);
    }
    Ok(cfg)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).context("output: serialization")?;
    fs::write(path, text + "\n").with_context(|| format!("output: cannot write {}", path.display()))
}

pub fn simulate(config: &Path, g: &Global) -> Result<()> {
    let cfg = experiment_config(config, g)?;
    let manifest = write_simulation(&cfg, &g.out)?;
    write_json(&g.out.join("simulation.json"), &manifest)?;
    println!("wrote {} bursts to {}", manifest.snapshots.len(), g.out.display());
    Ok(())
}

pub fn build_dict(config: &Path, g: &Global) -> Result<()> {
    let cfg = experiment_config(config, g)?;
    let manifest = write_dictionaries(&cfg, &g.out)?;
    write_json(&g.out.join("dictionary.json"), &manifest)?;
    println!("dictionary {} x {} written to {}", manifest.rows, manifest.cols, g.out.display());
    Ok(())
}

/// Input of `solve`. Relative paths are taken from the config file's directory.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveConfig {
    /// Headed CSV of dictionary columns; a trailing `V` column is used as the
    /// target when `velocity` is absent.
    dictionary: PathBuf,
    /// Headed CSV with one column per component.
    #[serde(default)]
    velocity: Option<PathBuf>,
    /// Which velocity column to fit; the first when omitted.
    #[serde(default)]
    component: Option<String>,
    sigma: f64,
    #[serde(default)]
    solver: SolverConfig,
    #[serde(default)]
    support: SupportRule,
    #[serde(default)]
    debias: bool,
}

pub fn solve(config: &Path, g: &Global) -> Result<()> {
    let text = load_and_echo(config, g)?;
    let sc: SolveConfig = serde_json::from_str(&text).context("config")?;
    let base = config.parent().unwrap_or(Path::new("."));
    let resolve = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base.join(p) };

    let dict_path = resolve(&sc.dictionary);
    let file = fs::File::open(&dict_path).with_context(|| format!("dictionary: cannot open {}", dict_path.display()))?;
    let (mut labels, mut a) = read_matrix_csv(file).context("dictionary")?;
    let v: Vec<f64> = match &sc.velocity {
        Some(p) => {
            let p = resolve(p);
            let file = fs::File::open(&p).with_context(|| format!("velocity: cannot open {}", p.display()))?;
            let (names, m) = read_matrix_csv(file).context("velocity")?;
            let col = match &sc.component {
                Some(c) => names.iter().position(|n| n == c).with_context(|| format!("velocity: no column `{c}`"))?,
                None => 0,
            };
            if m.ncols() == 0 {
                bail!("velocity: file has no columns");
            }
            m.column(col).iter().copied().collect()
        }
        None => {
            if labels.last().map(String::as_str) != Some("V") {
                bail!("velocity: no `velocity` file given and the dictionary has no trailing V column");
            }
            let last = a.ncols() - 1;
            let v = a.column(last).iter().copied().collect();
            a = a.remove_column(last);
            labels.pop();
            v
        }
    };
    let problem = BasisPursuitProblem::new(a.clone(), DVector::from_vec(v.clone()), sc.sigma).context("solve")?;
    let sol = douglas_rachford(&problem, &sc.solver).context("solve")?;

    let norms: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
    let scale = Some(SupportScale { column_norms: &norms, sigma: sc.sigma });
    let debias = g.debias_override().unwrap_or(sc.debias);
    let (coefficients, support) = if debias {
        debias_refit(&a, &v, &sol.c, sc.support, scale, Some(&labels)).context("debias")?
    } else {
        (sol.c.clone(), select_support(&sol.c, sc.support, scale))
    };
    let mut out = sol.to_json(&labels, &sc.solver);
    out["support"] = json!(support.iter().map(|&j| labels[j].as_str()).collect::<Vec<_>>());
    out["debiased"] = json!(debias);
    if debias {
        out["coefficients"] = json!(support
            .iter()
            .map(|&j| (labels[j].clone(), json!(coefficients[j])))
            .collect::<serde_json::Map<String, Value>>());
    }
    write_json(&g.out.join("solution.json"), &out)?;
    println!(
        "{} terms, residual {:.6e} (sigma {:.6e}), {} iterations, converged: {}",
        support.len(),
        sol.residual,
        sc.sigma,
        sol.iterations,
        sol.converged
    );
    Ok(())
}

pub fn experiment(config: &Path, fields: Option<&[f64]>, fields_dt: Option<f64>, g: &Global) -> Result<()> {
    let cfg = experiment_config(config, g)?;
    let result = run_experiment(&cfg)?;
    fs::write(g.out.join("result.json"), result.to_json() + "\n").context("output: cannot write result.json")?;
    for c in &result.components {
        let e_u = c.metrics.e_u.map_or_else(|| "-".to_string(), |e| format!("{e:.4e}"));
        println!(
            "{}: E_c {:.4e} (before debias {:.4e}), E_u {}, support exact: {}, {} terms, converged: {}",
            c.component,
            c.metrics.e_c,
            c.e_c_lbp,
            e_u,
            c.metrics.support_exact,
            c.support.len(),
            c.converged
        );
    }
    if let Some(p) = &result.learned_parameters {
        println!("learned r_u {:.6} r_v {:.6} f {:.6} k {:.6}", p.r_u, p.r_v, p.f, p.k);
    }
    if let Some(times) = fields {
        let report = emit_fields(&result, times, fields_dt, &g.out.join("fields")).context("fields")?;
        write_json(&g.out.join("fields.json"), &report)?;
        if let Some(t) = report.learned_diverged_at {
            eprintln!("warning: learned system diverged at t = {t}; later learned fields omitted");
        }
    }
    Ok(())
}

pub fn table(config: &Path, g: &Global) -> Result<()> {
    if g.jobs == 0 {
        bail!("config: --jobs must be at least 1");
    }
    let text = load_and_echo(config, g)?;
    let mut sweep = SweepConfig::from_json(&text).context("config")?;
    if let Some(seed) = g.seed {
        sweep.base["seed"] = json!(seed);
        sweep.seeds = None;
    }
    if let Some(d) = g.debias_override() {
        sweep.base["debias"] = json!(d);
    }
    let configs = sweep.expand().context("config")?;
    let (table, results) = run_table(&configs, g.jobs)?;
    let results_dir = g.out.join("results");
    fs::create_dir_all(&results_dir).context("output: cannot create results directory")?;
    let mut failures = 0;
    for (i, ((label, _), r)) in configs.iter().zip(&results).enumerate() {
        let stem = format!("{i:03}_{}", sanitize(label));
        match r {
            Ok(res) => fs::write(results_dir.join(format!("{stem}.json")), res.to_json() + "\n")
                .context("output: cannot write row result")?,
            Err(e) => {
                failures += 1;
                eprintln!("row {i} ({label}) failed: {e}");
            }
        }
    }
    let file = fs::File::create(g.out.join("table.csv")).context("output: cannot create table.csv")?;
    table.write_csv(std::io::BufWriter::new(file))?;
    println!("{} rows ({} failed) written to {}", configs.len(), failures, g.out.join("table.csv").display());
    Ok(())
}

fn sanitize(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' }).collect()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoherenceConfig {
    cases: Vec<(usize, u32)>,
    #[serde(default = "default_trials")]
    trials: usize,
    #[serde(default)]
    seed: u64,
}

fn default_trials() -> usize {
    200
}

pub fn coherence(config: Option<&Path>, case: Option<(usize, u32)>, trials: usize, g: &Global) -> Result<()> {
    let cc = match (config, case) {
        (Some(path), _) => serde_json::from_str::<CoherenceConfig>(&load_and_echo(path, g)?).context("config")?,
        (None, Some(case)) => CoherenceConfig { cases: vec![case], trials, seed: 0 },
        (None, None) => bail!("config: give --config or both --n and --p"),
    };
    let seed = g.seed.unwrap_or(cc.seed);
    fs::create_dir_all(&g.out).with_context(|| format!("output: cannot create {}", g.out.display()))?;
    let reports: Vec<CoherenceReport> = cc
        .cases
        .iter()
        .map(|&(n, p)| coherence_study(n, p, seed, cc.trials).with_context(|| format!("coherence (n = {n}, p = {p})")))
        .collect::<Result<_>>()?;
    for r in &reports {
        println!(
            "n {} p {}: max |<A_j,A_k>| {:.3} and max |‖A_j‖²−n| {:.3} vs bound {:.3}; {} of {} trials violate; mean ‖A_j‖² {:.3} ± {:.3}",
            r.n, r.p, r.max_offdiag_inner, r.max_norm_deviation, r.bound, r.violations, r.trials, r.mean_norm_sq, r.norm_sq_std_err
        );
    }
    write_json(&g.out.join("coherence.json"), &reports)
}
