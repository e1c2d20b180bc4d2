//! Intermediate products of the pipeline written to disk: raw bursts and the
//! assembled dictionaries.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Resolved};
use super::fields::write;
use super::run::{assemble, simulate_bursts};
use super::systems::{with_benchmark, Benchmark, BenchmarkVisitor};
use crate::dictionary::{write_dictionary_csv, ScalingTransform, COMPONENT_NAMES};
use crate::dynamics::{approximate_velocity, RNG_ALGORITHM};
use crate::error::Result;

/// Index of what [`write_simulation`] produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationManifest {
    pub system: String,
    pub rng: String,
    pub record_times: Vec<f64>,
    /// `snapshots[k][i]` lists the files of burst `k` at record time `i`, one per component.
    pub snapshots: Vec<Vec<Vec<PathBuf>>>,
    /// `velocities[k][i]` lists the forward differences between times `i` and `i + 1`.
    pub velocities: Vec<Vec<Vec<PathBuf>>>,
}

/// Index of what [`write_dictionaries`] produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DictionaryManifest {
    pub rows: usize,
    pub cols: usize,
    pub scaling: ScalingTransform<f64>,
    pub column_norms: Vec<f64>,
    pub legendre: PathBuf,
    pub monomial: PathBuf,
    pub velocity: PathBuf,
}

/// Simulates every burst of `config` and writes the clean snapshots and
/// their forward-difference velocities as CSV. Measurement noise is not
/// applied here; it enters when the dictionary is assembled.
pub fn write_simulation(config: &ExperimentConfig, dir: &Path) -> Result<SimulationManifest> {
    let cfg = config.resolve()?;
    std::fs::create_dir_all(dir)?;
    with_benchmark(&cfg.system, Simulate { cfg: &cfg, dir })
}

struct Simulate<'a> {
    cfg: &'a Resolved,
    dir: &'a Path,
}

impl BenchmarkVisitor for Simulate<'_> {
    type Output = Result<SimulationManifest>;

    fn visit<B: Benchmark + Sync>(self, b: &B) -> Result<SimulationManifest> {
        let bursts = simulate_bursts(b, self.cfg).map_err(|e| e.at("simulate"))?;
        let mut snapshots = Vec::with_capacity(bursts.len());
        let mut velocities = Vec::with_capacity(bursts.len());
        for burst in &bursts {
            let k = burst.burst_id;
            let mut files = Vec::new();
            for (i, s) in burst.snapshots.iter().enumerate() {
                let per: Result<Vec<PathBuf>> = (0..b.components())
                    .map(|c| write(b, &b.component(s, c), self.dir, &format!("burst{k}_{}_t{i}.csv", COMPONENT_NAMES[c])))
                    .collect();
                files.push(per?);
            }
            snapshots.push(files);
            let vel = approximate_velocity(burst).map_err(|e| e.at("velocity"))?;
            let mut files = Vec::new();
            for (i, s) in vel.iter().enumerate() {
                let per: Result<Vec<PathBuf>> = (0..b.components())
                    .map(|c| {
                        write(b, &b.component(s, c), self.dir, &format!("burst{k}_{}_velocity{i}.csv", COMPONENT_NAMES[c]))
                    })
                    .collect();
                files.push(per?);
            }
            velocities.push(files);
        }
        Ok(SimulationManifest {
            system: self.cfg.system.name().to_string(),
            rng: RNG_ALGORITHM.to_string(),
            record_times: self.cfg.record_times.clone(),
            snapshots,
            velocities,
        })
    }
}

/// Assembles the normalized Legendre and the monomial dictionaries of
/// `config` and writes them, with the velocity targets, as CSV.
pub fn write_dictionaries(config: &ExperimentConfig, dir: &Path) -> Result<DictionaryManifest> {
    let cfg = config.resolve()?;
    std::fs::create_dir_all(dir)?;
    with_benchmark(&cfg.system, Dictionaries { cfg: &cfg, dir })
}

struct Dictionaries<'a> {
    cfg: &'a Resolved,
    dir: &'a Path,
}

impl BenchmarkVisitor for Dictionaries<'_> {
    type Output = Result<DictionaryManifest>;

    fn visit<B: Benchmark + Sync>(self, b: &B) -> Result<DictionaryManifest> {
        let asm = assemble(b, self.cfg)?;
        let legendre = self.dir.join("dictionary_legendre.csv");
        write_dictionary_csv(&asm.legendre, None, BufWriter::new(File::create(&legendre)?))?;
        let monomial = self.dir.join("dictionary_monomial.csv");
        write_dictionary_csv(&asm.monomial, None, BufWriter::new(File::create(&monomial)?))?;
        let velocity = self.dir.join("velocity.csv");
        let mut w = csv::Writer::from_writer(BufWriter::new(File::create(&velocity)?));
        w.write_record(&COMPONENT_NAMES[..b.components()])?;
        for r in 0..asm.legendre.nrows() {
            w.write_record(asm.velocities.iter().map(|v| v[r].to_string()))?;
        }
        w.flush()?;
        Ok(DictionaryManifest {
            rows: asm.legendre.nrows(),
            cols: asm.legendre.ncols(),
            scaling: asm.legendre.scaling.expect("Legendre dictionaries carry their scaling"),
            column_norms: asm.legendre.column_norms.clone().expect("normalized dictionaries carry their norms"),
            legendre,
            monomial,
            velocity,
        })
    }
}
