//! Reproducible experiments: configuration, the learning pipeline, error
//! tables and field output.

mod artifacts;
mod config;
mod fields;
mod run;
mod systems;
mod table;

pub use artifacts::{write_dictionaries, write_simulation, DictionaryManifest, SimulationManifest};
pub use config::{default_block_origin, default_sigma, ComparisonSpec, ExperimentConfig, NoiseTarget, Resolved, SystemSpec};
pub use fields::{emit_fields, emit_fields_with, FieldsReport};
pub use run::{aggregate_grayscott, run_experiment, ComponentResult, ExperimentResult, Term};
pub use systems::{exact_coefficients, ExactTerms};
pub use table::{merge_json, run_table, SweepConfig, Table, TableRow};
