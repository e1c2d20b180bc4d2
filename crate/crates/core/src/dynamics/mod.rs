//! Benchmark simulators: Lorenz 96, 2D viscous Burgers and Gray-Scott, a
//! forward Euler integrator, measurement noise and finite-difference
//! velocities.

mod initial;
mod integrate;
mod noise;
mod state;
mod systems;

pub use initial::{burgers_initial, grayscott_initial, in_h_region, uniform_grid, uniform_state};
pub use integrate::{approximate_velocity, integrate, Burst};
pub use noise::{add_noise, rng_from_seed, substream, NoiseSpec, RNG_ALGORITHM};
pub use state::{State, State1D, State2D, TwoComponentState};
pub use systems::{burgers2d_rhs, grayscott_rhs, laplacian9, lorenz96_rhs, GrayScottParams};

use std::io::Write;

use crate::error::Result;
use crate::scalar::Real;

/// Writes a grid as flat row-major CSV, one line per grid row.
pub fn write_grid_csv<T: Real>(grid: &State2D<T>, out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let n = grid.side();
    for row in grid.values().chunks(n) {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a 1D state as a single CSV line.
pub fn write_line_csv<T: Real>(state: &State1D<T>, out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(state.values().iter().map(|v| v.to_string()))?;
    w.flush()?;
    Ok(())
}
