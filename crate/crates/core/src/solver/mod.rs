//! Noise-aware ℓ1 basis pursuit via Douglas-Rachford splitting, plus
//! least-squares refits.

mod dr;
mod lsq;
mod prox;
mod support;

pub use dr::{default_gamma, douglas_rachford, douglas_rachford_with, BasisPursuitProblem, Solution, SolverConfig};
pub use lsq::{debias, debias_refit, least_squares_baseline};
pub use prox::{project_ball, prox_f1, prox_f2, soft_threshold, GraphProjector};
pub use support::{largest, select_support, SupportRule, SupportScale};
