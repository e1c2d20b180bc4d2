//! Cyclic data matrices, candidate-function dictionaries and basis changes.

mod data;
mod matrix;
mod model;
mod multi_index;
pub mod polynomial;

pub use data::{
    cyclic_data_1d, cyclic_data_2d, fit_scaling, fit_scaling_all, local_data_1d, local_data_2d, local_data_multi,
    localize_restrict, multicomponent_data, window_offsets, Block, CyclicDataMatrix, Domain, ScalingTransform, Site,
};
pub use matrix::{
    legendre_dictionary, legendre_dictionary_with_cap, legendre_to_monomial, monomial_dictionary,
    monomial_dictionary_with_cap, normalize_columns, read_matrix_csv, stack_bursts, write_dictionary_csv, Basis, CoefficientVector,
    DictionaryMatrix,
};
pub use model::{CompiledModel, PolynomialModel};
pub use multi_index::{
    binomial, column_count, graded_multi_indices, LocalVar, MultiIndex, Offset, COMPONENT_NAMES, DEFAULT_COLUMN_CAP,
};
