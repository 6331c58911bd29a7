//! Random model generation and unpaired data sampling.

mod data;
mod error_spec;
mod generate;

pub use data::{sample_data, DataError, DomainSamples};
pub use error_spec::{appendix_menu, duplicate_menu, ErrorFamily, ErrorSpec, ErrorSpecError};
pub use generate::{
    sample_graph, sample_model, sample_weights, ErrorAssignment, GenConfig, GenError, RANK_TOL,
};
