//! Cross-domain matching of estimated source distributions and assembly of
//! the joint mixing estimate.

mod assemble;
mod kolmogorov;
mod ks;

pub use assemble::{
    assemble_joint, discover_shared, match_domains, Correction, MatchDecision, MatchingError,
    SharedAssembly, SharedTuple,
};
pub use kolmogorov::{
    bonferroni_level, false_discovery_bound, kolmogorov_cdf, kolmogorov_critical, total_tests,
    CriticalError,
};
pub use ks::{ks_distance, ks_statistic, statistic_between, KsError, SourceDist};
