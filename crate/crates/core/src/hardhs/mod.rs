//! The random hard halfspace: residue-class partitions of the cube and their
//! spectra, moment-matched distributions on the classes, the reduction to
//! a univariate problem, and end-to-end reports.
//!
//! Cube points are bitmasks with bit `i` holding coordinate `i + 1`.

mod moments;
mod partition;
mod reduce;
mod report;
mod zerocorr;

pub use moments::{build_moment_matched, low_order_family, ClassDistribution, MomentMatchedFamily};
pub use partition::{
    build_partition, class_sizes_match_spectrum, partition_from_sets, partition_is_valid, sample_weights,
    verify_spectrum_bounds, ClassDeviation, ResidueClassPartition, SpectrumReport, WeightVector, MAX_PARTITION_DIM,
    MAX_PARTITION_K, MAX_WEIGHT_K,
};
pub use reduce::{
    canonical_form, class_expectation, linear_form, reduction_consistency, reduction_range, residue_of,
    univariate_reduce, ReductionCheck,
};
pub use report::{
    build_hard_halfspace, hard_function_symmetrized, hard_halfspace, hardness_report, random_reduction_polynomial,
    BracketComparison, ConverseRow, HardnessReport, HardnessRun, ReportParams, StageOutcome, MAX_REPORT_DIM,
};
pub use zerocorr::{check_zero_correlation, zero_correlation_distribution, Hypothesis, ZeroCorrelationCertificate};

use crate::exactlp::Rational;
use crate::rapprox::RapproxError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HardError {
    #[error("size limit: {0}")]
    TooLarge(String),
    #[error("residue class {s} is empty")]
    EmptyClass { s: u64 },
    #[error("hypothesis violated ({hypothesis}{}) by {margin}", class.map(|s| format!(", class {s}")).unwrap_or_default())]
    HypothesisViolated {
        class: Option<u64>,
        hypothesis: Hypothesis,
        margin: Rational,
    },
    #[error("degree {degree} exceeds the matching cutoff {cutoff}")]
    DegreeExceedsCutoff { degree: u32, cutoff: u32 },
    #[error("reduced polynomial disagrees with the class expectation at s = {s}")]
    ReductionMismatch { s: i64 },
    #[error("check failed: {0}")]
    Certificate(String),
    #[error("{0}")]
    Malformed(String),
    #[error(transparent)]
    Rapprox(#[from] RapproxError),
}
