//! Haar-random states and the statistics of their stabilizer overlaps.

mod experiment;
mod sample;
mod stats;

pub use experiment::{
    dmin_distribution, CurvePoint, DminExperiment, DminSummary, ExperimentConfig, SampleRecord,
    MAX_EXPERIMENT_QUBITS,
};
pub use sample::{haar_sample, haar_sample_qudit, sample_rng, MAX_HAAR_QUBITS};
pub use stats::{
    dmin_tail_curve, dmin_union_bound, kolmogorov_q, ks_test, ks_two_sample, overlap_cdf, KsResult,
    KS_ALPHA,
};
