//! Embedding-space analyses: pairwise cosine similarity, the inter-object
//! similarity threshold predictor and a logistic-regression probe.

pub mod probe;
pub mod similarity;
pub mod threshold;

pub use probe::{loss_and_gradient, probe_predict, train_probe, ProbeHyper, ProbeModel, TrainingMeta};
pub use similarity::{
    cosine, naive_pairwise_summary, pairwise_summary, pairwise_summary_with, Histogram, SimilaritySummary,
    DEFAULT_BINS,
};
pub use threshold::{threshold_predict, Expectation};
