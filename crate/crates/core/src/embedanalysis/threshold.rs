//! Predicting generalization failure from mean inter-object similarity.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    ExpectedOk,
    ExpectedFail,
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expectation::ExpectedOk => "expected_ok",
            Expectation::ExpectedFail => "expected_fail",
        })
    }
}

/// Datasets whose mean similarity exceeds `reference_mean + margin` are
/// expected to have their "different" stimuli collapse into "same".
pub fn threshold_predict(
    reference_mean: f64,
    dataset_means: &BTreeMap<String, f64>,
    margin: f64,
) -> BTreeMap<String, Expectation> {
    dataset_means
        .iter()
        .map(|(name, &mean)| {
            let e = if mean > reference_mean + margin {
                Expectation::ExpectedFail
            } else {
                Expectation::ExpectedOk
            };
            (name.clone(), e)
        })
        .collect()
}
