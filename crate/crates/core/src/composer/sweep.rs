//! Dataset-size / object-diversity grids.

use crate::composer::config::{GenerationConfig, SplitSizes};
use crate::composer::dataset::{build_dataset, Dataset};
use crate::composer::domain;
use crate::error::{Error, Result};
use crate::rng::{derive_stream, stream_index};

pub struct SweepCell {
    pub unique_objects: usize,
    pub stimuli: usize,
    pub dataset: Dataset,
}

/// Per-cell configs, row-major over `(unique_objects, stimuli)`. Cell `(u, s)`
/// trains on `u` objects and `s` stimuli; validation and test splits keep the
/// base sizes. Each cell gets its own seed derived from `root_seed`.
pub fn sweep_configs(
    base: &GenerationConfig,
    unique_object_counts: &[usize],
    stimulus_counts: &[usize],
    root_seed: u64,
) -> Result<Vec<(usize, usize, GenerationConfig)>> {
    if unique_object_counts.is_empty() || stimulus_counts.is_empty() {
        return Err(Error::InvalidConfig("sweep axes must be non-empty".into()));
    }
    if let Some(u) = unique_object_counts.iter().find(|&&u| u < 2) {
        return Err(Error::InvalidConfig(format!("sweep cell needs at least 2 unique objects, got {u}")));
    }
    let mut cells = Vec::new();
    for &u in unique_object_counts {
        for &s in stimulus_counts {
            let cell = cells.len() as u64;
            let split_sizes = SplitSizes {
                train: u,
                ..base.split_sizes
            };
            let config = GenerationConfig {
                dataset_id: format!("{}-u{u}-s{s}", base.dataset_id),
                root_seed: derive_stream(root_seed, stream_index(domain::SWEEP, cell)).next_u64(),
                object_count: split_sizes.total(),
                split_sizes,
                train_stimuli: Some(s),
                ..base.clone()
            };
            config.validate()?;
            cells.push((u, s, config));
        }
    }
    Ok(cells)
}

pub fn build_sweep(
    base: &GenerationConfig,
    unique_object_counts: &[usize],
    stimulus_counts: &[usize],
    root_seed: u64,
) -> Result<Vec<SweepCell>> {
    sweep_configs(base, unique_object_counts, stimulus_counts, root_seed)?
        .into_iter()
        .map(|(u, s, config)| {
            Ok(SweepCell {
                unique_objects: u,
                stimuli: s,
                dataset: build_dataset(&config, config.root_seed)?,
            })
        })
        .collect()
}
