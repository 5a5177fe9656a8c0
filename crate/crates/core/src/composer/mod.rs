//! Stimulus composition: splits, pair selection, placement and dataset families.

pub mod config;
pub mod dataset;
pub mod dissociation;
pub mod pairs;
pub mod placement;
pub mod single;
pub mod splits;
pub mod sweep;
pub mod variant;

pub use config::{
    DissociationSpec, GenerationConfig, ObjectSourceConfig, PlacementMode, SplitSizes, VariantKind,
};
pub use dataset::{build_dataset, compose_stimulus, generate_objects, Dataset, ObjectSet};
pub use dissociation::build_dissociation_sets;
pub use pairs::{select_pairs, SelectedPair};
pub use placement::{aligned_slots, is_aligned, place_pair};
pub use single::build_single_object_set;
pub use splits::build_splits;
pub use sweep::{build_sweep, sweep_configs, SweepCell};
pub use variant::{base_object_id, build_variant, MIRROR_SUFFIX};

/// Stream domains. Every random decision draws from
/// `derive_stream(root_seed, stream_index(domain, item))`.
pub mod domain {
    pub const OBJECT: u16 = 1;
    pub const OBJECT_RETRY: u16 = 2;
    pub const OBJECT_PICK: u16 = 3;
    pub const SPLIT: u16 = 4;
    pub const PAIRS: u16 = 5;
    pub const ORDER: u16 = 6;
    pub const PLACEMENT: u16 = 7;
    pub const DISSOCIATION: u16 = 8;
    pub const SINGLE: u16 = 9;
    pub const SWEEP: u16 = 10;
}
