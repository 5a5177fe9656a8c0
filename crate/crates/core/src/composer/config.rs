use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::datamodel::records::Split;
use crate::error::{Error, Result};
use crate::objectgen::{CatalogSpec, NoiseSpec, SquiggleSpec};
use crate::raster::{CANVAS_SIZE, OBJECT_SIZE};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObjectSourceConfig {
    Squiggle {
        #[serde(default)]
        spec: SquiggleSpec,
    },
    Factorized {
        #[serde(default)]
        catalog: CatalogSpec,
    },
    Noise {
        #[serde(default)]
        spec: NoiseSpec,
    },
    Imported {
        directory: PathBuf,
    },
}

impl Default for ObjectSourceConfig {
    fn default() -> Self {
        ObjectSourceConfig::Squiggle {
            spec: SquiggleSpec::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementMode {
    #[default]
    Free,
    Aligned,
}

/// Which dataset family a config builds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantKind {
    #[default]
    Base,
    Grayscale,
    Masked,
    Flipped,
    Aligned,
    Dissociation,
    SingleObject,
}

impl std::str::FromStr for VariantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::InvalidConfig(format!("unknown variant `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSizes {
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

impl Default for SplitSizes {
    fn default() -> Self {
        Self {
            train: 1200,
            val: 300,
            test: 100,
        }
    }
}

impl SplitSizes {
    pub fn get(&self, split: Split) -> usize {
        match split {
            Split::Train => self.train,
            Split::Val => self.val,
            Split::Test => self.test,
        }
    }

    pub fn total(&self) -> usize {
        self.train + self.val + self.test
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct DissociationSpec {
    pub unique_objects: usize,
    pub stimuli: usize,
}

impl Default for DissociationSpec {
    fn default() -> Self {
        Self {
            unique_objects: 300,
            stimuli: 6400,
        }
    }
}

/// Full parameter set for one generated dataset. Mirrors the JSON config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationConfig {
    pub dataset_id: String,
    pub root_seed: u64,
    pub source: ObjectSourceConfig,
    pub object_count: usize,
    pub split_sizes: SplitSizes,
    /// Stimuli per split; half "same", half "different".
    pub stimuli_per_split: usize,
    /// Overrides `stimuli_per_split` for the training split.
    pub train_stimuli: Option<usize>,
    /// Placements given to each selected pair. `None` selects one pair per
    /// stimulus, so pairs repeat only when the quota exceeds what the split
    /// can offer.
    pub placements_per_pair: Option<usize>,
    pub placement_mode: PlacementMode,
    pub variant: VariantKind,
    pub canvas_size: u32,
    pub object_size: u32,
    pub single_object_count: usize,
    pub dissociation: DissociationSpec,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        Self {
            dataset_id: "squ".into(),
            root_seed: 0,
            source: ObjectSourceConfig::default(),
            object_count: 1600,
            split_sizes: SplitSizes::default(),
            stimuli_per_split: 6400,
            train_stimuli: None,
            placements_per_pair: None,
            placement_mode: PlacementMode::Free,
            variant: VariantKind::Base,
            canvas_size: CANVAS_SIZE,
            object_size: OBJECT_SIZE,
            single_object_count: 1000,
            dissociation: DissociationSpec::default(),
        }
    }
}

impl GenerationConfig {
    pub fn stimuli_for(&self, split: Split) -> usize {
        match split {
            Split::Train => self.train_stimuli.unwrap_or(self.stimuli_per_split),
            _ => self.stimuli_per_split,
        }
    }

    pub fn effective_placement(&self) -> PlacementMode {
        if self.variant == VariantKind::Aligned {
            PlacementMode::Aligned
        } else {
            self.placement_mode
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.canvas_size != CANVAS_SIZE || self.object_size != OBJECT_SIZE {
            return bad(format!(
                "canvas/object size must be {CANVAS_SIZE}/{OBJECT_SIZE}, got {}/{}",
                self.canvas_size, self.object_size
            ));
        }
        if self.variant != VariantKind::Dissociation && self.variant != VariantKind::SingleObject {
            if self.split_sizes.total() > self.object_count {
                return bad(format!(
                    "split sizes sum to {} but only {} objects are generated",
                    self.split_sizes.total(),
                    self.object_count
                ));
            }
            for split in Split::ALL {
                if self.stimuli_for(split) % 2 != 0 {
                    return bad(format!("{} stimulus count must be even", split.as_str()));
                }
            }
        }
        if self.placements_per_pair == Some(0) {
            return bad("placements_per_pair must be positive".into());
        }
        match &self.source {
            ObjectSourceConfig::Squiggle { spec } => spec.validate()?,
            ObjectSourceConfig::Noise { spec } => spec.validate()?,
            ObjectSourceConfig::Factorized { .. } | ObjectSourceConfig::Imported { .. } => {}
        }
        if self.variant == VariantKind::Dissociation && !matches!(self.source, ObjectSourceConfig::Factorized { .. }) {
            return bad("dissociation sets need a factorized object source".into());
        }
        Ok(())
    }
}
