//! Records, manifests and the file formats shared with model adapters.

pub mod embeddings;
pub mod labels;
pub mod manifest;
pub mod objects;
pub mod predictions;
pub mod records;
pub mod validate;

pub use embeddings::EmbeddingMatrix;
pub use manifest::{DatasetManifest, MANIFEST_FORMAT_VERSION};
pub use objects::{read_object_index, write_object_index, ObjectIndexEntry};
pub use predictions::{decide, PredictionFile, PredictionRecord, LOGIT_THRESHOLD, PROBABILITY_THRESHOLD};
pub use records::{
    boxes_overlap, DissociationCondition, Label, ObjectSplits, Position, Split, StimulusRecord, Variant,
};
pub use validate::{validate_dataset, ValidationReport, Violation};
pub use labels::{read_labels_file, write_labels_file, LabelRow};
