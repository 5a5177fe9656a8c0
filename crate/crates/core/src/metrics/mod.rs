//! Evaluation statistics over prediction files joined against manifests.

pub mod aggregate;
pub mod auc;
pub mod classification;
pub mod dissociation;
pub mod logits;
pub mod report;

pub use aggregate::{generalization_matrix, median_over_seeds, GeneralizationMatrix};
pub use auc::{auc_from_scores, auc_rational, auc_roc};
pub use classification::{accuracy, confusion, evaluate, join, Confusion, EvalResult};
pub use dissociation::{pixel_equality_predictions, proportion_same, proportion_table};
pub use logits::{logit_table, mean_logit_by_class, LogitSummary};
pub use report::{ReportFormat, Table};
