//! Proportion of "same" predictions per dissociation condition.

use image::RgbImage;

use crate::datamodel::manifest::DatasetManifest;
use crate::datamodel::predictions::{PredictionFile, PredictionRecord, PROBABILITY_THRESHOLD};
use crate::datamodel::records::{DissociationCondition, Label};
use crate::error::{Error, Result};
use crate::metrics::classification::join;
use crate::metrics::report::Table;
use crate::raster::{crop, OBJECT_SIZE};

/// Fraction of "same" predictions for each of the eight conditions, in
/// [`DissociationCondition::all`] order.
pub fn proportion_same(
    preds: &PredictionFile,
    manifests: &[(DissociationCondition, &DatasetManifest)],
) -> Result<Vec<(DissociationCondition, f64)>> {
    DissociationCondition::all()
        .into_iter()
        .map(|cond| {
            let (_, manifest) = manifests
                .iter()
                .find(|(c, _)| *c == cond)
                .ok_or_else(|| Error::Eval(format!("missing dissociation set {cond}")))?;
            let joined = join(preds, manifest)?;
            if joined.is_empty() {
                return Err(Error::Eval(format!("dissociation set {cond} is empty")));
            }
            let same = joined.iter().filter(|(_, p)| p.predicted == Label::Same).count();
            Ok((cond, same as f64 / joined.len() as f64))
        })
        .collect()
}

/// One row per model, an optional accuracy column, then the
/// eight conditions.
pub fn proportion_table(rows: &[(String, Option<f64>, Vec<(DissociationCondition, f64)>)]) -> Table {
    let mut header = vec!["model".to_string(), "acc.".to_string()];
    header.extend(DissociationCondition::all().iter().map(|c| c.name()));
    let body = rows
        .iter()
        .map(|(name, acc, props)| {
            let mut row = vec![name.clone(), acc.map(|a| format!("{a:.2}")).unwrap_or_default()];
            row.extend(props.iter().map(|(_, p)| format!("{p:.2}")));
            row
        })
        .collect();
    Table::new(header, body)
}

/// Predictions of an observer that answers "same" iff the two object regions
/// of the rendered stimulus are pixel-identical.
pub fn pixel_equality_predictions(
    manifest: &DatasetManifest,
    render: impl Fn(&crate::datamodel::records::StimulusRecord) -> Result<RgbImage>,
    model_id: &str,
) -> Result<PredictionFile> {
    let records = manifest
        .records
        .iter()
        .map(|r| {
            let img = render(r)?;
            let pos_b = r
                .pos_b
                .ok_or_else(|| Error::Eval(format!("`{}` has one object", r.stimulus_id)))?;
            let a = crop(&img, r.pos_a.x, r.pos_a.y, OBJECT_SIZE, OBJECT_SIZE);
            let b = crop(&img, pos_b.x, pos_b.y, OBJECT_SIZE, OBJECT_SIZE);
            let score = if a == b { 1.0 } else { 0.0 };
            Ok(PredictionRecord::from_score(&r.stimulus_id, score, PROBABILITY_THRESHOLD, model_id, 0))
        })
        .collect::<Result<Vec<_>>>()?;
    PredictionFile::new(PROBABILITY_THRESHOLD, records)
}
