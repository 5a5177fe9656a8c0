//! Accuracy and confusion counts.

use std::collections::HashMap;

use crate::datamodel::manifest::DatasetManifest;
use crate::datamodel::predictions::{PredictionFile, PredictionRecord};
use crate::datamodel::records::Label;
use crate::error::{Error, Result};
use crate::metrics::auc::auc_roc;

/// Pairs every labeled manifest record with its prediction. Predictions for
/// stimuli outside the manifest are ignored.
pub fn join<'a>(preds: &'a PredictionFile, manifest: &DatasetManifest) -> Result<Vec<(Label, &'a PredictionRecord)>> {
    let mut by_id: HashMap<&str, &PredictionRecord> = HashMap::with_capacity(preds.records.len());
    let wanted: std::collections::HashSet<&str> = manifest.records.iter().map(|r| r.stimulus_id.as_str()).collect();
    for p in &preds.records {
        if wanted.contains(p.stimulus_id.as_str()) && by_id.insert(&p.stimulus_id, p).is_some() {
            return Err(Error::Eval(format!("duplicate prediction for `{}`", p.stimulus_id)));
        }
    }
    manifest
        .records
        .iter()
        .map(|r| {
            let label = r
                .label
                .ok_or_else(|| Error::Eval(format!("stimulus `{}` has no label", r.stimulus_id)))?;
            let p = by_id
                .get(r.stimulus_id.as_str())
                .ok_or_else(|| Error::Eval(format!("no prediction for `{}`", r.stimulus_id)))?;
            Ok((label, *p))
        })
        .collect()
}

/// Counts indexed by (true, predicted).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Confusion {
    pub td_pd: usize,
    pub td_ps: usize,
    pub ts_pd: usize,
    pub ts_ps: usize,
}

impl Confusion {
    pub fn add(&mut self, truth: Label, predicted: Label) {
        match (truth, predicted) {
            (Label::Different, Label::Different) => self.td_pd += 1,
            (Label::Different, Label::Same) => self.td_ps += 1,
            (Label::Same, Label::Different) => self.ts_pd += 1,
            (Label::Same, Label::Same) => self.ts_ps += 1,
        }
    }

    pub fn n(&self) -> usize {
        self.td_pd + self.td_ps + self.ts_pd + self.ts_ps
    }

    pub fn accuracy(&self) -> f64 {
        (self.td_pd + self.ts_ps) as f64 / self.n() as f64
    }

    pub fn true_same(&self) -> usize {
        self.ts_pd + self.ts_ps
    }

    pub fn true_different(&self) -> usize {
        self.td_pd + self.td_ps
    }

    pub fn predicted_same(&self) -> usize {
        self.td_ps + self.ts_ps
    }
}

pub fn confusion(preds: &PredictionFile, manifest: &DatasetManifest) -> Result<Confusion> {
    let mut c = Confusion::default();
    for (truth, p) in join(preds, manifest)? {
        c.add(truth, p.predicted);
    }
    if c.n() == 0 {
        return Err(Error::Eval("no labeled stimuli to evaluate".into()));
    }
    Ok(c)
}

pub fn accuracy(preds: &PredictionFile, manifest: &DatasetManifest) -> Result<f64> {
    Ok(confusion(preds, manifest)?.accuracy())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalResult {
    pub accuracy: f64,
    /// `None` when only one class is present.
    pub auc: Option<f64>,
    pub confusion: Confusion,
    pub n: usize,
}

pub fn evaluate(preds: &PredictionFile, manifest: &DatasetManifest) -> Result<EvalResult> {
    let confusion = confusion(preds, manifest)?;
    let auc = if confusion.true_same() > 0 && confusion.true_different() > 0 {
        Some(auc_roc(preds, manifest)?)
    } else {
        None
    };
    Ok(EvalResult {
        accuracy: confusion.accuracy(),
        auc,
        confusion,
        n: confusion.n(),
    })
}
