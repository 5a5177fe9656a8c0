//! ROC AUC as the Mann-Whitney statistic with midranks for ties.

use crate::datamodel::manifest::DatasetManifest;
use crate::datamodel::predictions::PredictionFile;
use crate::datamodel::records::Label;
use crate::error::{Error, Result};
use crate::metrics::classification::join;

/// AUC as an exact fraction `(numerator, denominator)`.
///
/// With doubled midranks `r` summed over positives into `R`,
/// `AUC = (R - n1(n1+1)) / (2 n1 n0)`.
pub fn auc_rational(positive: &[f64], negative: &[f64]) -> Result<(u128, u128)> {
    let (n1, n0) = (positive.len() as u128, negative.len() as u128);
    if n1 == 0 || n0 == 0 {
        return Err(Error::Eval("AUC needs both classes".into()));
    }
    if positive.iter().chain(negative).any(|s| !s.is_finite()) {
        return Err(Error::Eval("AUC scores must be finite".into()));
    }
    let mut all: Vec<(f64, bool)> = positive
        .iter()
        .map(|&s| (s, true))
        .chain(negative.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));

    let mut doubled_rank_sum: u128 = 0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j + 1 < all.len() && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        // 1-based positions i+1..=j+1 share the midrank (i+j+2)/2.
        let doubled = (i + j + 2) as u128;
        let positives = all[i..=j].iter().filter(|e| e.1).count() as u128;
        doubled_rank_sum += doubled * positives;
        i = j + 1;
    }
    Ok((doubled_rank_sum - n1 * (n1 + 1), 2 * n1 * n0))
}

pub fn auc_from_scores(positive: &[f64], negative: &[f64]) -> Result<f64> {
    let (num, den) = auc_rational(positive, negative)?;
    Ok(num as f64 / den as f64)
}

/// P(score of a random "same" > score of a random "different"), ties ½.
pub fn auc_roc(preds: &PredictionFile, manifest: &DatasetManifest) -> Result<f64> {
    let joined = join(preds, manifest)?;
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for (label, p) in joined {
        match label {
            Label::Same => pos.push(p.score_same),
            Label::Different => neg.push(p.score_same),
        }
    }
    auc_from_scores(&pos, &neg)
}
