//! Mean "same" logit by ground-truth class.

use crate::datamodel::manifest::DatasetManifest;
use crate::datamodel::predictions::PredictionFile;
use crate::datamodel::records::Label;
use crate::error::{Error, Result};
use crate::metrics::classification::join;
use crate::metrics::report::Table;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogitSummary {
    /// Percent of all stimuli predicted "same".
    pub percent_predicted_same: f64,
    pub gt_same_logit: f64,
    pub gt_diff_logit: f64,
    pub n: usize,
}

pub fn mean_logit_by_class(preds: &PredictionFile, manifest: &DatasetManifest) -> Result<LogitSummary> {
    let joined = join(preds, manifest)?;
    let (mut same, mut diff) = (Vec::new(), Vec::new());
    let mut predicted_same = 0;
    for (truth, p) in &joined {
        let logit = p
            .logit_same
            .ok_or_else(|| Error::Eval(format!("`{}` has no logits", p.stimulus_id)))?;
        match truth {
            Label::Same => same.push(logit),
            Label::Different => diff.push(logit),
        }
        if p.predicted == Label::Same {
            predicted_same += 1;
        }
    }
    if same.is_empty() || diff.is_empty() {
        return Err(Error::Eval("mean logits need both classes".into()));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok(LogitSummary {
        percent_predicted_same: 100.0 * predicted_same as f64 / joined.len() as f64,
        gt_same_logit: mean(&same),
        gt_diff_logit: mean(&diff),
        n: joined.len(),
    })
}

/// One row per dataset: percent predicted "same", then the mean "same" logit
/// for ground-truth same and different stimuli.
pub fn logit_table(rows: &[(String, LogitSummary)]) -> Table {
    Table::new(
        ["dataset", "% pred. same", "GT same logit", "GT diff logit"].map(String::from).to_vec(),
        rows.iter()
            .map(|(name, s)| {
                vec![
                    name.clone(),
                    format!("{:.2}", s.percent_predicted_same),
                    format!("{:.2}", s.gt_same_logit),
                    format!("{:.2}", s.gt_diff_logit),
                ]
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::predictions::{PredictionRecord, LOGIT_THRESHOLD};
    use crate::datamodel::records::Label::{Different as D, Same as S};
    use crate::metrics::classification::tests::{manifest, preds};

    fn logit_preds(pairs: &[(f64, f64)]) -> PredictionFile {
        let records = pairs
            .iter()
            .enumerate()
            .map(|(i, &(ls, ld))| PredictionRecord::from_logits(format!("s{i}"), ls, ld, "m", 0))
            .collect();
        PredictionFile::new(LOGIT_THRESHOLD, records).unwrap()
    }

    #[test]
    fn class_means() {
        let m = manifest(&[S, S, D, D]);
        let s = mean_logit_by_class(&logit_preds(&[(2.0, 0.0), (2.0, 0.0), (1.0, 0.0), (1.0, 3.0)]), &m).unwrap();
        assert_eq!((s.gt_same_logit, s.gt_diff_logit), (2.0, 1.0));
        assert_eq!(s.percent_predicted_same, 75.0);
        let c = mean_logit_by_class(&logit_preds(&[(0.3, 0.0); 4]), &m).unwrap();
        assert_eq!(c.gt_same_logit, c.gt_diff_logit);
    }

    #[test]
    fn needs_logits() {
        assert!(mean_logit_by_class(&preds(&[0.9, 0.1]), &manifest(&[S, D])).is_err());
    }

    #[test]
    fn table_columns() {
        let s = LogitSummary {
            percent_predicted_same: 99.97,
            gt_same_logit: 3.82,
            gt_diff_logit: 3.45,
            n: 4,
        };
        let t = logit_table(&[("Rectangles".into(), s)]);
        assert_eq!(t.rows[0], ["Rectangles", "99.97", "3.82", "3.45"]);
        assert_eq!(t.header.len(), 4);
    }
}
