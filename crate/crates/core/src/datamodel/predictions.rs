//! Per-stimulus model outputs as CSV.
//!
//! ```text
//! # threshold=0
//! stimulus_id,score_same,logit_same,logit_diff,predicted,model_id,seed_id
//! train-00000,1.25,2.5,1.25,same,clip-vit-squ,0
//! ```
//!
//! `predicted` must equal `same` exactly when `score_same >= threshold`.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::datamodel::records::Label;
use crate::error::{Error, Result};

pub const HEADER: [&str; 7] = [
    "stimulus_id",
    "score_same",
    "logit_same",
    "logit_diff",
    "predicted",
    "model_id",
    "seed_id",
];

/// Decision threshold for `score_same = logit_same - logit_diff` (argmax).
pub const LOGIT_THRESHOLD: f64 = 0.0;
/// Decision threshold for probabilities.
pub const PROBABILITY_THRESHOLD: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub stimulus_id: String,
    pub score_same: f64,
    pub logit_same: Option<f64>,
    pub logit_diff: Option<f64>,
    pub predicted: Label,
    pub model_id: String,
    pub seed_id: i64,
}

impl PredictionRecord {
    /// Two-logit output; the score is the logit margin and the threshold 0.
    pub fn from_logits(stimulus_id: impl Into<String>, logit_same: f64, logit_diff: f64, model_id: impl Into<String>, seed_id: i64) -> Self {
        let score = logit_same - logit_diff;
        Self {
            stimulus_id: stimulus_id.into(),
            score_same: score,
            logit_same: Some(logit_same),
            logit_diff: Some(logit_diff),
            predicted: decide(score, LOGIT_THRESHOLD),
            model_id: model_id.into(),
            seed_id,
        }
    }

    pub fn from_score(stimulus_id: impl Into<String>, score_same: f64, threshold: f64, model_id: impl Into<String>, seed_id: i64) -> Self {
        Self {
            stimulus_id: stimulus_id.into(),
            score_same,
            logit_same: None,
            logit_diff: None,
            predicted: decide(score_same, threshold),
            model_id: model_id.into(),
            seed_id,
        }
    }
}

pub fn decide(score: f64, threshold: f64) -> Label {
    if score >= threshold {
        Label::Same
    } else {
        Label::Different
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PredictionFile {
    pub threshold: f64,
    pub records: Vec<PredictionRecord>,
}

impl PredictionFile {
    pub fn new(threshold: f64, records: Vec<PredictionRecord>) -> Result<Self> {
        let file = Self { threshold, records };
        file.check()?;
        Ok(file)
    }

    fn check(&self) -> Result<()> {
        if !self.threshold.is_finite() {
            return Err(Error::Parse(format!("threshold {} is not finite", self.threshold)));
        }
        for r in &self.records {
            if !r.score_same.is_finite() {
                return Err(Error::Parse(format!("{}: score {} is not finite", r.stimulus_id, r.score_same)));
            }
            if r.predicted != decide(r.score_same, self.threshold) {
                return Err(Error::Parse(format!(
                    "{}: predicted `{}` disagrees with score {} at threshold {}",
                    r.stimulus_id,
                    r.predicted.as_str(),
                    r.score_same,
                    self.threshold
                )));
            }
        }
        Ok(())
    }

    /// Distinct seed ids in first-appearance order.
    pub fn seeds(&self) -> Vec<i64> {
        let mut seeds = Vec::new();
        for r in &self.records {
            if !seeds.contains(&r.seed_id) {
                seeds.push(r.seed_id);
            }
        }
        seeds
    }

    pub fn for_seed(&self, seed: i64) -> PredictionFile {
        PredictionFile {
            threshold: self.threshold,
            records: self.records.iter().filter(|r| r.seed_id == seed).cloned().collect(),
        }
    }

    pub fn write_to<W: Write>(&self, mut writer: W) -> Result<()> {
        self.check()?;
        let io = |e: std::io::Error| Error::Io {
            path: "<predictions>".into(),
            source: e,
        };
        writeln!(writer, "# threshold={}", self.threshold).map_err(io)?;
        let mut csv = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        csv.write_record(HEADER).map_err(|e| Error::Parse(e.to_string()))?;
        for r in &self.records {
            csv.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
        }
        csv.flush().map_err(io)
    }

    pub fn read_from<R: Read>(reader: R) -> Result<Self> {
        let mut reader = BufReader::new(reader);
        let mut first = String::new();
        reader.read_line(&mut first).map_err(|e| Error::Io {
            path: "<predictions>".into(),
            source: e,
        })?;
        let threshold = first
            .trim_end()
            .strip_prefix("# threshold=")
            .ok_or_else(|| Error::Parse("predictions must start with `# threshold=<real>`".into()))?
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("threshold: {e}")))?;
        let mut csv = csv::Reader::from_reader(reader);
        let headers = csv.headers().map_err(|e| Error::Parse(e.to_string()))?;
        if headers.iter().ne(HEADER.iter().copied()) {
            return Err(Error::Parse(format!(
                "prediction header must be `{}`, found `{}`",
                HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let records = csv
            .deserialize()
            .collect::<std::result::Result<Vec<PredictionRecord>, _>>()
            .map_err(|e| Error::Parse(format!("predictions: {e}")))?;
        Self::new(threshold, records)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(Error::io(parent))?;
        }
        let file = std::fs::File::create(path).map_err(Error::io(path))?;
        self.write_to(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(Error::io(path))?;
        Self::read_from(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn logits_use_argmax() {
        let r = PredictionRecord::from_logits("a", 1.0, 1.0, "m", 0);
        assert_eq!(r.predicted, Label::Same);
        let r = PredictionRecord::from_logits("a", 0.5, 1.0, "m", 0);
        assert_eq!(r.predicted, Label::Different);
        assert_eq!(r.score_same, -0.5);
    }

    #[test]
    fn text_layout() {
        let f = PredictionFile::new(0.5, vec![PredictionRecord::from_score("x", 0.75, 0.5, "probe", 3)]).unwrap();
        let mut buf = Vec::new();
        f.write_to(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# threshold=0.5\nstimulus_id,score_same,logit_same,logit_diff,predicted,model_id,seed_id\nx,0.75,,,same,probe,3\n"
        );
    }

    #[test]
    fn inconsistent_prediction_rejected() {
        let text = "# threshold=0\nstimulus_id,score_same,logit_same,logit_diff,predicted,model_id,seed_id\nx,-1,,,same,m,0\n";
        assert!(PredictionFile::read_from(text.as_bytes()).is_err());
    }

    #[test]
    fn missing_preamble_or_header_rejected() {
        let text = "stimulus_id,score_same,logit_same,logit_diff,predicted,model_id,seed_id\n";
        assert!(PredictionFile::read_from(text.as_bytes()).is_err());
        let text = "# threshold=0\nid,score\nx,1\n";
        assert!(PredictionFile::read_from(text.as_bytes()).is_err());
    }

    fn record() -> impl Strategy<Value = PredictionRecord> {
        (
            "[a-z0-9-]{1,12}",
            -1e6f64..1e6,
            proptest::option::of(-50f64..50.0),
            proptest::option::of(-50f64..50.0),
            "[a-z-]{1,8}",
            0i64..10,
        )
            .prop_map(|(id, score, ls, ld, model, seed)| PredictionRecord {
                stimulus_id: id,
                score_same: score,
                logit_same: ls,
                logit_diff: ld,
                predicted: decide(score, 0.0),
                model_id: model,
                seed_id: seed,
            })
    }

    proptest! {
        #[test]
        fn roundtrip(records in proptest::collection::vec(record(), 0..20)) {
            let f = PredictionFile::new(0.0, records).unwrap();
            let mut buf = Vec::new();
            f.write_to(&mut buf).unwrap();
            prop_assert_eq!(PredictionFile::read_from(&buf[..]).unwrap(), f);
        }
    }
}
