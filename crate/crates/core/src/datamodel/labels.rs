//! Label sidecar for probe training: CSV `stimulus_id,label`.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::datamodel::records::Label;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRow {
    pub stimulus_id: String,
    #[serde(with = "label_text")]
    pub label: Label,
}

mod label_text {
    use super::Label;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(l: &Label, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(l.as_str())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Label, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

pub fn write_labels<W: Write>(writer: W, rows: &[LabelRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_labels<R: Read>(reader: R) -> Result<Vec<LabelRow>> {
    csv::Reader::from_reader(reader)
        .deserialize()
        .map(|r| r.map_err(|e| Error::Parse(format!("labels: {e}"))))
        .collect()
}

pub fn read_labels_file(path: &Path) -> Result<Vec<LabelRow>> {
    read_labels(std::fs::File::open(path).map_err(Error::io(path))?)
}

pub fn write_labels_file(path: &Path, rows: &[LabelRow]) -> Result<()> {
    write_labels(std::fs::File::create(path).map_err(Error::io(path))?, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let rows = vec![
            LabelRow {
                stimulus_id: "train-00000".into(),
                label: Label::Same,
            },
            LabelRow {
                stimulus_id: "train-00001".into(),
                label: Label::Different,
            },
        ];
        let mut buf = Vec::new();
        write_labels(&mut buf, &rows).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "stimulus_id,label\ntrain-00000,same\ntrain-00001,different\n");
        assert_eq!(read_labels(&buf[..]).unwrap(), rows);
        assert!(read_labels("stimulus_id,label\nx,maybe\n".as_bytes()).is_err());
    }
}
