//! Binary embedding tables.
//!
//! Layout: an ASCII JSON header line `{"count":N,"dim":D,"dtype":"f32le"}\n`,
//! then `N` rows, each a little-endian `u32` byte length, that many bytes of
//! UTF-8 id, and `D` little-endian `f32` values.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DTYPE: &str = "f32le";
const MAX_HEADER_BYTES: u64 = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix {
    ids: Vec<String>,
    dim: usize,
    data: Vec<f32>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    count: usize,
    dim: usize,
    dtype: String,
}

impl EmbeddingMatrix {
    pub fn new(ids: Vec<String>, dim: usize, data: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parse("embedding dim must be positive".into()));
        }
        if data.len() != ids.len() * dim {
            return Err(Error::Dimension {
                expected: ids.len() * dim,
                found: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parse(format!("row `{}` has a non-finite entry", ids[i / dim])));
        }
        Ok(Self { ids, dim, data })
    }

    pub fn from_rows(ids: Vec<String>, rows: &[Vec<f32>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::Dimension {
                expected: dim,
                found: bad.len(),
            });
        }
        Self::new(ids, dim, rows.concat())
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f32]> {
        self.data.chunks_exact(self.dim)
    }

    /// Rows picked by index, in the given order.
    pub fn select(&self, indices: &[usize]) -> EmbeddingMatrix {
        let ids = indices.iter().map(|&i| self.ids[i].clone()).collect();
        let data = indices.iter().flat_map(|&i| self.row(i).iter().copied()).collect();
        EmbeddingMatrix {
            ids,
            dim: self.dim,
            data,
        }
    }

    pub fn write_to<W: Write>(&self, writer: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Io {
            path: "<embeddings>".into(),
            source: e,
        };
        let mut w = BufWriter::new(writer);
        let header = Header {
            count: self.len(),
            dim: self.dim,
            dtype: DTYPE.into(),
        };
        serde_json::to_writer(&mut w, &header).map_err(|e| Error::Parse(e.to_string()))?;
        w.write_all(b"\n").map_err(io)?;
        for (id, row) in self.ids.iter().zip(self.rows()) {
            w.write_all(&(id.len() as u32).to_le_bytes()).map_err(io)?;
            w.write_all(id.as_bytes()).map_err(io)?;
            for v in row {
                w.write_all(&v.to_le_bytes()).map_err(io)?;
            }
        }
        w.flush().map_err(io)
    }

    pub fn read_from<R: Read>(reader: R) -> Result<Self> {
        let mut reader = BufReader::new(reader);
        let mut line = Vec::new();
        (&mut reader)
            .take(MAX_HEADER_BYTES)
            .read_until(b'\n', &mut line)
            .map_err(|e| Error::Io {
                path: "<embeddings>".into(),
                source: e,
            })?;
        if line.last() != Some(&b'\n') {
            return Err(Error::Truncated("embedding header line is not newline-terminated".into()));
        }
        let header: Header = serde_json::from_slice(&line[..line.len() - 1])
            .map_err(|e| Error::Parse(format!("embedding header: {e}")))?;
        if header.dtype != DTYPE {
            return Err(Error::Version {
                expected: DTYPE.into(),
                found: header.dtype,
            });
        }
        if header.dim == 0 {
            return Err(Error::Parse("embedding dim must be positive".into()));
        }

        let truncated = |row: usize| Error::Truncated(format!("expected {} rows, payload ends in row {row}", header.count));
        let mut ids = Vec::with_capacity(header.count.min(1 << 20));
        let mut data = Vec::with_capacity((header.count * header.dim).min(1 << 26));
        let mut row_bytes = vec![0u8; header.dim * 4];
        for row in 0..header.count {
            let mut len = [0u8; 4];
            reader.read_exact(&mut len).map_err(|_| truncated(row))?;
            let mut id = vec![0u8; u32::from_le_bytes(len) as usize];
            reader.read_exact(&mut id).map_err(|_| truncated(row))?;
            let id = String::from_utf8(id).map_err(|e| Error::Parse(format!("row {row} id: {e}")))?;
            reader.read_exact(&mut row_bytes).map_err(|_| truncated(row))?;
            data.extend(row_bytes.chunks_exact(4).map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]])));
            ids.push(id);
        }
        let mut rest = [0u8; 1];
        if reader.read(&mut rest).map_err(|e| Error::Io {
            path: "<embeddings>".into(),
            source: e,
        })? != 0
        {
            return Err(Error::Parse(format!("trailing bytes after {} rows", header.count)));
        }
        Self::new(ids, header.dim, data)
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

    fn encode(count: usize, dim: usize, rows: usize) -> Vec<u8> {
        let mut buf = format!("{{\"count\":{count},\"dim\":{dim},\"dtype\":\"f32le\"}}\n").into_bytes();
        for r in 0..rows {
            let id = format!("row{r}");
            buf.extend((id.len() as u32).to_le_bytes());
            buf.extend(id.as_bytes());
            for k in 0..dim {
                buf.extend(((r * dim + k) as f32).to_le_bytes());
            }
        }
        buf
    }

    #[test]
    fn parses_3x512() {
        let m = EmbeddingMatrix::read_from(&encode(3, 512, 3)[..]).unwrap();
        assert_eq!((m.len(), m.dim()), (3, 512));
        assert_eq!(m.row(2)[511], (2 * 512 + 511) as f32);
        assert_eq!(m.ids()[1], "row1");
    }

    #[test]
    fn short_payload_is_truncation() {
        assert!(matches!(EmbeddingMatrix::read_from(&encode(4, 8, 3)[..]), Err(Error::Truncated(_))));
        let mut cut = encode(2, 8, 2);
        cut.pop();
        assert!(matches!(EmbeddingMatrix::read_from(&cut[..]), Err(Error::Truncated(_))));
    }

    #[test]
    fn extra_payload_rejected() {
        assert!(EmbeddingMatrix::read_from(&encode(2, 8, 3)[..]).is_err());
    }

    #[test]
    fn wrong_dtype_is_version_error() {
        let buf = b"{\"count\":0,\"dim\":4,\"dtype\":\"f16le\"}\n";
        assert!(matches!(EmbeddingMatrix::read_from(&buf[..]), Err(Error::Version { .. })));
    }

    #[test]
    fn ragged_rows_rejected() {
        let e = EmbeddingMatrix::from_rows(vec!["a".into(), "b".into()], &[vec![1.0, 2.0], vec![1.0]]);
        assert!(matches!(e, Err(Error::Dimension { .. })));
        assert!(EmbeddingMatrix::new(vec!["a".into()], 2, vec![1.0, f32::NAN]).is_err());
    }

    proptest! {
        #[test]
        fn roundtrip(dim in 1usize..16, rows in proptest::collection::vec(("\\PC{0,10}", proptest::collection::vec(-1e6f32..1e6, 16)), 0..12)) {
            let ids: Vec<String> = rows.iter().map(|r| r.0.clone()).collect();
            let data: Vec<f32> = rows.iter().flat_map(|r| r.1[..dim].to_vec()).collect();
            let m = EmbeddingMatrix::new(ids, dim, data).unwrap();
            let mut buf = Vec::new();
            m.write_to(&mut buf).unwrap();
            prop_assert_eq!(EmbeddingMatrix::read_from(&buf[..]).unwrap(), m);
        }
    }
}
