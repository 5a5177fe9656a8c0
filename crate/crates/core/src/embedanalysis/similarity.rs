//! Cosine similarity over all unordered row pairs.

use rayon::prelude::*;

use crate::datamodel::embeddings::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::metrics::report::Table;

pub const DEFAULT_BINS: usize = 200;
const DEFAULT_BLOCK: usize = 64;
const LANES: usize = 16;

pub fn cosine(u: &[f32], v: &[f32]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Dimension {
            expected: u.len(),
            found: v.len(),
        });
    }
    let (mut dot, mut nu, mut nv) = (0.0f64, 0.0f64, 0.0f64);
    for (&a, &b) in u.iter().zip(v) {
        let (a, b) = (a as f64, b as f64);
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroNorm("cosine of a zero vector".into()));
    }
    Ok((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}

/// Fixed-width bins over [-1, 1]; 1.0 falls in the last bin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(bins: usize) -> Self {
        Self { counts: vec![0; bins] }
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_of(&self, value: f64) -> usize {
        let n = self.counts.len();
        (((value.clamp(-1.0, 1.0) + 1.0) / 2.0 * n as f64) as usize).min(n - 1)
    }

    pub fn edges(&self, bin: usize) -> (f64, f64) {
        let w = 2.0 / self.counts.len() as f64;
        (-1.0 + bin as f64 * w, -1.0 + (bin + 1) as f64 * w)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn merge(&mut self, other: &Histogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    /// `bin_left, bin_right, count` rows.
    pub fn to_table(&self) -> Table {
        Table::new(
            ["bin_left", "bin_right", "count"].map(String::from).to_vec(),
            (0..self.bins())
                .map(|i| {
                    let (l, r) = self.edges(i);
                    vec![format!("{l:.4}"), format!("{r:.4}"), self.counts[i].to_string()]
                })
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimilaritySummary {
    pub mean: f64,
    /// Population variance over pairs.
    pub variance: f64,
    pub histogram: Histogram,
    pub pair_count: u64,
}

impl SimilaritySummary {
    pub fn to_table(&self, name: &str) -> Table {
        Table::new(
            ["embeddings", "pairs", "mean", "variance"].map(String::from).to_vec(),
            vec![vec![
                name.to_string(),
                self.pair_count.to_string(),
                format!("{:.6}", self.mean),
                format!("{:.6}", self.variance),
            ]],
        )
    }
}

pub fn pairwise_summary(emb: &EmbeddingMatrix) -> Result<SimilaritySummary> {
    pairwise_summary_with(emb, DEFAULT_BLOCK, DEFAULT_BINS)
}

/// Mean, variance and histogram of the cosine similarity over all
/// `n(n-1)/2` pairs.
///
/// Rows are normalized once; each pair's dot product uses a fixed lane
/// layout and each row's partial sums run over columns in ascending order, so
/// the result is bit-identical for every block size and thread count.
pub fn pairwise_summary_with(emb: &EmbeddingMatrix, block: usize, bins: usize) -> Result<SimilaritySummary> {
    let n = emb.len();
    if n < 2 {
        return Err(Error::Eval(format!("pairwise similarity needs at least 2 rows, got {n}")));
    }
    if block == 0 || bins == 0 {
        return Err(Error::InvalidConfig("block size and bin count must be positive".into()));
    }
    let dim = emb.dim();
    let padded = dim.div_ceil(LANES) * LANES;
    let mut unit = vec![0.0f32; n * padded];
    for (i, row) in emb.rows().enumerate() {
        let norm = row.iter().map(|&x| x as f64 * x as f64).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNorm(format!("embedding row `{}`", emb.ids()[i])));
        }
        for (dst, &x) in unit[i * padded..(i + 1) * padded].iter_mut().zip(row) {
            *dst = (x as f64 / norm) as f32;
        }
    }
    let unit = &unit;
    let row = |i: usize| &unit[i * padded..(i + 1) * padded];

    let partials: Vec<(Vec<f64>, Vec<f64>, Histogram)> = (0..n)
        .step_by(block)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|i0| {
            let i1 = (i0 + block).min(n);
            let mut sum = vec![0.0f64; i1 - i0];
            let mut sum_sq = vec![0.0f64; i1 - i0];
            let mut hist = Histogram::new(bins);
            for j0 in (i0..n).step_by(block) {
                let j1 = (j0 + block).min(n);
                for i in i0..i1 {
                    let ri = row(i);
                    for j in j0.max(i + 1)..j1 {
                        let c = dot(ri, row(j));
                        sum[i - i0] += c;
                        sum_sq[i - i0] += c * c;
                        let b = hist.bin_of(c);
                        hist.counts[b] += 1;
                    }
                }
            }
            (sum, sum_sq, hist)
        })
        .collect();

    let mut total = 0.0f64;
    let mut total_sq = 0.0f64;
    let mut histogram = Histogram::new(bins);
    for (sum, sum_sq, hist) in &partials {
        for (s, q) in sum.iter().zip(sum_sq) {
            total += s;
            total_sq += q;
        }
        histogram.merge(hist);
    }
    let pair_count = n as u64 * (n as u64 - 1) / 2;
    let mean = total / pair_count as f64;
    Ok(SimilaritySummary {
        mean,
        variance: (total_sq / pair_count as f64 - mean * mean).max(0.0),
        histogram,
        pair_count,
    })
}

/// Dot product with `LANES` independent f32 accumulators, reduced in f64.
fn dot(a: &[f32], b: &[f32]) -> f64 {
    let mut acc = [0.0f32; LANES];
    for (ca, cb) in a.chunks_exact(LANES).zip(b.chunks_exact(LANES)) {
        for k in 0..LANES {
            acc[k] += ca[k] * cb[k];
        }
    }
    acc.iter().map(|&x| x as f64).sum()
}

/// Direct double loop in f64; the reference for [`pairwise_summary`].
pub fn naive_pairwise_summary(emb: &EmbeddingMatrix, bins: usize) -> Result<SimilaritySummary> {
    let n = emb.len();
    if n < 2 {
        return Err(Error::Eval(format!("pairwise similarity needs at least 2 rows, got {n}")));
    }
    let mut values = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            values.push(cosine(emb.row(i), emb.row(j))?);
        }
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
    let mut histogram = Histogram::new(bins);
    for &v in &values {
        let b = histogram.bin_of(v);
        histogram.counts[b] += 1;
    }
    Ok(SimilaritySummary {
        mean,
        variance,
        histogram,
        pair_count: values.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;
    use proptest::prelude::*;

    fn random(n: usize, dim: usize, seed: u64) -> EmbeddingMatrix {
        let mut s = derive_stream(seed, 0);
        let data = (0..n * dim).map(|_| s.standard_normal() as f32 + 0.3).collect();
        EmbeddingMatrix::new((0..n).map(|i| format!("e{i}")).collect(), dim, data).unwrap()
    }

    #[test]
    fn cosine_examples() {
        let v = [0.3f32, -1.2, 4.0];
        assert!((cosine(&v, &v).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let neg: Vec<f32> = v.iter().map(|x| -x).collect();
        assert!((cosine(&v, &neg).unwrap() + 1.0).abs() < 1e-12);
        assert!(matches!(cosine(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::ZeroNorm(_))));
        assert!(cosine(&[1.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn identical_rows() {
        let emb = EmbeddingMatrix::from_rows((0..4).map(|i| i.to_string()).collect(), &vec![vec![1.0, 2.0, 3.0]; 4]).unwrap();
        let s = pairwise_summary(&emb).unwrap();
        assert_eq!(s.pair_count, 6);
        assert!((s.mean - 1.0).abs() < 1e-6);
        assert!(s.variance < 1e-12);
    }

    #[test]
    fn matches_naive_oracle() {
        for (n, dim) in [(5, 7), (100, 64), (37, 16)] {
            let emb = random(n, dim, n as u64);
            let fast = pairwise_summary_with(&emb, 8, 50).unwrap();
            let slow = naive_pairwise_summary(&emb, 50).unwrap();
            assert_eq!(fast.pair_count, (n * (n - 1) / 2) as u64);
            assert!((fast.mean - slow.mean).abs() < 1e-6);
            assert!((fast.variance - slow.variance).abs() < 1e-6);
            assert_eq!(fast.histogram.total(), fast.pair_count);
        }
    }

    #[test]
    fn block_size_invariant_bitwise() {
        let emb = random(70, 20, 3);
        let a = pairwise_summary_with(&emb, 1, 40).unwrap();
        for block in [3, 16, 64, 1000] {
            assert_eq!(pairwise_summary_with(&emb, block, 40).unwrap(), a);
        }
    }

    #[test]
    fn zero_row_rejected() {
        let emb = EmbeddingMatrix::from_rows(vec!["a".into(), "b".into()], &[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(pairwise_summary(&emb), Err(Error::ZeroNorm(_))));
        let one = EmbeddingMatrix::from_rows(vec!["a".into()], &[vec![1.0]]).unwrap();
        assert!(pairwise_summary(&one).is_err());
    }

    #[test]
    fn histogram_edges() {
        let h = Histogram::new(4);
        assert_eq!(h.bin_of(-1.0), 0);
        assert_eq!(h.bin_of(1.0), 3);
        assert_eq!(h.bin_of(0.0), 2);
        assert_eq!(h.edges(0), (-1.0, -0.5));
        assert_eq!(h.to_table().header, ["bin_left", "bin_right", "count"]);
    }

    proptest! {
        #[test]
        fn cosine_scale_invariant(v in prop::collection::vec(-10.0f32..10.0, 8), u in prop::collection::vec(-10.0f32..10.0, 8), alpha in 0.01f32..100.0) {
            prop_assume!(v.iter().any(|&x| x != 0.0) && u.iter().any(|&x| x != 0.0));
            let scaled: Vec<f32> = u.iter().map(|x| x * alpha).collect();
            let a = cosine(&u, &v).unwrap();
            let b = cosine(&scaled, &v).unwrap();
            prop_assert!((a - b).abs() <= 1e-6, "{a} {b}");
        }

        #[test]
        fn permutation_invariant(seed in any::<u64>()) {
            let emb = random(12, 9, seed);
            let mut order: Vec<usize> = (0..12).collect();
            derive_stream(seed, 1).shuffle(&mut order);
            let a = pairwise_summary(&emb).unwrap();
            let b = pairwise_summary(&emb.select(&order)).unwrap();
            prop_assert!((a.mean - b.mean).abs() < 1e-12);
            prop_assert!((a.variance - b.variance).abs() < 1e-12);
            prop_assert_eq!(a.histogram, b.histogram);
        }
    }
}
