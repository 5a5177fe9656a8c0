//! Deterministic seed streams.
//!
//! Every random decision made while generating a dataset draws from a
//! [`SeedStream`] identified by `(root_seed, stream_index)`. The generator is
//! xorshift64* whose 64-bit state is derived from the pair with splitmix64:
//!
//! ```text
//! state = splitmix64(root_seed ^ splitmix64(stream_index + 0x9E3779B97F4A7C15))
//! ```
//!
//! (a zero state is replaced by `0x9E3779B97F4A7C15`). The constants and the
//! derived helpers (`next_f64`, `below`, `standard_normal`, `shuffle`) are part
//! of the dataset file-format contract: changing any of them changes every
//! generated image.

use std::f64::consts::PI;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const XORSHIFT_STAR: u64 = 0x2545_F491_4F6C_DD1D;

/// splitmix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Packs a domain tag and an item number into a stream index.
///
/// The top 16 bits hold the domain, the low 48 bits the item.
pub const fn stream_index(domain: u16, item: u64) -> u64 {
    ((domain as u64) << 48) | (item & 0x0000_FFFF_FFFF_FFFF)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedStream {
    root_seed: u64,
    stream_index: u64,
    state: u64,
}

pub fn derive_stream(root_seed: u64, stream_index: u64) -> SeedStream {
    SeedStream::new(root_seed, stream_index)
}

impl SeedStream {
    pub fn new(root_seed: u64, stream_index: u64) -> Self {
        let mut state = splitmix64(root_seed ^ splitmix64(stream_index.wrapping_add(GOLDEN_GAMMA)));
        if state == 0 {
            state = GOLDEN_GAMMA;
        }
        Self {
            root_seed,
            stream_index,
            state,
        }
    }

    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// A child stream keyed by this stream's identity and `index`.
    ///
    /// Children depend only on `(root_seed, stream_index, index)`, never on
    /// how many values the parent has already produced.
    pub fn fork(&self, index: u64) -> SeedStream {
        SeedStream::new(splitmix64(self.root_seed ^ splitmix64(self.stream_index)), index)
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(XORSHIFT_STAR)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Unbiased integer in `[0, n)` (Lemire's multiply-and-reject). `n` must be non-zero.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let mut m = (self.next_u64() as u128) * (n as u128);
        let mut low = m as u64;
        if low < n {
            let threshold = n.wrapping_neg() % n;
            while low < threshold {
                m = (self.next_u64() as u128) * (n as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    pub fn below_usize(&mut self, n: usize) -> usize {
        self.below(n as u64) as usize
    }

    /// Standard normal draw via Box-Muller (two uniforms per draw, no caching).
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }

    /// Fisher-Yates shuffle, iterating from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below_usize(i + 1);
            items.swap(i, j);
        }
    }

    pub fn choose<'a, T>(&mut self, items: &'a [T]) -> Option<&'a T> {
        if items.is_empty() {
            None
        } else {
            Some(&items[self.below_usize(items.len())])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn draws(mut s: SeedStream, n: usize) -> Vec<u64> {
        (0..n).map(|_| s.next_u64()).collect()
    }

    #[test]
    fn same_inputs_same_sequence() {
        assert_eq!(draws(derive_stream(42, 7), 1000), draws(derive_stream(42, 7), 1000));
    }

    #[test]
    fn adjacent_streams_differ() {
        let a = draws(derive_stream(42, 0), 1000);
        let b = draws(derive_stream(42, 1), 1000);
        assert!(a.iter().zip(&b).any(|(x, y)| x != y));
    }

    #[test]
    fn below_stays_in_range() {
        let mut s = derive_stream(1, 2);
        for n in [1u64, 2, 3, 7, 161, 1 << 40] {
            for _ in 0..200 {
                assert!(s.below(n) < n);
            }
        }
    }

    #[test]
    fn fork_ignores_parent_position() {
        let a = derive_stream(9, 3);
        let mut b = derive_stream(9, 3);
        b.next_u64();
        assert_eq!(draws(a.fork(5), 10), draws(b.fork(5), 10));
        assert_ne!(draws(a.fork(5), 10), draws(a.fork(6), 10));
    }

    #[test]
    fn shuffle_is_permutation() {
        let mut s = derive_stream(3, 3);
        let mut v: Vec<u32> = (0..100).collect();
        s.shuffle(&mut v);
        let mut sorted = v.clone();
        sorted.sort();
        assert_eq!(sorted, (0..100).collect::<Vec<_>>());
        assert_ne!(v, sorted);
    }
}
