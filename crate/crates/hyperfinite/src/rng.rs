//! Deterministic keyed randomness.
//!
//! Everything random in this crate flows through a splitmix64-style
//! mixer so that results are bit-stable across platforms and releases.
//! Streams are derived from `(seed, domain tag, key words)`, which makes
//! the generator splittable: independent objects (e.g. one candidate
//! vertex set) get independent streams keyed by their own identity
//! rather than by iteration order.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fold one word into a running key hash.
#[inline]
fn absorb(state: u64, word: u64) -> u64 {
    mix(state.wrapping_add(GOLDEN).wrapping_add(word))
}

/// Deterministic stream generator derived from a seed, a domain tag,
/// and arbitrary key words.
#[derive(Clone, Debug)]
pub struct KeyedRng {
    state: u64,
    counter: u64,
}

impl KeyedRng {
    pub fn new(seed: u64, tag: &str, key: &[u64]) -> Self {
        let mut s = absorb(seed, 0x6b65_7965_645f_726e); // "keyed_rn"
        for &b in tag.as_bytes() {
            s = absorb(s, b as u64);
        }
        s = absorb(s, tag.len() as u64);
        for &w in key {
            s = absorb(s, w);
        }
        s = absorb(s, key.len() as u64);
        KeyedRng { state: s, counter: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self.state.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[0, n)`. Uses 128-bit multiply-shift; the bias for
    /// n ≪ 2^64 is far below anything observable here.
    #[inline]
    pub fn next_below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// One-shot uniform draw in `[0, 1)` for a keyed event, e.g. the
/// Bernoulli coin of a candidate set identified by its sorted vertices.
pub fn keyed_unit(seed: u64, tag: &str, key: &[u64]) -> f64 {
    KeyedRng::new(seed, tag, key).next_f64()
}

/// Derive a fresh 64-bit seed for a labeled sub-stream.
pub fn derive_seed(seed: u64, tag: &str, index: u64) -> u64 {
    KeyedRng::new(seed, tag, &[index]).next_u64()
}
