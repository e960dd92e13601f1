//! SplitMix64: the 64-bit generator from Steele, Lea and Flood's
//! "Fast splittable pseudorandom number generators", reproduced here with its
//! published constants so share generation and sweep messages are bit-exact
//! reproducible from a seed alone, independent of any crate version.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform index in `0..n` for small `n`, via rejection on the top bits
    /// (no modulo bias).
    pub fn next_index(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0 && n <= 256);
        let bits = 64 - (n - 1).leading_zeros();
        loop {
            let v = self.next_u64() >> (64 - bits);
            if v < n {
                return v;
            }
        }
    }

    pub fn fill_bytes(&mut self, buf: &mut [u8]) {
        for chunk in buf.chunks_mut(8) {
            let v = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&v[..chunk.len()]);
        }
    }
}
