//! Pinned pseudo-random generator.
//!
//! Every random choice in the crate (keyed ANS tables, padding digits,
//! samplers, Monte-Carlo trials) goes through [`SplitMix64`] so that results
//! are reproducible bit-for-bit across platforms and implementations.
//!
//! Algorithm (fixed, do not change without bumping the container version):
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! return z ^ (z >> 31)
//! ```
//!
//! Uniform integers below `m` use rejection on the low residue class
//! (`r >= 2^64 mod m`, then `r % m`); uniform reals use the top 53 bits.

/// Keyed SplitMix64 generator.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Independent stream for sub-task `index` of a run seeded with `seed`.
    pub fn derive(seed: u64, index: u64) -> Self {
        let mut mixer = SplitMix64::new(seed ^ index.wrapping_mul(GOLDEN_GAMMA).rotate_left(17));
        SplitMix64::new(mixer.next_u64() ^ index)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in `0..m`. Panics if `m == 0`.
    pub fn below(&mut self, m: u64) -> u64 {
        assert!(m > 0, "empty range");
        let threshold = m.wrapping_neg() % m;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % m;
            }
        }
    }

    /// Uniform real in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    pub fn next_bit(&mut self) -> u8 {
        (self.next_u64() >> 63) as u8
    }

    /// Standard normal deviate (Box-Muller).
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

/// Vector of `count` uniformly random bits.
pub fn random_bits(rng: &mut SplitMix64, count: usize) -> Vec<u8> {
    (0..count).map(|_| rng.next_bit()).collect()
}
