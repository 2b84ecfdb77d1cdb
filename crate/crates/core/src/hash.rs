//! Keyed 64-bit hashing of element ids and seed derivation.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn fmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash of `value` under key `seed`. Deterministic for a fixed pair.
#[inline]
pub fn keyed_hash(seed: u64, value: u64) -> u64 {
    let key = fmix64(seed.wrapping_add(GOLDEN));
    fmix64(fmix64(value.wrapping_mul(GOLDEN) ^ key).wrapping_add(key))
}

/// Maps a 64-bit hash onto `[0, 1)`.
#[inline]
pub fn unit_interval(h: u64) -> f64 {
    // 2^-64; values within half an ulp of 1.0 round down to the largest f64 below 1.
    let x = h as f64 * (1.0 / 18_446_744_073_709_551_616.0);
    if x < 1.0 {
        x
    } else {
        f64::from_bits(1.0f64.to_bits() - 1)
    }
}

/// Independent sub-seed number `counter` of `seed`.
pub fn derive_seed(seed: u64, counter: u64) -> u64 {
    fmix64(seed ^ fmix64(counter.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// A seeded map from element ids to `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashAssignment {
    seed: u64,
}

impl HashAssignment {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn raw(&self, element: u32) -> u64 {
        keyed_hash(self.seed, element as u64)
    }

    #[inline]
    pub fn value(&self, element: u32) -> f64 {
        unit_interval(self.raw(element))
    }
}
