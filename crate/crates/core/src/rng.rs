//! Deterministic, splittable random streams.
//!
//! Every random choice in the crate is drawn from an [`RngStream`] obtained
//! with [`RngStream::derive`]. A stream is fully determined by the pair
//! `(master_seed, stream_index)`:
//!
//! ```text
//! seed  = mix64(master_seed ^ stream_index.wrapping_mul(STREAM_MULTIPLIER))
//! state = four consecutive SplitMix64 outputs starting from `seed`
//! ```
//!
//! `mix64` is the SplitMix64 output finalizer (shifts 30/27/31, multipliers
//! `0xbf58476d1ce4e5b9` and `0x94d049bb133111eb`) and the generator is
//! xoshiro256\*\*. `STREAM_MULTIPLIER` is the 64-bit golden-ratio constant.
//! Changing any of these breaks the golden fixtures under `tests/fixtures`.

use rand::{Rng, RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use crate::bits::{check_width, BitString};
use crate::error::Result;

/// Odd multiplier spreading stream indices before mixing.
pub const STREAM_MULTIPLIER: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer: a bijective 64-bit avalanche mix.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A single-owner random stream tagged with the seed pair it came from.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: Xoshiro256StarStar,
    master_seed: u64,
    stream_index: u64,
}

impl RngStream {
    pub fn derive(master_seed: u64, stream_index: u64) -> Self {
        let seed = mix64(master_seed ^ stream_index.wrapping_mul(STREAM_MULTIPLIER));
        RngStream {
            inner: Xoshiro256StarStar::seed_from_u64(seed),
            master_seed,
            stream_index,
        }
    }

    pub fn origin(&self) -> (u64, u64) {
        (self.master_seed, self.stream_index)
    }

    /// Uniform integer in `0..upper`. `upper` must be non-zero.
    #[inline]
    pub fn below(&mut self, upper: usize) -> usize {
        self.random_range(0..upper)
    }

    /// Uniform integer in `lo..=hi`.
    #[inline]
    pub fn between(&mut self, lo: usize, hi: usize) -> usize {
        self.random_range(lo..=hi)
    }
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Shorthand for [`RngStream::derive`].
pub fn derive_stream(master_seed: u64, stream_index: u64) -> RngStream {
    RngStream::derive(master_seed, stream_index)
}

/// Draws a uniform `width`-bit string. Consumes exactly one 64-bit output.
pub fn random_bitstring(width: usize, stream: &mut RngStream) -> Result<BitString> {
    check_width(width)?;
    BitString::truncated(width, stream.next_u64())
}

/// Raw variant of [`random_bitstring`] for inner loops; `mask` must come
/// from [`crate::bits::width_mask`].
#[inline]
pub(crate) fn random_word(mask: u64, stream: &mut RngStream) -> u64 {
    debug_assert!(mask == u64::MAX || (mask + 1).is_power_of_two());
    stream.next_u64() & mask
}
