//! Seed derivation.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 generator whose
//! key comes from [`mix`] (SplitMix64 finalizer) applied to a caller seed and a
//! stream tag. Independent sub-streams for one seed use distinct tags, so for
//! instance innovation signs and magnitudes never share state and changing the
//! sign balance leaves magnitudes untouched.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags. Values are arbitrary but frozen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Magnitude = 1,
    Sign = 2,
    Coefficients = 3,
    PointCount = 4,
    PointMarks = 5,
    LimitCoefficients = 6,
    LimitPoints = 7,
    Replicate = 8,
    Innovations = 9,
    MonteCarlo = 10,
}

/// SplitMix64 output function: a bijective 64-bit mixer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `(seed, stream)`.
pub fn derive(seed: u64, stream: Stream) -> u64 {
    mix(mix(seed) ^ (stream as u64).wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Seed of replicate `index` under `master`. Injective in `index` for a fixed master.
pub fn replicate_seed(master: u64, index: u64) -> u64 {
    // mix is a bijection, so distinct indices give distinct seeds
    mix(derive(master, Stream::Replicate).wrapping_add(index))
}

/// Generator for one sub-stream of `seed`.
pub fn rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, stream))
}

/// A uniform variate on (0, 1].
#[inline]
pub(crate) fn open_unit<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}
