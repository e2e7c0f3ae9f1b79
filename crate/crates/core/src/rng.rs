//! Seeded, splittable random streams.
//!
//! Every consumer draws from a ChaCha8 stream keyed by the experiment seed
//! and a domain tag, with the stream id selecting the substream. Code
//! construction and channel noise therefore never share state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Domain tag for code construction draws.
pub const CONSTRUCTION: u64 = 0x636f_6e73_7472_7563;
/// Domain tag for channel noise draws.
pub const NOISE: u64 = 0x6e6f_6973_655f_6177;

// splitmix64 finalizer
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a key from a seed and any number of salt words.
pub fn derive_key(seed: u64, salt: &[u64]) -> u64 {
    salt.iter()
        .fold(mix(seed), |acc, &s| mix(acc ^ mix(s.wrapping_add(0x9e37_79b9_7f4a_7c15))))
}

/// Substream `index` of the generator keyed by `(seed, domain)`.
pub fn substream(seed: u64, domain: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_key(seed, &[domain]));
    rng.set_stream(index);
    rng
}

/// Noise stream for one frame at one operating point.
pub fn frame_stream(seed: u64, ebn0_db: f64, frame: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_key(seed, &[NOISE, ebn0_db.to_bits()]));
    rng.set_stream(frame);
    rng
}
