use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const GENERATOR_ID: &str = "chacha8";

/// The generator for chain or path `index`: every index gets its own
/// ChaCha stream under the same key, so a sample depends only on
/// (seed, index) and never on which worker produced it.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
