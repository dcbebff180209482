use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// The random stream type used everywhere in the simulator.
pub type SimRng = ChaCha8Rng;

/// Derives an independent, platform-stable random stream from a scenario seed
/// and a stream label such as `"net"`, `"init"` or `"sense/3"`.
///
/// The 256-bit ChaCha key is the SHA-256 of the little-endian seed followed by
/// the label bytes, so distinct labels never share a keystream.
pub fn seeded_rng(seed: u64, stream: &str) -> SimRng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(stream.as_bytes());
    let key: [u8; 32] = hasher.finalize().into();
    ChaCha8Rng::from_seed(key)
}
