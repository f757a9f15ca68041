//! Seeded, counter-based random streams.
//!
//! Every random consumer draws from its own ChaCha20 stream keyed by the run seed and a
//! fixed stream id, so outputs do not depend on the order in which consumers run.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Quadrature sampling.
pub const STREAM_QUADRATURES: u64 = 1;
/// Additive detector noise on the signal trace.
pub const STREAM_SIGNAL_NOISE: u64 = 2;
/// Vacuum quadratures for the blocked-signal trace.
pub const STREAM_BLOCKED: u64 = 3;
/// Additive detector noise on the blocked trace.
pub const STREAM_BLOCKED_NOISE: u64 = 4;

pub fn stream(seed: u64, stream_id: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}
