//! Counter-based random streams.
//!
//! Every replication gets its own ChaCha stream addressed by `(seed, rep)`,
//! so a run produces the same numbers whatever the thread count or the
//! order in which replications are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent purposes within one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Design = 1,
    Errors = 2,
    Moments = 3,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for `purpose` of replication `rep` under the run seed `seed`.
pub fn sub_seed(seed: u64, rep: u64, purpose: Purpose) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(purpose as u64)).wrapping_add(rep))
}

/// Stream `stream` of the generator keyed by `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
