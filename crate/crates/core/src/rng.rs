//! Seeded random streams.
//!
//! Every component draws from its own ChaCha8 stream derived from one user
//! seed, so the estimator, the preprocessing phase and the sampler can be
//! varied independently while a run stays reproducible from a single number.
//! Bounded integer draws go through `rand`'s `random_range`, which rejects
//! on the modulus and is therefore unbiased.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Named sub-streams of a run seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    /// Uniform vertex queries answered by the oracle.
    Oracle,
    Estimator,
    Preprocess,
    Sampling,
    Harness,
    Generator,
    /// Uniform vertex queries of a sampling session started from a saved
    /// state. Reusing [`Stream::Oracle`] there would replay the draws that
    /// built `S`.
    ResumedOracle,
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Oracle => 1,
            Stream::Estimator => 2,
            Stream::Preprocess => 3,
            Stream::Sampling => 4,
            Stream::Harness => 5,
            Stream::Generator => 6,
            Stream::ResumedOracle => 7,
        }
    }
}

/// RNG for `stream` under the run seed `seed`.
pub fn stream_rng(seed: u64, stream: Stream) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream.id());
    rng
}
