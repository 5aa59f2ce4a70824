use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Default master seed for reproducible runs.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;

/// A ChaCha20 stream keyed by `(master_seed, stream_index)`.
///
/// Identical keys give identical draw sequences; distinct stream indices
/// select disjoint ChaCha streams.
#[derive(Debug, Clone)]
pub struct RandomSource {
    master_seed: u64,
    stream_index: u64,
    rng: ChaCha20Rng,
}

impl RandomSource {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_index);
        RandomSource {
            master_seed,
            stream_index,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// A fresh source on another stream of the same master seed.
    pub fn fork(&self, stream_index: u64) -> Self {
        RandomSource::new(self.master_seed, stream_index)
    }

    pub fn rng(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }
}
