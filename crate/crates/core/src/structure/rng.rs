use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seedable, platform-stable random source used for all sampling.
///
/// Backed by ChaCha8. Independent generators for parallel work are obtained
/// either with [`RngState::with_stream`] (same seed, distinct stream) or by
/// [`RngState::split`].
#[derive(Clone, Debug)]
pub struct RngState {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    pub const ALGORITHM: &'static str = "chacha8";

    pub fn from_seed(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        RngState {
            seed,
            stream,
            inner,
        }
    }

    /// Draws a fresh seed from system entropy.
    pub fn from_entropy() -> Self {
        Self::from_seed(rand::rng().next_u64())
    }

    /// Derives an independent child generator, advancing this one.
    pub fn split(&mut self) -> RngState {
        RngState::from_seed(self.inner.next_u64())
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
