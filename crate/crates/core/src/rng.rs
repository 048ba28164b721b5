//! Named random streams derived from a single run seed.
//!
//! Every consumer of randomness owns a [`StreamRng`] tagged with the
//! [`Stream`] it was derived from. Re-deriving a stream from the same seed
//! reproduces it without touching any other stream.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stream {
    Env,
    Alice,
    Bob,
    GenA,
    GenB,
    Eval,
    Init,
    Bench,
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Env => 1,
            Stream::Alice => 2,
            Stream::Bob => 3,
            Stream::GenA => 4,
            Stream::GenB => 5,
            Stream::Eval => 6,
            Stream::Init => 7,
            Stream::Bench => 8,
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// A ChaCha8 generator tagged with the stream it belongs to.
#[derive(Debug, Clone)]
pub struct StreamRng {
    stream: Stream,
    rng: ChaCha8Rng,
}

impl StreamRng {
    pub fn new(seed: u64, stream: Stream) -> Self {
        Self::with_index(seed, stream, 0)
    }

    /// Derives an independent sub-stream, e.g. one per evaluation event.
    pub fn with_index(seed: u64, stream: Stream, index: u64) -> Self {
        let mixed = splitmix64(splitmix64(seed ^ splitmix64(stream.id())) ^ splitmix64(index));
        let mut rng = ChaCha8Rng::seed_from_u64(mixed);
        rng.set_stream(stream.id());
        Self { stream, rng }
    }

    pub fn stream(&self) -> Stream {
        self.stream
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn normals(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }

    /// Uniform draw in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.unit()
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.rng.random_range(0..len)
    }
}

impl RngCore for StreamRng {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
