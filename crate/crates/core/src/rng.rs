//! Seeded, splittable random streams.
//!
//! Every random quantity in the crate is drawn from a [`RandomStream`]
//! identified by `(seed, stream_id)`. Streams are ChaCha8 generators keyed by
//! the seed and positioned on the ChaCha stream selected by `stream_id`, so
//! distinct ids never overlap and a given pair always replays the same draws.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A fresh stream for a named sub-purpose (placement, phases, errors, ...).
    ///
    /// The child depends only on `(seed, stream_id, label)`, never on how many
    /// draws the parent has already made.
    pub fn derive(&self, label: u64) -> RandomStream {
        let child_seed = splitmix64(self.seed ^ splitmix64(label.wrapping_add(0x5851_f42d_4c95_7f2d)));
        RandomStream::new(child_seed, self.stream_id)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Standard circularly-symmetric complex Gaussian: real and imaginary
    /// parts independent, each with variance 1/2.
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Complex64::new(s * self.standard_normal(), s * self.standard_normal())
    }

    /// Unit-modulus complex number with phase uniform on [0, 2π).
    pub fn unit_phase(&mut self) -> Complex64 {
        Complex64::from_polar(1.0, self.uniform_range(0.0, std::f64::consts::TAU))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

/// SplitMix64 finalizer; used to decorrelate derived seeds.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}
