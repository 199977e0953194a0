//! Seeded random streams.
//!
//! Every random quantity in the crate comes from a [`ChaCha8Rng`] keyed by a
//! 64-bit seed plus a stream id, so that independent consumers (dataset,
//! latent noise, weight init, shuffling) never share state. Normal deviates
//! use the polar-free Box–Muller transform on two uniform `f64`s in `(0, 1]`;
//! both outputs of each pair are used. This transform is part of the
//! reproducibility contract and must not change.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream ids used across the crate.
pub mod stream {
    pub const RING: u64 = 1;
    pub const LATENT: u64 = 2;
    pub const INIT_D: u64 = 3;
    pub const INIT_G: u64 = 4;
    pub const SHUFFLE: u64 = 5;
    pub const TRAIN_NOISE: u64 = 6;
    pub const EVAL_NOISE: u64 = 7;
}

/// Deterministic generator with a cached second Box–Muller deviate.
#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
    spare: Option<f64>,
}

impl SeededRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        SeededRng { inner, spare: None }
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.gen_range(0..n)
    }

    /// Standard normal deviate (Box–Muller).
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 - U lies in (0, 1], so the log is finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let th = std::f64::consts::TAU * u2;
        self.spare = Some(r * th.sin());
        r * th.cos()
    }

    /// Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.inner.gen_range(0..=i);
            xs.swap(i, j);
        }
    }
}
