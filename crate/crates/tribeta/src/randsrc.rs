//! Reproducible random variates.
//!
//! Every realization of a Monte Carlo experiment owns an [`RngStream`] keyed by
//! `(base_seed, stream_index)`: a ChaCha8 generator seeded from the base seed
//! with its stream set to the realization index. Parallel runs therefore
//! produce bit-identical variates regardless of the worker count.

use crate::{Error, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use std::f64::consts::TAU;

/// Independent, reproducible random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    base_seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(base_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
        rng.set_stream(stream_index);
        Self { base_seed, stream_index, rng }
    }

    pub fn base_seed(&self) -> u64 {
        self.base_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Standard normal variate.
    pub fn normal01(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// N(0,1) + i·N(0,1).
    pub fn complex_normal(&mut self) -> C64 {
        let re = self.normal01();
        let im = self.normal01();
        C64::new(re, im)
    }

    /// Uniform on [0, 1).
    pub fn uniform01(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform angle on [0, 2π).
    pub fn uniform_phase(&mut self) -> f64 {
        TAU * self.uniform01()
    }

    /// e^{iθ} with θ uniform.
    pub fn unit_phase(&mut self) -> C64 {
        C64::from_polar(1.0, self.uniform_phase())
    }

    /// Gamma(shape, 1) variate.
    pub fn gamma(&mut self, shape: f64) -> Result<f64> {
        let g = Gamma::new(shape, 1.0).map_err(|e| Error::Domain(format!("gamma shape {shape}: {e}")))?;
        Ok(g.sample(&mut self.rng))
    }

    /// χ_k variate (density ∝ x^{k−1} e^{−x²/2}) for real k > 0.
    pub fn chi(&mut self, k: f64) -> Result<f64> {
        if !(k > 0.0) {
            return Err(Error::Domain(format!("chi requires k > 0, got {k}")));
        }
        loop {
            let x = (2.0 * self.gamma(0.5 * k)?).sqrt();
            // Gamma variates with tiny shape can underflow to zero.
            if x > 0.0 {
                return Ok(x);
            }
        }
    }
}

/// Run `f` once per realization `0..m` with stream `(seed, j)`, in parallel,
/// returning results in realization order.
pub fn par_realizations<T, F>(seed: u64, m: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(RngStream) -> T + Sync + Send,
{
    (0..m as u64).into_par_iter().map(|j| f(RngStream::new(seed, j))).collect()
}
