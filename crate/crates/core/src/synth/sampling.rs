use rand::Rng as _;

use crate::error::ConfigError;
use crate::rng::{self, Rng};

/// Walks an id space with a fixed stride, stepping by one past ids that turn
/// out to be missing (unassigned or protected accounts).
#[derive(Debug, Clone)]
pub struct IdSampler {
    next: u64,
    space: u64,
    stride: u64,
    miss_prob: f64,
    rng: Rng,
}

impl Iterator for IdSampler {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        while self.next < self.space {
            let id = self.next;
            let missing = self.miss_prob > 0.0 && self.rng.gen::<f64>() < self.miss_prob;
            if missing {
                self.next = id + 1;
            } else {
                self.next = id.saturating_add(self.stride);
                return Some(id);
            }
        }
        None
    }
}

/// Ids `0..space` visited by the stride-then-increment-on-miss crawl.
pub fn simulate_id_sampling(
    space: u64,
    stride: u64,
    miss_prob: f64,
    seed: u64,
) -> Result<IdSampler, ConfigError> {
    if stride < 1 {
        return Err(ConfigError::new("stride must be at least 1"));
    }
    if !(0.0..1.0).contains(&miss_prob) {
        return Err(ConfigError::new("miss probability must lie in [0, 1)"));
    }
    Ok(IdSampler {
        next: 0,
        space,
        stride,
        miss_prob,
        rng: rng::stream(seed, rng::STREAM_AUX),
    })
}

/// A log-uniform count attached to every id of an arbitrarily large id space,
/// derived by hashing the id so nothing is materialized.
#[derive(Debug, Clone, Copy)]
pub struct HashedLogUniform {
    seed: u64,
    log_lo: f64,
    span: f64,
    lo: u64,
    hi: u64,
}

impl HashedLogUniform {
    pub fn new(lo: u64, hi: u64, seed: u64) -> Result<Self, ConfigError> {
        crate::synth::Model::log_uniform(lo, hi).validate()?;
        let log_lo = (lo as f64).log10();
        Ok(Self {
            seed,
            log_lo,
            span: (hi as f64).log10() - log_lo,
            lo,
            hi,
        })
    }

    pub fn value(&self, id: u64) -> u64 {
        let u = rng::unit_f64(rng::splitmix64(id ^ rng::splitmix64(self.seed)));
        let v = 10f64.powf(self.log_lo + u * self.span).floor() as u64;
        v.clamp(self.lo, self.hi - 1)
    }
}
