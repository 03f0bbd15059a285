//! Seeded generators for conforming and anomalous count populations.
//!
//! Every stream is a pure function of its [`GeneratorSpec`]; see [`crate::rng`]
//! for the random source.

mod graph;
mod sampling;

pub use graph::{build_synthetic_graph, EgoPlan, GraphPlan, SyntheticGraph};
pub use sampling::{simulate_id_sampling, HashedLogUniform, IdSampler};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::rng::{self, Rng};

/// Population model and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    /// `floor(10^u)` with `u` uniform on `[log10(lo), log10(hi))`.
    LogUniform { lo: u64, hi: u64 },
    /// Continuous Pareto with density `∝ k^-alpha` on `[kmin, kmax + 1)`,
    /// drawn by inverse CDF and rounded down.
    PowerLaw { alpha: f64, kmin: u64, kmax: u64 },
    /// Forced-minimum signup: with probability `q` exactly `m`, otherwise
    /// `max(m, power-law draw)`.
    PinterestMin5 {
        m: u64,
        q: f64,
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default = "default_kmin")]
        kmin: u64,
        #[serde(default = "default_kmax")]
        kmax: u64,
    },
    /// Uniform integers on `[a, b]`.
    BotnetBand { a: u64, b: u64 },
}

fn default_alpha() -> f64 {
    2.0
}
fn default_kmin() -> u64 {
    1
}
fn default_kmax() -> u64 {
    1_000_000
}

impl Model {
    pub fn log_uniform(lo: u64, hi: u64) -> Self {
        Model::LogUniform { lo, hi }
    }

    pub fn power_law(alpha: f64, kmin: u64, kmax: u64) -> Self {
        Model::PowerLaw { alpha, kmin, kmax }
    }

    /// Forced minimum `m` with stick probability `q` over the default
    /// power-law tail (alpha 2 on `[1, 10^6]`).
    pub fn pinterest(m: u64, q: f64) -> Self {
        Model::PinterestMin5 {
            m,
            q,
            alpha: default_alpha(),
            kmin: default_kmin(),
            kmax: default_kmax(),
        }
    }

    pub fn botnet_band(a: u64, b: u64) -> Self {
        Model::BotnetBand { a, b }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::LogUniform { .. } => "log_uniform",
            Model::PowerLaw { .. } => "power_law",
            Model::PinterestMin5 { .. } => "pinterest_min5",
            Model::BotnetBand { .. } => "botnet_band",
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match *self {
            Model::LogUniform { lo, hi } => {
                if lo < 1 {
                    return Err(ConfigError::new("log_uniform: lo must be at least 1"));
                }
                if hi < lo.saturating_mul(10) {
                    return Err(ConfigError::new(format!(
                        "log_uniform: [{lo}, {hi}) spans less than one decade"
                    )));
                }
            }
            Model::PowerLaw { alpha, kmin, kmax } => validate_power_law(alpha, kmin, kmax)?,
            Model::PinterestMin5 {
                m,
                q,
                alpha,
                kmin,
                kmax,
            } => {
                if m < 1 {
                    return Err(ConfigError::new("pinterest_min5: m must be at least 1"));
                }
                if !(0.0..=1.0).contains(&q) {
                    return Err(ConfigError::new("pinterest_min5: q must lie in [0, 1]"));
                }
                validate_power_law(alpha, kmin, kmax)?;
            }
            Model::BotnetBand { a, b } => {
                if a < 1 || a > b {
                    return Err(ConfigError::new(format!(
                        "botnet_band: need 1 <= a <= b, got [{a}, {b}]"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn validate_power_law(alpha: f64, kmin: u64, kmax: u64) -> Result<(), ConfigError> {
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(ConfigError::new("power_law: alpha must be finite and > 1"));
    }
    if kmin < 1 {
        return Err(ConfigError::new("power_law: kmin must be at least 1"));
    }
    if kmax < kmin.saturating_mul(10) {
        return Err(ConfigError::new(format!(
            "power_law: [{kmin}, {kmax}] spans less than one decade"
        )));
    }
    Ok(())
}

/// A population to generate: model, size and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub model: Model,
    pub n: u64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(model: Model, n: u64, seed: u64) -> Self {
        Self { model, n, seed }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n < 1 {
            return Err(ConfigError::new("population size n must be at least 1"));
        }
        self.model.validate()
    }

    pub fn stream(&self) -> Result<ValueStream, ConfigError> {
        self.validate()?;
        Ok(ValueStream::new(&self.model, self.n, self.seed, rng::STREAM_VALUES))
    }
}

pub fn gen_log_uniform(spec: &GeneratorSpec) -> Result<ValueStream, ConfigError> {
    expect_model(spec, "log_uniform")?;
    spec.stream()
}

pub fn gen_power_law(spec: &GeneratorSpec) -> Result<ValueStream, ConfigError> {
    expect_model(spec, "power_law")?;
    spec.stream()
}

pub fn gen_pinterest_min5(spec: &GeneratorSpec) -> Result<ValueStream, ConfigError> {
    expect_model(spec, "pinterest_min5")?;
    spec.stream()
}

pub fn gen_botnet_band(spec: &GeneratorSpec) -> Result<ValueStream, ConfigError> {
    expect_model(spec, "botnet_band")?;
    spec.stream()
}

fn expect_model(spec: &GeneratorSpec, name: &str) -> Result<(), ConfigError> {
    if spec.model.name() == name {
        Ok(())
    } else {
        Err(ConfigError::new(format!(
            "expected a {name} spec, got {}",
            spec.model.name()
        )))
    }
}

#[derive(Debug, Clone)]
struct PowerLawSampler {
    lo_pow: f64,
    hi_pow: f64,
    inv_exp: f64,
    kmin: u64,
    kmax: u64,
}

impl PowerLawSampler {
    fn new(alpha: f64, kmin: u64, kmax: u64) -> Self {
        let exp = 1.0 - alpha;
        Self {
            lo_pow: (kmin as f64).powf(exp),
            hi_pow: (kmax as f64 + 1.0).powf(exp),
            inv_exp: 1.0 / exp,
            kmin,
            kmax,
        }
    }

    fn draw(&self, u: f64) -> u64 {
        let x = (self.lo_pow - u * (self.lo_pow - self.hi_pow)).powf(self.inv_exp);
        (x.floor() as u64).clamp(self.kmin, self.kmax)
    }
}

#[derive(Debug, Clone)]
enum Sampler {
    LogUniform { log_lo: f64, span: f64, lo: u64, hi: u64 },
    PowerLaw(PowerLawSampler),
    Pinterest { m: u64, q: f64, tail: PowerLawSampler },
    Band { a: u64, b: u64 },
}

/// Iterator over the values of one generated population.
#[derive(Debug, Clone)]
pub struct ValueStream {
    sampler: Sampler,
    values: Rng,
    aux: Rng,
    remaining: u64,
}

impl ValueStream {
    /// Unvalidated constructor; `stream` selects the value sub-stream and
    /// `stream + 1` the auxiliary one.
    pub(crate) fn new(model: &Model, n: u64, seed: u64, stream: u64) -> Self {
        let sampler = match *model {
            Model::LogUniform { lo, hi } => {
                let log_lo = (lo as f64).log10();
                Sampler::LogUniform {
                    log_lo,
                    span: (hi as f64).log10() - log_lo,
                    lo,
                    hi,
                }
            }
            Model::PowerLaw { alpha, kmin, kmax } => {
                Sampler::PowerLaw(PowerLawSampler::new(alpha, kmin, kmax))
            }
            Model::PinterestMin5 {
                m,
                q,
                alpha,
                kmin,
                kmax,
            } => Sampler::Pinterest {
                m,
                q,
                tail: PowerLawSampler::new(alpha, kmin, kmax),
            },
            Model::BotnetBand { a, b } => Sampler::Band { a, b },
        };
        Self {
            sampler,
            values: rng::stream(seed, stream),
            aux: rng::stream(seed, stream + 1),
            remaining: n,
        }
    }

    fn draw(&mut self) -> u64 {
        match &self.sampler {
            Sampler::LogUniform { log_lo, span, lo, hi } => {
                let u: f64 = self.values.gen();
                let v = 10f64.powf(log_lo + u * span).floor() as u64;
                v.clamp(*lo, hi - 1)
            }
            Sampler::PowerLaw(p) => p.draw(self.values.gen()),
            Sampler::Pinterest { m, q, tail } => {
                // The tail is drawn on every step so the value stream stays
                // aligned with a plain power-law stream of the same seed.
                let t = tail.draw(self.values.gen());
                let stick = self.aux.gen::<f64>() < *q;
                if stick {
                    *m
                } else {
                    t.max(*m)
                }
            }
            Sampler::Band { a, b } => self.values.gen_range(*a..=*b),
        }
    }
}

impl Iterator for ValueStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        Some(self.draw())
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (n, Some(n))
    }
}
