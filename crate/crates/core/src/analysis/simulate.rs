//! Monte Carlo replicates of two regions sharing one trend under
//! `Y^(k)_t = Θ^(k)(B) μ_t + ε^(k)_t`.
//!
//! Replicate `r` draws from ChaCha stream `r` of the seed, and replicates
//! are reduced in fixed-size chunks combined in index order, so summaries
//! are bit-identical for any thread count.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filterdesign::{variance_inflation, FilterSet};
use crate::ratpoly::RationalPoly;

use super::compare::{expected_bias, ComparisonMode, ComparisonSpec, TrendPolynomial};
use super::filtering::FilterWeights;

const CHUNK: usize = 4096;

/// Zero-mean unit-scale noise source; draws are multiplied by the period's
/// standard deviation.
pub trait NoiseSampler: Sync {
    fn sample(&self, rng: &mut ChaCha8Rng) -> f64;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct GaussianNoise;

impl NoiseSampler for GaussianNoise {
    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        StandardNormal.sample(rng)
    }
}

/// Error standard deviation per period; periods not listed use `default`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoiseLevels {
    pub default: f64,
    pub per_period: BTreeMap<u32, f64>,
}

impl NoiseLevels {
    pub fn uniform(sd: f64) -> Self {
        NoiseLevels {
            default: sd,
            per_period: BTreeMap::new(),
        }
    }

    pub fn with(mut self, k: u32, sd: f64) -> Self {
        self.per_period.insert(k, sd);
        self
    }

    pub fn sd(&self, k: u32) -> f64 {
        self.per_period.get(&k).copied().unwrap_or(self.default)
    }

    fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if ok(self.default) && self.per_period.values().all(|&v| ok(v)) {
            Ok(())
        } else {
            Err(Error::InvalidSimulation(
                "noise standard deviations must be finite and >= 0".into(),
            ))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationSpec {
    pub trend: TrendPolynomial,
    pub noise_sd: NoiseLevels,
    pub comparison: ComparisonSpec,
    pub replicates: usize,
    pub seed: u64,
}

impl SimulationSpec {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidSimulation(
                "replicates must be at least 1".into(),
            ));
        }
        self.noise_sd.validate()?;
        self.comparison.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub mode: ComparisonMode,
    pub replicates: usize,
    pub seed: u64,
    /// Empirical mean of `value_a - value_b`.
    pub bias: f64,
    /// Monte Carlo standard error of `bias`.
    pub standard_error: f64,
    pub expected_bias: f64,
    /// Empirical variance of the noise part of each side's estimate.
    pub noise_variance_a: f64,
    pub noise_variance_b: f64,
    /// `sd² × Σψ²` for each side.
    pub predicted_noise_variance_a: f64,
    pub predicted_noise_variance_b: f64,
}

/// One side of the comparison: which period is sampled and how it is reduced.
struct Side {
    sd: f64,
    weights: FilterWeights,
    /// Noise-free `Θ^(k)μ` at `t0, t0-1, ...`.
    signal: Vec<f64>,
    clean: f64,
    inflation: f64,
}

impl Side {
    fn new(
        mode: ComparisonMode,
        k: u32,
        spec: &SimulationSpec,
        fs: Option<&FilterSet>,
    ) -> Result<Self> {
        let filter = match mode {
            ComparisonMode::Proper => fs.and_then(|fs| fs.psi(k)).cloned().ok_or_else(|| {
                Error::InvalidSimulation(format!("proper mode needs a filter for period {k}"))
            })?,
            _ => RationalPoly::one(),
        };
        let weights = FilterWeights::new(&filter);
        let t0 = spec.comparison.t0;
        let signal: Vec<f64> = (0..weights.len() as i32)
            .map(|lag| {
                let s: f64 = (0..k as i32)
                    .map(|i| spec.trend.eval(f64::from(t0 - lag - i)))
                    .sum();
                s / f64::from(k)
            })
            .collect();
        let clean = weights.apply(&signal);
        Ok(Side {
            sd: spec.noise_sd.sd(k),
            weights,
            clean,
            inflation: variance_inflation(&filter).to_f64(),
            signal,
        })
    }

    fn draw<N: NoiseSampler>(&self, noise: &N, rng: &mut ChaCha8Rng, buf: &mut Vec<f64>) -> f64 {
        buf.clear();
        if self.sd == 0.0 {
            buf.extend_from_slice(&self.signal);
        } else {
            buf.extend(self.signal.iter().map(|s| s + self.sd * noise.sample(rng)));
        }
        self.weights.apply(buf)
    }
}

/// Running count, mean and sum of squared deviations.
#[derive(Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.n;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if other.n == 0.0 {
            return self;
        }
        if self.n == 0.0 {
            return other;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + delta * (other.n / n),
            m2: self.m2 + other.m2 + delta * delta * (self.n * other.n / n),
        }
    }

    fn variance(&self) -> f64 {
        if self.n > 1.0 {
            (self.m2 / (self.n - 1.0)).max(0.0)
        } else {
            0.0
        }
    }
}

/// Gaussian-noise simulation; see [`simulate_bias_with`].
pub fn simulate_bias(spec: &SimulationSpec, fs: Option<&FilterSet>) -> Result<SimulationSummary> {
    simulate_bias_with(spec, fs, &GaussianNoise)
}

pub fn simulate_bias_with<N: NoiseSampler>(
    spec: &SimulationSpec,
    fs: Option<&FilterSet>,
    noise: &N,
) -> Result<SimulationSummary> {
    spec.validate()?;
    let cmp = &spec.comparison;
    let a = Side::new(cmp.mode, cmp.reference_period, spec, fs)?;
    let b = Side::new(cmp.mode, cmp.other_period, spec, fs)?;

    let chunks = spec.replicates.div_ceil(CHUNK);
    let partials: Vec<[Moments; 3]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut m = [Moments::default(); 3];
            let mut buf = Vec::new();
            let start = c * CHUNK;
            let end = (start + CHUNK).min(spec.replicates);
            for r in start..end {
                let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                rng.set_stream(r as u64);
                let va = a.draw(noise, &mut rng, &mut buf);
                let vb = b.draw(noise, &mut rng, &mut buf);
                m[0].push(va - vb);
                m[1].push(va - a.clean);
                m[2].push(vb - b.clean);
            }
            m
        })
        .collect();
    let [diff, na, nb] = partials
        .into_iter()
        .fold([Moments::default(); 3], |acc, p| {
            [acc[0].merge(p[0]), acc[1].merge(p[1]), acc[2].merge(p[2])]
        });

    Ok(SimulationSummary {
        mode: cmp.mode,
        replicates: spec.replicates,
        seed: spec.seed,
        bias: diff.mean,
        standard_error: (diff.variance() / diff.n).sqrt(),
        expected_bias: expected_bias(&spec.trend, cmp, fs)?,
        noise_variance_a: na.variance(),
        noise_variance_b: nb.variance(),
        predicted_noise_variance_a: a.sd * a.sd * a.inflation,
        predicted_noise_variance_b: b.sd * b.sd * b.inflation,
    })
}
