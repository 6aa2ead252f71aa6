//! Laplace noise, noisy sums and the exact density of the released value.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, Open01};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dist::{DiscreteDistribution, SystemConfig, SUPPORT_MERGE_TOL};
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Above this exponent magnitude the mixture is summed in log space.
pub const LOG_SPACE_THRESHOLD: f64 = 700.0;

/// Draws per independent stream in [`sample_many`].
const CHUNK: usize = 1 << 14;

/// Zero-mean Laplace noise with scale `theta`: density `e^{-|z|/θ} / 2θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceNoise {
    theta: f64,
}

impl LaplaceNoise {
    pub fn new(theta: f64) -> Result<Self> {
        if theta.is_finite() && theta > 0.0 {
            Ok(Self { theta })
        } else {
            Err(Error::InvalidParameter(format!(
                "Laplace scale must be finite and > 0, got {theta}"
            )))
        }
    }

    pub fn theta(self) -> f64 {
        self.theta
    }

    pub fn variance(self) -> f64 {
        2.0 * self.theta * self.theta
    }

    pub fn density(self, z: f64) -> f64 {
        (-z.abs() / self.theta).exp() / (2.0 * self.theta)
    }

    pub fn cdf(self, z: f64) -> f64 {
        if z < 0.0 {
            0.5 * (z / self.theta).exp()
        } else {
            1.0 - 0.5 * (-z / self.theta).exp()
        }
    }
}

/// Inverse-CDF transform of a uniform `u ∈ (0, 1)`.
pub fn laplace_from_uniform(u: f64, theta: f64) -> f64 {
    let c = u - 0.5;
    -theta * c.signum() * (-2.0 * c.abs()).ln_1p()
}

/// Seeded Laplace sampler. Holds its own generator; use one per thread.
#[derive(Debug, Clone)]
pub struct LaplaceSampler {
    noise: LaplaceNoise,
    rng: ChaCha8Rng,
}

impl LaplaceSampler {
    pub fn new(noise: LaplaceNoise, seed: u64) -> Self {
        Self {
            noise,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn with_stream(noise: LaplaceNoise, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { noise, rng }
    }

    pub fn draw(&mut self) -> f64 {
        let u: f64 = Open01.sample(&mut self.rng);
        laplace_from_uniform(u, self.noise.theta)
    }
}

/// One draw from a fresh generator seeded with `seed`.
pub fn sample(noise: LaplaceNoise, seed: u64) -> f64 {
    LaplaceSampler::new(noise, seed).draw()
}

/// `n` draws. Chunk `k` uses ChaCha stream `k` of `seed`, so the output is
/// the same whichever execution mode runs it.
pub fn sample_many(noise: LaplaceNoise, seed: u64, n: usize, exec: Execution) -> Vec<f64> {
    let chunks = n.div_ceil(CHUNK);
    exec.map_range(chunks, |k| {
        let len = CHUNK.min(n - k * CHUNK);
        let mut s = LaplaceSampler::with_stream(noise, seed, k as u64);
        (0..len).map(|_| s.draw()).collect::<Vec<_>>()
    })
    .concat()
}

/// Sum of the present users' values plus one Laplace draw.
///
/// Users missing from `realized`, or mapped to `None`, are absent.
pub fn answer_query(
    config: &SystemConfig,
    realized: &BTreeMap<String, Option<f64>>,
    noise: LaplaceNoise,
    seed: u64,
) -> Result<f64> {
    let mut total = 0.0;
    for (id, value) in realized {
        let user = config.user(&id.as_str().into())?;
        if let Some(v) = value {
            if user.distribution.index_of(*v).is_none() {
                return Err(Error::OutOfSupport {
                    user: id.clone(),
                    value: *v,
                });
            }
            total += v;
        }
    }
    Ok(total + sample(noise, seed))
}

/// Density `y ↦ Σ_x p(x) e^{-|y-x|/θ} / 2θ` of prior plus Laplace noise.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceMixture {
    atoms: DiscreteDistribution,
    theta: f64,
}

impl LaplaceMixture {
    pub fn new(atoms: DiscreteDistribution, noise: LaplaceNoise) -> Self {
        Self {
            atoms,
            theta: noise.theta,
        }
    }

    pub fn atoms(&self) -> &DiscreteDistribution {
        &self.atoms
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn evaluate(&self, y: f64) -> f64 {
        let spread = (y - self.atoms.min())
            .abs()
            .max((y - self.atoms.max()).abs());
        if spread / self.theta > LOG_SPACE_THRESHOLD {
            return self.log_evaluate(y).exp();
        }
        self.atoms
            .iter()
            .map(|(x, m)| m * (-(y - x).abs() / self.theta).exp())
            .sum::<f64>()
            / (2.0 * self.theta)
    }

    /// Natural log of [`evaluate`](Self::evaluate), summed as a log-sum-exp.
    pub fn log_evaluate(&self, y: f64) -> f64 {
        log_sum_exp(
            self.atoms
                .iter()
                .map(|(x, m)| m.ln() - (y - x).abs() / self.theta),
        ) - (2.0 * self.theta).ln()
    }

    pub fn cdf(&self, y: f64) -> f64 {
        let noise = LaplaceNoise { theta: self.theta };
        self.atoms.iter().map(|(x, m)| m * noise.cdf(y - x)).sum()
    }

    /// Points where the density is not differentiable: the atoms.
    pub fn kinks(&self) -> &[f64] {
        self.atoms.support()
    }

    /// `ln Σ p(x) e^{sign·x/θ}`: the density's log-slope constant as
    /// `y → ±∞` (`sign = +1` for `+∞`).
    pub fn log_tail_weight(&self, sign: f64) -> f64 {
        log_sum_exp(
            self.atoms
                .iter()
                .map(|(x, m)| m.ln() + sign * x / self.theta),
        )
    }

    pub fn same_scale(&self, other: &Self) -> bool {
        (self.theta - other.theta).abs() <= SUPPORT_MERGE_TOL * self.theta.max(1.0)
    }
}

pub fn output_density(prior: &DiscreteDistribution, noise: LaplaceNoise) -> LaplaceMixture {
    LaplaceMixture::new(prior.clone(), noise)
}

pub(crate) fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.collect();
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::UserSpec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_bad_scale() {
        assert!(LaplaceNoise::new(0.0).is_err());
        assert!(LaplaceNoise::new(-1.0).is_err());
        assert!(LaplaceNoise::new(f64::NAN).is_err());
    }

    #[test]
    fn inverse_cdf_median_and_quartiles() {
        assert_eq!(laplace_from_uniform(0.5, 3.0), 0.0);
        // F(z) = 1/4 at z = -θ ln 2
        assert_abs_diff_eq!(
            laplace_from_uniform(0.25, 2.0),
            -2.0 * 2f64.ln(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            laplace_from_uniform(0.75, 2.0),
            2.0 * 2f64.ln(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn sampling_is_seeded() {
        let n = LaplaceNoise::new(1.5).unwrap();
        assert_eq!(sample(n, 42), sample(n, 42));
        assert_ne!(sample(n, 42), sample(n, 43));
        let a = sample_many(n, 7, 40_000, Execution::Sequential);
        let b = sample_many(n, 7, 40_000, Execution::Parallel);
        assert_eq!(a, b);
        assert_eq!(a.len(), 40_000);
    }

    #[test]
    fn point_mass_density_peak() {
        let m = output_density(
            &DiscreteDistribution::point_mass(3.0),
            LaplaceNoise::new(1.0).unwrap(),
        );
        assert_abs_diff_eq!(m.evaluate(3.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m.cdf(3.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn log_space_agrees_with_direct() {
        let p = DiscreteDistribution::uniform(&[0.0, 1.0, 4.0]).unwrap();
        let m = output_density(&p, LaplaceNoise::new(0.7).unwrap());
        for y in [-3.0, 0.2, 2.5, 9.0] {
            assert_abs_diff_eq!(m.log_evaluate(y), m.evaluate(y).ln(), epsilon = 1e-12);
        }
        // Far tail where the direct sum underflows.
        let tiny = output_density(&p, LaplaceNoise::new(1e-3).unwrap());
        assert!(tiny.log_evaluate(10.0).is_finite());
    }

    #[test]
    fn answer_query_sums_present_values() {
        let config = SystemConfig::new(vec![
            UserSpec::new(
                "u1",
                0.5,
                DiscreteDistribution::uniform(&[1.0, 5.0]).unwrap(),
            ),
            UserSpec::new(
                "u2",
                0.5,
                DiscreteDistribution::uniform(&[1.0, 2.0]).unwrap(),
            ),
        ])
        .unwrap();
        let noise = LaplaceNoise::new(1e-300).unwrap();
        let realized =
            BTreeMap::from([("u1".to_string(), Some(5.0)), ("u2".to_string(), Some(2.0))]);
        assert_abs_diff_eq!(
            answer_query(&config, &realized, noise, 1).unwrap(),
            7.0,
            epsilon = 1e-12
        );

        let absent = BTreeMap::from([("u2".to_string(), None)]);
        let n1 = LaplaceNoise::new(1.0).unwrap();
        assert_eq!(
            answer_query(&config, &absent, n1, 9).unwrap(),
            sample(n1, 9)
        );

        let bad = BTreeMap::from([("u1".to_string(), Some(3.0))]);
        assert!(matches!(
            answer_query(&config, &bad, n1, 1),
            Err(Error::OutOfSupport { .. })
        ));
        let unknown = BTreeMap::from([("zz".to_string(), Some(1.0))]);
        assert!(answer_query(&config, &unknown, n1, 1).is_err());
    }
}
