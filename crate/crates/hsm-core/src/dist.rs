//! Probability primitives shared by every inference module.
//!
//! All probability values are carried as natural logs; linear-scale values
//! appear only at output boundaries. Log-densities of bounded supports return
//! `-inf` outside their support so samplers reject rather than crash.

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf, erf_inv};

use crate::error::{HsmError, Result};
use crate::rng::Rng;

pub const LN_2PI: f64 = 1.837_877_066_409_345_4;
pub const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;

/// Gaussian N(mu, std^2) parameterized by its standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    mean: f64,
    std: f64,
}

impl GaussianSpec {
    pub fn new(mean: f64, std: f64) -> Result<Self> {
        if !mean.is_finite() || !std.is_finite() {
            return Err(HsmError::NonFinite("GaussianSpec parameters".into()));
        }
        if std <= 0.0 {
            return Err(HsmError::invalid(format!("GaussianSpec std must be > 0, got {std}")));
        }
        Ok(Self { mean, std })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn std(&self) -> f64 {
        self.std
    }

    /// ln N(z | mean, std^2); no input validation (z is assumed finite).
    #[inline]
    pub fn log_density(&self, z: f64) -> f64 {
        let u = (z - self.mean) / self.std;
        -HALF_LN_2PI - self.std.ln() - 0.5 * u * u
    }

    /// Probability mass on the interval [lo, hi].
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        (normal_cdf((hi - self.mean) / self.std) - normal_cdf((lo - self.mean) / self.std)).max(0.0)
    }

    pub fn sample(&self, rng: &mut Rng) -> f64 {
        Normal::new(self.mean, self.std).expect("validated spec").sample(rng)
    }

    /// Inverse-CDF draw from the spec restricted to [lo, hi].
    pub fn sample_truncated(&self, lo: f64, hi: f64, rng: &mut Rng) -> f64 {
        let a = normal_cdf((lo - self.mean) / self.std);
        let b = normal_cdf((hi - self.mean) / self.std);
        let u: f64 = rng.gen();
        let p = (a + u * (b - a)).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
        let z = std::f64::consts::SQRT_2 * erf_inv(2.0 * p - 1.0);
        (self.mean + self.std * z).clamp(lo, hi)
    }
}

/// Standard normal CDF.
#[inline]
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

/// Standard normal PDF.
#[inline]
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Uniform density on (lower, upper).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformSpec {
    lower: f64,
    upper: f64,
}

impl UniformSpec {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !lower.is_finite() || !upper.is_finite() {
            return Err(HsmError::NonFinite("UniformSpec bounds".into()));
        }
        if lower >= upper {
            return Err(HsmError::invalid(format!(
                "UniformSpec requires lower < upper, got [{lower}, {upper}]"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }

    /// ln density: -ln(width) inside the support, -inf outside.
    #[inline]
    pub fn log_density(&self, x: f64) -> f64 {
        if self.contains(x) {
            -self.width().ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    pub fn sample(&self, rng: &mut Rng) -> f64 {
        self.lower + rng.gen::<f64>() * self.width()
    }
}

/// Hyperparameters of the population distribution p(theta | psi) = N(mu_theta, sigma_theta^2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    mu_theta: f64,
    sigma_theta: f64,
}

impl HyperParams {
    pub fn new(mu_theta: f64, sigma_theta: f64) -> Result<Self> {
        if !mu_theta.is_finite() || !sigma_theta.is_finite() {
            return Err(HsmError::NonFinite("HyperParams".into()));
        }
        if sigma_theta <= 0.0 {
            return Err(HsmError::invalid(format!(
                "HyperParams sigma_theta must be > 0, got {sigma_theta}"
            )));
        }
        Ok(Self { mu_theta, sigma_theta })
    }

    pub fn mu_theta(&self) -> f64 {
        self.mu_theta
    }

    pub fn sigma_theta(&self) -> f64 {
        self.sigma_theta
    }

    pub fn as_gaussian(&self) -> GaussianSpec {
        GaussianSpec { mean: self.mu_theta, std: self.sigma_theta }
    }

    /// ln p(theta | psi) for a theta vector with iid N(mu, sigma^2) components.
    pub fn log_density(&self, theta: &[f64]) -> f64 {
        let g = self.as_gaussian();
        theta.iter().map(|&t| g.log_density(t)).sum()
    }
}

/// Additive-noise standard deviation sigma_y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    sigma_y: f64,
}

impl NoiseParams {
    pub fn new(sigma_y: f64) -> Result<Self> {
        if !sigma_y.is_finite() || sigma_y <= 0.0 {
            return Err(HsmError::invalid(format!("NoiseParams sigma_y must be > 0, got {sigma_y}")));
        }
        Ok(Self { sigma_y })
    }

    pub fn sigma_y(&self) -> f64 {
        self.sigma_y
    }
}

/// A one-dimensional density usable as a proposal or hyper prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Density1D {
    Uniform(UniformSpec),
    Gaussian(GaussianSpec),
}

impl Density1D {
    pub fn log_density(&self, x: f64) -> f64 {
        match self {
            Density1D::Uniform(u) => u.log_density(x),
            Density1D::Gaussian(g) => g.log_density(x),
        }
    }

    pub fn sample(&self, rng: &mut Rng) -> f64 {
        match self {
            Density1D::Uniform(u) => u.sample(rng),
            Density1D::Gaussian(g) => g.sample(rng),
        }
    }
}

/// Independent per-component prior for a theta vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaPrior {
    components: Vec<Density1D>,
}

impl ThetaPrior {
    pub fn new(components: Vec<Density1D>) -> Result<Self> {
        if components.is_empty() {
            return Err(HsmError::invalid("ThetaPrior needs at least one component"));
        }
        Ok(Self { components })
    }

    pub fn uniform_box(specs: Vec<UniformSpec>) -> Result<Self> {
        Self::new(specs.into_iter().map(Density1D::Uniform).collect())
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Density1D] {
        &self.components
    }

    pub fn log_density(&self, theta: &[f64]) -> f64 {
        debug_assert_eq!(theta.len(), self.components.len());
        self.components
            .iter()
            .zip(theta)
            .map(|(c, &t)| c.log_density(t))
            .sum()
    }

    pub fn sample(&self, rng: &mut Rng) -> Vec<f64> {
        self.components.iter().map(|c| c.sample(rng)).collect()
    }
}

/// ln N(z | mu, sigma^2). Errors on non-finite `z`.
pub fn gaussian_log_density(z: f64, spec: &GaussianSpec) -> Result<f64> {
    if !z.is_finite() {
        return Err(HsmError::NonFinite(format!("gaussian_log_density input z = {z}")));
    }
    Ok(spec.log_density(z))
}

/// Kullback-Leibler divergence D_KL(p || q) between two Gaussians.
pub fn kl_gaussian(p: &GaussianSpec, q: &GaussianSpec) -> f64 {
    let dm = p.mean - q.mean;
    (q.std / p.std).ln() + (p.std * p.std + dm * dm) / (2.0 * q.std * q.std) - 0.5
}

/// ln sum exp(v_i), stable under uniform shifts. Errors on an empty list.
pub fn log_sum_exp(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(HsmError::invalid("log_sum_exp of an empty list"));
    }
    Ok(lse_unchecked(values))
}

#[inline]
pub(crate) fn lse_unchecked(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = values.iter().map(|&v| (v - m).exp()).sum();
    m + sum.ln()
}
