//! Forward-model abstraction and group likelihoods.
//!
//! The linear model f(x, theta) = theta * x is the built-in instance used by
//! the closed-form machinery; anything else plugs in through [`ForwardModel`]
//! and is handled by the sampling and EIM pipelines.

use crate::data::{DataSet, GroupStats};
use crate::dist::HALF_LN_2PI;

/// Deterministic forward map f(x, theta) with a declared theta dimension.
pub trait ForwardModel: Send + Sync {
    fn theta_dim(&self) -> usize;
    fn eval(&self, x: f64, theta: &[f64]) -> f64;
}

/// f(x, theta) = theta[0] * x.
#[derive(Debug, Clone, Copy, Default)]
pub struct LinearModel;

impl ForwardModel for LinearModel {
    fn theta_dim(&self) -> usize {
        1
    }

    fn eval(&self, x: f64, theta: &[f64]) -> f64 {
        theta[0] * x
    }
}

/// f(x, theta) = sum_k theta[k] * x^powers[k].
#[derive(Debug, Clone)]
pub struct PolynomialModel {
    powers: Vec<u32>,
}

impl PolynomialModel {
    pub fn new(powers: Vec<u32>) -> Self {
        Self { powers }
    }
}

impl ForwardModel for PolynomialModel {
    fn theta_dim(&self) -> usize {
        self.powers.len()
    }

    fn eval(&self, x: f64, theta: &[f64]) -> f64 {
        self.powers
            .iter()
            .zip(theta)
            .map(|(&p, &t)| t * x.powi(p as i32))
            .sum()
    }
}

/// ln p(D_i | theta, sigma_y) under a Gaussian additive-error model:
/// the product over points of N(y_j | f(x_j, theta), sigma_y^2).
pub fn group_log_likelihood(
    model: &dyn ForwardModel,
    group: &DataSet,
    theta: &[f64],
    sigma_y: f64,
) -> f64 {
    let n = group.len() as f64;
    let inv_two_var = 0.5 / (sigma_y * sigma_y);
    let ssr: f64 = group
        .points()
        .iter()
        .map(|p| {
            let r = p.y() - model.eval(p.x(), theta);
            r * r
        })
        .sum();
    -n * (HALF_LN_2PI + sigma_y.ln()) - ssr * inv_two_var
}

/// Linear-model group log-likelihood from sufficient statistics (O(1) per call).
#[inline]
pub fn linear_log_likelihood(stats: &GroupStats, theta: f64, sigma_y: f64) -> f64 {
    let n = stats.n as f64;
    let ssr = stats.syy - 2.0 * theta * stats.sxy + theta * theta * stats.sxx;
    -n * (HALF_LN_2PI + sigma_y.ln()) - 0.5 * ssr / (sigma_y * sigma_y)
}

/// A group's likelihood as a function of (theta, sigma_y); the surface the
/// HS3/EIM pipeline interpolates.
pub trait GroupLikelihood: Send + Sync {
    fn theta_dim(&self) -> usize;
    fn log_likelihood(&self, theta: &[f64], sigma_y: f64) -> f64;
}

/// Pairs a forward model with one group of data.
pub struct ModelDataLikelihood<'a> {
    model: &'a dyn ForwardModel,
    group: &'a DataSet,
}

impl<'a> ModelDataLikelihood<'a> {
    pub fn new(model: &'a dyn ForwardModel, group: &'a DataSet) -> Self {
        Self { model, group }
    }

    pub fn group(&self) -> &DataSet {
        self.group
    }
}

impl GroupLikelihood for ModelDataLikelihood<'_> {
    fn theta_dim(&self) -> usize {
        self.model.theta_dim()
    }

    fn log_likelihood(&self, theta: &[f64], sigma_y: f64) -> f64 {
        group_log_likelihood(self.model, self.group, theta, sigma_y)
    }
}
