//! Closed-form conditional posteriors, conditional evidences, and robust
//! prediction densities for the linear forward model y = theta * x with
//! Gaussian additive error.
//!
//! Four conditional evidences appear, one per model class:
//! uniform-prior pooled (M1a), Gaussian-prior pooled (M1b), per-group delta
//! likelihood (M2a), and per-group Gaussian (M2b). All values are natural
//! logs; `-inf` encodes the inconsistent-delta case of M2a.

use crate::data::{DataSet, GroupStats, GroupedData};
use crate::dist::{GaussianSpec, HyperParams, NoiseParams, UniformSpec, HALF_LN_2PI, LN_2PI};
use crate::error::{HsmError, Result};

/// Relative tolerance under which per-group ratios y/x count as equal for the
/// delta likelihood.
pub const M2A_CONSISTENCY_TOL: f64 = 1e-9;

/// Gaussian conditional posterior of theta: N(mu_tilde, sigma_tilde^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalPosterior {
    pub mu_tilde: f64,
    pub sigma_tilde: f64,
}

impl ConditionalPosterior {
    pub fn as_gaussian(&self) -> GaussianSpec {
        GaussianSpec::new(self.mu_tilde, self.sigma_tilde).expect("positive sigma_tilde")
    }
}

/// Posterior of theta under a flat prior: sigma_tilde = sigma_y / sqrt(x'x),
/// mu_tilde = x'y / x'x. Errors when x'x = 0.
pub fn posterior_theta_m1a(data: &GroupedData, sigma_y: &NoiseParams) -> Result<ConditionalPosterior> {
    posterior_m1a_from_stats(&data.pooled_stats(), sigma_y.sigma_y())
}

pub(crate) fn posterior_m1a_from_stats(stats: &GroupStats, sigma_y: f64) -> Result<ConditionalPosterior> {
    if stats.n == 0 {
        return Err(HsmError::invalid("posterior_theta_m1a needs at least one data point"));
    }
    if stats.sxx <= 0.0 {
        return Err(HsmError::invalid("x'x = 0: theta is unidentifiable under a flat prior"));
    }
    Ok(ConditionalPosterior {
        mu_tilde: stats.sxy / stats.sxx,
        sigma_tilde: sigma_y / stats.sxx.sqrt(),
    })
}

/// ln p(D | sigma_y, M1a) for a uniform theta prior.
///
/// The textbook expression assumes the posterior Gaussian mass lies inside
/// the prior support; the factor `mass_between` keeps the value exact near
/// the boundaries.
pub fn log_cond_evidence_m1a(
    data: &GroupedData,
    sigma_y: &NoiseParams,
    theta_prior: &UniformSpec,
) -> Result<f64> {
    evidence_m1a_from_stats(&data.pooled_stats(), sigma_y.sigma_y(), theta_prior)
}

pub(crate) fn evidence_m1a_from_stats(
    stats: &GroupStats,
    sigma_y: f64,
    theta_prior: &UniformSpec,
) -> Result<f64> {
    let post = posterior_m1a_from_stats(stats, sigma_y)?;
    let n = stats.n as f64;
    let quad = stats.syy / (sigma_y * sigma_y) - (post.mu_tilde / post.sigma_tilde).powi(2);
    let mass = post
        .as_gaussian()
        .mass_between(theta_prior.lower(), theta_prior.upper());
    Ok(-theta_prior.width().ln() + post.sigma_tilde.ln()
        - 0.5 * (n - 1.0) * LN_2PI
        - n * sigma_y.ln()
        - 0.5 * quad
        + mass.ln())
}

/// Posterior of theta under a Gaussian prior N(mu_theta, sigma_theta^2).
/// The prior regularizes, so x'x = 0 is allowed (returns the prior).
pub fn posterior_theta_m1b(
    data: &GroupedData,
    psi: &HyperParams,
    sigma_y: &NoiseParams,
) -> ConditionalPosterior {
    posterior_m1b_from_stats(&data.pooled_stats(), psi, sigma_y.sigma_y())
}

#[inline]
pub(crate) fn posterior_m1b_from_stats(
    stats: &GroupStats,
    psi: &HyperParams,
    sigma_y: f64,
) -> ConditionalPosterior {
    let st2 = psi.sigma_theta() * psi.sigma_theta();
    let sy2 = sigma_y * sigma_y;
    let denom = stats.sxx * st2 + sy2;
    ConditionalPosterior {
        mu_tilde: (stats.sxy * st2 + psi.mu_theta() * sy2) / denom,
        sigma_tilde: (st2 * sy2 / denom).sqrt(),
    }
}

/// ln p(D | mu_theta, sigma_theta, sigma_y, M1b). Zero data points yield 0
/// (the empty product).
pub fn log_cond_evidence_m1b(data: &GroupedData, psi: &HyperParams, sigma_y: &NoiseParams) -> f64 {
    evidence_m1b_from_stats(&data.pooled_stats(), psi, sigma_y.sigma_y())
}

#[inline]
pub(crate) fn evidence_m1b_from_stats(stats: &GroupStats, psi: &HyperParams, sigma_y: f64) -> f64 {
    if stats.n == 0 {
        return 0.0;
    }
    let post = posterior_m1b_from_stats(stats, psi, sigma_y);
    let n = stats.n as f64;
    let mu = psi.mu_theta();
    let quad = stats.syy / (sigma_y * sigma_y) + (mu / psi.sigma_theta()).powi(2)
        - (post.mu_tilde / post.sigma_tilde).powi(2);
    post.sigma_tilde.ln() - 0.5 * n * LN_2PI - n * sigma_y.ln() - psi.sigma_theta().ln()
        - 0.5 * quad
}

/// ln p(D_i | mu_theta, sigma_theta, M2a) under the delta likelihood.
///
/// Consistent groups (all y/x equal within [`M2A_CONSISTENCY_TOL`]) score
/// ln N(y_1/x_1 | psi) plus the Jacobian term sum of ln(1/|x_j|); anything
/// else has zero delta-evidence, encoded as `-inf`. Any x = 0 is an error.
pub fn log_cond_evidence_m2a(group: &DataSet, psi: &HyperParams) -> Result<f64> {
    let ratios = group.ratios()?;
    let (mut min, mut max, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for &r in &ratios {
        min = min.min(r);
        max = max.max(r);
        sum += r;
    }
    let mean = sum / ratios.len() as f64;
    if max - min > M2A_CONSISTENCY_TOL * mean.abs().max(1.0) {
        return Ok(f64::NEG_INFINITY);
    }
    let jacobian: f64 = group.points().iter().map(|p| p.x().abs().ln()).sum();
    Ok(psi.as_gaussian().log_density(ratios[0]) - jacobian)
}

/// Per-group posterior of theta_i under the full HSM (Gaussian prior and
/// Gaussian additive error).
pub fn posterior_theta_m2b(
    group: &DataSet,
    psi: &HyperParams,
    sigma_y: &NoiseParams,
) -> ConditionalPosterior {
    posterior_m1b_from_stats(&group.stats(), psi, sigma_y.sigma_y())
}

/// ln p(D_i | mu_theta, sigma_theta, sigma_y, M2b): the per-group conditional
/// evidence that the HS1 importance-sampling estimator approximates.
pub fn log_cond_evidence_m2b(group: &DataSet, psi: &HyperParams, sigma_y: &NoiseParams) -> f64 {
    evidence_m1b_from_stats(&group.stats(), psi, sigma_y.sigma_y())
}

/// Robust posterior prediction density p(y_hat | x_hat, D) for the pooled
/// linear models, conditional on one (sigma_y, posterior) pair.
///
/// Marginalizing theta ~ N(mu_tilde, sigma_tilde^2) through y = theta x + eps
/// gives N(y_hat | x_hat mu_tilde, sigma_y^2 + x_hat^2 sigma_tilde^2), which
/// is also the x_hat = 0 limit of the 1/|x_hat| form.
pub fn robust_pred_density_m1_family(
    x_hat: f64,
    y_hat: f64,
    cond: &ConditionalPosterior,
    sigma_y: &NoiseParams,
) -> f64 {
    let sy2 = sigma_y.sigma_y() * sigma_y.sigma_y();
    let var = sy2 + x_hat * x_hat * cond.sigma_tilde * cond.sigma_tilde;
    gaussian_density(y_hat, x_hat * cond.mu_tilde, var)
}

/// Robust prediction density for the HSM family: the per-group conditional
/// evidence evaluated at the singleton group {(x_hat, y_hat)}.
///
/// `sigma_y = None` selects the zero-noise (delta) form, which requires
/// x_hat != 0; `Some` selects the full form, defined for every x_hat.
pub fn robust_pred_density_hs_family(
    x_hat: f64,
    y_hat: f64,
    psi: &HyperParams,
    sigma_y: Option<&NoiseParams>,
) -> Result<f64> {
    match sigma_y {
        None => {
            if x_hat == 0.0 {
                return Err(HsmError::invalid(
                    "zero-noise HSM prediction density is singular at x_hat = 0",
                ));
            }
            Ok(psi.as_gaussian().log_density(y_hat / x_hat).exp() / x_hat.abs())
        }
        Some(noise) => {
            let stats = GroupStats {
                sxx: x_hat * x_hat,
                sxy: x_hat * y_hat,
                syy: y_hat * y_hat,
                n: 1,
            };
            Ok(evidence_m1b_from_stats(&stats, psi, noise.sigma_y()).exp())
        }
    }
}

#[inline]
fn gaussian_density(z: f64, mean: f64, var: f64) -> f64 {
    let d = z - mean;
    (-0.5 * d * d / var).exp() / (LN_2PI.exp() * var).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DataPoint;
    use crate::dist::normal_cdf;

    fn group(points: &[(f64, f64)]) -> DataSet {
        let pts = points
            .iter()
            .map(|&(x, y)| DataPoint::new(x, y).unwrap())
            .collect();
        DataSet::new("g", pts).unwrap()
    }

    fn pooled(points: &[(f64, f64)]) -> GroupedData {
        GroupedData::single(group(points))
    }

    #[test]
    fn m1a_noiseless_line_recovers_slope() {
        let data = pooled(&[(0.2, 0.2), (0.7, 0.7), (1.4, 1.4)]);
        for &s in &[0.1, 1.0, 3.0] {
            let post = posterior_theta_m1a(&data, &NoiseParams::new(s).unwrap()).unwrap();
            assert!((post.mu_tilde - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn m1a_single_point_formula() {
        let data = pooled(&[(2.0, 3.0)]);
        let post = posterior_theta_m1a(&data, &NoiseParams::new(0.2).unwrap()).unwrap();
        assert!((post.mu_tilde - 1.5).abs() < 1e-12);
        assert!((post.sigma_tilde - 0.1).abs() < 1e-12);
    }

    #[test]
    fn m1a_all_zero_x_is_an_error() {
        let data = pooled(&[(0.0, 1.0), (0.0, -1.0)]);
        assert!(posterior_theta_m1a(&data, &NoiseParams::new(1.0).unwrap()).is_err());
    }

    #[test]
    fn m1a_evidence_single_point_plug_in() {
        // One point (1, 0), sigma_y = 1, prior U(-1, 3): the exponent vanishes
        // and the prefactor is 1/4 times the posterior N(0,1) mass inside the
        // prior support.
        let data = pooled(&[(1.0, 0.0)]);
        let prior = UniformSpec::new(-1.0, 3.0).unwrap();
        let v = log_cond_evidence_m1a(&data, &NoiseParams::new(1.0).unwrap(), &prior).unwrap();
        let mass = normal_cdf(3.0) - normal_cdf(-1.0);
        assert!((v - (0.25 * mass).ln()).abs() < 1e-12);
    }

    #[test]
    fn m1b_no_information_returns_prior() {
        let data = pooled(&[(0.0, 0.3), (0.0, -0.3)]);
        let psi = HyperParams::new(0.5, 0.8).unwrap();
        let post = posterior_theta_m1b(&data, &psi, &NoiseParams::new(0.3).unwrap());
        assert!((post.mu_tilde - 0.5).abs() < 1e-12);
        assert!((post.sigma_tilde - 0.8).abs() < 1e-12);
    }

    #[test]
    fn m1b_flat_prior_limit_matches_m1a() {
        let data = pooled(&[(0.3, 0.35), (0.8, 0.75), (1.2, 1.3), (0.5, 0.42)]);
        let noise = NoiseParams::new(0.3).unwrap();
        let wide = HyperParams::new(0.0, 1e6).unwrap();
        let a = posterior_theta_m1a(&data, &noise).unwrap();
        let b = posterior_theta_m1b(&data, &wide, &noise);
        assert!((a.mu_tilde - b.mu_tilde).abs() < 1e-6);
        assert!((a.sigma_tilde - b.sigma_tilde).abs() < 1e-6);
    }

    #[test]
    fn m1b_empty_data_evidence_is_zero() {
        let data = GroupedData::new(vec![]).unwrap();
        let psi = HyperParams::new(0.5, 0.8).unwrap();
        assert_eq!(log_cond_evidence_m1b(&data, &psi, &NoiseParams::new(0.3).unwrap()), 0.0);
    }

    #[test]
    fn m2a_single_point_at_prior_mean() {
        let g = group(&[(2.0, 2.0)]);
        let psi = HyperParams::new(1.0, 0.5).unwrap();
        let v = log_cond_evidence_m2a(&g, &psi).unwrap();
        let expected = -(0.5f64 * LN_2PI.exp()).sqrt().ln() - 2.0f64.ln();
        assert!((v - expected).abs() < 1e-12, "{v} vs {expected}");
    }

    #[test]
    fn m2a_inconsistent_ratios_score_neg_inf() {
        let g = group(&[(1.0, 1.0), (2.0, 2.5)]);
        let psi = HyperParams::new(1.0, 0.5).unwrap();
        assert_eq!(log_cond_evidence_m2a(&g, &psi).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn m2a_zero_x_is_an_error() {
        let g = group(&[(0.0, 0.0)]);
        let psi = HyperParams::new(1.0, 0.5).unwrap();
        assert!(log_cond_evidence_m2a(&g, &psi).is_err());
    }

    #[test]
    fn m2b_single_group_reduces_to_m1b() {
        let pts = [(0.4, 0.5), (0.9, 0.8), (1.1, 1.2)];
        let psi = HyperParams::new(0.5, 0.8).unwrap();
        let noise = NoiseParams::new(0.3).unwrap();
        let ev_group = log_cond_evidence_m2b(&group(&pts), &psi, &noise);
        let ev_pooled = log_cond_evidence_m1b(&pooled(&pts), &psi, &noise);
        assert_eq!(ev_group, ev_pooled);
        let p_group = posterior_theta_m2b(&group(&pts), &psi, &noise);
        let p_pooled = posterior_theta_m1b(&pooled(&pts), &psi, &noise);
        assert_eq!(p_group, p_pooled);
    }

    #[test]
    fn m2b_one_point_hand_computation() {
        let g = group(&[(1.0, 2.0)]);
        let psi = HyperParams::new(0.0, 1.0).unwrap();
        let post = posterior_theta_m2b(&g, &psi, &NoiseParams::new(1.0).unwrap());
        assert!((post.mu_tilde - 1.0).abs() < 1e-12);
        assert!((post.sigma_tilde - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn robust_m1_point_mass_posterior() {
        let cond = ConditionalPosterior { mu_tilde: 0.9, sigma_tilde: 1e-9 };
        let noise = NoiseParams::new(0.25).unwrap();
        let d = robust_pred_density_m1_family(1.0, 0.7, &cond, &noise);
        let expected = GaussianSpec::new(0.9, 0.25).unwrap().log_density(0.7).exp();
        assert!((d - expected).abs() < 1e-9);
    }

    #[test]
    fn robust_m1_normalizes_over_y() {
        let cond = ConditionalPosterior { mu_tilde: 1.1, sigma_tilde: 0.4 };
        let noise = NoiseParams::new(0.2).unwrap();
        for &x_hat in &[0.0, 0.35, -1.2] {
            let (lo, hi, n) = (-8.0, 10.0, 400_000usize);
            let h = (hi - lo) / n as f64;
            let mut sum = 0.0;
            for k in 0..=n {
                let y = lo + h * k as f64;
                let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                sum += w * robust_pred_density_m1_family(x_hat, y, &cond, &noise);
            }
            assert!((sum * h - 1.0).abs() < 1e-4, "x_hat={x_hat}: {}", sum * h);
        }
    }

    #[test]
    fn robust_hs_zero_noise_peak_and_error() {
        let psi = HyperParams::new(1.0, 0.5).unwrap();
        let peak = robust_pred_density_hs_family(1.0, 1.0, &psi, None).unwrap();
        assert!((peak - psi.as_gaussian().log_density(1.0).exp()).abs() < 1e-12);
        assert!(robust_pred_density_hs_family(0.0, 0.3, &psi, None).is_err());
    }

    #[test]
    fn robust_hs_full_matches_one_point_marginal() {
        // evidT2 on a singleton group must equal N(y | x mu, sigma_y^2 + x^2 sigma_theta^2).
        let psi = HyperParams::new(0.8, 0.5).unwrap();
        let noise = NoiseParams::new(0.2).unwrap();
        for &(x, y) in &[(0.5, 0.3), (-1.2, -0.9), (0.0, 0.1), (2.0, 1.5)] {
            let d = robust_pred_density_hs_family(x, y, &psi, Some(&noise)).unwrap();
            let var = 0.2f64 * 0.2 + x * x * 0.25;
            let expected = gaussian_density(y, 0.8 * x, var);
            assert!((d - expected).abs() < 1e-12 * expected.max(1.0), "({x},{y})");
        }
    }
}
