//! User-satellite Rician channel sampling and its long-term moments.
//!
//! Each satellite's coefficient combines a line-of-sight ray and a diffuse
//! component, each behind its own log-normal shadow fade, with a random
//! K-factor drawn in dB per realization:
//!
//! ```text
//! h_m = sqrt(k/(k+1)) / sqrt(L_los) * e^{j phi}
//!     + sqrt(1/(k+1)) / sqrt(L_nlos) * g,      g ~ CN(0, 1)
//! ```
//!
//! where `L = beta_up * 10^(X/10)` with `X ~ N(0, sigma_sf^2)` in dB. The
//! channel estimate adds `CN(0, eps^2 var(h_m))` on top, `var(h_m)` being
//! the realization's diffuse power.

use crate::error::{Error, Result};
use crate::linkbudget::{fspl, UplinkParams, SPEED_OF_LIGHT};
use crate::orbit::VisibilitySet;
use crate::quad::GaussLegendre;
use crate::seed::rng_from_seed;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::TAU;

/// ln(10)/10; `10^(x/10) = exp(LAMBDA_DB * x)`.
const LAMBDA_DB: f64 = core::f64::consts::LN_10 / 10.0;

/// Large-scale fading parameters for one elevation bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingParams {
    /// Shadow-fading standard deviation on the LoS ray, dB.
    pub sigma_sf_los_db: f64,
    /// Shadow-fading standard deviation on the diffuse ray, dB.
    pub sigma_sf_nlos_db: f64,
    /// K-factor mean, dB.
    pub k_mean_db: f64,
    /// K-factor standard deviation, dB.
    pub k_std_db: f64,
}

impl FadingParams {
    /// Suburban S-band placeholders: 1.79 dB LoS shadowing, a 3.58 dB
    /// LoS/NLoS spread, K ~ N(10 dB, 3 dB). Editable, not ground truth.
    pub fn stock_suburban() -> Self {
        Self {
            sigma_sf_los_db: 1.79,
            sigma_sf_nlos_db: 1.79 + 3.58,
            k_mean_db: 10.0,
            k_std_db: 3.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma_sf_los_db < 0.0 || self.sigma_sf_nlos_db < 0.0 || self.k_std_db < 0.0 {
            return Err(Error::Config("fading standard deviations must be >= 0".into()));
        }
        Ok(())
    }
}

/// One row of an elevation-keyed fading table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingBin {
    /// Bin applies to elevations at or above this value, rad.
    pub min_elevation: f64,
    pub params: FadingParams,
}

/// Phase convention for the LoS ray.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LosPhase {
    /// `phi_m = -2 pi f d_m / c` from the slant range.
    #[default]
    Geometric,
    /// `phi_m = 0`; keeps the channel mean real for moment experiments.
    Zero,
}

/// Full channel-model configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingConfig {
    /// Used whenever no elevation bin matches (or none are given).
    pub flat: FadingParams,
    /// Optional elevation-keyed table; the highest bin at or below the
    /// satellite's elevation wins.
    pub elevation_bins: Vec<FadingBin>,
    /// Channel-estimation error ratio (error std = eps * channel std).
    pub estimation_error_ratio: f64,
    pub los_phase: LosPhase,
}

impl FadingConfig {
    pub fn stock() -> Self {
        Self {
            flat: FadingParams::stock_suburban(),
            elevation_bins: Vec::new(),
            estimation_error_ratio: 0.05,
            los_phase: LosPhase::Geometric,
        }
    }

    /// Same configuration with a different estimation-error ratio.
    pub fn with_epsilon(&self, eps: f64) -> Self {
        Self { estimation_error_ratio: eps, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        self.flat.validate()?;
        for b in &self.elevation_bins {
            b.params.validate()?;
        }
        if self.estimation_error_ratio < 0.0 {
            return Err(Error::Config("estimation_error_ratio must be >= 0".into()));
        }
        Ok(())
    }

    /// Parameters effective at the given elevation.
    pub fn for_elevation(&self, elevation: f64) -> FadingParams {
        let mut best: Option<&FadingBin> = None;
        for b in &self.elevation_bins {
            if elevation >= b.min_elevation
                && best.map_or(true, |c| b.min_elevation > c.min_elevation)
            {
                best = Some(b);
            }
        }
        best.map(|b| b.params).unwrap_or(self.flat)
    }
}

/// One draw of the per-satellite uplink channels and their estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// True channel coefficients.
    pub h: Vec<Complex64>,
    /// Estimated coefficients (`h + error`).
    pub h_hat: Vec<Complex64>,
    /// Estimation-error variance used for each satellite.
    pub err_var: Vec<f64>,
    /// Linear K-factors drawn for each satellite.
    pub k_factors: Vec<f64>,
    /// Uplink free-space path loss per satellite.
    pub beta_up: Vec<f64>,
}

impl ChannelRealization {
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }
}

/// Standard circularly-symmetric complex normal draw, unit variance.
pub fn complex_normal<R: Rng>(rng: &mut R) -> Complex64 {
    let s = 0.5f64.sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// Sample the uplink channel vector for the satellites in `geometry`.
pub fn sample_channel(
    geometry: &VisibilitySet,
    fading: &FadingConfig,
    uplink: &UplinkParams,
    seed: u64,
) -> Result<ChannelRealization> {
    if geometry.is_empty() {
        return Err(Error::Domain("cannot sample a channel for zero satellites".into()));
    }
    let mut beta = Vec::with_capacity(geometry.len());
    let mut phases = Vec::with_capacity(geometry.len());
    let mut params = Vec::with_capacity(geometry.len());
    for e in &geometry.entries {
        beta.push(fspl(e.slant_range, uplink.frequency)?);
        let phi = match fading.los_phase {
            LosPhase::Geometric => {
                (-TAU * uplink.frequency * e.slant_range / SPEED_OF_LIGHT).rem_euclid(TAU)
            }
            LosPhase::Zero => 0.0,
        };
        phases.push(phi);
        params.push(fading.for_elevation(e.elevation));
    }
    Ok(sample_channel_raw(&beta, &phases, &params, fading.estimation_error_ratio, seed))
}

/// Core sampler taking explicit path losses, LoS phases, and per-satellite
/// fading parameters. The estimation-error draws are consumed even when
/// `eps = 0`, so the true channel is draw-for-draw identical across eps
/// settings at a fixed seed (paired perfect/imperfect comparisons).
pub fn sample_channel_raw(
    beta_up: &[f64],
    phases: &[f64],
    params: &[FadingParams],
    eps: f64,
    seed: u64,
) -> ChannelRealization {
    assert_eq!(beta_up.len(), phases.len());
    assert_eq!(beta_up.len(), params.len());
    let mut rng = rng_from_seed(seed);
    let m = beta_up.len();
    let mut h = Vec::with_capacity(m);
    let mut h_hat = Vec::with_capacity(m);
    let mut err_var = Vec::with_capacity(m);
    let mut k_factors = Vec::with_capacity(m);
    for i in 0..m {
        let p = &params[i];
        let k_db = p.k_mean_db + p.k_std_db * rng.sample::<f64, _>(StandardNormal);
        let kappa = (LAMBDA_DB * k_db).exp();
        let x_los = p.sigma_sf_los_db * rng.sample::<f64, _>(StandardNormal);
        let x_nlos = p.sigma_sf_nlos_db * rng.sample::<f64, _>(StandardNormal);
        let l_los = beta_up[i] * (LAMBDA_DB * x_los).exp();
        let l_nlos = beta_up[i] * (LAMBDA_DB * x_nlos).exp();
        let los = Complex64::from_polar(1.0, phases[i]);
        let nlos = complex_normal(&mut rng);
        let hi = (kappa / ((kappa + 1.0) * l_los)).sqrt() * los
            + (1.0 / ((kappa + 1.0) * l_nlos)).sqrt() * nlos;
        let var_i = 1.0 / ((kappa + 1.0) * l_nlos);
        let ev = eps * eps * var_i;
        let err = complex_normal(&mut rng) * ev.sqrt();
        h.push(hi);
        h_hat.push(hi + err);
        err_var.push(ev);
        k_factors.push(kappa);
    }
    ChannelRealization { h, h_hat, err_var, k_factors, beta_up: beta_up.to_vec() }
}

/// Expectation of `f(kappa)` under the dB-normal K-factor model.
fn k_factor_moment<F: Fn(f64) -> f64>(k_mean_db: f64, k_std_db: f64, f: F) -> f64 {
    if k_std_db < 1e-12 {
        return f((LAMBDA_DB * k_mean_db).exp());
    }
    let q = GaussLegendre::new(200);
    let lo = k_mean_db - 10.0 * k_std_db;
    let hi = k_mean_db + 10.0 * k_std_db;
    let norm = 1.0 / (k_std_db * TAU.sqrt());
    q.integrate(lo, hi, |k_db| {
        let z = (k_db - k_mean_db) / k_std_db;
        f((LAMBDA_DB * k_db).exp()) * norm * (-0.5 * z * z).exp()
    })
}

/// Mean factor `E{10^(X/20)} = exp((lambda sigma)^2 / 8)` of a dB-normal
/// shadow fade entering at amplitude level.
fn shadow_amp_factor(sigma_db: f64) -> f64 {
    ((LAMBDA_DB * sigma_db).powi(2) / 8.0).exp()
}

/// Power factor `E{10^(X/10)} = exp((lambda sigma)^2 / 2)`.
fn shadow_pow_factor(sigma_db: f64) -> f64 {
    ((LAMBDA_DB * sigma_db).powi(2) / 2.0).exp()
}

/// Analytic mean vector and per-entry variance of the sampled channel under
/// a dense-constellation assumption (zero-phase convention for the mean).
///
/// All `beta_up` entries must lie within `ratio_tol` of their median; the
/// common variance is evaluated at the median loss while the mean scales
/// per entry.
pub fn channel_mean_and_variance(
    fading: &FadingConfig,
    beta_up: &[f64],
    ratio_tol: f64,
) -> Result<(Vec<Complex64>, f64)> {
    if beta_up.is_empty() {
        return Err(Error::Domain("beta_up must be nonempty".into()));
    }
    let mut sorted: Vec<f64> = beta_up.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    for &b in beta_up {
        let r = b / median;
        if !(r <= ratio_tol && r >= 1.0 / ratio_tol) {
            return Err(Error::NonUniform(format!(
                "beta_up entry {b:.3e} is outside {ratio_tol}x of median {median:.3e}; \
                 closed forms assume identical per-satellite statistics"
            )));
        }
    }
    let p = &fading.flat;
    let mean_scale = k_factor_moment(p.k_mean_db, p.k_std_db, |k| (k / (k + 1.0)).sqrt())
        * shadow_amp_factor(p.sigma_sf_los_db);
    let pow_scale = k_factor_moment(p.k_mean_db, p.k_std_db, |k| k / (k + 1.0))
        * shadow_pow_factor(p.sigma_sf_los_db)
        + k_factor_moment(p.k_mean_db, p.k_std_db, |k| 1.0 / (k + 1.0))
            * shadow_pow_factor(p.sigma_sf_nlos_db);
    let sigma_h2 = (pow_scale - mean_scale * mean_scale) / median;
    let mean = beta_up
        .iter()
        .map(|b| Complex64::new(mean_scale / b.sqrt(), 0.0))
        .collect();
    Ok((mean, sigma_h2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::{SatId, VisibleSatellite};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn flat(params: FadingParams, eps: f64, phase: LosPhase) -> FadingConfig {
        FadingConfig {
            flat: params,
            elevation_bins: Vec::new(),
            estimation_error_ratio: eps,
            los_phase: phase,
        }
    }

    fn no_fading() -> FadingParams {
        FadingParams { sigma_sf_los_db: 0.0, sigma_sf_nlos_db: 0.0, k_mean_db: 10.0, k_std_db: 0.0 }
    }

    fn geometry(ranges: &[f64]) -> VisibilitySet {
        VisibilitySet {
            time: 0.0,
            entries: ranges
                .iter()
                .enumerate()
                .map(|(i, &r)| VisibleSatellite {
                    sat_id: SatId(i as u32),
                    slant_range: r,
                    elevation: 1.0,
                })
                .collect(),
        }
    }

    #[test]
    fn zero_epsilon_means_perfect_estimate() {
        let cfg = flat(FadingParams::stock_suburban(), 0.0, LosPhase::Geometric);
        let chan =
            sample_channel(&geometry(&[550.0e3, 700.0e3]), &cfg, &UplinkParams::stock(), 42)
                .unwrap();
        assert_eq!(chan.h, chan.h_hat);
        assert!(chan.err_var.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn pure_los_limit_has_deterministic_magnitude() {
        let mut p = no_fading();
        p.k_mean_db = 300.0;
        let cfg = flat(p, 0.0, LosPhase::Geometric);
        let chan = sample_channel(&geometry(&[550.0e3]), &cfg, &UplinkParams::stock(), 5).unwrap();
        let beta = fspl(550.0e3, 2.0e9).unwrap();
        assert_relative_eq!(chan.h[0].norm(), 1.0 / beta.sqrt(), max_relative = 1e-9);
        // composes to the stock uplink loss
        assert_relative_eq!(chan.h[0].norm_sqr(), 1.0 / 2.12e15, max_relative = 5e-3);
    }

    #[test]
    fn rician_power_normalizes_to_unity() {
        let cfg = flat(no_fading(), 0.0, LosPhase::Geometric);
        let beta = [1.0];
        let phases = [0.3];
        let mut acc = 0.0;
        let n = 100_000;
        for s in 0..n {
            let c = sample_channel_raw(&beta, &phases, &[cfg.flat], 0.0, s as u64);
            acc += c.h[0].norm_sqr();
        }
        assert_relative_eq!(acc / n as f64, 1.0, max_relative = 0.01);
    }

    #[test]
    fn los_to_nlos_power_split_follows_k_factor() {
        // fixed kappa = 10 dB, no shadowing: diffuse power must be 1/(k+1)
        let cfg = flat(no_fading(), 0.0, LosPhase::Zero);
        let kappa = 10f64;
        let los_part = (kappa / (kappa + 1.0)).sqrt();
        let n = 100_000;
        let mut diffuse = 0.0;
        for s in 0..n {
            let c = sample_channel_raw(&[1.0], &[0.0], &[cfg.flat], 0.0, s as u64);
            diffuse += (c.h[0] - Complex64::new(los_part, 0.0)).norm_sqr();
        }
        let ratio = (los_part * los_part) / (diffuse / n as f64);
        assert_relative_eq!(ratio, kappa, max_relative = 0.03);
    }

    #[test]
    fn satellites_are_uncorrelated() {
        let cfg = flat(FadingParams::stock_suburban(), 0.0, LosPhase::Zero);
        let n = 100_000;
        let (mut s1, mut s2, mut s12) = (Complex64::ZERO, Complex64::ZERO, Complex64::ZERO);
        let (mut p1, mut p2) = (0.0, 0.0);
        for s in 0..n {
            let c = sample_channel_raw(
                &[1.0, 1.0],
                &[0.0, 0.0],
                &[cfg.flat, cfg.flat],
                0.0,
                s as u64,
            );
            s1 += c.h[0];
            s2 += c.h[1];
            s12 += c.h[0] * c.h[1].conj();
            p1 += c.h[0].norm_sqr();
            p2 += c.h[1].norm_sqr();
        }
        let nf = n as f64;
        let cov = s12 / nf - (s1 / nf) * (s2 / nf).conj();
        let v1 = p1 / nf - (s1 / nf).norm_sqr();
        let v2 = p2 / nf - (s2 / nf).norm_sqr();
        assert!(cov.norm() / (v1 * v2).sqrt() < 0.02);
    }

    #[test]
    fn estimate_error_variance_is_consistent() {
        let cfg = flat(FadingParams::stock_suburban(), 0.05, LosPhase::Geometric);
        let n = 200_000;
        let mut err_power = 0.0;
        let mut expected = 0.0;
        for s in 0..n {
            let c = sample_channel_raw(&[1.0], &[0.7], &[cfg.flat], 0.05, s as u64);
            err_power += (c.h_hat[0] - c.h[0]).norm_sqr();
            expected += c.err_var[0];
        }
        assert_relative_eq!(err_power / n as f64, expected / n as f64, max_relative = 0.03);
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let cfg = flat(FadingParams::stock_suburban(), 0.05, LosPhase::Geometric);
        let geo = geometry(&[550.0e3, 600.0e3, 800.0e3]);
        let a = sample_channel(&geo, &cfg, &UplinkParams::stock(), 987).unwrap();
        let b = sample_channel(&geo, &cfg, &UplinkParams::stock(), 987).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn same_seed_same_true_channel_across_eps() {
        let geo = geometry(&[550.0e3, 600.0e3]);
        let perfect = flat(FadingParams::stock_suburban(), 0.0, LosPhase::Geometric);
        let imperfect = flat(FadingParams::stock_suburban(), 0.05, LosPhase::Geometric);
        let a = sample_channel(&geo, &perfect, &UplinkParams::stock(), 31).unwrap();
        let b = sample_channel(&geo, &imperfect, &UplinkParams::stock(), 31).unwrap();
        assert_eq!(a.h, b.h);
        assert_ne!(a.h_hat, b.h_hat);
    }

    #[test]
    fn empty_geometry_is_rejected() {
        let cfg = FadingConfig::stock();
        let geo = VisibilitySet { time: 0.0, entries: vec![] };
        assert!(sample_channel(&geo, &cfg, &UplinkParams::stock(), 0).is_err());
    }

    #[test]
    fn deterministic_channel_has_zero_variance() {
        let mut p = no_fading();
        p.k_mean_db = 300.0;
        let cfg = flat(p, 0.0, LosPhase::Zero);
        let beta = vec![2.0, 2.0, 2.0];
        let (mean, var) = channel_mean_and_variance(&cfg, &beta, 2.0).unwrap();
        assert!(var < 1e-12);
        let norm2: f64 = mean.iter().map(|m| m.norm_sqr()).sum();
        let expected: f64 = beta.iter().map(|b| 1.0 / b).sum();
        assert_relative_eq!(norm2, expected, max_relative = 1e-9);
    }

    #[test]
    fn analytic_moments_match_monte_carlo() {
        let cfg = flat(FadingParams::stock_suburban(), 0.0, LosPhase::Zero);
        let beta = vec![1.0, 1.0];
        let (mean, var) = channel_mean_and_variance(&cfg, &beta, 2.0).unwrap();
        let n = 100_000;
        let mut sum = Complex64::ZERO;
        let mut pow = 0.0;
        for s in 0..n {
            let c = sample_channel_raw(&beta, &[0.0, 0.0], &[cfg.flat, cfg.flat], 0.0, s as u64);
            sum += c.h[0];
            pow += c.h[0].norm_sqr();
        }
        let nf = n as f64;
        let emp_mean = sum / nf;
        let emp_var = pow / nf - emp_mean.norm_sqr();
        // mean within 3 standard errors, variance within 2%
        let se = (var / nf).sqrt();
        assert!((emp_mean - mean[0]).norm() < 3.0 * se, "mean off: {emp_mean} vs {}", mean[0]);
        assert_relative_eq!(emp_var, var, max_relative = 0.02);
    }

    #[test]
    fn non_uniform_losses_are_rejected() {
        let cfg = FadingConfig::stock();
        let beta = vec![1.0, 10.0];
        assert!(matches!(
            channel_mean_and_variance(&cfg, &beta, 2.0),
            Err(Error::NonUniform(_))
        ));
    }

    #[test]
    fn elevation_bins_override_flat_params() {
        let mut cfg = FadingConfig::stock();
        let hi = FadingParams { k_mean_db: 15.0, ..FadingParams::stock_suburban() };
        cfg.elevation_bins = vec![
            FadingBin { min_elevation: 0.0, params: FadingParams::stock_suburban() },
            FadingBin { min_elevation: 1.0, params: hi },
        ];
        assert_abs_diff_eq!(cfg.for_elevation(0.5).k_mean_db, 10.0);
        assert_abs_diff_eq!(cfg.for_elevation(1.2).k_mean_db, 15.0);
    }
}
