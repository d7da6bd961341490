//! Second hop: amplify-and-forward relaying to the master node over THz or
//! FSO inter-satellite links.
//!
//! THz links suffer free-space path loss and thermal noise; FSO links add a
//! pointing-error loss `alpha_p = exp(-2 theta^2 / w_z^2)` with Rayleigh
//! radial jitter `theta`. The master node's own entry is a pass-through:
//! unit path loss, zero ISL noise, unit pointing loss.

use crate::channel::{complex_normal, ChannelRealization};
use crate::error::{Error, Result};
use crate::linkbudget::{fspl, IslParams, SPEED_OF_LIGHT};
use crate::seed::rng_from_seed;
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;

/// Per-satellite ISL path losses and noise variances for one cluster
/// snapshot. Exactly one entry (the master node) has loss 1 and noise 0.
#[derive(Debug, Clone, PartialEq)]
pub struct IslGeometry {
    pub beta_isl: Vec<f64>,
    pub isl_noise_var: Vec<f64>,
    pub mn_index: usize,
}

impl IslGeometry {
    pub fn new(beta_isl: Vec<f64>, isl_noise_var: Vec<f64>) -> Result<Self> {
        if beta_isl.len() != isl_noise_var.len() {
            return Err(Error::Domain("beta_isl / isl_noise_var length mismatch".into()));
        }
        let mut mn = None;
        for (i, (&b, &v)) in beta_isl.iter().zip(&isl_noise_var).enumerate() {
            if b == 1.0 && v == 0.0 {
                if mn.is_some() {
                    return Err(Error::Domain("more than one master-node entry".into()));
                }
                mn = Some(i);
            } else if !(b > 0.0) || v < 0.0 {
                return Err(Error::Domain(format!(
                    "entry {i}: beta_isl must be > 0 and noise >= 0, got ({b}, {v})"
                )));
            }
        }
        let mn_index =
            mn.ok_or_else(|| Error::Domain("no master-node entry (loss 1, noise 0)".into()))?;
        Ok(Self { beta_isl, isl_noise_var, mn_index })
    }

    /// Build from the distances of each cluster member to the master node.
    /// `dist_to_mn[mn_index]` is ignored (self link).
    pub fn from_distances(dist_to_mn: &[f64], mn_index: usize, isl: &IslParams) -> Result<Self> {
        if mn_index >= dist_to_mn.len() {
            return Err(Error::Domain(format!(
                "mn_index {mn_index} out of range for {} satellites",
                dist_to_mn.len()
            )));
        }
        let noise = isl.noise_power();
        let mut beta = Vec::with_capacity(dist_to_mn.len());
        let mut var = Vec::with_capacity(dist_to_mn.len());
        for (i, &d) in dist_to_mn.iter().enumerate() {
            if i == mn_index {
                beta.push(1.0);
                var.push(0.0);
            } else {
                beta.push(fspl(d, isl.frequency)?);
                var.push(noise);
            }
        }
        Self::new(beta, var)
    }

    /// Same geometry with ISL noise switched off on every branch.
    pub fn without_isl_noise(&self) -> Self {
        Self {
            beta_isl: self.beta_isl.clone(),
            isl_noise_var: vec![0.0; self.isl_noise_var.len()],
            mn_index: self.mn_index,
        }
    }

    pub fn len(&self) -> usize {
        self.beta_isl.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta_isl.is_empty()
    }
}

/// Relay scaling vectors. `c` carries the uplink-loss compensation used when
/// raw signals are forwarded; `c2` is the bare ISL scaling used when
/// satellites forward locally processed signals.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector {
    /// `c_m = sqrt(p_isl * beta_up_m / beta_isl_m)`; master node:
    /// `sqrt(beta_up_mn)`.
    pub c: Vec<f64>,
    /// `c2_m = sqrt(p_isl / beta_isl_m)`; master node: 1.
    pub c2: Vec<f64>,
}

/// Compose the relay scaling vectors for a cluster snapshot. The master
/// node's entries carry no relay gain (its signal never crosses an ISL).
pub fn c_vector(beta_up: &[f64], geometry: &IslGeometry, isl: &IslParams) -> Result<CVector> {
    if beta_up.len() != geometry.len() {
        return Err(Error::Domain(format!(
            "beta_up has {} entries but geometry has {}",
            beta_up.len(),
            geometry.len()
        )));
    }
    let p_isl = isl.composite_gain();
    let mut c = Vec::with_capacity(beta_up.len());
    let mut c2 = Vec::with_capacity(beta_up.len());
    for (i, (&bu, &bi)) in beta_up.iter().zip(&geometry.beta_isl).enumerate() {
        if i == geometry.mn_index {
            c.push(bu.sqrt());
            c2.push(1.0);
        } else {
            c.push((p_isl * bu / bi).sqrt());
            c2.push((p_isl / bi).sqrt());
        }
    }
    Ok(CVector { c, c2 })
}

/// Free-space-optical beam and jitter parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FsoParams {
    /// Beam waist at the transmitter, m.
    pub omega0: f64,
    /// Jitter ratio `gamma = w_z / (2 sigma_p)`.
    pub gamma: f64,
    /// Refractive-index structure constant, m^(-2/3). Zero on ISLs.
    pub cn2: f64,
    /// Optical wavelength, m.
    pub wavelength: f64,
}

impl FsoParams {
    /// Stock FSO optics: 5 cm waist, gamma = 1.1, no turbulence, 193 THz.
    pub fn stock() -> Self {
        Self { omega0: 0.05, gamma: 1.1, cn2: 0.0, wavelength: SPEED_OF_LIGHT / 193.0e12 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0) || !(self.gamma > 0.0) || self.cn2 < 0.0 || !(self.wavelength > 0.0)
        {
            return Err(Error::Config(format!("invalid FSO parameters: {self:?}")));
        }
        Ok(())
    }
}

/// Received beam width after diffraction and (optional) turbulence
/// spreading over an ISL of length `d_isl`.
pub fn beam_width(d_isl: f64, fso: &FsoParams) -> f64 {
    let rayleigh_range = PI * fso.omega0 * fso.omega0 / fso.wavelength;
    let wd = fso.omega0 * (1.0 + (d_isl / rayleigh_range).powi(2)).sqrt();
    if fso.cn2 == 0.0 || d_isl == 0.0 {
        return wd;
    }
    let k = 2.0 * PI / fso.wavelength;
    let rytov2 = 1.23 * fso.cn2 * k.powf(7.0 / 6.0) * d_isl.powf(11.0 / 6.0);
    wd * (1.0 + 1.33 * rytov2 * (2.0 * d_isl / (k * wd * wd)).powf(5.0 / 6.0)).sqrt()
}

/// Fraction of optical power collected on each branch for one jitter draw.
#[derive(Debug, Clone, PartialEq)]
pub struct PointingLossSample {
    pub alpha_p: Vec<f64>,
}

impl PointingLossSample {
    /// No pointing loss on any branch.
    pub fn ones(m: usize) -> Self {
        Self { alpha_p: vec![1.0; m] }
    }

    pub fn len(&self) -> usize {
        self.alpha_p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha_p.is_empty()
    }
}

/// Rayleigh draw by inverse CDF; the `1 - U` flip keeps the log argument
/// in (0, 1].
fn rayleigh<R: Rng>(sigma: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    sigma * (-2.0 * (1.0 - u).ln()).sqrt()
}

/// One normalized pointing-loss draw: Rayleigh radial jitter with
/// `sigma_p = w_z / (2 gamma)` collected through `exp(-2 theta^2 / w_z^2)`.
/// The distribution depends only on gamma, so the unit beam width is used.
pub fn sample_alpha<R: Rng>(gamma: f64, rng: &mut R) -> f64 {
    let sigma_p = 1.0 / (2.0 * gamma);
    let theta = rayleigh(sigma_p, rng);
    (-2.0 * theta * theta).exp()
}

/// Draw pointing losses for every branch of a cluster; the master node's
/// own entry is fixed at 1.
pub fn sample_pointing_loss(
    d_isl: &[f64],
    fso: &FsoParams,
    mn_index: usize,
    seed: u64,
) -> Result<PointingLossSample> {
    if d_isl.is_empty() {
        return Err(Error::Domain("need at least one satellite".into()));
    }
    if mn_index >= d_isl.len() {
        return Err(Error::Domain(format!("mn_index {mn_index} out of range")));
    }
    fso.validate()?;
    let mut rng = rng_from_seed(seed);
    let alpha_p = d_isl
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            if i == mn_index {
                1.0
            } else {
                // scale-free: theta/w_z is what matters
                let _ = beam_width(d, fso);
                sample_alpha(fso.gamma, &mut rng)
            }
        })
        .collect();
    Ok(PointingLossSample { alpha_p })
}

/// First and second moments of the pointing loss: `g^2/(g^2+1)` and
/// `g^2/(g^2+2)`.
pub fn pointing_moments(gamma: f64) -> (f64, f64) {
    let g2 = gamma * gamma;
    (g2 / (g2 + 1.0), g2 / (g2 + 2.0))
}

fn check_dims(chan: &ChannelRealization, c: &[f64], geometry: &IslGeometry) -> Result<()> {
    if chan.len() != c.len() || c.len() != geometry.len() {
        return Err(Error::Domain(format!(
            "dimension mismatch: channel {}, c {}, geometry {}",
            chan.len(),
            c.len(),
            geometry.len()
        )));
    }
    Ok(())
}

/// Per-branch signal vector collected at the master node over THz ISLs:
/// `y_m = c_m (sqrt(p) h_m s + n_up_m) + n_isl_m`.
pub fn mn_received_thz(
    s: Complex64,
    chan: &ChannelRealization,
    c: &[f64],
    p: f64,
    sigma_n_up2: f64,
    geometry: &IslGeometry,
    seed: u64,
) -> Result<Vec<Complex64>> {
    check_dims(chan, c, geometry)?;
    let mut rng = rng_from_seed(seed);
    let sp = p.sqrt();
    let n_up: Vec<Complex64> =
        (0..c.len()).map(|_| complex_normal(&mut rng) * sigma_n_up2.sqrt()).collect();
    let n_isl: Vec<Complex64> = geometry
        .isl_noise_var
        .iter()
        .map(|&v| complex_normal(&mut rng) * v.sqrt())
        .collect();
    Ok((0..c.len())
        .map(|m| c[m] * (sp * chan.h[m] * s + n_up[m]) + n_isl[m])
        .collect())
}

/// Scalar collected at the master node's optical receiver over FSO ISLs:
/// all branches sum coherently, pointing losses scale signal and uplink
/// noise but not the ISL noise.
pub fn mn_received_fso(
    s: Complex64,
    chan: &ChannelRealization,
    c: &[f64],
    alpha: &PointingLossSample,
    p: f64,
    sigma_n_up2: f64,
    geometry: &IslGeometry,
    seed: u64,
) -> Result<Complex64> {
    check_dims(chan, c, geometry)?;
    if alpha.len() != c.len() {
        return Err(Error::Domain("pointing-loss vector length mismatch".into()));
    }
    let mut rng = rng_from_seed(seed);
    let sp = p.sqrt();
    let n_up: Vec<Complex64> =
        (0..c.len()).map(|_| complex_normal(&mut rng) * sigma_n_up2.sqrt()).collect();
    let n_isl: Vec<Complex64> = geometry
        .isl_noise_var
        .iter()
        .map(|&v| complex_normal(&mut rng) * v.sqrt())
        .collect();
    let mut acc = Complex64::ZERO;
    for m in 0..c.len() {
        acc += alpha.alpha_p[m] * c[m] * (sp * chan.h[m] * s + n_up[m]) + n_isl[m];
    }
    Ok(acc)
}
