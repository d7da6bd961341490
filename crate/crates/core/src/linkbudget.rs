//! Link-budget scalars shared by the uplink and the inter-satellite hop:
//! dB conversions, free-space path loss, and thermal noise power.
//!
//! Everything downstream of this module works in linear SI units; decibels
//! appear only at configuration and report boundaries.

use crate::error::{Error, Result};

/// Speed of light used by the path-loss model, m/s.
///
/// Kept at the rounded 3e8 so the stock numeric cases (e.g. the 550 km /
/// 2 GHz uplink loss of 2.12e15) reproduce exactly.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Convert a dB quantity (dB, dBW, dBi) to a linear ratio / watts.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Convert a linear ratio to dB.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Free-space path loss `(4 pi d f / c)^2` as a linear power ratio.
pub fn fspl(distance_m: f64, frequency_hz: f64) -> Result<f64> {
    if distance_m <= 0.0 || frequency_hz <= 0.0 {
        return Err(Error::Domain(format!(
            "fspl requires positive distance and frequency, got d={distance_m}, f={frequency_hz}"
        )));
    }
    let x = 4.0 * std::f64::consts::PI * distance_m * frequency_hz / SPEED_OF_LIGHT;
    Ok(x * x)
}

/// Thermal noise power `k_B * T * B` in watts.
pub fn thermal_noise_power(temperature_k: f64, bandwidth_hz: f64) -> f64 {
    BOLTZMANN * temperature_k * bandwidth_hz
}

/// Uplink power/gain/noise parameter set (user -> satellite hop).
///
/// All fields linear SI. The composite gain `p = P_T G_T G_R` multiplies the
/// unit-power symbol in the received-signal model.
#[derive(Debug, Clone, PartialEq)]
pub struct UplinkParams {
    /// Transmit power, watts.
    pub tx_power: f64,
    /// Transmit antenna gain, linear.
    pub tx_gain: f64,
    /// Satellite receive antenna gain, linear.
    pub rx_gain: f64,
    /// Carrier frequency, Hz.
    pub frequency: f64,
    /// Signal bandwidth, Hz.
    pub bandwidth: f64,
    /// Ambient noise temperature, kelvin.
    pub noise_temperature: f64,
}

impl UplinkParams {
    /// Stock suburban S-band uplink: -6 dBW phone, 5 dBi phone antenna,
    /// 35 dBi satellite antenna, 2 GHz carrier, 20 MHz bandwidth, 290 K.
    pub fn stock() -> Self {
        Self {
            tx_power: db_to_linear(-6.0),
            tx_gain: db_to_linear(5.0),
            rx_gain: db_to_linear(35.0),
            frequency: 2.0e9,
            bandwidth: 20.0e6,
            noise_temperature: 290.0,
        }
    }

    /// Composite gain `p = P_T G_T G_R`.
    pub fn composite_gain(&self) -> f64 {
        self.tx_power * self.tx_gain * self.rx_gain
    }

    /// Uplink thermal noise power `k_B T B`, watts.
    pub fn noise_power(&self) -> f64 {
        thermal_noise_power(self.noise_temperature, self.bandwidth)
    }

    pub fn validate(&self) -> Result<()> {
        validate_positive(&[
            ("tx_power", self.tx_power),
            ("tx_gain", self.tx_gain),
            ("rx_gain", self.rx_gain),
            ("frequency", self.frequency),
            ("bandwidth", self.bandwidth),
            ("noise_temperature", self.noise_temperature),
        ])
    }
}

/// Inter-satellite link power/gain/noise parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct IslParams {
    /// Relay transmit power, watts.
    pub tx_power: f64,
    /// Relay transmit antenna gain, linear.
    pub tx_gain: f64,
    /// Receive antenna gain at the collecting satellite, linear.
    pub rx_gain: f64,
    /// ISL carrier frequency, Hz.
    pub frequency: f64,
    /// ISL bandwidth, Hz (2% of the carrier by default).
    pub bandwidth: f64,
    /// ISL ambient noise temperature, kelvin.
    pub noise_temperature: f64,
}

impl IslParams {
    /// Build an ISL parameter set with the stock 2%-of-carrier bandwidth.
    pub fn new(tx_power: f64, tx_gain: f64, rx_gain: f64, frequency: f64, noise_temperature: f64) -> Self {
        Self {
            tx_power,
            tx_gain,
            rx_gain,
            frequency,
            bandwidth: 0.02 * frequency,
            noise_temperature,
        }
    }

    /// Stock THz ISL: 5 dBW, 60 dBi both ends, 1 THz carrier, 7000 K.
    pub fn stock_thz() -> Self {
        Self::new(db_to_linear(5.0), db_to_linear(60.0), db_to_linear(60.0), 1.0e12, 7000.0)
    }

    /// Stock FSO ISL: 5 dBW, 90 dBi both ends, 193 THz carrier, 7000 K.
    pub fn stock_fso() -> Self {
        Self::new(db_to_linear(5.0), db_to_linear(90.0), db_to_linear(90.0), 193.0e12, 7000.0)
    }

    /// Same parameters at a different carrier; bandwidth follows as 2% of f.
    pub fn with_frequency(&self, frequency: f64) -> Self {
        Self {
            frequency,
            bandwidth: 0.02 * frequency,
            ..self.clone()
        }
    }

    /// Composite relay gain `p_isl = P_T_isl G_T_isl G_R_isl`.
    pub fn composite_gain(&self) -> f64 {
        self.tx_power * self.tx_gain * self.rx_gain
    }

    /// ISL thermal noise power `k_B T_isl B_isl`, watts.
    pub fn noise_power(&self) -> f64 {
        thermal_noise_power(self.noise_temperature, self.bandwidth)
    }

    pub fn validate(&self) -> Result<()> {
        validate_positive(&[
            ("tx_power", self.tx_power),
            ("tx_gain", self.tx_gain),
            ("rx_gain", self.rx_gain),
            ("frequency", self.frequency),
            ("bandwidth", self.bandwidth),
            ("noise_temperature", self.noise_temperature),
        ])
    }
}

fn validate_positive(fields: &[(&str, f64)]) -> Result<()> {
    for (name, v) in fields {
        if !(*v > 0.0) {
            return Err(Error::Config(format!("{name} must be > 0, got {v}")));
        }
    }
    Ok(())
}
