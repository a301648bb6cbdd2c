//! Air-to-ground link model: probabilistic LoS path loss, directional antenna
//! gain, SNR and Shannon rates.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    pub d_horiz: f64,
    pub slant: f64,
    pub altitude: f64,
}

impl LinkGeometry {
    pub fn new(d_horiz: f64, altitude: f64) -> Self {
        Self {
            d_horiz,
            slant: d_horiz.hypot(altitude),
            altitude,
        }
    }

    pub fn between(uav: [f64; 2], terminal: [f64; 2], altitude: f64) -> Self {
        Self::new((uav[0] - terminal[0]).hypot(uav[1] - terminal[1]), altitude)
    }

    /// Elevation angle in degrees; 90 when directly overhead.
    pub fn elevation_deg(&self) -> f64 {
        if self.d_horiz == 0.0 {
            90.0
        } else {
            (self.altitude / self.d_horiz).atan().to_degrees()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub p_los: f64,
    pub path_loss_db: f64,
    /// Linear channel power gain.
    pub channel_gain: f64,
    /// Linear antenna gain.
    pub antenna_gain: f64,
    pub snr_down: f64,
    /// Downlink rate, bit/s.
    pub rate_down: f64,
    /// Uplink rate, bit/s.
    pub rate_up: f64,
    /// Noise power, W.
    pub noise_power: f64,
}

impl LinkBudget {
    pub fn in_cone(&self) -> bool {
        self.antenna_gain > 0.0
    }
}

pub fn los_probability(geom: &LinkGeometry, a1: f64, b1: f64) -> f64 {
    1.0 / (1.0 + a1 * (-b1 * (geom.elevation_deg() - a1)).exp())
}

pub fn path_loss_db(geom: &LinkGeometry, cfg: &ScenarioConfig) -> Result<f64> {
    if geom.slant.is_nan() || geom.slant <= 0.0 {
        return Err(Error::Geometry(format!("slant distance {} must be > 0", geom.slant)));
    }
    let p_los = los_probability(geom, cfg.a1, cfg.b1);
    let free_space = 20.0 * (4.0 * PI * cfg.carrier_freq * geom.slant / cfg.light_speed).log10();
    Ok(free_space + p_los * cfg.eta_los + (1.0 - p_los) * cfg.eta_nlos)
}

/// Relative slack on the cone boundary; `tan(pi/4)` rounds below 1.
const CONE_EPS: f64 = 1e-12;

/// `2.28 / beta^2` inside the cone `d_horiz <= H tan(beta)` (boundary
/// included), 0 outside.
pub fn antenna_gain(geom: &LinkGeometry, beta: f64) -> f64 {
    let radius = geom.altitude * beta.tan();
    if geom.d_horiz <= radius * (1.0 + CONE_EPS) {
        2.28 / (beta * beta)
    } else {
        0.0
    }
}

/// Thermal noise power in W: the dBm/Hz density integrated over the bandwidth.
pub fn noise_power(cfg: &ScenarioConfig) -> f64 {
    10f64.powf((cfg.noise_psd + 10.0 * cfg.bandwidth.log10() - 30.0) / 10.0)
}

pub fn rates(geom: &LinkGeometry, cfg: &ScenarioConfig) -> Result<LinkBudget> {
    let p_los = los_probability(geom, cfg.a1, cfg.b1);
    let path_loss_db = path_loss_db(geom, cfg)?;
    let channel_gain = 10f64.powf(-path_loss_db / 10.0);
    let antenna_gain = antenna_gain(geom, cfg.beta);
    let noise_power = noise_power(cfg);
    let snr_down = (1.0 - cfg.eta_ps) * channel_gain * cfg.uav_tx_power * antenna_gain / noise_power;
    let snr_up = cfg.terminal_tx_power * channel_gain * antenna_gain / noise_power;
    Ok(LinkBudget {
        p_los,
        path_loss_db,
        channel_gain,
        antenna_gain,
        snr_down,
        rate_down: cfg.bandwidth * (1.0 + snr_down).log2(),
        rate_up: cfg.bandwidth * (1.0 + snr_up).log2(),
        noise_power,
    })
}
