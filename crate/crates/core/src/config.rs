//! Scenario configuration.
//!
//! Every physical, task, reward and episode parameter lives in
//! [`ScenarioConfig`]. JSON keys follow the symbol names used throughout the
//! model (`I`, `T`, `eta_ps`, `P_tran`, ...); absent keys take the defaults
//! listed on each field and unknown keys are rejected.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Rotary-wing propulsion model parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropulsionParams {
    /// Blade profile power in hover, W.
    #[serde(rename = "P0_blade")]
    pub blade_profile_power: f64,
    /// Induced power in hover, W.
    #[serde(rename = "P_ind")]
    pub induced_power: f64,
    /// Rotor blade tip speed, m/s.
    #[serde(rename = "U_tip")]
    pub tip_speed: f64,
    /// Mean rotor induced velocity in hover, m/s.
    #[serde(rename = "v0_rotor")]
    pub hover_induced_velocity: f64,
    /// Fuselage drag ratio.
    #[serde(rename = "d0_drag")]
    pub fuselage_drag_ratio: f64,
    /// Air density, kg/m^3.
    pub rho_air: f64,
    /// Rotor solidity.
    #[serde(rename = "s_solidity")]
    pub rotor_solidity: f64,
    /// Rotor disc area, m^2.
    #[serde(rename = "A_disc")]
    pub rotor_disc_area: f64,
}

impl Default for PropulsionParams {
    fn default() -> Self {
        Self {
            blade_profile_power: 79.86,
            induced_power: 88.63,
            tip_speed: 120.0,
            hover_induced_velocity: 4.03,
            fuselage_drag_ratio: 0.6,
            rho_air: 1.225,
            rotor_solidity: 0.05,
            rotor_disc_area: 0.503,
        }
    }
}

impl PropulsionParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("propulsion.P0_blade", self.blade_profile_power),
            ("propulsion.P_ind", self.induced_power),
            ("propulsion.U_tip", self.tip_speed),
            ("propulsion.v0_rotor", self.hover_induced_velocity),
            ("propulsion.d0_drag", self.fuselage_drag_ratio),
            ("propulsion.rho_air", self.rho_air),
            ("propulsion.s_solidity", self.rotor_solidity),
            ("propulsion.A_disc", self.rotor_disc_area),
        ];
        for (name, value) in fields {
            positive(name, value)?;
        }
        Ok(())
    }
}

/// How the terminal bias reward is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BiasRewardMode {
    /// `rho3 * R_b * w_i` for the terminal served this slot, 0 otherwise.
    #[default]
    Served,
    /// `rho3 * R_b * sum_i w_i` every slot, regardless of the action.
    AllTerminals,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    /// Half the edge length of the square flight/deployment area, m.
    pub area_half_width: f64,
    /// Number of ground terminals.
    #[serde(rename = "I")]
    pub terminal_count: usize,
    /// Slots per episode.
    #[serde(rename = "T")]
    pub slots: usize,
    /// Slot length, s.
    pub tau: f64,
    /// UAV altitude, m.
    #[serde(rename = "H")]
    pub altitude: f64,
    /// Maximum UAV speed, m/s.
    pub v_max: f64,

    /// Carrier frequency, Hz.
    #[serde(rename = "f_c")]
    pub carrier_freq: f64,
    /// Speed of light, m/s.
    #[serde(rename = "c")]
    pub light_speed: f64,
    /// Bandwidth, Hz.
    #[serde(rename = "B")]
    pub bandwidth: f64,
    /// Noise power spectral density, dBm/Hz.
    pub noise_psd: f64,
    pub a1: f64,
    pub b1: f64,
    /// Excess LoS loss, dB.
    pub eta_los: f64,
    /// Excess NLoS loss, dB.
    pub eta_nlos: f64,
    /// Antenna half-power beamwidth, rad.
    pub beta: f64,

    /// Power-splitting ratio routed to energy harvesting.
    pub eta_ps: f64,
    /// UAV transmit power, W.
    #[serde(rename = "P_tran")]
    pub uav_tx_power: f64,
    /// Terminal transmit power, W.
    #[serde(rename = "P_i")]
    pub terminal_tx_power: f64,
    pub a2: f64,
    /// EH logistic midpoint, W.
    pub b2: f64,
    /// Saturation power of the EH circuit, W.
    #[serde(rename = "P_eh_max")]
    pub eh_max_power: f64,

    /// Effective switched capacitance.
    pub k_cap: f64,
    /// CPU power exponent.
    pub nu: f64,
    /// UAV CPU frequency, Hz.
    pub f_u: f64,
    /// Terminal CPU frequency, Hz.
    pub f_i: f64,

    /// Task size, bits.
    #[serde(rename = "D_p")]
    pub task_bits: f64,
    /// Computation density, cycles/bit.
    #[serde(rename = "C_i")]
    pub cycles_per_bit: f64,
    /// Bernoulli task arrival probability per terminal per slot.
    pub p_arrival: f64,
    /// Downlink payload, bits.
    #[serde(rename = "D_r")]
    pub downlink_bits: f64,
    /// Uplink protocol overhead, bits.
    pub delta_up: f64,
    /// Downlink protocol overhead, bits.
    pub delta_down: f64,

    /// Battery capacity, uJ.
    #[serde(rename = "E_max")]
    pub e_max: f64,
    /// Minimum operating battery level, uJ.
    #[serde(rename = "E_min")]
    pub e_min: f64,
    /// Reserved energy kept above `E_min` after any task action, uJ.
    pub delta_e: f64,
    /// Daily drain rate, uW.
    #[serde(rename = "dE1")]
    pub daily_drain: f64,
    /// Initial battery, uJ. Defaults to `E_max / 2` when absent.
    #[serde(rename = "E_init", skip_serializing_if = "Option::is_none")]
    pub e_init: Option<f64>,

    /// Minimum uplink/downlink rate for offloading, bit/s.
    #[serde(rename = "R_min")]
    pub r_min: f64,

    pub rho1: f64,
    pub rho2: f64,
    pub rho3: f64,
    /// Bonus for charging the lowest-energy terminal.
    #[serde(rename = "C_char")]
    pub charge_bonus: f64,
    /// Out-of-bound penalty.
    #[serde(rename = "R_bar")]
    pub oob_penalty: f64,
    /// Bias-reward baseline.
    #[serde(rename = "R_b")]
    pub bias_baseline: f64,

    pub propulsion: PropulsionParams,
    pub seed: u64,

    /// Subtract task computation/transmission energy from the battery.
    pub battery_includes_task_energy: bool,
    /// Serve the nearest in-cone terminal even when no in-cone terminal has a task.
    pub serve_without_task: bool,
    /// Charge `R_bar` every slot instead of only on boundary violations.
    pub oob_penalty_always: bool,
    pub bias_reward_mode: BiasRewardMode,
    /// Dart-throwing budget for Poisson disk placement.
    pub placement_attempts: usize,
    /// Fixed terminal coordinates; bypasses random placement when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terminal_positions: Option<Vec<[f64; 2]>>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            area_half_width: 20.0,
            terminal_count: 5,
            slots: 30,
            tau: 1.0,
            altitude: 5.0,
            v_max: 30.0,
            carrier_freq: 2.4e9,
            light_speed: 3e8,
            bandwidth: 1e6,
            noise_psd: -174.0,
            a1: 4.88,
            b1: 0.43,
            eta_los: 0.1,
            eta_nlos: 21.0,
            beta: PI / 4.0,
            eta_ps: 0.8,
            uav_tx_power: 40.0,
            terminal_tx_power: 0.1,
            a2: 150.0,
            b2: 0.014,
            eh_max_power: 0.024,
            k_cap: 1e-28,
            nu: 3.0,
            f_u: 5e9,
            f_i: 1e9,
            task_bits: 1e3,
            cycles_per_bit: 100.0,
            p_arrival: 0.5,
            downlink_bits: 1e3,
            delta_up: 0.0,
            delta_down: 0.0,
            e_max: 5000.0,
            e_min: 800.0,
            delta_e: 50.0,
            daily_drain: 50.0,
            e_init: None,
            r_min: 22e6,
            rho1: 0.3,
            rho2: 1.0,
            rho3: 0.5,
            charge_bonus: 300.0,
            oob_penalty: 800.0,
            bias_baseline: 50.0,
            propulsion: PropulsionParams::default(),
            seed: 1,
            battery_includes_task_energy: true,
            serve_without_task: true,
            oob_penalty_always: false,
            bias_reward_mode: BiasRewardMode::Served,
            placement_attempts: 10_000,
            terminal_positions: None,
        }
    }
}

fn positive(field: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and > 0, got {value}")))
    }
}

fn non_negative(field: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and >= 0, got {value}")))
    }
}

impl ScenarioConfig {
    /// Parse a config from JSON text and validate it.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(Error::Parse)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Initial battery level, uJ.
    pub fn initial_battery(&self) -> f64 {
        self.e_init.unwrap_or(self.e_max / 2.0)
    }

    /// Horizontal radius of the antenna coverage cone, m.
    pub fn coverage_radius(&self) -> f64 {
        self.altitude * self.beta.tan()
    }

    /// CPU cycles required by one task.
    pub fn task_cycles(&self) -> f64 {
        self.cycles_per_bit * self.task_bits
    }

    /// Minimum pairwise separation for Poisson disk placement, m.
    pub fn placement_radius(&self) -> f64 {
        self.area_half_width / 2.0 * (2.0 / self.terminal_count as f64).sqrt()
    }

    /// Hex SHA-256 of the canonical JSON serialization.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }

    pub fn validate(&self) -> Result<()> {
        positive("area_half_width", self.area_half_width)?;
        if self.terminal_count == 0 {
            return Err(Error::invalid("I", "must be >= 1"));
        }
        positive("tau", self.tau)?;
        positive("H", self.altitude)?;
        positive("v_max", self.v_max)?;
        positive("f_c", self.carrier_freq)?;
        positive("c", self.light_speed)?;
        positive("B", self.bandwidth)?;
        if !self.noise_psd.is_finite() {
            return Err(Error::invalid("noise_psd", "must be finite"));
        }
        positive("a1", self.a1)?;
        positive("b1", self.b1)?;
        non_negative("eta_los", self.eta_los)?;
        non_negative("eta_nlos", self.eta_nlos)?;
        if !(self.beta > 0.0 && self.beta < PI / 2.0) {
            return Err(Error::invalid("beta", format!("must lie in (0, pi/2), got {}", self.beta)));
        }
        if !(self.eta_ps > 0.0 && self.eta_ps <= 1.0) {
            return Err(Error::invalid("eta_ps", format!("must lie in (0, 1], got {}", self.eta_ps)));
        }
        positive("P_tran", self.uav_tx_power)?;
        positive("P_i", self.terminal_tx_power)?;
        positive("a2", self.a2)?;
        positive("b2", self.b2)?;
        positive("P_eh_max", self.eh_max_power)?;
        positive("k_cap", self.k_cap)?;
        positive("nu", self.nu)?;
        positive("f_u", self.f_u)?;
        positive("f_i", self.f_i)?;
        non_negative("D_p", self.task_bits)?;
        positive("C_i", self.cycles_per_bit)?;
        if !(0.0..=1.0).contains(&self.p_arrival) {
            return Err(Error::invalid("p_arrival", format!("must lie in [0, 1], got {}", self.p_arrival)));
        }
        non_negative("D_r", self.downlink_bits)?;
        non_negative("delta_up", self.delta_up)?;
        non_negative("delta_down", self.delta_down)?;
        positive("E_min", self.e_min)?;
        positive("E_max", self.e_max)?;
        if self.e_min >= self.e_max {
            return Err(Error::invalid(
                "E_min",
                format!("must be < E_max ({} >= {})", self.e_min, self.e_max),
            ));
        }
        non_negative("delta_e", self.delta_e)?;
        non_negative("dE1", self.daily_drain)?;
        let e_init = self.initial_battery();
        if !(self.e_min..=self.e_max).contains(&e_init) {
            return Err(Error::invalid("E_init", format!("must lie in [E_min, E_max], got {e_init}")));
        }
        non_negative("R_min", self.r_min)?;
        for (name, w) in [("rho1", self.rho1), ("rho2", self.rho2), ("C_char", self.charge_bonus)] {
            non_negative(name, w)?;
        }
        if !(0.0..=1.0).contains(&self.rho3) {
            return Err(Error::invalid("rho3", format!("must lie in [0, 1], got {}", self.rho3)));
        }
        non_negative("R_bar", self.oob_penalty)?;
        non_negative("R_b", self.bias_baseline)?;
        self.propulsion.validate()?;
        if self.task_cycles() > self.tau * self.f_i {
            return Err(Error::invalid(
                "C_i",
                format!(
                    "C_i * D_p = {} cycles exceeds tau * f_i = {}",
                    self.task_cycles(),
                    self.tau * self.f_i
                ),
            ));
        }
        if self.placement_attempts == 0 {
            return Err(Error::invalid("placement_attempts", "must be >= 1"));
        }
        if let Some(positions) = &self.terminal_positions {
            if positions.len() != self.terminal_count {
                return Err(Error::invalid(
                    "terminal_positions",
                    format!("has {} entries but I = {}", positions.len(), self.terminal_count),
                ));
            }
            let hw = self.area_half_width;
            if positions
                .iter()
                .any(|p| !p[0].is_finite() || !p[1].is_finite() || p[0].abs() > hw || p[1].abs() > hw)
            {
                return Err(Error::invalid("terminal_positions", "every position must lie inside the area"));
            }
        }
        Ok(())
    }
}

/// Read and validate a JSON config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    ScenarioConfig::from_json_str(&text)
}
