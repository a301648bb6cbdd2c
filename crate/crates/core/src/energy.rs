//! Energy models: non-linear harvesting, CPU energy, rotary-wing propulsion,
//! SWIPT transmission energy and the terminal battery law.
//!
//! Terminal-side energies are in uJ, UAV-side energies in J.

use serde::{Deserialize, Serialize};

use crate::channel::LinkBudget;
use crate::config::{PropulsionParams, ScenarioConfig};
use crate::scenario::Task;
use crate::tasking::SlotSchedule;

pub const UJ_PER_J: f64 = 1e6;

/// Energy flows of one terminal during one slot, all in uJ.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TerminalFlows {
    /// Local computation energy.
    pub comp: f64,
    /// Uplink transmission energy.
    pub tran: f64,
    /// Realized harvested energy.
    pub harvested: f64,
    /// Daily-operation drain.
    pub daily_drain: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SlotEnergyFlows {
    /// Propulsion energy, J.
    pub uav_move: f64,
    /// SWIPT transmission energy, J.
    pub uav_tran: f64,
    /// Edge computation energy, J.
    pub uav_comp: f64,
    pub terminals: Vec<TerminalFlows>,
}

impl SlotEnergyFlows {
    pub fn uav_total(&self) -> f64 {
        self.uav_move + self.uav_tran + self.uav_comp
    }

    /// Task energy spent by terminals (computation + transmission), J.
    pub fn terminal_total(&self) -> f64 {
        self.terminals.iter().map(|t| t.comp + t.tran).sum::<f64>() / UJ_PER_J
    }

    /// System energy consumption of the slot, J.
    pub fn total(&self) -> f64 {
        self.uav_total() + self.terminal_total()
    }
}

/// Normalized logistic harvesting curve: `F(0) = 0`, saturating at `P_eh_max`.
pub fn eh_logistic(p_in: f64, a2: f64, b2: f64, p_eh_max: f64) -> f64 {
    let offset = 1.0 / (1.0 + (a2 * b2).exp());
    let logistic = 1.0 / (1.0 + (-a2 * (p_in - b2)).exp());
    p_eh_max * (logistic - offset) / (1.0 - offset)
}

/// Harvested power at the terminal, W.
pub fn eh_rate(budget: &LinkBudget, cfg: &ScenarioConfig) -> f64 {
    if !budget.in_cone() {
        return 0.0;
    }
    let p_in = cfg.eta_ps * cfg.uav_tx_power * budget.channel_gain * budget.antenna_gain;
    eh_logistic(p_in, cfg.a2, cfg.b2, cfg.eh_max_power)
}

/// Local computation energy `k f_i^nu * cycles / f_i`, uJ.
pub fn local_compute_energy(task: &Task, cfg: &ScenarioConfig) -> f64 {
    cfg.k_cap * cfg.f_i.powf(cfg.nu) * (task.cycles() / cfg.f_i) * UJ_PER_J
}

/// Edge computation energy `k f_u^nu * cycles / f_u`, J.
pub fn uav_compute_energy(task: &Task, cfg: &ScenarioConfig) -> f64 {
    cfg.k_cap * cfg.f_u.powf(cfg.nu) * (task.cycles() / cfg.f_u)
}

/// Rotary-wing propulsion power at horizontal speed `v`, W: blade profile,
/// induced and parasite terms.
pub fn propulsion_power(v: f64, p: &PropulsionParams) -> f64 {
    let v2 = v * v;
    let v0_2 = p.hover_induced_velocity * p.hover_induced_velocity;
    let blade = p.blade_profile_power * (1.0 + 3.0 * v2 / (p.tip_speed * p.tip_speed));
    let induced =
        p.induced_power * ((1.0 + v2 * v2 / (4.0 * v0_2 * v0_2)).sqrt() - v2 / (2.0 * v0_2)).sqrt();
    let parasite = 0.5 * p.fuselage_drag_ratio * p.rho_air * p.rotor_solidity * p.rotor_disc_area * v2 * v;
    blade + induced + parasite
}

pub fn propulsion_energy(v: f64, cfg: &ScenarioConfig) -> f64 {
    propulsion_power(v, &cfg.propulsion) * cfg.tau
}

/// UAV transmit energy over the slot's SWIPT phase, J: `P_tran` times the
/// longer of the ID time and the EH time.
pub fn swipt_transmit_energy(schedule: &SlotSchedule, cfg: &ScenarioConfig) -> f64 {
    if schedule.served_terminal.is_none() {
        return 0.0;
    }
    cfg.uav_tx_power * schedule.t_id.max(schedule.t_eh)
}

/// Battery law: clip(E - drain - task energy + harvested, E_min, E_max), uJ.
pub fn battery_update(battery: f64, flows: &TerminalFlows, cfg: &ScenarioConfig) -> f64 {
    let task = if cfg.battery_includes_task_energy {
        flows.comp + flows.tran
    } else {
        0.0
    };
    (battery - flows.daily_drain - task + flows.harvested).clamp(cfg.e_min, cfg.e_max)
}
