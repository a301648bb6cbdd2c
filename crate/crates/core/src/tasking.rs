//! Task arrivals, target selection and the per-slot timing split.
//!
//! The UAV serves at most one terminal per slot: the nearest in-cone terminal
//! holding a task, falling back to the nearest in-cone terminal for
//! downlink-only charging. Offloading is taken greedily whenever the rate,
//! timing and energy constraints all hold.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{antenna_gain, LinkBudget, LinkGeometry};
use crate::config::ScenarioConfig;
use crate::energy::{eh_rate, local_compute_energy, UJ_PER_J};
use crate::scenario::{Task, Terminal};

/// What happened to a terminal's task this slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TaskOutcome {
    #[default]
    NoTask,
    Offloaded,
    Local,
    Dropped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotSchedule {
    pub served_terminal: Option<usize>,
    pub offload: bool,
    /// Uplink (offloading) time, s.
    pub tau_up: f64,
    /// SWIPT/computation phase, s: max of UAV compute, EH and ID times.
    pub tau_s: f64,
    /// Information decoding time, s.
    pub t_id: f64,
    /// Energy harvesting time, s.
    pub t_eh: f64,
    /// UAV computation time, s.
    pub t_uav_comp: f64,
    /// Harvested power at the served terminal, W.
    pub eh_power: f64,
}

impl SlotSchedule {
    pub fn idle() -> Self {
        Self {
            served_terminal: None,
            offload: false,
            tau_up: 0.0,
            tau_s: 0.0,
            t_id: 0.0,
            t_eh: 0.0,
            t_uav_comp: 0.0,
            eh_power: 0.0,
        }
    }
}

/// Give each terminal a task with probability `p_arrival`. One uniform draw
/// per terminal, in id order.
pub fn generate_tasks<R: Rng + ?Sized>(terminals: &mut [Terminal], cfg: &ScenarioConfig, slot: usize, rng: &mut R) {
    for terminal in terminals.iter_mut() {
        let draw: f64 = rng.gen();
        terminal.pending_task = (draw < cfg.p_arrival).then_some(Task {
            size_bits: cfg.task_bits,
            gen_slot: slot,
            density: cfg.cycles_per_bit,
        });
    }
}

/// Energy floor of both task-energy constraints: the action is allowed only
/// if `cost < battery - (E_min + delta_e)`.
pub fn affordable(cost: f64, battery: f64, cfg: &ScenarioConfig) -> bool {
    cost < battery - (cfg.e_min + cfg.delta_e)
}

pub fn local_feasible(task: &Task, battery: f64, cfg: &ScenarioConfig) -> bool {
    task.cycles() / cfg.f_i <= cfg.tau && affordable(local_compute_energy(task, cfg), battery, cfg)
}

pub fn select_target(uav_pos: [f64; 2], terminals: &[Terminal], cfg: &ScenarioConfig) -> Option<usize> {
    let mut nearest_with_task: Option<(usize, f64)> = None;
    let mut nearest_any: Option<(usize, f64)> = None;
    for (idx, terminal) in terminals.iter().enumerate() {
        let geom = LinkGeometry::between(uav_pos, terminal.position, cfg.altitude);
        if antenna_gain(&geom, cfg.beta) == 0.0 {
            continue;
        }
        let d = geom.d_horiz;
        if nearest_any.is_none_or(|(_, best)| d < best) {
            nearest_any = Some((idx, d));
        }
        if terminal.pending_task.is_some() && nearest_with_task.is_none_or(|(_, best)| d < best) {
            nearest_with_task = Some((idx, d));
        }
    }
    match nearest_with_task {
        Some((idx, _)) => Some(idx),
        None if cfg.serve_without_task => nearest_any.map(|(idx, _)| idx),
        None => None,
    }
}

/// EH time `min((E_max - E_i) / E_rate, available)`, trimmed so that
/// `tau_up + t_eh <= tau` holds exactly in floating point.
fn eh_time(battery: f64, eh_power: f64, tau_up: f64, cfg: &ScenarioConfig) -> f64 {
    let available = cfg.tau - tau_up;
    let headroom = (cfg.e_max - battery) / UJ_PER_J;
    let mut t = if eh_power > 0.0 {
        (headroom / eh_power).min(available)
    } else {
        available
    };
    while t > 0.0 && tau_up + t > cfg.tau {
        t = t.next_down();
    }
    t.max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServicePlan {
    pub schedule: SlotSchedule,
    /// Outcome of the served terminal's task.
    pub outcome: TaskOutcome,
}

/// Plan service of `target` given its link budget: decide offloading and
/// compute the timing split.
pub fn build_schedule(target: &Terminal, budget: &LinkBudget, cfg: &ScenarioConfig) -> ServicePlan {
    let eh_power = eh_rate(budget, cfg);
    let t_id = if budget.rate_down > 0.0 {
        (cfg.downlink_bits + cfg.delta_down) / budget.rate_down
    } else {
        f64::INFINITY
    };

    if let Some(task) = &target.pending_task {
        if let Some(schedule) = try_offload(target, task, budget, eh_power, t_id, cfg) {
            return ServicePlan {
                schedule,
                outcome: TaskOutcome::Offloaded,
            };
        }
    }

    let outcome = match &target.pending_task {
        None => TaskOutcome::NoTask,
        Some(task) if local_feasible(task, target.battery, cfg) => TaskOutcome::Local,
        Some(_) => TaskOutcome::Dropped,
    };

    // Downlink-only SWIPT service.
    if t_id > cfg.tau {
        return ServicePlan {
            schedule: SlotSchedule::idle(),
            outcome,
        };
    }
    let t_eh = eh_time(target.battery, eh_power, 0.0, cfg);
    ServicePlan {
        schedule: SlotSchedule {
            served_terminal: Some(target.id),
            offload: false,
            tau_up: 0.0,
            tau_s: t_eh.max(t_id),
            t_id,
            t_eh,
            t_uav_comp: 0.0,
            eh_power,
        },
        outcome,
    }
}

fn try_offload(
    target: &Terminal,
    task: &Task,
    budget: &LinkBudget,
    eh_power: f64,
    t_id: f64,
    cfg: &ScenarioConfig,
) -> Option<SlotSchedule> {
    if budget.rate_down.min(budget.rate_up) < cfg.r_min || budget.rate_up <= 0.0 {
        return None;
    }
    let tau_up = (task.size_bits + cfg.delta_up) / budget.rate_up;
    if !affordable(cfg.terminal_tx_power * tau_up * UJ_PER_J, target.battery, cfg) {
        return None;
    }
    let t_uav_comp = task.cycles() / cfg.f_u;
    let t_eh = eh_time(target.battery, eh_power, tau_up, cfg);
    let tau_s = t_uav_comp.max(t_eh).max(t_id);
    if tau_up + tau_s > cfg.tau {
        return None;
    }
    Some(SlotSchedule {
        served_terminal: Some(target.id),
        offload: true,
        tau_up,
        tau_s,
        t_id,
        t_eh,
        t_uav_comp,
        eh_power,
    })
}
