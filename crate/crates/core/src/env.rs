//! Slot-based MDP over the SWIPT-MEC network.
//!
//! The state the agent sees is the UAV's planar position; batteries, tasks
//! and terminal positions only shape the reward. One [`Env`] holds one
//! episode; independent instances share nothing.

use std::f64::consts::TAU;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{rates, LinkGeometry};
use crate::config::{BiasRewardMode, ScenarioConfig};
use crate::energy::{
    battery_update, local_compute_energy, propulsion_energy, swipt_transmit_energy, uav_compute_energy,
    SlotEnergyFlows, TerminalFlows, UJ_PER_J,
};
use crate::error::{Error, Result};
use crate::metrics::{finalize, jain_index, mean, EpisodeTotals};
use crate::scenario::{place_terminals, stream_rng, Terminal, TASK_STREAM};
use crate::tasking::{build_schedule, generate_tasks, local_feasible, select_target, SlotSchedule, TaskOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UavState {
    pub x: f64,
    pub y: f64,
    pub slot: usize,
}

impl UavState {
    pub fn position(&self) -> [f64; 2] {
        [self.x, self.y]
    }
}

/// Flight command for one slot: speed (m/s) and heading (rad).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub v: f64,
    pub theta: f64,
}

impl Action {
    pub fn new(v: f64, theta: f64) -> Self {
        Self { v, theta }
    }

    /// Clamp speed into `[0, v_max]` and wrap heading into `[0, 2pi)`.
    /// Returns the bounded action and whether anything changed.
    pub fn bounded(self, v_max: f64) -> Result<(Action, bool)> {
        if !self.v.is_finite() || !self.theta.is_finite() {
            return Err(Error::InvalidAction(format!("non-finite action ({}, {})", self.v, self.theta)));
        }
        let v = self.v.clamp(0.0, v_max);
        let mut theta = self.theta.rem_euclid(TAU);
        if theta >= TAU {
            theta = 0.0;
        }
        let bounded = Action { v, theta };
        Ok((bounded, bounded != self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    /// Position normalized by the area half width, in `[-1, 1]^2`.
    pub normalized: [f64; 2],
    /// Position in metres.
    pub raw: [f64; 2],
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RewardParts {
    /// `-rho1 * E_total(t)`.
    pub obj_energy: f64,
    /// `rho2 * F_energy(t)`.
    pub obj_fair: f64,
    /// `-R_bar` or 0.
    pub penalty: f64,
    /// Terminal bias contribution.
    pub bias: f64,
    /// Charging reward.
    pub charge: f64,
}

impl RewardParts {
    pub fn sum(&self) -> f64 {
        self.obj_energy + self.obj_fair + self.penalty + self.bias + self.charge
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotReport {
    pub slot: usize,
    /// Action actually applied after bounding.
    pub action: Action,
    pub action_clamped: bool,
    /// UAV position at the end of the move.
    pub position: [f64; 2],
    pub out_of_bounds: bool,
    pub schedule: SlotSchedule,
    pub outcomes: Vec<TaskOutcome>,
    pub flows: SlotEnergyFlows,
    /// System energy of the slot, J.
    pub e_total: f64,
    pub jain: f64,
    /// Mean battery after the update, uJ.
    pub mean_battery: f64,
    /// Fairness-weighted mean battery, uJ.
    pub f_energy: f64,
    pub reward: f64,
    pub reward_parts: RewardParts,
    pub batteries_after: Vec<f64>,
    pub dropped_tasks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
    pub report: SlotReport,
}

/// Static description of a terminal at episode start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerminalInfo {
    pub id: usize,
    pub position: [f64; 2],
    pub weight: f64,
    pub initial_battery: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub config_digest: String,
    pub seed: u64,
    pub terminals: Vec<TerminalInfo>,
    pub slots: Vec<SlotReport>,
    pub totals: EpisodeTotals,
}

#[derive(Debug, Clone)]
pub struct Env {
    cfg: ScenarioConfig,
    digest: String,
    episode: Option<Episode>,
}

#[derive(Debug, Clone)]
struct Episode {
    seed: u64,
    uav: UavState,
    terminals: Vec<Terminal>,
    initial: Vec<TerminalInfo>,
    rng: ChaCha8Rng,
    reports: Vec<SlotReport>,
}

impl Env {
    pub fn new(cfg: ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let digest = cfg.digest();
        Ok(Self {
            cfg,
            digest,
            episode: None,
        })
    }

    /// Convenience: construct and reset in one call.
    pub fn with_seed(cfg: ScenarioConfig, seed: u64) -> Result<Self> {
        let mut env = Self::new(cfg)?;
        env.reset(seed)?;
        Ok(env)
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    /// Start a fresh episode: UAV at the origin, terminals placed from `seed`.
    pub fn reset(&mut self, seed: u64) -> Result<Observation> {
        let terminals = place_terminals(&self.cfg, seed)?;
        let initial = terminals
            .iter()
            .map(|t| TerminalInfo {
                id: t.id,
                position: t.position,
                weight: t.weight,
                initial_battery: t.battery,
            })
            .collect();
        self.episode = Some(Episode {
            seed,
            uav: UavState { x: 0.0, y: 0.0, slot: 0 },
            terminals,
            initial,
            rng: stream_rng(seed, TASK_STREAM),
            reports: Vec::with_capacity(self.cfg.slots),
        });
        Ok(self.observation().expect("episode just started"))
    }

    fn episode(&self) -> Result<&Episode> {
        self.episode.as_ref().ok_or(Error::NotReset)
    }

    pub fn observation(&self) -> Result<Observation> {
        let uav = self.episode()?.uav;
        let hw = self.cfg.area_half_width;
        Ok(Observation {
            normalized: [uav.x / hw, uav.y / hw],
            raw: [uav.x, uav.y],
        })
    }

    pub fn uav(&self) -> Result<UavState> {
        Ok(self.episode()?.uav)
    }

    pub fn terminals(&self) -> Result<&[Terminal]> {
        Ok(&self.episode()?.terminals)
    }

    pub fn reports(&self) -> Result<&[SlotReport]> {
        Ok(&self.episode()?.reports)
    }

    pub fn is_done(&self) -> bool {
        self.episode.as_ref().is_some_and(|ep| ep.uav.slot >= self.cfg.slots)
    }

    pub fn step(&mut self, action: Action) -> Result<StepOutcome> {
        let cfg = &self.cfg;
        let ep = self.episode.as_mut().ok_or(Error::NotReset)?;
        if ep.uav.slot >= cfg.slots {
            return Err(Error::EpisodeFinished);
        }
        let slot = ep.uav.slot;
        let (action, action_clamped) = action.bounded(cfg.v_max)?;

        // (1) move, clamping to the area
        let hw = cfg.area_half_width;
        let step = action.v * cfg.tau;
        let candidate = [ep.uav.x + step * action.theta.cos(), ep.uav.y + step * action.theta.sin()];
        let position = [candidate[0].clamp(-hw, hw), candidate[1].clamp(-hw, hw)];
        let out_of_bounds = position != candidate;
        ep.uav.x = position[0];
        ep.uav.y = position[1];

        // (2) task arrivals
        generate_tasks(&mut ep.terminals, cfg, slot, &mut ep.rng);

        // (3) service and task resolution
        let batteries_before: Vec<f64> = ep.terminals.iter().map(|t| t.battery).collect();
        let mut outcomes = vec![TaskOutcome::NoTask; ep.terminals.len()];
        let mut schedule = SlotSchedule::idle();
        if let Some(target) = select_target(position, &ep.terminals, cfg) {
            let terminal = &ep.terminals[target];
            let geom = LinkGeometry::between(position, terminal.position, cfg.altitude);
            let budget = rates(&geom, cfg)?;
            let plan = build_schedule(terminal, &budget, cfg);
            schedule = plan.schedule;
            outcomes[target] = plan.outcome;
        }
        let served = schedule.served_terminal;
        for (idx, terminal) in ep.terminals.iter().enumerate() {
            if served == Some(idx) || outcomes[idx] != TaskOutcome::NoTask {
                continue;
            }
            if let Some(task) = &terminal.pending_task {
                outcomes[idx] = if local_feasible(task, terminal.battery, cfg) {
                    TaskOutcome::Local
                } else {
                    TaskOutcome::Dropped
                };
            }
        }

        let mut flows = SlotEnergyFlows {
            uav_move: propulsion_energy(action.v, cfg),
            uav_tran: swipt_transmit_energy(&schedule, cfg),
            uav_comp: 0.0,
            terminals: Vec::with_capacity(ep.terminals.len()),
        };
        for (idx, terminal) in ep.terminals.iter().enumerate() {
            let mut tf = TerminalFlows {
                daily_drain: cfg.daily_drain * cfg.tau,
                ..TerminalFlows::default()
            };
            match (outcomes[idx], &terminal.pending_task) {
                (TaskOutcome::Local, Some(task)) => tf.comp = local_compute_energy(task, cfg),
                (TaskOutcome::Offloaded, Some(task)) => {
                    tf.tran = cfg.terminal_tx_power * schedule.tau_up * UJ_PER_J;
                    flows.uav_comp += uav_compute_energy(task, cfg);
                }
                _ => {}
            }
            if served == Some(idx) {
                tf.harvested = schedule.eh_power * schedule.t_eh * UJ_PER_J;
            }
            flows.terminals.push(tf);
        }

        // (4) batteries
        for (terminal, tf) in ep.terminals.iter_mut().zip(&flows.terminals) {
            terminal.battery = battery_update(terminal.battery, tf, cfg);
            terminal.pending_task = None;
        }
        let batteries_after: Vec<f64> = ep.terminals.iter().map(|t| t.battery).collect();

        // (5) reward
        let e_total = flows.total();
        let jain = jain_index(&batteries_after)?;
        let mean_battery = mean(&batteries_after);
        let f_energy = jain * mean_battery;
        let penalty = if out_of_bounds || cfg.oob_penalty_always {
            -cfg.oob_penalty
        } else {
            0.0
        };
        let bias = match cfg.bias_reward_mode {
            BiasRewardMode::Served => served.map_or(0.0, |i| cfg.rho3 * cfg.bias_baseline * ep.terminals[i].weight),
            BiasRewardMode::AllTerminals => {
                cfg.rho3 * cfg.bias_baseline * ep.terminals.iter().map(|t| t.weight).sum::<f64>()
            }
        };
        let charge = match served {
            None => 0.0,
            Some(i) => {
                let harvested = flows.terminals[i].harvested;
                if lowest_energy(&batteries_before) == i {
                    harvested + cfg.charge_bonus
                } else {
                    harvested
                }
            }
        };
        let reward_parts = RewardParts {
            obj_energy: -cfg.rho1 * e_total,
            obj_fair: cfg.rho2 * f_energy,
            penalty,
            bias,
            charge,
        };
        let reward = reward_parts.sum();

        // (6) advance
        ep.uav.slot += 1;
        let done = ep.uav.slot == cfg.slots;
        let dropped_tasks = outcomes.iter().filter(|o| **o == TaskOutcome::Dropped).count();
        let report = SlotReport {
            slot,
            action,
            action_clamped,
            position,
            out_of_bounds,
            schedule,
            outcomes,
            flows,
            e_total,
            jain,
            mean_battery,
            f_energy,
            reward,
            reward_parts,
            batteries_after,
            dropped_tasks,
        };
        ep.reports.push(report.clone());
        Ok(StepOutcome {
            observation: Observation {
                normalized: [position[0] / hw, position[1] / hw],
                raw: position,
            },
            reward,
            done,
            report,
        })
    }

    /// Trace of the current episode so far, with totals folded from its slots.
    pub fn trace(&self) -> Result<EpisodeTrace> {
        let ep = self.episode()?;
        let initial: Vec<f64> = ep.initial.iter().map(|t| t.initial_battery).collect();
        Ok(EpisodeTrace {
            config_digest: self.digest.clone(),
            seed: ep.seed,
            terminals: ep.initial.clone(),
            slots: ep.reports.clone(),
            totals: finalize(&ep.reports, &initial),
        })
    }
}

/// Index of the lowest battery, lowest id on ties.
pub fn lowest_energy(batteries: &[f64]) -> usize {
    let mut best = 0;
    for (i, &b) in batteries.iter().enumerate() {
        if b < batteries[best] {
            best = i;
        }
    }
    best
}
