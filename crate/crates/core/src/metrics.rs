//! Fairness and episode-level metrics.

use serde::{Deserialize, Serialize};

use crate::env::SlotReport;
use crate::error::{Error, Result};

/// Jain's fairness index `(sum E)^2 / (I * sum E^2)`.
pub fn jain_index(batteries: &[f64]) -> Result<f64> {
    if batteries.is_empty() {
        return Err(Error::EmptyBatteries);
    }
    let sum: f64 = batteries.iter().sum();
    let sum_sq: f64 = batteries.iter().map(|e| e * e).sum();
    if sum_sq == 0.0 {
        return Ok(1.0);
    }
    Ok(sum * sum / (batteries.len() as f64 * sum_sq))
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Episode totals folded from the slot reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTotals {
    pub slots: usize,
    /// Total system energy, J.
    pub e_total_j: f64,
    pub e_uav_move_j: f64,
    pub e_uav_tran_j: f64,
    pub e_uav_comp_j: f64,
    pub e_terminal_j: f64,
    /// Total harvested energy over all terminals, uJ.
    pub harvested_uj: f64,
    /// Mean of the per-slot fairness-weighted battery, uJ.
    pub mean_f_energy_uj: f64,
    pub final_jain: f64,
    pub final_batteries: Vec<f64>,
    /// Average retained battery at episode end, uJ.
    pub avg_retained_uj: f64,
    /// Undiscounted return.
    #[serde(rename = "return")]
    pub episode_return: f64,
    pub dropped_tasks: usize,
    pub offloaded_tasks: usize,
    pub oob_events: usize,
    pub charge_reward_sum: f64,
}

/// Fold slot reports into totals. `initial_batteries` supplies the final
/// battery statistics of an episode with no slots.
pub fn finalize(reports: &[SlotReport], initial_batteries: &[f64]) -> EpisodeTotals {
    let mut totals = EpisodeTotals {
        slots: reports.len(),
        e_total_j: 0.0,
        e_uav_move_j: 0.0,
        e_uav_tran_j: 0.0,
        e_uav_comp_j: 0.0,
        e_terminal_j: 0.0,
        harvested_uj: 0.0,
        mean_f_energy_uj: 0.0,
        final_jain: 0.0,
        final_batteries: Vec::new(),
        avg_retained_uj: 0.0,
        episode_return: 0.0,
        dropped_tasks: 0,
        offloaded_tasks: 0,
        oob_events: 0,
        charge_reward_sum: 0.0,
    };
    let mut f_sum = 0.0;
    for r in reports {
        totals.e_total_j += r.e_total;
        totals.e_uav_move_j += r.flows.uav_move;
        totals.e_uav_tran_j += r.flows.uav_tran;
        totals.e_uav_comp_j += r.flows.uav_comp;
        totals.e_terminal_j += r.flows.terminal_total();
        totals.harvested_uj += r.flows.terminals.iter().map(|t| t.harvested).sum::<f64>();
        f_sum += r.f_energy;
        totals.episode_return += r.reward;
        totals.dropped_tasks += r.dropped_tasks;
        totals.offloaded_tasks += usize::from(r.schedule.offload);
        totals.oob_events += usize::from(r.out_of_bounds);
        totals.charge_reward_sum += r.reward_parts.charge;
    }
    if !reports.is_empty() {
        totals.mean_f_energy_uj = f_sum / reports.len() as f64;
    }
    let final_batteries = reports
        .last()
        .map(|r| r.batteries_after.clone())
        .unwrap_or_else(|| initial_batteries.to_vec());
    totals.final_jain = jain_index(&final_batteries).unwrap_or(0.0);
    totals.avg_retained_uj = mean(&final_batteries);
    totals.final_batteries = final_batteries;
    totals
}
