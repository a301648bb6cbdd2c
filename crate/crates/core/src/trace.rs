//! Episode trace persistence.
//!
//! Traces serialize to JSON with struct field order and shortest round-trip
//! float representation. The per-slot CSV has one row per slot with the
//! columns of [`SLOT_COLUMNS`] followed by `battery_0 .. battery_{I-1}`.

use std::io::Write;

use crate::env::EpisodeTrace;
use crate::error::Result;
use crate::tasking::TaskOutcome;

pub const SLOT_COLUMNS: &[&str] = &[
    "slot",
    "x",
    "y",
    "v",
    "theta",
    "action_clamped",
    "out_of_bounds",
    "served",
    "offload",
    "tau_up",
    "tau_s",
    "t_eh",
    "t_id",
    "e_uav_move_J",
    "e_uav_tran_J",
    "e_uav_comp_J",
    "e_terminal_J",
    "e_total_J",
    "harvested_uJ",
    "local_tasks",
    "dropped_tasks",
    "jain",
    "mean_battery_uJ",
    "f_energy_uJ",
    "obj_energy",
    "obj_fair",
    "penalty",
    "bias",
    "charge",
    "reward",
];

pub fn trace_to_json(trace: &EpisodeTrace) -> Result<String> {
    Ok(serde_json::to_string_pretty(trace)?)
}

pub fn write_slots_csv<W: Write>(trace: &EpisodeTrace, writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    let battery_count = trace.terminals.len();
    let mut header: Vec<String> = SLOT_COLUMNS.iter().map(|c| c.to_string()).collect();
    header.extend((0..battery_count).map(|i| format!("battery_{i}")));
    csv.write_record(&header)?;
    for r in &trace.slots {
        let s = &r.schedule;
        let p = &r.reward_parts;
        let harvested: f64 = r.flows.terminals.iter().map(|t| t.harvested).sum();
        let local = r.outcomes.iter().filter(|o| **o == TaskOutcome::Local).count();
        let mut row = vec![
            r.slot.to_string(),
            r.position[0].to_string(),
            r.position[1].to_string(),
            r.action.v.to_string(),
            r.action.theta.to_string(),
            r.action_clamped.to_string(),
            r.out_of_bounds.to_string(),
            s.served_terminal.map_or_else(String::new, |i| i.to_string()),
            s.offload.to_string(),
            s.tau_up.to_string(),
            s.tau_s.to_string(),
            s.t_eh.to_string(),
            s.t_id.to_string(),
            r.flows.uav_move.to_string(),
            r.flows.uav_tran.to_string(),
            r.flows.uav_comp.to_string(),
            r.flows.terminal_total().to_string(),
            r.e_total.to_string(),
            harvested.to_string(),
            local.to_string(),
            r.dropped_tasks.to_string(),
            r.jain.to_string(),
            r.mean_battery.to_string(),
            r.f_energy.to_string(),
            p.obj_energy.to_string(),
            p.obj_fair.to_string(),
            p.penalty.to_string(),
            p.bias.to_string(),
            p.charge.to_string(),
            r.reward.to_string(),
        ];
        row.extend(r.batteries_after.iter().map(|b| b.to_string()));
        csv.write_record(&row)?;
    }
    csv.flush().map_err(csv::Error::from)?;
    Ok(())
}
