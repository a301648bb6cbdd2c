//! Terminal placement and accessibility weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};

/// RNG stream used for terminal placement; task arrivals use [`TASK_STREAM`].
pub const PLACEMENT_STREAM: u64 = 0;
pub const TASK_STREAM: u64 = 1;

/// Seeded ChaCha8 generator on a given stream.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// An atomic computation task, resolved within the slot it was generated in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub size_bits: f64,
    pub gen_slot: usize,
    /// Cycles per bit.
    pub density: f64,
}

impl Task {
    pub fn cycles(&self) -> f64 {
        self.size_bits * self.density
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Terminal {
    pub id: usize,
    /// Ground position (x, y), m.
    pub position: [f64; 2],
    /// Battery level, uJ.
    pub battery: f64,
    /// Accessibility weight in [0, 1].
    pub weight: f64,
    pub pending_task: Option<Task>,
}

impl Terminal {
    pub fn horizontal_distance(&self, point: [f64; 2]) -> f64 {
        (self.position[0] - point[0]).hypot(self.position[1] - point[1])
    }
}

/// Place `I` terminals by Poisson disk dart throwing, or use the configured
/// fixed positions when given. Batteries start at `E_init` and weights are
/// assigned relative to the UAV start at the origin.
pub fn place_terminals(cfg: &ScenarioConfig, seed: u64) -> Result<Vec<Terminal>> {
    let positions = match &cfg.terminal_positions {
        Some(fixed) => fixed.clone(),
        None => poisson_disk(cfg, seed)?,
    };
    let mut terminals: Vec<Terminal> = positions
        .into_iter()
        .enumerate()
        .map(|(id, position)| Terminal {
            id,
            position,
            battery: cfg.initial_battery(),
            weight: 0.0,
            pending_task: None,
        })
        .collect();
    let weights = assign_weights(&terminals, [0.0, 0.0]);
    for (t, w) in terminals.iter_mut().zip(weights) {
        t.weight = w;
    }
    Ok(terminals)
}

fn poisson_disk(cfg: &ScenarioConfig, seed: u64) -> Result<Vec<[f64; 2]>> {
    let hw = cfg.area_half_width;
    let r_min = cfg.placement_radius();
    let mut rng = stream_rng(seed, PLACEMENT_STREAM);
    let mut points: Vec<[f64; 2]> = Vec::with_capacity(cfg.terminal_count);
    let mut attempts = 0;
    while points.len() < cfg.terminal_count {
        if attempts == cfg.placement_attempts {
            return Err(Error::Placement {
                placed: points.len(),
                requested: cfg.terminal_count,
                attempts,
            });
        }
        attempts += 1;
        let candidate = [rng.gen_range(-hw..=hw), rng.gen_range(-hw..=hw)];
        let clear = points
            .iter()
            .all(|p| (p[0] - candidate[0]).hypot(p[1] - candidate[1]) >= r_min);
        if clear {
            points.push(candidate);
        }
    }
    Ok(points)
}

/// `w_i = d_i / max_j d_j` with planar distances from `uav_start`. If every
/// terminal sits on the start point all weights are 0.
pub fn assign_weights(terminals: &[Terminal], uav_start: [f64; 2]) -> Vec<f64> {
    let distances: Vec<f64> = terminals.iter().map(|t| t.horizontal_distance(uav_start)).collect();
    let max = distances.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return vec![0.0; terminals.len()];
    }
    distances.into_iter().map(|d| d / max).collect()
}
