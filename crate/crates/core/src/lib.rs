//! Deterministic simulator of a UAV-assisted SWIPT-MEC network.
//!
//! A single UAV at fixed altitude flies over ground IoT terminals, charging
//! them through power-splitting SWIPT with a directional antenna and
//! accepting offloaded computation tasks. Each slot the agent chooses a
//! speed and heading; the environment resolves task arrivals, target
//! selection, offloading, energy flows and battery updates, and returns a
//! shaped reward.
//!
//! The crate exposes the physics as pure functions ([`channel`], [`energy`],
//! [`tasking`]), the MDP as [`env::Env`], deterministic baselines in
//! [`policy`], and an experiment runner plus a line-delimited JSON
//! environment server in [`harness`] and [`server`].

pub mod channel;
pub mod config;
pub mod energy;
pub mod env;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod policy;
pub mod scenario;
pub mod server;
pub mod tasking;
pub mod trace;

pub use config::{load_config, BiasRewardMode, PropulsionParams, ScenarioConfig};
pub use env::{Action, Env, EpisodeTrace, Observation, RewardParts, SlotReport, StepOutcome, UavState};
pub use error::{Error, Result};
pub use metrics::{jain_index, EpisodeTotals};
pub use scenario::{Task, Terminal};
