//! Deterministic baseline policies.

use std::f64::consts::TAU;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::config::ScenarioConfig;
use crate::env::{Action, Env, Observation};
use crate::error::{Error, Result};
use crate::scenario::{stream_rng, Terminal};

/// RNG stream reserved for the random policy.
pub const POLICY_STREAM: u64 = 2;

/// Cruise speed of the seeker, m/s (minimum-power speed of the propulsion model).
pub const SEEKER_SPEED: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyDecision {
    pub action: Action,
    pub annotation: Option<String>,
}

impl From<Action> for PolicyDecision {
    fn from(action: Action) -> Self {
        Self {
            action,
            annotation: None,
        }
    }
}

pub trait Policy {
    fn decide(&mut self, env: &Env) -> Result<PolicyDecision>;
}

pub fn hover_policy(_obs: &Observation) -> Action {
    Action::new(0.0, 0.0)
}

pub fn random_policy<R: Rng + ?Sized>(_obs: &Observation, v_max: f64, rng: &mut R) -> Action {
    Action::new(rng.gen_range(0.0..=v_max), rng.gen_range(0.0..TAU))
}

/// Head for the lowest-battery terminal (lowest id on ties) at the cruise
/// speed, slowing down to land exactly on top of it.
pub fn seeker_policy(obs: &Observation, terminals: &[Terminal], cfg: &ScenarioConfig) -> (Action, Option<usize>) {
    let Some(target) = terminals
        .iter()
        .reduce(|best, t| if t.battery < best.battery { t } else { best })
    else {
        return (Action::new(0.0, 0.0), None);
    };
    let dx = target.position[0] - obs.raw[0];
    let dy = target.position[1] - obs.raw[1];
    let distance = dx.hypot(dy);
    if distance == 0.0 {
        return (Action::new(0.0, 0.0), Some(target.id));
    }
    let v = SEEKER_SPEED.min(cfg.v_max).min(distance / cfg.tau);
    let theta = dy.atan2(dx).rem_euclid(TAU);
    (Action::new(v, theta), Some(target.id))
}

pub struct Hover;

impl Policy for Hover {
    fn decide(&mut self, env: &Env) -> Result<PolicyDecision> {
        Ok(hover_policy(&env.observation()?).into())
    }
}

pub struct RandomPolicy {
    rng: ChaCha8Rng,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: stream_rng(seed, POLICY_STREAM),
        }
    }
}

impl Policy for RandomPolicy {
    fn decide(&mut self, env: &Env) -> Result<PolicyDecision> {
        let obs = env.observation()?;
        Ok(random_policy(&obs, env.config().v_max, &mut self.rng).into())
    }
}

pub struct Seeker;

impl Policy for Seeker {
    fn decide(&mut self, env: &Env) -> Result<PolicyDecision> {
        let (action, target) = seeker_policy(&env.observation()?, env.terminals()?, env.config());
        Ok(PolicyDecision {
            action,
            annotation: target.map(|id| format!("target={id}")),
        })
    }
}

/// Replays a fixed action list, holding position once it runs out.
pub struct Scripted {
    actions: Vec<Action>,
    next: usize,
}

impl Scripted {
    pub fn new(actions: Vec<Action>) -> Self {
        Self { actions, next: 0 }
    }
}

impl Policy for Scripted {
    fn decide(&mut self, _env: &Env) -> Result<PolicyDecision> {
        let action = self.actions.get(self.next).copied().unwrap_or(Action::new(0.0, 0.0));
        self.next += 1;
        Ok(action.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    Hover,
    Random,
    Seeker,
    /// Actions supplied from outside (an action file).
    External,
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hover" => Ok(Self::Hover),
            "random" => Ok(Self::Random),
            "seeker" => Ok(Self::Seeker),
            "external" => Ok(Self::External),
            other => Err(Error::UnknownPolicy(other.to_string())),
        }
    }
}

impl PolicyKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Hover => "hover",
            Self::Random => "random",
            Self::Seeker => "seeker",
            Self::External => "external",
        }
    }
}
