//! Experiment runner: drives policies through episodes and writes traces,
//! per-slot CSVs and a summary CSV.

use std::collections::HashSet;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use log::info;

use crate::config::{load_config, ScenarioConfig};
use crate::env::{Action, Env, EpisodeTrace};
use crate::error::{Error, Result};
use crate::policy::{Hover, Policy, PolicyKind, RandomPolicy, Scripted, Seeker};
use crate::trace::{trace_to_json, write_slots_csv};

pub const SUMMARY_COLUMNS: &[&str] = &[
    "seed",
    "return",
    "E_total_J",
    "mean_F_energy_uJ",
    "final_jain",
    "avg_retained_uJ",
    "dropped_tasks",
];

#[derive(Debug, Clone)]
pub struct RunSpec {
    pub config_path: Option<PathBuf>,
    pub policy: PolicyKind,
    pub episodes: usize,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    /// Action file for the external policy: CSV rows of `v,theta`.
    pub actions_path: Option<PathBuf>,
}

impl RunSpec {
    pub fn validate(&self) -> Result<()> {
        if self.episodes == 0 {
            return Err(Error::RunSpec("episode count must be >= 1".into()));
        }
        if self.seeds.len() != self.episodes {
            return Err(Error::RunSpec(format!(
                "{} seeds given for {} episodes",
                self.seeds.len(),
                self.episodes
            )));
        }
        let distinct: HashSet<u64> = self.seeds.iter().copied().collect();
        if distinct.len() != self.seeds.len() {
            return Err(Error::RunSpec("seeds must be distinct".into()));
        }
        if self.policy == PolicyKind::External && self.actions_path.is_none() {
            return Err(Error::RunSpec("the external policy needs an action file".into()));
        }
        Ok(())
    }
}

/// One summary row.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub seed: u64,
    pub episode_return: f64,
    pub e_total_j: f64,
    pub mean_f_energy_uj: f64,
    pub final_jain: f64,
    pub avg_retained_uj: f64,
    pub dropped_tasks: usize,
}

impl From<&EpisodeTrace> for SummaryRow {
    fn from(trace: &EpisodeTrace) -> Self {
        let t = &trace.totals;
        Self {
            seed: trace.seed,
            episode_return: t.episode_return,
            e_total_j: t.e_total_j,
            mean_f_energy_uj: t.mean_f_energy_uj,
            final_jain: t.final_jain,
            avg_retained_uj: t.avg_retained_uj,
            dropped_tasks: t.dropped_tasks,
        }
    }
}

/// Parse `v,theta` rows; blank lines and `#` comments are skipped, as is a
/// leading `v,theta` header.
pub fn read_actions(path: &Path) -> Result<Vec<Action>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut actions = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if line == 0 && record.get(0) == Some("v") {
            continue;
        }
        let parse = |i: usize| -> Result<f64> {
            record
                .get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::RunSpec(format!("bad action row {}: {:?}", line + 1, record)))
        };
        actions.push(Action::new(parse(0)?, parse(1)?));
    }
    Ok(actions)
}

/// Run one full episode of `policy` from `seed`.
pub fn run_episode(cfg: &ScenarioConfig, seed: u64, policy: &mut dyn Policy) -> Result<EpisodeTrace> {
    let mut env = Env::with_seed(cfg.clone(), seed)?;
    while !env.is_done() {
        let decision = policy.decide(&env)?;
        env.step(decision.action)?;
    }
    env.trace()
}

pub fn make_policy(kind: PolicyKind, seed: u64, actions: &[Action]) -> Box<dyn Policy> {
    match kind {
        PolicyKind::Hover => Box::new(Hover),
        PolicyKind::Random => Box::new(RandomPolicy::new(seed)),
        PolicyKind::Seeker => Box::new(Seeker),
        PolicyKind::External => Box::new(Scripted::new(actions.to_vec())),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn write_summary(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut csv = csv::Writer::from_writer(BufWriter::new(file));
    csv.write_record(SUMMARY_COLUMNS)?;
    for r in rows {
        csv.write_record([
            r.seed.to_string(),
            r.episode_return.to_string(),
            r.e_total_j.to_string(),
            r.mean_f_energy_uj.to_string(),
            r.final_jain.to_string(),
            r.avg_retained_uj.to_string(),
            r.dropped_tasks.to_string(),
        ])?;
    }
    csv.flush().map_err(io_err(path))?;
    Ok(())
}

/// Run every episode of a [`RunSpec`] and persist `trace_seed<N>.json`,
/// `slots_seed<N>.csv` and `summary.csv` under the output directory.
pub fn run_experiment(spec: &RunSpec) -> Result<Vec<SummaryRow>> {
    spec.validate()?;
    let cfg = match &spec.config_path {
        Some(path) => load_config(path)?,
        None => ScenarioConfig::default(),
    };
    let actions = match &spec.actions_path {
        Some(path) => read_actions(path)?,
        None => Vec::new(),
    };
    fs::create_dir_all(&spec.out_dir).map_err(io_err(&spec.out_dir))?;

    let mut rows = Vec::with_capacity(spec.seeds.len());
    for &seed in &spec.seeds {
        let mut policy = make_policy(spec.policy, seed, &actions);
        let trace = run_episode(&cfg, seed, policy.as_mut())?;
        let json_path = spec.out_dir.join(format!("trace_seed{seed}.json"));
        fs::write(&json_path, trace_to_json(&trace)?).map_err(io_err(&json_path))?;
        let csv_path = spec.out_dir.join(format!("slots_seed{seed}.csv"));
        let file = File::create(&csv_path).map_err(io_err(&csv_path))?;
        write_slots_csv(&trace, BufWriter::new(file))?;
        info!(
            "seed {seed}: return {:.3}, E_total {:.3} J, final J {:.4}",
            trace.totals.episode_return, trace.totals.e_total_j, trace.totals.final_jain
        );
        rows.push(SummaryRow::from(&trace));
    }
    write_summary(&rows, &spec.out_dir.join("summary.csv"))?;
    Ok(rows)
}
