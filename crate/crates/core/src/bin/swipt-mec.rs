use std::net::TcpListener;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{error, info};

use swipt_mec::harness::{run_experiment, RunSpec};
use swipt_mec::policy::PolicyKind;
use swipt_mec::server::{serve_stdio, serve_tcp};
use swipt_mec::{load_config, ScenarioConfig};

/// UAV-assisted SWIPT-MEC simulator.
///
/// Log verbosity follows the SWIPT_MEC_LOG environment variable
/// (error, warn, info, debug, trace).
#[derive(Parser)]
#[command(name = "swipt-mec", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a baseline policy over seeded episodes and write traces.
    Run(RunArgs),
    /// Serve the environment over line-delimited JSON.
    Serve(ServeArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config (JSON); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// hover | random | seeker | external
    #[arg(long, default_value = "hover")]
    policy: String,
    /// Number of episodes; defaults to the number of seeds.
    #[arg(long)]
    episodes: Option<usize>,
    /// Comma-separated seeds; defaults to config seed, seed+1, ...
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// CSV of `v,theta` rows for the external policy.
    #[arg(long)]
    actions: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Listen on this TCP port (localhost).
    #[arg(long, conflicts_with = "stdio")]
    port: Option<u16>,
    /// Speak the protocol over stdin/stdout.
    #[arg(long)]
    stdio: bool,
}

fn config_or_default(path: Option<&PathBuf>) -> swipt_mec::Result<ScenarioConfig> {
    match path {
        Some(p) => load_config(p),
        None => Ok(ScenarioConfig::default()),
    }
}

fn run(args: RunArgs) -> Result<(), String> {
    let policy: PolicyKind = args.policy.parse().map_err(|e: swipt_mec::Error| e.to_string())?;
    let cfg = config_or_default(args.config.as_ref()).map_err(|e| e.to_string())?;
    let (episodes, seeds) = match (args.episodes, args.seeds) {
        (Some(n), Some(seeds)) => (n, seeds),
        (None, Some(seeds)) => (seeds.len(), seeds),
        (n, None) => {
            let n = n.unwrap_or(1);
            (n, (0..n as u64).map(|k| cfg.seed + k).collect())
        }
    };
    let spec = RunSpec {
        config_path: args.config,
        policy,
        episodes,
        seeds,
        out_dir: args.out,
        actions_path: args.actions,
    };
    let rows = run_experiment(&spec).map_err(|e| e.to_string())?;
    info!("wrote {} episodes to {}", rows.len(), spec.out_dir.display());
    Ok(())
}

fn serve(args: ServeArgs) -> Result<(), String> {
    let cfg = config_or_default(args.config.as_ref()).map_err(|e| e.to_string())?;
    match (args.port, args.stdio) {
        (Some(port), _) => {
            let listener = TcpListener::bind(("127.0.0.1", port)).map_err(|e| format!("bind port {port}: {e}"))?;
            info!("listening on {}", listener.local_addr().map_err(|e| e.to_string())?);
            serve_tcp(cfg, listener).map_err(|e| e.to_string())
        }
        (None, true) => serve_stdio(cfg).map_err(|e| e.to_string()),
        (None, false) => Err("serve needs --port <n> or --stdio".into()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SWIPT_MEC_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Serve(args) => serve(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            error!("{message}");
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
