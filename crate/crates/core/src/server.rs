//! Line-delimited JSON environment server.
//!
//! Requests, one JSON object per line:
//!
//! ```text
//! {"cmd":"reset","seed":1}
//! {"cmd":"step","v":10.0,"theta":1.57}
//! {"cmd":"config"}
//! {"cmd":"close"}
//! ```
//!
//! Every request gets exactly one response line, `{"ok":true,...}` or
//! `{"ok":false,"error":"..."}`. Malformed lines are answered with an error
//! and the session continues. Each connection owns its own [`Env`].

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::net::{TcpListener, TcpStream};
use std::thread;

use log::{debug, info, warn};
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::env::{Action, Env, RewardParts, StepOutcome};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "cmd", rename_all = "snake_case", deny_unknown_fields)]
pub enum Request {
    Reset {
        #[serde(default)]
        seed: Option<u64>,
    },
    Step {
        v: f64,
        theta: f64,
    },
    Config,
    Close,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    pub reward_parts: RewardParts,
    pub jain: f64,
    pub batteries: Vec<f64>,
    pub out_of_bounds: bool,
    pub served: Option<usize>,
    pub offload: bool,
    pub e_total: f64,
    pub dropped_tasks: usize,
    pub action_clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResetInfo {
    pub seed: u64,
    pub terminals: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub batteries: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Response {
    Step {
        ok: bool,
        obs: [f64; 2],
        reward: f64,
        done: bool,
        info: StepInfo,
    },
    Reset {
        ok: bool,
        obs: [f64; 2],
        done: bool,
        info: ResetInfo,
    },
    Config {
        ok: bool,
        config: Box<ScenarioConfig>,
    },
    Closed {
        ok: bool,
    },
    Error {
        ok: bool,
        error: String,
    },
}

impl Response {
    pub fn error(message: impl Into<String>) -> Self {
        Response::Error {
            ok: false,
            error: message.into(),
        }
    }

    /// Response line for a completed step; also used to compare in-process runs.
    pub fn from_step(out: &StepOutcome) -> Self {
        let r = &out.report;
        Response::Step {
            ok: true,
            obs: out.observation.normalized,
            reward: out.reward,
            done: out.done,
            info: StepInfo {
                reward_parts: r.reward_parts,
                jain: r.jain,
                batteries: r.batteries_after.clone(),
                out_of_bounds: r.out_of_bounds,
                served: r.schedule.served_terminal,
                offload: r.schedule.offload,
                e_total: r.e_total,
                dropped_tasks: r.dropped_tasks,
                action_clamped: r.action_clamped,
            },
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("responses serialize")
    }
}

/// One client's protocol state.
pub struct Session {
    env: Env,
    started: bool,
}

impl Session {
    pub fn new(cfg: ScenarioConfig) -> Result<Self> {
        Ok(Self {
            env: Env::new(cfg)?,
            started: false,
        })
    }

    /// Handle one request line. The flag is true when the session should end.
    pub fn handle_line(&mut self, line: &str) -> (Response, bool) {
        let request: Request = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => return (Response::error(format!("malformed request: {e}")), false),
        };
        match request {
            Request::Close => (Response::Closed { ok: true }, true),
            Request::Config => (
                Response::Config {
                    ok: true,
                    config: Box::new(self.env.config().clone()),
                },
                false,
            ),
            Request::Reset { seed } => {
                let seed = seed.unwrap_or(self.env.config().seed);
                match self.env.reset(seed) {
                    Ok(obs) => {
                        self.started = true;
                        let terminals = self.env.terminals().expect("episode started");
                        (
                            Response::Reset {
                                ok: true,
                                obs: obs.normalized,
                                done: self.env.is_done(),
                                info: ResetInfo {
                                    seed,
                                    terminals: terminals.iter().map(|t| t.position).collect(),
                                    weights: terminals.iter().map(|t| t.weight).collect(),
                                    batteries: terminals.iter().map(|t| t.battery).collect(),
                                },
                            },
                            false,
                        )
                    }
                    Err(e) => (Response::error(e.to_string()), false),
                }
            }
            Request::Step { v, theta } => {
                if !self.started {
                    return (Response::error("environment not reset"), false);
                }
                match self.env.step(Action::new(v, theta)) {
                    Ok(out) => (Response::from_step(&out), false),
                    Err(e) => (Response::error(e.to_string()), false),
                }
            }
        }
    }
}

/// Serve one session over a pair of byte streams until `close` or EOF.
pub fn serve_stream<R: BufRead, W: Write>(cfg: ScenarioConfig, reader: R, mut writer: W) -> Result<()> {
    let mut session = Session::new(cfg)?;
    for line in reader.lines() {
        let line = match line {
            Ok(l) => l,
            Err(e) => {
                warn!("transport read failed: {e}");
                return Ok(());
            }
        };
        if line.trim().is_empty() {
            continue;
        }
        debug!("request: {line}");
        let (response, close) = session.handle_line(&line);
        if let Err(e) = writeln!(writer, "{}", response.to_line()).and_then(|_| writer.flush()) {
            warn!("transport write failed: {e}");
            return Ok(());
        }
        if close {
            break;
        }
    }
    Ok(())
}

pub fn serve_stdio(cfg: ScenarioConfig) -> Result<()> {
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    serve_stream(cfg, stdin.lock(), stdout.lock())
}

fn handle_connection(cfg: ScenarioConfig, stream: TcpStream) {
    let peer = stream.peer_addr().map(|a| a.to_string()).unwrap_or_else(|_| "?".into());
    info!("connection from {peer}");
    if let Err(e) = stream.set_nodelay(true) {
        debug!("{peer}: set_nodelay: {e}");
    }
    let reader = match stream.try_clone() {
        Ok(s) => BufReader::new(s),
        Err(e) => {
            warn!("{peer}: {e}");
            return;
        }
    };
    if let Err(e) = serve_stream(cfg, reader, BufWriter::new(stream)) {
        warn!("{peer}: {e}");
    }
    info!("connection from {peer} closed");
}

/// Accept connections forever, one thread and one environment per connection.
pub fn serve_tcp(cfg: ScenarioConfig, listener: TcpListener) -> Result<()> {
    cfg.validate()?;
    for stream in listener.incoming() {
        match stream {
            Ok(stream) => {
                let cfg = cfg.clone();
                thread::spawn(move || handle_connection(cfg, stream));
            }
            Err(e) => warn!("accept failed: {e}"),
        }
    }
    Ok(())
}
