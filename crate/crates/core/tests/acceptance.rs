//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs under `cargo test` with a custom harness.

#[path = "support/oracle.rs"]
mod oracle;

use std::f64::consts::{FRAC_PI_4, PI};
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, Stdio};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use swipt_mec::channel::{rates, LinkGeometry};
use swipt_mec::energy::{eh_logistic, propulsion_power};
use swipt_mec::harness::run_episode;
use swipt_mec::policy::{Hover, RandomPolicy, Scripted, Seeker};
use swipt_mec::server::{serve_stream, serve_tcp, Response};
use swipt_mec::tasking::TaskOutcome;
use swipt_mec::trace::trace_to_json;
use swipt_mec::{jain_index, Action, Env, ScenarioConfig};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn eh_model() -> Verdict {
    let f = |p: f64| eh_logistic(p, 150.0, 0.014, 0.024);
    let f0 = f(0.0);
    let f1 = f(1.0);
    let mid = f(0.014);
    ensure(
        f0 == 0.0 && (f1 - 0.024).abs() < 1e-6 && (mid - 0.01053).abs() <= 0.01e-3,
        format!("F(0)={f0:e} F(1W)={f1:.9} W F(14mW)={:.5} mW", mid * 1e3),
    )
}

fn channel_sanity() -> Verdict {
    let cfg = ScenarioConfig::default();
    let edge = rates(&LinkGeometry::new(5.0, cfg.altitude), &cfg).map_err(|e| e.to_string())?;
    let radius = cfg.coverage_radius();
    let mut prev: Option<(f64, f64)> = None;
    let mut monotone = true;
    for k in 0..200 {
        let d = radius * k as f64 / 199.0;
        let b = rates(&LinkGeometry::new(d, cfg.altitude), &cfg).map_err(|e| e.to_string())?;
        if !b.in_cone() {
            monotone = false;
        }
        if let Some((up, down)) = prev {
            monotone &= b.rate_up <= up && b.rate_down <= down;
        }
        prev = Some((b.rate_up, b.rate_down));
    }
    ensure(
        edge.rate_up > cfg.r_min && monotone,
        format!(
            "rate_up(d=5)={:.3} Mbit/s > {:.0} Mbit/s, monotone over 200 in-cone points: {monotone}",
            edge.rate_up / 1e6,
            cfg.r_min / 1e6
        ),
    )
}

fn propulsion_optimum() -> Verdict {
    let cfg = ScenarioConfig::default();
    let p = |v: f64| propulsion_power(v, &cfg.propulsion);
    let best = (0..=3000)
        .map(|k| k as f64 / 100.0)
        .min_by(|a, b| p(*a).total_cmp(&p(*b)))
        .unwrap();
    ensure(
        (8.0..=12.0).contains(&best),
        format!("argmin over [0,30] m/s = {best} m/s, P = {:.3} W", p(best)),
    )
}

fn constraint_suite() -> Verdict {
    let cfg = ScenarioConfig::default();
    let hw = cfg.area_half_width;
    let floor = cfg.e_min + cfg.delta_e;
    let mut slots = 0usize;
    let mut offloads = 0usize;
    let mut oob_events = 0usize;
    let mut violations: Vec<String> = Vec::new();
    let mut seed = 1u64;
    while slots < 10_000 {
        let trace = run_episode(&cfg, seed, &mut RandomPolicy::new(seed)).map_err(|e| e.to_string())?;
        let mut before: Vec<f64> = trace.terminals.iter().map(|t| t.initial_battery).collect();
        let mut pos = [0.0, 0.0];
        for r in &trace.slots {
            slots += 1;
            let mut bad = |what: &str| violations.push(format!("seed {seed} slot {}: {what}", r.slot));
            let s = &r.schedule;

            // slot timing
            if s.served_terminal.is_some() && s.tau_up + s.tau_s > cfg.tau {
                bad("tau_up + tau_s > tau");
            }
            if s.offload != (s.tau_up > 0.0) {
                bad("uplink time without offloading");
            }

            // battery bounds
            if r.batteries_after.iter().any(|&b| !(cfg.e_min..=cfg.e_max).contains(&b)) {
                bad("battery out of bounds");
            }

            // energy floors
            for (i, outcome) in r.outcomes.iter().enumerate() {
                let tf = &r.flows.terminals[i];
                match outcome {
                    TaskOutcome::Local if tf.comp >= before[i] - floor => bad("local energy floor"),
                    TaskOutcome::Offloaded if tf.tran >= before[i] - floor => bad("offload energy floor"),
                    TaskOutcome::Offloaded if s.served_terminal != Some(i) => bad("offload by unserved"),
                    _ => {}
                }
            }

            // rate gating
            if let Some(i) = s.served_terminal {
                let geom = LinkGeometry::between(r.position, trace.terminals[i].position, cfg.altitude);
                let b = rates(&geom, &cfg).map_err(|e| e.to_string())?;
                if !b.in_cone() {
                    bad("served terminal outside the cone");
                }
                if s.offload {
                    offloads += 1;
                    if b.rate_up.min(b.rate_down) < cfg.r_min {
                        bad("offload below R_min");
                    }
                }
            }

            // boundary clamp
            let step = r.action.v * cfg.tau;
            let cand = [pos[0] + step * r.action.theta.cos(), pos[1] + step * r.action.theta.sin()];
            let clamped = [cand[0].clamp(-hw, hw), cand[1].clamp(-hw, hw)];
            if r.position != clamped || r.out_of_bounds != (clamped != cand) {
                bad("boundary clamp");
            }
            if r.out_of_bounds {
                oob_events += 1;
                if r.reward_parts.penalty != -cfg.oob_penalty {
                    bad("missing out-of-bound penalty");
                }
            }

            before = r.batteries_after.clone();
            pos = r.position;
        }
        seed += 1;
    }
    let detail = format!(
        "{slots} random-policy slots ({offloads} offloads, {oob_events} clamps), {} violations{}",
        violations.len(),
        violations.first().map(|v| format!("; first: {v}")).unwrap_or_default()
    );
    ensure(violations.is_empty() && offloads > 0 && oob_events > 0, detail)
}

const MICRO_POSITIONS: [[f64; 2]; 2] = [[10.0, 0.0], [20.0, 0.0]];
const MICRO_SEED: u64 = 1;

fn micro_config() -> ScenarioConfig {
    ScenarioConfig {
        terminal_count: 2,
        slots: 3,
        terminal_positions: Some(MICRO_POSITIONS.to_vec()),
        ..ScenarioConfig::default()
    }
}

fn micro_actions() -> Vec<Action> {
    let mut grid = Vec::with_capacity(32);
    for v in [0.0, 10.0, 20.0, 30.0] {
        for k in 0..8 {
            grid.push(Action::new(v, k as f64 * FRAC_PI_4));
        }
    }
    grid
}

fn micro_oracle() -> Verdict {
    let cfg = micro_config();
    let grid = micro_actions();
    let tasks = oracle::arrivals(MICRO_SEED, 2, 3);
    let mut env = Env::new(cfg.clone()).map_err(|e| e.to_string())?;
    let mut mismatches = 0usize;
    let mut first_mismatch = None;
    let mut best = f64::NEG_INFINITY;
    let mut best_seq = [0usize; 3];
    let mut sequences = 0usize;
    for a in 0..32 {
        for b in 0..32 {
            for c in 0..32 {
                let seq = [grid[a], grid[b], grid[c]];
                env.reset(MICRO_SEED).map_err(|e| e.to_string())?;
                let mut ret = 0.0;
                let mut slot_match = true;
                let expected = oracle::episode(
                    &MICRO_POSITIONS,
                    &tasks,
                    &seq.iter().map(|x| (x.v, x.theta)).collect::<Vec<_>>(),
                );
                for (t, action) in seq.iter().enumerate() {
                    let out = env.step(*action).map_err(|e| e.to_string())?;
                    ret += out.reward;
                    slot_match &= out.reward == expected.rewards[t] && out.report.batteries_after == expected.batteries[t];
                }
                let totals_ret = env.trace().map_err(|e| e.to_string())?.totals.episode_return;
                if !(slot_match && ret == expected.ret && totals_ret == expected.ret) {
                    mismatches += 1;
                    first_mismatch.get_or_insert(format!("[{a},{b},{c}] env {ret} oracle {}", expected.ret));
                }
                if expected.ret > best {
                    best = expected.ret;
                    best_seq = [a, b, c];
                }
                sequences += 1;
            }
        }
    }

    let hover = run_episode(&cfg, MICRO_SEED, &mut Hover).map_err(|e| e.to_string())?;
    let seeker = run_episode(&cfg, MICRO_SEED, &mut Seeker).map_err(|e| e.to_string())?;
    let seeker_on_grid = seeker.slots.iter().all(|s| grid.contains(&s.action));
    let (h, s) = (hover.totals.episode_return, seeker.totals.episode_return);
    ensure(
        mismatches == 0 && sequences == 32_768 && seeker_on_grid && h <= s && s <= best,
        format!(
            "{sequences} sequences, {mismatches} mismatches{}; hover {h:.6} <= seeker {s:.6} <= optimum {best:.6} {best_seq:?}",
            first_mismatch.map(|m| format!(" (first {m})")).unwrap_or_default()
        ),
    )
}

fn scripted_actions(seed: u64, n: usize) -> Vec<Action> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Action::new(rng.gen_range(-5.0..35.0), rng.gen_range(-PI..3.0 * PI)))
        .collect()
}

fn request_lines(seed: u64, actions: &[Action]) -> Vec<String> {
    let mut lines = vec![format!(r#"{{"cmd":"reset","seed":{seed}}}"#)];
    for a in actions {
        lines.push(serde_json::json!({"cmd": "step", "v": a.v, "theta": a.theta}).to_string());
    }
    lines.push(r#"{"cmd":"close"}"#.into());
    lines
}

fn determinism_and_wire() -> Verdict {
    let cfg = ScenarioConfig::default();
    let seed = 42;
    let actions = scripted_actions(7, cfg.slots);

    let trace_a = trace_to_json(&run_episode(&cfg, seed, &mut Scripted::new(actions.clone())).unwrap()).unwrap();
    let trace_b = trace_to_json(&run_episode(&cfg, seed, &mut Scripted::new(actions.clone())).unwrap()).unwrap();

    let mut env = Env::with_seed(cfg.clone(), seed).map_err(|e| e.to_string())?;
    let expected: Vec<String> = actions
        .iter()
        .map(|a| Response::from_step(&env.step(*a).unwrap()).to_line())
        .collect();
    let trace_c = trace_to_json(&env.trace().unwrap()).unwrap();

    let requests = request_lines(seed, &actions);

    // in-memory stream
    let mut buf = Vec::new();
    serve_stream(cfg.clone(), requests.join("\n").as_bytes(), &mut buf).map_err(|e| e.to_string())?;
    let stream_lines: Vec<String> = String::from_utf8(buf).unwrap().lines().map(String::from).collect();

    // TCP
    let listener = TcpListener::bind("127.0.0.1:0").map_err(|e| e.to_string())?;
    let addr = listener.local_addr().unwrap();
    let server_cfg = cfg.clone();
    std::thread::spawn(move || serve_tcp(server_cfg, listener));
    let mut conn = TcpStream::connect(addr).map_err(|e| e.to_string())?;
    conn.set_nodelay(true).unwrap();
    let mut reader = BufReader::new(conn.try_clone().unwrap());
    let mut tcp_lines = Vec::new();
    for req in &requests {
        conn.write_all(format!("{req}\n").as_bytes()).unwrap();
        let mut line = String::new();
        reader.read_line(&mut line).unwrap();
        tcp_lines.push(line.trim_end().to_string());
    }

    // stdio through the binary
    let mut child = Command::new(env!("CARGO_BIN_EXE_swipt-mec"))
        .args(["serve", "--stdio"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .map_err(|e| e.to_string())?;
    child
        .stdin
        .take()
        .unwrap()
        .write_all((requests.join("\n") + "\n").as_bytes())
        .unwrap();
    let out = child.wait_with_output().map_err(|e| e.to_string())?;
    let stdio_lines: Vec<String> = String::from_utf8(out.stdout).unwrap().lines().map(String::from).collect();

    let wire_ok = |lines: &[String]| lines.len() == actions.len() + 2 && lines[1..=actions.len()] == expected[..];
    ensure(
        trace_a == trace_b && trace_a == trace_c && wire_ok(&stream_lines) && wire_ok(&tcp_lines) && wire_ok(&stdio_lines),
        format!(
            "trace {} bytes identical x3: {}; {} step lines equal in-process over stream/tcp/stdio: {}/{}/{}",
            trace_a.len(),
            trace_a == trace_b && trace_a == trace_c,
            expected.len(),
            wire_ok(&stream_lines),
            wire_ok(&tcp_lines),
            wire_ok(&stdio_lines)
        ),
    )
}

fn fairness_metric() -> Verdict {
    let equal = jain_index(&[2500.0; 5]).unwrap();
    let ramp = jain_index(&[1000.0, 2000.0, 3000.0, 4000.0, 5000.0]).unwrap();
    let concentrated = jain_index(&[5000.0, 1e-9, 1e-9, 1e-9, 1e-9]).unwrap();
    let empty = jain_index(&[]).is_err();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut out_of_range = 0;
    for _ in 0..100_000 {
        let n = rng.gen_range(1..=10);
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(800.0..=5000.0)).collect();
        let j = jain_index(&v).unwrap();
        if !(j >= 1.0 / n as f64 && j <= 1.0) {
            out_of_range += 1;
        }
    }
    ensure(
        equal == 1.0 && ramp == 225e6 / (5.0 * 55e6) && (concentrated - 0.2).abs() < 1e-9 && empty && out_of_range == 0,
        format!("equal={equal} ramp={ramp} concentrated={concentrated:.9} empty-error={empty}; 1e5 vectors out of [1/I,1]: {out_of_range}"),
    )
}

fn seeker_vs_hover() -> Verdict {
    let cfg = ScenarioConfig::default();
    let (mut hf, mut sf, mut hj, mut sj) = (0.0, 0.0, 0.0, 0.0);
    let (mut f_wins, mut j_wins) = (0, 0);
    for seed in 1..=10u64 {
        let h = run_episode(&cfg, seed, &mut Hover).map_err(|e| e.to_string())?.totals;
        let s = run_episode(&cfg, seed, &mut Seeker).map_err(|e| e.to_string())?.totals;
        hf += h.mean_f_energy_uj / 10.0;
        sf += s.mean_f_energy_uj / 10.0;
        hj += h.final_jain / 10.0;
        sj += s.final_jain / 10.0;
        f_wins += usize::from(s.mean_f_energy_uj > h.mean_f_energy_uj);
        j_wins += usize::from(s.final_jain > h.final_jain);
    }
    ensure(
        sf > hf && sj > hj,
        format!(
            "10-seed means: F_energy seeker {sf:.2} vs hover {hf:.2} uJ, final Jain seeker {sj:.5} vs hover {hj:.5} \
             (per-seed wins: F {f_wins}/10, Jain {j_wins}/10)"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("EH model", eh_model),
        ("channel sanity", channel_sanity),
        ("propulsion optimum", propulsion_optimum),
        ("constraint suite", constraint_suite),
        ("micro-oracle equivalence", micro_oracle),
        ("determinism & wire equivalence", determinism_and_wire),
        ("fairness metric", fairness_metric),
        ("seeker-vs-hover dominance", seeker_vs_hover),
    ];
    let mut failed = 0;
    let stdout = std::io::stdout();
    for (name, check) in criteria {
        let start = Instant::now();
        let verdict = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match verdict {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        writeln!(stdout.lock(), "{tag} {name} ({secs:.2}s): {detail}").unwrap();
    }
    if failed > 0 {
        writeln!(stdout.lock(), "{failed} acceptance criteria failed").unwrap();
        std::process::exit(1);
    }
}
