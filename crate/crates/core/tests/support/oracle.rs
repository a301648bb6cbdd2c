//! Brute-force recomputation of the slot arithmetic for small fixed layouts.
//!
//! Written against the model equations with default parameters hard-coded,
//! sharing nothing with the library except the task arrival stream.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const HW: f64 = 20.0;
const SLOT: f64 = 1.0;
const H: f64 = 5.0;
const FC: f64 = 2.4e9;
const C: f64 = 3e8;
const B: f64 = 1e6;
const PSD: f64 = -174.0;
const A1: f64 = 4.88;
const B1: f64 = 0.43;
const ETA_LOS: f64 = 0.1;
const ETA_NLOS: f64 = 21.0;
const BETA: f64 = PI / 4.0;
const ETA: f64 = 0.8;
const P_UAV: f64 = 40.0;
const P_TERM: f64 = 0.1;
const A2: f64 = 150.0;
const B2: f64 = 0.014;
const PMAX: f64 = 0.024;
const K: f64 = 1e-28;
const F_U: f64 = 5e9;
const F_I: f64 = 1e9;
const BITS: f64 = 1e3;
const CPB: f64 = 100.0;
const DOWN_BITS: f64 = 1e3;
const E_MAX: f64 = 5000.0;
const E_MIN: f64 = 800.0;
const DELTA_E: f64 = 50.0;
const DRAIN: f64 = 50.0;
const R_MIN: f64 = 22e6;
const RHO1: f64 = 0.3;
const RHO2: f64 = 1.0;
const RHO3: f64 = 0.5;
const BONUS: f64 = 300.0;
const OOB: f64 = 800.0;
const RB: f64 = 50.0;

pub struct Outcome {
    pub rewards: Vec<f64>,
    pub batteries: Vec<Vec<f64>>,
    pub ret: f64,
}

/// Task arrivals for `slots` slots: one uniform per terminal per slot.
pub fn arrivals(seed: u64, terminals: usize, slots: usize) -> Vec<Vec<bool>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    (0..slots)
        .map(|_| (0..terminals).map(|_| rng.gen::<f64>() < 0.5).collect())
        .collect()
}

fn propulsion(v: f64) -> f64 {
    let (p0, pi, utip, v0, d0, rho, s, a) = (79.86, 88.63, 120.0, 4.03, 0.6, 1.225, 0.05, 0.503);
    let v2 = v * v;
    let v02 = v0 * v0;
    p0 * (1.0 + 3.0 * v2 / (utip * utip))
        + pi * ((1.0 + v2 * v2 / (4.0 * v02 * v02)).sqrt() - v2 / (2.0 * v02)).sqrt()
        + 0.5 * d0 * rho * s * a * v2 * v
}

fn harvest(p: f64) -> f64 {
    let off = 1.0 / (1.0 + (A2 * B2).exp());
    PMAX * (1.0 / (1.0 + (-A2 * (p - B2)).exp()) - off) / (1.0 - off)
}

struct Link {
    r_down: f64,
    r_up: f64,
    eh: f64,
}

fn link(d: f64) -> Link {
    let elev = if d == 0.0 { 90.0 } else { (H / d).atan() * 180.0 / PI };
    let plos = 1.0 / (1.0 + A1 * (-B1 * (elev - A1)).exp());
    let slant = d.hypot(H);
    let pl = 20.0 * (4.0 * PI * FC * slant / C).log10() + plos * ETA_LOS + (1.0 - plos) * ETA_NLOS;
    let h = 10f64.powf(-pl / 10.0);
    let g = 2.28 / (BETA * BETA);
    let noise = 10f64.powf((PSD + 10.0 * B.log10() - 30.0) / 10.0);
    let snr_down = (1.0 - ETA) * h * P_UAV * g / noise;
    let snr_up = P_TERM * h * g / noise;
    Link {
        r_down: B * (1.0 + snr_down).log2(),
        r_up: B * (1.0 + snr_up).log2(),
        eh: harvest(ETA * P_UAV * h * g),
    }
}

/// Largest EH time with `tau_up + t <= SLOT` that does not overfill.
fn eh_time(battery: f64, eh: f64, tau_up: f64) -> f64 {
    let mut t = ((E_MAX - battery) / 1e6 / eh).min(SLOT - tau_up);
    while tau_up + t > SLOT {
        t = t.next_down();
    }
    t
}

/// Run one episode of `actions` over terminals at `pos`, starting at the
/// origin with batteries at E_max / 2.
pub fn episode(pos: &[[f64; 2]], tasks: &[Vec<bool>], actions: &[(f64, f64)]) -> Outcome {
    let n = pos.len();
    let dmax = pos.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max);
    let w: Vec<f64> = pos.iter().map(|p| p[0].hypot(p[1]) / dmax).collect();
    let local_cost = K * F_I.powf(3.0) * (BITS * CPB / F_I) * 1e6;
    let floor = E_MIN + DELTA_E;

    let (mut x, mut y) = (0.0f64, 0.0f64);
    let mut bat = vec![E_MAX / 2.0; n];
    let mut out = Outcome {
        rewards: vec![],
        batteries: vec![],
        ret: 0.0,
    };
    for (t, &(v, th)) in actions.iter().enumerate() {
        let cx = x + v * SLOT * th.cos();
        let cy = y + v * SLOT * th.sin();
        x = cx.clamp(-HW, HW);
        y = cy.clamp(-HW, HW);
        let oob = x != cx || y != cy;

        let d: Vec<f64> = pos.iter().map(|p| (p[0] - x).hypot(p[1] - y)).collect();
        let cone = H * BETA.tan() * (1.0 + 1e-12);
        let pick = |want_task: bool| {
            (0..n)
                .filter(|&i| d[i] <= cone && (!want_task || tasks[t][i]))
                .fold(None, |best: Option<usize>, i| match best {
                    Some(b) if d[b] <= d[i] => Some(b),
                    _ => Some(i),
                })
        };
        let served = pick(true).or_else(|| pick(false));

        let mut comp = vec![0.0; n];
        let mut tran = vec![0.0; n];
        let mut harv = vec![0.0; n];
        let mut handled = vec![false; n];
        let (mut uav_tran, mut uav_comp) = (0.0, 0.0);
        if let Some(s) = served {
            let l = link(d[s]);
            let t_id = DOWN_BITS / l.r_down;
            let mut offloaded = false;
            if tasks[t][s] && l.r_down.min(l.r_up) >= R_MIN {
                let tau_up = BITS / l.r_up;
                let e_up = P_TERM * tau_up * 1e6;
                let t_eh = eh_time(bat[s], l.eh, tau_up);
                let tau_s = (BITS * CPB / F_U).max(t_eh).max(t_id);
                if e_up < bat[s] - floor && tau_up + tau_s <= SLOT {
                    offloaded = true;
                    handled[s] = true;
                    tran[s] = e_up;
                    uav_comp = K * F_U.powf(3.0) * (BITS * CPB / F_U);
                    harv[s] = l.eh * t_eh * 1e6;
                    uav_tran = P_UAV * t_id.max(t_eh);
                }
            }
            if !offloaded {
                let t_eh = eh_time(bat[s], l.eh, 0.0);
                harv[s] = l.eh * t_eh * 1e6;
                uav_tran = P_UAV * t_id.max(t_eh);
            }
        }
        for i in 0..n {
            if tasks[t][i] && !handled[i] && local_cost < bat[i] - floor {
                comp[i] = local_cost;
            }
        }

        let term: f64 = (0..n).map(|i| comp[i] + tran[i]).sum();
        let e_total = propulsion(v) * SLOT + uav_tran + uav_comp + term / 1e6;
        let lowest = (0..n).fold(0, |b, i| if bat[i] < bat[b] { i } else { b });
        for i in 0..n {
            bat[i] = (bat[i] - DRAIN * SLOT - (comp[i] + tran[i]) + harv[i]).clamp(E_MIN, E_MAX);
        }
        let sum: f64 = bat.iter().sum();
        let sq: f64 = bat.iter().map(|b| b * b).sum();
        let jain = sum * sum / (n as f64 * sq);
        let f_energy = jain * (sum / n as f64);
        let penalty = if oob { -OOB } else { 0.0 };
        let (bias, charge) = match served {
            Some(s) => (
                RHO3 * RB * w[s],
                if s == lowest { harv[s] + BONUS } else { harv[s] },
            ),
            None => (0.0, 0.0),
        };
        let r = -RHO1 * e_total + RHO2 * f_energy + penalty + bias + charge;
        out.rewards.push(r);
        out.batteries.push(bat.clone());
        out.ret += r;
    }
    out
}
