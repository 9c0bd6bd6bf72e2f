//! Three-node decode-and-forward relay solvers over time-invariant channels,
//! with full non-causal knowledge at both nodes.
//!
//! The relay receives from the source and transmits to the destination on
//! orthogonal bands, so it does both in the same block. Each node spends
//! from its own harvested energy; with one-way energy sharing enabled the
//! source may additionally transfer energy to the relay at a multiplicative
//! receiver-side efficiency.
//!
//! Delay-constrained traffic forces the per-block end-to-end rate
//! `min(log2(1 + g_sr P_S), log2(1 + g_rd P_R))`; a rate `r` then costs
//! `(2^r - 1)/g` on each hop, so the problem collapses to single-user
//! staircase water-filling on the pointwise minimum of the two
//! energy-translated cap profiles. Delay-tolerant traffic decouples: the
//! source maximizes its own link bits, then the relay forwards as much as
//! its energy and the accumulated data allow.

use crate::error::{Error, Result};
use crate::model::{ChannelTrace, EhProfile, PowerSchedule};
use crate::offline::{self, staircase_on_caps};

/// Traffic model at the destination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Traffic {
    /// Source messages must be decoded in the block they are sent.
    DelayConstrained,
    /// The relay may buffer decoded messages until the horizon end.
    DelayTolerant,
}

/// Energy cooperation between the nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnergySharing {
    Disabled,
    /// Source-to-relay transfers; the relay credits `efficiency * x` for
    /// every `x` the source debits.
    SourceToRelay {
        efficiency: f64,
    },
}

/// A two-hop relay instance: both nodes share the block grid.
#[derive(Debug, Clone)]
pub struct RelayScenario {
    pub source_profile: EhProfile,
    pub relay_profile: EhProfile,
    pub gain_sr: f64,
    pub gain_rd: f64,
    pub traffic: Traffic,
    pub sharing: EnergySharing,
}

impl RelayScenario {
    pub fn new(
        source_profile: EhProfile,
        relay_profile: EhProfile,
        gain_sr: f64,
        gain_rd: f64,
        traffic: Traffic,
        sharing: EnergySharing,
    ) -> Result<Self> {
        if source_profile.horizon() != relay_profile.horizon() {
            return Err(Error::ShapeMismatch(
                "source and relay profiles differ in shape".into(),
            ));
        }
        if gain_sr < 0.0 || gain_rd < 0.0 || !gain_sr.is_finite() || !gain_rd.is_finite() {
            return Err(Error::Config("hop gains must be finite and >= 0".into()));
        }
        if let EnergySharing::SourceToRelay { efficiency } = sharing {
            if !(efficiency > 0.0 && efficiency <= 1.0) {
                return Err(Error::Config(format!(
                    "transfer efficiency {efficiency} outside (0, 1]"
                )));
            }
        }
        Ok(RelayScenario {
            source_profile,
            relay_profile,
            gain_sr,
            gain_rd,
            traffic,
            sharing,
        })
    }
}

/// Joint allocation produced by the relay solvers.
#[derive(Debug, Clone)]
pub struct RelaySolution {
    pub source_schedule: PowerSchedule,
    pub relay_schedule: PowerSchedule,
    /// Per-block energy sent source -> relay (all zero without sharing).
    pub transfers: Vec<f64>,
    /// End-to-end bits delivered over the horizon.
    pub throughput: f64,
    /// Stationarity measure of the solver that produced this solution.
    pub kkt_residual: f64,
}

impl RelaySolution {
    fn zero(sc: &RelayScenario) -> Self {
        let h = sc.source_profile.horizon();
        RelaySolution {
            source_schedule: PowerSchedule::zero(h),
            relay_schedule: PowerSchedule::zero(h),
            transfers: vec![0.0; h.total_blocks()],
            throughput: 0.0,
            kkt_residual: 0.0,
        }
    }
}

/// Delay-constrained joint allocation without sharing: maximizes
/// `sum_t min(log2(1 + g_sr P_S), log2(1 + g_rd P_R))` under both nodes'
/// cumulative constraints.
pub fn solve_relay_delay_constrained(sc: &RelayScenario) -> Result<RelaySolution> {
    if sc.sharing != EnergySharing::Disabled {
        return Err(Error::Config(
            "delay-constrained solver expects sharing disabled".into(),
        ));
    }
    delay_constrained_on_caps(
        sc,
        &sc.source_profile.cumulative_harvest(),
        &sc.relay_profile.cumulative_harvest(),
        &vec![0.0; sc.source_profile.horizon().total_blocks()],
    )
}

/// Core of the delay-constrained solve, parameterized by cumulative caps so
/// the sharing solver can reuse it with transfer-adjusted budgets.
/// `transfers` is recorded in the solution but already folded into the caps.
fn delay_constrained_on_caps(
    sc: &RelayScenario,
    caps_source: &[f64],
    caps_relay: &[f64],
    transfers: &[f64],
) -> Result<RelaySolution> {
    let horizon = sc.source_profile.horizon();
    if sc.gain_sr <= 0.0 || sc.gain_rd <= 0.0 {
        return Ok(RelaySolution::zero(sc));
    }
    let caps: Vec<f64> = caps_source
        .iter()
        .zip(caps_relay)
        .map(|(&s, &r)| (sc.gain_sr * s).min(sc.gain_rd * r).max(0.0))
        .collect();
    let gains = vec![1.0; caps.len()];
    let alloc = staircase_on_caps(&caps, &gains);
    let throughput: f64 = alloc.powers.iter().map(|&z| (1.0 + z).log2()).sum();
    let residual = offline::staircase_residual_on_caps(&alloc, &caps);
    let source = PowerSchedule::from_flat(
        horizon,
        alloc.powers.iter().map(|&z| z / sc.gain_sr).collect(),
    )?;
    let relay = PowerSchedule::from_flat(
        horizon,
        alloc.powers.iter().map(|&z| z / sc.gain_rd).collect(),
    )?;
    Ok(RelaySolution {
        source_schedule: source,
        relay_schedule: relay,
        transfers: transfers.to_vec(),
        throughput,
        kkt_residual: residual,
    })
}

/// Delay-tolerant decoupled allocation: the source first maximizes the bits
/// it puts into the relay (plain staircase water-filling on its own link);
/// the relay then maximizes forwarded bits under its energy constraints and
/// data causality (cumulative forwarded <= cumulative received). Both
/// schedules come out as non-decreasing staircases.
pub fn solve_relay_delay_tolerant(sc: &RelayScenario) -> Result<RelaySolution> {
    if sc.sharing != EnergySharing::Disabled {
        return Err(Error::Config(
            "delay-tolerant solver expects sharing disabled".into(),
        ));
    }
    let horizon = sc.source_profile.horizon();
    if sc.gain_sr <= 0.0 || sc.gain_rd <= 0.0 {
        return Ok(RelaySolution::zero(sc));
    }
    let trace = ChannelTrace::constant(horizon, sc.gain_sr)?;
    let stage1 = offline::solve_throughput_case1(&sc.source_profile, &trace)?;
    let mut bits_in = Vec::with_capacity(horizon.total_blocks());
    let mut acc = 0.0;
    for &p in stage1.schedule.powers_flat() {
        acc += (1.0 + sc.gain_sr * p).log2();
        bits_in.push(acc);
    }

    let (relay_powers, forwarded) =
        forwarding_greedy(&sc.relay_profile.cumulative_harvest(), sc.gain_rd, &bits_in);
    let throughput = forwarded.min(bits_in[bits_in.len() - 1]);
    Ok(RelaySolution {
        source_schedule: stage1.schedule,
        relay_schedule: PowerSchedule::from_flat(horizon, relay_powers)?,
        transfers: vec![0.0; horizon.total_blocks()],
        throughput,
        kkt_residual: stage1.kkt_residual,
    })
}

/// Epoch greedy for the forwarding stage: per-block rates are equalized
/// within epochs and capped by whichever binds first — the energy average
/// `log2(1 + g (A_R(t) - spent)/len)` or the data average
/// `(bits_in(t) - sent)/len`. The minimum-cap epoch choice (ties to the
/// longest) gives non-decreasing rates changing only at tight constraints.
fn forwarding_greedy(caps_energy: &[f64], gain: f64, bits_in: &[f64]) -> (Vec<f64>, f64) {
    let t_total = caps_energy.len();
    let mut powers = vec![0.0; t_total];
    let mut s = 0usize;
    let mut energy_used = 0.0;
    let mut bits_sent = 0.0;
    while s < t_total {
        let mut best_t = s;
        let mut best_rate = f64::INFINITY;
        for t in s..t_total {
            let len = (t - s + 1) as f64;
            let r_energy = (1.0 + gain * (caps_energy[t] - energy_used).max(0.0) / len).log2();
            let r_data = (bits_in[t] - bits_sent).max(0.0) / len;
            let cand = r_energy.min(r_data);
            if cand <= best_rate {
                best_rate = cand;
                best_t = t;
            }
        }
        let len = (best_t - s + 1) as f64;
        let p = (best_rate.exp2() - 1.0) / gain;
        for slot in powers.iter_mut().take(best_t + 1).skip(s) {
            *slot = p;
        }
        energy_used += len * p;
        bits_sent += len * best_rate;
        s = best_t + 1;
    }
    (powers, bits_sent)
}

/// Options for the energy-sharing solver.
#[derive(Debug, Clone)]
pub struct SharingOptions {
    /// Pin every transfer to zero; the solve then coincides with the
    /// delay-constrained problem (identical constraint set).
    pub force_zero_transfers: bool,
    /// Warm-start transfer vector (e.g. the solution at a smaller
    /// efficiency).
    pub initial_transfers: Option<Vec<f64>>,
    pub max_iters: usize,
    /// Target on the projected-gradient mapping norm.
    pub stationarity_tol: f64,
}

impl Default for SharingOptions {
    fn default() -> Self {
        SharingOptions {
            force_zero_transfers: false,
            initial_transfers: None,
            max_iters: 8_000,
            stationarity_tol: 1e-7,
        }
    }
}

/// One-way energy sharing, delay-constrained objective: jointly optimizes
/// both power schedules and per-block transfers `x >= 0` under
/// `cum(P_S + x) <= A_S` and `cum(P_R) <= A_R + alpha * cum(x)`.
///
/// Solved as a concave program by projected-gradient ascent in per-block
/// rate-cost/transfer space, with Dykstra half-space projections onto the
/// cumulative polytope. Iterates are polished by re-solving the rates
/// exactly for the iterate's transfer profile, so the returned solution is
/// exactly feasible and never below the no-sharing optimum.
pub fn solve_relay_energy_sharing(sc: &RelayScenario) -> Result<RelaySolution> {
    solve_relay_energy_sharing_opts(sc, &SharingOptions::default())
}

pub fn solve_relay_energy_sharing_opts(
    sc: &RelayScenario,
    opts: &SharingOptions,
) -> Result<RelaySolution> {
    let EnergySharing::SourceToRelay { efficiency: alpha } = sc.sharing else {
        return Err(Error::Config(
            "energy-sharing solver needs SourceToRelay sharing".into(),
        ));
    };
    let horizon = sc.source_profile.horizon();
    let t_total = horizon.total_blocks();
    let a_s = sc.source_profile.cumulative_harvest();
    let a_r = sc.relay_profile.cumulative_harvest();

    if sc.gain_sr <= 0.0 || sc.gain_rd <= 0.0 {
        return Ok(RelaySolution::zero(sc));
    }
    if opts.force_zero_transfers {
        return delay_constrained_on_caps(sc, &a_s, &a_r, &vec![0.0; t_total]);
    }

    // half-spaces over v = (z_1..z_T, x_1..x_T), z = 2^r - 1 per block:
    //   sum_{tau<=t} (z/g_sr + x) <= A_S(t)
    //   sum_{tau<=t} (z/g_rd - alpha x) <= A_R(t)
    let mut halfspaces = Vec::with_capacity(2 * t_total);
    for t in 0..t_total {
        let mut a = vec![0.0; 2 * t_total];
        for tau in 0..=t {
            a[tau] = 1.0 / sc.gain_sr;
            a[t_total + tau] = 1.0;
        }
        halfspaces.push(HalfSpace::new(a, a_s[t]));
        let mut a = vec![0.0; 2 * t_total];
        for tau in 0..=t {
            a[tau] = 1.0 / sc.gain_rd;
            a[t_total + tau] = -alpha;
        }
        halfspaces.push(HalfSpace::new(a, a_r[t]));
    }

    let polish = |x: &[f64]| -> (Vec<f64>, Vec<f64>, f64) {
        // clamp cumulative transfers into the source budget, rebuild caps,
        // and re-solve the rates exactly
        let mut cum = 0.0;
        let mut x_cum = Vec::with_capacity(t_total);
        for (t, &xi) in x.iter().enumerate() {
            cum += xi.max(0.0);
            x_cum.push(cum.min(a_s[t]));
        }
        let caps_s: Vec<f64> = a_s.iter().zip(&x_cum).map(|(&s, &xc)| s - xc).collect();
        let caps_r: Vec<f64> = a_r
            .iter()
            .zip(&x_cum)
            .map(|(&r, &xc)| r + alpha * xc)
            .collect();
        let caps: Vec<f64> = caps_s
            .iter()
            .zip(&caps_r)
            .map(|(&s, &r)| (sc.gain_sr * s).min(sc.gain_rd * r).max(0.0))
            .collect();
        let alloc = staircase_on_caps(&caps, &vec![1.0; t_total]);
        let value: f64 = alloc.powers.iter().map(|&z| (1.0 + z).log2()).sum();
        let mut xs = Vec::with_capacity(t_total);
        let mut prev = 0.0;
        for &xc in &x_cum {
            xs.push(xc - prev);
            prev = xc;
        }
        (xs, alloc.powers, value)
    };

    // candidates: no transfers, then every polished iterate
    let (mut best_x, mut best_z, mut best_value) = polish(&vec![0.0; t_total]);

    let mut v = vec![0.0; 2 * t_total];
    if let Some(x0) = &opts.initial_transfers {
        if x0.len() != t_total {
            return Err(Error::ShapeMismatch("warm-start transfer length".into()));
        }
        let (xs, zs, value) = polish(x0);
        if value > best_value {
            best_x = xs.clone();
            best_z = zs.clone();
            best_value = value;
        }
        v[..t_total].copy_from_slice(&best_z);
        v[t_total..].copy_from_slice(&xs);
    }
    v = dykstra_project(&v, &halfspaces);

    let objective = |v: &[f64]| -> f64 { v[..t_total].iter().map(|&z| (1.0 + z).log2()).sum() };
    let mut residual = f64::INFINITY;
    let mut step = 1.0;
    for iter in 0..opts.max_iters {
        let mut grad = vec![0.0; 2 * t_total];
        for t in 0..t_total {
            grad[t] = 1.0 / ((1.0 + v[t]) * std::f64::consts::LN_2);
        }
        // backtracking on the projected path
        let f0 = objective(&v);
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = v
                .iter()
                .zip(&grad)
                .map(|(&vi, &gi)| vi + step * gi)
                .collect();
            let projected = dykstra_project(&trial, &halfspaces);
            let f1 = objective(&projected);
            let inner: f64 = projected
                .iter()
                .zip(&v)
                .zip(&grad)
                .map(|((&p, &vi), &g)| (p - vi) * g)
                .sum();
            if f1 >= f0 + 1e-4 * inner || inner <= 1e-15 {
                v = projected;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        step = (step * 2.0).min(4.0);

        if iter % 16 == 0 || iter + 1 == opts.max_iters {
            let (xs, zs, value) = polish(&v[t_total..]);
            if value > best_value {
                best_value = value;
                best_x = xs;
                best_z = zs;
            }
            residual = gradient_mapping_norm(&v, &grad, &halfspaces);
            if residual <= opts.stationarity_tol {
                break;
            }
        }
    }
    // final polish and stationarity at the returned point
    let (xs, zs, value) = polish(&v[t_total..]);
    if value > best_value {
        best_value = value;
        best_x = xs;
        best_z = zs;
    }
    let mut v_best = vec![0.0; 2 * t_total];
    v_best[..t_total].copy_from_slice(&best_z);
    v_best[t_total..].copy_from_slice(&best_x);
    let mut grad = vec![0.0; 2 * t_total];
    for t in 0..t_total {
        grad[t] = 1.0 / ((1.0 + v_best[t]) * std::f64::consts::LN_2);
    }
    residual = residual.min(gradient_mapping_norm(&v_best, &grad, &halfspaces));

    let source_powers: Vec<f64> = best_z.iter().map(|&z| z / sc.gain_sr).collect();
    let relay_powers: Vec<f64> = best_z.iter().map(|&z| z / sc.gain_rd).collect();
    Ok(RelaySolution {
        source_schedule: PowerSchedule::from_flat(horizon, source_powers)?,
        relay_schedule: PowerSchedule::from_flat(horizon, relay_powers)?,
        transfers: best_x,
        throughput: best_value,
        kkt_residual: residual,
    })
}

/// `||v - Pi(v + s grad)||_inf / s` with a small probe step; zero exactly at
/// a KKT point of the projected problem.
fn gradient_mapping_norm(v: &[f64], grad: &[f64], halfspaces: &[HalfSpace]) -> f64 {
    let s = 1e-3;
    let trial: Vec<f64> = v.iter().zip(grad).map(|(&vi, &gi)| vi + s * gi).collect();
    let projected = dykstra_project(&trial, halfspaces);
    projected
        .iter()
        .zip(v)
        .map(|(&p, &vi)| (p - vi).abs())
        .fold(0.0, f64::max)
        / s
}

struct HalfSpace {
    a: Vec<f64>,
    b: f64,
    norm2: f64,
}

impl HalfSpace {
    fn new(a: Vec<f64>, b: f64) -> Self {
        let norm2 = a.iter().map(|x| x * x).sum();
        HalfSpace { a, b, norm2 }
    }

    fn project(&self, v: &mut [f64]) {
        let dot: f64 = self.a.iter().zip(v.iter()).map(|(a, x)| a * x).sum();
        if dot > self.b {
            let scale = (dot - self.b) / self.norm2;
            for (x, a) in v.iter_mut().zip(&self.a) {
                *x -= scale * a;
            }
        }
    }
}

/// Dykstra's alternating projections onto the intersection of the
/// half-spaces and the non-negative orthant; converges to the exact
/// Euclidean projection for polyhedra.
fn dykstra_project(v0: &[f64], halfspaces: &[HalfSpace]) -> Vec<f64> {
    let n = v0.len();
    let sets = halfspaces.len() + 1;
    let mut v = v0.to_vec();
    let mut corrections = vec![vec![0.0; n]; sets];
    for _ in 0..600 {
        let mut movement = 0.0f64;
        for (i, corr) in corrections.iter_mut().enumerate() {
            let mut y: Vec<f64> = v.iter().zip(corr.iter()).map(|(a, c)| a + c).collect();
            if i < halfspaces.len() {
                halfspaces[i].project(&mut y);
            } else {
                for x in y.iter_mut() {
                    if *x < 0.0 {
                        *x = 0.0;
                    }
                }
            }
            for k in 0..n {
                let new_corr = v[k] + corr[k] - y[k];
                movement = movement.max((y[k] - v[k]).abs());
                corr[k] = new_corr;
                v[k] = y[k];
            }
        }
        if movement < 1e-14 {
            break;
        }
    }
    v
}
