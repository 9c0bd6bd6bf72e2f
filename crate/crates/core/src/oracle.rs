//! Independent brute-force reference solvers, used only for verification.
//!
//! Nothing here calls the solver modules; the only shared code is the domain
//! vocabulary in [`crate::model`] and [`crate::fading`]. Every sweep counts
//! its work against an evaluation guard and refuses loudly rather than
//! truncating. Tie-breaking is lexicographic everywhere so results are
//! reproducible.

use crate::error::{Error, Result};
use crate::fading;
use crate::model::{ChannelTrace, EhProfile, OutageChannel, PowerSchedule, UtilitySpec};
use std::collections::BTreeMap;

/// Power/rate discretization for grid sweeps.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    /// Grid step in power units.
    pub step: f64,
    /// Hard cap on elementary evaluations before the sweep refuses.
    pub max_evals: u64,
}

impl GridSpec {
    pub fn new(step: f64) -> Self {
        GridSpec {
            step,
            max_evals: 100_000_000,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.step <= 0.0 || !self.step.is_finite() {
            return Err(Error::Config(format!(
                "grid step must be positive, got {}",
                self.step
            )));
        }
        Ok(())
    }
}

/// Result of an offline grid sweep.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub schedule: PowerSchedule,
    pub utility: f64,
}

/// Exhaustive search over grid-valued feasible schedules, maximizing the
/// separable utility under the cumulative energy constraints.
///
/// Organized as an exact lattice dynamic program over (block, cumulative
/// spend on the grid): the per-block utilities are separable and the
/// constraints cumulative, so the lattice DP visits exactly the set of
/// feasible grid schedules and returns the same optimum as naive nested
/// enumeration (cross-checked in tests), in `O(T * S^2)` instead of `S^T`.
/// Ties resolve to the lexicographically earliest schedule.
pub fn brute_force_offline(
    profile: &EhProfile,
    trace: Option<&ChannelTrace>,
    spec: &UtilitySpec,
    grid: &GridSpec,
) -> Result<OracleResult> {
    grid.validate()?;
    spec.validate()?;
    let caps = grid_caps(profile, grid.step);
    let t_total = caps.len();
    let s_max = *caps.last().unwrap();

    let ops: u64 = caps
        .iter()
        .map(|&c| ((c as u64) + 1) * ((c as u64) + 2) / 2)
        .sum();
    if ops > grid.max_evals {
        return Err(Error::SizeGuard(format!(
            "offline sweep needs ~{ops} evaluations, guard is {}",
            grid.max_evals
        )));
    }

    let utilities = per_block_utils(profile, trace, spec, grid.step, s_max)?;

    // value[s] = best utility-to-go from block t with cumulative spend s
    let mut value = vec![0.0f64; s_max + 1];
    let mut choice = vec![0u32; t_total * (s_max + 1)];
    for t in (0..t_total).rev() {
        let cap_t = caps[t];
        let state_cap = if t == 0 { 0 } else { caps[t - 1] };
        let mut next = vec![f64::NEG_INFINITY; s_max + 1];
        for s in 0..=state_cap {
            let mut best = f64::NEG_INFINITY;
            let mut best_p = 0u32;
            for p in 0..=(cap_t - s) {
                let v = utilities[t][p] + value[s + p];
                if v > best {
                    best = v;
                    best_p = p as u32;
                }
            }
            next[s] = best;
            choice[t * (s_max + 1) + s] = best_p;
        }
        value = next;
    }

    // forward walk, smallest maximizer first by construction
    let mut powers = Vec::with_capacity(t_total);
    let mut s = 0usize;
    for t in 0..t_total {
        let p = choice[t * (s_max + 1) + s] as usize;
        powers.push(p as f64 * grid.step);
        s += p;
    }
    let schedule = PowerSchedule::from_flat(profile.horizon(), powers)?;
    let utility = value[0];
    Ok(OracleResult { schedule, utility })
}

/// Cumulative harvest converted to grid indices (floored, so the searched set
/// is always feasible in the continuum).
fn grid_caps(profile: &EhProfile, step: f64) -> Vec<usize> {
    profile
        .cumulative_harvest()
        .iter()
        .map(|&a| ((a / step) + 1e-9).floor() as usize)
        .collect()
}

fn per_block_utils(
    profile: &EhProfile,
    trace: Option<&ChannelTrace>,
    spec: &UtilitySpec,
    step: f64,
    s_max: usize,
) -> Result<Vec<Vec<f64>>> {
    let t_total = profile.horizon().total_blocks();
    match spec {
        UtilitySpec::Throughput => {
            let trace = trace
                .ok_or_else(|| Error::Config("throughput oracle needs a channel trace".into()))?;
            if trace.horizon() != profile.horizon() {
                return Err(Error::ShapeMismatch(
                    "trace grid differs from profile grid".into(),
                ));
            }
            Ok((0..t_total)
                .map(|t| {
                    let h = trace.gain_at(t);
                    (0..=s_max)
                        .map(|p| (1.0 + h * p as f64 * step).log2())
                        .collect()
                })
                .collect())
        }
        UtilitySpec::NonOutage {
            required_rate,
            channel: OutageChannel::Statistical(f),
        } => {
            let shared: Vec<f64> = (0..=s_max)
                .map(|p| {
                    fading::outage_probability(f, *required_rate, p as f64 * step).map(|q| 1.0 - q)
                })
                .collect::<Result<_>>()?;
            Ok(vec![shared; t_total])
        }
        UtilitySpec::NonOutage {
            required_rate,
            channel: OutageChannel::KnownCsit,
        } => {
            let trace = trace
                .ok_or_else(|| Error::Config("known-CSIT outage oracle needs a trace".into()))?;
            Ok((0..t_total)
                .map(|t| {
                    let h = trace.gain_at(t);
                    (0..=s_max)
                        .map(|p| {
                            if (1.0 + h * p as f64 * step).log2() >= *required_rate - 1e-12 {
                                1.0
                            } else {
                                0.0
                            }
                        })
                        .collect()
                })
                .collect())
        }
        UtilitySpec::ErgodicThroughput { fading: f } => {
            let shared: Vec<f64> = (0..=s_max)
                .map(|p| fading::ergodic_rate(f, p as f64 * step))
                .collect::<Result<_>>()?;
            Ok(vec![shared; t_total])
        }
    }
}

/// Naive nested enumeration over the same grid; exponential, only for
/// validating the lattice organization on tiny instances.
#[cfg(test)]
fn brute_force_offline_naive(
    profile: &EhProfile,
    trace: Option<&ChannelTrace>,
    spec: &UtilitySpec,
    grid: &GridSpec,
) -> Result<OracleResult> {
    let caps = grid_caps(profile, grid.step);
    let s_max = *caps.last().unwrap();
    let utilities = per_block_utils(profile, trace, spec, grid.step, s_max)?;
    fn rec(t: usize, spent: usize, caps: &[usize], util: &[Vec<f64>]) -> (f64, Vec<usize>) {
        if t == caps.len() {
            return (0.0, Vec::new());
        }
        let mut best = f64::NEG_INFINITY;
        let mut best_seq = Vec::new();
        for p in 0..=(caps[t] - spent) {
            let (rest, seq) = rec(t + 1, spent + p, caps, util);
            let v = util[t][p] + rest;
            if v > best {
                best = v;
                let mut s = vec![p];
                s.extend(seq);
                best_seq = s;
            }
        }
        (best, best_seq)
    }
    let (utility, seq) = rec(0, 0, &caps, &utilities);
    let powers = seq.iter().map(|&p| p as f64 * grid.step).collect();
    Ok(OracleResult {
        schedule: PowerSchedule::from_flat(profile.horizon(), powers)?,
        utility,
    })
}

/// Result of the outage serve-set enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct ServeSetResult {
    /// Minimum number of outage blocks.
    pub min_outages: usize,
    /// Flat indices of the served blocks (lexicographically earliest among
    /// maximum-cardinality feasible sets).
    pub witness: Vec<usize>,
}

/// Exhaustive subset search for known-CSIT outage minimization.
///
/// With full channel knowledge, each block is either skipped or served at
/// exactly the minimum power `(2^r - 1) / h`, so enumerating serve sets is
/// exact. Guard: `M * N <= 22`.
pub fn brute_force_serve_sets(
    profile: &EhProfile,
    trace: &ChannelTrace,
    required_rate: f64,
) -> Result<ServeSetResult> {
    if trace.horizon() != profile.horizon() {
        return Err(Error::ShapeMismatch(
            "trace grid differs from profile grid".into(),
        ));
    }
    if required_rate <= 0.0 {
        return Err(Error::Config(format!(
            "required rate must be positive, got {required_rate}"
        )));
    }
    let t_total = profile.horizon().total_blocks();
    if t_total > 22 {
        return Err(Error::SizeGuard(format!(
            "serve-set enumeration over {t_total} > 22 blocks"
        )));
    }
    let min_power: Vec<f64> = (0..t_total)
        .map(|t| {
            let h = trace.gain_at(t);
            if h > 0.0 {
                (required_rate.exp2() - 1.0) / h
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let harvest = profile.cumulative_harvest();

    let mut best_count = 0usize;
    let mut best_set: Vec<usize> = Vec::new();
    'masks: for mask in 0u32..(1u32 << t_total) {
        let count = mask.count_ones() as usize;
        if count < best_count {
            continue;
        }
        let mut spent = 0.0;
        for t in 0..t_total {
            if mask & (1 << t) != 0 {
                spent += min_power[t];
            }
            if spent > harvest[t] + 1e-9 {
                continue 'masks;
            }
        }
        let set: Vec<usize> = (0..t_total).filter(|t| mask & (1 << t) != 0).collect();
        if count > best_count || (count == best_count && set < best_set) {
            best_count = count;
            best_set = set;
        }
    }
    Ok(ServeSetResult {
        min_outages: t_total - best_count,
        witness: best_set,
    })
}

/// Per-block utility for policy enumeration: requires the gain to be known
/// per block (throughput or indicator non-outage).
fn policy_block_util(spec: &UtilitySpec, p: f64, h: f64) -> Result<f64> {
    match spec {
        UtilitySpec::Throughput => Ok((1.0 + h * p).log2()),
        UtilitySpec::NonOutage {
            required_rate,
            channel: OutageChannel::KnownCsit,
        } => Ok(if (1.0 + h * p).log2() >= *required_rate - 1e-12 {
            1.0
        } else {
            0.0
        }),
        _ => Err(Error::Config(
            "policy enumeration needs a per-block gain-dependent utility".into(),
        )),
    }
}

use crate::model::snap_to_grid;

type PolicyState = (usize, usize, usize); // (battery idx, gain idx, eh idx)

/// Enumerates every deterministic grid-valued policy of the discretized
/// causal problem and returns the maximum expected utility. Exact over the
/// finite supports; no Bellman recursion involved.
///
/// Guard: at most `max_policies` policies (leaves of the assignment tree).
pub fn brute_force_policies(
    model: &crate::model::StochasticModel,
    horizon: crate::model::Horizon,
    spec: &UtilitySpec,
    battery_grid: &[f64],
    max_policies: u64,
) -> Result<f64> {
    model.eh.validate()?;
    spec.validate()?;
    if battery_grid.is_empty() {
        return Err(Error::Config("empty battery grid".into()));
    }
    let gains = model.channel.dist();
    let eh_states = model.eh.states().to_vec();
    let t_total = horizon.total_blocks();
    let n = horizon.blocks_per_eh;

    // initial states: battery = first arrival, gain drawn iid
    let init_eh = model.eh.initial_probs();
    let mut init: BTreeMap<PolicyState, f64> = BTreeMap::new();
    for (e_idx, &pe) in init_eh.iter().enumerate() {
        if pe == 0.0 {
            continue;
        }
        let b_idx = snap_to_grid(battery_grid, eh_states[e_idx]);
        for (g_idx, &pg) in gains.probs().iter().enumerate() {
            if pg == 0.0 {
                continue;
            }
            *init.entry((b_idx, g_idx, e_idx)).or_insert(0.0) += pe * pg;
        }
    }

    let mut leaves = 0u64;
    let states: Vec<(PolicyState, f64)> = init.into_iter().collect();
    explore_policies(
        0,
        &states,
        t_total,
        n,
        model,
        spec,
        battery_grid,
        gains,
        &eh_states,
        max_policies,
        &mut leaves,
    )
}

#[allow(clippy::too_many_arguments)]
fn explore_policies(
    t: usize,
    states: &[(PolicyState, f64)],
    t_total: usize,
    n: usize,
    model: &crate::model::StochasticModel,
    spec: &UtilitySpec,
    battery_grid: &[f64],
    gains: &crate::model::DiscreteDist,
    eh_states: &[f64],
    max_policies: u64,
    leaves: &mut u64,
) -> Result<f64> {
    if t == t_total {
        *leaves += 1;
        if *leaves > max_policies {
            return Err(Error::SizeGuard(format!(
                "policy enumeration exceeded {max_policies} policies"
            )));
        }
        return Ok(0.0);
    }
    // odometer over one action index per reachable state
    let mut assignment: Vec<usize> = vec![0; states.len()];
    let mut best = f64::NEG_INFINITY;
    loop {
        // evaluate this stage assignment
        let mut immediate = 0.0;
        let mut next: BTreeMap<PolicyState, f64> = BTreeMap::new();
        for (((b_idx, g_idx, e_idx), prob), &p_idx) in states.iter().zip(&assignment) {
            let p = battery_grid[p_idx];
            immediate += prob * policy_block_util(spec, p, gains.values()[*g_idx])?;
            let post = battery_grid[*b_idx] - p;
            let boundary = (t + 1).is_multiple_of(n);
            if t + 1 < t_total {
                let eh_next: Vec<(usize, f64)> = if boundary {
                    model
                        .eh
                        .next_probs(*e_idx)
                        .into_iter()
                        .enumerate()
                        .filter(|(_, p)| *p > 0.0)
                        .collect()
                } else {
                    vec![(*e_idx, 1.0)]
                };
                for (e_next, pe) in eh_next {
                    let arrival = eh_states[e_next];
                    let b_next = snap_to_grid(battery_grid, post + arrival);
                    for (g_next, &pg) in gains.probs().iter().enumerate() {
                        if pg == 0.0 {
                            continue;
                        }
                        *next.entry((b_next, g_next, e_next)).or_insert(0.0) += prob * pe * pg;
                    }
                }
            }
        }
        let rest = if t + 1 == t_total {
            *leaves += 1;
            if *leaves > max_policies {
                return Err(Error::SizeGuard(format!(
                    "policy enumeration exceeded {max_policies} policies"
                )));
            }
            0.0
        } else {
            let next_states: Vec<(PolicyState, f64)> = next.into_iter().collect();
            explore_policies(
                t + 1,
                &next_states,
                t_total,
                n,
                model,
                spec,
                battery_grid,
                gains,
                eh_states,
                max_policies,
                leaves,
            )?
        };
        if immediate + rest > best {
            best = immediate + rest;
        }

        // advance the odometer; action for state i ranges over 0..=b_idx
        let mut i = 0;
        loop {
            if i == states.len() {
                return Ok(best);
            }
            assignment[i] += 1;
            if assignment[i] <= states[i].0 .0 {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Relay grid oracles (rate space). These search per-block end-to-end rates
// directly: achieving rate r on a hop with gain g costs (2^r - 1)/g energy,
// which is elementary rate-function inversion, not solver structure.
// ---------------------------------------------------------------------------

/// Grid oracle for the delay-constrained relay: maximizes the sum of
/// per-block end-to-end rates subject to both nodes' cumulative energy
/// constraints. Exhaustive over a rate grid with feasibility pruning.
pub fn relay_oracle_delay_constrained(
    source: &EhProfile,
    relay: &EhProfile,
    gain_sr: f64,
    gain_rd: f64,
    grid: &GridSpec,
) -> Result<f64> {
    grid.validate()?;
    if gain_sr <= 0.0 || gain_rd <= 0.0 {
        return Ok(0.0);
    }
    let a_s = source.cumulative_harvest();
    let a_r = relay.cumulative_harvest();
    let t_total = a_s.len();
    if a_r.len() != t_total {
        return Err(Error::ShapeMismatch(
            "relay profiles differ in shape".into(),
        ));
    }
    let r_max = (1.0 + (gain_sr * a_s[t_total - 1]).min(gain_rd * a_r[t_total - 1])).log2();
    let levels = (r_max / grid.step).ceil() as usize + 1;
    let total: u64 = (levels as u64)
        .checked_pow(t_total as u32)
        .unwrap_or(u64::MAX);
    if total > grid.max_evals {
        return Err(Error::SizeGuard(format!(
            "delay-constrained relay oracle: {levels}^{t_total} rate tuples exceed guard"
        )));
    }
    let cost: Vec<f64> = (0..levels)
        .map(|i| (i as f64 * grid.step).exp2() - 1.0)
        .collect();

    #[allow(clippy::too_many_arguments)]
    fn rec(
        t: usize,
        spent_s: f64,
        spent_r: f64,
        acc: f64,
        a_s: &[f64],
        a_r: &[f64],
        g_sr: f64,
        g_rd: f64,
        cost: &[f64],
        step: f64,
        best: &mut f64,
    ) {
        if t == a_s.len() {
            if acc > *best {
                *best = acc;
            }
            return;
        }
        for (i, &c) in cost.iter().enumerate() {
            let s = spent_s + c / g_sr;
            let r = spent_r + c / g_rd;
            if s > a_s[t] + 1e-9 || r > a_r[t] + 1e-9 {
                break; // cost is increasing in i
            }
            rec(
                t + 1,
                s,
                r,
                acc + i as f64 * step,
                a_s,
                a_r,
                g_sr,
                g_rd,
                cost,
                step,
                best,
            );
        }
    }
    let mut best = 0.0;
    rec(
        0, 0.0, 0.0, 0.0, &a_s, &a_r, gain_sr, gain_rd, &cost, grid.step, &mut best,
    );
    Ok(best)
}

/// Grid oracle for the relay stage of the delay-tolerant problem: maximizes
/// the relay's total forwarded bits subject to its own energy constraints and
/// the cumulative data caps `bits_in[t]` (bits available at the relay by
/// block `t`).
pub fn relay_oracle_forwarding_stage(
    relay: &EhProfile,
    gain_rd: f64,
    bits_in: &[f64],
    grid: &GridSpec,
) -> Result<f64> {
    grid.validate()?;
    if gain_rd <= 0.0 {
        return Ok(0.0);
    }
    let a_r = relay.cumulative_harvest();
    let t_total = a_r.len();
    if bits_in.len() != t_total {
        return Err(Error::ShapeMismatch("data-cap profile length".into()));
    }
    let r_max = (1.0 + gain_rd * a_r[t_total - 1])
        .log2()
        .min(bits_in[t_total - 1]);
    let levels = (r_max / grid.step).ceil() as usize + 1;
    let total: u64 = (levels as u64)
        .checked_pow(t_total as u32)
        .unwrap_or(u64::MAX);
    if total > grid.max_evals {
        return Err(Error::SizeGuard(
            "forwarding-stage oracle exceeds guard".into(),
        ));
    }
    let cost: Vec<f64> = (0..levels)
        .map(|i| (i as f64 * grid.step).exp2() - 1.0)
        .collect();

    #[allow(clippy::too_many_arguments)]
    fn rec(
        t: usize,
        spent: f64,
        bits: f64,
        a_r: &[f64],
        caps: &[f64],
        g: f64,
        cost: &[f64],
        step: f64,
        best: &mut f64,
    ) {
        if t == a_r.len() {
            if bits > *best {
                *best = bits;
            }
            return;
        }
        for (i, &c) in cost.iter().enumerate() {
            let e = spent + c / g;
            let b = bits + i as f64 * step;
            if e > a_r[t] + 1e-9 || b > caps[t] + 1e-9 {
                break;
            }
            rec(t + 1, e, b, a_r, caps, g, cost, step, best);
        }
    }
    let mut best = 0.0;
    rec(
        0, 0.0, 0.0, &a_r, bits_in, gain_rd, &cost, grid.step, &mut best,
    );
    Ok(best)
}

/// Grid oracle for one-way energy sharing: joint sweep over per-block
/// end-to-end rates and per-block transfers. Only desk-scale horizons fit
/// the guard (the sweep is `(levels_r * levels_x)^T`).
pub fn relay_oracle_energy_sharing(
    source: &EhProfile,
    relay: &EhProfile,
    gain_sr: f64,
    gain_rd: f64,
    alpha: f64,
    grid: &GridSpec,
) -> Result<f64> {
    grid.validate()?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Config(format!(
            "transfer efficiency {alpha} outside (0, 1]"
        )));
    }
    if gain_sr <= 0.0 || gain_rd <= 0.0 {
        return Ok(0.0);
    }
    let a_s = source.cumulative_harvest();
    let a_r = relay.cumulative_harvest();
    let t_total = a_s.len();
    if a_r.len() != t_total {
        return Err(Error::ShapeMismatch(
            "relay profiles differ in shape".into(),
        ));
    }
    // with all source energy transferred, the relay cap is a_r + alpha a_s
    let r_cap = (1.0
        + (gain_sr * a_s[t_total - 1])
            .min(gain_rd * (a_r[t_total - 1] + alpha * a_s[t_total - 1])))
    .log2();
    let levels_r = (r_cap / grid.step).ceil() as usize + 1;
    let levels_x = (a_s[t_total - 1] / grid.step).ceil() as usize + 1;
    let per_block = levels_r as u64 * levels_x as u64;
    let total = per_block.checked_pow(t_total as u32).unwrap_or(u64::MAX);
    if total > grid.max_evals {
        return Err(Error::SizeGuard(format!(
            "energy-sharing oracle: ({levels_r} x {levels_x})^{t_total} exceeds guard"
        )));
    }
    let cost: Vec<f64> = (0..levels_r)
        .map(|i| (i as f64 * grid.step).exp2() - 1.0)
        .collect();

    #[allow(clippy::too_many_arguments)]
    fn rec(
        t: usize,
        src_out: f64, // cumulative source spend: transmit cost + transfers
        rel_spent: f64,
        transferred: f64,
        acc: f64,
        a_s: &[f64],
        a_r: &[f64],
        g_sr: f64,
        g_rd: f64,
        alpha: f64,
        cost: &[f64],
        levels_x: usize,
        step: f64,
        best: &mut f64,
    ) {
        if t == a_s.len() {
            if acc > *best {
                *best = acc;
            }
            return;
        }
        for x_idx in 0..levels_x {
            let x = x_idx as f64 * step;
            let src_base = src_out + x;
            if src_base > a_s[t] + 1e-9 {
                break;
            }
            let credited = transferred + alpha * x;
            for (i, &c) in cost.iter().enumerate() {
                let s = src_base + c / g_sr;
                let r = rel_spent + c / g_rd;
                if s > a_s[t] + 1e-9 || r > a_r[t] + credited + 1e-9 {
                    break;
                }
                rec(
                    t + 1,
                    s,
                    r,
                    credited,
                    acc + i as f64 * step,
                    a_s,
                    a_r,
                    g_sr,
                    g_rd,
                    alpha,
                    cost,
                    levels_x,
                    step,
                    best,
                );
            }
        }
    }
    let mut best = 0.0;
    rec(
        0, 0.0, 0.0, 0.0, 0.0, &a_s, &a_r, gain_sr, gain_rd, alpha, &cost, levels_x, grid.step,
        &mut best,
    );
    Ok(best)
}
