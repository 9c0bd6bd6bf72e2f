//! Non-causal solvers: staircase water-filling for throughput, ergodic-rate
//! allocation over EH blocks, save-then-transmit outage minimization, and the
//! gain-ordering outage heuristic for fully known channels.
//!
//! All of them optimize under the same constraint family — cumulative
//! consumption capped by cumulative harvest — whose optimum decomposes into
//! epochs separated by tight constraints. Within an epoch the water level
//! (or, for identical concave utilities, the power itself) is constant, and
//! levels never decrease over time. The greedy below picks, from the current
//! position, the end point minimizing the epoch's water level; merging
//! arguments give exactly the KKT staircase.

use crate::error::{Error, Result};
use crate::fading::{self, OutageFn};
use crate::model::{ChannelTrace, EhProfile, PowerSchedule};

/// Water levels of a staircase solution: per-block level `v` with
/// `P = max(0, v - 1/h)`, plus the flat indices where the cumulative
/// constraint is tight (epoch ends).
#[derive(Debug, Clone)]
pub struct WaterLevels {
    levels: Vec<f64>,
    epoch_ends: Vec<usize>,
}

impl WaterLevels {
    pub fn levels_flat(&self) -> &[f64] {
        &self.levels
    }

    /// Flat indices at which the cumulative energy constraint binds.
    pub fn epoch_ends(&self) -> &[usize] {
        &self.epoch_ends
    }
}

/// Single-budget water-filling: maximize `sum log2(1 + g_i p_i)` subject to
/// `sum p_i <= budget`. The common level is found by bisection to 1e-10;
/// zero-gain entries never receive power.
///
/// # Example
///
/// ```
/// use ehopt_core::offline::waterfill_budget;
///
/// // the stronger channel sits lower in inverse-gain terms and takes more
/// let p = waterfill_budget(1.0, &[1.0, 4.0]);
/// assert!((p[0] - 0.125).abs() < 1e-9);
/// assert!((p[1] - 0.875).abs() < 1e-9);
/// ```
pub fn waterfill_budget(budget: f64, gains: &[f64]) -> Vec<f64> {
    if gains.is_empty() {
        return Vec::new();
    }
    let mut powers = vec![0.0; gains.len()];
    if budget <= 0.0 {
        return powers;
    }
    let inv: Vec<Option<f64>> = gains
        .iter()
        .map(|&g| if g > 0.0 { Some(1.0 / g) } else { None })
        .collect();
    let Some(level) = waterfill_level(budget, &inv) else {
        return powers;
    };
    for (p, i) in powers.iter_mut().zip(&inv) {
        if let Some(inv_g) = i {
            *p = (level - inv_g).max(0.0);
        }
    }
    powers
}

/// Water level absorbing exactly `budget` over the active (positive-gain)
/// entries; `None` when nothing can absorb. For zero budget, the threshold
/// level at which power would start to flow.
fn waterfill_level(budget: f64, inv_gains: &[Option<f64>]) -> Option<f64> {
    let min_inv = inv_gains
        .iter()
        .flatten()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if !min_inv.is_finite() {
        return None;
    }
    if budget <= 0.0 {
        return Some(min_inv);
    }
    let consumption = |level: f64| -> f64 {
        inv_gains
            .iter()
            .flatten()
            .map(|&iv| (level - iv).max(0.0))
            .sum()
    };
    let (mut lo, mut hi) = (min_inv, min_inv + budget);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if consumption(mid) < budget {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi.max(1.0) {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Staircase allocation on arbitrary cumulative caps.
pub(crate) struct StaircaseAllocation {
    pub powers: Vec<f64>,
    pub levels: Vec<f64>,
    pub epoch_ends: Vec<usize>,
}

/// Greedy epoch decomposition: from position `s`, choose the epoch end `t`
/// minimizing the water level that spends `caps[t] - spent` over blocks
/// `s..=t` (ties to the largest `t`, merging epochs whose unconstrained
/// levels would decrease), assign, and continue from `t + 1`. Caps are first
/// replaced by their running minimum from the right, which leaves harvest
/// profiles unchanged and makes externally supplied cap curves consistent
/// with non-decreasing cumulative consumption.
#[allow(clippy::needless_range_loop)] // epoch scans slice `inv[s..=t]` by the same index
pub(crate) fn staircase_on_caps(caps: &[f64], gains: &[f64]) -> StaircaseAllocation {
    assert_eq!(caps.len(), gains.len());
    let t_total = caps.len();
    let mut eff = caps.to_vec();
    for t in (0..t_total.saturating_sub(1)).rev() {
        eff[t] = eff[t].min(eff[t + 1]);
    }
    let inv: Vec<Option<f64>> = gains
        .iter()
        .map(|&g| if g > 0.0 { Some(1.0 / g) } else { None })
        .collect();

    let mut powers = vec![0.0; t_total];
    let mut levels = vec![0.0; t_total];
    let mut epoch_ends = Vec::new();
    let mut s = 0usize;
    let mut spent = 0.0;
    let mut last_level = 0.0;
    while s < t_total {
        let mut best: Option<(usize, f64)> = None;
        for t in s..t_total {
            let budget = (eff[t] - spent).max(0.0);
            if let Some(level) = waterfill_level(budget, &inv[s..=t]) {
                match best {
                    Some((_, bl)) if level > bl => {}
                    _ => best = Some((t, level)),
                }
            }
        }
        let Some((t_end, level)) = best else {
            // no positive gain anywhere ahead: the remainder stays silent
            for level in levels.iter_mut().take(t_total).skip(s) {
                *level = last_level;
            }
            break;
        };
        let budget = (eff[t_end] - spent).max(0.0);
        let epoch_powers = waterfill_powers(budget, &inv[s..=t_end], level);
        for (k, p) in epoch_powers.into_iter().enumerate() {
            powers[s + k] = p;
            levels[s + k] = level;
        }
        spent = eff[t_end];
        epoch_ends.push(t_end);
        last_level = level;
        s = t_end + 1;
    }
    StaircaseAllocation {
        powers,
        levels,
        epoch_ends,
    }
}

fn waterfill_powers(budget: f64, inv_gains: &[Option<f64>], level: f64) -> Vec<f64> {
    if budget <= 0.0 {
        return vec![0.0; inv_gains.len()];
    }
    inv_gains
        .iter()
        .map(|i| i.map_or(0.0, |iv| (level - iv).max(0.0)))
        .collect()
}

/// Equal-power epoch greedy for identical concave per-block utilities:
/// minimize the running average `(caps[t] - spent) / len` over epoch ends.
/// Returns per-block powers and tight indices.
#[allow(clippy::needless_range_loop)] // epoch scans need the running index
pub(crate) fn equal_power_on_caps(caps: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let t_total = caps.len();
    let mut eff = caps.to_vec();
    for t in (0..t_total.saturating_sub(1)).rev() {
        eff[t] = eff[t].min(eff[t + 1]);
    }
    let mut powers = vec![0.0; t_total];
    let mut ends = Vec::new();
    let mut s = 0usize;
    let mut spent = 0.0;
    while s < t_total {
        let mut best_t = s;
        let mut best_avg = f64::INFINITY;
        for t in s..t_total {
            let avg = (eff[t] - spent).max(0.0) / (t - s + 1) as f64;
            if avg <= best_avg {
                best_avg = avg;
                best_t = t;
            }
        }
        for p in powers.iter_mut().take(best_t + 1).skip(s) {
            *p = best_avg;
        }
        spent = eff[best_t];
        ends.push(best_t);
        s = best_t + 1;
    }
    (powers, ends)
}

/// Throughput-maximizing schedule under full non-causal knowledge.
#[derive(Debug, Clone)]
pub struct ThroughputSolution {
    pub schedule: PowerSchedule,
    pub levels: WaterLevels,
    pub utility: f64,
    /// Structural optimality residual: the largest violation among
    /// feasibility, epoch-budget tightness, terminal exhaustion, and
    /// level monotonicity.
    pub kkt_residual: f64,
}

/// Staircase water-filling over the whole grid: maximizes
/// `sum log2(1 + h(n,m) P(n,m))` under the cumulative harvest constraints.
/// Zero-gain blocks receive exactly zero power; an all-zero trace or a
/// zero-energy profile yields the zero schedule.
///
/// # Example
///
/// ```
/// use ehopt_core::model::{ChannelTrace, EhProfile};
/// use ehopt_core::offline::solve_throughput_case1;
///
/// // a back-loaded harvest cannot equalize: the first constraint binds
/// let profile = EhProfile::new(1, vec![1.0, 3.0]).unwrap();
/// let trace = ChannelTrace::constant(profile.horizon(), 1.0).unwrap();
/// let sol = solve_throughput_case1(&profile, &trace).unwrap();
/// assert_eq!(sol.levels.epoch_ends(), &[0, 1]); // first constraint binds
/// assert!((sol.utility - 3.0).abs() < 1e-9);
/// ```
pub fn solve_throughput_case1(
    profile: &EhProfile,
    trace: &ChannelTrace,
) -> Result<ThroughputSolution> {
    if trace.horizon() != profile.horizon() {
        return Err(Error::ShapeMismatch(
            "trace grid differs from profile grid".into(),
        ));
    }
    let caps = profile.cumulative_harvest();
    let alloc = staircase_on_caps(&caps, trace.gains_flat());
    let utility: f64 = alloc
        .powers
        .iter()
        .zip(trace.gains_flat())
        .map(|(&p, &h)| (1.0 + h * p).log2())
        .sum();
    let residual = staircase_residual_on_caps(&alloc, &caps);
    let schedule = PowerSchedule::from_flat(profile.horizon(), alloc.powers)?;
    Ok(ThroughputSolution {
        schedule,
        levels: WaterLevels {
            levels: alloc.levels,
            epoch_ends: alloc.epoch_ends,
        },
        utility,
        kkt_residual: residual,
    })
}

/// Structural optimality residual of a staircase allocation against its
/// caps: feasibility slack violations, tightness error at epoch ends, and
/// level monotonicity violations.
pub(crate) fn staircase_residual_on_caps(alloc: &StaircaseAllocation, caps: &[f64]) -> f64 {
    let mut residual: f64 = 0.0;
    let mut cum = 0.0;
    for (t, &p) in alloc.powers.iter().enumerate() {
        cum += p;
        residual = residual.max(cum - caps[t]);
    }
    // tightness at every epoch end; the final recorded epoch's end doubles
    // as the exhaustion check (a trailing all-zero-gain stretch records no
    // epoch and legitimately leaves slack)
    let mut cum = 0.0;
    let mut idx = 0usize;
    for &end in &alloc.epoch_ends {
        while idx <= end {
            cum += alloc.powers[idx];
            idx += 1;
        }
        residual = residual.max((caps[end] - cum).abs());
    }
    // level monotonicity
    for w in alloc.levels.windows(2) {
        residual = residual.max(w[0] - w[1]);
    }
    residual
}

/// Ergodic-throughput solution: constant power per EH block.
#[derive(Debug, Clone)]
pub struct ErgodicSolution {
    /// One power per EH block.
    pub eh_block_powers: Vec<f64>,
    pub utility: f64,
    pub kkt_residual: f64,
}

impl ErgodicSolution {
    /// Expand to the full grid (constant within each EH block).
    pub fn as_schedule(&self, profile: &EhProfile) -> Result<PowerSchedule> {
        let n = profile.blocks_per_eh();
        let mut flat = Vec::with_capacity(profile.horizon().total_blocks());
        for &p in &self.eh_block_powers {
            flat.extend(std::iter::repeat_n(p, n));
        }
        PowerSchedule::from_flat(profile.horizon(), flat)
    }
}

/// Expected-throughput maximization without CSIT and with the full rate
/// sequence known: constant power per EH block, `max sum_m N * E[log2(1+hP_m)]`
/// under per-EH-block cumulative constraints. The ergodic rate is concave and
/// identical across blocks, so the optimum is the equal-power epoch greedy on
/// the per-block cumulative budgets.
pub fn solve_ergodic_case4(
    profile: &EhProfile,
    fading: &fading::FadingModel,
) -> Result<ErgodicSolution> {
    fading.validate()?;
    let mut caps = Vec::with_capacity(profile.num_eh_blocks());
    let mut acc = 0.0;
    for &r in profile.rates() {
        acc += r;
        caps.push(acc);
    }
    let (powers, _ends) = equal_power_on_caps(&caps);
    let n = profile.blocks_per_eh() as f64;
    let mut utility = 0.0;
    let mut cache: Vec<(f64, f64)> = Vec::new();
    for &p in &powers {
        let rate = if let Some(&(_, v)) = cache.iter().find(|(q, _)| (*q - p).abs() < 1e-15) {
            v
        } else {
            let v = fading::ergodic_rate(fading, p)?;
            cache.push((p, v));
            v
        };
        utility += n * rate;
    }
    let mut residual: f64 = 0.0;
    let mut cum = 0.0;
    for (m, &p) in powers.iter().enumerate() {
        cum += p;
        residual = residual.max(cum - caps[m]);
    }
    residual = residual.max((caps[caps.len() - 1] - cum).abs());
    for w in powers.windows(2) {
        residual = residual.max(w[0] - w[1]);
    }
    Ok(ErgodicSolution {
        eh_block_powers: powers,
        utility,
        kkt_residual: residual,
    })
}

/// Save-then-transmit outage solution.
#[derive(Debug, Clone)]
pub struct OutageSolution {
    pub schedule: PowerSchedule,
    /// Total non-outage utility `sum (1 - Q(P))`.
    pub utility: f64,
    /// Number of leading silent blocks.
    pub saving_blocks: usize,
}

/// Outage-probability minimization without CSIT, full rate sequence known.
///
/// When the outage curve is convex everywhere (critical power zero) this is a
/// plain concave maximization handled by the equal-power epoch greedy. When a
/// critical power `P_c > 0` exists, the optimum saves first and then
/// transmits non-decreasingly at or above `P_c`: the solver tries every
/// saving-prefix length, solving the convex restriction `P >= P_c` on the
/// remaining blocks via the same greedy on shifted budgets, and keeps the
/// best. Prefixes whose restriction is energy-infeasible are skipped; if all
/// are, everything is saved and spent in the final block.
pub fn solve_outage_case4_noncausal(profile: &EhProfile, ofn: &OutageFn) -> Result<OutageSolution> {
    let caps = profile.cumulative_harvest();
    let t_total = caps.len();
    let pc = ofn.critical_power();

    let non_outage = |powers: &[f64]| -> Result<f64> {
        let mut cache: Vec<(f64, f64)> = Vec::new();
        let mut acc = 0.0;
        for &p in powers {
            if let Some(&(_, v)) = cache.iter().find(|(q, _)| (*q - p).abs() < 1e-15) {
                acc += v;
            } else {
                let v = 1.0 - ofn.outage_prob(p)?;
                cache.push((p, v));
                acc += v;
            }
        }
        Ok(acc)
    };

    if pc <= 0.0 {
        let (powers, _) = equal_power_on_caps(&caps);
        let utility = non_outage(&powers)?;
        let saving = powers.iter().take_while(|&&p| p == 0.0).count();
        let schedule = PowerSchedule::from_flat(profile.horizon(), powers)?;
        return Ok(OutageSolution {
            schedule,
            utility,
            saving_blocks: saving,
        });
    }

    let mut best: Option<(f64, Vec<f64>, usize)> = None;
    for s in 0..t_total {
        // transmit blocks s..T-1 at P_c + q with q >= 0:
        // shifted budgets caps[t] - (t - s + 1) * P_c must stay non-negative
        let mut shifted = Vec::with_capacity(t_total - s);
        let mut feasible = true;
        for (t, &cap) in caps.iter().enumerate().skip(s) {
            let c = cap - (t - s + 1) as f64 * pc;
            if c < -1e-12 {
                feasible = false;
                break;
            }
            shifted.push(c.max(0.0));
        }
        if !feasible {
            continue;
        }
        let (extra, _) = equal_power_on_caps(&shifted);
        let mut powers = vec![0.0; s];
        powers.extend(extra.iter().map(|&q| pc + q));
        let utility = non_outage(&powers)?;
        if best.as_ref().is_none_or(|(u, _, _)| utility > *u) {
            best = Some((utility, powers, s));
        }
    }

    let (utility, powers, saving) = match best {
        Some(b) => b,
        None => {
            // even a single block at P_c is unaffordable: save everything
            // and spend the total in the final block
            let mut powers = vec![0.0; t_total];
            powers[t_total - 1] = caps[t_total - 1];
            let utility = non_outage(&powers)?;
            (utility, powers, t_total - 1)
        }
    };
    let schedule = PowerSchedule::from_flat(profile.horizon(), powers)?;
    Ok(OutageSolution {
        schedule,
        utility,
        saving_blocks: saving,
    })
}

/// Known-CSIT outage heuristic output.
#[derive(Debug, Clone)]
pub struct OutageCase1Solution {
    pub schedule: PowerSchedule,
    pub outage_count: usize,
}

/// Gain-ordering heuristic for outage minimization with full knowledge:
/// visit blocks from the best gain to the worst (ties: earlier block first),
/// tentatively assign the minimum power `(2^r - 1)/h` sustaining the rate,
/// and keep the assignment iff the whole cumulative chain stays feasible.
/// Served blocks meet the rate exactly; every other block stays silent.
pub fn solve_outage_case1(
    profile: &EhProfile,
    trace: &ChannelTrace,
    required_rate: f64,
) -> Result<OutageCase1Solution> {
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
    let harvest = profile.cumulative_harvest();
    let needed = required_rate.exp2() - 1.0;

    let mut order: Vec<usize> = (0..t_total).collect();
    order.sort_by(|&a, &b| {
        trace
            .gain_at(b)
            .partial_cmp(&trace.gain_at(a))
            .unwrap()
            .then(a.cmp(&b))
    });

    let mut powers = vec![0.0; t_total];
    let mut served = 0usize;
    for &t in &order {
        let h = trace.gain_at(t);
        if h <= 0.0 {
            continue;
        }
        powers[t] = needed / h;
        let mut cum = 0.0;
        let mut ok = true;
        for (u, &p) in powers.iter().enumerate() {
            cum += p;
            if cum > harvest[u] + 1e-9 {
                ok = false;
                break;
            }
        }
        if ok {
            served += 1;
        } else {
            powers[t] = 0.0;
        }
    }
    let schedule = PowerSchedule::from_flat(profile.horizon(), powers)?;
    Ok(OutageCase1Solution {
        schedule,
        outage_count: t_total - served,
    })
}
