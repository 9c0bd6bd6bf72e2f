//! Finite-horizon dynamic programming for the causal-information cases, plus
//! Monte Carlo policy rollouts.
//!
//! The continuous problem is discretized up front: battery levels live on a
//! fixed grid, the action grid equals the battery grid, and EH/gain supports
//! are finite by construction. Backward induction is then exact on the
//! discretized problem — expectations over next states are computed over the
//! finite supports, never sampled. Choosing EH rates as multiples of the
//! grid step keeps every battery transition exactly on-grid.

use crate::error::{Error, Result};
use crate::fading::OutageFn;
use crate::model::{
    snap_to_grid, ChannelTrace, EhProcess, EhProfile, Horizon, OutageChannel, PowerSchedule,
    StochasticModel, UtilitySpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Battery/action discretization. The action grid is the battery grid.
#[derive(Debug, Clone)]
pub struct DpGrids {
    battery: Vec<f64>,
}

impl DpGrids {
    /// Uniform grid of `points` levels over `[0, b_max]`.
    pub fn uniform(b_max: f64, points: usize) -> Result<Self> {
        if b_max < 0.0 || !b_max.is_finite() {
            return Err(Error::Config(format!("invalid battery bound {b_max}")));
        }
        if b_max == 0.0 {
            return Ok(DpGrids { battery: vec![0.0] });
        }
        if points < 2 {
            return Err(Error::Config(
                "battery grid needs at least two points".into(),
            ));
        }
        let step = b_max / (points - 1) as f64;
        Ok(DpGrids {
            battery: (0..points).map(|i| i as f64 * step).collect(),
        })
    }

    /// Default 201-point grid covering the total maximum harvest.
    pub fn for_horizon(eh: &EhProcess, horizon: Horizon) -> Result<Self> {
        DpGrids::uniform(eh.max_rate() * horizon.total_blocks() as f64, 201)
    }

    pub fn battery(&self) -> &[f64] {
        &self.battery
    }
}

fn block_utility(spec: &UtilitySpec, p: f64, gain: f64) -> Result<f64> {
    match spec {
        UtilitySpec::Throughput => Ok((1.0 + gain * p).log2()),
        UtilitySpec::NonOutage {
            required_rate,
            channel: OutageChannel::KnownCsit,
        } => Ok(if (1.0 + gain * p).log2() >= *required_rate - 1e-12 {
            1.0
        } else {
            0.0
        }),
        _ => Err(Error::Config(
            "per-block DP needs a gain-dependent utility (throughput or known-CSIT outage)".into(),
        )),
    }
}

/// Stage-indexed lookup policy for the scalar-action cases (2 and 3):
/// `(time, battery, gain, EH rate) -> power`, with the expected
/// utility-to-go table kept alongside.
#[derive(Debug, Clone)]
pub struct DpPolicy {
    horizon: Horizon,
    battery: Vec<f64>,
    gain_values: Vec<f64>,
    gain_probs: Vec<f64>,
    eh_values: Vec<f64>,
    /// Deterministic per-stage arrivals when ESIT is non-causal (case 3).
    deterministic_arrivals: Option<Vec<f64>>,
    value: Vec<f64>,
    action: Vec<u32>,
    n_b: usize,
    n_g: usize,
    n_e: usize,
    initial_expected: f64,
}

impl DpPolicy {
    #[inline]
    fn idx(&self, t: usize, b: usize, g: usize, e: usize) -> usize {
        ((t * self.n_b + b) * self.n_g + g) * self.n_e + e
    }

    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    pub fn battery_grid(&self) -> &[f64] {
        &self.battery
    }

    /// Expected utility-to-go at a state.
    pub fn value_at(&self, t: usize, b: usize, g: usize, e: usize) -> f64 {
        self.value[self.idx(t, b, g, e)]
    }

    /// Greedy power choice at a state.
    pub fn power_at(&self, t: usize, b: usize, g: usize, e: usize) -> f64 {
        self.battery[self.action[self.idx(t, b, g, e)] as usize]
    }

    /// Expected total utility from the initial state distribution.
    pub fn expected_value(&self) -> f64 {
        self.initial_expected
    }

    pub fn num_eh_states(&self) -> usize {
        self.n_e
    }

    /// Recomputes the Bellman right-hand side `max_p [u(p, h) + E V_{t+1}]`
    /// at a state, through the same code path the solver used; table entries
    /// must reproduce it exactly.
    pub fn bellman_rhs(
        &self,
        spec: &UtilitySpec,
        eh: &EhProcess,
        t: usize,
        b: usize,
        g: usize,
        e: usize,
    ) -> Result<f64> {
        let (v, _) = self.best_action(spec, eh, t, b, g, e)?;
        Ok(v)
    }

    fn best_action(
        &self,
        spec: &UtilitySpec,
        eh: &EhProcess,
        t: usize,
        b: usize,
        g: usize,
        e: usize,
    ) -> Result<(f64, u32)> {
        let t_total = self.horizon.total_blocks();
        let gain = self.gain_values[g];
        let mut best = f64::NEG_INFINITY;
        let mut best_p = 0u32;
        for p_idx in 0..=b {
            let mut v = block_utility(spec, self.battery[p_idx], gain)?;
            if t + 1 < t_total {
                let post = self.battery[b] - self.battery[p_idx];
                v += self.expected_next(eh, t, post, e);
            }
            if v > best {
                best = v;
                best_p = p_idx as u32;
            }
        }
        Ok((best, best_p))
    }

    /// `E[V_{t+1}(post + arrival, g', e')]` given the current EH state.
    fn expected_next(&self, eh: &EhProcess, t: usize, post: f64, e: usize) -> f64 {
        let n = self.horizon.blocks_per_eh;
        let boundary = (t + 1).is_multiple_of(n);
        let b_top = *self.battery.last().unwrap();
        let mut acc = 0.0;
        if let Some(arrivals) = &self.deterministic_arrivals {
            let b_next = snap_to_grid(&self.battery, (post + arrivals[t + 1]).min(b_top));
            for (g_next, &pg) in self.gain_probs.iter().enumerate() {
                if pg > 0.0 {
                    acc += pg * self.value_at(t + 1, b_next, g_next, 0);
                }
            }
            return acc;
        }
        if boundary {
            for (e_next, pe) in eh.next_probs(e).into_iter().enumerate() {
                if pe == 0.0 {
                    continue;
                }
                let b_next =
                    snap_to_grid(&self.battery, (post + self.eh_values[e_next]).min(b_top));
                for (g_next, &pg) in self.gain_probs.iter().enumerate() {
                    if pg > 0.0 {
                        acc += pe * pg * self.value_at(t + 1, b_next, g_next, e_next);
                    }
                }
            }
        } else {
            let b_next = snap_to_grid(&self.battery, (post + self.eh_values[e]).min(b_top));
            for (g_next, &pg) in self.gain_probs.iter().enumerate() {
                if pg > 0.0 {
                    acc += pg * self.value_at(t + 1, b_next, g_next, e);
                }
            }
        }
        acc
    }
}

/// Backward induction with causal CSIT and ESIT: the state is
/// (time, battery including the current arrival, current gain, current EH
/// rate); the chosen power never exceeds the battery.
pub fn solve_dp_case2(
    model: &StochasticModel,
    horizon: Horizon,
    spec: &UtilitySpec,
    grids: &DpGrids,
) -> Result<DpPolicy> {
    model.eh.validate()?;
    spec.validate()?;
    if grids.battery.is_empty() {
        return Err(Error::Config("empty battery grid".into()));
    }
    let gains = model.channel.dist();
    build_policy(
        horizon,
        grids,
        gains.values().to_vec(),
        gains.probs().to_vec(),
        model.eh.states().to_vec(),
        None,
        &model.eh,
        spec,
    )
}

/// Backward induction with causal CSIT and the rate sequence known in
/// advance: harvest increments are deterministic and the EH dimension drops
/// out of the state.
pub fn solve_dp_case3(
    profile: &EhProfile,
    channel: &crate::model::ChannelProcess,
    spec: &UtilitySpec,
    grids: &DpGrids,
) -> Result<DpPolicy> {
    spec.validate()?;
    let gains = channel.dist();
    let horizon = profile.horizon();
    let arrivals: Vec<f64> = (0..horizon.total_blocks())
        .map(|t| profile.rate_at(t))
        .collect();
    // the EH process argument is unused on the deterministic path; a point
    // process keeps the shared machinery uniform
    let dummy = EhProcess::Iid(crate::model::DiscreteDist::point(0.0)?);
    build_policy(
        horizon,
        grids,
        gains.values().to_vec(),
        gains.probs().to_vec(),
        vec![0.0],
        Some(arrivals),
        &dummy,
        spec,
    )
}

#[allow(clippy::too_many_arguments)]
fn build_policy(
    horizon: Horizon,
    grids: &DpGrids,
    gain_values: Vec<f64>,
    gain_probs: Vec<f64>,
    eh_values: Vec<f64>,
    deterministic_arrivals: Option<Vec<f64>>,
    eh: &EhProcess,
    spec: &UtilitySpec,
) -> Result<DpPolicy> {
    let t_total = horizon.total_blocks();
    let (n_b, n_g, n_e) = (grids.battery.len(), gain_values.len(), eh_values.len());
    let mut policy = DpPolicy {
        horizon,
        battery: grids.battery.clone(),
        gain_values,
        gain_probs,
        eh_values,
        deterministic_arrivals,
        value: vec![0.0; t_total * n_b * n_g * n_e],
        action: vec![0; t_total * n_b * n_g * n_e],
        n_b,
        n_g,
        n_e,
        initial_expected: 0.0,
    };
    for t in (0..t_total).rev() {
        for b in 0..n_b {
            for g in 0..n_g {
                for e in 0..n_e {
                    let (v, a) = policy.best_action(spec, eh, t, b, g, e)?;
                    let i = policy.idx(t, b, g, e);
                    policy.value[i] = v;
                    policy.action[i] = a;
                }
            }
        }
    }

    // expected value over the initial state: battery = first arrival
    let b_top = *policy.battery.last().unwrap();
    let mut acc = 0.0;
    if let Some(arrivals) = &policy.deterministic_arrivals {
        let b0 = snap_to_grid(&policy.battery, arrivals[0].min(b_top));
        for (g, &pg) in policy.gain_probs.iter().enumerate() {
            acc += pg * policy.value_at(0, b0, g, 0);
        }
    } else {
        for (e, pe) in eh.initial_probs().into_iter().enumerate() {
            if pe == 0.0 {
                continue;
            }
            let b0 = snap_to_grid(&policy.battery, policy.eh_values[e].min(b_top));
            for (g, &pg) in policy.gain_probs.iter().enumerate() {
                acc += pe * pg * policy.value_at(0, b0, g, e);
            }
        }
    }
    policy.initial_expected = acc;
    Ok(policy)
}

/// Inner action family for the per-EH-block outage DP.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case4ActionFamily {
    /// `k` silent blocks then one flat level — lossless here, because
    /// within-block caps `b + n E` have strictly decreasing prefix averages,
    /// so the within-block optimum is always flat after the silent prefix.
    SaveThenFlat,
    /// Every grid-valued within-block vector; exponential in `N`, retained
    /// for validating the restriction on small instances.
    Unrestricted,
}

/// Per-EH-block policy with vector actions for outage minimization without
/// CSIT and with causal ESIT.
#[derive(Debug, Clone)]
pub struct EhBlockPolicy {
    horizon: Horizon,
    battery: Vec<f64>,
    ofn: OutageFn,
    value: Vec<f64>,
    // flat action table: per (stage, battery, eh) the within-block vector
    actions: Vec<Vec<f64>>,
    n_b: usize,
    n_e: usize,
    initial_expected: f64,
}

impl EhBlockPolicy {
    #[inline]
    fn idx(&self, m: usize, b: usize, e: usize) -> usize {
        (m * self.n_b + b) * self.n_e + e
    }

    pub fn value_at(&self, m: usize, b: usize, e: usize) -> f64 {
        self.value[self.idx(m, b, e)]
    }

    /// Power vector for the `N` communication blocks of EH block `m`, given
    /// the battery level at the block start (before its arrivals) and the
    /// observed rate.
    pub fn action_at(&self, m: usize, b: usize, e: usize) -> &[f64] {
        &self.actions[self.idx(m, b, e)]
    }

    pub fn expected_value(&self) -> f64 {
        self.initial_expected
    }

    pub fn outage_fn(&self) -> &OutageFn {
        &self.ofn
    }

    pub fn battery_grid(&self) -> &[f64] {
        &self.battery
    }

    pub fn horizon(&self) -> Horizon {
        self.horizon
    }
}

/// Backward induction at EH-block granularity: at the start of each EH block
/// the transmitter commits powers for all `N` constituting communication
/// blocks, trading current expected outage against the value of the battery
/// carried forward.
pub fn solve_dp_outage_case4_causal(
    eh: &EhProcess,
    ofn: &OutageFn,
    horizon: Horizon,
    grids: &DpGrids,
    family: Case4ActionFamily,
) -> Result<EhBlockPolicy> {
    eh.validate()?;
    if grids.battery.is_empty() {
        return Err(Error::Config("empty battery grid".into()));
    }
    let battery = grids.battery.clone();
    let eh_values = eh.states().to_vec();
    let (n_b, n_e) = (battery.len(), eh_values.len());
    let big_m = horizon.eh_blocks;
    let big_n = horizon.blocks_per_eh;
    let b_top = *battery.last().unwrap();

    // non-outage per grid power, shared by every block
    let util: Vec<f64> = battery
        .iter()
        .map(|&p| ofn.outage_prob(p).map(|q| 1.0 - q))
        .collect::<Result<_>>()?;

    let mut policy = EhBlockPolicy {
        horizon,
        battery: battery.clone(),
        ofn: ofn.clone(),
        value: vec![0.0; big_m * n_b * n_e],
        actions: vec![Vec::new(); big_m * n_b * n_e],
        n_b,
        n_e,
        initial_expected: 0.0,
    };

    for m in (0..big_m).rev() {
        for b in 0..n_b {
            for (e, &rate) in eh_values.iter().enumerate() {
                let avail = battery[b];
                let mut best = f64::NEG_INFINITY;
                let mut best_vec: Vec<f64> = vec![0.0; big_n];

                let mut consider = |vec_powers: &[f64], spend: f64, util_sum: f64| {
                    let mut v = util_sum;
                    if m + 1 < big_m {
                        let post = (avail + big_n as f64 * rate - spend).min(b_top);
                        let b_next = snap_to_grid(&battery, post.max(0.0));
                        for (e_next, pe) in eh.next_probs(e).into_iter().enumerate() {
                            if pe > 0.0 {
                                v += pe * policy.value[(m + 1) * n_b * n_e + b_next * n_e + e_next];
                            }
                        }
                    }
                    if v > best {
                        best = v;
                        best_vec = vec_powers.to_vec();
                    }
                };

                match family {
                    Case4ActionFamily::SaveThenFlat => {
                        for k in 0..=big_n {
                            if k == big_n {
                                consider(&vec![0.0; big_n], 0.0, 0.0);
                                continue;
                            }
                            let active = (big_n - k) as f64;
                            // within-block caps b + nE bind only at n = N
                            let p_cap = (avail + big_n as f64 * rate) / active;
                            for (p_idx, &p) in battery.iter().enumerate() {
                                if p > p_cap + 1e-9 {
                                    break;
                                }
                                let mut vecp = vec![0.0; big_n];
                                for slot in vecp.iter_mut().skip(k) {
                                    *slot = p;
                                }
                                consider(&vecp, active * p, active * util[p_idx]);
                            }
                        }
                    }
                    Case4ActionFamily::Unrestricted => {
                        // odometer over grid indices per communication block
                        let mut idxs = vec![0usize; big_n];
                        'outer: loop {
                            let mut spend = 0.0;
                            let mut us = 0.0;
                            let mut ok = true;
                            for (n, &pi) in idxs.iter().enumerate() {
                                spend += battery[pi];
                                us += util[pi];
                                if spend > avail + (n + 1) as f64 * rate + 1e-9 {
                                    ok = false;
                                    break;
                                }
                            }
                            if ok {
                                let vecp: Vec<f64> = idxs.iter().map(|&i| battery[i]).collect();
                                consider(&vecp, spend, us);
                            }
                            let mut d = 0;
                            loop {
                                if d == big_n {
                                    break 'outer;
                                }
                                idxs[d] += 1;
                                if idxs[d] < n_b {
                                    break;
                                }
                                idxs[d] = 0;
                                d += 1;
                            }
                        }
                    }
                }
                let i = policy.idx(m, b, e);
                policy.value[i] = best;
                policy.actions[i] = best_vec;
            }
        }
    }

    let b0 = snap_to_grid(&battery, 0.0);
    let mut acc = 0.0;
    for (e, pe) in eh.initial_probs().into_iter().enumerate() {
        if pe > 0.0 {
            acc += pe * policy.value_at(0, b0, e);
        }
    }
    policy.initial_expected = acc;
    Ok(policy)
}

/// A rollout-capable decision rule.
#[derive(Debug, Clone, Copy)]
pub enum PolicyRef<'a> {
    Dp(&'a DpPolicy),
    EhBlock(&'a EhBlockPolicy),
    /// Spend the whole battery every block.
    Myopic,
    /// Fixed power, clamped to the available battery.
    ConstantPower(f64),
}

/// One recorded rollout.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub profile: EhProfile,
    pub trace: ChannelTrace,
    pub schedule: PowerSchedule,
    pub utility: f64,
}

/// Monte Carlo summary of a policy.
#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
    pub utilities: Vec<f64>,
    /// First few rollouts, for inspection.
    pub trajectories: Vec<Trajectory>,
}

/// Draws one realization of the stochastic model: EH-rate indices per EH
/// block and gain indices per communication block, as a pure function of
/// `(seed, trial)`.
pub(crate) fn draw_realization(
    model: &StochasticModel,
    horizon: Horizon,
    seed: u64,
    trial: u64,
) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let mut eh_idx = Vec::with_capacity(horizon.eh_blocks);
    match &model.eh {
        EhProcess::Iid(d) => {
            for _ in 0..horizon.eh_blocks {
                eh_idx.push(d.sample_index(rng.gen::<f64>()));
            }
        }
        EhProcess::Markov {
            initial,
            transition,
            ..
        } => {
            let mut cur = sample_from(initial, rng.gen::<f64>());
            eh_idx.push(cur);
            for _ in 1..horizon.eh_blocks {
                cur = sample_from(&transition[cur], rng.gen::<f64>());
                eh_idx.push(cur);
            }
        }
    }
    let gains = model.channel.dist();
    let gain_idx: Vec<usize> = (0..horizon.total_blocks())
        .map(|_| gains.sample_index(rng.gen::<f64>()))
        .collect();
    (eh_idx, gain_idx)
}

fn sample_from(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Rolls a policy over `trials` independent realizations of the model and
/// reports the sample mean and standard error. Every rollout's schedule is
/// feasibility-checked against its realized profile.
pub fn simulate_policy(
    policy: PolicyRef<'_>,
    model: &StochasticModel,
    horizon: Horizon,
    spec: &UtilitySpec,
    trials: usize,
    seed: u64,
) -> Result<SimulationReport> {
    if trials == 0 {
        return Err(Error::Config("simulation needs at least one trial".into()));
    }
    let mut utilities = Vec::with_capacity(trials);
    let mut trajectories = Vec::new();
    for trial in 0..trials {
        let (eh_idx, gain_idx) = draw_realization(model, horizon, seed, trial as u64);
        let traj = rollout(policy, model, horizon, spec, &eh_idx, &gain_idx)?;
        utilities.push(traj.utility);
        if trajectories.len() < 8 {
            trajectories.push(traj);
        }
    }
    summarize(utilities, trajectories, trials)
}

/// [`simulate_policy`] with the rate sequence held fixed (known ESIT): only
/// the gains are drawn, one stream per trial.
pub fn simulate_policy_on_profile(
    policy: PolicyRef<'_>,
    profile: &EhProfile,
    channel: &crate::model::ChannelProcess,
    spec: &UtilitySpec,
    trials: usize,
    seed: u64,
) -> Result<SimulationReport> {
    if trials == 0 {
        return Err(Error::Config("simulation needs at least one trial".into()));
    }
    let horizon = profile.horizon();
    // express the known sequence over its distinct sorted rates so the
    // shared rollout machinery reconstructs it exactly
    let mut states: Vec<f64> = profile.rates().to_vec();
    states.sort_by(|a, b| a.partial_cmp(b).unwrap());
    states.dedup();
    let eh_idx: Vec<usize> = profile
        .rates()
        .iter()
        .map(|r| {
            states
                .binary_search_by(|v| v.partial_cmp(r).unwrap())
                .unwrap()
        })
        .collect();
    let n_states = states.len();
    let model = StochasticModel::new(
        EhProcess::Iid(crate::model::DiscreteDist::new(
            states,
            vec![1.0 / n_states as f64; n_states],
        )?),
        channel.clone(),
    )?;
    let gains = channel.dist();
    let mut utilities = Vec::with_capacity(trials);
    let mut trajectories = Vec::new();
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let gain_idx: Vec<usize> = (0..horizon.total_blocks())
            .map(|_| gains.sample_index(rng.gen::<f64>()))
            .collect();
        let traj = rollout(policy, &model, horizon, spec, &eh_idx, &gain_idx)?;
        utilities.push(traj.utility);
        if trajectories.len() < 8 {
            trajectories.push(traj);
        }
    }
    summarize(utilities, trajectories, trials)
}

fn summarize(
    utilities: Vec<f64>,
    trajectories: Vec<Trajectory>,
    trials: usize,
) -> Result<SimulationReport> {
    let mean = utilities.iter().sum::<f64>() / trials as f64;
    let std_error = if trials > 1 {
        let var = utilities
            .iter()
            .map(|u| (u - mean) * (u - mean))
            .sum::<f64>()
            / (trials - 1) as f64;
        (var / trials as f64).sqrt()
    } else {
        0.0
    };
    Ok(SimulationReport {
        mean,
        std_error,
        trials,
        utilities,
        trajectories,
    })
}

/// Materializes a drawn realization as the concrete profile and trace.
pub(crate) fn realized_instance(
    model: &StochasticModel,
    horizon: Horizon,
    eh_idx: &[usize],
    gain_idx: &[usize],
) -> Result<(EhProfile, ChannelTrace)> {
    let eh_states = model.eh.states();
    let gains = model.channel.dist();
    let rates: Vec<f64> = eh_idx.iter().map(|&e| eh_states[e]).collect();
    let profile = EhProfile::new(horizon.blocks_per_eh, rates)?;
    let trace_rows: Vec<Vec<f64>> = (0..horizon.eh_blocks)
        .map(|m| {
            (0..horizon.blocks_per_eh)
                .map(|n| gains.values()[gain_idx[m * horizon.blocks_per_eh + n]])
                .collect()
        })
        .collect();
    Ok((profile, ChannelTrace::from_rows(trace_rows)?))
}

/// Evaluates a policy on one realized draw. Public to the crate so the
/// experiment harness can reuse exactly this rollout under common random
/// numbers.
pub(crate) fn rollout(
    policy: PolicyRef<'_>,
    model: &StochasticModel,
    horizon: Horizon,
    spec: &UtilitySpec,
    eh_idx: &[usize],
    gain_idx: &[usize],
) -> Result<Trajectory> {
    let (profile, trace) = realized_instance(model, horizon, eh_idx, gain_idx)?;
    let rates: Vec<f64> = profile.rates().to_vec();

    let t_total = horizon.total_blocks();
    let n = horizon.blocks_per_eh;
    let mut powers = vec![0.0; t_total];

    match policy {
        PolicyRef::EhBlock(pol) => {
            let mut stored = 0.0f64;
            for m in 0..horizon.eh_blocks {
                let b_idx = snap_to_grid(pol.battery_grid(), stored);
                let action = pol.action_at(m, b_idx, eh_idx[m]).to_vec();
                for (k, &p) in action.iter().enumerate() {
                    powers[m * n + k] = p;
                }
                stored += n as f64 * rates[m] - action.iter().sum::<f64>();
            }
        }
        _ => {
            let mut battery = 0.0f64;
            for t in 0..t_total {
                battery += profile.rate_at(t);
                let p = match policy {
                    PolicyRef::Dp(pol) => {
                        let b_idx = snap_to_grid(pol.battery_grid(), battery);
                        let e_idx = if pol.num_eh_states() > 1 {
                            eh_idx[t / n]
                        } else {
                            0
                        };
                        pol.power_at(t, b_idx, gain_idx[t], e_idx).min(battery)
                    }
                    PolicyRef::Myopic => battery,
                    PolicyRef::ConstantPower(c) => c.min(battery),
                    PolicyRef::EhBlock(_) => unreachable!(),
                };
                powers[t] = p;
                battery -= p;
            }
        }
    }

    let schedule = PowerSchedule::from_flat(horizon, powers)?;
    if !schedule.check_feasible(&profile, 1e-9)? {
        return Err(Error::Infeasible(
            "policy rollout violated the energy constraints".into(),
        ));
    }
    let utility = match policy {
        PolicyRef::EhBlock(pol) => {
            // expectation over the unknown gains is exact: sum of 1 - Q(P)
            let mut acc = 0.0;
            for &p in schedule.powers_flat() {
                acc += 1.0 - pol.outage_fn().outage_prob(p)?;
            }
            acc
        }
        _ => crate::model::evaluate_utility(&schedule, Some(&trace), spec)?,
    };
    Ok(Trajectory {
        profile,
        trace,
        schedule,
        utility,
    })
}
