//! Reproducible stochastic trace generation and the Monte Carlo experiment
//! harness.
//!
//! Randomness goes through a counter-based, stream-splittable generator
//! (ChaCha8): trial `k` of an experiment uses stream `k` of the master seed,
//! so traces are bit-identical across runs and platforms and trials are
//! independent. Gains are sampled by inverse CDF for every fading family,
//! keeping determinism independent of any rejection-loop behavior. Within an
//! experiment all policies are evaluated on the same per-trial trace (common
//! random numbers).

use crate::error::{Error, Result};
use crate::fading::{self, FadingModel};
use crate::model::{
    evaluate_utility, ChannelTrace, EhProcess, EhProfile, Horizon, StochasticModel, UtilitySpec,
};
use crate::offline;
use crate::online::{self, DpGrids, DpPolicy, PolicyRef};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashMap;

/// Energy-arrival source for trace generation.
#[derive(Debug, Clone)]
pub enum EhSource {
    /// Fixed, known rate sequence.
    Deterministic(Vec<f64>),
    /// Random rates from a finite-support process.
    Process(EhProcess),
}

/// Reproducible generator of (EH profile, channel trace) pairs on the
/// two-time-scale grid: one rate per EH block, one gain per communication
/// block.
#[derive(Debug, Clone)]
pub struct TraceGenerator {
    pub horizon: Horizon,
    pub fading: FadingModel,
    pub eh: EhSource,
    pub seed: u64,
}

impl TraceGenerator {
    /// Draws trial `trial`: a deterministic function of `(seed, trial)`.
    /// Rates are drawn first (one per EH block), then gains (one per
    /// communication block), all by inverse CDF.
    pub fn generate_trace(&self, trial: u64) -> Result<(EhProfile, ChannelTrace)> {
        self.fading.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);

        let rates: Vec<f64> = match &self.eh {
            EhSource::Deterministic(r) => {
                if r.len() != self.horizon.eh_blocks {
                    return Err(Error::ShapeMismatch("rate sequence length".into()));
                }
                r.clone()
            }
            EhSource::Process(proc) => {
                proc.validate()?;
                let states = proc.states();
                match proc {
                    EhProcess::Iid(d) => (0..self.horizon.eh_blocks)
                        .map(|_| d.values()[d.sample_index(rng.gen::<f64>())])
                        .collect(),
                    EhProcess::Markov {
                        initial,
                        transition,
                        ..
                    } => {
                        let mut out = Vec::with_capacity(self.horizon.eh_blocks);
                        let mut cur = sample_from(initial, rng.gen::<f64>());
                        out.push(states[cur]);
                        for _ in 1..self.horizon.eh_blocks {
                            cur = sample_from(&transition[cur], rng.gen::<f64>());
                            out.push(states[cur]);
                        }
                        out
                    }
                }
            }
        };
        let profile = EhProfile::new(self.horizon.blocks_per_eh, rates)?;

        let rows: Vec<Vec<f64>> = (0..self.horizon.eh_blocks)
            .map(|_| {
                (0..self.horizon.blocks_per_eh)
                    .map(|_| fading::gain_quantile(&self.fading, rng.gen::<f64>()))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        let trace = ChannelTrace::from_rows(rows)?;
        Ok((profile, trace))
    }
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

/// Policies the experiment harness can evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicySpec {
    /// Re-solve the full-knowledge problem on each realized trace.
    OfflineCase1,
    /// Backward-induction policy with causal CSIT and ESIT.
    DpCase2,
    /// Backward-induction policy with causal CSIT, re-solved per realized
    /// rate sequence (distinct sequences cached).
    DpCase3,
    /// Spend the whole battery every block.
    Myopic,
    /// Fixed power, clamped to the battery.
    ConstantPower(f64),
}

impl PolicySpec {
    pub fn name(&self) -> String {
        match self {
            PolicySpec::OfflineCase1 => "offline-case1".into(),
            PolicySpec::DpCase2 => "dp-case2".into(),
            PolicySpec::DpCase3 => "dp-case3".into(),
            PolicySpec::Myopic => "myopic".into(),
            PolicySpec::ConstantPower(p) => format!("constant:{p}"),
        }
    }

    /// Parse a policy name as accepted by the comparison CLI.
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "offline-case1" => Ok(PolicySpec::OfflineCase1),
            "dp-case2" => Ok(PolicySpec::DpCase2),
            "dp-case3" => Ok(PolicySpec::DpCase3),
            "myopic" => Ok(PolicySpec::Myopic),
            _ => {
                if let Some(rest) = name.strip_prefix("constant:") {
                    let p: f64 = rest
                        .parse()
                        .map_err(|_| Error::Config(format!("bad constant power in {name:?}")))?;
                    if p < 0.0 || !p.is_finite() {
                        return Err(Error::Config(format!("bad constant power in {name:?}")));
                    }
                    Ok(PolicySpec::ConstantPower(p))
                } else {
                    Err(Error::Config(format!("unknown policy {name:?}")))
                }
            }
        }
    }
}

/// A stochastic comparison scenario.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub horizon: Horizon,
    pub model: StochasticModel,
    pub utility: UtilitySpec,
    /// Battery grid resolution for the DP policies.
    pub battery_points: usize,
}

/// Per-policy summary of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub policy: String,
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
    pub seed: u64,
    /// Deterministic digest of the scenario configuration.
    pub scenario_digest: String,
}

/// Runs every policy on the same `trials` realizations of the model and
/// aggregates mean and standard error per policy. Trials are evaluated in
/// parallel; aggregation is in trial order, so reports are deterministic in
/// `(scenario, seed)`.
pub fn run_experiment(
    exp: &Experiment,
    policies: &[PolicySpec],
    trials: usize,
    seed: u64,
) -> Result<Vec<ExperimentReport>> {
    if policies.is_empty() {
        return Err(Error::Config("experiment needs at least one policy".into()));
    }
    if trials == 0 {
        return Err(Error::Config("experiment needs at least one trial".into()));
    }
    exp.utility.validate()?;
    if matches!(exp.utility, UtilitySpec::ErgodicThroughput { .. }) {
        return Err(Error::Config(
            "policy comparison needs a per-block utility (throughput or known-CSIT outage)".into(),
        ));
    }
    let digest = scenario_digest(exp);

    // common random numbers: one draw per trial, shared by every policy
    let draws: Vec<(Vec<usize>, Vec<usize>)> = (0..trials)
        .map(|trial| online::draw_realization(&exp.model, exp.horizon, seed, trial as u64))
        .collect();

    let b_max = exp.model.eh.max_rate() * exp.horizon.total_blocks() as f64;
    let grids = DpGrids::uniform(b_max, exp.battery_points.max(2))?;

    let case2 = if policies.contains(&PolicySpec::DpCase2) {
        Some(online::solve_dp_case2(
            &exp.model,
            exp.horizon,
            &exp.utility,
            &grids,
        )?)
    } else {
        None
    };
    let case3_cache: HashMap<Vec<usize>, DpPolicy> = if policies.contains(&PolicySpec::DpCase3) {
        let mut distinct: Vec<Vec<usize>> = draws.iter().map(|(eh, _)| eh.clone()).collect();
        distinct.sort();
        distinct.dedup();
        let eh_states = exp.model.eh.states().to_vec();
        let solved: Vec<(Vec<usize>, DpPolicy)> = distinct
            .into_par_iter()
            .map(|seq| {
                let rates: Vec<f64> = seq.iter().map(|&e| eh_states[e]).collect();
                let profile = EhProfile::new(exp.horizon.blocks_per_eh, rates)?;
                let pol =
                    online::solve_dp_case3(&profile, &exp.model.channel, &exp.utility, &grids)?;
                Ok((seq, pol))
            })
            .collect::<Result<_>>()?;
        solved.into_iter().collect()
    } else {
        HashMap::new()
    };

    let mut reports = Vec::with_capacity(policies.len());
    for policy in policies {
        let utilities: Vec<f64> = draws
            .par_iter()
            .map(|(eh_idx, gain_idx)| {
                evaluate_policy_on_draw(exp, policy, case2.as_ref(), &case3_cache, eh_idx, gain_idx)
            })
            .collect::<Result<_>>()?;
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
        reports.push(ExperimentReport {
            policy: policy.name(),
            mean,
            std_error,
            trials,
            seed,
            scenario_digest: digest.clone(),
        });
    }
    Ok(reports)
}

fn evaluate_policy_on_draw(
    exp: &Experiment,
    policy: &PolicySpec,
    case2: Option<&DpPolicy>,
    case3_cache: &HashMap<Vec<usize>, DpPolicy>,
    eh_idx: &[usize],
    gain_idx: &[usize],
) -> Result<f64> {
    match policy {
        PolicySpec::OfflineCase1 => {
            let (profile, trace) =
                online::realized_instance(&exp.model, exp.horizon, eh_idx, gain_idx)?;
            match &exp.utility {
                UtilitySpec::Throughput => {
                    Ok(offline::solve_throughput_case1(&profile, &trace)?.utility)
                }
                UtilitySpec::NonOutage { required_rate, .. } => {
                    let sol = offline::solve_outage_case1(&profile, &trace, *required_rate)?;
                    evaluate_utility(&sol.schedule, Some(&trace), &exp.utility)
                }
                UtilitySpec::ErgodicThroughput { .. } => unreachable!("rejected above"),
            }
        }
        PolicySpec::DpCase2 => {
            let pol = case2.expect("case-2 policy solved above");
            Ok(online::rollout(
                PolicyRef::Dp(pol),
                &exp.model,
                exp.horizon,
                &exp.utility,
                eh_idx,
                gain_idx,
            )?
            .utility)
        }
        PolicySpec::DpCase3 => {
            let pol = case3_cache.get(eh_idx).expect("case-3 policy cached above");
            Ok(online::rollout(
                PolicyRef::Dp(pol),
                &exp.model,
                exp.horizon,
                &exp.utility,
                eh_idx,
                gain_idx,
            )?
            .utility)
        }
        PolicySpec::Myopic => Ok(online::rollout(
            PolicyRef::Myopic,
            &exp.model,
            exp.horizon,
            &exp.utility,
            eh_idx,
            gain_idx,
        )?
        .utility),
        PolicySpec::ConstantPower(p) => Ok(online::rollout(
            PolicyRef::ConstantPower(*p),
            &exp.model,
            exp.horizon,
            &exp.utility,
            eh_idx,
            gain_idx,
        )?
        .utility),
    }
}

/// FNV-1a over a canonical rendering of the scenario; identifies reports,
/// nothing more.
fn scenario_digest(exp: &Experiment) -> String {
    let canon = format!(
        "h={}x{};eh={:?};ch={:?};u={:?};bp={}",
        exp.horizon.eh_blocks,
        exp.horizon.blocks_per_eh,
        exp.model.eh,
        exp.model.channel,
        exp.utility,
        exp.battery_points
    );
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in canon.as_bytes() {
        hash ^= *byte as u64;
        hash = hash.wrapping_mul(0x100_0000_01b3);
    }
    format!("{hash:016x}")
}
