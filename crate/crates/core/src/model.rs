//! Domain types shared by every solver: the time-block grid, harvesting
//! profiles, channel traces, power schedules, utility definitions, and the
//! knowledge cases, plus the feasibility and utility-evaluation operations.
//!
//! Time is a grid of `M` harvesting blocks, each split into `N` unit-time
//! communication blocks. Block `(n, m)` (1-based, `n` inside block `m`) is
//! flat index `(m - 1) * N + (n - 1)` in time order. Since communication
//! blocks have unit duration, per-block power and per-block energy coincide
//! numerically.

use crate::error::{Error, Result};
use crate::fading::{self, FadingModel};

/// Default absolute slack allowed when checking cumulative energy
/// feasibility.
pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-9;

/// Horizon of the block grid: `M` harvesting blocks of `N` communication
/// blocks each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Horizon {
    pub eh_blocks: usize,
    pub blocks_per_eh: usize,
}

impl Horizon {
    pub fn new(eh_blocks: usize, blocks_per_eh: usize) -> Result<Self> {
        if eh_blocks == 0 || blocks_per_eh == 0 {
            return Err(Error::Config(format!(
                "horizon must have at least one block: M={eh_blocks}, N={blocks_per_eh}"
            )));
        }
        Ok(Horizon {
            eh_blocks,
            blocks_per_eh,
        })
    }

    /// Total number of communication blocks `M * N`.
    pub fn total_blocks(&self) -> usize {
        self.eh_blocks * self.blocks_per_eh
    }
}

/// Energy-harvesting profile: horizon plus the per-EH-block harvesting rate,
/// in energy units per unit-time communication block.
#[derive(Debug, Clone, PartialEq)]
pub struct EhProfile {
    horizon: Horizon,
    rates: Vec<f64>,
}

impl EhProfile {
    pub fn new(blocks_per_eh: usize, rates: Vec<f64>) -> Result<Self> {
        let horizon = Horizon::new(rates.len().max(1), blocks_per_eh)?;
        if rates.is_empty() {
            return Err(Error::Config(
                "harvesting profile needs at least one EH block".into(),
            ));
        }
        if rates.iter().any(|r| *r < 0.0 || !r.is_finite()) {
            return Err(Error::Config(format!(
                "harvesting rates must be finite and >= 0: {rates:?}"
            )));
        }
        Ok(EhProfile { horizon, rates })
    }

    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    /// `M`, the number of EH blocks.
    pub fn num_eh_blocks(&self) -> usize {
        self.horizon.eh_blocks
    }

    /// `N`, communication blocks per EH block.
    pub fn blocks_per_eh(&self) -> usize {
        self.horizon.blocks_per_eh
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    /// Rate of the EH block containing flat block `t` (0-based).
    pub fn rate_at(&self, t: usize) -> f64 {
        self.rates[t / self.horizon.blocks_per_eh]
    }

    /// Energy accumulated by the end of communication block `(n, m)`
    /// (1-based): `N * sum_{j<m} E(j) + n * E(m)`.
    pub fn harvested_by(&self, n: usize, m: usize) -> Result<f64> {
        let (big_n, big_m) = (self.horizon.blocks_per_eh, self.horizon.eh_blocks);
        if n == 0 || n > big_n || m == 0 || m > big_m {
            return Err(Error::IndexOutOfRange(format!(
                "(n, m) = ({n}, {m}) outside 1..={big_n} x 1..={big_m}"
            )));
        }
        let prior: f64 = self.rates[..m - 1].iter().sum::<f64>() * big_n as f64;
        Ok(prior + n as f64 * self.rates[m - 1])
    }

    /// Cumulative harvested energy after each flat block, length `M * N`.
    pub fn cumulative_harvest(&self) -> Vec<f64> {
        let n = self.horizon.blocks_per_eh;
        let mut out = Vec::with_capacity(self.horizon.total_blocks());
        let mut acc = 0.0;
        for &rate in &self.rates {
            for _ in 0..n {
                acc += rate;
                out.push(acc);
            }
        }
        out
    }

    /// Total energy harvested over the horizon.
    pub fn total_harvest(&self) -> f64 {
        self.rates.iter().sum::<f64>() * self.horizon.blocks_per_eh as f64
    }
}

/// Grid of realized channel power gains, one per communication block.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTrace {
    horizon: Horizon,
    gains: Vec<f64>, // flat, time order
}

impl ChannelTrace {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::Config(
                "channel trace must be a non-empty M x N grid".into(),
            ));
        }
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch("ragged channel trace rows".into()));
        }
        let horizon = Horizon::new(rows.len(), n)?;
        let gains: Vec<f64> = rows.into_iter().flatten().collect();
        if gains.iter().any(|g| *g < 0.0 || !g.is_finite()) {
            return Err(Error::Config(
                "channel gains must be finite and >= 0".into(),
            ));
        }
        Ok(ChannelTrace { horizon, gains })
    }

    /// Constant-gain trace (AWGN-style).
    pub fn constant(horizon: Horizon, gain: f64) -> Result<Self> {
        ChannelTrace::from_rows(vec![vec![gain; horizon.blocks_per_eh]; horizon.eh_blocks])
    }

    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    /// Gain at flat block `t` (0-based time order).
    pub fn gain_at(&self, t: usize) -> f64 {
        self.gains[t]
    }

    pub fn gains_flat(&self) -> &[f64] {
        &self.gains
    }
}

/// Power allocation over the block grid; the decision variable of every
/// solver in this crate.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSchedule {
    horizon: Horizon,
    powers: Vec<f64>, // flat, time order
}

impl PowerSchedule {
    pub fn from_flat(horizon: Horizon, powers: Vec<f64>) -> Result<Self> {
        if powers.len() != horizon.total_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "{} powers for a {} x {} grid",
                powers.len(),
                horizon.eh_blocks,
                horizon.blocks_per_eh
            )));
        }
        if powers.iter().any(|p| *p < 0.0 || !p.is_finite()) {
            return Err(Error::Config("powers must be finite and >= 0".into()));
        }
        Ok(PowerSchedule { horizon, powers })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::Config(
                "power schedule must be a non-empty M x N grid".into(),
            ));
        }
        let horizon = Horizon::new(rows.len(), rows[0].len())?;
        if rows.iter().any(|r| r.len() != horizon.blocks_per_eh) {
            return Err(Error::ShapeMismatch("ragged power schedule rows".into()));
        }
        PowerSchedule::from_flat(horizon, rows.into_iter().flatten().collect())
    }

    pub fn zero(horizon: Horizon) -> Self {
        PowerSchedule {
            horizon,
            powers: vec![0.0; horizon.total_blocks()],
        }
    }

    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    pub fn power_at(&self, t: usize) -> f64 {
        self.powers[t]
    }

    pub fn powers_flat(&self) -> &[f64] {
        &self.powers
    }

    pub fn total_consumption(&self) -> f64 {
        self.powers.iter().sum()
    }

    /// True iff cumulative consumption never exceeds cumulative harvest by
    /// more than `tol`, checked at every communication block.
    pub fn check_feasible(&self, profile: &EhProfile, tol: f64) -> Result<bool> {
        if self.horizon != profile.horizon() {
            return Err(Error::ShapeMismatch(format!(
                "schedule grid {:?} vs profile grid {:?}",
                self.horizon,
                profile.horizon()
            )));
        }
        let harvest = profile.cumulative_harvest();
        let mut spent = 0.0;
        for (t, &p) in self.powers.iter().enumerate() {
            spent += p;
            if spent > harvest[t] + tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Which utility the optimizer maximizes.
#[derive(Debug, Clone, PartialEq)]
pub enum UtilitySpec {
    /// Sum of Shannon rates `log2(1 + h P)`; needs a realized trace.
    Throughput,
    /// Sum of per-block non-outage probabilities `1 - Q(P)` for a fixed
    /// required rate.
    NonOutage {
        required_rate: f64,
        channel: OutageChannel,
    },
    /// Sum of expected rates `E[log2(1 + h P)]` under the given fading.
    ErgodicThroughput { fading: FadingModel },
}

/// Channel knowledge backing a non-outage utility.
#[derive(Debug, Clone, PartialEq)]
pub enum OutageChannel {
    /// Realized gains are known: non-outage is the indicator
    /// `log2(1 + h P) >= r` per block.
    KnownCsit,
    /// Gains unknown; non-outage is `1 - Q(P)` under the fading model.
    Statistical(FadingModel),
}

impl UtilitySpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            UtilitySpec::Throughput => Ok(()),
            UtilitySpec::NonOutage {
                required_rate,
                channel,
            } => {
                if *required_rate <= 0.0 {
                    return Err(Error::Config(format!(
                        "required rate must be positive, got {required_rate}"
                    )));
                }
                if let OutageChannel::Statistical(f) = channel {
                    f.validate()?;
                }
                Ok(())
            }
            UtilitySpec::ErgodicThroughput { fading } => fading.validate(),
        }
    }
}

/// Total utility of a schedule under `spec`.
///
/// `Throughput` and known-CSIT non-outage need the realized `trace`;
/// statistical non-outage and ergodic throughput evaluate against the fading
/// model carried inside the spec.
pub fn evaluate_utility(
    schedule: &PowerSchedule,
    trace: Option<&ChannelTrace>,
    spec: &UtilitySpec,
) -> Result<f64> {
    spec.validate()?;
    let need_trace = matches!(
        spec,
        UtilitySpec::Throughput
            | UtilitySpec::NonOutage {
                channel: OutageChannel::KnownCsit,
                ..
            }
    );
    if need_trace {
        let trace = trace
            .ok_or_else(|| Error::Config("this utility needs a realized channel trace".into()))?;
        if trace.horizon() != schedule.horizon() {
            return Err(Error::ShapeMismatch(
                "trace grid differs from schedule grid".into(),
            ));
        }
    }
    let total = match spec {
        UtilitySpec::Throughput => {
            let trace = trace.unwrap();
            schedule
                .powers_flat()
                .iter()
                .zip(trace.gains_flat())
                .map(|(&p, &h)| (1.0 + h * p).log2())
                .sum()
        }
        UtilitySpec::NonOutage {
            required_rate,
            channel: OutageChannel::KnownCsit,
        } => {
            let trace = trace.unwrap();
            schedule
                .powers_flat()
                .iter()
                .zip(trace.gains_flat())
                .map(|(&p, &h)| {
                    if (1.0 + h * p).log2() >= *required_rate - 1e-12 {
                        1.0
                    } else {
                        0.0
                    }
                })
                .sum()
        }
        UtilitySpec::NonOutage {
            required_rate,
            channel: OutageChannel::Statistical(f),
        } => {
            let mut acc = 0.0;
            for &p in schedule.powers_flat() {
                acc += 1.0 - fading::outage_probability(f, *required_rate, p)?;
            }
            acc
        }
        UtilitySpec::ErgodicThroughput { fading } => {
            // ergodic rate is a pure function of power; cache repeated levels
            let mut cache: Vec<(f64, f64)> = Vec::new();
            let mut acc = 0.0;
            for &p in schedule.powers_flat() {
                if let Some(&(_, v)) = cache.iter().find(|(q, _)| (*q - p).abs() < 1e-15) {
                    acc += v;
                } else {
                    let v = fading::ergodic_rate(fading, p)?;
                    cache.push((p, v));
                    acc += v;
                }
            }
            acc
        }
    };
    Ok(total)
}

/// Channel-knowledge availability at the transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsitKnowledge {
    NonCausal,
    Causal,
    Absent,
}

/// Energy-knowledge availability at the transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsitKnowledge {
    NonCausal,
    Causal,
}

/// One of the four supported CSIT/ESIT combinations. Constructors restrict
/// to exactly those; other mixes are not representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnowledgeCase {
    csit: CsitKnowledge,
    esit: EsitKnowledge,
}

impl KnowledgeCase {
    /// Non-causal CSIT and ESIT: the deterministic upper-bound case.
    pub fn case1() -> Self {
        KnowledgeCase {
            csit: CsitKnowledge::NonCausal,
            esit: EsitKnowledge::NonCausal,
        }
    }

    /// Causal CSIT and ESIT plus statistics of the future.
    pub fn case2() -> Self {
        KnowledgeCase {
            csit: CsitKnowledge::Causal,
            esit: EsitKnowledge::Causal,
        }
    }

    /// Causal CSIT, non-causal ESIT.
    pub fn case3() -> Self {
        KnowledgeCase {
            csit: CsitKnowledge::Causal,
            esit: EsitKnowledge::NonCausal,
        }
    }

    /// No CSIT (statistics only); ESIT causal or non-causal.
    pub fn case4(esit: EsitKnowledge) -> Self {
        KnowledgeCase {
            csit: CsitKnowledge::Absent,
            esit,
        }
    }

    pub fn csit(&self) -> CsitKnowledge {
        self.csit
    }

    pub fn esit(&self) -> EsitKnowledge {
        self.esit
    }

    /// 1..=4 label of the case.
    pub fn case_number(&self) -> u8 {
        match (self.csit, self.esit) {
            (CsitKnowledge::NonCausal, _) => 1,
            (CsitKnowledge::Causal, EsitKnowledge::Causal) => 2,
            (CsitKnowledge::Causal, EsitKnowledge::NonCausal) => 3,
            (CsitKnowledge::Absent, _) => 4,
        }
    }
}

/// Snap a continuous battery level onto a sorted grid: the matching point,
/// the nearest point within absolute 1e-9, otherwise the largest grid point
/// below. This is part of the discretized problem definition shared by the
/// DP solvers and the policy-enumeration oracle — flooring keeps snapped
/// states feasible in the continuum.
pub fn snap_to_grid(grid: &[f64], x: f64) -> usize {
    match grid.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
        Ok(i) => i,
        Err(ins) => {
            if ins < grid.len() && (grid[ins] - x).abs() <= 1e-9 {
                ins
            } else if ins > 0 {
                ins - 1
            } else {
                0
            }
        }
    }
}

/// Finite discrete distribution with strictly sorted support.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDist {
    values: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteDist {
    pub fn new(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() != probs.len() {
            return Err(Error::Config(
                "distribution support and probabilities must match".into(),
            ));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "distribution support must be strictly sorted".into(),
            ));
        }
        if values.iter().any(|v| *v < 0.0 || !v.is_finite()) {
            return Err(Error::Config(
                "support values must be finite and >= 0".into(),
            ));
        }
        if probs.iter().any(|p| *p < 0.0) {
            return Err(Error::Config("probabilities must be >= 0".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(DiscreteDist { values, probs })
    }

    pub fn point(value: f64) -> Result<Self> {
        if value < 0.0 || !value.is_finite() {
            return Err(Error::Config(format!("invalid point-mass value {value}")));
        }
        Ok(DiscreteDist {
            values: vec![value],
            probs: vec![1.0],
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index sample by inverse CDF over the support.
    pub fn sample_index(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.values.len() - 1
    }
}

/// Energy-arrival process over a finite rate grid.
#[derive(Debug, Clone, PartialEq)]
pub enum EhProcess {
    Iid(DiscreteDist),
    Markov {
        states: Vec<f64>,
        transition: Vec<Vec<f64>>,
        initial: Vec<f64>,
    },
}

impl EhProcess {
    pub fn validate(&self) -> Result<()> {
        match self {
            EhProcess::Iid(d) => {
                let _ = d; // constructed validated
                Ok(())
            }
            EhProcess::Markov {
                states,
                transition,
                initial,
            } => {
                if states.is_empty() {
                    return Err(Error::Config(
                        "Markov EH process needs at least one state".into(),
                    ));
                }
                if states.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Config(
                        "Markov state grid must be strictly sorted".into(),
                    ));
                }
                if transition.len() != states.len() || initial.len() != states.len() {
                    return Err(Error::ShapeMismatch("Markov matrix/initial size".into()));
                }
                for row in transition.iter().chain(std::iter::once(initial)) {
                    if row.len() != states.len() {
                        return Err(Error::ShapeMismatch("Markov row size".into()));
                    }
                    let s: f64 = row.iter().sum();
                    if (s - 1.0).abs() > 1e-12 || row.iter().any(|p| *p < 0.0) {
                        return Err(Error::Config(format!("Markov row sums to {s}")));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn states(&self) -> &[f64] {
        match self {
            EhProcess::Iid(d) => d.values(),
            EhProcess::Markov { states, .. } => states,
        }
    }

    pub fn max_rate(&self) -> f64 {
        self.states().iter().cloned().fold(0.0, f64::max)
    }

    /// Distribution of the first EH rate.
    pub fn initial_probs(&self) -> Vec<f64> {
        match self {
            EhProcess::Iid(d) => d.probs().to_vec(),
            EhProcess::Markov { initial, .. } => initial.clone(),
        }
    }

    /// Distribution of the next EH rate given the current state index.
    pub fn next_probs(&self, current: usize) -> Vec<f64> {
        match self {
            EhProcess::Iid(d) => d.probs().to_vec(),
            EhProcess::Markov { transition, .. } => transition[current].clone(),
        }
    }
}

/// Channel process for causal-CSIT solvers: i.i.d. gains on a finite grid.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelProcess {
    Iid(DiscreteDist),
}

impl ChannelProcess {
    pub fn dist(&self) -> &DiscreteDist {
        match self {
            ChannelProcess::Iid(d) => d,
        }
    }
}

/// Joint stochastic description used by the causal-information solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticModel {
    pub eh: EhProcess,
    pub channel: ChannelProcess,
}

impl StochasticModel {
    pub fn new(eh: EhProcess, channel: ChannelProcess) -> Result<Self> {
        eh.validate()?;
        Ok(StochasticModel { eh, channel })
    }
}
