//! Scenario file schema (JSON) and conversion into core types.
//!
//! Unknown keys are rejected everywhere; semantic checks (probability sums,
//! grid shapes, case/section consistency) run after parsing and report the
//! offending field by path.

use ehopt_core::model::{
    ChannelProcess, ChannelTrace, DiscreteDist, EhProcess, EhProfile, EsitKnowledge, Horizon,
    KnowledgeCase, OutageChannel, StochasticModel, UtilitySpec,
};
use ehopt_core::relay::{EnergySharing, RelayScenario, Traffic};
use ehopt_core::{Error, FadingModel};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub horizon: HorizonSec,
    #[serde(default)]
    pub eh: Option<EhSec>,
    #[serde(default)]
    pub channel: Option<ChannelSec>,
    #[serde(default)]
    pub utility: Option<UtilitySec>,
    #[serde(default)]
    pub knowledge: Option<KnowledgeSec>,
    #[serde(default)]
    pub relay: Option<RelaySec>,
    #[serde(default)]
    pub solver: SolverSec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HorizonSec {
    pub eh_blocks: usize,
    pub blocks_per_eh: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum EhSec {
    /// Known rate sequence, one entry per EH block.
    Rates(Vec<f64>),
    /// Random rates over a finite grid.
    Process(ProcessSec),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum ProcessSec {
    Iid(DistSec),
    Markov {
        states: Vec<f64>,
        transition: Vec<Vec<f64>>,
        initial: Vec<f64>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistSec {
    pub values: Vec<f64>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum ChannelSec {
    /// Realized gains, an `M x N` grid.
    Trace(Vec<Vec<f64>>),
    /// Parametric gain distribution (no CSIT).
    Fading(FadingSec),
    /// Finite gain grid for the causal-CSIT solvers.
    Gains(DistSec),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum FadingSec {
    Rayleigh { mean_gain: f64 },
    Weibull { shape: f64, scale: f64 },
    Nakagami { shape: f64, mean_gain: f64 },
    Rician { k_factor: f64, mean_gain: f64 },
    DoubleRayleigh { mean_gain: f64 },
    PointMass { gain: f64 },
}

impl FadingSec {
    pub fn to_model(&self) -> FadingModel {
        match *self {
            FadingSec::Rayleigh { mean_gain } => FadingModel::Rayleigh { mean_gain },
            FadingSec::Weibull { shape, scale } => FadingModel::Weibull { shape, scale },
            FadingSec::Nakagami { shape, mean_gain } => FadingModel::Nakagami { shape, mean_gain },
            FadingSec::Rician {
                k_factor,
                mean_gain,
            } => FadingModel::Rician {
                k_factor,
                mean_gain,
            },
            FadingSec::DoubleRayleigh { mean_gain } => FadingModel::DoubleRayleigh { mean_gain },
            FadingSec::PointMass { gain } => FadingModel::PointMass { gain },
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum UtilitySec {
    Throughput,
    Outage { required_rate: f64 },
    Ergodic,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnowledgeSec {
    pub case: u8,
    /// `"causal"` or `"noncausal"`; only meaningful for case 4.
    #[serde(default)]
    pub esit: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelaySec {
    pub source_rates: Vec<f64>,
    pub relay_rates: Vec<f64>,
    pub gain_sr: f64,
    pub gain_rd: f64,
    /// `"delay_constrained"` or `"delay_tolerant"`.
    pub traffic: String,
    #[serde(default)]
    pub sharing: Option<SharingSec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharingSec {
    pub alpha: f64,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SolverSec {
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub grid_step: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub battery_points: Option<usize>,
}

/// A fully validated scenario, ready to dispatch.
pub enum Prepared {
    SingleUser(SingleUser),
    Relay(RelayScenario),
}

pub struct SingleUser {
    pub horizon: Horizon,
    pub knowledge: KnowledgeCase,
    pub utility: UtilitySpec,
    pub profile: Option<EhProfile>,
    pub eh_process: Option<EhProcess>,
    pub trace: Option<ChannelTrace>,
    pub gain_dist: Option<DiscreteDist>,
}

impl SingleUser {
    /// Stochastic model for the DP/compare paths; errors when the scenario
    /// is not stochastic in the required dimension.
    pub fn stochastic_model(&self) -> Result<StochasticModel, Error> {
        let channel = ChannelProcess::Iid(self.gain_dist.clone().ok_or_else(|| {
            Error::Config("this solve needs channel.gains (a finite gain grid)".into())
        })?);
        let eh = match (&self.eh_process, &self.profile) {
            (Some(p), _) => p.clone(),
            (None, Some(profile)) => {
                // deterministic rates as a degenerate process: exact only
                // when all rates coincide; for case 2 prefer a process
                if profile.rates().windows(2).any(|w| w[0] != w[1]) {
                    return Err(Error::Config(
                        "case-2 comparison over deterministic unequal rates needs eh.process"
                            .into(),
                    ));
                }
                EhProcess::Iid(DiscreteDist::point(profile.rates()[0])?)
            }
            (None, None) => return Err(Error::Config("missing eh section".into())),
        };
        StochasticModel::new(eh, channel)
    }
}

pub fn parse_and_validate(text: &str) -> Result<(ScenarioFile, Prepared), String> {
    let file: ScenarioFile = serde_json::from_str(text)
        .map_err(|e| format!("line {}, column {}: {e}", e.line(), e.column()))?;
    let prepared = validate(&file).map_err(|e| e.to_string())?;
    Ok((file, prepared))
}

fn validate(file: &ScenarioFile) -> Result<Prepared, Error> {
    let horizon = Horizon::new(file.horizon.eh_blocks, file.horizon.blocks_per_eh)?;

    if let Some(relay) = &file.relay {
        if file.eh.is_some() || file.channel.is_some() || file.knowledge.is_some() {
            return Err(Error::Config(
                "relay scenarios carry their own profiles; drop eh/channel/knowledge".into(),
            ));
        }
        let traffic = match relay.traffic.as_str() {
            "delay_constrained" => Traffic::DelayConstrained,
            "delay_tolerant" => Traffic::DelayTolerant,
            other => {
                return Err(Error::Config(format!(
                    "relay.traffic: unknown value {other:?}"
                )))
            }
        };
        let sharing = match &relay.sharing {
            None => EnergySharing::Disabled,
            Some(s) => EnergySharing::SourceToRelay {
                efficiency: s.alpha,
            },
        };
        let sc = RelayScenario::new(
            EhProfile::new(horizon.blocks_per_eh, relay.source_rates.clone())?,
            EhProfile::new(horizon.blocks_per_eh, relay.relay_rates.clone())?,
            relay.gain_sr,
            relay.gain_rd,
            traffic,
            sharing,
        )?;
        if sc.source_profile.horizon() != horizon {
            return Err(Error::ShapeMismatch(
                "relay.source_rates length differs from horizon.eh_blocks".into(),
            ));
        }
        return Ok(Prepared::Relay(sc));
    }

    let knowledge = match &file.knowledge {
        None => return Err(Error::Config("missing knowledge section".into())),
        Some(k) => {
            let esit = match k.esit.as_deref() {
                None => None,
                Some("causal") => Some(EsitKnowledge::Causal),
                Some("noncausal") => Some(EsitKnowledge::NonCausal),
                Some(other) => {
                    return Err(Error::Config(format!(
                        "knowledge.esit: unknown value {other:?}"
                    )))
                }
            };
            match (k.case, esit) {
                (1, None) => KnowledgeCase::case1(),
                (2, None) => KnowledgeCase::case2(),
                (3, None) => KnowledgeCase::case3(),
                (4, Some(e)) => KnowledgeCase::case4(e),
                (4, None) => {
                    return Err(Error::Config(
                        "knowledge.case 4 needs esit: \"causal\" or \"noncausal\"".into(),
                    ))
                }
                (c, _) => {
                    return Err(Error::Config(format!(
                        "knowledge.case must be 1..=4 (esit only for case 4), got {c}"
                    )))
                }
            }
        }
    };

    let (profile, eh_process) = match &file.eh {
        None => return Err(Error::Config("missing eh section".into())),
        Some(EhSec::Rates(rates)) => {
            let p = EhProfile::new(horizon.blocks_per_eh, rates.clone())?;
            if p.horizon() != horizon {
                return Err(Error::ShapeMismatch(
                    "eh.rates length differs from horizon.eh_blocks".into(),
                ));
            }
            (Some(p), None)
        }
        Some(EhSec::Process(proc)) => {
            let process = match proc {
                ProcessSec::Iid(d) => {
                    EhProcess::Iid(DiscreteDist::new(d.values.clone(), d.probs.clone())?)
                }
                ProcessSec::Markov {
                    states,
                    transition,
                    initial,
                } => EhProcess::Markov {
                    states: states.clone(),
                    transition: transition.clone(),
                    initial: initial.clone(),
                },
            };
            process.validate()?;
            (None, Some(process))
        }
    };

    let (trace, fading, gain_dist) = match &file.channel {
        None => return Err(Error::Config("missing channel section".into())),
        Some(ChannelSec::Trace(rows)) => {
            let t = ChannelTrace::from_rows(rows.clone())?;
            if t.horizon() != horizon {
                return Err(Error::ShapeMismatch(
                    "channel.trace grid differs from horizon".into(),
                ));
            }
            (Some(t), None, None)
        }
        Some(ChannelSec::Fading(f)) => {
            let m = f.to_model();
            m.validate()?;
            (None, Some(m), None)
        }
        Some(ChannelSec::Gains(d)) => (
            None,
            None,
            Some(DiscreteDist::new(d.values.clone(), d.probs.clone())?),
        ),
    };

    let utility = match &file.utility {
        None => return Err(Error::Config("missing utility section".into())),
        Some(UtilitySec::Throughput) => UtilitySpec::Throughput,
        Some(UtilitySec::Outage { required_rate }) => {
            let channel = match (&fading, knowledge.case_number()) {
                (Some(f), 4) => OutageChannel::Statistical(*f),
                (_, 1..=3) => OutageChannel::KnownCsit,
                (None, 4) => {
                    return Err(Error::Config("case-4 outage needs channel.fading".into()))
                }
                _ => unreachable!(),
            };
            UtilitySpec::NonOutage {
                required_rate: *required_rate,
                channel,
            }
        }
        Some(UtilitySec::Ergodic) => {
            let f = fading
                .ok_or_else(|| Error::Config("ergodic utility needs channel.fading".into()))?;
            UtilitySpec::ErgodicThroughput { fading: f }
        }
    };
    utility.validate()?;

    // case/section consistency
    match knowledge.case_number() {
        1 => {
            if trace.is_none() {
                return Err(Error::Config(
                    "case 1 needs channel.trace (full CSIT)".into(),
                ));
            }
            if profile.is_none() {
                return Err(Error::Config("case 1 needs eh.rates (full ESIT)".into()));
            }
        }
        2 => {
            if gain_dist.is_none() {
                return Err(Error::Config(
                    "case 2 needs channel.gains (finite grid)".into(),
                ));
            }
            if eh_process.is_none() {
                return Err(Error::Config("case 2 needs eh.process".into()));
            }
        }
        3 => {
            if gain_dist.is_none() {
                return Err(Error::Config(
                    "case 3 needs channel.gains (finite grid)".into(),
                ));
            }
            if profile.is_none() {
                return Err(Error::Config(
                    "case 3 needs eh.rates (known sequence)".into(),
                ));
            }
        }
        4 => {
            if fading.is_none() {
                return Err(Error::Config("case 4 needs channel.fading".into()));
            }
            match knowledge.esit() {
                EsitKnowledge::NonCausal => {
                    if profile.is_none() {
                        return Err(Error::Config(
                            "case 4 with noncausal ESIT needs eh.rates".into(),
                        ));
                    }
                }
                EsitKnowledge::Causal => {
                    if eh_process.is_none() {
                        return Err(Error::Config(
                            "case 4 with causal ESIT needs eh.process".into(),
                        ));
                    }
                }
            }
        }
        _ => unreachable!(),
    }

    Ok(Prepared::SingleUser(SingleUser {
        horizon,
        knowledge,
        utility,
        profile,
        eh_process,
        trace,
        gain_dist,
    }))
}
