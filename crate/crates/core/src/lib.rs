//! Power-allocation optimization for energy-harvesting transmitters.
//!
//! An energy-harvesting transmitter may spend, by any point in time, at most
//! the energy it has accumulated by then. Under that cumulative constraint
//! this crate solves throughput maximization and outage-probability
//! minimization over a finite horizon of `M` harvesting blocks, each split
//! into `N` unit-time communication blocks, for the four standard patterns of
//! channel/energy knowledge at the transmitter:
//!
//! * full non-causal knowledge — staircase water-filling ([`offline`]);
//! * causal knowledge — finite-horizon dynamic programming ([`online`]);
//! * statistical channel knowledge only — ergodic-rate allocation and
//!   save-then-transmit outage schedules ([`offline`], [`fading`]);
//! * three-node decode-and-forward relays, with and without one-way energy
//!   transfer between the nodes ([`relay`]).
//!
//! Every solver is paired with an independent brute-force reference in
//! [`oracle`], and [`sim`] provides reproducible trace generation and Monte
//! Carlo experiment plumbing.

pub mod error;
pub mod fading;
pub mod model;
pub mod numeric;
pub mod offline;
pub mod online;
pub mod oracle;
pub mod relay;
pub mod sim;

pub use error::{Error, Result};
pub use fading::{FadingModel, OutageFn};
pub use model::{
    ChannelProcess, ChannelTrace, DiscreteDist, EhProcess, EhProfile, Horizon, KnowledgeCase,
    PowerSchedule, StochasticModel, UtilitySpec,
};
pub use offline::{
    solve_ergodic_case4, solve_outage_case1, solve_outage_case4_noncausal, solve_throughput_case1,
    waterfill_budget, WaterLevels,
};
pub use online::{
    simulate_policy, solve_dp_case2, solve_dp_case3, solve_dp_outage_case4_causal, DpGrids,
    DpPolicy, EhBlockPolicy, PolicyRef,
};
pub use relay::{
    solve_relay_delay_constrained, solve_relay_delay_tolerant, solve_relay_energy_sharing,
    EnergySharing, RelayScenario, RelaySolution, Traffic,
};
