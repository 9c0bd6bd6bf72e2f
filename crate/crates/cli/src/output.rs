//! CSV writers. Floats are rendered with Rust's shortest-round-trip
//! formatting: locale-independent, '.' decimal separator, and re-parsing
//! reproduces the exact f64, which is what the round-trip contract needs.

use ehopt_core::model::{ChannelTrace, EhProfile, PowerSchedule};
use std::fmt::Write as _;

pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Per-block utility for the schedule listing.
pub type BlockUtility<'a> = dyn Fn(usize, f64) -> f64 + 'a;

/// Renders `schedule.csv`: one row per communication block in time order.
/// `gain_at` yields the realized gain when one exists.
pub fn schedule_csv(
    profile: &EhProfile,
    schedule: &PowerSchedule,
    trace: Option<&ChannelTrace>,
    utility_of: &BlockUtility<'_>,
) -> String {
    let mut out = String::from("m,n,gain,power,utility,cumulative_consumed,cumulative_harvested\n");
    let harvest = profile.cumulative_harvest();
    let n = profile.blocks_per_eh();
    let mut consumed = 0.0;
    for (t, &harvested) in harvest.iter().enumerate() {
        let p = schedule.power_at(t);
        consumed += p;
        let gain = trace.map(|tr| fmt_f64(tr.gain_at(t))).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            t / n + 1,
            t % n + 1,
            gain,
            fmt_f64(p),
            fmt_f64(utility_of(t, p)),
            fmt_f64(consumed),
            fmt_f64(harvested),
        );
    }
    out
}

/// Relay variant: long format with a leading node column.
pub fn relay_schedule_csv(
    nodes: &[(&str, &EhProfile, &PowerSchedule, f64)], // (name, profile, schedule, hop gain)
) -> String {
    let mut out =
        String::from("node,m,n,gain,power,utility,cumulative_consumed,cumulative_harvested\n");
    for (name, profile, schedule, gain) in nodes {
        let harvest = profile.cumulative_harvest();
        let n = profile.blocks_per_eh();
        let mut consumed = 0.0;
        for (t, &harvested) in harvest.iter().enumerate() {
            let p = schedule.power_at(t);
            consumed += p;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                name,
                t / n + 1,
                t % n + 1,
                fmt_f64(*gain),
                fmt_f64(p),
                fmt_f64((1.0 + gain * p).log2()),
                fmt_f64(consumed),
                fmt_f64(harvested),
            );
        }
    }
    out
}

pub fn transfers_csv(horizon_n: usize, transfers: &[f64]) -> String {
    let mut out = String::from("m,n,transfer\n");
    for (t, &x) in transfers.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{}",
            t / horizon_n + 1,
            t % horizon_n + 1,
            fmt_f64(x)
        );
    }
    out
}

pub fn summary_csv(solver: &str, total_utility: f64, residual: f64, wall_time_s: f64) -> String {
    format!(
        "solver,total_utility,residual,wall_time_s\n{},{},{},{}\n",
        solver,
        fmt_f64(total_utility),
        fmt_f64(residual),
        fmt_f64(wall_time_s)
    )
}

pub fn compare_csv(rows: &[(String, f64, f64, usize, u64)]) -> String {
    let mut out = String::from("policy,mean,stderr,trials,seed\n");
    for (policy, mean, stderr, trials, seed) in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            policy,
            fmt_f64(*mean),
            fmt_f64(*stderr),
            trials,
            seed
        );
    }
    out
}

pub fn oracle_csv(solver: &str, solver_value: f64, oracle_value: f64, grid_step: f64) -> String {
    format!(
        "solver,solver_value,oracle_value,delta,grid_step\n{},{},{},{},{}\n",
        solver,
        fmt_f64(solver_value),
        fmt_f64(oracle_value),
        fmt_f64(solver_value - oracle_value),
        fmt_f64(grid_step)
    )
}
