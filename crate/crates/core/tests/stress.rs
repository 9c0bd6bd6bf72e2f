//! Randomized stress sweeps over large instance counts. Ignored by
//! default; run with `cargo test -p ehopt-core --test stress -- --ignored`.
use ehopt_core::model::*;
use ehopt_core::offline::*;
use ehopt_core::oracle::*;
use ehopt_core::relay::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
#[ignore]
fn stress_dt_vs_dc_and_sharing_bounds() {
    let mut r = ChaCha8Rng::seed_from_u64(31337);
    let mut worst_gap = 0.0f64;
    for inst in 0..200_000 {
        let m = r.gen_range(1..=3);
        let n = r.gen_range(1..=2);
        let src: Vec<f64> = (0..m).map(|_| r.gen_range(0.0..2.0)).collect();
        let rel: Vec<f64> = (0..m).map(|_| r.gen_range(0.0..2.0)).collect();
        let g_sr = r.gen_range(0.1..3.0);
        let g_rd = r.gen_range(0.1..3.0);
        let base = RelayScenario::new(
            EhProfile::new(n, src).unwrap(),
            EhProfile::new(n, rel).unwrap(),
            g_sr,
            g_rd,
            Traffic::DelayConstrained,
            EnergySharing::Disabled,
        )
        .unwrap();
        let dc = solve_relay_delay_constrained(&base).unwrap();
        let dt = solve_relay_delay_tolerant(&base).unwrap();
        let gap = dc.throughput - dt.throughput;
        if gap > worst_gap {
            worst_gap = gap;
            eprintln!(
                "inst {inst}: DT {} < DC {} gap {gap}",
                dt.throughput, dc.throughput
            );
        }
        assert!(
            dt.throughput >= dc.throughput - 1e-7,
            "instance {inst} violated DT >= DC"
        );
    }
    eprintln!("worst DC-DT gap over 200k instances: {worst_gap}");
}

#[test]
#[ignore]
fn stress_sharing_between_dc_and_pooled_bound() {
    let mut r = ChaCha8Rng::seed_from_u64(424242);
    for inst in 0..2000 {
        let m = r.gen_range(1..=2);
        let n = r.gen_range(1..=2);
        let src: Vec<f64> = (0..m).map(|_| r.gen_range(0.0..2.0)).collect();
        let rel: Vec<f64> = (0..m).map(|_| r.gen_range(0.0..2.0)).collect();
        let g_sr = r.gen_range(0.2..2.0);
        let g_rd = r.gen_range(0.2..2.0);
        let alpha = r.gen_range(0.05..1.0);
        let sc = RelayScenario::new(
            EhProfile::new(n, src).unwrap(),
            EhProfile::new(n, rel).unwrap(),
            g_sr,
            g_rd,
            Traffic::DelayConstrained,
            EnergySharing::SourceToRelay { efficiency: alpha },
        )
        .unwrap();
        let shared = solve_relay_energy_sharing(&sc).unwrap();
        let mut plain = sc.clone();
        plain.sharing = EnergySharing::Disabled;
        let dc = solve_relay_delay_constrained(&plain).unwrap();
        assert!(
            shared.throughput >= dc.throughput - 1e-9,
            "inst {inst}: below DC"
        );

        // pooled upper bound: transfers free and unbounded in time
        let a_s = sc.source_profile.cumulative_harvest();
        let a_r = sc.relay_profile.cumulative_harvest();
        let t_total = a_s.len();
        let caps: Vec<f64> = (0..t_total)
            .map(|t| (g_sr * a_s[t]).min(g_rd * (a_r[t] + alpha * a_s[t])))
            .collect();
        // single-user grid oracle on the pooled caps as the bound
        let rates: Vec<f64> = {
            let mut prev = 0.0;
            caps.iter()
                .map(|&c| {
                    let d = (c - prev).max(0.0);
                    prev = c;
                    d
                })
                .collect()
        };
        let pool = EhProfile::new(1, rates).unwrap();
        let trace = ChannelTrace::constant(pool.horizon(), 1.0).unwrap();
        let ub = solve_throughput_case1(&pool, &trace).unwrap().utility;
        assert!(
            shared.throughput <= ub + 1e-6,
            "inst {inst}: {} above pooled bound {ub}",
            shared.throughput
        );
    }
}

#[test]
#[ignore]
fn stress_staircase_vs_lattice_oracle() {
    let mut r = ChaCha8Rng::seed_from_u64(777);
    for inst in 0..300 {
        let m = r.gen_range(1..=3);
        let n = r.gen_range(1..=2);
        // mixed zero rates and zero gains
        let rates: Vec<f64> = (0..m)
            .map(|_| {
                if r.gen_bool(0.25) {
                    0.0
                } else {
                    r.gen_range(0..400) as f64 * 0.001
                }
            })
            .collect();
        let profile = EhProfile::new(n, rates).unwrap();
        let rows: Vec<Vec<f64>> = (0..m)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        if r.gen_bool(0.2) {
                            0.0
                        } else {
                            r.gen_range(0.05..3.0)
                        }
                    })
                    .collect()
            })
            .collect();
        let trace = ChannelTrace::from_rows(rows).unwrap();
        let sol = solve_throughput_case1(&profile, &trace).unwrap();
        let orc = brute_force_offline(
            &profile,
            Some(&trace),
            &UtilitySpec::Throughput,
            &GridSpec::new(0.001),
        )
        .unwrap();
        assert!(
            sol.utility >= orc.utility - 1e-9 && sol.utility <= orc.utility + 2e-3,
            "inst {inst}: solver {} oracle {}",
            sol.utility,
            orc.utility
        );
        assert!(
            sol.schedule.check_feasible(&profile, 1e-9).unwrap(),
            "inst {inst} infeasible"
        );
    }
}
