//! Acceptance suite: one test per criterion, each printing a PASS line when
//! it holds. Criterion 11 (byte-identical CSV output) lives in the CLI
//! crate's acceptance target, next to the code that writes the files.
//!
//! Random instances are drawn from fixed-seed ChaCha streams, so every run
//! checks the same instances. Harvest rates are drawn as multiples of the
//! oracle grid step wherever a grid oracle is compared, which keeps the
//! oracle's cap flooring lossless and the comparison sharp.

use ehopt_core::fading::{ergodic_rate, gain_quantile, outage_probability, FadingModel, OutageFn};
use ehopt_core::model::{
    ChannelProcess, ChannelTrace, DiscreteDist, EhProcess, EhProfile, Horizon, OutageChannel,
    StochasticModel, UtilitySpec,
};
use ehopt_core::offline::{
    solve_outage_case1, solve_outage_case4_noncausal, solve_throughput_case1,
};
use ehopt_core::online::{solve_dp_case2, DpGrids};
use ehopt_core::oracle::{
    brute_force_offline, brute_force_policies, brute_force_serve_sets,
    relay_oracle_delay_constrained, relay_oracle_energy_sharing, relay_oracle_forwarding_stage,
    GridSpec,
};
use ehopt_core::relay::{
    solve_relay_delay_constrained, solve_relay_delay_tolerant, solve_relay_energy_sharing,
    solve_relay_energy_sharing_opts, EnergySharing, RelayScenario, SharingOptions, Traffic,
};
use ehopt_core::sim::{run_experiment, Experiment, PolicySpec, TraceGenerator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rates as multiples of `step`, at most `max_units` units each.
fn random_rates(r: &mut ChaCha8Rng, m: usize, step: f64, max_units: u64) -> Vec<f64> {
    (0..m)
        .map(|_| r.gen_range(0..=max_units) as f64 * step)
        .collect()
}

fn random_rayleigh_trace(r: &mut ChaCha8Rng, horizon: Horizon) -> ChannelTrace {
    let fading = FadingModel::Rayleigh { mean_gain: 1.0 };
    let rows: Vec<Vec<f64>> = (0..horizon.eh_blocks)
        .map(|_| {
            (0..horizon.blocks_per_eh)
                .map(|_| gain_quantile(&fading, r.gen_range(0.0..1.0)).unwrap())
                .collect()
        })
        .collect();
    ChannelTrace::from_rows(rows).unwrap()
}

#[test]
fn criterion_01_staircase_structure() {
    let started = Instant::now();
    let mut r = rng(101);
    for _ in 0..100 {
        let m = r.gen_range(1..=5);
        let n = r.gen_range(1..=4);
        let rates: Vec<f64> = (0..m).map(|_| r.gen_range(0.0..2.0)).collect();
        let profile = EhProfile::new(n, rates).unwrap();
        let gain = r.gen_range(0.2..2.0);
        let trace = ChannelTrace::constant(profile.horizon(), gain).unwrap();
        let sol = solve_throughput_case1(&profile, &trace).unwrap();
        let flat = sol.schedule.powers_flat();
        // constant within EH blocks
        for block in flat.chunks(n) {
            for w in block.windows(2) {
                assert!(
                    (w[0] - w[1]).abs() <= 1e-7,
                    "power varies inside an EH block"
                );
            }
        }
        // non-decreasing across blocks
        for w in flat.windows(2) {
            assert!(w[1] + 1e-7 >= w[0], "power decreased over time");
        }
        assert!(sol.schedule.check_feasible(&profile, 1e-9).unwrap());
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget 1 s");
    println!("ACCEPTANCE 1 staircase structure (100 AWGN instances, {elapsed:?}): PASS");
}

/// Criteria 2 and 3 share the same instance set; both checks run here.
#[test]
fn criterion_02_03_throughput_oracle_and_water_level_law() {
    let started = Instant::now();
    let mut r = rng(202);
    let grid = GridSpec::new(0.001);
    for inst in 0..50 {
        let m = r.gen_range(1..=3);
        let n = r.gen_range(1..=2);
        let rates = random_rates(&mut r, m, 0.001, 500);
        let profile = EhProfile::new(n, rates).unwrap();
        let trace = random_rayleigh_trace(&mut r, profile.horizon());
        let sol = solve_throughput_case1(&profile, &trace).unwrap();
        let orc =
            brute_force_offline(&profile, Some(&trace), &UtilitySpec::Throughput, &grid).unwrap();
        assert!(
            (sol.utility - orc.utility).abs() <= 1e-3,
            "instance {inst}: solver {} vs oracle {}",
            sol.utility,
            orc.utility
        );

        // criterion 3 on the same instance: level monotonicity + changes
        // only at tight constraints
        let levels = sol.levels.levels_flat();
        let harvest = profile.cumulative_harvest();
        let mut consumed = 0.0;
        for t in 0..levels.len() {
            consumed += sol.schedule.power_at(t);
            if t + 1 < levels.len() {
                assert!(levels[t + 1] + 1e-9 >= levels[t], "water level decreased");
                if (levels[t + 1] - levels[t]).abs() > 1e-9 {
                    assert!(
                        harvest[t] - consumed <= 1e-6,
                        "instance {inst}: level changed at t={t} with slack {}",
                        harvest[t] - consumed
                    );
                }
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 300.0,
        "took {elapsed:?}, budget 5 min"
    );
    println!("ACCEPTANCE 2 throughput oracle equivalence (50 instances, {elapsed:?}): PASS");
    println!("ACCEPTANCE 3 water-level law (same 50 instances): PASS");
}

#[test]
fn criterion_04_critical_point_analytic() {
    // analytic derivation, independent of the bisection path: for Rayleigh
    // with mean mu, Q(P) = 1 - exp(-c/(mu P)) and
    // Q''(P) = c e^{-c/(mu P)} (2 P - c/mu) / (mu P^4), vanishing at c/(2 mu)
    for rate in [1.0f64, 2.0] {
        let analytic = (rate.exp2() - 1.0) / 2.0;
        let ofn = OutageFn::new(FadingModel::Rayleigh { mean_gain: 1.0 }, rate).unwrap();
        assert!(
            (ofn.critical_power() - analytic).abs() <= 1e-6,
            "r={rate}: bisection {} vs analytic {analytic}",
            ofn.critical_power()
        );
    }
    println!("ACCEPTANCE 4 critical point (Rayleigh r in {{1,2}} vs analytic): PASS");
}

#[test]
fn criterion_05_save_then_transmit() {
    let started = Instant::now();
    let mut r = rng(505);
    let grid = GridSpec::new(0.001);
    for inst in 0..50 {
        // Rayleigh instances with r in [0.5, 2] all carry a positive
        // critical power (property-2 class)
        let rate = r.gen_range(0.5..2.0);
        let ofn = OutageFn::new(FadingModel::Rayleigh { mean_gain: 1.0 }, rate).unwrap();
        let pc = ofn.critical_power();
        assert!(pc > 0.0);

        let m = r.gen_range(1..=4);
        let n = r.gen_range(1..=2);
        let mut rates = random_rates(&mut r, m, 0.001, 300 / m as u64);
        // top up the last rate so a transmit phase above the critical power
        // is affordable (otherwise the solver legitimately falls back to
        // dumping everything into the final block)
        let total: f64 = rates.iter().sum::<f64>() * n as f64;
        if total < 1.1 * pc {
            let deficit_units = ((1.1 * pc - total) / (n as f64 * 0.001)).ceil();
            rates[m - 1] += deficit_units * 0.001;
        }
        let profile = EhProfile::new(n, rates).unwrap();
        let sol = solve_outage_case4_noncausal(&profile, &ofn).unwrap();

        let flat = sol.schedule.powers_flat();
        for w in flat.windows(2) {
            assert!(w[1] + 1e-9 >= w[0], "instance {inst}: power decreased");
        }
        for &p in flat.iter().filter(|&&p| p > 0.0) {
            assert!(
                p >= pc - 1e-9,
                "instance {inst}: positive power {p} under critical {pc}"
            );
        }

        let spec = UtilitySpec::NonOutage {
            required_rate: rate,
            channel: OutageChannel::Statistical(FadingModel::Rayleigh { mean_gain: 1.0 }),
        };
        let orc = brute_force_offline(&profile, None, &spec, &grid).unwrap();
        // compare expected outage sums (T - non-outage utility)
        let t_total = profile.horizon().total_blocks() as f64;
        let solver_outage = t_total - sol.utility;
        let oracle_outage = t_total - orc.utility;
        assert!(
            (solver_outage - oracle_outage).abs() <= 1e-3,
            "instance {inst}: outage {solver_outage} vs oracle {oracle_outage}"
        );
    }

    // scarce-energy instances: the all-saving fallback must still match the
    // unrestricted oracle (shape checks do not apply when no transmit phase
    // at the critical power is affordable)
    for inst in 0..5 {
        let rate = 1.5 + 0.1 * inst as f64;
        let ofn = OutageFn::new(FadingModel::Rayleigh { mean_gain: 1.0 }, rate).unwrap();
        let profile = EhProfile::new(1, vec![0.05 * (inst + 1) as f64, 0.05]).unwrap();
        let sol = solve_outage_case4_noncausal(&profile, &ofn).unwrap();
        let spec = UtilitySpec::NonOutage {
            required_rate: rate,
            channel: OutageChannel::Statistical(FadingModel::Rayleigh { mean_gain: 1.0 }),
        };
        let orc = brute_force_offline(&profile, None, &spec, &grid).unwrap();
        assert!(
            (sol.utility - orc.utility).abs() <= 1e-3,
            "scarce instance {inst}: {} vs oracle {}",
            sol.utility,
            orc.utility
        );
    }
    let elapsed = started.elapsed();
    println!("ACCEPTANCE 5 save-then-transmit (50 property-2 instances, {elapsed:?}): PASS");
}

#[test]
fn criterion_06_outage_heuristic_vs_serve_sets() {
    let mut r = rng(606);
    let mut matches = 0usize;
    let total = 200usize;
    for inst in 0..total {
        let m = r.gen_range(1..=4);
        let n = r.gen_range(1..=3);
        let profile = EhProfile::new(n, random_rates(&mut r, m, 0.05, 40)).unwrap();
        let trace = random_rayleigh_trace(&mut r, profile.horizon());
        let rate = r.gen_range(0.3..1.5);
        let heur = solve_outage_case1(&profile, &trace, rate).unwrap();
        let orc = brute_force_serve_sets(&profile, &trace, rate).unwrap();
        assert!(
            heur.outage_count >= orc.min_outages,
            "instance {inst}: heuristic {} beat the exhaustive oracle {}",
            heur.outage_count,
            orc.min_outages
        );
        if heur.outage_count == orc.min_outages {
            matches += 1;
        }
    }
    // the gain-ordering rule is a conjecture: matches are reported, not
    // required
    println!(
        "ACCEPTANCE 6 outage heuristic vs serve-set oracle: PASS \
         (match rate {matches}/{total}; mismatches are documented, not failures)"
    );
}

#[test]
fn criterion_07_dp_exactness() {
    let mut r = rng(707);
    for inst in 0..20 {
        // tiny instances: <= 3 battery levels, 2 gain states, horizon <= 3
        let horizon_blocks = 1 + inst % 3;
        let levels = if horizon_blocks == 3 { 2 } else { 3 };
        let b_max = 1.0;
        let grids = DpGrids::uniform(b_max, levels).unwrap();
        let step = b_max / (levels - 1) as f64;
        let eh_vals: Vec<f64> = vec![0.0, step];
        let p0 = r.gen_range(0.2..0.8);
        let model = StochasticModel::new(
            EhProcess::Iid(DiscreteDist::new(eh_vals, vec![p0, 1.0 - p0]).unwrap()),
            ChannelProcess::Iid(
                DiscreteDist::new(
                    vec![r.gen_range(0.2..0.8), r.gen_range(1.0..3.0)],
                    vec![0.5, 0.5],
                )
                .unwrap(),
            ),
        )
        .unwrap();
        let horizon = Horizon::new(horizon_blocks, 1).unwrap();
        let spec = UtilitySpec::Throughput;
        let pol = solve_dp_case2(&model, horizon, &spec, &grids).unwrap();
        let brute =
            brute_force_policies(&model, horizon, &spec, grids.battery(), 1_000_000).unwrap();
        // identical stage terms summed in different orders: exact up to
        // f64 round-off
        assert!(
            (pol.expected_value() - brute).abs() <= 1e-12,
            "instance {inst}: dp {} vs enumeration {brute}",
            pol.expected_value()
        );
    }

    // degenerate deterministic models against the offline solver
    let mut r = rng(708);
    for _ in 0..5 {
        let rate = r.gen_range(0.3..1.0);
        let gain = r.gen_range(0.5..2.0);
        let model = StochasticModel::new(
            EhProcess::Iid(DiscreteDist::point(rate).unwrap()),
            ChannelProcess::Iid(DiscreteDist::point(gain).unwrap()),
        )
        .unwrap();
        let horizon = Horizon::new(3, 1).unwrap();
        let b_max = 3.0 * rate;
        let points = 61;
        let grids = DpGrids::uniform(b_max, points).unwrap();
        let pol = solve_dp_case2(&model, horizon, &UtilitySpec::Throughput, &grids).unwrap();
        let profile = EhProfile::new(1, vec![rate; 3]).unwrap();
        let trace = ChannelTrace::constant(horizon, gain).unwrap();
        let off = solve_throughput_case1(&profile, &trace).unwrap();
        let step = b_max / (points - 1) as f64;
        let slack = 3.0 * gain * step / std::f64::consts::LN_2; // one grid step per stage
        assert!(pol.expected_value() <= off.utility + 1e-9);
        assert!(
            pol.expected_value() >= off.utility - slack,
            "dp {} vs offline {} (slack {slack})",
            pol.expected_value(),
            off.utility
        );
    }
    println!("ACCEPTANCE 7 DP exactness (20 tiny instances + degenerate reductions): PASS");
}

#[test]
fn criterion_08_case_ordering() {
    let started = Instant::now();
    let exp = Experiment {
        horizon: Horizon::new(2, 2).unwrap(),
        model: StochasticModel::new(
            EhProcess::Iid(DiscreteDist::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap()),
            ChannelProcess::Iid(DiscreteDist::new(vec![0.5, 2.0], vec![0.5, 0.5]).unwrap()),
        )
        .unwrap(),
        utility: UtilitySpec::Throughput,
        battery_points: 201,
    };
    let policies = [
        PolicySpec::OfflineCase1,
        PolicySpec::DpCase3,
        PolicySpec::DpCase2,
        PolicySpec::Myopic,
    ];
    let reports = run_experiment(&exp, &policies, 10_000, 808).unwrap();
    for pair in reports.windows(2) {
        let (hi, lo) = (&pair[0], &pair[1]);
        let slack = 2.0 * (hi.std_error + lo.std_error);
        assert!(
            hi.mean >= lo.mean - slack,
            "{} ({}) should dominate {} ({}) within noise",
            hi.policy,
            hi.mean,
            lo.policy,
            lo.mean
        );
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 600.0,
        "took {elapsed:?}, budget 10 min"
    );
    println!(
        "ACCEPTANCE 8 case ordering offline >= case3 >= case2 >= myopic \
         (10^4 trials, {elapsed:?}): PASS"
    );
}

#[test]
fn criterion_09_relay_dominance_and_oracles() {
    let started = Instant::now();
    let mut r = rng(909);
    let mut sharing_oracle_checks = 0usize;
    for inst in 0..30 {
        // horizons drawn so every solver keeps a tractable grid oracle
        // (higher-dimensional sharing grids blow the evaluation guard)
        let (m, n) = [(1usize, 1usize), (2, 1), (1, 2)][inst % 3];
        let src = random_rates(&mut r, m, 0.001, (2000 / m) as u64);
        let rel = random_rates(&mut r, m, 0.001, (2000 / m) as u64);
        let g_sr = r.gen_range(0.4..1.5);
        let g_rd = r.gen_range(0.4..1.5);
        let t_total = m * n;

        let base = RelayScenario::new(
            EhProfile::new(n, src.clone()).unwrap(),
            EhProfile::new(n, rel.clone()).unwrap(),
            g_sr,
            g_rd,
            Traffic::DelayConstrained,
            EnergySharing::Disabled,
        )
        .unwrap();

        let dc = solve_relay_delay_constrained(&base).unwrap();
        let dt = solve_relay_delay_tolerant(&base).unwrap();
        assert!(
            dt.throughput >= dc.throughput - 1e-9,
            "instance {inst}: delay-tolerant {} under delay-constrained {}",
            dt.throughput,
            dc.throughput
        );

        // delay-constrained grid oracle (rate space)
        let rate_grid = GridSpec {
            step: 3e-4,
            max_evals: 200_000_000,
        };
        let dc_oracle = relay_oracle_delay_constrained(
            &base.source_profile,
            &base.relay_profile,
            g_sr,
            g_rd,
            &rate_grid,
        )
        .unwrap();
        assert!(
            (dc.throughput - dc_oracle).abs() <= 1e-3,
            "instance {inst}: DC {} vs oracle {dc_oracle}",
            dc.throughput
        );

        // delay-tolerant, stage-wise: source stage against the offline
        // power-grid oracle, forwarding stage against the rate-grid sweep
        // under the solver's own bit profile
        let trace = ChannelTrace::constant(base.source_profile.horizon(), g_sr).unwrap();
        let stage1 = solve_throughput_case1(&base.source_profile, &trace).unwrap();
        let src_oracle = brute_force_offline(
            &base.source_profile,
            Some(&trace),
            &UtilitySpec::Throughput,
            &GridSpec::new(0.001),
        )
        .unwrap();
        assert!((stage1.utility - src_oracle.utility).abs() <= 1e-3);
        let mut bits_in = Vec::new();
        let mut acc = 0.0;
        for &p in dt.source_schedule.powers_flat() {
            acc += (1.0 + g_sr * p).log2();
            bits_in.push(acc);
        }
        let fwd_oracle =
            relay_oracle_forwarding_stage(&base.relay_profile, g_rd, &bits_in, &rate_grid).unwrap();
        assert!(
            (dt.throughput - fwd_oracle).abs() <= 1e-3,
            "instance {inst}: DT {} vs forwarding oracle {fwd_oracle}",
            dt.throughput
        );

        // sharing: monotone in alpha, never below no-sharing, forced-zero
        // identity, and the grid oracle where it fits the guard
        let mut prev = 0.0;
        let mut warm: Option<Vec<f64>> = None;
        for alpha in [0.25, 0.5, 1.0] {
            let sc = RelayScenario::new(
                base.source_profile.clone(),
                base.relay_profile.clone(),
                g_sr,
                g_rd,
                Traffic::DelayConstrained,
                EnergySharing::SourceToRelay { efficiency: alpha },
            )
            .unwrap();
            let opts = SharingOptions {
                initial_transfers: warm.clone(),
                ..Default::default()
            };
            let sol = solve_relay_energy_sharing_opts(&sc, &opts).unwrap();
            assert!(
                sol.throughput >= prev - 1e-9,
                "instance {inst}: sharing not monotone in alpha at {alpha}"
            );
            assert!(sol.throughput >= dc.throughput - 1e-9);
            prev = sol.throughput;
            warm = Some(sol.transfers.clone());

            let forced = solve_relay_energy_sharing_opts(
                &sc,
                &SharingOptions {
                    force_zero_transfers: true,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(forced.source_schedule, dc.source_schedule);
            assert_eq!(forced.relay_schedule, dc.relay_schedule);
            assert_eq!(forced.throughput, dc.throughput);

            if t_total == 1 {
                let share_grid = GridSpec {
                    step: 2.5e-4,
                    max_evals: 200_000_000,
                };
                let orc = relay_oracle_energy_sharing(
                    &sc.source_profile,
                    &sc.relay_profile,
                    g_sr,
                    g_rd,
                    alpha,
                    &share_grid,
                )
                .unwrap();
                assert!(
                    (sol.throughput - orc).abs() <= 1e-3,
                    "instance {inst}, alpha {alpha}: sharing {} vs oracle {orc}",
                    sol.throughput
                );
                sharing_oracle_checks += 1;
            }
        }
    }
    assert!(sharing_oracle_checks >= 10, "want sharing-oracle coverage");
    let elapsed = started.elapsed();
    println!(
        "ACCEPTANCE 9 relay dominance + oracles (30 scenarios, \
         {sharing_oracle_checks} sharing-oracle checks, {elapsed:?}): PASS"
    );
}

/// Larger relay horizons (M = N = 2) have no tractable grid oracle for every
/// solver; the structural properties still must hold there.
#[test]
fn criterion_09_relay_properties_at_larger_horizon() {
    let mut r = rng(919);
    for _ in 0..10 {
        let src = random_rates(&mut r, 2, 0.01, 100);
        let rel = random_rates(&mut r, 2, 0.01, 100);
        let base = RelayScenario::new(
            EhProfile::new(2, src).unwrap(),
            EhProfile::new(2, rel).unwrap(),
            r.gen_range(0.4..1.5),
            r.gen_range(0.4..1.5),
            Traffic::DelayConstrained,
            EnergySharing::Disabled,
        )
        .unwrap();
        let dc = solve_relay_delay_constrained(&base).unwrap();
        let dt = solve_relay_delay_tolerant(&base).unwrap();
        assert!(dt.throughput >= dc.throughput - 1e-9);
        assert!(dc
            .source_schedule
            .check_feasible(&base.source_profile, 1e-9)
            .unwrap());
        assert!(dc
            .relay_schedule
            .check_feasible(&base.relay_profile, 1e-9)
            .unwrap());

        // data causality of the delay-tolerant solution
        let mut bits_in = 0.0;
        let mut bits_out = 0.0;
        for t in 0..4 {
            bits_in += (1.0 + base.gain_sr * dt.source_schedule.power_at(t)).log2();
            bits_out += (1.0 + base.gain_rd * dt.relay_schedule.power_at(t)).log2();
            assert!(
                bits_out <= bits_in + 1e-9,
                "relay forwarded bits it never received"
            );
        }

        let mut prev = 0.0;
        for alpha in [0.25, 0.5, 1.0] {
            let sc = RelayScenario::new(
                base.source_profile.clone(),
                base.relay_profile.clone(),
                base.gain_sr,
                base.gain_rd,
                Traffic::DelayConstrained,
                EnergySharing::SourceToRelay { efficiency: alpha },
            )
            .unwrap();
            let sol = solve_relay_energy_sharing(&sc).unwrap();
            assert!(sol.throughput >= prev - 1e-6);
            assert!(sol.throughput >= dc.throughput - 1e-9);
            prev = sol.throughput;
        }
    }
    println!("ACCEPTANCE 9b relay structural properties at M=N=2: PASS");
}

#[test]
fn criterion_10_statistical_sanity() {
    // empirical outage frequency of a constant-power policy under Rayleigh
    let fading = FadingModel::Rayleigh { mean_gain: 1.0 };
    let power = 1.0;
    let rate = 1.0;
    let q = outage_probability(&fading, rate, power).unwrap();
    let gen = TraceGenerator {
        horizon: Horizon::new(1, 1).unwrap(),
        fading,
        eh: ehopt_core::sim::EhSource::Deterministic(vec![power]),
        seed: 1010,
    };
    let trials = 100_000u64;
    let mut outages = 0u64;
    for trial in 0..trials {
        let (_, trace) = gen.generate_trace(trial).unwrap();
        if (1.0 + trace.gain_at(0) * power).log2() < rate {
            outages += 1;
        }
    }
    let freq = outages as f64 / trials as f64;
    let bound = 3.0 * (q * (1.0 - q) / trials as f64).sqrt();
    assert!(
        (freq - q).abs() <= bound,
        "outage frequency {freq} vs Q {q} (binomial bound {bound})"
    );

    // ergodic-rate quadrature vs Monte Carlo with 10^7 draws
    let quad = ergodic_rate(&fading, 1.0).unwrap();
    let mut r = rng(1011);
    let draws = 10_000_000usize;
    let mut acc = 0.0;
    for _ in 0..draws {
        let h = -(1.0 - r.gen_range(0.0..1.0f64)).ln();
        acc += (1.0 + h).log2();
    }
    let mc = acc / draws as f64;
    assert!(
        (quad - mc).abs() <= 1e-3,
        "quadrature {quad} vs Monte Carlo {mc} over 10^7 draws"
    );
    println!(
        "ACCEPTANCE 10 statistical sanity (outage freq {freq} vs Q {q:.6}; \
         ergodic quad {quad:.6} vs MC {mc:.6}): PASS"
    );
}
