//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line to
//! stderr (uncaptured) and then asserts. Every tolerance is pinned below.

use std::io::Write;
use std::sync::atomic::AtomicBool;

use rand::Rng;
use rayon::prelude::*;
use surface_mcmc::exact_oracle::{enumerate_orbit, exact_boltzmann};
use surface_mcmc::harness::{
    fatal_pattern_suite, oracle_check, run_campaign, Algorithm, ExperimentConfig, OracleCheckConfig, Z95_ONE_SIDED,
};
use surface_mcmc::matching::{decode_enhanced, match_syndrome, min_weight_perfect_matching_edges};
use surface_mcmc::mcmc::{
    parallel_sweep_schedule, MeanEstimate, MetropolisChain, ParallelChain, DEFAULT_RECTANGLE_SIZE,
};
use surface_mcmc::noise::NoiseModel;
use surface_mcmc::rng::stream;
use surface_mcmc::spacetime::{sample_history, MeasurementModel, SpacetimeChain};
use surface_mcmc::{CodeLayout, EquivalenceClass, Error, PauliFrame};

/// Random distance-3 syndromes checked against enumeration.
const MINIMALITY_SYNDROMES: u64 = 500;
/// Metropolis steps per class for the exact-average comparison.
const EXACT_AVERAGE_STEPS: u64 = 1_000_000;
/// Standard errors allowed between a sampled and an exact or second sample.
const MAX_Z: f64 = 3.0;
const ORACLE_SYNDROMES: u64 = 500;
const ORACLE_SAMPLE_FACTOR: u64 = 10;
const PAIRED_TARGET_ERRORS: u64 = 500;
const HIGH_P_TRIALS: u64 = 100_000;
const HIGH_P_CEILING: f64 = 0.13;
const HOT_STEPS: u64 = 1_000_000;
const PARALLEL_SYNDROMES: u64 = 20;
const PARALLEL_REPLICAS: u64 = 32;
const PARALLEL_BURN_IN: u64 = 20_000;
const PARALLEL_STEPS: u64 = 60_000;
const MATCHING_PROBLEMS: u64 = 1_000;
const MAX_MATCHING_VERTICES: usize = 12;
const SPACETIME_MOVES: u64 = 100_000;

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "[{id:>2}] {verdict} {name}: {detail}");
    assert!(pass, "[{id}] {name}: {detail}");
}

fn depolarizing(p: f64) -> NoiseModel<f64> {
    NoiseModel::depolarizing(p).unwrap()
}

#[test]
fn c01_matching_chains_reach_the_in_class_minimum() {
    let layout = CodeLayout::new(3).unwrap();
    let model = depolarizing(0.1);
    let mut rng = stream(101, &[]);
    let mut bad = 0;
    let mut y_once_gaps = 0;
    for _ in 0..MINIMALITY_SYNDROMES {
        let f = model.sample_frame(&layout, &mut rng);
        let m = match_syndrome(&layout, &layout.syndrome_of(&f)).unwrap();
        for c in EquivalenceClass::ALL {
            let chain = m.chains.frame(c);
            let orbit = enumerate_orbit(&layout, chain).unwrap();
            if chain.counts().separable_weight() != orbit.min_separable_weight() {
                bad += 1;
            }
            if chain.counts().weight() != orbit.min_weight() {
                y_once_gaps += 1;
            }
        }
    }
    let detail = format!(
        "{MINIMALITY_SYNDROMES} syndromes x 4 classes, {bad} chains above the separable minimum \
         ({y_once_gaps} chains above the Y-counted-once minimum, informational)"
    );
    report(1, "matching chains reach the in-class minimum", bad == 0, &detail);
}

#[test]
fn c02_sampled_averages_match_exact_boltzmann() {
    let layout = CodeLayout::new(3).unwrap();
    let model = depolarizing(0.1);
    let beta = model.beta_bar().unwrap();
    let costs = model.costs().unwrap();
    let mut rng = stream(202, &[]);
    let mut worst = 0.0f64;
    for s in 0..5u64 {
        let f = model.sample_frame(&layout, &mut rng);
        let (_, seeds) = decode_enhanced(&layout, &layout.syndrome_of(&f), &model).unwrap();
        for c in EquivalenceClass::ALL {
            let exact = exact_boltzmann(&enumerate_orbit(&layout, seeds.frame(c)).unwrap(), &costs, beta).mean_n;
            let mut chain = MetropolisChain::new(
                &layout,
                seeds.frame(c).clone(),
                &model,
                beta,
                stream(203, &[s, c.index() as u64]),
            )
            .unwrap();
            chain.run(EXACT_AVERAGE_STEPS);
            let e = chain.estimate();
            worst = worst.max((e.mean - exact).abs() / e.std_error);
        }
    }
    report(
        2,
        "sampled <n> matches exact Boltzmann average",
        worst < MAX_Z,
        &format!("5 syndromes x 4 classes, worst |z| = {worst:.2} (< {MAX_Z})"),
    );
}

#[test]
fn c03_sampler_agrees_with_the_exact_decoder() {
    let r = oracle_check(&OracleCheckConfig {
        p: 0.1,
        syndromes: ORACLE_SYNDROMES,
        n_sample_factor: ORACLE_SAMPLE_FACTOR,
        seed: 303,
        workers: None,
    })
    .unwrap();
    let detail = format!(
        "oracle self-consistency {:.4}, oracle success {:.4}, sampler agreement {:.4} (needs >= oracle success), sampler success {:.4}",
        r.rate(r.self_consistent),
        r.rate(r.oracle_success),
        r.rate(r.agreement),
        r.rate(r.sampler_success)
    );
    report(3, "single-temperature decoder agrees with exact decoder", r.agreement_passed(), &detail);
}

#[test]
fn c04_marked_half_chains_separate_the_matchers() {
    let r = fatal_pattern_suite(&[3, 5, 7]).unwrap();
    let failed: Vec<String> =
        r.cases.iter().filter(|c| !c.passed()).map(|c| format!("L={} {}", c.distance, c.name)).collect();
    let detail = format!("{} patterns, failing: {:?}", r.cases.len(), failed);
    report(4, "low-weight patterns: enhanced corrects, standard fails", r.passed(), &detail);
}

#[test]
fn c05_sampler_beats_the_best_matcher_at_distance_seven() {
    let cfg = ExperimentConfig::from_toml_str(&format!(
        "distances = [7]\np = [0.1]\nseed = 505\ntarget_logical_errors = {PAIRED_TARGET_ERRORS}\n\
         algorithms = [\"standard_mwpm\", \"enhanced_mwpm\", \"single_temperature\"]\n"
    ))
    .unwrap();
    let r = run_campaign(&cfg, &AtomicBool::new(false)).unwrap();
    let pt = &r.points[0];
    let fa = pt.failures(Algorithm::StandardMwpm).unwrap();
    let fb = pt.failures(Algorithm::EnhancedMwpm).unwrap();
    let best = if fb <= fa { Algorithm::EnhancedMwpm } else { Algorithm::StandardMwpm };
    let paired = pt.paired(best, Algorithm::SingleTemperature).unwrap();
    let z = paired.z_second_better();
    let fc = pt.failures(Algorithm::SingleTemperature).unwrap();
    let detail = format!(
        "{} trials, failures standard={fa} enhanced={fb} sampler={fc}; paired vs {best}: {} only {best} failed, {} only sampler failed, z = {z:.2} (needs >= {Z95_ONE_SIDED:.3})",
        pt.trials(),
        paired.only_first,
        paired.only_second
    );
    report(5, "single-temperature rate below the best matcher", z >= Z95_ONE_SIDED, &detail);
}

#[test]
fn c06_sampler_below_physical_rate_at_distance_six() {
    let cfg = ExperimentConfig::from_toml_str(&format!(
        "distances = [6]\np = [0.13]\nseed = 606\ntrials = {HIGH_P_TRIALS}\nalgorithms = [\"single_temperature\"]\n"
    ))
    .unwrap();
    let r = run_campaign(&cfg, &AtomicBool::new(false)).unwrap();
    let s = r.points[0].summary(Algorithm::SingleTemperature).unwrap();
    let detail = format!(
        "L=6 p=0.13: {} / {} failures, rate {:.4}, 95% interval [{:.4}, {:.4}] (upper needs < {HIGH_P_CEILING})",
        s.failures, s.trials, s.rate, s.ci_low, s.ci_high
    );
    report(6, "single-temperature rate below p", s.ci_high < HIGH_P_CEILING, &detail);
}

#[test]
fn c07_infinite_temperature_average() {
    let layout = CodeLayout::new(4).unwrap();
    let model = depolarizing(0.1);
    let mut c =
        MetropolisChain::new(&layout, PauliFrame::identity(layout.n_qubits()), &model, 0.0, stream(707, &[])).unwrap();
    c.run(HOT_STEPS);
    let e = c.estimate();
    let z = (e.mean - 18.75).abs() / e.std_error;
    let detail = format!("L=4: <n> = {:.4} +- {:.4}, target 18.75, |z| = {z:.2} (< {MAX_Z})", e.mean, e.std_error);
    report(7, "beta = 0 average equals 3/4 of the qubits", z < MAX_Z, &detail);
}

#[test]
fn c08_parallel_sweep_matches_sequential() {
    let layout = CodeLayout::new(9).unwrap();
    let model = depolarizing(0.1);
    let beta = model.beta_bar().unwrap();
    let schedule = parallel_sweep_schedule(&layout, DEFAULT_RECTANGLE_SIZE).unwrap();
    let mut rng = stream(808, &[]);
    let mut jobs = Vec::new();
    for s in 0..PARALLEL_SYNDROMES {
        let f = model.sample_frame(&layout, &mut rng);
        let (_, seeds) = decode_enhanced(&layout, &layout.syndrome_of(&f), &model).unwrap();
        for c in EquivalenceClass::ALL {
            jobs.push((s, c.index() as u64, seeds.frame(c).clone()));
        }
    }
    // single chains can sit in one basin of an orbit for a long time, so
    // errors come from the spread of independent replicas
    let zs: Vec<f64> = jobs
        .par_iter()
        .map(|(s, k, seed)| {
            let replica = |salt: u64, r: u64| {
                let mut c =
                    MetropolisChain::new(&layout, seed.clone(), &model, beta, stream(salt, &[*s, *k, r])).unwrap();
                c.burn(PARALLEL_BURN_IN);
                c
            };
            let seq: Vec<_> = (0..PARALLEL_REPLICAS)
                .map(|r| {
                    let mut c = replica(809, r);
                    c.run(PARALLEL_STEPS);
                    c.estimate()
                })
                .collect();
            let par: Vec<_> = (0..PARALLEL_REPLICAS)
                .map(|r| {
                    let mut c = ParallelChain::new(replica(810, r), &schedule);
                    c.run(PARALLEL_STEPS);
                    c.estimate()
                })
                .collect();
            MeanEstimate::from_replicas(&seq).z_score(&MeanEstimate::from_replicas(&par))
        })
        .collect();
    let worst = zs.iter().copied().fold(0.0, f64::max);
    let detail = format!(
        "L=9, {} rectangles, {PARALLEL_SYNDROMES} syndromes x 4 classes, {PARALLEL_REPLICAS} replicas each, worst |z| = {worst:.2} (< {MAX_Z})",
        schedule.rectangles().len()
    );
    report(8, "parallel sweep averages match sequential", worst < MAX_Z, &detail);
}

/// Exhaustive minimum-weight perfect matching; `None` when none exists.
fn brute_force(n: usize, edges: &[(usize, usize, u32)]) -> Option<u64> {
    let mut w = vec![vec![None; n]; n];
    for &(a, b, c) in edges {
        let slot: &mut Option<u32> = &mut w[a][b];
        *slot = Some(slot.map_or(c, |o| o.min(c)));
        w[b][a] = w[a][b];
    }
    fn go(free: u32, w: &[Vec<Option<u32>>]) -> Option<u64> {
        if free == 0 {
            return Some(0);
        }
        let a = free.trailing_zeros() as usize;
        let rest = free & !(1 << a);
        let mut best: Option<u64> = None;
        let mut m = rest;
        while m != 0 {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            if let Some(c) = w[a][b] {
                if let Some(sub) = go(rest & !(1 << b), w) {
                    let t = sub + c as u64;
                    best = Some(best.map_or(t, |x| x.min(t)));
                }
            }
        }
        best
    }
    go(((1u64 << n) - 1) as u32, &w)
}

#[test]
fn c09_matching_is_optimal_on_small_graphs() {
    let mut rng = stream(909, &[]);
    let mut mismatches = 0;
    let mut infeasible = 0;
    for _ in 0..MATCHING_PROBLEMS {
        let n = 2 * rng.gen_range(1..=MAX_MATCHING_VERTICES / 2);
        let density: f64 = rng.gen_range(0.3..=1.0);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen::<f64>() < density {
                    edges.push((a, b, rng.gen_range(0..20u32)));
                }
            }
        }
        let want = brute_force(n, &edges);
        let got = min_weight_perfect_matching_edges(n, &edges);
        match (want, got) {
            (Some(w), Ok(m)) if m.total_weight == w => {}
            (None, Err(Error::Infeasible { .. })) => infeasible += 1,
            _ => mismatches += 1,
        }
    }
    let detail = format!("{MATCHING_PROBLEMS} graphs with <= {MAX_MATCHING_VERTICES} vertices ({infeasible} without a perfect matching), {mismatches} mismatches");
    report(9, "matching weight equals brute force", mismatches == 0, &detail);
}

#[test]
fn c10_spacetime_moves_keep_record_class_and_energy() {
    let layout = CodeLayout::new(3).unwrap();
    let model = depolarizing(0.1);
    let mm = MeasurementModel::new(0.1, &model).unwrap();
    let mut rng = stream(1010, &[]);
    let (truth, record) = sample_history(&layout, &model, &mm, 3, &mut rng).unwrap();
    let class = truth.class(&layout);
    let mut chain =
        SpacetimeChain::new(&layout, truth, &model, &mm, model.beta_bar().unwrap(), stream(1011, &[])).unwrap();
    let mut broken = 0u64;
    for i in 0..SPACETIME_MOVES {
        // alternate forced moves and Metropolis proposals
        if i % 2 == 0 {
            let mv = chain.random_move();
            chain.apply(mv).unwrap();
        } else {
            chain.step();
        }
        let h = chain.hypothesis();
        let ok = h.is_consistent(&layout, &record) && h.class(&layout) == class && chain.tally() == h.tally();
        broken += (!ok) as u64;
    }
    let detail =
        format!("L=3, t_max=3, {SPACETIME_MOVES} moves, {broken} broke consistency, class or energy bookkeeping");
    report(10, "spacetime moves preserve record, class and energy", broken == 0, &detail);
}
