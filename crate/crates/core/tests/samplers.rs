use surface_mcmc::exact_oracle::{enumerate_orbit, exact_boltzmann, exact_posterior};
use surface_mcmc::matching::decode_enhanced;
use surface_mcmc::mcmc::{
    decode_free_energy, decode_single_temperature, distinguishability, equidistant_temps, free_energy_profile,
    sample_class_means, SingleTempConfig,
};
use surface_mcmc::noise::NoiseModel;
use surface_mcmc::rng::stream;
use surface_mcmc::{CodeLayout, EquivalenceClass};

#[test]
fn integrated_free_energy_matches_enumeration() {
    let layout = CodeLayout::new(3).unwrap();
    let model = NoiseModel::<f64>::depolarizing(0.1).unwrap();
    let beta = model.beta_bar().unwrap();
    let costs = model.costs().unwrap();
    let temps = equidistant_temps(beta, 21).unwrap();
    let mut rng = stream(31, &[]);
    let mut worst = 0.0f64;
    for s in 0..4u64 {
        let f = model.sample_frame(&layout, &mut rng);
        let (_, seeds) = decode_enhanced(&layout, &layout.syndrome_of(&f), &model).unwrap();
        let prof = free_energy_profile(&layout, &model, &temps, 20_000, &seeds, s).unwrap();
        for c in EquivalenceClass::ALL {
            let exact = exact_boltzmann(&enumerate_orbit(&layout, seeds.frame(c)).unwrap(), &costs, beta).log_z;
            worst = worst.max((prof.log_z[c.index()] - exact).abs());
        }
    }
    // Simpson error on 21 points plus sampling noise
    assert!(worst < 0.1, "worst log Z error {worst}");
}

#[test]
fn free_energy_and_single_temperature_mostly_agree() {
    let layout = CodeLayout::new(5).unwrap();
    let model = NoiseModel::<f64>::depolarizing(0.1).unwrap();
    let cfg = SingleTempConfig::for_model(&model, 5).unwrap();
    let temps = equidistant_temps(model.beta_bar().unwrap(), 21).unwrap();
    let mut rng = stream(32, &[]);
    let n = 300;
    let mut agree = 0;
    for s in 0..n {
        let f = model.sample_frame(&layout, &mut rng);
        let syn = layout.syndrome_of(&f);
        let (_, seeds) = decode_enhanced(&layout, &syn, &model).unwrap();
        let a = decode_single_temperature(&layout, &syn, &model, &cfg, &seeds, s).unwrap();
        let b = decode_free_energy(&layout, &syn, &model, &temps, cfg.n_sample, &seeds, s).unwrap();
        agree += (a.class == b.class) as u32;
    }
    assert!(agree as f64 >= 0.95 * n as f64, "{agree} / {n}");
}

#[test]
fn exact_probabilities_follow_log_z() {
    let layout = CodeLayout::new(3).unwrap();
    let model = NoiseModel::<f64>::depolarizing(0.08).unwrap();
    let mut rng = stream(33, &[]);
    for _ in 0..50 {
        let f = model.sample_frame(&layout, &mut rng);
        let post = exact_posterior(&layout, &layout.syndrome_of(&f), &model).unwrap();
        let total: f64 = post.probabilities.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        let best = (0..4).max_by(|&a, &b| post.log_z[a].total_cmp(&post.log_z[b])).unwrap();
        assert_eq!(post.probabilities[best], post.probabilities.iter().cloned().fold(0.0, f64::max));
    }
}

#[test]
fn distinguishability_grows_with_distance() {
    let model = NoiseModel::<f64>::depolarizing(0.05).unwrap();
    let mut medians = Vec::new();
    for l in [3usize, 5, 7] {
        let layout = CodeLayout::new(l).unwrap();
        let beta = model.beta_bar().unwrap();
        let mut rng = stream(34, &[l as u64]);
        let mut gaps = Vec::new();
        for s in 0..40 {
            let f = model.sample_frame(&layout, &mut rng);
            let (_, seeds) = decode_enhanced(&layout, &layout.syndrome_of(&f), &model).unwrap();
            let est = sample_class_means(&layout, &model, beta, (l as u64).pow(4), 0, &seeds, s).unwrap();
            let means = est.map(|e| e.mean);
            gaps.push(distinguishability(&means, Some(layout.class_of(&f))).unwrap());
        }
        gaps.sort_by(f64::total_cmp);
        medians.push(gaps[gaps.len() / 2]);
    }
    assert!(medians[0] < medians[1] && medians[1] < medians[2], "{medians:?}");
}

#[test]
fn samplers_are_generic_over_the_scalar() {
    let layout = CodeLayout::new(4).unwrap();
    let m64 = NoiseModel::<f64>::depolarizing(0.1).unwrap();
    let m32 = NoiseModel::<f32>::depolarizing(0.1).unwrap();
    let f = m64.sample_frame(&layout, &mut stream(35, &[]));
    let syn = layout.syndrome_of(&f);
    let (_, seeds) = decode_enhanced(&layout, &syn, &m64).unwrap();
    let a = decode_single_temperature(&layout, &syn, &m64, &SingleTempConfig::for_model(&m64, 4).unwrap(), &seeds, 9)
        .unwrap();
    let b = decode_single_temperature(&layout, &syn, &m32, &SingleTempConfig::for_model(&m32, 4).unwrap(), &seeds, 9)
        .unwrap();
    for k in 0..4 {
        assert!(
            (a.scores[k] - b.scores[k] as f64).abs() < 1e-3 * a.scores[k].max(1.0),
            "{:?} {:?}",
            a.scores,
            b.scores
        );
    }
}
