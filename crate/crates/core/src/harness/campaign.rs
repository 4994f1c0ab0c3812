use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::config::{model_name, Algorithm, ExperimentConfig, StopRule};
use super::stats::{wilson_interval, PairedCounts, Z95};
use crate::code_geometry::{CodeLayout, EquivalenceClass, PauliFrame};
use crate::error::{Error, Result};
use crate::matching::{match_syndrome, DecoderVerdict};
use crate::mcmc::{decode_free_energy, decode_single_temperature, equidistant_temps, SingleTempConfig};
use crate::noise::{NoiseKind, NoiseModel};
use crate::rng::{derive_seed, stream};

/// Hex prefix of the SHA-256 of a frame's bit-planes.
pub fn frame_digest(frame: &PauliFrame) -> String {
    let hash = Sha256::digest(frame.to_bytes());
    hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub algorithm: Algorithm,
    pub class: EquivalenceClass,
    pub success: bool,
    pub scores: [f64; 4],
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub digest: String,
    pub true_class: EquivalenceClass,
    pub outcomes: Vec<TrialOutcome>,
    pub wall_micros: u64,
}

/// Everything a trial needs besides its index.
#[derive(Clone, Debug)]
pub struct TrialContext {
    pub layout: CodeLayout,
    pub model: NoiseModel<f64>,
    pub algorithms: Vec<Algorithm>,
    pub single_temp: SingleTempConfig<f64>,
    /// Temperature grid and steps per temperature; `None` for a noiseless
    /// model, where the matching verdict stands in.
    pub free_energy: Option<(Vec<f64>, u64)>,
    pub seed: u64,
    labels: [u64; 3],
}

fn model_tag(kind: NoiseKind) -> u64 {
    match kind {
        NoiseKind::Depolarizing => 1,
        NoiseKind::IndependentXz => 2,
        NoiseKind::GeneralPauli => 3,
    }
}

impl TrialContext {
    pub fn new(cfg: &ExperimentConfig, distance: usize, p: f64) -> Result<Self> {
        let layout = CodeLayout::new(distance)?;
        let model = cfg.noise_model(p)?;
        let beta_bar = model.beta_bar()?;
        let mut single_temp = match cfg.beta_star_factor {
            Some(f) => SingleTempConfig::with_factor(&model, distance, f)?,
            None => SingleTempConfig::for_model(&model, distance)?,
        };
        if let Some(n) = cfg.n_sample {
            single_temp.n_sample = n;
        }
        let free_energy = if beta_bar.is_finite() {
            let temps = equidistant_temps(beta_bar, cfg.free_energy_points)?;
            Some((temps, cfg.free_energy_samples.unwrap_or(single_temp.n_sample)))
        } else {
            None
        };
        Ok(TrialContext {
            layout,
            model,
            algorithms: cfg.algorithms.clone(),
            single_temp,
            free_energy,
            seed: cfg.seed.ok_or_else(|| Error::Config("a master seed is required".into()))?,
            labels: [distance as u64, p.to_bits(), model_tag(cfg.model)],
        })
    }

    /// Samples trial `trial` and runs every decoder on its syndrome.
    pub fn run_trial(&self, trial: u64) -> Result<TrialRecord> {
        let start = Instant::now();
        let [l, p, m] = self.labels;
        let mut rng = stream(self.seed, &[l, p, m, trial, 0]);
        let frame = self.model.sample_frame(&self.layout, &mut rng);
        let syndrome = self.layout.syndrome_of(&frame);
        let true_class = self.layout.class_of(&frame);
        let matched = match_syndrome(&self.layout, &syndrome)?;
        let dseed = derive_seed(self.seed, &[l, p, m, trial, 1]);
        let mut outcomes = Vec::with_capacity(self.algorithms.len());
        for &algorithm in &self.algorithms {
            let v: DecoderVerdict<f64> = match algorithm {
                Algorithm::StandardMwpm => matched.standard_verdict(&self.layout),
                Algorithm::EnhancedMwpm => matched.enhanced_verdict(&self.model)?,
                Algorithm::SingleTemperature => decode_single_temperature(
                    &self.layout,
                    &syndrome,
                    &self.model,
                    &self.single_temp,
                    &matched.chains,
                    dseed,
                )?,
                Algorithm::FreeEnergy => match &self.free_energy {
                    Some((temps, n)) => {
                        decode_free_energy(&self.layout, &syndrome, &self.model, temps, *n, &matched.chains, dseed)?
                    }
                    None => matched.enhanced_verdict(&self.model)?,
                },
            };
            outcomes.push(TrialOutcome { algorithm, class: v.class, success: v.class == true_class, scores: v.scores });
        }
        Ok(TrialRecord {
            trial,
            digest: frame_digest(&frame),
            true_class,
            outcomes,
            wall_micros: start.elapsed().as_micros() as u64,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl AlgorithmSummary {
    fn new(algorithm: Algorithm, trials: u64, failures: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(failures, trials, Z95);
        let rate = if trials == 0 { 0.0 } else { failures as f64 / trials as f64 };
        AlgorithmSummary { algorithm, trials, failures, rate, ci_low, ci_high }
    }
}

#[derive(Clone, Debug)]
pub struct PointResult {
    pub distance: usize,
    pub p: f64,
    pub model: NoiseKind,
    pub algorithms: Vec<Algorithm>,
    /// Per completed trial, bit `k` set when `algorithms[k]` succeeded.
    pub successes: Vec<u8>,
    /// Full trial records, kept only when requested.
    pub records: Vec<TrialRecord>,
    pub truncated: bool,
}

impl PointResult {
    pub fn trials(&self) -> u64 {
        self.successes.len() as u64
    }

    fn index(&self, a: Algorithm) -> Option<usize> {
        self.algorithms.iter().position(|&b| b == a)
    }

    pub fn failures(&self, a: Algorithm) -> Option<u64> {
        let k = self.index(a)?;
        Some(self.successes.iter().filter(|&&s| s >> k & 1 == 0).count() as u64)
    }

    pub fn summary(&self, a: Algorithm) -> Option<AlgorithmSummary> {
        Some(AlgorithmSummary::new(a, self.trials(), self.failures(a)?))
    }

    pub fn summaries(&self) -> Vec<AlgorithmSummary> {
        self.algorithms.iter().map(|&a| self.summary(a).expect("listed")).collect()
    }

    /// Discordant trial counts of `first` against `second`.
    pub fn paired(&self, first: Algorithm, second: Algorithm) -> Option<PairedCounts> {
        let (i, j) = (self.index(first)?, self.index(second)?);
        let mut c = PairedCounts::default();
        for &s in &self.successes {
            c.push(s >> i & 1 == 1, s >> j & 1 == 1);
        }
        Some(c)
    }

    /// `rate(numerator) / rate(denominator)`; `None` if the denominator never
    /// failed.
    pub fn ratio(&self, numerator: Algorithm, denominator: Algorithm) -> Option<f64> {
        let (a, b) = (self.failures(numerator)?, self.failures(denominator)?);
        (b > 0).then(|| a as f64 / b as f64)
    }
}

#[derive(Clone, Debug)]
pub struct CampaignResult {
    pub seed: u64,
    pub points: Vec<PointResult>,
    pub truncated: bool,
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| Error::Config(e.to_string()))
}

/// Runs one `(L, p)` point. Trials run in parallel batches but are consumed
/// in index order, so the result does not depend on the worker count or the
/// batch size.
pub fn run_point(
    cfg: &ExperimentConfig,
    distance: usize,
    p: f64,
    keep_records: bool,
    cancel: &AtomicBool,
    workers: &rayon::ThreadPool,
) -> Result<PointResult> {
    let ctx = TrialContext::new(cfg, distance, p)?;
    let rule = cfg.stop_rule()?;
    let cap = match rule {
        StopRule::Fixed(n) => n,
        StopRule::TargetErrors { max_trials, .. } => max_trials,
    };
    let n_alg = cfg.algorithms.len();
    let mut out = PointResult {
        distance,
        p,
        model: cfg.model,
        algorithms: cfg.algorithms.clone(),
        successes: Vec::new(),
        records: Vec::new(),
        truncated: false,
    };
    let mut failures = vec![0u64; n_alg];
    let mut next = 0u64;
    'outer: while next < cap {
        if cancel.load(Ordering::SeqCst) {
            out.truncated = true;
            break;
        }
        let end = (next + cfg.batch_size).min(cap);
        let batch: Vec<TrialRecord> =
            workers.install(|| (next..end).into_par_iter().map(|t| ctx.run_trial(t)).collect::<Result<_>>())?;
        next = end;
        for rec in batch {
            let mut bits = 0u8;
            for (k, o) in rec.outcomes.iter().enumerate() {
                if o.success {
                    bits |= 1 << k;
                } else {
                    failures[k] += 1;
                }
            }
            out.successes.push(bits);
            if keep_records {
                out.records.push(rec);
            }
            if let StopRule::TargetErrors { target, .. } = rule {
                if failures.iter().all(|&f| f >= target) {
                    break 'outer;
                }
            }
        }
    }
    Ok(out)
}

/// Runs every configured point. Setting `cancel` stops at the next batch
/// boundary; completed trials are kept and the result is marked truncated.
pub fn run_campaign(cfg: &ExperimentConfig, cancel: &AtomicBool) -> Result<CampaignResult> {
    cfg.validate()?;
    if cfg.algorithms.len() > 8 {
        return Err(Error::Config("at most eight algorithms per campaign".into()));
    }
    let workers = pool(cfg.resolved_workers())?;
    let keep = cfg.trial_log.is_some();
    let mut points = Vec::new();
    let mut truncated = false;
    for &l in &cfg.distances {
        for &p in &cfg.p {
            if truncated {
                break;
            }
            let point = run_point(cfg, l, p, keep, cancel, &workers)?;
            truncated |= point.truncated;
            points.push(point);
        }
    }
    Ok(CampaignResult { seed: cfg.seed.expect("validated"), points, truncated })
}

/// One CSV row of the results table.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ResultRow {
    #[serde(rename = "L")]
    pub distance: usize,
    pub p: f64,
    pub model: String,
    pub algorithm: String,
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl CampaignResult {
    pub fn rows(&self) -> Vec<ResultRow> {
        let mut rows = Vec::new();
        for pt in &self.points {
            for s in pt.summaries() {
                rows.push(ResultRow {
                    distance: pt.distance,
                    p: pt.p,
                    model: model_name(pt.model).to_string(),
                    algorithm: s.algorithm.name().to_string(),
                    trials: s.trials,
                    failures: s.failures,
                    rate: s.rate,
                    ci_low: s.ci_low,
                    ci_high: s.ci_high,
                    seed: self.seed,
                });
            }
        }
        rows
    }

    pub fn point(&self, distance: usize, p: f64) -> Option<&PointResult> {
        self.points.iter().find(|pt| pt.distance == distance && pt.p == p)
    }
}
