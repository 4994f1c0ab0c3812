//! Smallest sample count at which the single-temperature decoder keeps up
//! with the better matching decoder.

use rayon::prelude::*;

use super::campaign::TrialContext;
use super::config::{Algorithm, ExperimentConfig};
use crate::error::{Error, Result};
use crate::noise::NoiseKind;

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingConfig {
    pub model: NoiseKind,
    pub p: f64,
    pub distances: Vec<usize>,
    /// Paired trials per evaluation.
    pub trials: u64,
    pub seed: u64,
    /// Search budget: largest `n_sample` tried.
    pub max_n_sample: u64,
    pub workers: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingPoint {
    pub distance: usize,
    /// Smallest `n_sample` found to reach parity, if any.
    pub n_sample: Option<u64>,
    /// Largest `n_sample` tried that did not reach parity (0 if none).
    pub lower: u64,
    pub failures_best_matching: u64,
    /// Failures of the sampler at `n_sample`, or at the budget if unresolved.
    pub failures_sampler: u64,
    pub trials: u64,
}

/// `n = prefactor · L^exponent`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLawFit {
    pub prefactor: f64,
    pub exponent: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingReport {
    pub points: Vec<ScalingPoint>,
    /// `None` unless at least two distances were resolved.
    pub fit: Option<PowerLawFit>,
}

/// Least-squares line through `(ln x, ln y)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Option<PowerLawFit> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 2 || points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return None;
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let exponent = sxy / sxx;
    Some(PowerLawFit { prefactor: (my - exponent * mx).exp(), exponent })
}

fn failures(ctx: &TrialContext, trials: u64, pool: &rayon::ThreadPool) -> Result<Vec<u64>> {
    let recs = pool.install(|| (0..trials).into_par_iter().map(|t| ctx.run_trial(t)).collect::<Result<Vec<_>>>())?;
    let mut f = vec![0u64; ctx.algorithms.len()];
    for r in recs {
        for (k, o) in r.outcomes.iter().enumerate() {
            f[k] += (!o.success) as u64;
        }
    }
    Ok(f)
}

pub fn scaling_probe(cfg: &ScalingConfig) -> Result<ScalingReport> {
    if cfg.distances.is_empty() || cfg.trials == 0 || cfg.max_n_sample == 0 {
        return Err(Error::Config("scaling probe needs distances, trials and a positive budget".into()));
    }
    let workers = cfg.workers.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| Error::Config(e.to_string()))?;
    let mut points = Vec::new();
    for &l in &cfg.distances {
        let mut base = ExperimentConfig {
            distances: vec![l],
            model: cfg.model,
            p: vec![cfg.p],
            algorithms: vec![Algorithm::StandardMwpm, Algorithm::EnhancedMwpm],
            trials: Some(cfg.trials),
            seed: Some(cfg.seed),
            ..ExperimentConfig::default()
        };
        base.validate()?;
        let matching = failures(&TrialContext::new(&base, l, cfg.p)?, cfg.trials, &pool)?;
        let best = matching[0].min(matching[1]);
        base.algorithms = vec![Algorithm::SingleTemperature];
        let mut sampler = |n: u64| -> Result<u64> {
            base.n_sample = Some(n);
            Ok(failures(&TrialContext::new(&base, l, cfg.p)?, cfg.trials, &pool)?[0])
        };
        let mut lower = 0u64;
        let mut n = 1u64;
        let mut hit = None;
        while n <= cfg.max_n_sample {
            let f = sampler(n)?;
            if f <= best {
                hit = Some((n, f));
                break;
            }
            lower = n;
            n = n.saturating_mul(2);
        }
        let point = match hit {
            None => ScalingPoint {
                distance: l,
                n_sample: None,
                lower,
                failures_best_matching: best,
                failures_sampler: sampler(cfg.max_n_sample)?,
                trials: cfg.trials,
            },
            Some((mut hi, mut f_hi)) => {
                while hi - lower > 1 {
                    let mid = lower + (hi - lower) / 2;
                    let f = sampler(mid)?;
                    if f <= best {
                        hi = mid;
                        f_hi = f;
                    } else {
                        lower = mid;
                    }
                }
                ScalingPoint {
                    distance: l,
                    n_sample: Some(hi),
                    lower,
                    failures_best_matching: best,
                    failures_sampler: f_hi,
                    trials: cfg.trials,
                }
            }
        };
        points.push(point);
    }
    let resolved: Vec<(f64, f64)> =
        points.iter().filter_map(|p| p.n_sample.map(|n| (p.distance as f64, n as f64))).collect();
    Ok(ScalingReport { fit: fit_power_law(&resolved), points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_is_recovered() {
        let pts: Vec<(f64, f64)> = [5.0f64, 7.0, 9.0].iter().map(|&l| (l, 0.11 * l.powf(3.51))).collect();
        let f = fit_power_law(&pts).unwrap();
        assert!((f.exponent - 3.51).abs() < 1e-9);
        assert!((f.prefactor - 0.11).abs() < 1e-9);
        assert!(fit_power_law(&[(5.0, 10.0)]).is_none());
        assert!(fit_power_law(&[(5.0, 10.0), (5.0, 12.0)]).is_none());
    }
}
