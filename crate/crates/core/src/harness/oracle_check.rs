//! Decoders against brute-force enumeration at distance 3.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::code_geometry::{CodeLayout, EquivalenceClass};
use crate::error::{Error, Result};
use crate::exact_oracle::{enumerate_orbit, exact_posterior};
use crate::matching::match_syndrome;
use crate::mcmc::{decode_single_temperature, SingleTempConfig};
use crate::noise::NoiseModel;
use crate::rng::{derive_seed, stream};

/// Relative tolerance under which two class probabilities count as tied.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleCheckConfig {
    pub p: f64,
    pub syndromes: u64,
    /// Sampler steps per class as a multiple of `L⁴`.
    pub n_sample_factor: u64,
    pub seed: u64,
    pub workers: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OracleCheckReport {
    pub syndromes: u64,
    /// Syndromes whose four matching chains all reach the in-class minimum
    /// weight (a Y counted as two errors).
    pub minimal: u64,
    /// Syndromes whose orbits are unchanged under a deformed representative.
    pub self_consistent: u64,
    /// Exact decoder picks the class of the sampled error.
    pub oracle_success: u64,
    /// Single-temperature verdict is among the exact decoder's most likely
    /// classes.
    pub agreement: u64,
    /// Single-temperature verdict is the class of the sampled error.
    pub sampler_success: u64,
}

impl OracleCheckReport {
    pub fn rate(&self, k: u64) -> f64 {
        if self.syndromes == 0 {
            0.0
        } else {
            k as f64 / self.syndromes as f64
        }
    }

    pub fn minimality_passed(&self) -> bool {
        self.minimal == self.syndromes
    }

    /// Oracle self-consistency is total and the sampler agrees with the
    /// oracle at least as often as the oracle is right.
    pub fn agreement_passed(&self) -> bool {
        self.self_consistent == self.syndromes && self.agreement >= self.oracle_success
    }

    pub fn passed(&self) -> bool {
        self.minimality_passed() && self.agreement_passed()
    }
}

impl fmt::Display for OracleCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "syndromes            {}", self.syndromes)?;
        writeln!(f, "minimal chains       {} ({:.4})", self.minimal, self.rate(self.minimal))?;
        writeln!(f, "oracle consistent    {} ({:.4})", self.self_consistent, self.rate(self.self_consistent))?;
        writeln!(f, "oracle success       {} ({:.4})", self.oracle_success, self.rate(self.oracle_success))?;
        writeln!(f, "sampler agreement    {} ({:.4})", self.agreement, self.rate(self.agreement))?;
        writeln!(f, "sampler success      {} ({:.4})", self.sampler_success, self.rate(self.sampler_success))
    }
}

#[derive(Default)]
struct One {
    minimal: bool,
    consistent: bool,
    oracle_ok: bool,
    agree: bool,
    sampler_ok: bool,
}

fn check_one(
    layout: &CodeLayout,
    model: &NoiseModel<f64>,
    cfg: &SingleTempConfig<f64>,
    seed: u64,
    i: u64,
) -> Result<One> {
    let mut rng = stream(seed, &[3, i, 0]);
    let frame = model.sample_frame(layout, &mut rng);
    let truth = layout.class_of(&frame);
    let syndrome = layout.syndrome_of(&frame);
    let matched = match_syndrome(layout, &syndrome)?;
    let post = exact_posterior(layout, &syndrome, model)?;
    let minimal = EquivalenceClass::ALL
        .iter()
        .all(|c| matched.chains.frame(*c).counts().separable_weight() == post.orbits[c.index()].min_separable_weight());
    let mut consistent = true;
    for c in EquivalenceClass::ALL {
        let mut rep = matched.chains.frame(c).clone();
        let mask: u32 = rng.gen();
        for s in 0..layout.n_stabilizers() {
            if mask >> s & 1 == 1 {
                rep *= &layout.stabilizer_frame(s);
            }
        }
        consistent &= enumerate_orbit(layout, &rep)?.histogram == post.orbits[c.index()].histogram;
    }
    let v = decode_single_temperature(layout, &syndrome, model, cfg, &matched.chains, derive_seed(seed, &[3, i, 1]))?;
    Ok(One {
        minimal,
        consistent,
        oracle_ok: post.class == truth,
        agree: post.most_likely(TIE_TOLERANCE).contains(&v.class),
        sampler_ok: v.class == truth,
    })
}

pub fn oracle_check(cfg: &OracleCheckConfig) -> Result<OracleCheckReport> {
    if cfg.syndromes == 0 || cfg.n_sample_factor == 0 {
        return Err(Error::Config("oracle check needs syndromes and a positive sample factor".into()));
    }
    let layout = CodeLayout::new(3)?;
    let model = NoiseModel::depolarizing(cfg.p).map_err(|e| Error::Config(e.to_string()))?;
    let mut st = SingleTempConfig::for_model(&model, 3).map_err(|e| Error::Config(e.to_string()))?;
    st.n_sample *= cfg.n_sample_factor;
    let workers = cfg.workers.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| Error::Config(e.to_string()))?;
    let results: Vec<One> = pool.install(|| {
        (0..cfg.syndromes).into_par_iter().map(|i| check_one(&layout, &model, &st, cfg.seed, i)).collect::<Result<_>>()
    })?;
    let mut r = OracleCheckReport { syndromes: cfg.syndromes, ..Default::default() };
    for o in results {
        r.minimal += o.minimal as u64;
        r.self_consistent += o.consistent as u64;
        r.oracle_success += o.oracle_ok as u64;
        r.agreement += o.agree as u64;
        r.sampler_success += o.sampler_ok as u64;
    }
    Ok(r)
}
