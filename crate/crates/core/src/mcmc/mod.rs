//! Metropolis sampling over the stabilizer orbit of a frame.
//!
//! A chain starts from a frame and repeatedly proposes multiplying it by a
//! uniformly chosen stabilizer. The syndrome and class of the frame never
//! change. With `n` the effective error count of the frame (see
//! [`crate::noise`]), a proposal changing `n` by `Δn` is accepted with
//! probability `min(1, exp(-β Δn))`, and `n` is recorded after every proposal.
//!
//! [`decode_single_temperature`] runs one chain per class at a fixed `β*` and
//! picks the class with the smallest mean `⟨n⟩`. [`decode_free_energy`]
//! integrates `⟨n⟩` over `β ∈ [0, β̄]` and picks the class with the smallest
//! integral, which is the class with the largest partition function.

mod parallel;
mod stats;

use rand::Rng;

use crate::code_geometry::{CodeLayout, EquivalenceClass, Pauli, PauliCounts, PauliFrame, Syndrome};
use crate::error::{invalid, Error, Result};
use crate::matching::{argmin_class, ClassChainSet, DecoderVerdict};
use crate::noise::{NoiseKind, NoiseModel, PauliCosts};
use crate::rng::{stream, Stream};
use crate::scalar::Scalar;

pub use parallel::{parallel_sweep_schedule, ParallelChain, ParallelSchedule, Rectangle, DEFAULT_RECTANGLE_SIZE};
pub use stats::{simpson, CountTally, MeanEstimate};

/// Metropolis chain confined to one syndrome and one class.
#[derive(Clone, Debug)]
pub struct MetropolisChain<'a, T> {
    layout: &'a CodeLayout,
    frame: PauliFrame,
    counts: PauliCounts,
    costs: PauliCosts<T>,
    beta: T,
    rng: Stream,
    tally: CountTally,
}

#[inline]
fn times(p: Pauli, flip: Pauli) -> Pauli {
    let (a, b) = p.bits();
    let (c, d) = flip.bits();
    Pauli::from_bits(a ^ c, b ^ d)
}

/// Change in `n` for a change `d` of the per-Pauli counts.
#[inline]
fn energy_delta<T: Scalar>(costs: &PauliCosts<T>, d: &[i32; 4]) -> T {
    let mut s = T::zero();
    for k in 1..4 {
        if d[k] != 0 {
            s = s + costs.cost[k] * T::of(d[k] as f64);
        }
    }
    s
}

#[inline]
fn accept<T: Scalar>(delta: T, beta: T, rng: &mut Stream) -> bool {
    if delta <= T::zero() || beta == T::zero() {
        return true;
    }
    if delta.is_nan() || beta.is_infinite() {
        return false;
    }
    let a = (-beta * delta).exp().to_f64_lossy();
    rng.gen::<f64>() < a
}

impl<'a, T: Scalar> MetropolisChain<'a, T> {
    /// `beta` may be `+∞`, in which case no move raising `n` is accepted.
    pub fn new(layout: &'a CodeLayout, seed: PauliFrame, model: &NoiseModel<T>, beta: T, rng: Stream) -> Result<Self> {
        Self::with_costs(layout, seed, model.costs()?, beta, rng)
    }

    pub fn with_costs(
        layout: &'a CodeLayout,
        seed: PauliFrame,
        costs: PauliCosts<T>,
        beta: T,
        rng: Stream,
    ) -> Result<Self> {
        if seed.len() != layout.n_qubits() {
            return Err(invalid(format!("seed has {} qubits, layout has {}", seed.len(), layout.n_qubits())));
        }
        if beta.is_nan() || beta < T::zero() {
            return Err(invalid(format!("inverse temperature must be non-negative, got {beta}")));
        }
        let counts = seed.counts();
        Ok(MetropolisChain { layout, frame: seed, counts, costs, beta, rng, tally: CountTally::default() })
    }

    pub fn frame(&self) -> &PauliFrame {
        &self.frame
    }

    pub fn counts(&self) -> PauliCounts {
        self.counts
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    /// Current effective error count.
    pub fn n(&self) -> T {
        self.costs.of_counts(&self.counts)
    }

    pub fn step_count(&self) -> u64 {
        self.tally.steps()
    }

    pub fn tally(&self) -> &CountTally {
        &self.tally
    }

    /// Running estimate of `⟨n⟩` over the recorded states.
    pub fn estimate(&self) -> MeanEstimate<T> {
        self.tally.estimate(&self.costs)
    }

    /// One proposal with a uniformly chosen stabilizer, then records `n`.
    /// Returns whether the move was accepted.
    pub fn step(&mut self) -> bool {
        let id = self.rng.gen_range(0..self.layout.n_stabilizers());
        let accepted = self.propose(id);
        self.record();
        accepted
    }

    /// Runs `steps` proposals without recording them.
    pub fn burn(&mut self, steps: u64) {
        for _ in 0..steps {
            let id = self.rng.gen_range(0..self.layout.n_stabilizers());
            self.propose(id);
        }
    }

    pub fn run(&mut self, steps: u64) {
        for _ in 0..steps {
            self.step();
        }
        debug_assert!(self.confined_to(&self.layout.syndrome_of(&self.frame), self.layout.class_of(&self.frame)));
    }

    /// `true` if the current frame has the given syndrome and class.
    pub fn confined_to(&self, syndrome: &Syndrome, class: EquivalenceClass) -> bool {
        self.layout.syndrome_of(&self.frame) == *syndrome && self.layout.class_of(&self.frame) == class
    }

    pub(crate) fn record(&mut self) {
        self.tally.push(&self.counts);
    }

    pub(crate) fn rng_mut(&mut self) -> &mut Stream {
        &mut self.rng
    }

    /// Metropolis test for multiplying by stabilizer `id`; applies it if
    /// accepted.
    pub(crate) fn propose(&mut self, id: usize) -> bool {
        let stab = self.layout.stabilizer(id);
        let flip = stab.kind.pauli();
        let mut d = [0i32; 4];
        for &q in &stab.support {
            let old = self.frame.get(q as usize);
            d[old.index()] -= 1;
            d[times(old, flip).index()] += 1;
        }
        let delta = energy_delta(&self.costs, &d);
        if !accept(delta, self.beta, &mut self.rng) {
            return false;
        }
        for &q in &stab.support {
            let q = q as usize;
            let old = self.frame.get(q);
            let new = times(old, flip);
            self.counts.remove(old);
            self.counts.add(new);
            self.frame.set(q, new);
        }
        true
    }
}

/// Parameters of the single-temperature decoder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleTempConfig<T> {
    pub beta_star: T,
    pub n_sample: u64,
    pub burn_in: u64,
}

impl<T: Scalar> SingleTempConfig<T> {
    /// `β* = f β̄` with `f = 0.85` for independent X/Z noise and `1` otherwise;
    /// `n_sample = L⁴`; no burn-in.
    pub fn for_model(model: &NoiseModel<T>, distance: usize) -> Result<Self> {
        let factor = match model.kind() {
            NoiseKind::IndependentXz => T::of(0.85),
            _ => T::one(),
        };
        Self::with_factor(model, distance, factor)
    }

    pub fn with_factor(model: &NoiseModel<T>, distance: usize, factor: T) -> Result<Self> {
        let cfg =
            SingleTempConfig { beta_star: factor * model.beta_bar()?, n_sample: (distance as u64).pow(4), burn_in: 0 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sample == 0 {
            return Err(invalid("n_sample must be at least 1"));
        }
        if self.beta_star.is_nan() || self.beta_star < T::zero() {
            return Err(invalid(format!("beta_star must be non-negative, got {}", self.beta_star)));
        }
        Ok(())
    }
}

fn check_seeds(layout: &CodeLayout, syndrome: &Syndrome, seeds: &ClassChainSet) -> Result<()> {
    for class in EquivalenceClass::ALL {
        let f = seeds.frame(class);
        if f.len() != layout.n_qubits() || layout.syndrome_of(f) != *syndrome || layout.class_of(f) != class {
            return Err(Error::Inconsistent(format!("seed for class {} does not match the syndrome", class.label())));
        }
    }
    Ok(())
}

/// Runs one chain per class at inverse temperature `beta` and returns the
/// four `⟨n⟩` estimates. Class `k` uses stream `(seed, k)`.
pub fn sample_class_means<T: Scalar>(
    layout: &CodeLayout,
    model: &NoiseModel<T>,
    beta: T,
    n_sample: u64,
    burn_in: u64,
    seeds: &ClassChainSet,
    seed: u64,
) -> Result<[MeanEstimate<T>; 4]> {
    let costs = model.costs()?;
    let mut out = [MeanEstimate::exact(T::zero()); 4];
    for class in EquivalenceClass::ALL {
        let k = class.index();
        let rng = stream(seed, &[k as u64]);
        let mut chain = MetropolisChain::with_costs(layout, seeds.frame(class).clone(), costs, beta, rng)?;
        chain.burn(burn_in);
        chain.run(n_sample);
        out[k] = chain.estimate();
    }
    Ok(out)
}

/// Single-temperature decoder. Scores are the per-class `⟨n⟩` estimates; the
/// correction is the seed of the chosen class.
pub fn decode_single_temperature<T: Scalar>(
    layout: &CodeLayout,
    syndrome: &Syndrome,
    model: &NoiseModel<T>,
    cfg: &SingleTempConfig<T>,
    seeds: &ClassChainSet,
    seed: u64,
) -> Result<DecoderVerdict<T>> {
    cfg.validate()?;
    check_seeds(layout, syndrome, seeds)?;
    let est = sample_class_means(layout, model, cfg.beta_star, cfg.n_sample, cfg.burn_in, seeds, seed)?;
    let scores = est.map(|e| e.mean);
    let class = argmin_class(&scores);
    Ok(DecoderVerdict { class, scores, correction: seeds.frame(class).clone() })
}

/// Smallest false-class `⟨n⟩` minus the true-class `⟨n⟩`; positive when the
/// decoder would pick the true class.
pub fn distinguishability<T: Scalar>(estimates: &[T; 4], true_class: Option<EquivalenceClass>) -> Result<T> {
    let truth = true_class.ok_or_else(|| Error::Unsupported("distinguishability needs the true class".into()))?;
    let min_false = EquivalenceClass::ALL
        .iter()
        .filter(|&&c| c != truth)
        .map(|c| estimates[c.index()])
        .fold(T::infinity(), |a, b| a.min(b));
    Ok(min_false - estimates[truth.index()])
}

/// `n_points` equally spaced inverse temperatures from 0 to `beta_max`.
pub fn equidistant_temps<T: Scalar>(beta_max: T, n_points: usize) -> Result<Vec<T>> {
    if n_points < 3 || n_points.is_multiple_of(2) {
        return Err(invalid(format!("Simpson integration needs an odd number (>= 3) of points, got {n_points}")));
    }
    let h = beta_max / T::of_u64(n_points as u64 - 1);
    Ok((0..n_points).map(|i| h * T::of_u64(i as u64)).collect())
}

/// Per-class thermodynamic integration results.
#[derive(Clone, Debug)]
pub struct FreeEnergyProfile<T> {
    pub temps: Vec<T>,
    /// `curves[i][k]`: `⟨n⟩` of class `k` at `temps[i]`.
    pub curves: Vec<[MeanEstimate<T>; 4]>,
    /// `∫ ⟨n⟩ dβ` over the grid, per class.
    pub integrals: [T; 4],
    /// `log Z_E` at the last temperature, normalised so that a class orbit
    /// counts its members with weight `exp(-β n)`.
    pub log_z: [T; 4],
}

/// Samples `⟨n⟩` for every class on the grid `temps` and integrates with the
/// Simpson rule. At `β = 0` the closed-form value is used: the orbit is then
/// uniform over each qubit's four Paulis.
pub fn free_energy_profile<T: Scalar>(
    layout: &CodeLayout,
    model: &NoiseModel<T>,
    temps: &[T],
    n_sample: u64,
    seeds: &ClassChainSet,
    seed: u64,
) -> Result<FreeEnergyProfile<T>> {
    let n = temps.len();
    if n < 3 || n.is_multiple_of(2) {
        return Err(invalid(format!("Simpson integration needs an odd number (>= 3) of temperatures, got {n}")));
    }
    if temps[0] != T::zero() {
        return Err(invalid("the temperature grid must start at beta = 0"));
    }
    let h = temps[1] - temps[0];
    if !(h > T::zero()) {
        return Err(invalid("the temperature grid must be increasing"));
    }
    for w in temps.windows(2) {
        if ((w[1] - w[0]) - h).abs() > h * T::of(1e-4) {
            return Err(invalid("the temperature grid must be equidistant"));
        }
    }
    if n_sample == 0 {
        return Err(invalid("n_sample must be at least 1"));
    }
    let costs = model.costs()?;
    let hot = T::of_u64(layout.n_qubits() as u64) * costs.uniform_mean();
    let mut curves = Vec::with_capacity(n);
    curves.push([MeanEstimate::exact(hot); 4]);
    for (i, &beta) in temps.iter().enumerate().skip(1) {
        let mut row = [MeanEstimate::exact(T::zero()); 4];
        for class in EquivalenceClass::ALL {
            let k = class.index();
            let rng = stream(seed, &[k as u64, i as u64]);
            let mut chain = MetropolisChain::with_costs(layout, seeds.frame(class).clone(), costs, beta, rng)?;
            chain.run(n_sample);
            row[k] = chain.estimate();
        }
        curves.push(row);
    }
    let mut integrals = [T::zero(); 4];
    let mut log_z = [T::zero(); 4];
    let log_orbit = T::of_u64(layout.n_stabilizers() as u64) * T::LN_2();
    for k in 0..4 {
        let values: Vec<T> = curves.iter().map(|row| row[k].mean).collect();
        integrals[k] = simpson(&values, h).expect("odd grid");
        log_z[k] = log_orbit - integrals[k];
    }
    Ok(FreeEnergyProfile { temps: temps.to_vec(), curves, integrals, log_z })
}

/// Free-energy decoder: the class with the smallest `∫₀^β̄ ⟨n⟩ dβ`.
pub fn decode_free_energy<T: Scalar>(
    layout: &CodeLayout,
    syndrome: &Syndrome,
    model: &NoiseModel<T>,
    temps: &[T],
    n_sample: u64,
    seeds: &ClassChainSet,
    seed: u64,
) -> Result<DecoderVerdict<T>> {
    check_seeds(layout, syndrome, seeds)?;
    let profile = free_energy_profile(layout, model, temps, n_sample, seeds, seed)?;
    let class = argmin_class(&profile.integrals);
    Ok(DecoderVerdict { class, scores: profile.integrals, correction: seeds.frame(class).clone() })
}
