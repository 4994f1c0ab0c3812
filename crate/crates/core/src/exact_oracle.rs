//! Brute-force class statistics for small codes.
//!
//! The stabilizer group of a distance-`L` code has `2^n_stab` elements. For
//! `n_stab <= 16` (`L <= 3`) every member of a class orbit is enumerated in
//! Gray-code order, so consecutive frames differ by one stabilizer, and the
//! orbit is stored as a histogram of Pauli compositions. Partition functions
//! and Boltzmann averages then follow at any `β` and for any cost vector.

use std::collections::BTreeMap;

use crate::code_geometry::{apply_stabilizer, CodeLayout, EquivalenceClass, PauliCounts, PauliFrame, Syndrome};
use crate::error::{invalid, Error, Result};
use crate::matching::match_syndrome;
use crate::noise::{NoiseModel, PauliCosts};
use crate::scalar::Scalar;

/// Largest stabilizer count the oracle enumerates.
pub const MAX_STABILIZERS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassOrbit {
    pub class: EquivalenceClass,
    pub representative: PauliFrame,
    pub orbit_size: u64,
    /// Number of orbit members with each Pauli composition.
    pub histogram: BTreeMap<PauliCounts, u64>,
}

pub fn enumerate_orbit(layout: &CodeLayout, representative: &PauliFrame) -> Result<ClassOrbit> {
    let n_stab = layout.n_stabilizers();
    if n_stab > MAX_STABILIZERS {
        return Err(Error::Unsupported(format!(
            "exact enumeration is limited to {MAX_STABILIZERS} stabilizers, distance {} has {n_stab}",
            layout.distance()
        )));
    }
    if representative.len() != layout.n_qubits() {
        return Err(invalid("representative sized for a different layout"));
    }
    let stabs: Vec<_> = layout.stabilizers().collect();
    let mut frame = representative.clone();
    let mut histogram = BTreeMap::new();
    *histogram.entry(frame.counts()).or_insert(0) += 1;
    let mut counts = frame.counts();
    for i in 1u64..1 << n_stab {
        let stab = stabs[i.trailing_zeros() as usize];
        for &q in &stab.support {
            counts.remove(frame.get(q as usize));
        }
        apply_stabilizer(&mut frame, stab);
        for &q in &stab.support {
            counts.add(frame.get(q as usize));
        }
        *histogram.entry(counts).or_insert(0) += 1;
    }
    Ok(ClassOrbit {
        class: layout.class_of(representative),
        representative: representative.clone(),
        orbit_size: 1 << n_stab,
        histogram,
    })
}

impl ClassOrbit {
    /// Orbit histogram keyed by weight with a Y counted once.
    pub fn weight_histogram(&self) -> BTreeMap<u32, u64> {
        let mut h = BTreeMap::new();
        for (c, &k) in &self.histogram {
            *h.entry(c.weight()).or_insert(0) += k;
        }
        h
    }

    pub fn min_weight(&self) -> u32 {
        self.histogram.keys().map(PauliCounts::weight).min().expect("orbit is never empty")
    }

    /// Smallest weight with a Y counted as two errors.
    pub fn min_separable_weight(&self) -> u32 {
        self.histogram.keys().map(PauliCounts::separable_weight).min().expect("orbit is never empty")
    }

    /// Smallest effective count under `costs`.
    pub fn min_cost<T: Scalar>(&self, costs: &PauliCosts<T>) -> T {
        self.histogram.keys().map(|c| costs.of_counts(c)).fold(T::infinity(), |a, b| a.min(b))
    }
}

/// `log Z` and `⟨n⟩` of one orbit at one inverse temperature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoltzmannSummary<T> {
    /// `log Σ exp(-β n)` over the orbit.
    pub log_z: T,
    pub mean_n: T,
}

/// Exact Boltzmann sums over an orbit, computed with a shifted exponent so
/// that large `β` does not underflow.
pub fn exact_boltzmann<T: Scalar>(orbit: &ClassOrbit, costs: &PauliCosts<T>, beta: T) -> BoltzmannSummary<T> {
    let terms: Vec<(T, T)> = orbit.histogram.iter().map(|(c, &k)| (costs.of_counts(c), T::of_u64(k))).collect();
    let e0 = terms.iter().map(|&(n, _)| beta * n).fold(T::infinity(), |a, b| a.min(b));
    let mut z = T::zero();
    let mut zn = T::zero();
    for &(n, k) in &terms {
        let w = k * (e0 - beta * n).exp();
        z = z + w;
        zn = zn + w * n;
    }
    BoltzmannSummary { log_z: z.ln() - e0, mean_n: zn / z }
}

/// Exact per-class results for one syndrome.
#[derive(Clone, Debug)]
pub struct ExactPosterior<T> {
    pub orbits: [ClassOrbit; 4],
    /// `log Z_E` at the model's `β̄`.
    pub log_z: [T; 4],
    /// Normalised class probabilities.
    pub probabilities: [T; 4],
    /// Most likely class; ties go to the earliest of I, X, Z, Y.
    pub class: EquivalenceClass,
}

impl<T: Scalar> ExactPosterior<T> {
    /// Classes whose probability equals the maximum up to `rel_tol`.
    pub fn most_likely(&self, rel_tol: T) -> Vec<EquivalenceClass> {
        let best = self.probabilities.iter().fold(T::zero(), |a, &b| a.max(b));
        EquivalenceClass::ALL
            .into_iter()
            .filter(|c| self.probabilities[c.index()] >= best * (T::one() - rel_tol))
            .collect()
    }
}

pub fn exact_posterior<T: Scalar>(
    layout: &CodeLayout,
    syndrome: &Syndrome,
    model: &NoiseModel<T>,
) -> Result<ExactPosterior<T>> {
    if layout.n_stabilizers() > MAX_STABILIZERS {
        return Err(Error::Unsupported(format!("exact decoding is limited to {MAX_STABILIZERS} stabilizers")));
    }
    let beta = model.beta_bar()?;
    let costs = model.costs()?;
    let chains = match_syndrome(layout, syndrome)?.chains;
    let orbits = [0, 1, 2, 3].map(|k| enumerate_orbit(layout, &chains.frames[k]));
    let orbits = {
        let mut out = Vec::with_capacity(4);
        for o in orbits {
            out.push(o?);
        }
        <[ClassOrbit; 4]>::try_from(out).expect("four orbits")
    };
    let log_z = [0, 1, 2, 3].map(|k| exact_boltzmann(&orbits[k], &costs, beta).log_z);
    let top = log_z.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
    let w = log_z.map(|l| (l - top).exp());
    let total = w.iter().fold(T::zero(), |a, &b| a + b);
    let probabilities = w.map(|x| x / total);
    let mut class = EquivalenceClass::I;
    for c in EquivalenceClass::ALL {
        if log_z[c.index()] > log_z[class.index()] {
            class = c;
        }
    }
    Ok(ExactPosterior { orbits, log_z, probabilities, class })
}

/// Most probable class of the syndrome.
pub fn exact_decoder<T: Scalar>(
    layout: &CodeLayout,
    syndrome: &Syndrome,
    model: &NoiseModel<T>,
) -> Result<EquivalenceClass> {
    Ok(exact_posterior(layout, syndrome, model)?.class)
}
