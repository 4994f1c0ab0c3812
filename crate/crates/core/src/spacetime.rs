//! Hypotheses for decoding with faulty stabilizer measurements.
//!
//! Stabilizers are measured at times `t = 1..=t_max`. Data errors occur in
//! the intervals `[t, t+1]`, and each measurement outcome may be flipped. The
//! outcome at time `t` is the syndrome of the product of all frames of the
//! intervals ending at or before `t`, XOR the flip bit. A hypothesis is
//! consistent with an observed record if it predicts every outcome.
//!
//! The energy of a hypothesis is `n + ξ m`, with `n` the effective error
//! count summed over intervals and `m` the number of flipped outcomes. Two
//! kinds of moves keep a hypothesis consistent and preserve the class of the
//! time-aggregated frame:
//!
//! * multiplying the frame of one interval by a stabilizer;
//! * a deformation at an interior time `1 < t < t_max`: multiply a qubit by
//!   the same Pauli in `[t-1, t]` and `[t, t+1]` and invert the flips at `t`
//!   of the stabilizers anticommuting with that Pauli.

use rand::Rng;

use crate::code_geometry::{apply_stabilizer, CodeLayout, EquivalenceClass, Pauli, PauliCounts, PauliFrame, StabKind};
use crate::error::{invalid, Error, Result};
use crate::noise::{NoiseModel, PauliCosts};
use crate::rng::Stream;
use crate::scalar::Scalar;

/// Probability of a wrong measurement outcome and the derived flip cost `ξ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementModel<T> {
    p_m: T,
    xi: T,
}

impl<T: Scalar> MeasurementModel<T> {
    /// `ξ = log((1 - p_M) / p_M) / β̄`.
    pub fn new(p_m: T, model: &NoiseModel<T>) -> Result<Self> {
        if !(p_m > T::zero() && p_m <= T::of(0.5)) {
            return Err(invalid(format!("measurement error rate must lie in (0, 1/2], got {p_m}")));
        }
        let xi = ((T::one() - p_m) / p_m).ln() / model.beta_bar()?;
        Ok(MeasurementModel { p_m, xi })
    }

    pub fn p_m(&self) -> T {
        self.p_m
    }

    pub fn xi(&self) -> T {
        self.xi
    }
}

/// Observed outcomes: `bits[t - 1][s]` is `true` when stabilizer `s` (global
/// id) reported `-1` at time `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub bits: Vec<Vec<bool>>,
}

impl MeasurementRecord {
    pub fn t_max(&self) -> usize {
        self.bits.len()
    }
}

/// Syndrome of `frame` as one bit per global stabilizer id.
pub fn syndrome_bits(layout: &CodeLayout, frame: &PauliFrame) -> Vec<bool> {
    let syn = layout.syndrome_of(frame);
    let nz = layout.z_stabilizers().len();
    let mut bits = vec![false; layout.n_stabilizers()];
    for &a in &syn.p_anyons {
        bits[a as usize] = true;
    }
    for &a in &syn.s_anyons {
        bits[nz + a as usize] = true;
    }
    bits
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpacetimeHypothesis {
    /// `frames[t - 1]` is the data error in interval `[t, t+1]`.
    pub frames: Vec<PauliFrame>,
    /// `flips[t - 1][s]`: outcome of stabilizer `s` at time `t` was wrong.
    pub flips: Vec<Vec<bool>>,
}

impl SpacetimeHypothesis {
    /// No data errors; every `-1` outcome is a wrong measurement.
    pub fn all_flips(layout: &CodeLayout, record: &MeasurementRecord) -> Result<Self> {
        if record.t_max() < 2 {
            return Err(invalid("a record needs at least two measurement rounds"));
        }
        if record.bits.iter().any(|b| b.len() != layout.n_stabilizers()) {
            return Err(invalid("record sized for a different layout"));
        }
        Ok(SpacetimeHypothesis {
            frames: vec![PauliFrame::identity(layout.n_qubits()); record.t_max() - 1],
            flips: record.bits.clone(),
        })
    }

    pub fn t_max(&self) -> usize {
        self.flips.len()
    }

    pub fn predicted_record(&self, layout: &CodeLayout) -> MeasurementRecord {
        let mut cum = PauliFrame::identity(layout.n_qubits());
        let mut bits = Vec::with_capacity(self.t_max());
        for t in 1..=self.t_max() {
            if t >= 2 {
                cum *= &self.frames[t - 2];
            }
            let mut b = syndrome_bits(layout, &cum);
            for (x, &f) in b.iter_mut().zip(&self.flips[t - 1]) {
                *x ^= f;
            }
            bits.push(b);
        }
        MeasurementRecord { bits }
    }

    pub fn is_consistent(&self, layout: &CodeLayout, record: &MeasurementRecord) -> bool {
        self.frames.len() + 1 == self.flips.len() && self.predicted_record(layout) == *record
    }

    /// Product of the frames of all intervals.
    pub fn aggregate(&self) -> PauliFrame {
        let mut f = PauliFrame::identity(self.frames[0].len());
        for g in &self.frames {
            f *= g;
        }
        f
    }

    pub fn class(&self, layout: &CodeLayout) -> EquivalenceClass {
        layout.class_of(&self.aggregate())
    }

    /// Summed Pauli composition over intervals and the number of flips.
    pub fn tally(&self) -> (PauliCounts, u64) {
        let mut c = PauliCounts::default();
        for f in &self.frames {
            let k = f.counts();
            c.x += k.x;
            c.y += k.y;
            c.z += k.z;
        }
        let m = self.flips.iter().flatten().filter(|&&b| b).count() as u64;
        (c, m)
    }
}

fn anticommutes(kind: StabKind, p: Pauli) -> bool {
    let (x, z) = p.bits();
    match kind {
        StabKind::Z => x,
        StabKind::X => z,
    }
}

/// Deformation at time `t` by Pauli `p` on qubit `q`.
pub fn deformation_move(
    layout: &CodeLayout,
    hyp: &mut SpacetimeHypothesis,
    q: usize,
    t: usize,
    p: Pauli,
) -> Result<()> {
    let t_max = hyp.t_max();
    if t <= 1 || t >= t_max {
        return Err(invalid(format!("deformations need 1 < t < t_max = {t_max}, got t = {t}")));
    }
    if q >= layout.n_qubits() {
        return Err(invalid(format!("qubit {q} out of range")));
    }
    hyp.frames[t - 2].mul_qubit(q, p);
    hyp.frames[t - 1].mul_qubit(q, p);
    for &s in layout.stabilizers_of_qubit(q) {
        if anticommutes(layout.stabilizer(s as usize).kind, p) {
            let b = &mut hyp.flips[t - 1][s as usize];
            *b = !*b;
        }
    }
    Ok(())
}

/// `n + ξ m`; fails if the hypothesis does not explain `record`.
pub fn spacetime_energy<T: Scalar>(
    layout: &CodeLayout,
    hyp: &SpacetimeHypothesis,
    record: &MeasurementRecord,
    model: &NoiseModel<T>,
    mm: &MeasurementModel<T>,
) -> Result<T> {
    if !hyp.is_consistent(layout, record) {
        return Err(Error::Inconsistent("hypothesis does not reproduce the measurement record".into()));
    }
    let (c, m) = hyp.tally();
    Ok(model.costs()?.of_counts(&c) + mm.xi * T::of_u64(m))
}

/// Draws a data-error history and a faulty record for it.
pub fn sample_history<T: Scalar, R: Rng + ?Sized>(
    layout: &CodeLayout,
    model: &NoiseModel<T>,
    mm: &MeasurementModel<T>,
    t_max: usize,
    rng: &mut R,
) -> Result<(SpacetimeHypothesis, MeasurementRecord)> {
    if t_max < 2 {
        return Err(invalid("t_max must be at least 2"));
    }
    let frames = (1..t_max).map(|_| model.sample_frame(layout, rng)).collect();
    let pm = mm.p_m.to_f64_lossy();
    let flips = (0..t_max).map(|_| (0..layout.n_stabilizers()).map(|_| rng.gen::<f64>() < pm).collect()).collect();
    let truth = SpacetimeHypothesis { frames, flips };
    let record = truth.predicted_record(layout);
    Ok((truth, record))
}

/// A proposal of the spacetime sampler.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpacetimeMove {
    /// Multiply the frame of interval `[t, t+1]` by stabilizer `stab`.
    Stabilizer {
        t: usize,
        stab: usize,
    },
    Deformation {
        t: usize,
        qubit: usize,
        pauli: Pauli,
    },
}

/// Metropolis sampler over consistent hypotheses with energy `n + ξ m`.
/// Proposals are drawn uniformly from all stabilizer moves and all X and Z
/// deformations.
#[derive(Clone, Debug)]
pub struct SpacetimeChain<'a, T> {
    layout: &'a CodeLayout,
    hyp: SpacetimeHypothesis,
    counts: PauliCounts,
    flips: u64,
    costs: PauliCosts<T>,
    xi: T,
    beta: T,
    rng: Stream,
}

impl<'a, T: Scalar> SpacetimeChain<'a, T> {
    pub fn new(
        layout: &'a CodeLayout,
        hyp: SpacetimeHypothesis,
        model: &NoiseModel<T>,
        mm: &MeasurementModel<T>,
        beta: T,
        rng: Stream,
    ) -> Result<Self> {
        if hyp.t_max() < 2 || hyp.frames.len() + 1 != hyp.t_max() {
            return Err(invalid("hypothesis needs t_max >= 2 and one frame per interval"));
        }
        if beta.is_nan() || beta < T::zero() {
            return Err(invalid(format!("inverse temperature must be non-negative, got {beta}")));
        }
        let (counts, flips) = hyp.tally();
        Ok(SpacetimeChain { layout, hyp, counts, flips, costs: model.costs()?, xi: mm.xi, beta, rng })
    }

    pub fn hypothesis(&self) -> &SpacetimeHypothesis {
        &self.hyp
    }

    /// Incrementally tracked composition and flip count.
    pub fn tally(&self) -> (PauliCounts, u64) {
        (self.counts, self.flips)
    }

    pub fn energy(&self) -> T {
        self.costs.of_counts(&self.counts) + self.xi * T::of_u64(self.flips)
    }

    pub fn n_moves(&self) -> usize {
        let t_max = self.hyp.t_max();
        (t_max - 1) * self.layout.n_stabilizers() + (t_max - 2) * self.layout.n_qubits() * 2
    }

    pub fn random_move(&mut self) -> SpacetimeMove {
        let t_max = self.hyp.t_max();
        let k = self.rng.gen_range(0..self.n_moves());
        let ns = self.layout.n_stabilizers();
        if k < (t_max - 1) * ns {
            SpacetimeMove::Stabilizer { t: 1 + k / ns, stab: k % ns }
        } else {
            let k = k - (t_max - 1) * ns;
            let nq = self.layout.n_qubits();
            let pauli = if k.is_multiple_of(2) { Pauli::X } else { Pauli::Z };
            let k = k / 2;
            SpacetimeMove::Deformation { t: 2 + k / nq, qubit: k % nq, pauli }
        }
    }

    /// Changes of the x, y, z counts (indexed like [`Pauli::index`]) and of
    /// the flip count if `mv` were applied.
    fn delta(&self, mv: SpacetimeMove) -> ([i32; 4], i64) {
        let mut d = [0i32; 4];
        let touch = |d: &mut [i32; 4], old: Pauli, p: Pauli| {
            let (a, b) = old.bits();
            let (c, e) = p.bits();
            d[old.index()] -= 1;
            d[Pauli::from_bits(a ^ c, b ^ e).index()] += 1;
        };
        match mv {
            SpacetimeMove::Stabilizer { t, stab } => {
                let s = self.layout.stabilizer(stab);
                let f = &self.hyp.frames[t - 1];
                for &q in &s.support {
                    touch(&mut d, f.get(q as usize), s.kind.pauli());
                }
                (d, 0)
            }
            SpacetimeMove::Deformation { t, qubit, pauli } => {
                touch(&mut d, self.hyp.frames[t - 2].get(qubit), pauli);
                touch(&mut d, self.hyp.frames[t - 1].get(qubit), pauli);
                let mut dm = 0i64;
                for &s in self.layout.stabilizers_of_qubit(qubit) {
                    if anticommutes(self.layout.stabilizer(s as usize).kind, pauli) {
                        dm += if self.hyp.flips[t - 1][s as usize] { -1 } else { 1 };
                    }
                }
                (d, dm)
            }
        }
    }

    /// Applies `mv` unconditionally, updating the tracked tallies.
    pub fn apply(&mut self, mv: SpacetimeMove) -> Result<()> {
        let t_max = self.hyp.t_max();
        let in_range = match mv {
            SpacetimeMove::Stabilizer { t, stab } => t >= 1 && t < t_max && stab < self.layout.n_stabilizers(),
            SpacetimeMove::Deformation { t, qubit, .. } => t > 1 && t < t_max && qubit < self.layout.n_qubits(),
        };
        if !in_range {
            return Err(invalid(format!("{mv:?} is out of range for t_max = {t_max}")));
        }
        let (d, dm) = self.delta(mv);
        match mv {
            SpacetimeMove::Stabilizer { t, stab } => {
                apply_stabilizer(&mut self.hyp.frames[t - 1], self.layout.stabilizer(stab));
            }
            SpacetimeMove::Deformation { t, qubit, pauli } => {
                deformation_move(self.layout, &mut self.hyp, qubit, t, pauli)?
            }
        }
        self.counts.x = (self.counts.x as i64 + d[1] as i64) as u32;
        self.counts.y = (self.counts.y as i64 + d[2] as i64) as u32;
        self.counts.z = (self.counts.z as i64 + d[3] as i64) as u32;
        self.flips = (self.flips as i64 + dm) as u64;
        Ok(())
    }

    /// One Metropolis proposal; returns whether it was accepted.
    pub fn step(&mut self) -> bool {
        let mv = self.random_move();
        let (d, dm) = self.delta(mv);
        let mut delta = self.xi * T::of(dm as f64);
        for k in 1..4 {
            if d[k] != 0 {
                delta = delta + self.costs.cost[k] * T::of(d[k] as f64);
            }
        }
        let ok = if delta <= T::zero() || self.beta == T::zero() {
            true
        } else if delta.is_nan() || self.beta.is_infinite() {
            false
        } else {
            self.rng.gen::<f64>() < (-self.beta * delta).exp().to_f64_lossy()
        };
        if ok {
            self.apply(mv).expect("generated moves are in range");
        }
        ok
    }
}
