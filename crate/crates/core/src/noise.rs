//! Single-qubit Pauli channels.
//!
//! A channel applies I, X, Y, Z independently to every qubit with
//! probabilities `p_i + p_x + p_y + p_z = 1`. The relative probability of a
//! frame is `exp(-E)` with `E = Σ_q w(P_q)` and `w(P) = -log(p_P / p_I)`.
//! Dividing `E` by the model's reference inverse temperature `β̄` turns it
//! into an effective error count `n`, so that the frame probability is
//! `exp(-β̄ n)`. For depolarizing noise `n` is the plain error count with a Y
//! counted once.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::code_geometry::{CodeLayout, Pauli, PauliCounts, PauliFrame};
use crate::error::{invalid, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseModel<T> {
    /// X, Y and Z each with probability `p / 3`.
    Depolarizing {
        p: T,
    },
    /// Independent bit flips (`p_b`) and phase flips (`p_p`).
    IndependentXZ {
        p_b: T,
        p_p: T,
    },
    GeneralPauli {
        p_x: T,
        p_y: T,
        p_z: T,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Depolarizing,
    IndependentXz,
    GeneralPauli,
}

/// Channel probabilities indexed like [`Pauli::index`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliProbs<T> {
    pub probs: [T; 4],
}

/// Per-Pauli contribution to the effective error count `n`, indexed like
/// [`Pauli::index`]. The identity always costs zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliCosts<T> {
    pub cost: [T; 4],
}

impl<T: Scalar> PauliCosts<T> {
    /// Every non-identity Pauli costs one: the depolarizing count.
    pub fn unit() -> Self {
        PauliCosts { cost: [T::zero(), T::one(), T::one(), T::one()] }
    }

    #[inline]
    pub fn of(&self, p: Pauli) -> T {
        self.cost[p.index()]
    }

    pub fn of_counts(&self, c: &PauliCounts) -> T {
        self.cost[1] * T::of_u64(c.x as u64)
            + self.cost[2] * T::of_u64(c.y as u64)
            + self.cost[3] * T::of_u64(c.z as u64)
    }

    /// Mean cost of a uniformly random Pauli, the infinite-temperature value
    /// of `⟨n⟩` per qubit.
    pub fn uniform_mean(&self) -> T {
        (self.cost[0] + self.cost[1] + self.cost[2] + self.cost[3]) / T::of(4.0)
    }

    /// `true` when X, Y and Z all cost the same.
    pub fn is_uniform(&self) -> bool {
        self.cost[1] == self.cost[2] && self.cost[2] == self.cost[3]
    }
}

impl<T: Scalar> NoiseModel<T> {
    pub fn depolarizing(p: T) -> Result<Self> {
        let m = NoiseModel::Depolarizing { p };
        m.validate()?;
        Ok(m)
    }

    pub fn independent(p_b: T, p_p: T) -> Result<Self> {
        let m = NoiseModel::IndependentXZ { p_b, p_p };
        m.validate()?;
        Ok(m)
    }

    pub fn general(p_x: T, p_y: T, p_z: T) -> Result<Self> {
        let m = NoiseModel::GeneralPauli { p_x, p_y, p_z };
        m.validate()?;
        Ok(m)
    }

    pub fn kind(&self) -> NoiseKind {
        match self {
            NoiseModel::Depolarizing { .. } => NoiseKind::Depolarizing,
            NoiseModel::IndependentXZ { .. } => NoiseKind::IndependentXz,
            NoiseModel::GeneralPauli { .. } => NoiseKind::GeneralPauli,
        }
    }

    pub fn probabilities(&self) -> PauliProbs<T> {
        let one = T::one();
        let (px, py, pz) = match *self {
            NoiseModel::Depolarizing { p } => {
                let third = p / T::of(3.0);
                (third, third, third)
            }
            NoiseModel::IndependentXZ { p_b, p_p } => (p_b * (one - p_p), p_b * p_p, p_p * (one - p_b)),
            NoiseModel::GeneralPauli { p_x, p_y, p_z } => (p_x, p_y, p_z),
        };
        PauliProbs { probs: [one - px - py - pz, px, py, pz] }
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |name: &str, v: T| {
            if v.is_finite() && v >= T::zero() && v < T::one() {
                Ok(())
            } else {
                Err(invalid(format!("{name} = {v} must lie in [0, 1)")))
            }
        };
        match *self {
            NoiseModel::Depolarizing { p } => in_unit("p", p)?,
            NoiseModel::IndependentXZ { p_b, p_p } => {
                in_unit("p_b", p_b)?;
                in_unit("p_p", p_p)?;
            }
            NoiseModel::GeneralPauli { p_x, p_y, p_z } => {
                in_unit("p_x", p_x)?;
                in_unit("p_y", p_y)?;
                in_unit("p_z", p_z)?;
            }
        }
        let probs = self.probabilities().probs;
        if probs[0] <= T::zero() {
            return Err(invalid(format!("identity probability {} must be positive", probs[0])));
        }
        Ok(())
    }

    /// Reference inverse temperature `β̄`.
    ///
    /// * depolarizing: `-log((p/3) / (1 - p))`, defined for `0 <= p <= 3/4`;
    /// * independent: `log((1 - p_b) / p_b)` when `p_b = p_p`; for asymmetric
    ///   rates the mean of the two species' values;
    /// * general: the depolarizing value for the same total error rate.
    ///
    /// A noiseless channel has `β̄ = ∞`.
    pub fn beta_bar(&self) -> Result<T> {
        self.validate()?;
        let one = T::one();
        match *self {
            NoiseModel::Depolarizing { p } => {
                if !(p >= T::zero() && p <= T::of(0.75)) {
                    return Err(invalid(format!("beta_bar needs 0 <= p <= 3/4, got p = {p}")));
                }
                Ok(-((p / T::of(3.0)) / (one - p)).ln())
            }
            NoiseModel::IndependentXZ { p_b, p_p } => {
                if p_b == T::zero() && p_p == T::zero() {
                    return Ok(T::infinity());
                }
                if p_b <= T::zero() || p_p <= T::zero() || p_b > T::of(0.5) || p_p > T::of(0.5) {
                    return Err(invalid(format!("beta_bar needs 0 < p_b, p_p <= 1/2, got ({p_b}, {p_p})")));
                }
                let bb = ((one - p_b) / p_b).ln();
                let bp = ((one - p_p) / p_p).ln();
                Ok(if p_b == p_p { bb } else { (bb + bp) / T::of(2.0) })
            }
            NoiseModel::GeneralPauli { p_x, p_y, p_z } => {
                let p = p_x + p_y + p_z;
                if p < T::zero() || p > T::of(0.75) {
                    return Err(invalid(format!("beta_bar needs a total error rate in [0, 3/4], got {p}")));
                }
                Ok(-((p / T::of(3.0)) / (one - p)).ln())
            }
        }
    }

    /// `w(P) = -log(p_P / p_I)`; infinite for a Pauli the channel never
    /// produces.
    pub fn pauli_energies(&self) -> Result<[T; 4]> {
        self.validate()?;
        let probs = self.probabilities().probs;
        let mut w = [T::zero(); 4];
        for k in 1..4 {
            w[k] = if probs[k] > T::zero() { -(probs[k] / probs[0]).ln() } else { T::infinity() };
        }
        Ok(w)
    }

    /// Per-Pauli costs in units of `β̄`, the effective error count used by the
    /// samplers.
    pub fn costs(&self) -> Result<PauliCosts<T>> {
        if let NoiseModel::Depolarizing { .. } = self {
            self.beta_bar()?;
            return Ok(PauliCosts::unit());
        }
        let beta = self.beta_bar()?;
        if beta.is_infinite() {
            // noiseless limit
            return Ok(match self {
                NoiseModel::IndependentXZ { .. } => PauliCosts { cost: [T::zero(), T::one(), T::of(2.0), T::one()] },
                _ => PauliCosts::unit(),
            });
        }
        if beta <= T::zero() {
            return Err(invalid("reference inverse temperature is zero; costs are undefined"));
        }
        let w = self.pauli_energies()?;
        let mut cost = [T::zero(); 4];
        for k in 1..4 {
            if !w[k].is_finite() {
                return Err(invalid(format!("{:?} has zero probability", Pauli::ALL[k])));
            }
            cost[k] = w[k] / beta;
        }
        Ok(PauliCosts { cost })
    }

    /// `-log` of the frame probability relative to the identity frame.
    pub fn chain_energy(&self, frame: &PauliFrame) -> Result<T> {
        let w = self.pauli_energies()?;
        let c = frame.counts();
        let mut e = T::zero();
        for (k, n) in [(1, c.x), (2, c.y), (3, c.z)] {
            if n == 0 {
                continue;
            }
            if !w[k].is_finite() {
                return Err(invalid(format!("frame uses {:?}, which has zero probability", Pauli::ALL[k])));
            }
            e = e + w[k] * T::of_u64(n as u64);
        }
        Ok(e)
    }

    pub fn sample_frame<R: Rng + ?Sized>(&self, layout: &CodeLayout, rng: &mut R) -> PauliFrame {
        self.sample_qubits(layout.n_qubits(), rng)
    }

    /// Independent draw for each of `n` qubits; one uniform variate per qubit.
    pub fn sample_qubits<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> PauliFrame {
        let probs = self.probabilities().probs;
        let tx = probs[1].to_f64_lossy();
        let ty = tx + probs[2].to_f64_lossy();
        let tz = ty + probs[3].to_f64_lossy();
        let mut f = PauliFrame::identity(n);
        for q in 0..n {
            let u: f64 = rng.gen();
            if u < tx {
                f.toggle_x(q);
            } else if u < ty {
                f.toggle_x(q);
                f.toggle_z(q);
            } else if u < tz {
                f.toggle_z(q);
            }
        }
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn channel_expansions() {
        let d = NoiseModel::depolarizing(0.3).unwrap().probabilities().probs;
        assert!(close(d[1], 0.1, 1e-15) && close(d[2], 0.1, 1e-15) && close(d[0], 0.7, 1e-15));
        let i = NoiseModel::independent(0.1, 0.2).unwrap().probabilities().probs;
        assert!(close(i[1], 0.08, 1e-15) && close(i[2], 0.02, 1e-15) && close(i[3], 0.18, 1e-15));
        assert!(close(i.iter().sum::<f64>(), 1.0, 1e-15));
    }

    #[test]
    fn invalid_models() {
        assert!(NoiseModel::depolarizing(1.0).is_err());
        assert!(NoiseModel::depolarizing(-0.1).is_err());
        assert!(NoiseModel::general(0.5, 0.3, 0.3).is_err());
        assert!(NoiseModel::<f64>::depolarizing(f64::NAN).is_err());
    }

    #[test]
    fn beta_bar_values() {
        let b = |p: f64| NoiseModel::depolarizing(p).unwrap().beta_bar().unwrap();
        assert!(close(b(0.75), 0.0, 1e-15));
        assert!(close(b(0.1), 27f64.ln(), 1e-12));
        assert!(close(b(0.1), 3.295_836_866_004_329, 1e-12));
        assert!(close(b(0.189), (3.0 * 0.811 / 0.189f64).ln(), 1e-12));
        assert!(close(b(0.189), 2.555_2, 1e-4));
        assert_eq!(NoiseModel::depolarizing(0.0).unwrap().beta_bar().unwrap(), f64::INFINITY);
        assert_eq!(NoiseModel::depolarizing(0.0).unwrap().costs().unwrap(), PauliCosts::unit());
        assert_eq!(NoiseModel::independent(0.0, 0.0).unwrap().costs().unwrap().cost, [0.0, 1.0, 2.0, 1.0]);
        let ind = NoiseModel::independent(0.1, 0.1).unwrap();
        assert!(close(ind.beta_bar().unwrap(), 9f64.ln(), 1e-12));
        let f32_beta = NoiseModel::<f32>::depolarizing(0.1).unwrap().beta_bar().unwrap();
        assert!((f32_beta - 27f32.ln()).abs() < 1e-5);
    }

    #[test]
    fn beta_bar_decreases_in_p() {
        let mut last = f64::INFINITY;
        for k in 1..75 {
            let b = NoiseModel::depolarizing(k as f64 / 100.0).unwrap().beta_bar().unwrap();
            assert!(b < last);
            last = b;
        }
    }

    #[test]
    fn chain_energy_examples() {
        let dep = NoiseModel::depolarizing(0.1).unwrap();
        assert_eq!(dep.chain_energy(&PauliFrame::identity(9)).unwrap(), 0.0);
        let five = PauliFrame::from_paulis(&[Pauli::X, Pauli::Y, Pauli::Z, Pauli::X, Pauli::I, Pauli::Y]);
        assert!(close(dep.chain_energy(&five).unwrap(), 5.0 * 27f64.ln(), 1e-12));

        let ind = NoiseModel::independent(0.1, 0.1).unwrap();
        let y = PauliFrame::from_paulis(&[Pauli::Y]);
        assert!(close(ind.chain_energy(&y).unwrap(), 2.0 * 9f64.ln(), 1e-12));
        let c = ind.costs().unwrap();
        assert!(close(c.cost[2], 2.0, 1e-12) && close(c.cost[1], 1.0, 1e-12));

        let no_y = NoiseModel::general(0.1, 0.0, 0.1).unwrap();
        assert!(no_y.chain_energy(&y).is_err());
        assert!(no_y.costs().is_err());
    }

    #[test]
    fn relative_probabilities_follow_beta_bar() {
        // Exact frame probabilities on five qubits against exp(-β̄ n).
        let p: f64 = 0.17;
        let dep = NoiseModel::depolarizing(p).unwrap();
        let beta = dep.beta_bar().unwrap();
        let frames = [
            PauliFrame::from_paulis(&[Pauli::I; 5]),
            PauliFrame::from_paulis(&[Pauli::X, Pauli::I, Pauli::I, Pauli::I, Pauli::I]),
            PauliFrame::from_paulis(&[Pauli::Y, Pauli::Z, Pauli::I, Pauli::X, Pauli::I]),
        ];
        let exact = |f: &PauliFrame| (p / 3.0).powi(f.weight() as i32) * (1.0 - p).powi(5 - f.weight() as i32);
        for f in &frames[1..] {
            let ratio = exact(f) / exact(&frames[0]);
            assert!(close(ratio, (-beta * f.weight() as f64).exp(), 1e-14));
            assert!(close(ratio.ln(), -dep.chain_energy(f).unwrap(), 1e-12));
        }
    }

    #[test]
    fn sampling_edge_cases() {
        let layout = CodeLayout::new(5).unwrap();
        let mut rng = stream(3, &[]);
        let zero = NoiseModel::depolarizing(0.0).unwrap();
        for _ in 0..50 {
            assert_eq!(zero.sample_frame(&layout, &mut rng).weight(), 0);
        }
        let a = NoiseModel::depolarizing(0.2).unwrap().sample_frame(&layout, &mut stream(11, &[4]));
        let b = NoiseModel::depolarizing(0.2).unwrap().sample_frame(&layout, &mut stream(11, &[4]));
        assert_eq!(a, b);
    }

    #[test]
    fn uniform_point_samples_each_pauli_equally() {
        let layout = CodeLayout::new(4).unwrap();
        let m = NoiseModel::depolarizing(0.75).unwrap();
        let mut rng = stream(5, &[]);
        let mut totals = [0u64; 4];
        let draws = 4000;
        for _ in 0..draws {
            let f = m.sample_frame(&layout, &mut rng);
            for p in f.iter() {
                totals[p.index()] += 1;
            }
        }
        let n = (draws * layout.n_qubits()) as f64;
        for t in totals {
            // 4σ of a binomial(n, 1/4) proportion
            assert!(((t as f64 / n) - 0.25).abs() < 4.0 * (0.25f64 * 0.75 / n).sqrt());
        }
    }

    #[test]
    fn mean_weight_at_l25() {
        // 1201 qubits at L = 25
        let layout = CodeLayout::new(25).unwrap();
        let m = NoiseModel::depolarizing(0.1).unwrap();
        let mut rng = stream(17, &[]);
        let samples = 100_000;
        let total: usize = (0..samples).map(|_| m.sample_frame(&layout, &mut rng).weight()).sum();
        let mean = total as f64 / samples as f64;
        let sigma = (1201.0 * 0.1 * 0.9 / samples as f64).sqrt();
        assert!((mean - 120.1).abs() < 3.0 * sigma, "mean {mean}");
    }
}
