use crate::code_geometry::PauliCounts;
use crate::noise::PauliCosts;
use crate::scalar::Scalar;

/// Largest number of complete batches kept before adjacent batches merge.
const MAX_BATCHES: usize = 128;

/// Running sums of the Pauli composition of every recorded chain state, with
/// batch sums for a batch-means standard error. Sums are integers so the
/// mean is exact for any cost vector.
#[derive(Clone, Debug)]
pub struct CountTally {
    steps: u64,
    total: [u64; 3],
    batch_len: u64,
    filled: u64,
    current: [u64; 3],
    batches: Vec<[u64; 3]>,
}

impl Default for CountTally {
    fn default() -> Self {
        CountTally { steps: 0, total: [0; 3], batch_len: 1, filled: 0, current: [0; 3], batches: Vec::new() }
    }
}

fn add3(a: &mut [u64; 3], c: &PauliCounts) {
    a[0] += c.x as u64;
    a[1] += c.y as u64;
    a[2] += c.z as u64;
}

fn weigh<T: Scalar>(costs: &PauliCosts<T>, a: &[u64; 3]) -> T {
    let mut s = T::zero();
    for k in 0..3 {
        if a[k] != 0 {
            s = s + costs.cost[k + 1] * T::of_u64(a[k]);
        }
    }
    s
}

impl CountTally {
    pub fn push(&mut self, c: &PauliCounts) {
        self.steps += 1;
        add3(&mut self.total, c);
        add3(&mut self.current, c);
        self.filled += 1;
        if self.filled == self.batch_len {
            self.batches.push(self.current);
            self.current = [0; 3];
            self.filled = 0;
            if self.batches.len() == MAX_BATCHES {
                let merged =
                    self.batches.chunks(2).map(|p| [p[0][0] + p[1][0], p[0][1] + p[1][1], p[0][2] + p[1][2]]).collect();
                self.batches = merged;
                self.batch_len *= 2;
            }
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Summed x, y and z counts over all recorded states.
    pub fn totals(&self) -> [u64; 3] {
        self.total
    }

    pub fn estimate<T: Scalar>(&self, costs: &PauliCosts<T>) -> MeanEstimate<T> {
        if self.steps == 0 {
            return MeanEstimate { mean: T::nan(), std_error: T::infinity(), samples: 0 };
        }
        let mean = weigh(costs, &self.total) / T::of_u64(self.steps);
        let nb = self.batches.len();
        let std_error = if nb < 2 {
            T::infinity()
        } else {
            let len = T::of_u64(self.batch_len);
            let means: Vec<T> = self.batches.iter().map(|b| weigh(costs, b) / len).collect();
            let m = means.iter().fold(T::zero(), |a, &b| a + b) / T::of_u64(nb as u64);
            let var = means.iter().fold(T::zero(), |a, &b| a + (b - m) * (b - m)) / T::of_u64(nb as u64 - 1);
            (var / T::of_u64(nb as u64)).sqrt()
        };
        MeanEstimate { mean, std_error, samples: self.steps }
    }
}

/// Sample mean of `n` with its batch-means standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanEstimate<T> {
    pub mean: T,
    pub std_error: T,
    pub samples: u64,
}

impl<T: Scalar> MeanEstimate<T> {
    /// A value known without sampling error.
    pub fn exact(mean: T) -> Self {
        MeanEstimate { mean, std_error: T::zero(), samples: 0 }
    }

    /// Pools independent replica estimates; the error is the spread of the
    /// replica means, which stays honest when single chains get stuck.
    pub fn from_replicas(replicas: &[MeanEstimate<T>]) -> Self {
        let k = replicas.len();
        let samples = replicas.iter().map(|r| r.samples).sum();
        if k == 0 {
            return MeanEstimate { mean: T::nan(), std_error: T::infinity(), samples };
        }
        let mean = replicas.iter().fold(T::zero(), |a, r| a + r.mean) / T::of_u64(k as u64);
        let std_error = if k < 2 {
            T::infinity()
        } else {
            let var =
                replicas.iter().fold(T::zero(), |a, r| a + (r.mean - mean) * (r.mean - mean)) / T::of_u64(k as u64 - 1);
            (var / T::of_u64(k as u64)).sqrt()
        };
        MeanEstimate { mean, std_error, samples }
    }

    /// `|self - other|` in units of the combined standard error.
    pub fn z_score(&self, other: &MeanEstimate<T>) -> T {
        let se = (self.std_error * self.std_error + other.std_error * other.std_error).sqrt();
        (self.mean - other.mean).abs() / se
    }
}

/// Composite Simpson rule over equally spaced samples.
pub fn simpson<T: Scalar>(values: &[T], h: T) -> Option<T> {
    let n = values.len();
    if n < 3 || n.is_multiple_of(2) {
        return None;
    }
    let mut s = values[0] + values[n - 1];
    for (i, &v) in values.iter().enumerate().take(n - 1).skip(1) {
        s = s + v * if i % 2 == 1 { T::of(4.0) } else { T::of(2.0) };
    }
    Some(s * h / T::of(3.0))
}
