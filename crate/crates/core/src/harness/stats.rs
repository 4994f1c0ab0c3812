/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// One-sided 95% normal quantile.
pub const Z95_ONE_SIDED: f64 = 1.644_853_626_951_472_6;

/// Wilson score interval for `failures` out of `trials`; `(0, 1)` when there
/// are no trials.
pub fn wilson_interval(failures: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if failures == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if failures == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Discordant pairs of two decoders run on the same trials.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PairedCounts {
    /// Trials where only the first decoder failed.
    pub only_first: u64,
    /// Trials where only the second decoder failed.
    pub only_second: u64,
}

impl PairedCounts {
    pub fn push(&mut self, first_ok: bool, second_ok: bool) {
        match (first_ok, second_ok) {
            (false, true) => self.only_first += 1,
            (true, false) => self.only_second += 1,
            _ => {}
        }
    }

    /// McNemar statistic for "the second decoder fails less often"; zero
    /// when there are no discordant pairs.
    pub fn z_second_better(&self) -> f64 {
        let d = self.only_first + self.only_second;
        if d == 0 {
            return 0.0;
        }
        (self.only_first as f64 - self.only_second as f64) / (d as f64).sqrt()
    }
}
