use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumCast};

/// Floating point type used for probabilities, energies and estimates.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumCast + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`; exact for every constant this crate uses.
    fn of(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("f64 fits every Scalar")
    }

    fn of_u64(v: u64) -> Self {
        <Self as NumCast>::from(v).expect("u64 fits every Scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
