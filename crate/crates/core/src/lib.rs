//! Surface-code decoding with matching and Metropolis sampling.
//!
//! The crate provides
//!
//! * the distance-`L` planar surface code ([`code_geometry`]),
//! * Pauli noise channels and their inverse temperatures ([`noise`]),
//! * minimum-weight perfect matching decoders, both the standard one and a
//!   class-resolved variant that returns a minimum-weight chain for every
//!   logical class ([`matching`]),
//! * a single-temperature Metropolis decoder, a thermodynamic-integration
//!   decoder and a rectangle-partitioned parallel sweep ([`mcmc`]),
//! * a brute-force oracle for small codes ([`exact_oracle`]),
//! * spacetime hypotheses for faulty syndrome measurements ([`spacetime`]),
//! * a seeded Monte Carlo benchmark harness ([`harness`]).
//!
//! Numeric code is generic over a [`Scalar`] (`f32` or `f64`). The `*64`
//! aliases below fix the scalar to `f64`, which is what the harness uses.

pub mod code_geometry;
pub mod error;
pub mod exact_oracle;
pub mod harness;
pub mod matching;
pub mod mcmc;
pub mod noise;
pub mod rng;
mod scalar;
pub mod spacetime;

pub use code_geometry::{CodeLayout, EquivalenceClass, Pauli, PauliCounts, PauliFrame, StabKind, Syndrome};
pub use error::{Error, Result};
pub use scalar::Scalar;

pub type NoiseModel64 = noise::NoiseModel<f64>;
pub type NoiseModel32 = noise::NoiseModel<f32>;
pub type PauliCosts64 = noise::PauliCosts<f64>;
pub type DecoderVerdict64 = matching::DecoderVerdict<f64>;
pub type SingleTempConfig64 = mcmc::SingleTempConfig<f64>;
pub type MeasurementModel64 = spacetime::MeasurementModel<f64>;
