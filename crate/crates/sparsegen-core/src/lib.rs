//! Sparse generator matrix (LDGM) codes built from polar kernels.
//!
//! The crate covers kernel analysis, binary-input symmetric channels, the
//! naive and recursive (DRS) column splitting algorithms with exact rate-loss
//! accounting, encoder graphs for plain / DRS / augmented-DRS codes,
//! successive-cancellation decoders, and the closed-form exponent calculators.

pub mod asymptotics;
pub mod channel_models;
pub mod code_builder;
mod combin;
mod error;
pub mod kernel_lab;
pub mod sc_decoders;
mod sc_engine;
mod scalar;
pub mod split_engine;

pub use error::{Error, Result};
pub use scalar::Real;

/// Binary erasure channel over `f64`.
pub type Bec64 = channel_models::Bec<f64>;
/// Finite-alphabet symmetric channel over `f64`.
pub type Bms64 = channel_models::Bms<f64>;
/// Bit-channel profile over `f64`.
pub type Profile64 = code_builder::BitChannelProfile<f64>;
/// Exponent profile over `f64`.
pub type Exponents64 = asymptotics::ExponentProfile<f64>;
/// Exact rational used for every rate-loss value.
pub type Ratio = num_rational::BigRational;
