//! Downlink MIMO precoding for receivers with 1-bit ADCs.
//!
//! The transmitter picks `x` so that every noiseless received sample lands
//! as far as possible from the quantizer thresholds, measured by the
//! margin `epsilon = min_i [diag(s_r) H_r x_r]_i`. For a 1-bit DAC alphabet
//! this is a binary program, solved exactly by [`precoders::bnb_precode`]
//! on top of the in-crate LP solver in [`lp`].
//!
//! Model, solver and precoders are generic over [`scalar::Real`]; the aliases
//! below fix the scalar. [`eval`] runs in `f64`.

pub mod error;
pub mod eval;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod precoders;
pub mod scalar;

pub use error::{Error, Result};
pub use model::{ChannelMatrix, SymbolVector, ThresholdMargin, TransmitMode, TransmitVector};
pub use precoders::{PrecodeResult, PrecoderKind, SolveStats};
pub use scalar::Real;

pub type ChannelMatrix64 = ChannelMatrix<f64>;
pub type ChannelMatrix32 = ChannelMatrix<f32>;
pub type TransmitVector64 = TransmitVector<f64>;
pub type TransmitVector32 = TransmitVector<f32>;
pub type PrecodeResult64 = PrecodeResult<f64>;
pub type PrecodeResult32 = PrecodeResult<f32>;
pub type LinearProgram64 = lp::LinearProgram<f64>;
pub type LinearProgram32 = lp::LinearProgram<f32>;

/// Library version, recorded in experiment metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
