//! Precoders that maximize the minimum distance to the receivers' decision
//! thresholds.
//!
//! | precoder | alphabet | method |
//! |---|---|---|
//! | [`bnb_precode`] | 1-bit | exact breadth-first branch-and-bound over LP bounds |
//! | [`approx_1bit_precode`] | 1-bit | LP relaxation rounded to the nearest alphabet point |
//! | [`exhaustive_precode`] | 1-bit | full enumeration, reference oracle |
//! | [`pop_precode`] | constant envelope | polygon-approximated LP, then per-entry rescaling |
//! | [`zf_quantized_precode`] | 1-bit | zero forcing followed by quantization |

mod bnb;
mod exhaustive;
mod pop;
mod relax;
mod table;
mod zf;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::model::{ChannelMatrix, SymbolVector, ThresholdMargin, TransmitVector};
use crate::scalar::Real;

pub use bnb::{bnb_precode, bnb_precode_with, BnbOptions, BnbState, DEFAULT_MAX_TX, DEFAULT_SURVIVOR_LIMIT};
pub use exhaustive::{exhaustive_precode, EXHAUSTIVE_MAX_TX};
pub use pop::{pop_precode, DEFAULT_N_GON};
pub use relax::{approx_1bit_precode, build_margin_program, relax_precode, round_to_alphabet, Relaxation};
pub use table::{build_lookup_table, LookupTable, TABLE_MAX_RX};
pub use zf::{zf_quantized_precode, zf_unquantized};

#[derive(Debug, Clone, PartialEq)]
pub struct PrecodeResult<T> {
    pub x: TransmitVector<T>,
    /// Margin of `x`, recomputed from the channel and symbols.
    pub epsilon: ThresholdMargin<T>,
    pub stats: SolveStats,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    /// Branch-and-bound nodes bounded or evaluated per tree level; index 0 is
    /// level 1. Empty for the other precoders.
    pub visited_per_level: Vec<usize>,
    pub visited_branches: usize,
    pub lp_solves: usize,
    pub lp_iterations_total: usize,
    /// Best known upper bound on `-epsilon` after initialization and after
    /// each level. Non-increasing.
    pub upper_bound_trace: Vec<f64>,
    /// Optimal value of the LP that was solved before rounding or rescaling.
    pub lp_epsilon: Option<f64>,
    pub wall_time: Duration,
}

/// Precoder selection, as used by the experiment runner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrecoderKind {
    Bnb,
    Approx,
    Pop { n_gon: usize },
    Zf,
    Exhaustive,
}

impl PrecoderKind {
    pub fn precode<T: Real>(&self, h: &ChannelMatrix<T>, s: &SymbolVector) -> Result<PrecodeResult<T>> {
        match *self {
            PrecoderKind::Bnb => bnb_precode(h, s),
            PrecoderKind::Approx => approx_1bit_precode(h, s),
            PrecoderKind::Pop { n_gon } => pop_precode(h, s, n_gon),
            PrecoderKind::Zf => zf_quantized_precode(h, s),
            PrecoderKind::Exhaustive => exhaustive_precode(h, s),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            PrecoderKind::Bnb => "bnb",
            PrecoderKind::Approx => "approx",
            PrecoderKind::Pop { .. } => "pop",
            PrecoderKind::Zf => "zf",
            PrecoderKind::Exhaustive => "exhaustive",
        }
    }

    /// Largest supported `M`, if any.
    pub fn tx_cap(&self) -> Option<usize> {
        match self {
            PrecoderKind::Bnb => Some(DEFAULT_MAX_TX),
            PrecoderKind::Exhaustive => Some(EXHAUSTIVE_MAX_TX),
            _ => None,
        }
    }
}

impl fmt::Display for PrecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for PrecoderKind {
    type Err = Error;

    /// Parses `bnb`, `approx`, `pop` (64-gon), `pop:<sides>`, `zf`, `exhaustive`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "bnb" => Ok(PrecoderKind::Bnb),
            "approx" => Ok(PrecoderKind::Approx),
            "pop" => Ok(PrecoderKind::Pop { n_gon: DEFAULT_N_GON }),
            "zf" => Ok(PrecoderKind::Zf),
            "exhaustive" => Ok(PrecoderKind::Exhaustive),
            other => match other.strip_prefix("pop:").map(str::parse::<usize>) {
                Some(Ok(n_gon)) => Ok(PrecoderKind::Pop { n_gon }),
                _ => Err(Error::InvalidArgument(format!("unknown precoder '{other}'"))),
            },
        }
    }
}
