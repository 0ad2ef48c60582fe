//! Scalar abstraction.
//!
//! All model, solver and precoder code is written against [`Real`] so that it
//! runs in `f32` or `f64`. Each implementation carries the tolerances used by
//! the LP solver, since the right thresholds depend on the precision.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Primal feasibility tolerance.
    const FEAS_TOL: Self;
    /// Dual feasibility / stationarity tolerance.
    const OPT_TOL: Self;
    /// Smallest magnitude accepted as a pivot or a non-degenerate direction.
    const PIVOT_TOL: Self;

    /// Lossy conversion from `f64`. Every literal in this crate is representable.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal fits the scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const FEAS_TOL: f64 = 1e-9;
    const OPT_TOL: f64 = 1e-7;
    const PIVOT_TOL: f64 = 1e-11;
}

impl Real for f32 {
    const FEAS_TOL: f32 = 1e-5;
    const OPT_TOL: f32 = 1e-4;
    const PIVOT_TOL: f32 = 1e-6;
}
