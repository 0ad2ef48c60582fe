use std::time::Instant;

use super::{PrecodeResult, SolveStats};
use crate::error::{Error, Result};
use crate::linalg::{dot, DenseMatrix};
use crate::lp::{solve_lp, LinearProgram, LpSolution, LpStatus, WarmStart};
use crate::model::{alphabet_level, ChannelMatrix, RealExpansion, SymbolVector, TransmitVector};
use crate::scalar::Real;

/// Margin LP with the first `prefix.len()` real coordinates fixed.
///
/// Variables are the remaining `2M - d` coordinates followed by `epsilon`,
/// labelled by their position in the full vector (`epsilon` gets label `2M`).
/// Rows are `[diag(s_r) H_r]_free v - epsilon >= -[diag(s_r) H_r]_fixed prefix`.
pub fn build_margin_program<T: Real>(exp: &RealExpansion<T>, prefix: &[T]) -> Result<LinearProgram<T>> {
    let g = exp.margin_matrix();
    let full = g.cols();
    let d = prefix.len();
    if d > full {
        return Err(Error::Dimension(format!("prefix of length {d} for {full} coordinates")));
    }
    let c = alphabet_level::<T>(full / 2);
    let tol = T::lit(1e-9) * c;
    if prefix.iter().any(|v| (v.abs() - c).abs() > tol) {
        return Err(Error::InvalidArgument("prefix entries must be +-1/sqrt(2M)".into()));
    }
    let free = full - d;
    let rows = g.rows();
    let mut data = Vec::with_capacity(rows * (free + 1));
    let mut b = Vec::with_capacity(rows);
    for r in 0..rows {
        let row = g.row(r);
        data.extend_from_slice(&row[d..]);
        data.push(-T::one());
        b.push(-dot(&row[..d], prefix));
    }
    let mut cost = vec![T::zero(); free + 1];
    cost[free] = -T::one();
    let mut lower = vec![-c; free + 1];
    let mut upper = vec![c; free + 1];
    lower[free] = T::neg_infinity();
    upper[free] = T::infinity();
    LinearProgram::new(cost, DenseMatrix::from_row_major(rows, free + 1, data)?, b)?
        .with_bounds(lower, upper)?
        .with_labels((d..=full).collect())
}

/// Start point with the free coordinates at zero and `epsilon` at the
/// largest feasible value; always feasible for a margin program.
pub(crate) fn zero_start<T: Real>(p: &LinearProgram<T>) -> WarmStart<T> {
    let n = p.num_vars();
    let eps = p.b().iter().fold(T::infinity(), |acc, &b| acc.min(-b));
    let mut point = vec![T::zero(); n];
    point[n - 1] = eps;
    WarmStart::from_point(p.labels().to_vec(), point)
}

/// Solution of the relaxed (box-constrained) margin LP.
#[derive(Debug, Clone)]
pub struct Relaxation<T> {
    /// Real-expanded continuous transmit vector, entries in `[-c, c]`.
    pub x: Vec<T>,
    /// Optimal relaxed margin; an upper bound on any 1-bit margin.
    pub epsilon: T,
    pub solution: LpSolution<T>,
}

pub(crate) fn relax_expansion<T: Real>(exp: &RealExpansion<T>) -> Result<Relaxation<T>> {
    let p = build_margin_program(exp, &[])?;
    let sol = solve_lp(&p, Some(&zero_start(&p)))?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Node {
            level: 0,
            node: 0,
            reason: format!("relaxation returned {:?}", sol.status),
        });
    }
    let n = sol.v.len();
    Ok(Relaxation {
        x: sol.v[..n - 1].to_vec(),
        epsilon: sol.v[n - 1],
        solution: sol,
    })
}

pub fn relax_precode<T: Real>(h: &ChannelMatrix<T>, s: &SymbolVector) -> Result<Relaxation<T>> {
    relax_expansion(&RealExpansion::new(h, s)?)
}

/// Nearest point of the 1-bit alphabet: per-coordinate sign, zero maps to `+`.
pub fn round_to_alphabet<T: Real>(x_real: &[T]) -> Vec<T> {
    let c = alphabet_level::<T>(x_real.len() / 2);
    x_real.iter().map(|&v| if v < T::zero() { -c } else { c }).collect()
}

pub fn approx_1bit_precode<T: Real>(h: &ChannelMatrix<T>, s: &SymbolVector) -> Result<PrecodeResult<T>> {
    let start = Instant::now();
    let exp = RealExpansion::new(h, s)?;
    let relax = relax_expansion(&exp)?;
    let x_r = round_to_alphabet(&relax.x);
    let epsilon = exp.min_margin(&x_r);
    Ok(PrecodeResult {
        x: TransmitVector::one_bit_from_signs(&x_r)?,
        epsilon,
        stats: SolveStats {
            lp_solves: 1,
            lp_iterations_total: relax.solution.iterations,
            upper_bound_trace: vec![-epsilon.value().as_f64()],
            lp_epsilon: Some(relax.epsilon.as_f64()),
            wall_time: start.elapsed(),
            ..SolveStats::default()
        },
    })
}
