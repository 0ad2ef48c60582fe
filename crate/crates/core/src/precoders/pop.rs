use std::time::Instant;

use num_complex::Complex;

use super::relax::zero_start;
use super::{PrecodeResult, SolveStats};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::lp::{solve_lp, LinearProgram, LpStatus};
use crate::model::{complexify, min_threshold_distance, ChannelMatrix, RealExpansion, SymbolVector, TransmitVector};
use crate::scalar::Real;

pub const DEFAULT_N_GON: usize = 64;

/// Phase-only precoder. The disc `|x_m| <= 1/sqrt(M)` is replaced by an
/// inscribed regular `n_gon` with a vertex at angle 0, which makes the LP
/// feasible set grow monotonically when `n_gon` doubles and contains the
/// 1-bit alphabet whenever `n_gon` is a multiple of 8. The LP solution is then
/// rescaled entrywise to magnitude exactly `1/sqrt(M)`.
pub fn pop_precode<T: Real>(h: &ChannelMatrix<T>, s: &SymbolVector, n_gon: usize) -> Result<PrecodeResult<T>> {
    let start = Instant::now();
    if n_gon < 8 {
        return Err(Error::InvalidArgument(format!("polygon needs at least 8 sides, got {n_gon}")));
    }
    let exp = RealExpansion::new(h, s)?;
    let g = exp.margin_matrix();
    let m = h.tx_len();
    let n = 2 * m + 1;
    let radius = T::one() / T::from_usize(m).unwrap().sqrt();
    let pi = T::lit(std::f64::consts::PI);
    let sides = T::from_usize(n_gon).unwrap();
    let apothem = radius * (pi / sides).cos();

    let rows = g.rows() + m * n_gon;
    let mut data = Vec::with_capacity(rows * n);
    let mut b = Vec::with_capacity(rows);
    for r in 0..g.rows() {
        data.extend_from_slice(g.row(r));
        data.push(-T::one());
        b.push(T::zero());
    }
    for ant in 0..m {
        for k in 0..n_gon {
            // facet normal halfway between the vertices at 2 pi k/n and 2 pi (k+1)/n
            let phi = pi * T::from_usize(2 * k + 1).unwrap() / sides;
            let mut row = vec![T::zero(); n];
            row[ant] = -phi.cos();
            row[m + ant] = -phi.sin();
            data.extend(row);
            b.push(-apothem);
        }
    }
    let mut cost = vec![T::zero(); n];
    cost[n - 1] = -T::one();
    let p = LinearProgram::new(cost, DenseMatrix::from_row_major(rows, n, data)?, b)?;
    let sol = solve_lp(&p, Some(&zero_start(&p)))?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::InvalidArgument(format!("phase-only LP returned {:?}", sol.status)));
    }

    let entries = complexify(&sol.v[..n - 1])
        .into_iter()
        .map(|v| {
            let mag = v.norm();
            if mag > T::zero() {
                v * (radius / mag)
            } else {
                Complex::new(radius, T::zero())
            }
        })
        .collect();
    let x = TransmitVector::continuous(entries);
    Ok(PrecodeResult {
        epsilon: min_threshold_distance(h, s, &x)?,
        x,
        stats: SolveStats {
            lp_solves: 1,
            lp_iterations_total: sol.iterations,
            lp_epsilon: Some(sol.v[n - 1].as_f64()),
            wall_time: start.elapsed(),
            ..SolveStats::default()
        },
    })
}
