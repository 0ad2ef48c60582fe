use std::time::Instant;

use super::{PrecodeResult, SolveStats};
use crate::error::{Error, Result};
use crate::model::{alphabet_level, ChannelMatrix, RealExpansion, SymbolVector, TransmitVector};
use crate::scalar::Real;

pub const EXHAUSTIVE_MAX_TX: usize = 12;

/// Global optimum over all `4^M` 1-bit vectors. Among exact ties the
/// lexicographically smallest real-expanded vector wins.
pub fn exhaustive_precode<T: Real>(h: &ChannelMatrix<T>, s: &SymbolVector) -> Result<PrecodeResult<T>> {
    let start = Instant::now();
    let m = h.tx_len();
    if m > EXHAUSTIVE_MAX_TX {
        return Err(Error::SizeCap {
            what: "M (exhaustive search)",
            value: m,
            cap: EXHAUSTIVE_MAX_TX,
        });
    }
    let exp = RealExpansion::new(h, s)?;
    let g = exp.margin_matrix();
    let dims = 2 * m;
    let c = alphabet_level::<T>(m);

    // column j of diag(s_r) H_r scaled by c
    let cols: Vec<Vec<T>> = (0..dims)
        .map(|j| (0..g.rows()).map(|r| g.get(r, j) * c).collect())
        .collect();
    let mut search = Search {
        cols: &cols,
        partial: vec![vec![T::zero(); g.rows()]; dims + 1],
        signs: vec![false; dims],
        best_eps: T::neg_infinity(),
        best: vec![false; dims],
        visited: 0,
    };
    search.descend(0);

    let x_r: Vec<T> = search.best.iter().map(|&neg| if neg { -c } else { c }).collect();
    Ok(PrecodeResult {
        epsilon: exp.min_margin(&x_r),
        x: TransmitVector::one_bit_from_signs(&x_r)?,
        stats: SolveStats {
            visited_branches: search.visited,
            wall_time: start.elapsed(),
            ..SolveStats::default()
        },
    })
}

struct Search<'a, T> {
    cols: &'a [Vec<T>],
    // partial[d] = margins contributed by the first d coordinates
    partial: Vec<Vec<T>>,
    // true = negative level
    signs: Vec<bool>,
    best_eps: T,
    best: Vec<bool>,
    visited: usize,
}

impl<T: Real> Search<'_, T> {
    // depth-first with the negative child first: leaves arrive in
    // lexicographic order, and only strict improvements replace the best
    fn descend(&mut self, d: usize) {
        if d == self.cols.len() {
            self.visited += 1;
            let eps = self.partial[d].iter().copied().fold(T::infinity(), T::min);
            if eps > self.best_eps {
                self.best_eps = eps;
                self.best.copy_from_slice(&self.signs);
            }
            return;
        }
        for neg in [true, false] {
            self.signs[d] = neg;
            let (head, tail) = self.partial.split_at_mut(d + 1);
            for ((out, &prev), &col) in tail[0].iter_mut().zip(&head[d]).zip(&self.cols[d]) {
                *out = if neg { prev - col } else { prev + col };
            }
            self.descend(d + 1);
        }
    }
}
