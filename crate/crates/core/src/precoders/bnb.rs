//! Breadth-first branch-and-bound for the 1-bit margin problem.
//!
//! The tree fixes real coordinates in natural order (real parts, then
//! imaginary parts), children ordered `(+c, -c)`. Every node at levels
//! `1 .. 2M-1` is bounded by the margin LP over its free coordinates, warm
//! started from its parent's solution. The LP optimum gives the lower bound
//! `-epsilon`; rounding the free part gives a feasible point whose margin is
//! an upper bound. After a level is bounded, nodes whose lower bound exceeds
//! the best upper bound are dropped. The last level is evaluated directly.

use std::time::Instant;

use super::relax::{relax_expansion, round_to_alphabet, zero_start};
use super::{build_margin_program, PrecodeResult, SolveStats};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpStatus, WarmStart};
use crate::model::{alphabet_level, ChannelMatrix, RealExpansion, SymbolVector, TransmitVector};
use crate::scalar::Real;

pub const DEFAULT_MAX_TX: usize = 16;
pub const DEFAULT_SURVIVOR_LIMIT: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BnbOptions {
    pub max_tx: usize,
    pub survivor_limit: usize,
    /// When false every node is kept; used to check that pruning is sound.
    pub prune: bool,
}

impl Default for BnbOptions {
    fn default() -> Self {
        Self {
            max_tx: DEFAULT_MAX_TX,
            survivor_limit: DEFAULT_SURVIVOR_LIMIT,
            prune: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Node<T> {
    pub prefix: Vec<T>,
    /// Lower bound `-epsilon` of the node's LP.
    pub lower_bound: T,
    warm: Option<WarmStart<T>>,
}

/// Search state between levels.
#[derive(Debug, Clone)]
pub struct BnbState<T> {
    /// Number of fixed coordinates of the current survivors.
    pub level: usize,
    pub survivors: Vec<Node<T>>,
    /// Smallest known `-epsilon` of a feasible 1-bit vector.
    pub best_upper_bound: T,
    /// Real-expanded vector achieving `best_upper_bound`.
    pub incumbent: Vec<T>,
}

pub fn bnb_precode<T: Real>(h: &ChannelMatrix<T>, s: &SymbolVector) -> Result<PrecodeResult<T>> {
    bnb_precode_with(h, s, &BnbOptions::default())
}

pub fn bnb_precode_with<T: Real>(
    h: &ChannelMatrix<T>,
    s: &SymbolVector,
    opts: &BnbOptions,
) -> Result<PrecodeResult<T>> {
    let start = Instant::now();
    let m = h.tx_len();
    if m > opts.max_tx {
        return Err(Error::SizeCap {
            what: "M (branch-and-bound)",
            value: m,
            cap: opts.max_tx,
        });
    }
    let exp = RealExpansion::new(h, s)?;
    let dims = 2 * m;
    let c = alphabet_level::<T>(m);
    let mut stats = SolveStats::default();

    let root = relax_expansion(&exp)?;
    stats.lp_solves += 1;
    stats.lp_iterations_total += root.solution.iterations;
    stats.lp_epsilon = Some(root.epsilon.as_f64());
    let incumbent = round_to_alphabet(&root.x);
    let mut state = BnbState {
        level: 1,
        best_upper_bound: -exp.min_margin(&incumbent).value(),
        incumbent,
        survivors: [c, -c]
            .into_iter()
            .map(|v| Node {
                prefix: vec![v],
                lower_bound: T::neg_infinity(),
                warm: root.solution.warm.clone(),
            })
            .collect(),
    };
    stats.upper_bound_trace.push(state.best_upper_bound.as_f64());

    for d in 1..dims {
        let mut candidates = Vec::with_capacity(state.survivors.len());
        for (idx, node) in state.survivors.iter().enumerate() {
            let fail = |reason: String| Error::Node { level: d, node: idx, reason };
            let p = build_margin_program(&exp, &node.prefix).map_err(|e| fail(e.to_string()))?;
            let warm = node.warm.clone().unwrap_or_else(|| zero_start(&p));
            let sol = solve_lp(&p, Some(&warm)).map_err(|e| fail(e.to_string()))?;
            if sol.status != LpStatus::Optimal {
                return Err(fail(format!("subproblem returned {:?}", sol.status)));
            }
            stats.lp_solves += 1;
            stats.lp_iterations_total += sol.iterations;

            let free = sol.v.len() - 1;
            let lower_bound = -sol.v[free];
            let mut full = node.prefix.clone();
            full.extend(sol.v[..free].iter().map(|&v| if v < T::zero() { -c } else { c }));
            let ub = -exp.min_margin(&full).value();
            if ub < state.best_upper_bound {
                state.best_upper_bound = ub;
                state.incumbent = full;
            }
            candidates.push(Node {
                prefix: node.prefix.clone(),
                lower_bound,
                warm: sol.warm,
            });
        }
        stats.visited_per_level.push(candidates.len());
        stats.upper_bound_trace.push(state.best_upper_bound.as_f64());

        // non-strict, with slack for LP round-off, so ties are retained
        let cutoff = state.best_upper_bound + T::FEAS_TOL * (T::one() + state.best_upper_bound.abs());
        let kept = candidates
            .into_iter()
            .filter(|n| !opts.prune || n.lower_bound <= cutoff);
        let mut next = Vec::new();
        for node in kept {
            for v in [c, -c] {
                let mut prefix = node.prefix.clone();
                prefix.push(v);
                next.push(Node {
                    prefix,
                    lower_bound: node.lower_bound,
                    warm: node.warm.clone(),
                });
            }
            if next.len() > opts.survivor_limit {
                return Err(Error::SurvivorOverflow(next.len()));
            }
        }
        state.survivors = next;
        state.level = d + 1;
    }

    // last level: every coordinate fixed, evaluate the margin directly
    let mut best: Option<(T, &[T])> = None;
    for node in &state.survivors {
        let eps = exp.min_margin(&node.prefix).value();
        if best.is_none_or(|(b, _)| eps > b) {
            best = Some((eps, &node.prefix));
        }
    }
    stats.visited_per_level.push(state.survivors.len());
    let x_r = match best {
        Some((eps, x)) if eps >= -state.best_upper_bound => x.to_vec(),
        _ => state.incumbent.clone(),
    };

    stats.visited_branches = stats.visited_per_level.iter().sum();
    stats.wall_time = start.elapsed();
    Ok(PrecodeResult {
        epsilon: exp.min_margin(&x_r),
        x: TransmitVector::one_bit_from_signs(&x_r)?,
        stats,
    })
}
