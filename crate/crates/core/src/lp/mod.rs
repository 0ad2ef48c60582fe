//! Dense LP solver for `minimize c.v  s.t.  A v >= b,  lower <= v <= upper`.
//!
//! Cold starts run a primal active-set method (with an artificial-variable
//! feasibility phase when the start point violates a row). Warm starts reuse
//! the working set of a previous solve: when that set is still dual feasible
//! the solver runs dual active-set pivots from it, which is the common case
//! after `b`, the box, or the set of fixed variables changes.

mod active_set;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Real;

pub use active_set::LpSolver;

/// Identity of a single inequality, stable across programs that share rows
/// and variable labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintId {
    /// Row `i` of `A v >= b`.
    Row(usize),
    /// `v_j >= lower_j`, keyed by variable label.
    Lower(usize),
    /// `v_j <= upper_j`, keyed by variable label.
    Upper(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<T> {
    cost: Vec<T>,
    a: DenseMatrix<T>,
    b: Vec<T>,
    lower: Vec<T>,
    upper: Vec<T>,
    labels: Vec<usize>,
}

impl<T: Real> LinearProgram<T> {
    /// Program with no box constraints. Use [`with_bounds`](Self::with_bounds)
    /// to add them; infinite entries mean "unbounded".
    pub fn new(cost: Vec<T>, a: DenseMatrix<T>, b: Vec<T>) -> Result<Self> {
        let n = cost.len();
        if n == 0 || a.rows() == 0 {
            return Err(Error::Dimension("need at least one variable and one row".into()));
        }
        if a.cols() != n || b.len() != a.rows() {
            return Err(Error::Dimension(format!(
                "cost has {n} entries, A is {}x{}, b has {}",
                a.rows(),
                a.cols(),
                b.len()
            )));
        }
        if cost.iter().chain(a.as_slice()).chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("cost, A and b must be finite".into()));
        }
        Ok(Self {
            lower: vec![T::neg_infinity(); n],
            upper: vec![T::infinity(); n],
            labels: (0..n).collect(),
            cost,
            a,
            b,
        })
    }

    pub fn with_bounds(mut self, lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        let n = self.cost.len();
        if lower.len() != n || upper.len() != n {
            return Err(Error::Dimension("bounds must have one entry per variable".into()));
        }
        for (j, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if l.is_nan() || u.is_nan() || l == T::infinity() || u == T::neg_infinity() || l > u {
                return Err(Error::InvalidArgument(format!("bad box on variable {j}: [{l}, {u}]")));
            }
        }
        self.lower = lower;
        self.upper = upper;
        Ok(self)
    }

    /// Attaches caller-chosen variable labels. Warm starts match bound
    /// constraints and point coordinates by label, so a program with some
    /// variables removed can reuse a parent's handle.
    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.cost.len() {
            return Err(Error::Dimension("one label per variable".into()));
        }
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(Error::InvalidArgument("variable labels must be unique".into()));
        }
        self.labels = labels;
        Ok(self)
    }

    /// Replaces the right-hand side.
    pub fn with_rhs(mut self, b: Vec<T>) -> Result<Self> {
        if b.len() != self.b.len() || b.iter().any(|v| !v.is_finite()) {
            return Err(Error::Dimension("rhs must keep its length and be finite".into()));
        }
        self.b = b;
        Ok(self)
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn num_rows(&self) -> usize {
        self.b.len()
    }

    pub fn cost(&self) -> &[T] {
        &self.cost
    }

    pub fn a(&self) -> &DenseMatrix<T> {
        &self.a
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Largest violation of any row or bound at `v` (0 when feasible).
    pub fn max_violation(&self, v: &[T]) -> T {
        let rows = (0..self.num_rows()).map(|i| self.b[i] - crate::linalg::dot(self.a.row(i), v));
        let lo = self.lower.iter().zip(v).map(|(&l, &x)| l - x);
        let hi = self.upper.iter().zip(v).map(|(&u, &x)| x - u);
        rows.chain(lo).chain(hi).fold(T::zero(), |acc, e| if e > acc { e } else { acc })
    }

    pub fn objective(&self, v: &[T]) -> T {
        crate::linalg::dot(&self.cost, v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Restart token: the final working set and point of a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct WarmStart<T> {
    pub(crate) active: Vec<ConstraintId>,
    pub(crate) labels: Vec<usize>,
    pub(crate) point: Vec<T>,
}

impl<T: Real> WarmStart<T> {
    /// A start point only, no working set. A feasible point skips the
    /// feasibility phase of a cold start.
    pub fn from_point(labels: Vec<usize>, point: Vec<T>) -> Self {
        Self {
            active: Vec::new(),
            labels,
            point,
        }
    }

    pub fn active(&self) -> &[ConstraintId] {
        &self.active
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    /// Optimal point; empty unless `status` is `Optimal`.
    pub v: Vec<T>,
    pub objective: T,
    pub iterations: usize,
    /// Active constraints at `v` with their (nonnegative) multipliers.
    /// `sum_i multiplier_i * gradient_i` reproduces the cost vector, where a
    /// row gradient is `A_i`, a lower bound `e_j` and an upper bound `-e_j`.
    pub multipliers: Vec<(ConstraintId, T)>,
    pub warm: Option<WarmStart<T>>,
}

impl<T: Real> LpSolution<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Solves with default options.
pub fn solve_lp<T: Real>(p: &LinearProgram<T>, warm: Option<&WarmStart<T>>) -> Result<LpSolution<T>> {
    LpSolver::default().solve(p, warm)
}
