use std::collections::HashMap;

use super::{ConstraintId, LinearProgram, LpSolution, LpStatus, WarmStart};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, DenseMatrix, RowBasis};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, Default)]
pub struct LpSolver {
    /// Iteration cap per solve; `None` picks `100 (n + m) + 1000`.
    pub max_iterations: Option<usize>,
}

impl LpSolver {
    pub fn new(max_iterations: usize) -> Self {
        Self {
            max_iterations: Some(max_iterations),
        }
    }

    pub fn solve<T: Real>(&self, p: &LinearProgram<T>, warm: Option<&WarmStart<T>>) -> Result<LpSolution<T>> {
        let limit = self
            .max_iterations
            .unwrap_or(100 * (p.num_vars() + p.num_rows()) + 1000);
        let mut engine = Engine::new(p, limit);

        if let Some(w) = warm {
            if let Some(out) = engine.try_warm(w)? {
                return Ok(engine.finish(out));
            }
        }
        let start = warm.map(|w| engine.map_point(w));
        let out = engine.cold(start)?;
        Ok(engine.finish(out))
    }
}

enum Outcome<T> {
    Optimal { v: Vec<T>, working: Vec<usize> },
    Infeasible,
    Unbounded,
}

/// Constraint `i` in Bland order: rows, then finite lower bounds, then finite
/// upper bounds. Gradient `g_i`, right-hand side `h_i`, satisfied when
/// `g_i . v >= h_i`.
struct Engine<'a, T> {
    p: &'a LinearProgram<T>,
    n: usize,
    m: usize,
    present: Vec<bool>,
    row_norms: Vec<T>,
    iterations: usize,
    limit: usize,
}

impl<'a, T: Real> Engine<'a, T> {
    fn new(p: &'a LinearProgram<T>, limit: usize) -> Self {
        let (n, m) = (p.num_vars(), p.num_rows());
        let mut present = vec![true; m];
        present.extend(p.lower().iter().map(|l| l.is_finite()));
        present.extend(p.upper().iter().map(|u| u.is_finite()));
        let row_norms = (0..m).map(|i| norm(p.a().row(i))).collect();
        Self {
            p,
            n,
            m,
            present,
            row_norms,
            iterations: 0,
            limit,
        }
    }

    fn count(&self) -> usize {
        self.m + 2 * self.n
    }

    fn g_dot(&self, i: usize, v: &[T]) -> T {
        if i < self.m {
            dot(self.p.a().row(i), v)
        } else if i < self.m + self.n {
            v[i - self.m]
        } else {
            -v[i - self.m - self.n]
        }
    }

    fn g_norm(&self, i: usize) -> T {
        if i < self.m {
            self.row_norms[i]
        } else {
            T::one()
        }
    }

    fn g_vec(&self, i: usize) -> Vec<T> {
        if i < self.m {
            return self.p.a().row(i).to_vec();
        }
        let mut g = vec![T::zero(); self.n];
        if i < self.m + self.n {
            g[i - self.m] = T::one();
        } else {
            g[i - self.m - self.n] = -T::one();
        }
        g
    }

    fn h(&self, i: usize) -> T {
        if i < self.m {
            self.p.b()[i]
        } else if i < self.m + self.n {
            self.p.lower()[i - self.m]
        } else {
            -self.p.upper()[i - self.m - self.n]
        }
    }

    fn slack(&self, i: usize, v: &[T]) -> T {
        self.g_dot(i, v) - self.h(i)
    }

    fn id(&self, i: usize) -> ConstraintId {
        let labels = self.p.labels();
        if i < self.m {
            ConstraintId::Row(i)
        } else if i < self.m + self.n {
            ConstraintId::Lower(labels[i - self.m])
        } else {
            ConstraintId::Upper(labels[i - self.m - self.n])
        }
    }

    fn index_of(&self, id: ConstraintId, by_label: &HashMap<usize, usize>) -> Option<usize> {
        let i = match id {
            ConstraintId::Row(r) if r < self.m => r,
            ConstraintId::Row(_) => return None,
            ConstraintId::Lower(l) => self.m + *by_label.get(&l)?,
            ConstraintId::Upper(l) => self.m + self.n + *by_label.get(&l)?,
        };
        self.present[i].then_some(i)
    }

    // violation threshold used when deciding a constraint is broken
    fn viol_tol(&self) -> T {
        T::FEAS_TOL * T::lit(0.1)
    }

    fn tick(&mut self) -> Result<()> {
        self.iterations += 1;
        if self.iterations > self.limit {
            return Err(Error::IterationLimit(self.limit));
        }
        Ok(())
    }

    fn basis_of(&self, working: &[usize]) -> RowBasis<T> {
        let mut basis = RowBasis::new(self.n);
        for &i in working {
            let accepted = basis.push(&self.g_vec(i), T::PIVOT_TOL);
            debug_assert!(accepted, "working set must stay independent");
        }
        basis
    }

    /// Lowest-index independent subset of `candidates`.
    fn independent(&self, mut candidates: Vec<usize>) -> (Vec<usize>, RowBasis<T>) {
        candidates.sort_unstable();
        candidates.dedup();
        let mut basis = RowBasis::new(self.n);
        let mut kept = Vec::new();
        for i in candidates {
            if basis.push(&self.g_vec(i), T::lit(1e3) * T::PIVOT_TOL) {
                kept.push(i);
            }
        }
        (kept, basis)
    }

    fn active_at(&self, v: &[T]) -> Vec<usize> {
        (0..self.count())
            .filter(|&i| self.present[i] && self.slack(i, v).abs() <= self.viol_tol())
            .collect()
    }

    fn first_violated(&self, v: &[T], skip: &[usize]) -> Option<usize> {
        (0..self.count())
            .find(|&i| self.present[i] && !skip.contains(&i) && self.slack(i, v) < -self.viol_tol())
    }

    fn cost_scale(&self) -> T {
        T::one().max(norm(self.p.cost()))
    }

    fn map_point(&self, w: &WarmStart<T>) -> Vec<T> {
        let by_label: HashMap<usize, T> = w.labels.iter().copied().zip(w.point.iter().copied()).collect();
        self.p
            .labels()
            .iter()
            .enumerate()
            .map(|(j, l)| {
                let x = by_label.get(l).copied().unwrap_or_else(T::zero);
                x.max(self.p.lower()[j]).min(self.p.upper()[j])
            })
            .collect()
    }

    /// Warm path. Returns `None` when the handle is not usable and a cold
    /// start should run instead.
    fn try_warm(&mut self, w: &WarmStart<T>) -> Result<Option<Outcome<T>>> {
        let by_label: HashMap<usize, usize> =
            self.p.labels().iter().enumerate().map(|(j, &l)| (l, j)).collect();
        let candidates: Vec<usize> = w
            .active
            .iter()
            .filter_map(|&id| self.index_of(id, &by_label))
            .collect();
        let mut v = self.map_point(w);
        let (working, basis) = self.independent(candidates);
        if !working.is_empty() {
            let resid: Vec<T> = working.iter().map(|&i| self.h(i) - self.g_dot(i, &v)).collect();
            let delta = basis.min_norm_correction(&resid);
            for (x, d) in v.iter_mut().zip(delta) {
                *x += d;
            }
        }
        let (lambda, resid) = basis.express(self.p.cost());
        let dual_ok = norm(&resid) <= T::OPT_TOL * self.cost_scale()
            && lambda.iter().all(|&l| l >= -T::FEAS_TOL * self.cost_scale());
        if dual_ok {
            return self.dual(v, working).map(Some);
        }
        if self.first_violated(&v, &[]).is_none() {
            return self.primal(v, working).map(Some);
        }
        Ok(None)
    }

    fn cold(&mut self, start: Option<Vec<T>>) -> Result<Outcome<T>> {
        let v0 = start.unwrap_or_else(|| {
            (0..self.n)
                .map(|j| T::zero().max(self.p.lower()[j]).min(self.p.upper()[j]))
                .collect()
        });
        if self.first_violated(&v0, &[]).is_none() {
            let (working, _) = self.independent(self.active_at(&v0));
            return self.primal(v0, working);
        }
        match self.feasibility_phase(&v0)? {
            Some(v) => {
                let (working, _) = self.independent(self.active_at(&v));
                self.primal(v, working)
            }
            None => Ok(Outcome::Infeasible),
        }
    }

    /// Minimizes an artificial `t >= 0` over `A v + t >= b` and the box,
    /// starting from `v0` with `t` equal to the largest row violation.
    fn feasibility_phase(&mut self, v0: &[T]) -> Result<Option<Vec<T>>> {
        let (n, m) = (self.n, self.m);
        let mut data = Vec::with_capacity(m * (n + 1));
        for i in 0..m {
            data.extend_from_slice(self.p.a().row(i));
            data.push(T::one());
        }
        let a = DenseMatrix::from_row_major(m, n + 1, data)?;
        let mut cost = vec![T::zero(); n + 1];
        cost[n] = T::one();
        let mut lower = self.p.lower().to_vec();
        lower.push(T::zero());
        let mut upper = self.p.upper().to_vec();
        upper.push(T::infinity());
        let aux = LinearProgram::new(cost, a, self.p.b().to_vec())?.with_bounds(lower, upper)?;

        let t0 = (0..m)
            .map(|i| -self.slack(i, v0))
            .fold(T::zero(), T::max);
        let mut start = v0.to_vec();
        start.push(t0);

        let mut sub = Engine::new(&aux, self.limit.saturating_sub(self.iterations));
        let (working, _) = sub.independent(sub.active_at(&start));
        let out = sub.primal(start, working);
        self.iterations += sub.iterations;
        if self.iterations > self.limit {
            return Err(Error::IterationLimit(self.limit));
        }
        match out? {
            Outcome::Optimal { v, .. } => {
                let scale = T::one().max(self.p.b().iter().fold(T::zero(), |a, b| a.max(b.abs())));
                if v[n] > T::FEAS_TOL * scale {
                    return Ok(None);
                }
                let mut x = v[..n].to_vec();
                // polish: a tiny residual t can leave rows slightly short
                if self.first_violated(&x, &[]).is_some() {
                    let active = self.active_at(&x);
                    let (working, basis) = self.independent(active);
                    let resid: Vec<T> = working
                        .iter()
                        .map(|&i| (self.h(i) - self.g_dot(i, &x)).max(T::zero()))
                        .collect();
                    for (xi, d) in x.iter_mut().zip(basis.min_norm_correction(&resid)) {
                        *xi += d;
                    }
                    if self.first_violated(&x, &[]).is_some() {
                        return Ok(None);
                    }
                }
                Ok(Some(x))
            }
            Outcome::Infeasible => Ok(None),
            // t >= 0 bounds the auxiliary objective
            Outcome::Unbounded => unreachable!("feasibility phase is bounded below"),
        }
    }

    /// Primal active-set iterations from a feasible `v` whose working set is
    /// active and independent.
    fn primal(&mut self, mut v: Vec<T>, mut working: Vec<usize>) -> Result<Outcome<T>> {
        let c = self.p.cost().to_vec();
        let scale = self.cost_scale();
        let mut basis = self.basis_of(&working);
        loop {
            let step_dir: Vec<T> = basis.project_out(&c).iter().map(|&x| -x).collect();
            let dir_norm = norm(&step_dir);
            if dir_norm > T::PIVOT_TOL * scale {
                self.tick()?;
                let mut best: Option<(usize, T)> = None;
                for i in 0..self.count() {
                    if !self.present[i] || working.contains(&i) {
                        continue;
                    }
                    let gp = self.g_dot(i, &step_dir);
                    if gp >= -T::PIVOT_TOL * self.g_norm(i) * dir_norm {
                        continue;
                    }
                    let step = self.slack(i, &v).max(T::zero()) / (-gp);
                    // strict improvement only, so ties keep the lowest index
                    let better = match best {
                        None => true,
                        Some((_, s)) => step < s - T::epsilon() * (T::one() + s.abs()) * T::lit(16.0),
                    };
                    if better {
                        best = Some((i, step));
                    }
                }
                let Some((enter, step)) = best else {
                    return Ok(Outcome::Unbounded);
                };
                for (x, d) in v.iter_mut().zip(&step_dir) {
                    *x += step * *d;
                }
                if basis.push(&self.g_vec(enter), T::PIVOT_TOL * T::lit(0.5)) {
                    working.push(enter);
                }
                continue;
            }

            let (lambda, _) = basis.express(&c);
            let leave = working
                .iter()
                .zip(&lambda)
                .filter(|(_, &l)| l < -T::FEAS_TOL * scale)
                .map(|(&i, _)| i)
                .min();
            match leave {
                None => return Ok(Outcome::Optimal { v, working }),
                Some(i) => {
                    self.tick()?;
                    working.retain(|&w| w != i);
                    basis = self.basis_of(&working);
                }
            }
        }
    }

    /// Dual active-set iterations from a dual feasible working set. The point
    /// satisfies the working constraints with equality but may violate others.
    fn dual(&mut self, mut v: Vec<T>, mut working: Vec<usize>) -> Result<Outcome<T>> {
        let c = self.p.cost().to_vec();
        let scale = self.cost_scale();
        let mut basis = self.basis_of(&working);
        loop {
            let Some(q) = self.first_violated(&v, &working) else {
                let (lambda, _) = basis.express(&c);
                if lambda.iter().any(|&l| l < -T::FEAS_TOL * scale) {
                    return self.primal(v, working);
                }
                return Ok(Outcome::Optimal { v, working });
            };
            self.tick()?;
            let gq = self.g_vec(q);
            let (coeff, orth) = basis.split(&gq);
            let orth_norm = norm(&orth);
            let shortfall = self.h(q) - dot(&gq, &v);
            if orth_norm > T::PIVOT_TOL * self.g_norm(q) {
                // q is independent of the working set: move inside its null
                // space, the objective does not change
                let t = shortfall / (orth_norm * orth_norm);
                for (x, d) in v.iter_mut().zip(&orth) {
                    *x += t * *d;
                }
                basis.push(&gq, T::PIVOT_TOL * T::lit(0.5));
                working.push(q);
                continue;
            }

            let r = basis.solve_upper(&coeff);
            let (lambda, _) = basis.express(&c);
            let mut leave: Option<(usize, usize, T)> = None;
            for (pos, (&i, (&ri, &li))) in working.iter().zip(r.iter().zip(&lambda)).enumerate() {
                if ri <= T::PIVOT_TOL {
                    continue;
                }
                let t = li.max(T::zero()) / ri;
                let better = match leave {
                    None => true,
                    Some((_, li_best, tb)) => {
                        t < tb - T::epsilon() * (T::one() + tb) * T::lit(16.0)
                            || (t <= tb + T::epsilon() * (T::one() + tb) * T::lit(16.0) && i < li_best)
                    }
                };
                if better {
                    leave = Some((pos, i, t));
                }
            }
            let Some((pos, _, _)) = leave else {
                return Ok(Outcome::Infeasible);
            };
            working.remove(pos);
            working.push(q);
            basis = self.basis_of(&working);
            let resid: Vec<T> = working.iter().map(|&i| self.h(i) - self.g_dot(i, &v)).collect();
            for (x, d) in v.iter_mut().zip(basis.min_norm_correction(&resid)) {
                *x += d;
            }
        }
    }

    fn finish(&self, out: Outcome<T>) -> LpSolution<T> {
        match out {
            Outcome::Optimal { v, working } => {
                let basis = self.basis_of(&working);
                let (lambda, _) = basis.express(self.p.cost());
                let multipliers = working
                    .iter()
                    .zip(&lambda)
                    .map(|(&i, &l)| (self.id(i), l.max(T::zero())))
                    .collect();
                let warm = WarmStart {
                    active: working.iter().map(|&i| self.id(i)).collect(),
                    labels: self.p.labels().to_vec(),
                    point: v.clone(),
                };
                LpSolution {
                    status: LpStatus::Optimal,
                    objective: self.p.objective(&v),
                    v,
                    iterations: self.iterations,
                    multipliers,
                    warm: Some(warm),
                }
            }
            Outcome::Infeasible => self.empty(LpStatus::Infeasible, T::infinity()),
            Outcome::Unbounded => self.empty(LpStatus::Unbounded, T::neg_infinity()),
        }
    }

    fn empty(&self, status: LpStatus, objective: T) -> LpSolution<T> {
        LpSolution {
            status,
            v: Vec::new(),
            objective,
            iterations: self.iterations,
            multipliers: Vec::new(),
            warm: None,
        }
    }
}
