#![allow(dead_code)]

use onebit_precoding::linalg::DenseMatrix;
use onebit_precoding::lp::{ConstraintId, LinearProgram, LpSolution};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Random LP with a known interior-ish feasible point `v0`. Roughly 80% of
/// coordinates get a finite box so most instances are bounded.
pub fn random_lp<R: Rng>(rng: &mut R, n: usize, m: usize) -> (LinearProgram<f64>, Vec<f64>) {
    let mut normal = || -> f64 { StandardNormal.sample(&mut *rng) };
    let a: Vec<f64> = (0..m * n).map(|_| normal()).collect();
    let cost: Vec<f64> = (0..n).map(|_| normal()).collect();
    let v0: Vec<f64> = (0..n).map(|_| normal()).collect();
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for &x in &v0 {
        let u: f64 = rng.random();
        let (l, h) = if u < 0.8 {
            (x - 1.0 - 2.0 * rng.random::<f64>(), x + 1.0 + 2.0 * rng.random::<f64>())
        } else if u < 0.9 {
            (x - 1.0, f64::INFINITY)
        } else {
            (f64::NEG_INFINITY, f64::INFINITY)
        };
        lower.push(l);
        upper.push(h);
    }
    let b: Vec<f64> = (0..m)
        .map(|i| {
            let ax: f64 = (0..n).map(|j| a[i * n + j] * v0[j]).sum();
            ax - rng.random::<f64>() * 2.0
        })
        .collect();
    let p = LinearProgram::new(cost, DenseMatrix::from_row_major(m, n, a).unwrap(), b)
        .unwrap()
        .with_bounds(lower, upper)
        .unwrap();
    (p, v0)
}

/// Checks feasibility, complementarity and stationarity of an optimal
/// solution from its reported multipliers. Returns a description of the
/// first failure.
pub fn certify(p: &LinearProgram<f64>, sol: &LpSolution<f64>, feas_tol: f64, kkt_tol: f64) -> Result<(), String> {
    let v = &sol.v;
    let viol = p.max_violation(v);
    if viol > feas_tol {
        return Err(format!("infeasible by {viol:e}"));
    }
    let n = p.num_vars();
    let pos = |label: usize| p.labels().iter().position(|&l| l == label).unwrap();
    let mut recon = vec![0.0; n];
    for &(id, lambda) in &sol.multipliers {
        if lambda < 0.0 {
            return Err(format!("negative multiplier {lambda} on {id:?}"));
        }
        let slack = match id {
            ConstraintId::Row(i) => {
                let row = p.a().row(i);
                for j in 0..n {
                    recon[j] += lambda * row[j];
                }
                row.iter().zip(v).map(|(a, x)| a * x).sum::<f64>() - p.b()[i]
            }
            ConstraintId::Lower(l) => {
                let j = pos(l);
                recon[j] += lambda;
                v[j] - p.lower()[j]
            }
            ConstraintId::Upper(l) => {
                let j = pos(l);
                recon[j] -= lambda;
                p.upper()[j] - v[j]
            }
        };
        if lambda > 0.0 && slack.abs() > feas_tol {
            return Err(format!("multiplier on inactive {id:?} (slack {slack:e})"));
        }
    }
    let stat = recon
        .iter()
        .zip(p.cost())
        .map(|(r, c)| (r - c).abs())
        .fold(0.0, f64::max);
    if stat > kkt_tol {
        return Err(format!("stationarity residual {stat:e}"));
    }
    Ok(())
}
