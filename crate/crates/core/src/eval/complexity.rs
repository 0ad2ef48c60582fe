use std::time::Duration;

use super::{parallel_map, trial_rng};
use crate::error::{Error, Result};
use crate::model::{draw_channel, SymbolVector};
use crate::precoders::{bnb_precode, SolveStats};

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityConfig {
    pub users: usize,
    pub antennas_per_user: usize,
    pub tx: Vec<usize>,
    pub instances: usize,
    pub seed: u64,
    pub workers: usize,
}

impl ComplexityConfig {
    pub fn new(users: usize, antennas_per_user: usize, tx: Vec<usize>, instances: usize, seed: u64) -> Self {
        Self {
            users,
            antennas_per_user,
            tx,
            instances,
            seed,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityRecord {
    pub tx: usize,
    pub instances: usize,
    pub mean_visited_branches: f64,
    pub max_visited_branches: usize,
    pub mean_lp_solves: f64,
    pub mean_lp_iterations: f64,
    /// `4^M`, the candidate count of full enumeration.
    pub exhaustive_candidates: f64,
    pub mean_wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityProfile {
    pub records: Vec<ComplexityRecord>,
    /// Least-squares slope of `ln(mean visited)` against `ln(2M)`.
    pub slope: f64,
}

/// Runs branch-and-bound on `instances` random `(H, s)` per `M`. Instance `j`
/// at `M` draws from stream `(M << 32) | j`.
pub fn complexity_profile(cfg: &ComplexityConfig) -> Result<ComplexityProfile> {
    if cfg.instances < 10 {
        return Err(Error::InvalidArgument(format!("need at least 10 instances per M, got {}", cfg.instances)));
    }
    if cfg.tx.is_empty() {
        return Err(Error::InvalidArgument("no M values given".into()));
    }
    let mut records = Vec::with_capacity(cfg.tx.len());
    for &m in &cfg.tx {
        let stats = parallel_map(cfg.instances, cfg.workers, |j| -> Result<SolveStats> {
            let mut rng = trial_rng(cfg.seed, ((m as u64) << 32) | j as u64);
            let h = draw_channel::<f64, _>(&mut rng, cfg.users, cfg.antennas_per_user, m)?;
            let s = SymbolVector::draw(&mut rng, cfg.users * cfg.antennas_per_user);
            bnb_precode(&h, &s).map(|r| r.stats).map_err(|e| Error::Trial {
                precoder: "bnb".into(),
                trial: j,
                reason: e.to_string(),
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let count = stats.len() as f64;
        let mean = |f: fn(&SolveStats) -> usize| stats.iter().map(f).sum::<usize>() as f64 / count;
        records.push(ComplexityRecord {
            tx: m,
            instances: cfg.instances,
            mean_visited_branches: mean(|s| s.visited_branches),
            max_visited_branches: stats.iter().map(|s| s.visited_branches).max().unwrap_or(0),
            mean_lp_solves: mean(|s| s.lp_solves),
            mean_lp_iterations: mean(|s| s.lp_iterations_total),
            exhaustive_candidates: 4f64.powi(m as i32),
            mean_wall_time: stats.iter().map(|s| s.wall_time).sum::<Duration>() / cfg.instances as u32,
        });
    }
    let xs: Vec<f64> = records.iter().map(|r| (2.0 * r.tx as f64).ln()).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.mean_visited_branches.ln()).collect();
    Ok(ComplexityProfile {
        slope: loglog_slope(&xs, &ys),
        records,
    })
}

/// Ordinary least-squares slope of `ys` on `xs`; NaN with fewer than two
/// distinct abscissae.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len()) as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return f64::NAN;
    }
    sxy / sxx
}
