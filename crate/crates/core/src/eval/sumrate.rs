use super::{parallel_map, snr_to_sigma, trial_rng};
use crate::error::{Error, Result};
use crate::model::{draw_channel, ChannelMatrix, SymbolVector};
use crate::precoders::{build_lookup_table, LookupTable, PrecoderKind};

/// Largest `K L` accepted by [`sum_rate`]: `4^6` symbol vectors.
pub const SUM_RATE_MAX_RX: usize = 6;

/// Noise scaling inside the per-dimension flip probability
/// `P(sign(r + n) = y) = erfc(-y r / a) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErfcConvention {
    /// `a = sigma_n`: complex noise `CN(0, sigma_n^2)`, variance
    /// `sigma_n^2 / 2` per real dimension. Matches the Monte Carlo noise.
    #[default]
    Complex,
    /// `a = sqrt(2) sigma_n`: variance `sigma_n^2` per real dimension.
    PerDimension,
}

impl ErfcConvention {
    fn scale(self, sigma_n: f64) -> f64 {
        match self {
            ErfcConvention::Complex => sigma_n,
            ErfcConvention::PerDimension => std::f64::consts::SQRT_2 * sigma_n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumRate {
    /// Mutual information `I_k` per user, bits per channel use.
    pub per_user: Vec<f64>,
    pub total: f64,
    /// Largest `|sum_y P(y_k | s_k) - 1|` seen.
    pub normalization_error: f64,
}

/// Exact sum of per-user mutual informations of the quantized channel with
/// uniform QPSK inputs, serving every symbol vector from `table`.
pub fn sum_rate(
    h: &ChannelMatrix<f64>,
    table: &LookupTable<f64>,
    sigma_n_sq: f64,
    convention: ErfcConvention,
) -> Result<SumRate> {
    let n = h.rx_len();
    if n > SUM_RATE_MAX_RX {
        return Err(Error::SizeCap {
            what: "KL (sum rate)",
            value: n,
            cap: SUM_RATE_MAX_RX,
        });
    }
    if table.rx_len() != n {
        return Err(Error::Dimension(format!("table for KL = {}, channel has {n}", table.rx_len())));
    }
    if sigma_n_sq.is_nan() || sigma_n_sq <= 0.0 {
        return Err(Error::InvalidArgument(format!("noise variance must be positive, got {sigma_n_sq}")));
    }
    let l = h.antennas_per_user();
    let scale = convention.scale(sigma_n_sq.sqrt());
    let inputs = 1usize << (2 * l);
    let total_vectors = 1usize << (2 * n);

    // P(+ | s) for each real receive dimension, first the real parts of all
    // antennas, then the imaginary parts
    let mut p_plus = Vec::with_capacity(total_vectors);
    for num in 0..total_vectors {
        let s = SymbolVector::from_number(num, n);
        let z = h.mul_vec(table.lookup(&s)?.entries())?;
        let probs: Vec<(f64, f64)> = z
            .iter()
            .map(|v| v.re)
            .chain(z.iter().map(|v| v.im))
            .map(|r| (0.5 * libm::erfc(-r / scale), 0.5 * libm::erfc(r / scale)))
            .collect();
        p_plus.push(probs);
    }

    let others = (total_vectors / inputs) as f64;
    let mut per_user = Vec::with_capacity(h.users());
    let mut normalization_error: f64 = 0.0;
    for k in 0..h.users() {
        let rows = h.user_rows(k);
        // cond[s_k][y_k] = P(y_k | s_k)
        let mut cond = vec![vec![0.0; inputs]; inputs];
        for (num, probs) in p_plus.iter().enumerate() {
            let s = SymbolVector::from_number(num, n);
            let s_k = SymbolVector::from_indices(s.indices()[rows.clone()].to_vec())?.number();
            for (y, slot) in cond[s_k].iter_mut().enumerate() {
                let y_vec = SymbolVector::from_number(y, l).to_complex::<f64>();
                let mut p = 1.0;
                for (i, yv) in y_vec.iter().enumerate() {
                    let (re_plus, re_minus) = probs[rows.start + i];
                    let (im_plus, im_minus) = probs[n + rows.start + i];
                    p *= if yv.re > 0.0 { re_plus } else { re_minus };
                    p *= if yv.im > 0.0 { im_plus } else { im_minus };
                }
                *slot += p / others;
            }
        }
        for row in &cond {
            normalization_error = normalization_error.max((row.iter().sum::<f64>() - 1.0).abs());
        }
        let p_in = 1.0 / inputs as f64;
        let mut info = 0.0;
        for y in 0..inputs {
            let p_y: f64 = cond.iter().map(|row| row[y] * p_in).sum();
            for row in &cond {
                let p = row[y];
                if p > 0.0 {
                    info += p * p_in * (p / p_y).log2();
                }
            }
        }
        per_user.push(info.max(0.0));
    }
    Ok(SumRate {
        total: per_user.iter().sum(),
        per_user,
        normalization_error,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumRateConfig {
    pub users: usize,
    pub antennas_per_user: usize,
    pub tx: usize,
    pub snr_db: Vec<f64>,
    /// Channel draws averaged per SNR point.
    pub channels: usize,
    pub seed: u64,
    pub convention: ErfcConvention,
    pub workers: usize,
}

impl SumRateConfig {
    pub fn new(users: usize, antennas_per_user: usize, tx: usize, snr_db: Vec<f64>, seed: u64) -> Self {
        Self {
            users,
            antennas_per_user,
            tx,
            snr_db,
            channels: 50,
            seed,
            convention: ErfcConvention::default(),
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumRateRecord {
    pub snr_db: f64,
    pub precoder: String,
    /// Mean total rate over the channel draws.
    pub rate_bpcu: f64,
    pub channels_averaged: usize,
    pub normalization_error: f64,
}

/// Average sum rate over `channels` draws; channel `c` comes from stream `c`
/// and one lookup table per channel serves every SNR point.
pub fn sum_rate_sweep(precoder: PrecoderKind, cfg: &SumRateConfig) -> Result<Vec<SumRateRecord>> {
    if cfg.channels == 0 {
        return Err(Error::InvalidArgument("at least one channel draw is needed".into()));
    }
    if cfg.snr_db.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("SNR values must be finite".into()));
    }
    let per_channel = parallel_map(cfg.channels, cfg.workers, |c| -> Result<Vec<SumRate>> {
        let mut rng = trial_rng(cfg.seed, c as u64);
        let h = draw_channel(&mut rng, cfg.users, cfg.antennas_per_user, cfg.tx)?;
        let table = build_lookup_table(&h, |h, s| precoder.precode(h, s)).map_err(|e| Error::Trial {
            precoder: precoder.to_string(),
            trial: c,
            reason: e.to_string(),
        })?;
        let energy = (0..table.len()).map(|i| table.entry(i).0.energy()).sum::<f64>() / table.len() as f64;
        cfg.snr_db
            .iter()
            .map(|&snr| sum_rate(&h, &table, snr_to_sigma(snr, energy), cfg.convention))
            .collect()
    });
    let per_channel = per_channel.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(cfg
        .snr_db
        .iter()
        .enumerate()
        .map(|(i, &snr_db)| SumRateRecord {
            snr_db,
            precoder: precoder.to_string(),
            rate_bpcu: per_channel.iter().map(|r| r[i].total).sum::<f64>() / cfg.channels as f64,
            channels_averaged: cfg.channels,
            normalization_error: per_channel.iter().map(|r| r[i].normalization_error).fold(0.0, f64::max),
        })
        .collect())
}
