use num_complex::Complex;

use super::{parallel_map, snr_to_sigma, trial_rng};
use crate::error::{Error, Result};
use crate::model::{draw_channel, draw_noise, quantize_1bit, ChannelMatrix, SymbolVector, TransmitVector};
use crate::precoders::{LookupTable, PrecoderKind, TABLE_MAX_RX};

#[derive(Debug, Clone, PartialEq)]
pub struct BerConfig {
    pub users: usize,
    pub antennas_per_user: usize,
    pub tx: usize,
    pub snr_db: Vec<f64>,
    /// Number of `(H, s)` draws.
    pub trials: usize,
    pub seed: u64,
    /// Symbol vectors sent over each channel draw. Above 1, precoded vectors
    /// are cached per rotation class, i.e. a lookup table is filled lazily.
    pub symbols_per_channel: usize,
    pub workers: usize,
}

impl BerConfig {
    pub fn new(users: usize, antennas_per_user: usize, tx: usize, snr_db: Vec<f64>, trials: usize, seed: u64) -> Self {
        Self {
            users,
            antennas_per_user,
            tx,
            snr_db,
            trials,
            seed,
            symbols_per_channel: 1,
            workers: 1,
        }
    }

    pub fn rx_len(&self) -> usize {
        self.users * self.antennas_per_user
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.symbols_per_channel == 0 {
            return Err(Error::InvalidArgument("trials and symbols_per_channel must be at least 1".into()));
        }
        if self.users == 0 || self.antennas_per_user == 0 || self.tx == 0 {
            return Err(Error::InvalidArgument("K, L and M must be at least 1".into()));
        }
        if self.snr_db.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("SNR values must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub snr_db: f64,
    pub precoder: String,
    pub trials: u64,
    pub bit_errors: u64,
    /// `bit_errors / (2 K L trials)`.
    pub ber: f64,
}

impl BerRecord {
    pub fn bits(&self, rx_len: usize) -> u64 {
        2 * rx_len as u64 * self.trials
    }

    /// Binomial standard error of `ber`.
    pub fn std_error(&self, rx_len: usize) -> f64 {
        (self.ber * (1.0 - self.ber) / self.bits(rx_len) as f64).sqrt()
    }
}

/// Uncoded BER of `precoder` at every SNR of the config.
///
/// Block `b` covers trials `b * S .. (b + 1) * S` with `S` symbols per
/// channel and draws, from stream `b`: the channel, then per trial the
/// symbol vector followed by one noise vector per SNR point. The same seed
/// therefore gives every precoder the same channels, symbols and noise.
pub fn simulate_ber(precoder: PrecoderKind, cfg: &BerConfig) -> Result<Vec<BerRecord>> {
    cfg.validate()?;
    let per = cfg.symbols_per_channel;
    let blocks = cfg.trials.div_ceil(per);
    let partial = parallel_map(blocks, cfg.workers, |b| {
        let first = b * per;
        run_block(precoder, cfg, b as u64, first, per.min(cfg.trials - first))
    });
    let mut errors = vec![0u64; cfg.snr_db.len()];
    for block in partial {
        for (acc, e) in errors.iter_mut().zip(block?) {
            *acc += e;
        }
    }
    let bits = 2.0 * cfg.rx_len() as f64 * cfg.trials as f64;
    Ok(cfg
        .snr_db
        .iter()
        .zip(errors)
        .map(|(&snr_db, bit_errors)| BerRecord {
            snr_db,
            precoder: precoder.to_string(),
            trials: cfg.trials as u64,
            bit_errors,
            ber: bit_errors as f64 / bits,
        })
        .collect())
}

fn run_block(precoder: PrecoderKind, cfg: &BerConfig, block: u64, first: usize, count: usize) -> Result<Vec<u64>> {
    let mut rng = trial_rng(cfg.seed, block);
    let h: ChannelMatrix<f64> = draw_channel(&mut rng, cfg.users, cfg.antennas_per_user, cfg.tx)?;
    let n = cfg.rx_len();
    let cache_len = (count > 1 && n <= TABLE_MAX_RX).then(|| 1usize << (2 * (n - 1)));
    let mut cache: Vec<Option<TransmitVector<f64>>> = vec![None; cache_len.unwrap_or(0)];
    let mut errors = vec![0u64; cfg.snr_db.len()];

    for t in first..first + count {
        let s = SymbolVector::draw(&mut rng, n);
        let fail = |e: Error| Error::Trial {
            precoder: precoder.to_string(),
            trial: t,
            reason: e.to_string(),
        };
        let x = if cache_len.is_some() {
            let (class, q) = LookupTable::<f64>::class_of(&s);
            if cache[class].is_none() {
                let rep = SymbolVector::from_number(class, n);
                cache[class] = Some(precoder.precode(&h, &rep).map_err(fail)?.x);
            }
            cache[class].as_ref().map(|x| x.rotated(q)).expect("filled above")
        } else {
            precoder.precode(&h, &s).map_err(fail)?.x
        };
        let z = h.mul_vec(x.entries())?;
        let energy = x.energy();
        let sent = s.to_complex::<f64>();
        for (acc, &snr) in errors.iter_mut().zip(&cfg.snr_db) {
            let noise = draw_noise(&mut rng, n, snr_to_sigma(snr, energy));
            let r: Vec<Complex<f64>> = z.iter().zip(&noise).map(|(a, b)| a + b).collect();
            *acc += bit_errors(&quantize_1bit(&r), &sent);
        }
    }
    Ok(errors)
}

fn bit_errors(y: &[Complex<f64>], s: &[Complex<f64>]) -> u64 {
    y.iter()
        .zip(s)
        .map(|(a, b)| u64::from(a.re != b.re) + u64::from(a.im != b.im))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_error_count() {
        let s = [Complex::new(1.0, 1.0), Complex::new(-1.0, 1.0)];
        let y = [Complex::new(1.0, -1.0), Complex::new(1.0, -1.0)];
        assert_eq!(bit_errors(&y, &s), 3);
        assert_eq!(bit_errors(&s, &s), 0);
    }

    #[test]
    fn record_layout_and_determinism() {
        let cfg = BerConfig::new(2, 1, 3, vec![0.0, 10.0], 40, 3);
        let a = simulate_ber(PrecoderKind::Approx, &cfg).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].precoder, "approx");
        assert!((a[0].ber - a[0].bit_errors as f64 / 160.0).abs() < 1e-15);
        let threads = BerConfig { workers: 3, ..cfg.clone() };
        assert_eq!(simulate_ber(PrecoderKind::Approx, &threads).unwrap(), a);
    }

    #[test]
    fn zero_trials_rejected() {
        let cfg = BerConfig::new(2, 1, 3, vec![0.0], 0, 3);
        assert!(simulate_ber(PrecoderKind::Bnb, &cfg).is_err());
    }

    #[test]
    fn precoder_failure_names_the_trial() {
        // ZF needs M >= KL
        let cfg = BerConfig::new(2, 1, 1, vec![0.0], 5, 3);
        match simulate_ber(PrecoderKind::Zf, &cfg) {
            Err(Error::Trial { trial, precoder, .. }) => {
                assert_eq!(trial, 0);
                assert_eq!(precoder, "zf");
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
