use crate::error::{Error, Result};

/// `sigma_n^2 = x_energy / 10^(snr_db / 10)`.
pub fn snr_to_sigma(snr_db: f64, x_energy: f64) -> f64 {
    x_energy / 10f64.powf(snr_db / 10.0)
}

pub fn sigma_to_snr(sigma_n_sq: f64, x_energy: f64) -> f64 {
    10.0 * (x_energy / sigma_n_sq).log10()
}

/// One point of an SNR sweep for unit transmit energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrPoint {
    pub snr_db: f64,
    pub sigma_n_sq: f64,
}

impl SnrPoint {
    pub fn new(snr_db: f64) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(Error::InvalidArgument(format!("SNR must be finite, got {snr_db}")));
        }
        Ok(Self {
            snr_db,
            sigma_n_sq: snr_to_sigma(snr_db, 1.0),
        })
    }
}
