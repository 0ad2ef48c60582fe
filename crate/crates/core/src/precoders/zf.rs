use std::time::Instant;

use num_complex::Complex;

use super::{PrecodeResult, SolveStats};
use crate::error::{Error, Result};
use crate::linalg::solve_complex;
use crate::model::{min_threshold_distance, realify_vector, ChannelMatrix, SymbolVector, TransmitVector};
use crate::scalar::Real;

/// `H^H (H H^H)^-1 s`
pub fn zf_unquantized<T: Real>(h: &ChannelMatrix<T>, s: &SymbolVector) -> Result<Vec<Complex<T>>> {
    let (n, m) = (h.rx_len(), h.tx_len());
    if s.len() != n {
        return Err(Error::Dimension(format!("{} symbols for {n} receive antennas", s.len())));
    }
    if m < n {
        return Err(Error::RankDeficient);
    }
    let mut gram = vec![Complex::new(T::zero(), T::zero()); n * n];
    for i in 0..n {
        for j in 0..n {
            gram[i * n + j] = h
                .row(i)
                .iter()
                .zip(h.row(j))
                .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b.conj());
        }
    }
    let y = solve_complex(gram, s.to_complex(), n)?;
    Ok((0..m)
        .map(|col| {
            (0..n).fold(Complex::new(T::zero(), T::zero()), |acc, r| acc + h.get(r, col).conj() * y[r])
        })
        .collect())
}

/// Zero forcing followed by per-entry quantization to the 1-bit alphabet.
pub fn zf_quantized_precode<T: Real>(h: &ChannelMatrix<T>, s: &SymbolVector) -> Result<PrecodeResult<T>> {
    let start = Instant::now();
    let x_zf = zf_unquantized(h, s)?;
    let x = TransmitVector::one_bit_from_signs(&realify_vector(&x_zf))?;
    Ok(PrecodeResult {
        epsilon: min_threshold_distance(h, s, &x)?,
        x,
        stats: SolveStats {
            wall_time: start.elapsed(),
            ..SolveStats::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::draw_channel;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unit_channel() {
        let h = ChannelMatrix::from_rows(&[vec![Complex::new(1.0, 0.0)]]).unwrap();
        let s = SymbolVector::from_indices(vec![0]).unwrap();
        let r = crate::model::alphabet_level::<f64>(1);
        let res = zf_quantized_precode(&h, &s).unwrap();
        assert_eq!(res.x.entries(), &[Complex::new(r, r)]);
    }

    #[test]
    fn pseudo_inverse_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let h: ChannelMatrix<f64> = draw_channel(&mut rng, 2, 1, 4).unwrap();
            let s = SymbolVector::draw(&mut rng, 2);
            let x = zf_unquantized(&h, &s).unwrap();
            let hx = h.mul_vec(&x).unwrap();
            for (a, b) in hx.iter().zip(s.to_complex::<f64>()) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn rank_deficient_channel_is_rejected() {
        let row = vec![Complex::new(1.0, 0.5), Complex::new(-0.3, 2.0)];
        let h = ChannelMatrix::from_rows(&[row.clone(), row]).unwrap();
        let s = SymbolVector::from_indices(vec![0, 1]).unwrap();
        assert_eq!(zf_quantized_precode(&h, &s).unwrap_err(), Error::RankDeficient);
        let wide = ChannelMatrix::from_rows(&[vec![Complex::new(1.0, 0.0)], vec![Complex::new(2.0, 0.0)]]).unwrap();
        assert_eq!(zf_unquantized(&wide, &s).unwrap_err(), Error::RankDeficient);
    }
}
