//! Downlink model: channel, QPSK symbols, transmit vectors, the real-valued
//! expansion, the 1-bit receiver and random instance generation.
//!
//! Channel entries are drawn with unit variance per complex entry, so that
//! for unit-energy transmit vectors the SNR equals `1 / sigma_n^2`. Absolute
//! SNR alignment with other published curves depends on that convention.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{dot, DenseMatrix};
use crate::scalar::Real;

/// QPSK points in rotation order: index `q + 1` is index `q` times `j`.
pub const QPSK_ORDER: [(i8, i8); 4] = [(1, 1), (-1, 1), (-1, -1), (1, -1)];

/// Flat-fading channel of shape `(K L) x M`, user-major rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix<T> {
    users: usize,
    antennas_per_user: usize,
    tx_antennas: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> ChannelMatrix<T> {
    /// `entries` is row-major with `users * antennas_per_user` rows.
    pub fn new(
        users: usize,
        antennas_per_user: usize,
        tx_antennas: usize,
        entries: Vec<Complex<T>>,
    ) -> Result<Self> {
        if users == 0 || antennas_per_user == 0 || tx_antennas == 0 {
            return Err(Error::InvalidArgument("K, L and M must all be at least 1".into()));
        }
        if entries.len() != users * antennas_per_user * tx_antennas {
            return Err(Error::Dimension(format!(
                "{} entries for a {}x{} channel",
                entries.len(),
                users * antennas_per_user,
                tx_antennas
            )));
        }
        if entries.iter().any(|h| !h.re.is_finite() || !h.im.is_finite()) {
            return Err(Error::InvalidArgument("channel entries must be finite".into()));
        }
        Ok(Self {
            users,
            antennas_per_user,
            tx_antennas,
            entries,
        })
    }

    /// Single-antenna users, one row per user.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension("ragged channel rows".into()));
        }
        Self::new(rows.len(), 1, m, rows.iter().flatten().copied().collect())
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn antennas_per_user(&self) -> usize {
        self.antennas_per_user
    }

    /// `K L`
    pub fn rx_len(&self) -> usize {
        self.users * self.antennas_per_user
    }

    /// `M`
    pub fn tx_len(&self) -> usize {
        self.tx_antennas
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[row * self.tx_antennas + col]
    }

    pub fn row(&self, row: usize) -> &[Complex<T>] {
        &self.entries[row * self.tx_antennas..(row + 1) * self.tx_antennas]
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn mul_vec(&self, x: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if x.len() != self.tx_antennas {
            return Err(Error::Dimension(format!(
                "transmit vector has length {}, channel expects {}",
                x.len(),
                self.tx_antennas
            )));
        }
        Ok((0..self.rx_len())
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (h, v)| acc + h * v)
            })
            .collect())
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            entries: self.entries.iter().map(|h| h * factor).collect(),
            ..self.clone()
        }
    }

    /// Rows belonging to user `k`.
    pub fn user_rows(&self, k: usize) -> std::ops::Range<usize> {
        k * self.antennas_per_user..(k + 1) * self.antennas_per_user
    }
}

/// QPSK target symbols, one per receive antenna.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolVector {
    // indices into QPSK_ORDER
    indices: Vec<u8>,
}

impl SymbolVector {
    pub fn from_indices(indices: Vec<u8>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidArgument("empty symbol vector".into()));
        }
        if let Some(bad) = indices.iter().find(|&&i| i > 3) {
            return Err(Error::InvalidArgument(format!("QPSK index {bad} out of range")));
        }
        Ok(Self { indices })
    }

    pub fn from_complex<T: Real>(entries: &[Complex<T>]) -> Result<Self> {
        let indices = entries
            .iter()
            .map(|s| {
                QPSK_ORDER
                    .iter()
                    .position(|&(re, im)| s.re == T::from_i8(re).unwrap() && s.im == T::from_i8(im).unwrap())
                    .map(|p| p as u8)
                    .ok_or_else(|| Error::InvalidArgument(format!("{s} is not a QPSK symbol (+-1 +-j)")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(indices)
    }

    /// Symbol vector number `index` in base-4 enumeration (first entry most significant).
    pub fn from_number(index: usize, len: usize) -> Self {
        let indices = (0..len)
            .map(|i| ((index >> (2 * (len - 1 - i))) & 3) as u8)
            .collect();
        Self { indices }
    }

    pub fn number(&self) -> usize {
        self.indices.iter().fold(0, |acc, &i| (acc << 2) | i as usize)
    }

    pub fn draw<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Self {
        Self {
            indices: (0..len).map(|_| rng.random_range(0..4u8)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[u8] {
        &self.indices
    }

    pub fn to_complex<T: Real>(&self) -> Vec<Complex<T>> {
        self.indices
            .iter()
            .map(|&i| {
                let (re, im) = QPSK_ORDER[i as usize];
                Complex::new(T::from_i8(re).unwrap(), T::from_i8(im).unwrap())
            })
            .collect()
    }

    /// `j^q * s`
    pub fn rotated(&self, q: u8) -> Self {
        Self {
            indices: self.indices.iter().map(|&i| (i + q) % 4).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransmitMode {
    Continuous,
    OneBit,
}

/// Precoded transmit vector of length `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmitVector<T> {
    entries: Vec<Complex<T>>,
    mode: TransmitMode,
}

impl<T: Real> TransmitVector<T> {
    pub fn continuous(entries: Vec<Complex<T>>) -> Self {
        Self {
            entries,
            mode: TransmitMode::Continuous,
        }
    }

    /// Builds a 1-bit vector from signs of the real-expanded coordinates
    /// (`Re` block then `Im` block). Zero maps to `+`.
    pub fn one_bit_from_signs(x_r: &[T]) -> Result<Self> {
        if x_r.is_empty() || !x_r.len().is_multiple_of(2) {
            return Err(Error::Dimension("real-expanded vector must have even length".into()));
        }
        let m = x_r.len() / 2;
        let c = alphabet_level::<T>(m);
        let sgn = |v: T| if v < T::zero() { -c } else { c };
        let entries = (0..m)
            .map(|i| Complex::new(sgn(x_r[i]), sgn(x_r[m + i])))
            .collect();
        Ok(Self {
            entries,
            mode: TransmitMode::OneBit,
        })
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn mode(&self) -> TransmitMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn energy(&self) -> T {
        self.entries.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn to_real(&self) -> Vec<T> {
        realify_vector(&self.entries)
    }

    /// `j^q * x`
    pub fn rotated(&self, q: u8) -> Self {
        let mut r = Complex::new(T::one(), T::zero());
        for _ in 0..q % 4 {
            r *= Complex::new(T::zero(), T::one());
        }
        Self {
            entries: self.entries.iter().map(|v| v * r).collect(),
            mode: self.mode,
        }
    }
}

/// Per-coordinate magnitude `1 / sqrt(2M)` of the real-valued 1-bit alphabet.
#[inline]
pub fn alphabet_level<T: Real>(m: usize) -> T {
    T::one() / (T::lit(2.0) * T::from_usize(m).unwrap()).sqrt()
}

/// Smallest signed distance to the quantizer threshold over all real
/// receive dimensions.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ThresholdMargin<T>(pub T);

impl<T: Real> ThresholdMargin<T> {
    pub fn value(self) -> T {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel<T> {
    sigma_n_sq: T,
}

impl<T: Real> NoiseModel<T> {
    pub fn new(sigma_n_sq: T) -> Result<Self> {
        if sigma_n_sq.is_nan() || sigma_n_sq <= T::zero() || !sigma_n_sq.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "noise variance must be positive and finite, got {sigma_n_sq}"
            )));
        }
        Ok(Self { sigma_n_sq })
    }

    pub fn sigma_n_sq(&self) -> T {
        self.sigma_n_sq
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, len: usize) -> Vec<Complex<T>> {
        draw_noise(rng, len, self.sigma_n_sq)
    }
}

/// `[Re H, -Im H; Im H, Re H]`
pub fn realify_channel<T: Real>(h: &ChannelMatrix<T>) -> DenseMatrix<T> {
    let (n, m) = (h.rx_len(), h.tx_len());
    let mut out = DenseMatrix::zeros(2 * n, 2 * m);
    for r in 0..n {
        for c in 0..m {
            let v = h.get(r, c);
            out.set(r, c, v.re);
            out.set(r, m + c, -v.im);
            out.set(n + r, c, v.im);
            out.set(n + r, m + c, v.re);
        }
    }
    out
}

/// Real parts stacked over imaginary parts.
pub fn realify_vector<T: Real>(v: &[Complex<T>]) -> Vec<T> {
    v.iter().map(|c| c.re).chain(v.iter().map(|c| c.im)).collect()
}

/// Inverse of [`realify_vector`]. Panics on odd length.
pub fn complexify<T: Real>(v: &[T]) -> Vec<Complex<T>> {
    assert!(v.len().is_multiple_of(2), "real-expanded vector must have even length");
    let n = v.len() / 2;
    (0..n).map(|i| Complex::new(v[i], v[n + i])).collect()
}

/// Real-valued form of an instance: `H_r` and `s_r`, plus the margin matrix
/// `diag(s_r) H_r` whose rows give the signed threshold distances.
#[derive(Debug, Clone)]
pub struct RealExpansion<T> {
    pub h_r: DenseMatrix<T>,
    pub s_r: Vec<T>,
    margin: DenseMatrix<T>,
}

impl<T: Real> RealExpansion<T> {
    pub fn new(h: &ChannelMatrix<T>, s: &SymbolVector) -> Result<Self> {
        if s.len() != h.rx_len() {
            return Err(Error::Dimension(format!(
                "symbol vector has length {}, channel has {} rows",
                s.len(),
                h.rx_len()
            )));
        }
        let h_r = realify_channel(h);
        let s_r = realify_vector(&s.to_complex::<T>());
        let mut margin = h_r.clone();
        for (r, &sr) in s_r.iter().enumerate() {
            for v in margin.row_mut(r) {
                *v *= sr;
            }
        }
        Ok(Self { h_r, s_r, margin })
    }

    /// `diag(s_r) H_r`, shape `2KL x 2M`.
    pub fn margin_matrix(&self) -> &DenseMatrix<T> {
        &self.margin
    }

    pub fn tx_len(&self) -> usize {
        self.h_r.cols() / 2
    }

    /// Per-row margins `diag(s_r) H_r x_r`.
    pub fn margins(&self, x_r: &[T]) -> Vec<T> {
        self.margin.mul_vec(x_r)
    }

    pub fn min_margin(&self, x_r: &[T]) -> ThresholdMargin<T> {
        let m = (0..self.margin.rows())
            .map(|r| dot(self.margin.row(r), x_r))
            .fold(T::infinity(), T::min);
        ThresholdMargin(m)
    }
}

/// `z = H x + n`
pub fn apply_channel<T: Real>(
    h: &ChannelMatrix<T>,
    x: &TransmitVector<T>,
    noise: &[Complex<T>],
) -> Result<Vec<Complex<T>>> {
    if noise.len() != h.rx_len() {
        return Err(Error::Dimension(format!(
            "noise has length {}, channel has {} rows",
            noise.len(),
            h.rx_len()
        )));
    }
    let mut z = h.mul_vec(x.entries())?;
    for (zi, ni) in z.iter_mut().zip(noise) {
        *zi += ni;
    }
    Ok(z)
}

/// 1-bit receiver: `sgn(Re z) + j sgn(Im z)`, with zero mapped to `+1`.
pub fn quantize_1bit<T: Real>(z: &[Complex<T>]) -> Vec<Complex<T>> {
    let sgn = |v: T| if v < T::zero() { -T::one() } else { T::one() };
    z.iter().map(|v| Complex::new(sgn(v.re), sgn(v.im))).collect()
}

pub fn min_threshold_distance<T: Real>(
    h: &ChannelMatrix<T>,
    s: &SymbolVector,
    x: &TransmitVector<T>,
) -> Result<ThresholdMargin<T>> {
    if x.len() != h.tx_len() {
        return Err(Error::Dimension(format!(
            "transmit vector has length {}, channel has {} columns",
            x.len(),
            h.tx_len()
        )));
    }
    Ok(RealExpansion::new(h, s)?.min_margin(&x.to_real()))
}

/// I.i.d. CN(0, 1) channel.
pub fn draw_channel<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    users: usize,
    antennas_per_user: usize,
    tx_antennas: usize,
) -> Result<ChannelMatrix<T>> {
    let n = users * antennas_per_user * tx_antennas;
    let entries = draw_cn(rng, n, 1.0);
    ChannelMatrix::new(users, antennas_per_user, tx_antennas, entries)
}

/// I.i.d. CN(0, sigma_n_sq) noise.
pub fn draw_noise<T: Real, R: Rng + ?Sized>(rng: &mut R, len: usize, sigma_n_sq: T) -> Vec<Complex<T>> {
    draw_cn(rng, len, sigma_n_sq.as_f64())
}

fn draw_cn<T: Real, R: Rng + ?Sized>(rng: &mut R, len: usize, variance: f64) -> Vec<Complex<T>> {
    let sd = (variance / 2.0).sqrt();
    (0..len)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex::new(T::lit(re * sd), T::lit(im * sd))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn realify_channel_blocks() {
        let h = ChannelMatrix::from_rows(&[vec![c(1.0, 1.0)]]).unwrap();
        let r = realify_channel(&h);
        assert_eq!(r.as_slice(), &[1.0, -1.0, 1.0, 1.0]);
        let h = ChannelMatrix::from_rows(&[vec![c(0.0, 1.0)]]).unwrap();
        assert_eq!(realify_channel(&h).as_slice(), &[0.0, -1.0, 1.0, 0.0]);
    }

    #[test]
    fn realify_vector_examples() {
        assert_eq!(realify_vector(&[c(1.0, 2.0)]), vec![1.0, 2.0]);
        assert_eq!(realify_vector(&[c(0.0, 0.0)]), vec![0.0, 0.0]);
    }

    #[test]
    fn channel_shape_is_validated() {
        assert!(ChannelMatrix::<f64>::new(0, 1, 1, vec![]).is_err());
        assert!(ChannelMatrix::new(1, 1, 2, vec![c(1.0, 0.0)]).is_err());
        assert!(ChannelMatrix::new(1, 1, 1, vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn identity_channel_without_noise() {
        let h = ChannelMatrix::from_rows(&[vec![c(1.0, 0.0)]]).unwrap();
        let x = TransmitVector::one_bit_from_signs(&[1.0, 1.0]).unwrap();
        let z = apply_channel(&h, &x, &[c(0.0, 0.0)]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((z[0] - c(r, r)).norm() < 1e-15);
        let flipped = apply_channel(&h, &x, &[c(-5.0, 0.0)]).unwrap();
        assert!(flipped[0].re < 0.0 && flipped[0].im > 0.0);
        assert!(apply_channel(&h, &x, &[]).is_err());
    }

    #[test]
    fn quantizer_examples() {
        assert_eq!(quantize_1bit(&[c(0.3, -0.7)]), vec![c(1.0, -1.0)]);
        assert_eq!(quantize_1bit(&[c(-2.0, 0.01)]), vec![c(-1.0, 1.0)]);
        assert_eq!(quantize_1bit(&[c(0.0, -0.0)]), vec![c(1.0, 1.0)]);
        let z = [c(0.2, -3.0), c(-1e-9, 4.0)];
        let y = quantize_1bit(&z);
        assert_eq!(quantize_1bit(&y), y);
    }

    #[test]
    fn margin_of_identity_instance() {
        let h = ChannelMatrix::from_rows(&[vec![c(1.0, 0.0)]]).unwrap();
        let s = SymbolVector::from_complex(&[c(1.0, 1.0)]).unwrap();
        let x = TransmitVector::one_bit_from_signs(&[1.0, 1.0]).unwrap();
        let eps = min_threshold_distance(&h, &s, &x).unwrap().value();
        assert!((eps - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let neg = SymbolVector::from_complex(&[c(-1.0, -1.0)]).unwrap();
        let eps = min_threshold_distance(&h, &neg, &x).unwrap().value();
        assert!((eps + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn symbol_numbering_and_rotation() {
        let s = SymbolVector::from_number(0b01_11, 2);
        assert_eq!(s.indices(), &[1, 3]);
        assert_eq!(s.number(), 0b0111);
        let rot = s.rotated(1);
        let j = c(0.0, 1.0);
        let expect: Vec<_> = s.to_complex::<f64>().iter().map(|v| v * j).collect();
        assert_eq!(rot.to_complex::<f64>(), expect);
        assert!(SymbolVector::from_complex(&[c(1.0, 0.5)]).is_err());
    }

    #[test]
    fn channel_draw_statistics_and_determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h: ChannelMatrix<f64> = draw_channel(&mut rng, 1000, 1, 100).unwrap();
        let var = h.entries().iter().map(|v| v.norm_sqr()).sum::<f64>() / 1e5;
        assert!((0.98..=1.02).contains(&var), "variance {var}");
        let mean = h.entries().iter().sum::<Complex<f64>>() / 1e5;
        assert!(mean.norm() < 0.01);

        let a: ChannelMatrix<f64> = draw_channel(&mut ChaCha8Rng::seed_from_u64(5), 2, 1, 3).unwrap();
        let b: ChannelMatrix<f64> = draw_channel(&mut ChaCha8Rng::seed_from_u64(5), 2, 1, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noise_draw_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = draw_noise(&mut rng, 100_000, 0.04f64);
        let var = n.iter().map(|v| v.norm_sqr()).sum::<f64>() / 1e5;
        assert!((0.039..=0.041).contains(&var), "variance {var}");
        assert!(NoiseModel::new(0.0f64).is_err());
        assert!(NoiseModel::new(0.1f64).is_ok());
    }

    #[test]
    fn one_bit_vectors_have_unit_energy() {
        for m in 1..=16 {
            let signs: Vec<f64> = (0..2 * m).map(|i| if i % 3 == 0 { -1.0 } else { 1.0 }).collect();
            let x = TransmitVector::one_bit_from_signs(&signs).unwrap();
            assert!((x.energy() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn generic_over_f32() {
        let h = ChannelMatrix::<f32>::from_rows(&[vec![Complex::new(1.0, 0.0)]]).unwrap();
        let s = SymbolVector::from_indices(vec![0]).unwrap();
        let x = TransmitVector::<f32>::one_bit_from_signs(&[1.0, 1.0]).unwrap();
        let eps = min_threshold_distance(&h, &s, &x).unwrap().value();
        assert!((eps - std::f32::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    }
}
