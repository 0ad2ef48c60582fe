use super::PrecodeResult;
use crate::error::{Error, Result};
use crate::model::{ChannelMatrix, SymbolVector, ThresholdMargin, TransmitVector};
use crate::scalar::Real;

/// Largest `K L` for which a table is built (`4^7` entries).
pub const TABLE_MAX_RX: usize = 8;

/// Precoding vectors for one channel, one per rotation class of symbol
/// vectors. The representative of a class has first symbol `1 + j`; a vector
/// `s = j^q s_rep` is served by `j^q x(s_rep)`, which has the same margin
/// because the 1-bit alphabet is closed under multiplication by `j`.
#[derive(Debug, Clone)]
pub struct LookupTable<T> {
    rx_len: usize,
    entries: Vec<(TransmitVector<T>, ThresholdMargin<T>)>,
}

impl<T: Real> LookupTable<T> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn rx_len(&self) -> usize {
        self.rx_len
    }

    /// Canonical class index and rotation `q` with `s = j^q s_rep`.
    pub fn class_of(s: &SymbolVector) -> (usize, u8) {
        let q = s.indices()[0];
        (s.rotated((4 - q) % 4).number(), q)
    }

    /// Representative symbol vector of class `index`.
    pub fn representative(&self, index: usize) -> SymbolVector {
        SymbolVector::from_number(index, self.rx_len)
    }

    /// Stored vector and margin of the representative of class `index`.
    pub fn entry(&self, index: usize) -> &(TransmitVector<T>, ThresholdMargin<T>) {
        &self.entries[index]
    }

    pub fn lookup(&self, s: &SymbolVector) -> Result<TransmitVector<T>> {
        if s.len() != self.rx_len {
            return Err(Error::Dimension(format!(
                "symbol vector of length {} for a table built for {}",
                s.len(),
                self.rx_len
            )));
        }
        let (class, q) = Self::class_of(s);
        Ok(self.entries[class].0.rotated(q))
    }
}

pub fn build_lookup_table<T, F>(h: &ChannelMatrix<T>, mut precoder: F) -> Result<LookupTable<T>>
where
    T: Real,
    F: FnMut(&ChannelMatrix<T>, &SymbolVector) -> Result<PrecodeResult<T>>,
{
    let n = h.rx_len();
    if n > TABLE_MAX_RX {
        return Err(Error::SizeCap {
            what: "KL (lookup table)",
            value: n,
            cap: TABLE_MAX_RX,
        });
    }
    let entries = (0..1usize << (2 * (n - 1)))
        .map(|class| {
            let rep = SymbolVector::from_number(class, n);
            precoder(h, &rep).map(|r| (r.x, r.epsilon))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LookupTable { rx_len: n, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precoders::approx_1bit_precode;
    use std::collections::HashSet;

    #[test]
    fn class_mapping_is_a_bijection() {
        let n = 3;
        let mut seen = HashSet::new();
        for num in 0..64 {
            let s = SymbolVector::from_number(num, n);
            let (class, q) = LookupTable::<f64>::class_of(&s);
            assert!(class < 16);
            assert_eq!(SymbolVector::from_number(class, n).rotated(q), s);
            seen.insert((class, q));
        }
        assert_eq!(seen.len(), 64);
    }

    #[test]
    fn cap() {
        let h = ChannelMatrix::new(9, 1, 1, vec![num_complex::Complex::new(1.0, 0.0); 9]).unwrap();
        assert!(matches!(
            build_lookup_table(&h, approx_1bit_precode),
            Err(Error::SizeCap { .. })
        ));
    }
}
