//! Finite alphabets and mixed-radix joint indices.
//!
//! Every joint value (an outcome vector `a`, a setting vector `x`, ...) is
//! identified with an integer in `[0, ∏ sizes)`. The last party's digit
//! varies fastest; all tables and file formats use this one order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Alphabet sizes for one party.
///
/// `x_size` is the number of settings the party receives from the process,
/// `a_size` the number of outcomes it feeds back. The local input/output
/// registers used by games default to `i_size = a_size`, `o_size = x_size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartyShape {
    pub x_size: usize,
    pub a_size: usize,
    pub i_size: usize,
    pub o_size: usize,
}

impl PartyShape {
    pub fn new(x_size: usize, a_size: usize) -> Result<Self> {
        Self::with_io(x_size, a_size, a_size, x_size)
    }

    pub fn with_io(x_size: usize, a_size: usize, i_size: usize, o_size: usize) -> Result<Self> {
        if x_size == 0 || a_size == 0 || i_size == 0 || o_size == 0 {
            return Err(Error::Shape(format!(
                "alphabet sizes must be positive, got x={x_size} a={a_size} i={i_size} o={o_size}"
            )));
        }
        Ok(Self {
            x_size,
            a_size,
            i_size,
            o_size,
        })
    }

    /// Shorthand for shapes known to be valid (tests, catalog).
    pub fn sq(size: usize) -> Self {
        Self::new(size, size).expect("positive size")
    }

    /// Whether the game sizes follow the swap convention `|I|=|A|`, `|O|=|X|`.
    pub fn is_swap_convention(&self) -> bool {
        self.i_size == self.a_size && self.o_size == self.x_size
    }
}

/// Mixed-radix encoder/decoder over a list of radices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointIndexer {
    radices: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl JointIndexer {
    pub fn new(radices: Vec<usize>) -> Self {
        let mut strides = vec![1; radices.len()];
        for k in (0..radices.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * radices[k + 1];
        }
        let len = radices.iter().product();
        Self {
            radices,
            strides,
            len,
        }
    }

    pub fn outcomes(shapes: &[PartyShape]) -> Self {
        Self::new(shapes.iter().map(|s| s.a_size).collect())
    }

    pub fn settings(shapes: &[PartyShape]) -> Self {
        Self::new(shapes.iter().map(|s| s.x_size).collect())
    }

    pub fn inputs(shapes: &[PartyShape]) -> Self {
        Self::new(shapes.iter().map(|s| s.i_size).collect())
    }

    pub fn responses(shapes: &[PartyShape]) -> Self {
        Self::new(shapes.iter().map(|s| s.o_size).collect())
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn stride(&self, k: usize) -> usize {
        self.strides[k]
    }

    /// Number of joint values.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn check(&self, digits: &[usize]) -> Result<()> {
        if digits.len() != self.radices.len() {
            return Err(Error::Shape(format!(
                "expected {} digits, got {}",
                self.radices.len(),
                digits.len()
            )));
        }
        for (party, (&value, &size)) in digits.iter().zip(&self.radices).enumerate() {
            if value >= size {
                return Err(Error::Range { party, value, size });
            }
        }
        Ok(())
    }

    /// Encode without range checks; callers guarantee `digits` is in range.
    pub fn encode(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }

    pub fn try_encode(&self, digits: &[usize]) -> Result<usize> {
        self.check(digits)?;
        Ok(self.encode(digits))
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.radices.len()];
        for k in 0..self.radices.len() {
            digits[k] = index / self.strides[k];
            index %= self.strides[k];
        }
        digits
    }

    /// Digit `k` of a joint index.
    pub fn digit(&self, index: usize, k: usize) -> usize {
        (index / self.strides[k]) % self.radices[k]
    }

    /// All digit vectors in index order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len).map(|i| self.decode(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn last_party_fastest() {
        let ix = JointIndexer::new(vec![3, 2, 2]);
        assert_eq!(ix.len(), 12);
        assert_eq!(ix.decode(1), vec![0, 0, 1]);
        assert_eq!(ix.decode(2), vec![0, 1, 0]);
        assert_eq!(ix.decode(4), vec![1, 0, 0]);
        assert_eq!(ix.encode(&[2, 1, 1]), 11);
    }

    #[test]
    fn range_error_names_party() {
        let ix = JointIndexer::new(vec![2, 3]);
        assert_eq!(
            ix.try_encode(&[1, 3]),
            Err(Error::Range {
                party: 1,
                value: 3,
                size: 3
            })
        );
    }

    #[test]
    fn zero_sizes_rejected() {
        assert!(PartyShape::new(0, 2).is_err());
        let s = PartyShape::new(3, 2).unwrap();
        assert_eq!((s.i_size, s.o_size), (2, 3));
    }

    proptest! {
        #[test]
        fn round_trip(radices in prop::collection::vec(1usize..5, 0..5)) {
            let ix = JointIndexer::new(radices);
            for i in 0..ix.len() {
                let d = ix.decode(i);
                prop_assert!(ix.check(&d).is_ok());
                prop_assert_eq!(ix.encode(&d), i);
            }
        }
    }
}
