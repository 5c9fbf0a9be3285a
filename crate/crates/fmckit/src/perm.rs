//! Permutations of `{1, …, n}`.

use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::{Error, Result};

/// A bijection of `{1, …, n}`; `images[i-1] = σ(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::InvalidArgument(format!(
                    "images {images:?} are not a bijection of 1..{n}"
                )));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (1..=n).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Function composition `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.degree() != other.degree() {
            return Err(Error::DimensionMismatch(format!(
                "permutation degrees {} and {}",
                self.degree(),
                other.degree()
            )));
        }
        Ok(Permutation {
            images: (1..=self.degree()).map(|i| self.apply(other.apply(i))).collect(),
        })
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.degree()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v - 1] = i + 1;
        }
        Permutation { images }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, v) in self.images.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.images.len()))?;
        for v in &self.images {
            seq.serialize_element(v)?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_convention() {
        // sigma = (1 2), tau = (2 3) in image notation
        let sigma = Permutation::new(vec![2, 1, 3]).unwrap();
        let tau = Permutation::new(vec![1, 3, 2]).unwrap();
        let st = sigma.compose(&tau).unwrap();
        // (sigma . tau)(2) = sigma(3) = 3
        assert_eq!(st.apply(2), 3);
        assert_eq!(st.images(), &[2, 3, 1]);
    }

    #[test]
    fn inverse_roundtrip() {
        let p = Permutation::new(vec![3, 1, 4, 2]).unwrap();
        assert_eq!(p.compose(&p.inverse()).unwrap(), Permutation::identity(4));
        assert_eq!(p.inverse().compose(&p).unwrap(), Permutation::identity(4));
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        assert!(Permutation::new(vec![3, 1]).is_err());
    }
}
