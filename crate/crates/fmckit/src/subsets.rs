//! Index subsets of `{1, …, n}` and their canonical enumeration.
//!
//! Subsets index diagonals, blow-up centers, boundary divisors, and marking
//! sets, so a single canonical order is fixed once here: size-major, then
//! lexicographic on the sorted member lists.

use std::cmp::Ordering;
use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::{Error, Result};

/// A subset of `{1, …, ambient}`, stored sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexSubset {
    ambient: usize,
    members: Vec<usize>,
}

impl IndexSubset {
    pub fn new(ambient: usize, mut members: Vec<usize>) -> Result<Self> {
        if ambient == 0 {
            return Err(Error::InvalidArgument("ambient must be positive".into()));
        }
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate subset member".into()));
        }
        if members.iter().any(|&i| i == 0 || i > ambient) {
            return Err(Error::InvalidArgument(format!(
                "subset member out of range 1..{ambient}"
            )));
        }
        Ok(IndexSubset { ambient, members })
    }

    pub fn empty(ambient: usize) -> Result<Self> {
        IndexSubset::new(ambient, Vec::new())
    }

    pub fn full(ambient: usize) -> Result<Self> {
        IndexSubset::new(ambient, (1..=ambient).collect())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn complement(&self) -> Self {
        let members = (1..=self.ambient).filter(|i| !self.contains(*i)).collect();
        IndexSubset {
            ambient: self.ambient,
            members,
        }
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let members = self
            .members
            .iter()
            .copied()
            .filter(|i| other.contains(*i))
            .collect();
        Ok(IndexSubset {
            ambient: self.ambient,
            members,
        })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let mut members = self.members.clone();
        members.extend(other.members.iter().copied().filter(|i| !self.contains(*i)));
        members.sort_unstable();
        Ok(IndexSubset {
            ambient: self.ambient,
            members,
        })
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.members.iter().all(|i| !other.contains(*i))
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.members.iter().all(|i| other.contains(*i))
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch(format!(
                "subset ambients {} and {}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }
}

/// Canonical order: ambient, then size, then lexicographic members.
impl Ord for IndexSubset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ambient
            .cmp(&other.ambient)
            .then_with(|| self.members.len().cmp(&other.members.len()))
            .then_with(|| self.members.cmp(&other.members))
    }
}

impl PartialOrd for IndexSubset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IndexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.members.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Serialized as the bare member list; the ambient travels with the document.
impl Serialize for IndexSubset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.members.len()))?;
        for i in &self.members {
            seq.serialize_element(i)?;
        }
        seq.end()
    }
}

/// All subsets of `{1, …, n}` with `lo ≤ |S| ≤ hi`, in canonical order.
pub fn subsets(n: usize, lo: usize, hi: usize) -> Result<Vec<IndexSubset>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if lo > hi || hi > n {
        return Err(Error::InvalidArgument(format!(
            "size range [{lo},{hi}] invalid for n={n}"
        )));
    }
    let mut out = Vec::new();
    for size in lo..=hi {
        let mut current = Vec::with_capacity(size);
        emit_combinations(n, size, 1, &mut current, &mut out);
    }
    Ok(out)
}

fn emit_combinations(
    n: usize,
    size: usize,
    start: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<IndexSubset>,
) {
    if current.len() == size {
        out.push(IndexSubset {
            ambient: n,
            members: current.clone(),
        });
        return;
    }
    let remaining = size - current.len();
    for i in start..=(n + 1 - remaining) {
        current.push(i);
        emit_combinations(n, size, i + 1, current, out);
        current.pop();
    }
}
