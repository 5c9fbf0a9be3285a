//! The square-free polynomial ring Z[h1,...,hn]/(h1^2,...,hn^2), which is the
//! Chow ring of an n-fold product of lines, together with the nef criterion
//! and the pencil classification for divisor classes on it.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::rational::{int_to_json_number, Int};
use crate::subsets::IndexSubset;
use crate::{Error, Result};

/// Element of Z[h1,...,hn]/(hi^2): a map from square-free monomials (subsets
/// of indices) to integer coefficients. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareFreeClass {
    n: usize,
    terms: BTreeMap<IndexSubset, Int>,
}

impl SquareFreeClass {
    pub fn zero(n: usize) -> Self {
        SquareFreeClass {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// The unit class 1 (empty monomial).
    pub fn unit(n: usize) -> Self {
        SquareFreeClass::monomial(
            IndexSubset::empty(n).expect("classes need n >= 1"),
            Int::from(1),
        )
    }

    pub fn monomial(subset: IndexSubset, coef: Int) -> Self {
        let mut terms = BTreeMap::new();
        let n = subset.ambient();
        if !coef.is_zero() {
            terms.insert(subset, coef);
        }
        SquareFreeClass { n, terms }
    }

    /// The generator h_i (1-based).
    pub fn h(n: usize, i: usize) -> Result<Self> {
        Ok(SquareFreeClass::monomial(
            IndexSubset::new(n, vec![i])?,
            Int::from(1),
        ))
    }

    /// The divisor class a_1 h_1 + ... + a_n h_n.
    pub fn divisor(a: &[Int]) -> Self {
        let n = a.len();
        let mut terms = BTreeMap::new();
        for (idx, coef) in a.iter().enumerate() {
            if !coef.is_zero() {
                let s = IndexSubset::new(n, vec![idx + 1]).expect("index in range");
                terms.insert(s, coef.clone());
            }
        }
        SquareFreeClass { n, terms }
    }

    pub fn from_terms(n: usize, entries: Vec<(IndexSubset, Int)>) -> Result<Self> {
        let mut terms: BTreeMap<IndexSubset, Int> = BTreeMap::new();
        for (s, c) in entries {
            if s.ambient() != n {
                return Err(Error::DimensionMismatch(format!(
                    "term {} lives in ambient {}, class has n = {}",
                    s,
                    s.ambient(),
                    n
                )));
            }
            let slot = terms.entry(s).or_insert_with(Int::zero);
            *slot += c;
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(SquareFreeClass { n, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<IndexSubset, Int> {
        &self.terms
    }

    pub fn coefficient(&self, s: &IndexSubset) -> Int {
        self.terms.get(s).cloned().unwrap_or_else(Int::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The homogeneous piece of the given degree.
    pub fn degree_part(&self, d: usize) -> SquareFreeClass {
        SquareFreeClass {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(s, _)| s.len() == d)
                .map(|(s, c)| (s.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &SquareFreeClass) -> Result<SquareFreeClass> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "adding classes with n = {} and n = {}",
                self.n, other.n
            )));
        }
        let mut terms = self.terms.clone();
        for (s, c) in &other.terms {
            let slot = terms.entry(s.clone()).or_insert_with(Int::zero);
            *slot += c;
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(SquareFreeClass { n: self.n, terms })
    }
}

impl fmt::Display for SquareFreeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (s, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if s.is_empty() {
                write!(f, "{c}")?;
            } else {
                let mono: String = s.members().iter().map(|i| format!("h{i}")).collect();
                if *c == Int::from(1) {
                    write!(f, "{mono}")?;
                } else {
                    write!(f, "{c}*{mono}")?;
                }
            }
        }
        Ok(())
    }
}

impl Serialize for SquareFreeClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Terms<'a>(&'a BTreeMap<IndexSubset, Int>);
        impl Serialize for Terms<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
                for (s, c) in self.0 {
                    let mut term = BTreeMap::new();
                    term.insert("coef", serde_json::Value::Number(int_to_json_number(c)));
                    term.insert(
                        "subset",
                        serde_json::to_value(s).map_err(serde::ser::Error::custom)?,
                    );
                    seq.serialize_element(&term)?;
                }
                seq.end()
            }
        }
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("n", &self.n)?;
        map.serialize_entry("terms", &Terms(&self.terms))?;
        map.end()
    }
}

/// Product in the square-free ring: monomials with a repeated index vanish.
pub fn sf_mul(p: &SquareFreeClass, q: &SquareFreeClass) -> Result<SquareFreeClass> {
    if p.n != q.n {
        return Err(Error::DimensionMismatch(format!(
            "multiplying classes with n = {} and n = {}",
            p.n, q.n
        )));
    }
    let mut terms: BTreeMap<IndexSubset, Int> = BTreeMap::new();
    for (s, c) in &p.terms {
        for (t, d) in &q.terms {
            if !s.is_disjoint(t) {
                continue;
            }
            let u = s.union(t).expect("same ambient");
            let slot = terms.entry(u).or_insert_with(Int::zero);
            *slot += c * d;
        }
    }
    terms.retain(|_, c| !c.is_zero());
    Ok(SquareFreeClass { n: p.n, terms })
}

/// Degree against the point class: the coefficient of h_1 h_2 ... h_n,
/// normalized so that monomial integrates to 1.
pub fn sf_integrate(p: &SquareFreeClass) -> Int {
    p.coefficient(&IndexSubset::full(p.n).expect("classes need n >= 1"))
}

/// A divisor sum of fiber classes is nef exactly when no coefficient is
/// negative.
pub fn is_nef_product(a: &[Int]) -> bool {
    !a.iter().any(Signed::is_negative)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PencilObstruction {
    NotNef,
    ZeroClass,
    SquareNonzero,
}

impl PencilObstruction {
    pub fn as_str(&self) -> &'static str {
        match self {
            PencilObstruction::NotNef => "not-nef",
            PencilObstruction::ZeroClass => "zero-class",
            PencilObstruction::SquareNonzero => "square-nonzero",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PencilVerdict {
    /// The induced map is a pencil precisely of projection type: it factors
    /// through the j-th projection (1-based) with the stated fiber degree.
    FactorsThrough { factor: usize, degree: Int },
    NotAPencil(PencilObstruction),
}

/// Classifies `a_1 h_1 + ... + a_n h_n` as a pencil-defining class.
///
/// The square is computed in the ring rather than read off the coefficients,
/// so the degree-2 test is independent of the shortcut it is equivalent to.
pub fn pencil_classify_product(a: &[Int]) -> PencilVerdict {
    if !is_nef_product(a) {
        return PencilVerdict::NotAPencil(PencilObstruction::NotNef);
    }
    let d = SquareFreeClass::divisor(a);
    if d.is_zero() {
        return PencilVerdict::NotAPencil(PencilObstruction::ZeroClass);
    }
    let square = sf_mul(&d, &d).expect("same n");
    if !square.degree_part(2).is_zero() {
        return PencilVerdict::NotAPencil(PencilObstruction::SquareNonzero);
    }
    let (idx, coef) = a
        .iter()
        .enumerate()
        .find(|(_, c)| c.is_positive())
        .expect("nonzero nef class with zero square has a positive entry");
    PencilVerdict::FactorsThrough {
        factor: idx + 1,
        degree: coef.clone(),
    }
}
