//! Exact rational polyhedral cones in a pair of dual lattices.
//!
//! Divisor and curve classes live in two integer lattices tied together by a
//! nondegenerate pairing matrix. Cones are given by generators; duals are
//! computed by facet enumeration, membership by exhaustive search over
//! linearly independent generator subsets. Everything is exact, and every
//! verdict carries a certificate the caller can check by arithmetic alone.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::matrix::{int_dot, primitive, rational_to_primitive, solve_exact, LinearSolve, QMatrix};
use crate::rational::{int_to_json_number, Int, Rational};
use crate::{Error, Result};

/// Which of the two paired lattices a vector lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum LatticeTag {
    Divisor,
    Curve,
}

impl LatticeTag {
    pub fn opposite(self) -> LatticeTag {
        match self {
            LatticeTag::Divisor => LatticeTag::Curve,
            LatticeTag::Curve => LatticeTag::Divisor,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LatticeTag::Divisor => "divisor",
            LatticeTag::Curve => "curve",
        }
    }
}

/// Two labeled bases with an integer intersection pairing between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairedLattices {
    divisor_basis: Vec<String>,
    curve_basis: Vec<String>,
    /// Entry (i, j) pairs divisor_basis[i] with curve_basis[j].
    pairing: Vec<Vec<Int>>,
}

impl PairedLattices {
    pub fn new(
        divisor_basis: Vec<String>,
        curve_basis: Vec<String>,
        pairing: Vec<Vec<Int>>,
    ) -> Result<Self> {
        let r = divisor_basis.len();
        if curve_basis.len() != r {
            return Err(Error::DimensionMismatch(
                "divisor and curve bases must have equal length".into(),
            ));
        }
        if pairing.len() != r || pairing.iter().any(|row| row.len() != r) {
            return Err(Error::DimensionMismatch(format!(
                "pairing must be a {r}x{r} matrix"
            )));
        }
        if crate::matrix::int_det(&pairing)?.is_zero() {
            return Err(Error::DegeneratePairing(
                "pairing matrix has determinant zero".into(),
            ));
        }
        Ok(PairedLattices {
            divisor_basis,
            curve_basis,
            pairing,
        })
    }

    pub fn rank(&self) -> usize {
        self.divisor_basis.len()
    }

    pub fn divisor_basis(&self) -> &[String] {
        &self.divisor_basis
    }

    pub fn curve_basis(&self) -> &[String] {
        &self.curve_basis
    }

    pub fn basis(&self, lattice: LatticeTag) -> &[String] {
        match lattice {
            LatticeTag::Divisor => &self.divisor_basis,
            LatticeTag::Curve => &self.curve_basis,
        }
    }

    /// Intersection number of a divisor-lattice and a curve-lattice vector,
    /// in either argument order.
    pub fn pair(&self, a: &NumericalClass, b: &NumericalClass) -> Result<Int> {
        let (d, c) = match (a.lattice, b.lattice) {
            (LatticeTag::Divisor, LatticeTag::Curve) => (a, b),
            (LatticeTag::Curve, LatticeTag::Divisor) => (b, a),
            _ => {
                return Err(Error::LatticeMismatch(
                    "pairing needs one divisor and one curve class".into(),
                ))
            }
        };
        self.check_len(d)?;
        self.check_len(c)?;
        let mut acc = Int::zero();
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                acc += &d.coords[i] * &self.pairing[i][j] * &c.coords[j];
            }
        }
        Ok(acc)
    }

    pub fn pair_labels(&self, divisor_label: &str, curve_label: &str) -> Result<Int> {
        let i = self
            .divisor_basis
            .iter()
            .position(|l| l == divisor_label)
            .ok_or_else(|| Error::UnknownLabel(divisor_label.into()))?;
        let j = self
            .curve_basis
            .iter()
            .position(|l| l == curve_label)
            .ok_or_else(|| Error::UnknownLabel(curve_label.into()))?;
        Ok(self.pairing[i][j].clone())
    }

    fn check_len(&self, v: &NumericalClass) -> Result<()> {
        if v.coords.len() != self.rank() {
            return Err(Error::DimensionMismatch(format!(
                "class has {} coordinates, lattice rank is {}",
                v.coords.len(),
                self.rank()
            )));
        }
        Ok(())
    }

    /// Rows of the linear system cutting out the dual of a cone with the
    /// given generators: one row per generator, acting on the opposite
    /// lattice by the ordinary dot product.
    fn constraint_rows(&self, cone: &RationalCone) -> Vec<Vec<Int>> {
        let r = self.rank();
        cone.generators
            .iter()
            .map(|g| {
                (0..r)
                    .map(|out| {
                        let mut acc = Int::zero();
                        for (k, gk) in g.iter().enumerate() {
                            match cone.lattice {
                                // divisor x against curve generator g: x^T P g
                                LatticeTag::Curve => acc += &self.pairing[out][k] * gk,
                                // curve y against divisor generator g: g^T P y
                                LatticeTag::Divisor => acc += gk * &self.pairing[k][out],
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }
}

/// An integer vector tagged with the lattice it lives in.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct NumericalClass {
    pub lattice: LatticeTag,
    pub coords: Vec<Int>,
}

impl NumericalClass {
    pub fn new(lattice: LatticeTag, coords: Vec<Int>) -> Self {
        NumericalClass { lattice, coords }
    }

    pub fn from_i64(lattice: LatticeTag, coords: &[i64]) -> Self {
        NumericalClass {
            lattice,
            coords: coords.iter().map(|&x| Int::from(x)).collect(),
        }
    }

    pub fn neg(&self) -> NumericalClass {
        NumericalClass {
            lattice: self.lattice,
            coords: self.coords.iter().map(|x| -x).collect(),
        }
    }
}

impl Serialize for NumericalClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("lattice", self.lattice.as_str())?;
        map.serialize_entry("coords", &IntVecSer(&self.coords))?;
        map.end()
    }
}

struct IntVecSer<'a>(&'a [Int]);

impl Serialize for IntVecSer<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for x in self.0 {
            seq.serialize_element(&int_to_json_number(x))?;
        }
        seq.end()
    }
}

/// Finitely generated cone; generators are primitive, distinct, and sorted.
/// The direction of each generator is preserved (a ray and its negative are
/// different rays), so normalization never changes the cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalCone {
    lattice: LatticeTag,
    generators: Vec<Vec<Int>>,
}

impl RationalCone {
    pub fn new(lattice: LatticeTag, generators: Vec<Vec<Int>>) -> Result<Self> {
        let mut dim: Option<usize> = None;
        let mut set: BTreeSet<Vec<Int>> = BTreeSet::new();
        for g in generators {
            match dim {
                None => dim = Some(g.len()),
                Some(d) if d != g.len() => {
                    return Err(Error::DimensionMismatch(
                        "cone generators of unequal length".into(),
                    ))
                }
                _ => {}
            }
            let p = primitive(&g);
            if !crate::matrix::is_zero_vec(&p) {
                set.insert(p);
            }
        }
        Ok(RationalCone {
            lattice,
            generators: set.into_iter().collect(),
        })
    }

    pub fn from_classes(lattice: LatticeTag, classes: &[NumericalClass]) -> Result<Self> {
        for c in classes {
            if c.lattice != lattice {
                return Err(Error::LatticeMismatch(
                    "cone generator in the wrong lattice".into(),
                ));
            }
        }
        RationalCone::new(lattice, classes.iter().map(|c| c.coords.clone()).collect())
    }

    pub fn lattice(&self) -> LatticeTag {
        self.lattice
    }

    pub fn generators(&self) -> &[Vec<Int>] {
        &self.generators
    }

    pub fn generator_classes(&self) -> Vec<NumericalClass> {
        self.generators
            .iter()
            .map(|g| NumericalClass::new(self.lattice, g.clone()))
            .collect()
    }

    pub fn is_zero_cone(&self) -> bool {
        self.generators.is_empty()
    }

    fn dim(&self, lattices: &PairedLattices) -> usize {
        self.generators
            .first()
            .map_or(lattices.rank(), Vec::len)
    }
}

impl Serialize for RationalCone {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Gens<'a>(&'a [Vec<Int>]);
        impl Serialize for Gens<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
                for g in self.0 {
                    seq.serialize_element(&IntVecSer(g))?;
                }
                seq.end()
            }
        }
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("lattice", self.lattice.as_str())?;
        map.serialize_entry("generators", &Gens(&self.generators))?;
        map.end()
    }
}

const MAX_DUAL_RANK: usize = 6;

/// All classes of the opposite lattice pairing nonnegatively with every
/// generator, computed by exact facet enumeration.
pub fn dual_cone(c: &RationalCone, lattices: &PairedLattices) -> Result<RationalCone> {
    let dim = lattices.rank();
    if dim > MAX_DUAL_RANK {
        return Err(Error::BoundExceeded(format!(
            "dual_cone supports rank <= {MAX_DUAL_RANK}, got {dim}"
        )));
    }
    if !c.generators.is_empty() && c.dim(lattices) != dim {
        return Err(Error::DimensionMismatch(
            "cone does not match lattice rank".into(),
        ));
    }
    let rows = lattices.constraint_rows(c);
    let a = rows_matrix(&rows, dim);
    let rank = a.rank();

    let mut out: Vec<Vec<Int>> = Vec::new();

    // lineality: directions orthogonal to every constraint enter with both
    // signs
    for v in a.kernel_basis() {
        let p = rational_to_primitive(&v);
        out.push(crate::matrix::neg_vec(&p));
        out.push(p);
    }

    // extreme rays mod lineality: one candidate per (rank-1)-subset of
    // constraints of full expected rank, signed by feasibility
    if rank >= 1 {
        let row_count = rows.len();
        let mut indices: Vec<usize> = Vec::new();
        enumerate_subsets(row_count, rank - 1, &mut indices, &mut |subset| {
            let sub_rows: Vec<Vec<Int>> = subset.iter().map(|&i| rows[i].clone()).collect();
            let sub = rows_matrix(&sub_rows, dim);
            if sub.rank() + 1 != rank {
                return;
            }
            for kv in sub.kernel_basis() {
                let v = rational_to_primitive(&kv);
                let values: Vec<Int> = rows.iter().map(|r| int_dot(r, &v)).collect();
                if values.iter().all(Zero::is_zero) {
                    continue; // lineality direction, already accounted for
                }
                if !values.iter().any(Signed::is_negative) {
                    out.push(v);
                } else if !values.iter().any(Signed::is_positive) {
                    out.push(crate::matrix::neg_vec(&v));
                }
                break;
            }
        });
    }

    RationalCone::new(c.lattice.opposite(), out)
}

/// Builds a rows x dim matrix even when there are no rows, so kernels come
/// out in the right ambient dimension.
fn rows_matrix(rows: &[Vec<Int>], dim: usize) -> QMatrix {
    let mut m = QMatrix::zeros(rows.len(), dim);
    for (i, row) in rows.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            m.set(i, j, Rational::from_int(x.clone()));
        }
    }
    m
}

fn enumerate_subsets(n: usize, k: usize, prefix: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if prefix.len() == k {
        f(prefix);
        return;
    }
    let start = prefix.last().map_or(0, |&l| l + 1);
    let needed = k - prefix.len();
    if n < start + needed {
        return;
    }
    for i in start..=(n - needed) {
        prefix.push(i);
        enumerate_subsets(n, k, prefix, f);
        prefix.pop();
    }
}

/// Nonnegative rational coefficients expressing `v` over `generators`, if
/// they exist. Searches linearly independent subsets by increasing size, so
/// the first certificate found is the sparsest lexicographically-earliest
/// one; completeness follows from the conic Caratheodory bound.
pub fn nonneg_combination(generators: &[Vec<Int>], v: &[Int]) -> Option<Vec<Rational>> {
    if crate::matrix::is_zero_vec(v) {
        return Some(vec![Rational::zero(); generators.len()]);
    }
    let dim = v.len();
    let target: Vec<Rational> = v.iter().cloned().map(Rational::from_int).collect();
    let max_size = generators.len().min(dim);
    for size in 1..=max_size {
        let mut found: Option<Vec<Rational>> = None;
        let mut indices = Vec::new();
        enumerate_subsets(generators.len(), size, &mut indices, &mut |subset| {
            if found.is_some() {
                return;
            }
            let mut m = QMatrix::zeros(dim, subset.len());
            for (col, &gi) in subset.iter().enumerate() {
                for (row, entry) in generators[gi].iter().enumerate() {
                    m.set(row, col, Rational::from_int(entry.clone()));
                }
            }
            if let Ok(LinearSolve::Unique(x)) = solve_exact(&m, &target) {
                if !x.iter().any(Rational::is_negative) {
                    let mut coeffs = vec![Rational::zero(); generators.len()];
                    for (col, &gi) in subset.iter().enumerate() {
                        coeffs[gi] = x[col].clone();
                    }
                    found = Some(coeffs);
                }
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Outcome of a membership test, either way with a checkable certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Containment {
    /// Coefficients are parallel to the cone's sorted generator list.
    Yes { coefficients: Vec<Rational> },
    /// A class of the opposite lattice, nonnegative on the cone and
    /// strictly negative against the tested vector.
    No { separator: NumericalClass },
}

/// Membership of `v` in `c`, certified. The separating functional for the
/// No case is drawn from the dual cone's generator list.
pub fn contains(
    c: &RationalCone,
    v: &NumericalClass,
    lattices: &PairedLattices,
) -> Result<Containment> {
    if v.lattice != c.lattice {
        return Err(Error::LatticeMismatch(
            "membership test across lattices".into(),
        ));
    }
    lattices.check_len(v)?;
    if let Some(coefficients) = nonneg_combination(&c.generators, &v.coords) {
        return Ok(Containment::Yes { coefficients });
    }
    let dual = dual_cone(c, lattices)?;
    for w in dual.generator_classes() {
        if lattices.pair(&w, v)?.is_negative() {
            return Ok(Containment::No { separator: w });
        }
    }
    Err(Error::DegeneratePairing(
        "membership search found neither certificate".into(),
    ))
}

/// Minimal generating set: drops every generator expressible over the
/// others. For pointed cones this is exactly the set of extremal rays.
pub fn extremal_rays(c: &RationalCone) -> RationalCone {
    let mut gens = c.generators.clone();
    loop {
        let mut removed = false;
        for i in 0..gens.len() {
            let mut others = gens.clone();
            let g = others.remove(i);
            if nonneg_combination(&others, &g).is_some() {
                gens.remove(i);
                removed = true;
                break;
            }
        }
        if !removed {
            return RationalCone {
                lattice: c.lattice,
                generators: gens,
            };
        }
    }
}

/// One row of a Fano table: an extremal ray and its intersection with the
/// anticanonical class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayPairing {
    pub ray: Vec<Int>,
    pub value: Int,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanoReport {
    pub is_fano: bool,
    pub table: Vec<RayPairing>,
}

/// Positivity of the anticanonical class on every extremal ray of the Mori
/// cone.
pub fn fano_test(
    lattices: &PairedLattices,
    anticanonical: &NumericalClass,
    mori: &RationalCone,
) -> Result<FanoReport> {
    if anticanonical.lattice != LatticeTag::Divisor {
        return Err(Error::LatticeMismatch(
            "anticanonical class must live in the divisor lattice".into(),
        ));
    }
    if mori.lattice() != LatticeTag::Curve {
        return Err(Error::LatticeMismatch(
            "Mori cone must live in the curve lattice".into(),
        ));
    }
    let rays = extremal_rays(mori);
    let mut table = Vec::new();
    let mut is_fano = true;
    for ray in rays.generator_classes() {
        let value = lattices.pair(anticanonical, &ray)?;
        if !value.is_positive() {
            is_fano = false;
        }
        table.push(RayPairing {
            ray: ray.coords,
            value,
        });
    }
    Ok(FanoReport { is_fano, table })
}

/// Equality as cones (mutual containment), independent of generator choice.
pub fn cone_eq(a: &RationalCone, b: &RationalCone) -> bool {
    a.lattice == b.lattice
        && a.generators()
            .iter()
            .all(|g| nonneg_combination(b.generators(), g).is_some())
        && b.generators()
            .iter()
            .all(|g| nonneg_combination(a.generators(), g).is_some())
}
