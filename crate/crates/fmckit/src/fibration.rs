//! Symbolic descriptors for the fibrations of a configuration space:
//! evaluation pencils, forgetful morphisms, divisor-class signatures, and
//! the exact criteria deciding when families of such morphisms factor
//! through a common one.
//!
//! Morphisms are carried by their combinatorial data only. Two descriptors
//! are the same morphism exactly when the data agree, so every verdict here
//! is a finite computation on index sets.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::rational::{int_to_json_number, Int};
use crate::subsets::{subsets, IndexSubset};
use crate::{Error, Result};

/// A base point free pencil of modular origin: an evaluation, or the
/// composite of forgetting the map with the projection remembering the four
/// labels in `J`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PencilDescriptor {
    Ev(usize),
    ForgetToM04(IndexSubset),
}

/// Evaluations at `i` agree with full forgetful maps onto the `i`-th
/// factor; the identification is recorded here once and the `Ev` spelling
/// is the normal form.
pub const EV_FORGETFUL_IDENTIFICATION: &str =
    "ev_i equals the forgetful map remembering only the label i";

impl PencilDescriptor {
    pub fn m04(n: usize, members: Vec<usize>) -> Result<Self> {
        let j = IndexSubset::new(n, members)?;
        let p = PencilDescriptor::ForgetToM04(j);
        p.check(n)?;
        Ok(p)
    }

    pub fn check(&self, n: usize) -> Result<()> {
        match self {
            PencilDescriptor::Ev(i) => {
                if *i == 0 || *i > n {
                    return Err(Error::InvalidArgument(format!(
                        "evaluation index {i} out of range 1..{n}"
                    )));
                }
            }
            PencilDescriptor::ForgetToM04(j) => {
                if j.ambient() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "surviving set lives in 1..{}, pencil is for n = {n}",
                        j.ambient()
                    )));
                }
                if j.len() != 4 || n < 4 {
                    return Err(Error::InvalidArgument(format!(
                        "forgetting down to four points needs |J| = 4 and n >= 4, \
                         got |J| = {} and n = {n}",
                        j.len()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            PencilDescriptor::Ev(i) => serde_json::json!({ "ev": i }),
            PencilDescriptor::ForgetToM04(j) => serde_json::json!({ "m04": j.members() }),
        }
    }

    pub fn from_json(n: usize, v: &serde_json::Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::InvalidArgument("pencil must be an object".into()))?;
        if let Some(i) = obj.get("ev") {
            let i = i
                .as_u64()
                .ok_or_else(|| Error::InvalidArgument("ev index must be a number".into()))?;
            let p = PencilDescriptor::Ev(i as usize);
            p.check(n)?;
            return Ok(p);
        }
        if let Some(j) = obj.get("m04") {
            let members = usize_list_from_json(j)?;
            return PencilDescriptor::m04(n, members);
        }
        Err(Error::InvalidArgument(
            "pencil object needs an \"ev\" or \"m04\" key".into(),
        ))
    }
}

impl std::fmt::Display for PencilDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PencilDescriptor::Ev(i) => write!(f, "ev_{i}"),
            PencilDescriptor::ForgetToM04(j) => write!(f, "m04{j}"),
        }
    }
}

/// Forgetful morphism dropping the labels in `forgotten`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ForgetfulDescriptor {
    source: usize,
    forgotten: IndexSubset,
}

impl ForgetfulDescriptor {
    pub fn new(source: usize, forgotten: IndexSubset) -> Result<Self> {
        if forgotten.ambient() != source {
            return Err(Error::DimensionMismatch(format!(
                "forgotten labels live in 1..{}, source is n = {source}",
                forgotten.ambient()
            )));
        }
        if forgotten.is_empty() || forgotten.len() >= source {
            return Err(Error::InvalidArgument(format!(
                "a forgetful map drops between 1 and n-1 labels, got {} of {source}",
                forgotten.len()
            )));
        }
        Ok(ForgetfulDescriptor { source, forgotten })
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn forgotten(&self) -> &IndexSubset {
        &self.forgotten
    }

    pub fn surviving(&self) -> IndexSubset {
        self.forgotten.complement()
    }

    pub fn target(&self) -> usize {
        self.source - self.forgotten.len()
    }

    /// The pencil spelling of a forgetful map with four surviving labels.
    pub fn to_m04_pencil(&self) -> Option<PencilDescriptor> {
        (self.target() == 4).then(|| PencilDescriptor::ForgetToM04(self.surviving()))
    }

    /// The forgetful spelling of a four-label pencil (keyed the other way
    /// around).
    pub fn from_m04_pencil(p: &PencilDescriptor) -> Result<Self> {
        match p {
            PencilDescriptor::ForgetToM04(j) => {
                p.check(j.ambient())?;
                ForgetfulDescriptor::new(j.ambient(), j.complement())
            }
            PencilDescriptor::Ev(_) => Err(Error::InvalidArgument(
                "an evaluation is not a four-label forgetful pencil".into(),
            )),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "forget": self.forgotten.members() })
    }
}

impl std::fmt::Display for ForgetfulDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "pi_{}", self.forgotten)
    }
}

/// All modular pencils out of the n-pointed space: one per label, plus one
/// per surviving 4-set once n reaches 4.
pub fn modular_pencils(n: usize) -> Result<Vec<PencilDescriptor>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let mut out: Vec<PencilDescriptor> = (1..=n).map(PencilDescriptor::Ev).collect();
    if n >= 4 {
        out.extend(subsets(n, 4, 4)?.into_iter().map(PencilDescriptor::ForgetToM04));
    }
    Ok(out)
}

/// The class-lattice part of a pencil: a pulled-back boundary class (kept
/// symbolic) and the vector of evaluation coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MPart {
    Zero,
    ForgetClass(IndexSubset),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PicSignature {
    pub m_part: MPart,
    pub a_vector: Vec<Int>,
}

impl PicSignature {
    pub fn to_json(&self) -> serde_json::Value {
        let m = match &self.m_part {
            MPart::Zero => serde_json::Value::Null,
            MPart::ForgetClass(j) => serde_json::json!(j.members()),
        };
        serde_json::json!({
            "mPart": m,
            "aVector": self
                .a_vector
                .iter()
                .map(|a| serde_json::Value::Number(int_to_json_number(a)))
                .collect::<Vec<_>>(),
        })
    }
}

pub fn pencil_signature(p: &PencilDescriptor, n: usize) -> Result<PicSignature> {
    p.check(n)?;
    Ok(match p {
        PencilDescriptor::Ev(i) => {
            let mut a = vec![Int::zero(); n];
            a[i - 1] = Int::from(1);
            PicSignature {
                m_part: MPart::Zero,
                a_vector: a,
            }
        }
        PencilDescriptor::ForgetToM04(j) => PicSignature {
            m_part: MPart::ForgetClass(j.clone()),
            a_vector: vec![Int::zero(); n],
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NonModularReason {
    /// Both the symbolic part and the evaluation part are present.
    MixedParts,
    /// The evaluation part does not single out one positive direction.
    MultipleEvaluations,
    Zero,
}

impl NonModularReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            NonModularReason::MixedParts => "mixed-parts",
            NonModularReason::MultipleEvaluations => "multiple-evaluations",
            NonModularReason::Zero => "zero",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PencilClassification {
    Ev { index: usize, multiplicity: Int },
    ForgetToM04(IndexSubset),
    NonModular(NonModularReason),
}

/// Reads a signature back to the pencil that produced it, up to positive
/// scaling of the evaluation part.
pub fn classify_pencil(sig: &PicSignature) -> PencilClassification {
    let support: Vec<usize> = sig
        .a_vector
        .iter()
        .enumerate()
        .filter(|(_, a)| !a.is_zero())
        .map(|(i, _)| i)
        .collect();
    match (&sig.m_part, support.as_slice()) {
        (MPart::ForgetClass(j), []) => PencilClassification::ForgetToM04(j.clone()),
        (MPart::ForgetClass(_), _) => {
            PencilClassification::NonModular(NonModularReason::MixedParts)
        }
        (MPart::Zero, []) => PencilClassification::NonModular(NonModularReason::Zero),
        (MPart::Zero, [i]) if sig.a_vector[*i].is_positive() => PencilClassification::Ev {
            index: i + 1,
            multiplicity: sig.a_vector[*i].clone(),
        },
        (MPart::Zero, _) => {
            PencilClassification::NonModular(NonModularReason::MultipleEvaluations)
        }
    }
}

/// One irreducible piece of the common preimage of three pencil fibers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumComponent {
    pub description: String,
    pub codimension: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProfileVerdict {
    Admissible,
    Obstructed { witness: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalProfile {
    pub components: Vec<StratumComponent>,
    pub verdict: ProfileVerdict,
}

/// Decomposes the common preimage of the small diagonal under three
/// pairwise-distinct pencils. Only triples of distinct evaluations stay in
/// codimension one; any four-label pencil in the triple forces a
/// codimension-two component, which obstructs the would-be fibration.
pub fn diagonal_preimage_profile(
    n: usize,
    triple: &[PencilDescriptor; 3],
) -> Result<DiagonalProfile> {
    if n < 4 {
        return Err(Error::InvalidArgument("profile needs n >= 4".into()));
    }
    for p in triple {
        p.check(n)?;
    }
    if triple[0] == triple[1] || triple[0] == triple[2] || triple[1] == triple[2] {
        return Err(Error::InvalidArgument(
            "degenerate triple: descriptors must be pairwise distinct".into(),
        ));
    }
    let m04_count = triple
        .iter()
        .filter(|p| matches!(p, PencilDescriptor::ForgetToM04(_)))
        .count();
    if m04_count == 0 {
        let mut evs: Vec<usize> = triple
            .iter()
            .map(|p| match p {
                PencilDescriptor::Ev(i) => *i,
                PencilDescriptor::ForgetToM04(_) => unreachable!("counted above"),
            })
            .collect();
        evs.sort_unstable();
        let rest: Vec<usize> = (1..=n).filter(|i| !evs.contains(i)).collect();
        let mut components = Vec::with_capacity(1 << rest.len());
        for t in subsets(rest.len().max(1), 0, rest.len())? {
            let mut labels = evs.clone();
            labels.extend(t.members().iter().map(|&k| rest[k - 1]));
            labels.sort_unstable();
            let list = labels
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(",");
            components.push(StratumComponent {
                description: format!("D_{{{list}}}"),
                codimension: 1,
            });
        }
        return Ok(DiagonalProfile {
            components,
            verdict: ProfileVerdict::Admissible,
        });
    }
    let witness = match m04_count {
        1 => "L1: codim-2 component inside the exceptional divisor over the locus \
              where all points collide",
        2 => "L2: codim-2 component where the two cross-ratio fibers meet the \
              evaluation fiber",
        _ => "L3: codim-2 stratum whose generic member has a three-component \
              domain tree",
    };
    Ok(DiagonalProfile {
        components: vec![StratumComponent {
            description: witness.to_string(),
            codimension: 2,
        }],
        verdict: ProfileVerdict::Obstructed {
            witness: witness.to_string(),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberIntersection {
    pub dim: usize,
    /// Whether `dim >= n - r`, the bound forcing a common factorization.
    pub criterion_met: bool,
}

/// Dimension of the intersection of two generic fibers of the forgetful
/// maps remembering `I` and `J`.
pub fn fiber_intersection_dim(
    n: usize,
    r: usize,
    i: &IndexSubset,
    j: &IndexSubset,
) -> Result<FiberIntersection> {
    if r == 0 || r > n {
        return Err(Error::InvalidArgument(format!(
            "target size r = {r} out of range 1..{n}"
        )));
    }
    let want = n - r + 1;
    if i.ambient() != n || j.ambient() != n || i.len() != want || j.len() != want {
        return Err(Error::DimensionMismatch(format!(
            "remembered sets must have |I| = |J| = n - r + 1 = {want} inside 1..{n}"
        )));
    }
    let dim = i.intersection(j)?.len();
    Ok(FiberIntersection {
        dim,
        criterion_met: dim >= n - r,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ForgetfulFactorization {
    Factors(ForgetfulDescriptor),
    /// No dominant morphism with connected fibers is compatible with both
    /// factorizations.
    Obstructed,
}

/// Decides whether the two forgetful maps remembering `I` and `J` factor
/// through a common forgetful map onto the r-pointed space; they do exactly
/// when they share n - r remembered labels.
pub fn factor_forgetful(
    n: usize,
    r: usize,
    i: &IndexSubset,
    j: &IndexSubset,
) -> Result<ForgetfulFactorization> {
    if r < 3 || r >= n {
        return Err(Error::InvalidArgument(format!(
            "common factor target needs 3 <= r < n, got r = {r}, n = {n}"
        )));
    }
    if i == j {
        return Err(Error::InvalidArgument(
            "degenerate input: the two remembered sets coincide".into(),
        ));
    }
    let fi = fiber_intersection_dim(n, r, i, j)?;
    if fi.dim == n - r {
        let common = i.intersection(j)?;
        Ok(ForgetfulFactorization::Factors(ForgetfulDescriptor::new(
            n, common,
        )?))
    } else {
        Ok(ForgetfulFactorization::Obstructed)
    }
}

/// A factor of a product morphism out of the n-pointed space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismComponent {
    Pencil(PencilDescriptor),
    Forgetful(ForgetfulDescriptor),
}

impl MorphismComponent {
    fn check(&self, n: usize) -> Result<()> {
        match self {
            MorphismComponent::Pencil(p) => p.check(n),
            MorphismComponent::Forgetful(f) => {
                if f.source() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "forgetful source {} inside a product for n = {n}",
                        f.source()
                    )));
                }
                Ok(())
            }
        }
    }

    /// Target size in remembered labels; four-label pencils land in a curve
    /// and count as 1.
    fn target_size(&self) -> usize {
        match self {
            MorphismComponent::Pencil(_) => 1,
            MorphismComponent::Forgetful(f) => f.target(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            MorphismComponent::Pencil(p) => p.to_json(),
            MorphismComponent::Forgetful(f) => f.to_json(),
        }
    }

    pub fn from_json(n: usize, v: &serde_json::Value) -> Result<Self> {
        if v.get("forget").is_some() {
            let members = usize_list_from_json(v.get("forget").expect("checked"))?;
            let forgotten = IndexSubset::new(n, members)?;
            return Ok(MorphismComponent::Forgetful(ForgetfulDescriptor::new(
                n, forgotten,
            )?));
        }
        Ok(MorphismComponent::Pencil(PencilDescriptor::from_json(n, v)?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductReport {
    pub factors: Vec<MorphismComponent>,
    /// True when every declared component remembers at least three labels;
    /// the normal form then consists of plain forgetful factors only.
    pub pi_only: bool,
}

/// Normal form of a product of pencils and forgetful maps: forgetful maps
/// onto a single label are rewritten as evaluations, everything else keeps
/// its spelling.
pub fn factor_product(n: usize, components: &[MorphismComponent]) -> Result<ProductReport> {
    if components.is_empty() {
        return Err(Error::InvalidArgument(
            "a product needs at least one component".into(),
        ));
    }
    let mut factors = Vec::with_capacity(components.len());
    for c in components {
        c.check(n)?;
        let normal = match c {
            MorphismComponent::Forgetful(f) if f.target() == 1 => {
                let i = f.surviving().members()[0];
                MorphismComponent::Pencil(PencilDescriptor::Ev(i))
            }
            other => other.clone(),
        };
        factors.push(normal);
    }
    let pi_only = components.iter().all(|c| c.target_size() >= 3);
    debug_assert!(
        !pi_only
            || factors
                .iter()
                .all(|f| matches!(f, MorphismComponent::Forgetful(_))),
        "large targets must stay in plain forgetful form"
    );
    Ok(ProductReport { factors, pi_only })
}

/// Factorization data for a dominant map from a configuration space of a
/// curve onto an r-fold product of the curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveProjections {
    pub genus: u64,
    /// The labels i_1, ..., i_r whose projections (composed with symbolic
    /// finite covers of the curve) assemble the map.
    pub chosen: Vec<usize>,
    /// The factorization passes through the blow-down to the plain product
    /// before projecting.
    pub via_blowdown: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurveFactorization {
    Product(CurveProjections),
    /// A repeated label projects onto a curve inside the product, not onto
    /// the product itself.
    NotDominant { repeated_index: usize },
    Unsupported { reason: String },
}

pub fn factor_curve_product(
    genus: u64,
    n: usize,
    r: usize,
    chosen: &[usize],
) -> Result<CurveFactorization> {
    if chosen.len() != r || r == 0 || r > n {
        return Err(Error::InvalidArgument(format!(
            "need exactly r = {r} chosen labels with 1 <= r <= n = {n}"
        )));
    }
    for &i in chosen {
        if i == 0 || i > n {
            return Err(Error::InvalidArgument(format!(
                "chosen label {i} out of range 1..{n}"
            )));
        }
    }
    if genus == 1 {
        return Ok(CurveFactorization::Unsupported {
            reason: "genus-one curves carry translations, so the chosen projections \
                     need not control the whole map"
                .into(),
        });
    }
    let mut seen = vec![false; n + 1];
    for &i in chosen {
        if seen[i] {
            return Ok(CurveFactorization::NotDominant { repeated_index: i });
        }
        seen[i] = true;
    }
    Ok(CurveFactorization::Product(CurveProjections {
        genus,
        chosen: chosen.to_vec(),
        via_blowdown: true,
    }))
}

fn usize_list_from_json(v: &serde_json::Value) -> Result<Vec<usize>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::InvalidArgument("expected a list of labels".into()))?;
    arr.iter()
        .map(|x| {
            x.as_u64()
                .map(|u| u as usize)
                .ok_or_else(|| Error::InvalidArgument(format!("label {x} is not a number")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: usize, m: &[usize]) -> IndexSubset {
        IndexSubset::new(n, m.to_vec()).unwrap()
    }

    fn ev(i: usize) -> PencilDescriptor {
        PencilDescriptor::Ev(i)
    }

    fn m04(n: usize, m: &[usize]) -> PencilDescriptor {
        PencilDescriptor::m04(n, m.to_vec()).unwrap()
    }

    #[test]
    fn pencil_counts() {
        assert_eq!(modular_pencils(3).unwrap().len(), 3);
        assert_eq!(modular_pencils(4).unwrap().len(), 5);
        assert_eq!(modular_pencils(5).unwrap().len(), 10);
        assert!(modular_pencils(3)
            .unwrap()
            .iter()
            .all(|p| matches!(p, PencilDescriptor::Ev(_))));
    }

    #[test]
    fn signatures() {
        let sig = pencil_signature(&ev(2), 3).unwrap();
        assert_eq!(sig.m_part, MPart::Zero);
        assert_eq!(sig.a_vector, vec![Int::from(0), Int::from(1), Int::from(0)]);

        let sig = pencil_signature(&m04(6, &[1, 2, 3, 4]), 6).unwrap();
        assert_eq!(sig.m_part, MPart::ForgetClass(s(6, &[1, 2, 3, 4])));
        assert!(sig.a_vector.iter().all(Zero::is_zero));

        assert!(pencil_signature(&ev(4), 3).is_err());
        assert!(PencilDescriptor::m04(3, vec![1, 2, 3]).is_err());
    }

    #[test]
    fn classification_round_trip_and_rejections() {
        for n in 1..=8 {
            for p in modular_pencils(n).unwrap() {
                let sig = pencil_signature(&p, n).unwrap();
                let back = classify_pencil(&sig);
                match (&p, &back) {
                    (PencilDescriptor::Ev(i), PencilClassification::Ev { index, multiplicity }) => {
                        assert_eq!(i, index);
                        assert_eq!(*multiplicity, Int::from(1));
                    }
                    (
                        PencilDescriptor::ForgetToM04(j),
                        PencilClassification::ForgetToM04(j2),
                    ) => assert_eq!(j, j2),
                    _ => panic!("{p} classified as {back:?}"),
                }
            }
        }

        // positive scaling
        let scaled = PicSignature {
            m_part: MPart::Zero,
            a_vector: vec![Int::from(0), Int::from(0), Int::from(2)],
        };
        assert_eq!(
            classify_pencil(&scaled),
            PencilClassification::Ev {
                index: 3,
                multiplicity: Int::from(2)
            }
        );

        let mixed = PicSignature {
            m_part: MPart::ForgetClass(s(6, &[1, 2, 3, 4])),
            a_vector: vec![Int::from(1), Int::from(0), Int::from(0)],
        };
        assert!(matches!(
            classify_pencil(&mixed),
            PencilClassification::NonModular(NonModularReason::MixedParts)
        ));

        let zero = PicSignature {
            m_part: MPart::Zero,
            a_vector: vec![Int::from(0); 4],
        };
        assert!(matches!(
            classify_pencil(&zero),
            PencilClassification::NonModular(NonModularReason::Zero)
        ));

        let two = PicSignature {
            m_part: MPart::Zero,
            a_vector: vec![Int::from(1), Int::from(1), Int::from(0)],
        };
        assert!(matches!(
            classify_pencil(&two),
            PencilClassification::NonModular(NonModularReason::MultipleEvaluations)
        ));

        let negative = PicSignature {
            m_part: MPart::Zero,
            a_vector: vec![Int::from(0), Int::from(-1)],
        };
        assert!(matches!(
            classify_pencil(&negative),
            PencilClassification::NonModular(NonModularReason::MultipleEvaluations)
        ));

        assert_eq!(NonModularReason::MixedParts.as_str(), "mixed-parts");
        assert_eq!(
            NonModularReason::MultipleEvaluations.as_str(),
            "multiple-evaluations"
        );
        assert_eq!(NonModularReason::Zero.as_str(), "zero");
    }

    #[test]
    fn profile_three_evaluations() {
        let prof = diagonal_preimage_profile(5, &[ev(1), ev(2), ev(3)]).unwrap();
        assert_eq!(prof.verdict, ProfileVerdict::Admissible);
        let names: Vec<&str> = prof
            .components
            .iter()
            .map(|c| c.description.as_str())
            .collect();
        assert_eq!(
            names,
            vec!["D_{1,2,3}", "D_{1,2,3,4}", "D_{1,2,3,5}", "D_{1,2,3,4,5}"]
        );
        assert!(prof.components.iter().all(|c| c.codimension == 1));

        // count is 2^{n-3}, labels need not be 1,2,3
        let prof = diagonal_preimage_profile(7, &[ev(2), ev(5), ev(7)]).unwrap();
        assert_eq!(prof.components.len(), 16);
        assert_eq!(prof.components[0].description, "D_{2,5,7}");
    }

    #[test]
    fn profile_obstructions() {
        let p = diagonal_preimage_profile(6, &[m04(6, &[1, 2, 3, 4]), ev(1), ev(2)]).unwrap();
        match &p.verdict {
            ProfileVerdict::Obstructed { witness } => assert!(witness.starts_with("L1")),
            v => panic!("expected obstruction, got {v:?}"),
        }
        assert_eq!(p.components.len(), 1);
        assert_eq!(p.components[0].codimension, 2);

        let p = diagonal_preimage_profile(
            6,
            &[m04(6, &[1, 2, 3, 4]), m04(6, &[1, 2, 3, 5]), ev(2)],
        )
        .unwrap();
        assert!(matches!(
            &p.verdict,
            ProfileVerdict::Obstructed { witness } if witness.starts_with("L2")
        ));

        let p = diagonal_preimage_profile(
            8,
            &[
                m04(8, &[1, 2, 3, 4]),
                m04(8, &[1, 2, 3, 5]),
                m04(8, &[5, 6, 7, 8]),
            ],
        )
        .unwrap();
        assert!(matches!(
            &p.verdict,
            ProfileVerdict::Obstructed { witness } if witness.starts_with("L3")
        ));

        assert!(diagonal_preimage_profile(5, &[ev(1), ev(1), ev(2)]).is_err());
        assert!(diagonal_preimage_profile(3, &[ev(1), ev(2), ev(3)]).is_err());
    }

    #[test]
    fn fiber_intersections() {
        let i = s(6, &[1, 2, 3, 4]);
        let fi = fiber_intersection_dim(6, 3, &i, &i).unwrap();
        assert_eq!(fi.dim, 4);
        assert!(fi.criterion_met);

        let fi = fiber_intersection_dim(4, 3, &s(4, &[1, 2]), &s(4, &[3, 4])).unwrap();
        assert_eq!(fi.dim, 0);
        assert!(!fi.criterion_met);

        let fi = fiber_intersection_dim(6, 3, &s(6, &[1, 2, 3, 4]), &s(6, &[1, 2, 3, 5])).unwrap();
        assert_eq!(fi.dim, 3);
        assert!(fi.criterion_met);

        assert!(fiber_intersection_dim(6, 3, &s(6, &[1, 2]), &s(6, &[1, 2, 3, 5])).is_err());
    }

    #[test]
    fn forgetful_factorizations() {
        match factor_forgetful(5, 4, &s(5, &[1, 2]), &s(5, &[1, 3])).unwrap() {
            ForgetfulFactorization::Factors(f) => {
                assert_eq!(f.forgotten(), &s(5, &[1]));
                assert_eq!(f.target(), 4);
            }
            ForgetfulFactorization::Obstructed => panic!("expected a factorization"),
        }

        assert_eq!(
            factor_forgetful(5, 4, &s(5, &[1, 2]), &s(5, &[3, 4])).unwrap(),
            ForgetfulFactorization::Obstructed
        );

        match factor_forgetful(6, 3, &s(6, &[1, 2, 3, 4]), &s(6, &[1, 2, 3, 5])).unwrap() {
            ForgetfulFactorization::Factors(f) => {
                assert_eq!(f.forgotten(), &s(6, &[1, 2, 3]));
                assert_eq!(f.target(), 3);
            }
            ForgetfulFactorization::Obstructed => panic!("expected a factorization"),
        }

        let i = s(5, &[1, 2]);
        assert!(factor_forgetful(5, 4, &i, &i).is_err());
        assert!(factor_forgetful(5, 2, &s(5, &[1, 2, 3, 4]), &s(5, &[1, 2, 3, 5])).is_err());
    }

    #[test]
    fn product_normal_forms() {
        let evs = vec![
            MorphismComponent::Pencil(ev(1)),
            MorphismComponent::Pencil(ev(2)),
        ];
        let report = factor_product(5, &evs).unwrap();
        assert_eq!(report.factors, evs);
        assert!(!report.pi_only);

        let f = ForgetfulDescriptor::new(6, s(6, &[4, 5, 6])).unwrap();
        let report = factor_product(6, &[MorphismComponent::Forgetful(f.clone())]).unwrap();
        assert_eq!(report.factors, vec![MorphismComponent::Forgetful(f)]);
        assert!(report.pi_only);

        let mixed = vec![
            MorphismComponent::Pencil(ev(1)),
            MorphismComponent::Pencil(m04(6, &[1, 2, 3, 4])),
        ];
        let report = factor_product(6, &mixed).unwrap();
        assert_eq!(report.factors, mixed);
        assert!(!report.pi_only);

        // forgetting down to one label is an evaluation in disguise
        let to_one = ForgetfulDescriptor::new(4, s(4, &[1, 3, 4])).unwrap();
        let report = factor_product(4, &[MorphismComponent::Forgetful(to_one)]).unwrap();
        assert_eq!(report.factors, vec![MorphismComponent::Pencil(ev(2))]);
    }

    #[test]
    fn m04_keying_conversion() {
        let p = m04(7, &[2, 3, 5, 7]);
        let f = ForgetfulDescriptor::from_m04_pencil(&p).unwrap();
        assert_eq!(f.forgotten(), &s(7, &[1, 4, 6]));
        assert_eq!(f.target(), 4);
        assert_eq!(f.to_m04_pencil().unwrap(), p);
    }

    #[test]
    fn curve_products() {
        match factor_curve_product(2, 3, 2, &[1, 3]).unwrap() {
            CurveFactorization::Product(p) => {
                assert_eq!(p.chosen, vec![1, 3]);
                assert!(p.via_blowdown);
            }
            other => panic!("expected a product, got {other:?}"),
        }

        assert_eq!(
            factor_curve_product(2, 3, 2, &[1, 1]).unwrap(),
            CurveFactorization::NotDominant { repeated_index: 1 }
        );

        assert!(matches!(
            factor_curve_product(1, 2, 1, &[1]).unwrap(),
            CurveFactorization::Unsupported { .. }
        ));

        assert!(matches!(
            factor_curve_product(0, 4, 2, &[2, 4]).unwrap(),
            CurveFactorization::Product(_)
        ));

        assert!(factor_curve_product(2, 3, 2, &[1, 5]).is_err());
        assert!(factor_curve_product(2, 3, 2, &[1]).is_err());
    }

    #[test]
    fn json_forms() {
        assert_eq!(ev(2).to_json().to_string(), r#"{"ev":2}"#);
        assert_eq!(
            m04(6, &[1, 2, 3, 4]).to_json().to_string(),
            r#"{"m04":[1,2,3,4]}"#
        );
        let f = ForgetfulDescriptor::new(6, s(6, &[4, 5, 6])).unwrap();
        assert_eq!(f.to_json().to_string(), r#"{"forget":[4,5,6]}"#);

        let p = PencilDescriptor::from_json(6, &serde_json::json!({"m04": [1, 2, 3, 4]})).unwrap();
        assert_eq!(p, m04(6, &[1, 2, 3, 4]));
        let c = MorphismComponent::from_json(6, &serde_json::json!({"forget": [4, 5, 6]})).unwrap();
        assert_eq!(c, MorphismComponent::Forgetful(f));
        assert!(PencilDescriptor::from_json(3, &serde_json::json!({"ev": 9})).is_err());
    }
}
