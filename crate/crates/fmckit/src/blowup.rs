//! Blow-up schedules for iterated diagonal compactifications, with the
//! associated Picard-number and discrepancy bookkeeping.

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::rational::Int;
use crate::subsets::{subsets, IndexSubset};
use crate::{Error, Result};

/// Printed by the CLI next to every Picard number.
pub const RHO_PRODUCT_ASSUMPTION: &str =
    "assumes rho of the n-fold product is n times rho of the base; this holds for \
     projective spaces, curves, and products of curves, but not for every variety";

/// A diagonal locus, identified by the subset of coordinates that coincide.
///
/// The center has dimension `dim_factor * dim(base)`; the factor is stored so
/// reports never need to recompute it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalCenter {
    pub subset: IndexSubset,
    pub dim_factor: usize,
}

impl DiagonalCenter {
    pub fn new(subset: IndexSubset) -> Result<Self> {
        if subset.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "diagonal center needs at least two indices, got {}",
                subset
            )));
        }
        let dim_factor = subset.ambient() - subset.len() + 1;
        Ok(DiagonalCenter { subset, dim_factor })
    }
}

/// Which of the three per-stage families a recursive center belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecursiveFamily {
    /// The new point meets all previous ones at once.
    FullDiagonal,
    /// Strict transform of an exceptional locus from the previous stage.
    StrictTransform,
    /// Graph of one factor projection.
    FactorGraph,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecursiveCenter {
    pub stage: usize,
    pub family: RecursiveFamily,
    /// Coordinates of the ambient product that collide over this center.
    pub subset: IndexSubset,
    pub label: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleStyle {
    Symmetric,
    Recursive,
}

impl ScheduleStyle {
    fn as_str(self) -> &'static str {
        match self {
            ScheduleStyle::Symmetric => "symmetric",
            ScheduleStyle::Recursive => "recursive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Round {
    Symmetric(Vec<DiagonalCenter>),
    Recursive(Vec<RecursiveCenter>),
}

impl Round {
    pub fn len(&self) -> usize {
        match self {
            Round::Symmetric(v) => v.len(),
            Round::Recursive(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn subsets(&self) -> Vec<&IndexSubset> {
        match self {
            Round::Symmetric(v) => v.iter().map(|c| &c.subset).collect(),
            Round::Recursive(v) => v.iter().map(|c| &c.subset).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupSchedule {
    pub n: usize,
    pub style: ScheduleStyle,
    pub rounds: Vec<Round>,
}

impl BlowupSchedule {
    pub fn total_centers(&self) -> usize {
        self.rounds.iter().map(Round::len).sum()
    }
}

/// One round per subset size, from n down to 2, lexicographic within a round.
pub fn symmetric_schedule(n: usize) -> BlowupSchedule {
    let mut rounds = Vec::new();
    for size in (2..=n).rev() {
        let centers = subsets(n, size, size)
            .expect("2 <= size <= n by construction")
            .into_iter()
            .map(|s| DiagonalCenter::new(s).expect("size >= 2 by construction"))
            .collect();
        rounds.push(Round::Symmetric(centers));
    }
    BlowupSchedule {
        n,
        style: ScheduleStyle::Symmetric,
        rounds,
    }
}

/// Stage-by-stage schedule: each stage k handles the subsets containing the
/// new index k, and its round is prepended to the stage-(k-1) schedule, so
/// rounds run from stage n down to stage 2.
pub fn recursive_schedule(n: usize) -> BlowupSchedule {
    let mut rounds = Vec::new();
    for stage in (2..=n).rev() {
        rounds.push(Round::Recursive(recursive_stage(n, stage)));
    }
    BlowupSchedule {
        n,
        style: ScheduleStyle::Recursive,
        rounds,
    }
}

fn recursive_stage(n: usize, stage: usize) -> Vec<RecursiveCenter> {
    let mut centers = Vec::new();
    if stage == 2 {
        // The full diagonal and the lone factor graph are the same locus;
        // it is blown up once, as the plain diagonal.
        centers.push(RecursiveCenter {
            stage,
            family: RecursiveFamily::FullDiagonal,
            subset: IndexSubset::new(n, vec![1, 2]).expect("n >= 2 here"),
            label: "Delta_{1,2}".into(),
        });
        return centers;
    }
    let full: Vec<usize> = (1..=stage).collect();
    centers.push(RecursiveCenter {
        stage,
        family: RecursiveFamily::FullDiagonal,
        subset: IndexSubset::new(n, full).expect("valid by construction"),
        label: format!("E~_{{1,...,{}}}", stage - 1),
    });
    for size in (2..=stage.saturating_sub(2)).rev() {
        for s in subsets(stage - 1, size, size).expect("2 <= size <= stage-1 by construction") {
            let mut members = s.members().to_vec();
            let label = format!(
                "E~_{{{}}}",
                members
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            );
            members.push(stage);
            centers.push(RecursiveCenter {
                stage,
                family: RecursiveFamily::StrictTransform,
                subset: IndexSubset::new(n, members).expect("valid by construction"),
                label,
            });
        }
    }
    for i in 1..stage {
        centers.push(RecursiveCenter {
            stage,
            family: RecursiveFamily::FactorGraph,
            subset: IndexSubset::new(n, vec![i, stage]).expect("valid by construction"),
            label: format!("X~[{}]_{}", stage - 1, i),
        });
    }
    centers
}

/// Picard number of the compactified configuration space.
///
/// The product contribution is taken to be `n * rho_base`; see
/// [`RHO_PRODUCT_ASSUMPTION`].
pub fn picard_number(rho_base: u64, dim_base: u64, n: u64) -> Result<Int> {
    if rho_base < 1 || dim_base < 1 || n < 1 {
        return Err(Error::InvalidArgument(
            "picard_number needs rho_base, dim_base, n all >= 1".into(),
        ));
    }
    let product = Int::from(n) * Int::from(rho_base);
    let two_n = Int::from(1) << n;
    let correction = if dim_base >= 2 {
        Int::from(n) + 1
    } else {
        Int::from(n) * Int::from(n + 1) / 2 + 1
    };
    Ok(product + two_n - correction)
}

/// Discrepancy coefficient of one exceptional-divisor size class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub size: usize,
    pub coefficient: u64,
    /// True when the center is already a divisor and contributes nothing.
    pub divisorial: bool,
}

/// One entry per subset-size class from 2 to n: coefficient
/// `(size - 1) * dim_base - 1`, except that for one-dimensional bases the
/// size-2 class is divisorial and contributes 0.
pub fn canonical_discrepancies(dim_base: u64, n: usize) -> Result<Vec<Discrepancy>> {
    if dim_base < 1 || n < 2 {
        return Err(Error::InvalidArgument(
            "canonical_discrepancies needs dim_base >= 1 and n >= 2".into(),
        ));
    }
    Ok((2..=n)
        .map(|size| {
            let divisorial = dim_base == 1 && size == 2;
            let coefficient = if divisorial {
                0
            } else {
                (size as u64 - 1) * dim_base - 1
            };
            Discrepancy {
                size,
                coefficient,
                divisorial,
            }
        })
        .collect())
}

impl Serialize for BlowupSchedule {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(3))?;
        map.serialize_entry("n", &self.n)?;
        map.serialize_entry("style", self.style.as_str())?;
        map.serialize_entry("rounds", &RoundsSer(&self.rounds))?;
        map.end()
    }
}

struct RoundsSer<'a>(&'a [Round]);

impl Serialize for RoundsSer<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for round in self.0 {
            match round {
                Round::Symmetric(centers) => {
                    let subs: Vec<&IndexSubset> = centers.iter().map(|c| &c.subset).collect();
                    seq.serialize_element(&subs)?;
                }
                Round::Recursive(centers) => {
                    let objs: Vec<RecursiveCenterSer> =
                        centers.iter().map(RecursiveCenterSer).collect();
                    seq.serialize_element(&objs)?;
                }
            }
        }
        seq.end()
    }
}

struct RecursiveCenterSer<'a>(&'a RecursiveCenter);

impl Serialize for RecursiveCenterSer<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(3))?;
        map.serialize_entry("stage", &self.0.stage)?;
        map.serialize_entry("label", &self.0.label)?;
        map.serialize_entry("subset", &self.0.subset)?;
        map.end()
    }
}
