//! Automorphism-group structure tables for configuration spaces of curves
//! and related moduli, exact order arithmetic on the resulting group
//! expressions, and a brute-force checker for the tuples of permutations
//! preserving the union of all diagonals in a product.
//!
//! Structures are returned as expression trees with a canonical ASCII
//! rendering ("S5 x PGL2", "S2 |x (PGL2 x PGL2)", "Aut(A)^2"). The tables
//! answer only for descriptors they actually cover; everything else is an
//! explicit Unsupported verdict, never a guess.

use num_traits::One;
use rayon::prelude::*;

use crate::perm::Permutation;
use crate::rational::Int;
use crate::subsets::subsets;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveFactor {
    pub genus: u64,
    pub class_id: String,
    pub aut_order: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseSpace {
    ProjLine,
    Curve {
        genus: u64,
        aut_order: Option<u64>,
    },
    ProductOfCurves(Vec<CurveFactor>),
    /// A variety with nef canonical class, named symbolically.
    NefCanonical(String),
    GeneralType(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceDescriptor {
    /// Configuration space base[n].
    Fm { base: BaseSpace, n: usize },
    /// Space of n-pointed genus-zero degree-d stable maps to projective
    /// N-space.
    Kontsevich { big_n: u64, d: u64, n: usize },
    /// Moduli of n-pointed genus-g stable curves.
    ModuliCurves { g: u64, n: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupExpr {
    Sym(usize),
    Pgl(u32),
    AutCurve {
        class_id: String,
        order: Option<u64>,
        connected: bool,
    },
    AutVariety {
        name: String,
        connected: bool,
    },
    /// Automorphisms of an n-fold product preserving the diagonals.
    AutDiagonal {
        name: String,
        power: usize,
    },
    Trivial,
    Product(Vec<GroupExpr>),
    Semidirect {
        acting: Box<GroupExpr>,
        normal: Box<GroupExpr>,
    },
    Power {
        base: Box<GroupExpr>,
        exp: usize,
    },
}

impl GroupExpr {
    fn is_composite(&self) -> bool {
        matches!(self, GroupExpr::Product(_) | GroupExpr::Semidirect { .. })
    }

    fn fmt_child(&self) -> String {
        if self.is_composite() {
            format!("({self})")
        } else {
            format!("{self}")
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            GroupExpr::Sym(n) => serde_json::json!({"op": "sym", "n": n}),
            GroupExpr::Pgl(k) => serde_json::json!({"op": "pgl", "k": k}),
            GroupExpr::AutCurve {
                class_id,
                order,
                connected,
            } => serde_json::json!({
                "op": "autCurve", "class": class_id, "order": order, "connected": connected
            }),
            GroupExpr::AutVariety { name, connected } => {
                serde_json::json!({"op": "autVariety", "name": name, "connected": connected})
            }
            GroupExpr::AutDiagonal { name, power } => {
                serde_json::json!({"op": "autDiagonal", "name": name, "power": power})
            }
            GroupExpr::Trivial => serde_json::json!({"op": "trivial"}),
            GroupExpr::Product(fs) => serde_json::json!({
                "op": "product",
                "factors": fs.iter().map(GroupExpr::to_json).collect::<Vec<_>>(),
            }),
            GroupExpr::Semidirect { acting, normal } => serde_json::json!({
                "op": "semidirect", "acting": acting.to_json(), "normal": normal.to_json()
            }),
            GroupExpr::Power { base, exp } => {
                serde_json::json!({"op": "power", "base": base.to_json(), "exp": exp})
            }
        }
    }
}

impl std::fmt::Display for GroupExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupExpr::Sym(n) => write!(f, "S{n}"),
            GroupExpr::Pgl(k) => write!(f, "PGL{k}"),
            GroupExpr::AutCurve {
                class_id,
                connected,
                ..
            } => {
                if *connected {
                    write!(f, "Aut0({class_id})")
                } else {
                    write!(f, "Aut({class_id})")
                }
            }
            GroupExpr::AutVariety { name, connected } => {
                if *connected {
                    write!(f, "Aut0({name})")
                } else {
                    write!(f, "Aut({name})")
                }
            }
            GroupExpr::AutDiagonal { name, power } => write!(f, "Aut_Delta({name}^{power})"),
            GroupExpr::Trivial => write!(f, "1"),
            GroupExpr::Product(fs) => {
                let parts: Vec<String> = fs.iter().map(GroupExpr::fmt_child).collect();
                write!(f, "{}", parts.join(" x "))
            }
            GroupExpr::Semidirect { acting, normal } => {
                write!(f, "{} |x {}", acting.fmt_child(), normal.fmt_child())
            }
            GroupExpr::Power { base, exp } => write!(f, "{}^{exp}", base.fmt_child()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AutVerdict {
    Structure(GroupExpr),
    /// The expected structure in a case that is still open.
    Conjectural(GroupExpr),
    Unsupported { reason: String },
}

fn unsupported(reason: &str) -> AutVerdict {
    AutVerdict::Unsupported {
        reason: reason.into(),
    }
}

const GENUS_ONE_REASON: &str =
    "a genus-one curve carries a faithful translation action, and the product \
     structure statements fail there";

fn curve_atom(class_id: &str, order: Option<u64>, connected: bool) -> GroupExpr {
    GroupExpr::AutCurve {
        class_id: class_id.into(),
        order,
        connected,
    }
}

/// Automorphisms of a product of smooth curves of genus >= 2, grouped by
/// isomorphism class in order of first appearance: each class of
/// multiplicity r contributes Sym(r) acting on Aut(C)^r.
fn product_of_curves_aut(factors: &[CurveFactor]) -> GroupExpr {
    let mut classes: Vec<(&CurveFactor, usize)> = Vec::new();
    for fac in factors {
        match classes.iter_mut().find(|(c, _)| c.class_id == fac.class_id) {
            Some((_, count)) => *count += 1,
            None => classes.push((fac, 1)),
        }
    }
    let parts: Vec<GroupExpr> = classes
        .into_iter()
        .map(|(c, r)| {
            let atom = curve_atom(&c.class_id, c.aut_order, false);
            if r == 1 {
                atom
            } else {
                GroupExpr::Semidirect {
                    acting: Box::new(GroupExpr::Sym(r)),
                    normal: Box::new(GroupExpr::Power {
                        base: Box::new(atom),
                        exp: r,
                    }),
                }
            }
        })
        .collect();
    if parts.len() == 1 {
        parts.into_iter().next().expect("nonempty")
    } else {
        GroupExpr::Product(parts)
    }
}

/// Full automorphism group of the descriptor, per the structure tables.
pub fn aut_structure(s: &SpaceDescriptor) -> AutVerdict {
    match s {
        SpaceDescriptor::Fm { base, n } => fm_structure(base, *n),
        SpaceDescriptor::Kontsevich { big_n: 1, d: 1, n } => fm_structure(&BaseSpace::ProjLine, *n),
        SpaceDescriptor::Kontsevich {
            big_n: 2,
            d: 2,
            n: 0,
        } => AutVerdict::Structure(GroupExpr::Pgl(3)),
        SpaceDescriptor::Kontsevich { .. } => {
            unsupported("no structure statement is available for this map space")
        }
        SpaceDescriptor::ModuliCurves { g, n } => {
            if *g >= 3 && *n >= 1 {
                AutVerdict::Structure(GroupExpr::Sym(*n))
            } else {
                unsupported("the moduli table covers genus >= 3 with at least one marking")
            }
        }
    }
}

fn fm_structure(base: &BaseSpace, n: usize) -> AutVerdict {
    if n == 0 {
        return unsupported("a configuration space needs at least one point");
    }
    match base {
        BaseSpace::ProjLine => AutVerdict::Structure(match n {
            1 => GroupExpr::Pgl(2),
            2 => GroupExpr::Semidirect {
                acting: Box::new(GroupExpr::Sym(2)),
                normal: Box::new(GroupExpr::Product(vec![GroupExpr::Pgl(2), GroupExpr::Pgl(2)])),
            },
            _ => GroupExpr::Product(vec![GroupExpr::Sym(n), GroupExpr::Pgl(2)]),
        }),
        BaseSpace::Curve { genus: 0, .. } => fm_structure(&BaseSpace::ProjLine, n),
        BaseSpace::Curve { genus: 1, .. } => unsupported(GENUS_ONE_REASON),
        BaseSpace::Curve { aut_order, .. } => {
            let atom = curve_atom("C", *aut_order, false);
            AutVerdict::Structure(match n {
                1 => atom,
                2 => GroupExpr::Semidirect {
                    acting: Box::new(GroupExpr::Sym(2)),
                    normal: Box::new(GroupExpr::Product(vec![atom.clone(), atom])),
                },
                _ => GroupExpr::Product(vec![GroupExpr::Sym(n), atom]),
            })
        }
        BaseSpace::ProductOfCurves(factors) => {
            if factors.is_empty() {
                return unsupported("a product base needs at least one factor");
            }
            if let [single] = factors.as_slice() {
                return fm_structure(
                    &BaseSpace::Curve {
                        genus: single.genus,
                        aut_order: single.aut_order,
                    },
                    n,
                );
            }
            if factors.iter().any(|f| f.genus == 1) {
                return unsupported(GENUS_ONE_REASON);
            }
            if factors.iter().any(|f| f.genus == 0) {
                return unsupported(
                    "a rational factor has positive-dimensional automorphisms; the \
                     product table covers genus >= 2 factors",
                );
            }
            let inner = product_of_curves_aut(factors);
            AutVerdict::Structure(match n {
                1 => inner,
                2 => GroupExpr::Semidirect {
                    acting: Box::new(GroupExpr::Power {
                        base: Box::new(GroupExpr::Sym(2)),
                        exp: factors.len(),
                    }),
                    normal: Box::new(GroupExpr::AutVariety {
                        name: "X".into(),
                        connected: false,
                    }),
                },
                _ => GroupExpr::Product(vec![GroupExpr::Sym(n), inner]),
            })
        }
        BaseSpace::NefCanonical(name) => AutVerdict::Structure(GroupExpr::AutDiagonal {
            name: name.clone(),
            power: n,
        }),
        BaseSpace::GeneralType(name) => match n {
            1 => AutVerdict::Structure(GroupExpr::AutVariety {
                name: name.clone(),
                connected: false,
            }),
            2 => unsupported("the two-point case of a general-type base is not covered"),
            _ => AutVerdict::Conjectural(GroupExpr::Product(vec![
                GroupExpr::Sym(n),
                GroupExpr::AutVariety {
                    name: name.clone(),
                    connected: false,
                },
            ])),
        },
    }
}

/// Connected component of the identity, per the structure tables.
pub fn aut_connected(s: &SpaceDescriptor) -> AutVerdict {
    match s {
        SpaceDescriptor::Fm { base, n } => fm_connected(base, *n),
        SpaceDescriptor::Kontsevich { big_n: 1, d: 1, n } => fm_connected(&BaseSpace::ProjLine, *n),
        SpaceDescriptor::Kontsevich { big_n, d: 1, n } if *big_n >= 2 && *n >= 1 => {
            let pgl_target = GroupExpr::Pgl(*big_n as u32 + 1);
            AutVerdict::Structure(if *n == 2 {
                GroupExpr::Product(vec![GroupExpr::Pgl(2), GroupExpr::Pgl(2), pgl_target])
            } else {
                GroupExpr::Product(vec![GroupExpr::Pgl(2), pgl_target])
            })
        }
        SpaceDescriptor::Kontsevich { big_n, d, n }
            if big_n == d && *big_n >= 3 && *n as u64 >= big_n + 2 =>
        {
            AutVerdict::Structure(GroupExpr::Pgl(*big_n as u32 + 1))
        }
        SpaceDescriptor::Kontsevich { .. } => {
            unsupported("no connected-component statement is available for this map space")
        }
        SpaceDescriptor::ModuliCurves { .. } => {
            unsupported("no connected-component statement is available here")
        }
    }
}

fn fm_connected(base: &BaseSpace, n: usize) -> AutVerdict {
    if n == 0 {
        return unsupported("a configuration space needs at least one point");
    }
    match base {
        BaseSpace::ProjLine => AutVerdict::Structure(if n == 2 {
            GroupExpr::Product(vec![GroupExpr::Pgl(2), GroupExpr::Pgl(2)])
        } else {
            GroupExpr::Pgl(2)
        }),
        BaseSpace::Curve { genus: 0, .. } => fm_connected(&BaseSpace::ProjLine, n),
        BaseSpace::Curve { genus: 1, .. } => unsupported(GENUS_ONE_REASON),
        BaseSpace::Curve { aut_order, .. } => {
            let atom = curve_atom("C", *aut_order, true);
            AutVerdict::Structure(if n == 2 {
                GroupExpr::Product(vec![atom.clone(), atom])
            } else {
                atom
            })
        }
        BaseSpace::ProductOfCurves(factors) => {
            if factors.is_empty() {
                return unsupported("a product base needs at least one factor");
            }
            if let [single] = factors.as_slice() {
                return fm_connected(
                    &BaseSpace::Curve {
                        genus: single.genus,
                        aut_order: single.aut_order,
                    },
                    n,
                );
            }
            if factors.iter().any(|f| f.genus == 1) {
                return unsupported(GENUS_ONE_REASON);
            }
            // dim X >= 2, so the rule is uniform in n
            AutVerdict::Structure(GroupExpr::AutVariety {
                name: "X".into(),
                connected: true,
            })
        }
        BaseSpace::NefCanonical(name) | BaseSpace::GeneralType(name) => {
            AutVerdict::Structure(GroupExpr::AutVariety {
                name: name.clone(),
                connected: true,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupOrder {
    Finite(Int),
    Infinite,
    /// Some atom has no declared order.
    Unknown,
}

pub fn group_order(g: &GroupExpr) -> GroupOrder {
    match g {
        GroupExpr::Sym(n) => GroupOrder::Finite(factorial(*n)),
        GroupExpr::Pgl(_) => GroupOrder::Infinite,
        GroupExpr::AutCurve { order, .. } => match order {
            Some(a) => GroupOrder::Finite(Int::from(*a)),
            None => GroupOrder::Unknown,
        },
        GroupExpr::AutVariety { .. } | GroupExpr::AutDiagonal { .. } => GroupOrder::Unknown,
        GroupExpr::Trivial => GroupOrder::Finite(Int::one()),
        GroupExpr::Product(fs) => fs.iter().map(group_order).fold(
            GroupOrder::Finite(Int::one()),
            combine_orders,
        ),
        GroupExpr::Semidirect { acting, normal } => {
            combine_orders(group_order(acting), group_order(normal))
        }
        GroupExpr::Power { base, exp } => match group_order(base) {
            GroupOrder::Finite(a) => GroupOrder::Finite(a.pow(*exp as u32)),
            other => other,
        },
    }
}

/// Orders multiply; an infinite factor dominates an unknown one.
fn combine_orders(a: GroupOrder, b: GroupOrder) -> GroupOrder {
    match (a, b) {
        (GroupOrder::Infinite, _) | (_, GroupOrder::Infinite) => GroupOrder::Infinite,
        (GroupOrder::Unknown, _) | (_, GroupOrder::Unknown) => GroupOrder::Unknown,
        (GroupOrder::Finite(x), GroupOrder::Finite(y)) => GroupOrder::Finite(x * y),
    }
}

fn factorial(n: usize) -> Int {
    (1..=n).fold(Int::one(), |acc, k| acc * Int::from(k))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StabilizerVerdict {
    DiagonalSym { n: usize },
    FullSym2Power { r: usize },
    Trivial,
}

impl StabilizerVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            StabilizerVerdict::DiagonalSym { .. } => "diagonal-sym",
            StabilizerVerdict::FullSym2Power { .. } => "full-sym2-power",
            StabilizerVerdict::Trivial => "trivial",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalStabilizer {
    /// Every kept tuple, in lexicographic order of the component
    /// permutations.
    pub tuples: Vec<Vec<Permutation>>,
    pub verdict: StabilizerVerdict,
}

const DIAGONAL_BRUTE_FORCE_BOUND: u64 = 10_000_000;

/// Brute force over all of Sym(n)^r: a tuple is kept when it maps every
/// diagonal (the locus where the points indexed by some S coincide in all r
/// coordinates) onto another such diagonal, which happens exactly when all
/// r preimages of S agree for every S with |S| >= 2.
pub fn diagonal_stabilizer(n: usize, r: usize) -> Result<DiagonalStabilizer> {
    if n == 0 || r == 0 {
        return Err(Error::InvalidArgument("need n >= 1 and r >= 1".into()));
    }
    let fact: u64 = (1..=n as u64).product();
    let total = fact.checked_pow(r as u32);
    match total {
        Some(t) if t <= DIAGONAL_BRUTE_FORCE_BOUND => {}
        _ => {
            return Err(Error::BoundExceeded(format!(
                "{n}!^{r} exceeds the brute-force bound {DIAGONAL_BRUTE_FORCE_BOUND}"
            )));
        }
    }
    let total = total.expect("checked above");
    let perms = all_permutations(n);

    // preimage signature of each permutation across all subsets |S| >= 2;
    // tuples are kept exactly when all coordinates share one signature
    let class_of: Vec<usize> = if n < 2 {
        vec![0; perms.len()]
    } else {
        let masks: Vec<u32> = subsets(n, 2, n)?
            .iter()
            .map(|s| s.members().iter().map(|&i| 1u32 << (i - 1)).sum())
            .collect();
        let signatures: Vec<Vec<u32>> = perms
            .iter()
            .map(|p| {
                masks
                    .iter()
                    .map(|&m| {
                        let mut pre = 0u32;
                        for i in 1..=n {
                            if m & (1 << (p.apply(i) - 1)) != 0 {
                                pre |= 1 << (i - 1);
                            }
                        }
                        pre
                    })
                    .collect()
            })
            .collect();
        let mut distinct: Vec<&Vec<u32>> = Vec::new();
        signatures
            .iter()
            .map(|sig| {
                match distinct.iter().position(|d| *d == sig) {
                    Some(k) => k,
                    None => {
                        distinct.push(sig);
                        distinct.len() - 1
                    }
                }
            })
            .collect()
    };

    let tuples: Vec<Vec<Permutation>> = (0..total)
        .into_par_iter()
        .filter_map(|code| {
            let mut digits = Vec::with_capacity(r);
            let mut rest = code;
            for _ in 0..r {
                digits.push((rest % fact) as usize);
                rest /= fact;
            }
            digits.reverse();
            let class = class_of[digits[0]];
            if digits.iter().all(|&d| class_of[d] == class) {
                Some(digits.iter().map(|&d| perms[d].clone()).collect())
            } else {
                None
            }
        })
        .collect();

    let verdict = if n == 1 {
        StabilizerVerdict::Trivial
    } else if n == 2 {
        StabilizerVerdict::FullSym2Power { r }
    } else {
        StabilizerVerdict::DiagonalSym { n }
    };
    debug_assert!(match &verdict {
        StabilizerVerdict::Trivial => tuples.len() == 1,
        StabilizerVerdict::FullSym2Power { r } => tuples.len() == 1usize << r,
        StabilizerVerdict::DiagonalSym { .. } =>
            tuples.len() == fact as usize && tuples.iter().all(|t| t.iter().all(|p| *p == t[0])),
    });
    Ok(DiagonalStabilizer { tuples, verdict })
}

/// All permutations of 1..n in lexicographic order of their image lists.
fn all_permutations(n: usize) -> Vec<Permutation> {
    fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
        if cur.len() == n {
            out.push(Permutation::new(cur.clone()).expect("built as a bijection"));
            return;
        }
        for v in 1..=n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(n, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut vec![false; n + 1], &mut out);
    out
}

impl SpaceDescriptor {
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::InvalidArgument("space descriptor must be an object".into()))?;
        if let Some(fm) = obj.get("fm") {
            let base = fm
                .get("base")
                .ok_or_else(|| Error::InvalidArgument("fm descriptor needs a base".into()))?;
            return Ok(SpaceDescriptor::Fm {
                base: base_from_json(base)?,
                n: get_usize(fm, "n")?,
            });
        }
        if let Some(k) = obj.get("kontsevich") {
            return Ok(SpaceDescriptor::Kontsevich {
                big_n: get_u64(k, "N")?,
                d: get_u64(k, "d")?,
                n: get_usize(k, "n")?,
            });
        }
        if let Some(m) = obj.get("mgn") {
            return Ok(SpaceDescriptor::ModuliCurves {
                g: get_u64(m, "g")?,
                n: get_usize(m, "n")?,
            });
        }
        Err(Error::InvalidArgument(
            "space descriptor needs an \"fm\", \"kontsevich\", or \"mgn\" key".into(),
        ))
    }
}

fn base_from_json(v: &serde_json::Value) -> Result<BaseSpace> {
    if v.as_str() == Some("P1") {
        return Ok(BaseSpace::ProjLine);
    }
    let obj = v
        .as_object()
        .ok_or_else(|| Error::InvalidArgument("base must be \"P1\" or an object".into()))?;
    if let Some(c) = obj.get("curve") {
        return Ok(BaseSpace::Curve {
            genus: get_u64(c, "genus")?,
            aut_order: opt_u64(c, "autOrder")?,
        });
    }
    if let Some(p) = obj.get("product") {
        let arr = p
            .as_array()
            .ok_or_else(|| Error::InvalidArgument("product base must be a list".into()))?;
        let factors = arr
            .iter()
            .map(|f| {
                Ok(CurveFactor {
                    genus: get_u64(f, "genus")?,
                    class_id: f
                        .get("class")
                        .and_then(serde_json::Value::as_str)
                        .ok_or_else(|| {
                            Error::InvalidArgument("product factor needs a class id".into())
                        })?
                        .to_string(),
                    aut_order: opt_u64(f, "autOrder")?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(BaseSpace::ProductOfCurves(factors));
    }
    if let Some(s) = obj.get("nefCanonical") {
        return Ok(BaseSpace::NefCanonical(symbolic_name(s)?));
    }
    if let Some(s) = obj.get("generalType") {
        return Ok(BaseSpace::GeneralType(symbolic_name(s)?));
    }
    Err(Error::InvalidArgument(
        "unknown base space; expected P1, curve, product, nefCanonical, or generalType".into(),
    ))
}

fn symbolic_name(v: &serde_json::Value) -> Result<String> {
    v.as_str()
        .map(str::to_string)
        .ok_or_else(|| Error::InvalidArgument("symbolic base name must be a string".into()))
}

fn get_u64(v: &serde_json::Value, key: &str) -> Result<u64> {
    v.get(key)
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| Error::InvalidArgument(format!("missing numeric field \"{key}\"")))
}

fn get_usize(v: &serde_json::Value, key: &str) -> Result<usize> {
    get_u64(v, key).map(|u| u as usize)
}

fn opt_u64(v: &serde_json::Value, key: &str) -> Result<Option<u64>> {
    match v.get(key) {
        None | Some(serde_json::Value::Null) => Ok(None),
        Some(x) => x
            .as_u64()
            .map(Some)
            .ok_or_else(|| Error::InvalidArgument(format!("field \"{key}\" must be a number"))),
    }
}
