//! Exact points of the projective line and integer Moebius transformations.

use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::rational::{int_to_json_number, Int};
use crate::{Error, Result};

/// A point (p : q), stored primitive with q > 0, or as (1 : 0).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjPoint {
    p: Int,
    q: Int,
}

impl ProjPoint {
    pub fn new(p: Int, q: Int) -> Result<Self> {
        if p.is_zero() && q.is_zero() {
            return Err(Error::InvalidArgument(
                "projective point needs a nonzero coordinate".into(),
            ));
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / &g, q / &g);
        if q.is_negative() || (q.is_zero() && p.is_negative()) {
            p = -p;
            q = -q;
        }
        Ok(ProjPoint { p, q })
    }

    pub fn from_i64(p: i64, q: i64) -> Self {
        ProjPoint::new(Int::from(p), Int::from(q)).expect("nonzero coordinates")
    }

    /// The point at infinity (1 : 0).
    pub fn infinity() -> Self {
        ProjPoint {
            p: Int::from(1),
            q: Int::zero(),
        }
    }

    pub fn zero() -> Self {
        ProjPoint {
            p: Int::zero(),
            q: Int::from(1),
        }
    }

    pub fn one() -> Self {
        ProjPoint {
            p: Int::from(1),
            q: Int::from(1),
        }
    }

    pub fn p(&self) -> &Int {
        &self.p
    }

    pub fn q(&self) -> &Int {
        &self.q
    }

    pub fn is_infinity(&self) -> bool {
        self.q.is_zero()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(vec![
            serde_json::Value::Number(int_to_json_number(&self.p)),
            serde_json::Value::Number(int_to_json_number(&self.q)),
        ])
    }
}

/// 2x2 determinant of a pair of points read as column vectors.
pub fn point_det(a: &ProjPoint, b: &ProjPoint) -> Int {
    &a.p * &b.q - &a.q * &b.p
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:{})", self.p, self.q)
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(2))?;
        seq.serialize_element(&int_to_json_number(&self.p))?;
        seq.serialize_element(&int_to_json_number(&self.q))?;
        seq.end()
    }
}

/// Invertible map of the projective line, stored as a primitive integer
/// matrix [[a, b], [c, d]] whose first nonzero entry (reading a, b, c, d)
/// is positive. Two matrices represent the same map exactly when the
/// normalized forms coincide.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MobiusMap {
    a: Int,
    b: Int,
    c: Int,
    d: Int,
}

impl MobiusMap {
    pub fn new(a: Int, b: Int, c: Int, d: Int) -> Result<Self> {
        if (&a * &d - &b * &c).is_zero() {
            return Err(Error::InvalidArgument(
                "Moebius matrix must have nonzero determinant".into(),
            ));
        }
        let g = a.gcd(&b).gcd(&c).gcd(&d);
        let mut e = [a / &g, b / &g, c / &g, d / &g];
        let flip = e
            .iter()
            .find(|x| !x.is_zero())
            .expect("nonzero determinant implies a nonzero entry")
            .is_negative();
        if flip {
            for x in &mut e {
                *x = -&*x;
            }
        }
        let [a, b, c, d] = e;
        Ok(MobiusMap { a, b, c, d })
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        MobiusMap::new(Int::from(a), Int::from(b), Int::from(c), Int::from(d))
    }

    pub fn identity() -> Self {
        MobiusMap {
            a: Int::from(1),
            b: Int::zero(),
            c: Int::zero(),
            d: Int::from(1),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == MobiusMap::identity()
    }

    pub fn entries(&self) -> [&Int; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn det(&self) -> Int {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn apply(&self, pt: &ProjPoint) -> ProjPoint {
        ProjPoint::new(
            &self.a * &pt.p + &self.b * &pt.q,
            &self.c * &pt.p + &self.d * &pt.q,
        )
        .expect("invertible matrix maps nonzero vectors to nonzero vectors")
    }

    /// Matrix product: (self.compose(other))(x) = self(other(x)).
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        MobiusMap::new(
            &self.a * &other.a + &self.b * &other.c,
            &self.a * &other.b + &self.b * &other.d,
            &self.c * &other.a + &self.d * &other.c,
            &self.c * &other.b + &self.d * &other.d,
        )
        .expect("product of invertible matrices is invertible")
    }

    pub fn inverse(&self) -> MobiusMap {
        MobiusMap::new(self.d.clone(), -&self.b, -&self.c, self.a.clone())
            .expect("adjugate of an invertible matrix is invertible")
    }

    pub fn to_json(&self) -> serde_json::Value {
        let num = |x: &Int| serde_json::Value::Number(int_to_json_number(x));
        serde_json::Value::Array(vec![
            serde_json::Value::Array(vec![num(&self.a), num(&self.b)]),
            serde_json::Value::Array(vec![num(&self.c), num(&self.d)]),
        ])
    }
}

impl fmt::Display for MobiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

impl Serialize for MobiusMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(2))?;
        seq.serialize_element(&[int_to_json_number(&self.a), int_to_json_number(&self.b)])?;
        seq.serialize_element(&[int_to_json_number(&self.c), int_to_json_number(&self.d)])?;
        seq.end()
    }
}

/// The unique map sending (1:0), (0:1), (1:1) to three pairwise distinct
/// points, via scaled column vectors.
pub fn three_point_map(p1: &ProjPoint, p2: &ProjPoint, p3: &ProjPoint) -> Result<MobiusMap> {
    if p1 == p2 || p1 == p3 || p2 == p3 {
        return Err(Error::InvalidArgument(
            "three-point interpolation needs distinct points".into(),
        ));
    }
    let lambda = point_det(p3, p2);
    let mu = point_det(p1, p3);
    MobiusMap::new(
        &lambda * &p1.p,
        &mu * &p2.p,
        &lambda * &p1.q,
        &mu * &p2.q,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_normalization() {
        assert_eq!(ProjPoint::from_i64(2, 4), ProjPoint::from_i64(1, 2));
        assert_eq!(ProjPoint::from_i64(1, -2), ProjPoint::from_i64(-1, 2));
        assert_eq!(ProjPoint::from_i64(-3, 0), ProjPoint::infinity());
        assert!(ProjPoint::new(Int::zero(), Int::zero()).is_err());
        assert_eq!(ProjPoint::from_i64(0, -5), ProjPoint::zero());
    }

    #[test]
    fn mobius_normalization_and_action() {
        let m = MobiusMap::from_i64(-2, 0, 0, -2).unwrap();
        assert!(m.is_identity());
        let inv = MobiusMap::from_i64(0, 1, 1, 0).unwrap(); // z -> 1/z
        assert_eq!(inv.apply(&ProjPoint::from_i64(1, 2)), ProjPoint::from_i64(2, 1));
        assert_eq!(inv.apply(&ProjPoint::zero()), ProjPoint::infinity());
        assert!(MobiusMap::from_i64(1, 2, 2, 4).is_err());
    }

    #[test]
    fn composition_and_inverse() {
        let f = MobiusMap::from_i64(1, 1, 0, 1).unwrap(); // z -> z+1
        let g = MobiusMap::from_i64(2, 0, 0, 1).unwrap(); // z -> 2z
        let fg = f.compose(&g);
        let x = ProjPoint::from_i64(3, 1);
        assert_eq!(fg.apply(&x), f.apply(&g.apply(&x)));
        assert!(f.compose(&f.inverse()).is_identity());
        assert!(g.inverse().compose(&g).is_identity());
    }

    #[test]
    fn three_point_interpolation() {
        let targets = [
            ProjPoint::from_i64(0, 1),
            ProjPoint::from_i64(1, 1),
            ProjPoint::from_i64(2, 1),
        ];
        let m = three_point_map(&targets[0], &targets[1], &targets[2]).unwrap();
        assert_eq!(m.apply(&ProjPoint::infinity()), targets[0]);
        assert_eq!(m.apply(&ProjPoint::zero()), targets[1]);
        assert_eq!(m.apply(&ProjPoint::one()), targets[2]);
        assert!(three_point_map(&targets[0], &targets[0], &targets[1]).is_err());
    }

    #[test]
    fn three_point_with_infinity() {
        let a = ProjPoint::infinity();
        let b = ProjPoint::from_i64(-1, 3);
        let c = ProjPoint::from_i64(5, 2);
        let m = three_point_map(&a, &b, &c).unwrap();
        assert_eq!(m.apply(&ProjPoint::infinity()), a);
        assert_eq!(m.apply(&ProjPoint::zero()), b);
        assert_eq!(m.apply(&ProjPoint::one()), c);
        // the inverse sends the three points back to the standard triple
        let inv = m.inverse();
        assert_eq!(inv.apply(&a), ProjPoint::infinity());
        assert_eq!(inv.apply(&b), ProjPoint::zero());
        assert_eq!(inv.apply(&c), ProjPoint::one());
    }

    #[test]
    fn json_forms() {
        assert_eq!(
            serde_json::to_string(&ProjPoint::from_i64(-1, 2)).unwrap(),
            "[-1,2]"
        );
        assert_eq!(
            serde_json::to_string(&MobiusMap::from_i64(1, 0, 3, -1).unwrap()).unwrap(),
            "[[1,0],[3,-1]]"
        );
    }
}
