//! Worked numerical models: the blow-up of projective 3-space along three
//! pairwise disjoint lines (divisor rank 4), and the sextic del Pezzo
//! surface as the plane blown up in three general points.
//!
//! Generator lists are stored as independent data; the cone engine
//! recomputes duals and minimal sets so the two routes check each other.

use std::collections::BTreeMap;

use num_traits::Signed;

use crate::cone::{LatticeTag, NumericalClass, PairedLattices, RationalCone};
use crate::rational::Int;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PresetModel {
    /// Blow-up of P^3 along three skew lines; equivalently the space of
    /// three framed points on a line.
    P13,
    /// Del Pezzo surface of degree six.
    Dp6,
}

impl PresetModel {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p13" => Ok(PresetModel::P13),
            "dp6" => Ok(PresetModel::Dp6),
            other => Err(Error::UnknownLabel(format!("preset model {other}"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PresetModel::P13 => "p13",
            PresetModel::Dp6 => "dp6",
        }
    }
}

/// A preset model: lattices, the standard cones, and named classes.
#[derive(Clone, Debug)]
pub struct Preset {
    pub model: PresetModel,
    pub lattices: PairedLattices,
    /// Cone of curves, with the generator list as classically stated
    /// (possibly redundant).
    pub mori: RationalCone,
    /// Nef cone generators, recorded independently of the dual computation.
    pub nef: RationalCone,
    /// Effective-divisor cone generators, taken as given data.
    pub effective: RationalCone,
    /// Canonical divisor class.
    pub canonical: NumericalClass,
    /// Ruling sections sigma_i = L~ + R_i (curve lattice; empty for dp6).
    pub sigmas: Vec<NumericalClass>,
    /// Divisor classes inducing the pencils of the model.
    pub pencils: Vec<NumericalClass>,
    /// Label -> class lookup for the CLI and tests.
    pub named: BTreeMap<String, NumericalClass>,
}

impl Preset {
    pub fn class(&self, label: &str) -> Result<NumericalClass> {
        self.named
            .get(label)
            .cloned()
            .ok_or_else(|| Error::UnknownLabel(label.into()))
    }

    pub fn anticanonical(&self) -> NumericalClass {
        self.canonical.neg()
    }
}

fn diag_pairing(signs: &[i64]) -> Vec<Vec<Int>> {
    let n = signs.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Int::from(signs[i]) } else { Int::from(0) })
                .collect()
        })
        .collect()
}

fn div(coords: &[i64]) -> NumericalClass {
    NumericalClass::from_i64(LatticeTag::Divisor, coords)
}

fn cur(coords: &[i64]) -> NumericalClass {
    NumericalClass::from_i64(LatticeTag::Curve, coords)
}

pub fn preset(model: PresetModel) -> Preset {
    match model {
        PresetModel::P13 => preset_p13(),
        PresetModel::Dp6 => preset_dp6(),
    }
}

fn preset_p13() -> Preset {
    let lattices = PairedLattices::new(
        vec!["H~".into(), "E1".into(), "E2".into(), "E3".into()],
        vec!["L~".into(), "R1".into(), "R2".into(), "R3".into()],
        diag_pairing(&[1, -1, -1, -1]),
    )
    .expect("diagonal pairing is nondegenerate");

    // curve classes
    let l_sr = cur(&[1, -1, -1, -1]);
    let r = [cur(&[0, 1, 0, 0]), cur(&[0, 0, 1, 0]), cur(&[0, 0, 0, 1])];
    let sigmas = vec![cur(&[1, 1, 0, 0]), cur(&[1, 0, 1, 0]), cur(&[1, 0, 0, 1])];

    let mori = RationalCone::from_classes(
        LatticeTag::Curve,
        &[
            l_sr.clone(),
            r[0].clone(),
            r[1].clone(),
            r[2].clone(),
            sigmas[0].clone(),
            sigmas[1].clone(),
            sigmas[2].clone(),
        ],
    )
    .expect("curve classes");

    // divisor classes
    let h = div(&[1, 0, 0, 0]);
    let e = [div(&[0, 1, 0, 0]), div(&[0, 0, 1, 0]), div(&[0, 0, 0, 1])];
    let h_e = [div(&[1, -1, 0, 0]), div(&[1, 0, -1, 0]), div(&[1, 0, 0, -1])];

    let nef = RationalCone::from_classes(
        LatticeTag::Divisor,
        &[h.clone(), h_e[0].clone(), h_e[1].clone(), h_e[2].clone()],
    )
    .expect("divisor classes");

    let effective = RationalCone::from_classes(
        LatticeTag::Divisor,
        &[
            div(&[2, -1, -1, -1]),
            h_e[0].clone(),
            h_e[1].clone(),
            h_e[2].clone(),
            e[0].clone(),
            e[1].clone(),
            e[2].clone(),
        ],
    )
    .expect("divisor classes");

    let canonical = div(&[-4, 1, 1, 1]);

    let mut named = BTreeMap::new();
    named.insert("H~".to_string(), h);
    for (i, c) in e.iter().enumerate() {
        named.insert(format!("E{}", i + 1), c.clone());
    }
    named.insert("L~".to_string(), cur(&[1, 0, 0, 0]));
    for (i, c) in r.iter().enumerate() {
        named.insert(format!("R{}", i + 1), c.clone());
    }
    for (i, c) in sigmas.iter().enumerate() {
        named.insert(format!("sigma{}", i + 1), c.clone());
    }
    named.insert("K".to_string(), canonical.clone());

    Preset {
        model: PresetModel::P13,
        lattices,
        mori,
        nef,
        effective,
        canonical,
        sigmas,
        pencils: Vec::new(),
        named,
    }
}

fn preset_dp6() -> Preset {
    let labels: Vec<String> = vec!["H".into(), "E1".into(), "E2".into(), "E3".into()];
    let lattices = PairedLattices::new(labels.clone(), labels, diag_pairing(&[1, -1, -1, -1]))
        .expect("diagonal pairing is nondegenerate");

    let mori = RationalCone::from_classes(
        LatticeTag::Curve,
        &[
            cur(&[0, 1, 0, 0]),
            cur(&[0, 0, 1, 0]),
            cur(&[0, 0, 0, 1]),
            cur(&[1, -1, -1, 0]),
            cur(&[1, -1, 0, -1]),
            cur(&[1, 0, -1, -1]),
        ],
    )
    .expect("curve classes");

    let nef = RationalCone::from_classes(
        LatticeTag::Divisor,
        &[
            div(&[1, 0, 0, 0]),
            div(&[1, -1, 0, 0]),
            div(&[1, 0, -1, 0]),
            div(&[1, 0, 0, -1]),
            div(&[2, -1, -1, -1]),
        ],
    )
    .expect("divisor classes");

    let effective = RationalCone::from_classes(
        LatticeTag::Divisor,
        &[
            div(&[0, 1, 0, 0]),
            div(&[0, 0, 1, 0]),
            div(&[0, 0, 0, 1]),
            div(&[1, -1, -1, 0]),
            div(&[1, -1, 0, -1]),
            div(&[1, 0, -1, -1]),
        ],
    )
    .expect("divisor classes");

    let canonical = div(&[-3, 1, 1, 1]);
    let pencils = vec![div(&[1, -1, 0, 0]), div(&[1, 0, -1, 0]), div(&[1, 0, 0, -1])];

    let mut named = BTreeMap::new();
    named.insert("H".to_string(), div(&[1, 0, 0, 0]));
    named.insert("E1".to_string(), div(&[0, 1, 0, 0]));
    named.insert("E2".to_string(), div(&[0, 0, 1, 0]));
    named.insert("E3".to_string(), div(&[0, 0, 0, 1]));
    named.insert("K".to_string(), canonical.clone());

    Preset {
        model: PresetModel::Dp6,
        lattices,
        mori,
        nef,
        effective,
        canonical,
        sigmas: Vec::new(),
        pencils,
        named,
    }
}

/// Decomposition verdict for a curve class d*L~ - m1*R1 - m2*R2 - m3*R3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MoriDecomposition {
    /// Coefficients on (L~ - R1 - R2 - R3, R1, R2, R3), in that order.
    Valid { coefficients: [Int; 4] },
    /// Smallest 1-based index i with d - m_i < 0: the class would force the
    /// i-th line to split off as a component.
    Rejected { index: usize },
}

/// Writes d*L~ - sum m_i R_i over the minimal Mori generators of the first
/// preset. Requires d >= 1 (classes of irreducible curves not contained in
/// an exceptional divisor).
pub fn mori_decompose_p13(d: &Int, m: &[Int; 3]) -> Result<MoriDecomposition> {
    if !d.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "decomposition needs d >= 1, got {d}"
        )));
    }
    for (i, mi) in m.iter().enumerate() {
        if (d - mi).is_negative() {
            return Ok(MoriDecomposition::Rejected { index: i + 1 });
        }
    }
    Ok(MoriDecomposition::Valid {
        coefficients: [d.clone(), d - &m[0], d - &m[1], d - &m[2]],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{contains, cone_eq, dual_cone, extremal_rays, fano_test, Containment};
    use crate::rational::Rational;

    fn iv(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    #[test]
    fn p13_pairing_table() {
        let p = preset(PresetModel::P13);
        assert_eq!(p.lattices.pair_labels("H~", "L~").unwrap(), Int::from(1));
        assert_eq!(p.lattices.pair_labels("E1", "R1").unwrap(), Int::from(-1));
        assert_eq!(p.lattices.pair_labels("E1", "R2").unwrap(), Int::from(0));
        assert_eq!(p.lattices.pair_labels("H~", "R1").unwrap(), Int::from(0));
        // sections meet the hyperplane once and their own ruling once
        let sigma1 = p.class("sigma1").unwrap();
        let h = p.class("H~").unwrap();
        let e1 = p.class("E1").unwrap();
        assert_eq!(p.lattices.pair(&h, &sigma1).unwrap(), Int::from(1));
        assert_eq!(p.lattices.pair(&e1, &sigma1).unwrap(), Int::from(-1));
    }

    #[test]
    fn p13_nef_is_dual_of_mori() {
        let p = preset(PresetModel::P13);
        let dual = dual_cone(&p.mori, &p.lattices).unwrap();
        assert!(cone_eq(&dual, &p.nef));
        assert_eq!(
            extremal_rays(&dual).generators(),
            &[
                iv(&[1, -1, 0, 0]),
                iv(&[1, 0, -1, 0]),
                iv(&[1, 0, 0, -1]),
                iv(&[1, 0, 0, 0]),
            ]
        );
    }

    #[test]
    fn p13_mori_minimal_set_drops_sections() {
        let p = preset(PresetModel::P13);
        assert_eq!(p.mori.generators().len(), 7);
        let minimal = extremal_rays(&p.mori);
        assert_eq!(
            minimal.generators(),
            &[
                iv(&[0, 0, 0, 1]),
                iv(&[0, 0, 1, 0]),
                iv(&[0, 1, 0, 0]),
                iv(&[1, -1, -1, -1]),
            ]
        );
        // the stated list and the minimal list generate the same cone
        assert!(cone_eq(&minimal, &p.mori));
    }

    #[test]
    fn p13_nef_inside_effective_and_nonnegative_on_sections() {
        let p = preset(PresetModel::P13);
        for g in p.nef.generator_classes() {
            match contains(&p.effective, &g, &p.lattices).unwrap() {
                Containment::Yes { .. } => {}
                other => panic!("nef generator escapes the effective cone: {other:?}"),
            }
            for s in &p.sigmas {
                assert!(!p.lattices.pair(&g, s).unwrap().is_negative());
            }
        }
    }

    #[test]
    fn p13_section_certificate() {
        let p = preset(PresetModel::P13);
        let minimal = extremal_rays(&p.mori);
        let sigma1 = p.class("sigma1").unwrap();
        match contains(&minimal, &sigma1, &p.lattices).unwrap() {
            Containment::Yes { coefficients } => {
                // sorted generators: R3, R2, R1, L~-R1-R2-R3
                let expected: Vec<Rational> =
                    [1, 1, 2, 1].iter().map(|&x| Rational::from_int(x)).collect();
                assert_eq!(coefficients, expected);
            }
            other => panic!("expected membership, got {other:?}"),
        }
        // over the full stated list the trivial certificate wins
        match contains(&p.mori, &sigma1, &p.lattices).unwrap() {
            Containment::Yes { coefficients } => {
                let nonzero: Vec<_> = coefficients.iter().filter(|c| !c.is_zero()).collect();
                assert_eq!(nonzero, vec![&Rational::from_int(1)]);
            }
            other => panic!("expected membership, got {other:?}"),
        }
    }

    #[test]
    fn p13_outside_class_separated() {
        let p = preset(PresetModel::P13);
        let v = cur(&[1, -2, 0, 0]); // one tangency too many
        match contains(&p.mori, &v, &p.lattices).unwrap() {
            Containment::No { separator } => {
                assert_eq!(separator.coords, iv(&[1, -1, 0, 0]));
                for g in p.mori.generator_classes() {
                    assert!(!p.lattices.pair(&separator, &g).unwrap().is_negative());
                }
                assert!(p.lattices.pair(&separator, &v).unwrap().is_negative());
            }
            other => panic!("expected separation, got {other:?}"),
        }
    }

    #[test]
    fn p13_fano_table() {
        let p = preset(PresetModel::P13);
        let report = fano_test(&p.lattices, &p.anticanonical(), &p.mori).unwrap();
        assert!(report.is_fano);
        assert_eq!(report.table.len(), 4);
        for row in &report.table {
            assert_eq!(row.value, Int::from(1));
        }
    }

    #[test]
    fn dp6_nef_is_dual_of_mori() {
        let p = preset(PresetModel::Dp6);
        let dual = dual_cone(&p.mori, &p.lattices).unwrap();
        assert!(cone_eq(&dual, &p.nef));
        // five extremal rays, none redundant
        assert_eq!(extremal_rays(&dual).generators().len(), 5);
        assert_eq!(dual.generators(), p.nef.generators());
    }

    #[test]
    fn dp6_fano() {
        let p = preset(PresetModel::Dp6);
        let report = fano_test(&p.lattices, &p.anticanonical(), &p.mori).unwrap();
        assert!(report.is_fano);
        assert_eq!(report.table.len(), 6);
        for row in &report.table {
            assert_eq!(row.value, Int::from(1));
        }
    }

    #[test]
    fn dp6_pencils_are_nef_square_zero() {
        let p = preset(PresetModel::Dp6);
        assert_eq!(p.pencils.len(), 3);
        for pencil in &p.pencils {
            // self-intersection via the self-pairing
            let as_curve = NumericalClass::new(LatticeTag::Curve, pencil.coords.clone());
            assert_eq!(p.lattices.pair(pencil, &as_curve).unwrap(), Int::from(0));
            match contains(&p.nef, pencil, &p.lattices).unwrap() {
                Containment::Yes { .. } => {}
                other => panic!("pencil class not nef: {other:?}"),
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let one = Int::from(1);
        let three = Int::from(3);
        assert_eq!(
            mori_decompose_p13(&one, &[one.clone(), one.clone(), one.clone()]).unwrap(),
            MoriDecomposition::Valid {
                coefficients: [Int::from(1), Int::from(0), Int::from(0), Int::from(0)]
            }
        );
        assert_eq!(
            mori_decompose_p13(&three, &[one.clone(), one.clone(), one.clone()]).unwrap(),
            MoriDecomposition::Valid {
                coefficients: [Int::from(3), Int::from(2), Int::from(2), Int::from(2)]
            }
        );
        assert_eq!(
            mori_decompose_p13(&one, &[Int::from(2), Int::from(0), Int::from(0)]).unwrap(),
            MoriDecomposition::Rejected { index: 1 }
        );
        assert!(mori_decompose_p13(&Int::from(0), &[one.clone(), one.clone(), one]).is_err());
    }

    #[test]
    fn decompose_agrees_with_membership() {
        let p = preset(PresetModel::P13);
        for (d, m) in [
            (2i64, [1i64, 2, 0]),
            (4, [4, 1, 3]),
            (3, [0, 0, 0]),
            (1, [2, 0, 0]),
            (2, [0, 3, 1]),
        ] {
            let di = Int::from(d);
            let mi = [Int::from(m[0]), Int::from(m[1]), Int::from(m[2])];
            let v = cur(&[d, -m[0], -m[1], -m[2]]);
            let verdict = mori_decompose_p13(&di, &mi).unwrap();
            let membership = contains(&p.mori, &v, &p.lattices).unwrap();
            match (&verdict, &membership) {
                (MoriDecomposition::Valid { coefficients }, Containment::Yes { .. }) => {
                    // re-verify by arithmetic: d(L~-R1-R2-R3) + sum (d-mi) Ri
                    let [c0, c1, c2, c3] = coefficients.clone();
                    assert_eq!(
                        [
                            c0.clone(),
                            &c1 - &c0,
                            &c2 - &c0,
                            &c3 - &c0
                        ],
                        [di.clone(), -mi[0].clone(), -mi[1].clone(), -mi[2].clone()]
                    );
                }
                (MoriDecomposition::Rejected { .. }, Containment::No { .. }) => {}
                other => panic!("decomposition and membership disagree: {other:?}"),
            }
        }
    }

    #[test]
    fn duality_round_trip_on_presets() {
        for model in [PresetModel::P13, PresetModel::Dp6] {
            let p = preset(model);
            for cone in [&p.mori, &p.nef, &p.effective] {
                let dd = dual_cone(&dual_cone(cone, &p.lattices).unwrap(), &p.lattices).unwrap();
                assert!(cone_eq(&dd, cone), "round trip failed for {model:?}");
            }
        }
    }
}
