//! Command line front end: every calculator in the library behind one
//! executable with JSON-only output.
//!
//! Exit codes: 0 on success, 2 when the input is malformed, 3 when the
//! mathematics denies the request (the denial document still goes to
//! standard output). Diagnostics go to standard error only, so golden-file
//! diffs stay clean.

use std::collections::BTreeSet;
use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use fmckit::aut::{
    aut_connected, aut_structure, diagonal_stabilizer, group_order, AutVerdict, GroupOrder,
    SpaceDescriptor,
};
use fmckit::blowup::{
    canonical_discrepancies, picard_number, recursive_schedule, symmetric_schedule,
    ScheduleStyle, RHO_PRODUCT_ASSUMPTION,
};
use fmckit::chow::{pencil_classify_product, is_nef_product, PencilVerdict};
use fmckit::cone::{contains, dual_cone, extremal_rays, fano_test, Containment, LatticeTag};
use fmckit::fibration::{
    diagonal_preimage_profile, factor_curve_product, factor_forgetful, factor_product,
    modular_pencils, pencil_signature, CurveFactorization, ForgetfulFactorization,
    MorphismComponent, PencilDescriptor, ProfileVerdict,
};
use fmckit::perm::Permutation;
use fmckit::presets::{mori_decompose_p13, preset, MoriDecomposition, PresetModel};
use fmckit::proj::MobiusMap;
use fmckit::rational::int_to_json_number;
use fmckit::stable::{
    act_pair, act_sym, act_target, boundary_divisors, canonicalize, evaluate, forget, forget_map,
    moduli_dimension, validate, StableMapTree,
};
use fmckit::{Error, Int, Result};

#[derive(Parser)]
#[command(
    name = "fmckit",
    version,
    about = "Exact calculators for configuration spaces, cones, and stable maps"
)]
struct Cli {
    /// Indent the JSON output; key order is unchanged.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Picard number of the blown-up configuration space (module fmckit::blowup)
    Picard {
        /// Picard number of the base variety
        #[arg(long = "base-rho")]
        base_rho: u64,
        /// Dimension of the base variety
        #[arg(long = "base-dim")]
        base_dim: u64,
        /// Number of configuration points
        #[arg(long)]
        n: u64,
    },
    /// Blow-up schedule for the configuration space (module fmckit::blowup)
    Schedule {
        #[arg(long)]
        n: usize,
        /// Either "symmetric" or "recursive"
        #[arg(long)]
        style: String,
        /// When given, also report the canonical-class discrepancies for a
        /// base of this dimension
        #[arg(long = "base-dim")]
        base_dim: Option<u64>,
    },
    /// Pencil classification of a divisor on a product of lines (module fmckit::chow)
    Chow {
        /// Coefficients a_1,...,a_n of the class sum a_i h_i
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
    },
    /// Cone computations on the preset models (modules fmckit::cone, fmckit::presets)
    Cones {
        /// Preset model: "p13" or "dp6"
        #[arg(long)]
        preset: String,
        /// Coordinates of a class to test for membership
        #[arg(long, allow_hyphen_values = true)]
        contains: Option<String>,
        /// Cone to test against: "mori", "nef", or "effective"
        #[arg(long = "in-cone")]
        in_cone: Option<String>,
        /// p13 only: decompose d,m1,m2,m3 over the minimal Mori generators
        #[arg(long, allow_hyphen_values = true)]
        decompose: Option<String>,
    },
    /// Operations on stable map trees (module fmckit::stable)
    Stablemap {
        #[command(subcommand)]
        op: TreeOp,
    },
    /// Modular pencils, signatures, and diagonal profiles (module fmckit::fibration)
    Pencils {
        #[arg(long)]
        n: usize,
        /// JSON list of exactly three pencil descriptors to profile
        #[arg(long)]
        profile: Option<String>,
        /// JSON pencil descriptor whose class signature to print
        #[arg(long)]
        signature: Option<String>,
    },
    /// Factorization of forgetful and product morphisms (module fmckit::fibration)
    Factor {
        #[arg(long)]
        n: usize,
        /// Target size for the common forgetful factor
        #[arg(long)]
        r: Option<usize>,
        /// Remembered labels of the first forgetful map
        #[arg(long = "I")]
        remember_i: Option<String>,
        /// Remembered labels of the second forgetful map
        #[arg(long = "J")]
        remember_j: Option<String>,
        /// Curve mode: genus of the base curve
        #[arg(long)]
        genus: Option<u64>,
        /// Curve mode: chosen projection labels i_1,...,i_r
        #[arg(long)]
        chosen: Option<String>,
        /// Product mode: JSON list of pencil / forgetful components
        #[arg(long)]
        product: Option<String>,
    },
    /// Automorphism group structure of a moduli descriptor (module fmckit::aut)
    Aut {
        /// JSON space descriptor
        #[arg(long)]
        space: String,
        /// Report the connected component of the identity instead
        #[arg(long)]
        connected: bool,
        /// Also report the group order when it is computable
        #[arg(long)]
        order: bool,
    },
    /// Brute-force diagonal-preserving permutation tuples (module fmckit::aut)
    BruteforceDiag {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
    },
}

#[derive(Subcommand)]
enum TreeOp {
    /// List every violated invariant of the input tree
    Validate {
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// Canonical form of the input tree
    Canon {
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// Image of one marked point under the map
    Eval {
        #[arg(long)]
        label: usize,
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// Forget the given markings and stabilize
    Forget {
        #[arg(long)]
        labels: String,
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// Forget the map, keeping the stabilized marked curve
    ForgetMap {
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// Relabel markings by a permutation (images of 1..n)
    ActSym {
        #[arg(long)]
        perm: String,
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// Post-compose the map with a Moebius matrix a,b,c,d
    ActTarget {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// Move the two markings by separate Moebius matrices
    ActPair {
        #[arg(long, allow_hyphen_values = true)]
        nu1: String,
        #[arg(long, allow_hyphen_values = true)]
        nu2: String,
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// Expected dimension of the stable-map moduli space
    Dim {
        #[arg(long = "target-dim")]
        target_dim: u64,
        #[arg(long)]
        degree: u64,
        #[arg(long)]
        markings: u64,
    },
    /// Boundary divisors of the n-pointed space
    Boundary {
        #[arg(long)]
        n: usize,
    },
}

/// Success carries the exit code distinction between a positive answer (0)
/// and a mathematical denial (3).
struct Outcome {
    doc: Value,
    code: i32,
}

fn ok(doc: Value) -> Result<Outcome> {
    Ok(Outcome { doc, code: 0 })
}

fn denied(doc: Value) -> Result<Outcome> {
    Ok(Outcome { doc, code: 3 })
}

fn main() {
    if let Ok(threads) = std::env::var("FMCKIT_THREADS") {
        if let Ok(k) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build_global();
        }
    }
    let cli = Cli::parse();
    match dispatch(&cli.cmd) {
        Ok(outcome) => {
            emit(&outcome.doc, cli.pretty);
            std::process::exit(outcome.code);
        }
        Err(e) => {
            emit(&json!({ "error": e.to_string() }), cli.pretty);
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

fn emit(doc: &Value, pretty: bool) {
    let text = if pretty {
        serde_json::to_string_pretty(doc).expect("JSON value serializes")
    } else {
        serde_json::to_string(doc).expect("JSON value serializes")
    };
    println!("{text}");
}

fn dispatch(cmd: &Cmd) -> Result<Outcome> {
    match cmd {
        Cmd::Picard {
            base_rho,
            base_dim,
            n,
        } => {
            let rho = picard_number(*base_rho, *base_dim, *n)?;
            eprintln!("note: {RHO_PRODUCT_ASSUMPTION}");
            ok(json!({ "picard": int_to_json_number(&rho) }))
        }
        Cmd::Schedule { n, style, base_dim } => {
            let schedule = match style.as_str() {
                "symmetric" => symmetric_schedule(*n),
                "recursive" => recursive_schedule(*n),
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown style \"{other}\"; use symmetric or recursive"
                    )));
                }
            };
            debug_assert!(matches!(
                schedule.style,
                ScheduleStyle::Symmetric | ScheduleStyle::Recursive
            ));
            let mut doc = json!({
                "schedule": serde_json::to_value(&schedule).expect("schedule serializes"),
                "totalCenters": schedule.total_centers(),
            });
            if let Some(dim) = base_dim {
                let discrepancies = canonical_discrepancies(*dim, *n)?;
                doc["discrepancies"] =
                    serde_json::to_value(&discrepancies).expect("discrepancies serialize");
            }
            ok(doc)
        }
        Cmd::Chow { coeffs } => {
            let a = parse_int_list(coeffs)?;
            if a.is_empty() {
                return Err(Error::InvalidArgument("need at least one coefficient".into()));
            }
            let nef = is_nef_product(&a);
            match pencil_classify_product(&a) {
                PencilVerdict::FactorsThrough { factor, degree } => ok(json!({
                    "nef": nef,
                    "verdict": "pencil",
                    "factor": factor,
                    "degree": int_to_json_number(&degree),
                })),
                PencilVerdict::NotAPencil(reason) => denied(json!({
                    "nef": nef,
                    "verdict": "not-a-pencil",
                    "reason": reason.as_str(),
                })),
            }
        }
        Cmd::Cones {
            preset: model,
            contains: member,
            in_cone,
            decompose,
        } => run_cones(model, member.as_deref(), in_cone.as_deref(), decompose.as_deref()),
        Cmd::Stablemap { op } => run_tree_op(op),
        Cmd::Pencils {
            n,
            profile,
            signature,
        } => run_pencils(*n, profile.as_deref(), signature.as_deref()),
        Cmd::Factor {
            n,
            r,
            remember_i,
            remember_j,
            genus,
            chosen,
            product,
        } => run_factor(
            *n,
            *r,
            remember_i.as_deref(),
            remember_j.as_deref(),
            *genus,
            chosen.as_deref(),
            product.as_deref(),
        ),
        Cmd::Aut {
            space,
            connected,
            order,
        } => run_aut(space, *connected, *order),
        Cmd::BruteforceDiag { n, r } => {
            let st = diagonal_stabilizer(*n, *r)?;
            ok(json!({
                "n": n,
                "r": r,
                "order": st.tuples.len(),
                "verdict": st.verdict.as_str(),
                "tuples": serde_json::to_value(&st.tuples).expect("permutations serialize"),
            }))
        }
    }
}

fn run_cones(
    model: &str,
    member: Option<&str>,
    in_cone: Option<&str>,
    decompose: Option<&str>,
) -> Result<Outcome> {
    let p = preset(PresetModel::parse(model)?);

    if let Some(entries) = decompose {
        if p.model != PresetModel::P13 {
            return Err(Error::InvalidArgument(
                "--decompose is defined for the p13 preset only".into(),
            ));
        }
        let v = parse_int_list(entries)?;
        let [d, m1, m2, m3] = v.as_slice() else {
            return Err(Error::InvalidArgument(
                "--decompose needs exactly d,m1,m2,m3".into(),
            ));
        };
        return match mori_decompose_p13(d, &[m1.clone(), m2.clone(), m3.clone()])? {
            MoriDecomposition::Valid { coefficients } => ok(json!({
                "verdict": "valid",
                "coefficients": coefficients
                    .iter()
                    .map(int_to_json_number)
                    .collect::<Vec<_>>(),
            })),
            MoriDecomposition::Rejected { index } => denied(json!({
                "verdict": "rejected",
                "index": index,
            })),
        };
    }

    if let Some(coords) = member {
        let cone_name = in_cone.ok_or_else(|| {
            Error::InvalidArgument("--contains needs --in-cone mori|nef|effective".into())
        })?;
        let (cone, lattice) = match cone_name {
            "mori" => (&p.mori, LatticeTag::Curve),
            "nef" => (&p.nef, LatticeTag::Divisor),
            "effective" => (&p.effective, LatticeTag::Divisor),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown cone \"{other}\"; use mori, nef, or effective"
                )));
            }
        };
        let v = fmckit::cone::NumericalClass::new(lattice, parse_int_list(coords)?);
        return match contains(cone, &v, &p.lattices)? {
            Containment::Yes { coefficients } => ok(json!({
                "contained": true,
                "coefficients": coefficients
                    .iter()
                    .map(|c| Value::String(c.to_string()))
                    .collect::<Vec<_>>(),
            })),
            Containment::No { separator } => denied(json!({
                "contained": false,
                "separator": serde_json::to_value(&separator).expect("class serializes"),
            })),
        };
    }

    let nef_dual = dual_cone(&p.mori, &p.lattices)?;
    let rays = extremal_rays(&p.mori);
    let fano = fano_test(&p.lattices, &p.anticanonical(), &p.mori)?;
    ok(json!({
        "model": p.model.as_str(),
        "mori": serde_json::to_value(&p.mori).expect("cone serializes"),
        "moriExtremalRays": serde_json::to_value(&rays).expect("cone serializes"),
        "nef": serde_json::to_value(&nef_dual).expect("cone serializes"),
        "effective": serde_json::to_value(&p.effective).expect("cone serializes"),
        "fano": {
            "isFano": fano.is_fano,
            "table": fano
                .table
                .iter()
                .map(|row| json!({
                    "ray": row.ray.iter().map(int_to_json_number).collect::<Vec<_>>(),
                    "value": int_to_json_number(&row.value),
                }))
                .collect::<Vec<_>>(),
        },
    }))
}

fn run_tree_op(op: &TreeOp) -> Result<Outcome> {
    match op {
        TreeOp::Validate { input } => {
            let t = read_tree(input)?;
            let violations = validate(&t);
            if violations.is_empty() {
                ok(json!({ "valid": true }))
            } else {
                denied(json!({
                    "valid": false,
                    "violations": violations
                        .iter()
                        .map(|v| Value::String(v.to_string()))
                        .collect::<Vec<_>>(),
                }))
            }
        }
        TreeOp::Canon { input } => {
            let t = read_tree(input)?;
            ok(canonicalize(&t)?.to_json())
        }
        TreeOp::Eval { label, input } => {
            let t = read_tree(input)?;
            let pt = evaluate(&t, *label)?;
            ok(json!({ "label": label, "point": pt.to_json() }))
        }
        TreeOp::Forget { labels, input } => {
            let t = read_tree(input)?;
            let drop: BTreeSet<usize> = parse_usize_list(labels)?.into_iter().collect();
            ok(forget(&t, &drop)?.to_json())
        }
        TreeOp::ForgetMap { input } => {
            let t = read_tree(input)?;
            ok(forget_map(&t)?.to_json())
        }
        TreeOp::ActSym { perm, input } => {
            let t = read_tree(input)?;
            let sigma = Permutation::new(parse_usize_list(perm)?)?;
            ok(act_sym(&t, &sigma)?.to_json())
        }
        TreeOp::ActTarget { matrix, input } => {
            let t = read_tree(input)?;
            let mu = parse_mobius(matrix)?;
            ok(act_target(&t, &mu)?.to_json())
        }
        TreeOp::ActPair { nu1, nu2, input } => {
            let t = read_tree(input)?;
            let n1 = parse_mobius(nu1)?;
            let n2 = parse_mobius(nu2)?;
            ok(act_pair(&t, &n1, &n2)?.to_json())
        }
        TreeOp::Dim {
            target_dim,
            degree,
            markings,
        } => {
            let dim = moduli_dimension(*target_dim, *degree, *markings)?;
            ok(json!({ "dimension": dim }))
        }
        TreeOp::Boundary { n } => {
            let divisors = boundary_divisors(*n)?;
            ok(json!({
                "count": divisors.len(),
                "subsets": serde_json::to_value(&divisors).expect("subsets serialize"),
            }))
        }
    }
}

fn run_pencils(n: usize, profile: Option<&str>, signature: Option<&str>) -> Result<Outcome> {
    if let Some(triple) = profile {
        let v: Value = serde_json::from_str(triple)
            .map_err(|e| Error::InvalidArgument(format!("profile is not JSON: {e}")))?;
        let arr = v
            .as_array()
            .filter(|a| a.len() == 3)
            .ok_or_else(|| {
                Error::InvalidArgument("profile needs a JSON list of three descriptors".into())
            })?;
        let descriptors = [
            PencilDescriptor::from_json(n, &arr[0])?,
            PencilDescriptor::from_json(n, &arr[1])?,
            PencilDescriptor::from_json(n, &arr[2])?,
        ];
        let prof = diagonal_preimage_profile(n, &descriptors)?;
        let components: Vec<Value> = prof
            .components
            .iter()
            .map(|c| json!({ "description": c.description, "codimension": c.codimension }))
            .collect();
        return match prof.verdict {
            ProfileVerdict::Admissible => ok(json!({
                "verdict": "admissible",
                "components": components,
            })),
            ProfileVerdict::Obstructed { witness } => denied(json!({
                "verdict": "obstructed",
                "witness": witness,
                "components": components,
            })),
        };
    }
    if let Some(descriptor) = signature {
        let v: Value = serde_json::from_str(descriptor)
            .map_err(|e| Error::InvalidArgument(format!("descriptor is not JSON: {e}")))?;
        let p = PencilDescriptor::from_json(n, &v)?;
        return ok(pencil_signature(&p, n)?.to_json());
    }
    let pencils = modular_pencils(n)?;
    ok(json!({
        "n": n,
        "count": pencils.len(),
        "pencils": pencils.iter().map(PencilDescriptor::to_json).collect::<Vec<_>>(),
    }))
}

#[allow(clippy::too_many_arguments)]
fn run_factor(
    n: usize,
    r: Option<usize>,
    remember_i: Option<&str>,
    remember_j: Option<&str>,
    genus: Option<u64>,
    chosen: Option<&str>,
    product: Option<&str>,
) -> Result<Outcome> {
    if let (Some(i), Some(j)) = (remember_i, remember_j) {
        let r = r.ok_or_else(|| {
            Error::InvalidArgument("forgetful factorization needs --r".into())
        })?;
        let i = fmckit::IndexSubset::new(n, parse_usize_list(i)?)?;
        let j = fmckit::IndexSubset::new(n, parse_usize_list(j)?)?;
        return match factor_forgetful(n, r, &i, &j)? {
            ForgetfulFactorization::Factors(f) => ok(json!({
                "verdict": "factors",
                "forgotten": f.forgotten().members(),
                "target": f.target(),
            })),
            ForgetfulFactorization::Obstructed => denied(json!({ "verdict": "obstructed" })),
        };
    }
    if let Some(g) = genus {
        let chosen = parse_usize_list(chosen.ok_or_else(|| {
            Error::InvalidArgument("curve factorization needs --chosen".into())
        })?)?;
        let r = r.unwrap_or(chosen.len());
        return match factor_curve_product(g, n, r, &chosen)? {
            CurveFactorization::Product(p) => ok(json!({
                "verdict": "product",
                "chosen": p.chosen,
                "viaBlowdown": p.via_blowdown,
            })),
            CurveFactorization::NotDominant { repeated_index } => denied(json!({
                "verdict": "not-dominant",
                "repeated": repeated_index,
            })),
            CurveFactorization::Unsupported { reason } => denied(json!({
                "verdict": "unsupported",
                "reason": reason,
            })),
        };
    }
    if let Some(components) = product {
        let v: Value = serde_json::from_str(components)
            .map_err(|e| Error::InvalidArgument(format!("product is not JSON: {e}")))?;
        let arr = v
            .as_array()
            .ok_or_else(|| Error::InvalidArgument("product needs a JSON list".into()))?;
        let parsed = arr
            .iter()
            .map(|c| MorphismComponent::from_json(n, c))
            .collect::<Result<Vec<_>>>()?;
        let report = factor_product(n, &parsed)?;
        return ok(json!({
            "factors": report
                .factors
                .iter()
                .map(MorphismComponent::to_json)
                .collect::<Vec<_>>(),
            "piOnly": report.pi_only,
        }));
    }
    Err(Error::InvalidArgument(
        "factor needs --I/--J, or --genus/--chosen, or --product".into(),
    ))
}

fn run_aut(space: &str, connected: bool, order: bool) -> Result<Outcome> {
    let v: Value = serde_json::from_str(space)
        .map_err(|e| Error::InvalidArgument(format!("space is not JSON: {e}")))?;
    let s = SpaceDescriptor::from_json(&v)?;
    let verdict = if connected {
        aut_connected(&s)
    } else {
        aut_structure(&s)
    };
    let (expr, conjectural) = match verdict {
        AutVerdict::Structure(g) => (g, false),
        AutVerdict::Conjectural(g) => (g, true),
        AutVerdict::Unsupported { reason } => {
            return denied(json!({ "verdict": "unsupported", "reason": reason }));
        }
    };
    let mut doc = serde_json::Map::new();
    doc.insert("structure".into(), Value::String(expr.to_string()));
    if conjectural {
        doc.insert("conjectural".into(), Value::Bool(true));
    }
    if order {
        let o = match group_order(&expr) {
            GroupOrder::Finite(x) => Value::Number(int_to_json_number(&x)),
            GroupOrder::Infinite => Value::String("infinite".into()),
            GroupOrder::Unknown => Value::String("unknown".into()),
        };
        doc.insert("order".into(), o);
    }
    ok(Value::Object(doc))
}

fn read_tree(input: &Option<PathBuf>) -> Result<StableMapTree> {
    let text = match input {
        Some(path) => std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidArgument(format!("cannot read {}: {e}", path.display()))
        })?,
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Error::InvalidArgument(format!("cannot read stdin: {e}")))?;
            buf
        }
    };
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidArgument(format!("tree is not JSON: {e}")))?;
    StableMapTree::from_json(&v)
}

fn parse_int_list(s: &str) -> Result<Vec<Int>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<Int>()
                .map_err(|_| Error::InvalidArgument(format!("\"{t}\" is not an integer")))
        })
        .collect()
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("\"{t}\" is not a label")))
        })
        .collect()
}

fn parse_mobius(s: &str) -> Result<MobiusMap> {
    let v = parse_int_list(s)?;
    let [a, b, c, d] = v.as_slice() else {
        return Err(Error::InvalidArgument(
            "a Moebius matrix needs exactly a,b,c,d".into(),
        ));
    };
    MobiusMap::new(a.clone(), b.clone(), c.clone(), d.clone())
}
