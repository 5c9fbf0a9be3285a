//! Coordinate-level trees of rational curves mapping to the line with
//! degree one: validation, normal forms, evaluation, forgetful maps, and
//! the three group actions on marked trees.
//!
//! A tree holds numbered components; one component (the framed one) carries
//! the degree-1 map, stored as a Moebius matrix, and every other component
//! is contracted. Isomorphism classes are compared through canonical forms,
//! so equality is always decidable and exact.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Serialize, Serializer};

use crate::perm::Permutation;
use crate::proj::{three_point_map, MobiusMap, ProjPoint};
use crate::rational::Int;
use crate::subsets::{subsets, IndexSubset};
use crate::{Error, Result};

/// A location on the tree: component id plus a point on that component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attach {
    pub component: usize,
    pub point: ProjPoint,
}

impl Attach {
    pub fn new(component: usize, point: ProjPoint) -> Self {
        Attach { component, point }
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(vec![
            serde_json::Value::from(self.component),
            self.point.to_json(),
        ])
    }
}

/// A node of the domain curve: two attachment points on distinct
/// components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: Attach,
    pub b: Attach,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableMapTree {
    pub component_count: usize,
    pub edges: Vec<Edge>,
    /// Marking label -> location. Labels survive forgetful maps unchanged.
    pub markings: BTreeMap<usize, Attach>,
    pub framed: usize,
    pub frame: MobiusMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableCurveTree {
    pub component_count: usize,
    pub edges: Vec<Edge>,
    pub markings: BTreeMap<usize, Attach>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    BadReference(String),
    SelfLoop { component: usize },
    NotATree,
    DuplicateSpecialPoint { component: usize },
    Unstable { component: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::BadReference(what) => write!(f, "bad reference: {what}"),
            Violation::SelfLoop { component } => {
                write!(f, "edge attaches component {component} to itself")
            }
            Violation::NotATree => write!(f, "component graph is not a connected tree"),
            Violation::DuplicateSpecialPoint { component } => {
                write!(f, "repeated special point on component {component}")
            }
            Violation::Unstable { component } => {
                write!(f, "component {component} has fewer than three special points")
            }
        }
    }
}

/// Frame-free skeleton shared by both tree kinds.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Skeleton {
    count: usize,
    edges: Vec<Edge>,
    markings: BTreeMap<usize, Attach>,
}

impl Skeleton {
    fn special_points(&self, c: usize) -> Vec<ProjPoint> {
        let mut pts = Vec::new();
        for e in &self.edges {
            if e.a.component == c {
                pts.push(e.a.point.clone());
            }
            if e.b.component == c {
                pts.push(e.b.point.clone());
            }
        }
        for m in self.markings.values() {
            if m.component == c {
                pts.push(m.point.clone());
            }
        }
        pts
    }

    fn edge_degree(&self, c: usize) -> usize {
        self.edges
            .iter()
            .map(|e| {
                usize::from(e.a.component == c) + usize::from(e.b.component == c)
            })
            .sum()
    }

    fn marking_labels_on(&self, c: usize) -> Vec<usize> {
        self.markings
            .iter()
            .filter(|(_, m)| m.component == c)
            .map(|(&l, _)| l)
            .collect()
    }

    fn structural_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.count == 0 {
            out.push(Violation::BadReference("tree has no components".into()));
            return out;
        }
        for e in &self.edges {
            for end in [&e.a, &e.b] {
                if end.component >= self.count {
                    out.push(Violation::BadReference(format!(
                        "edge touches missing component {}",
                        end.component
                    )));
                }
            }
        }
        for (label, m) in &self.markings {
            if m.component >= self.count {
                out.push(Violation::BadReference(format!(
                    "marking {label} sits on missing component {}",
                    m.component
                )));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for e in &self.edges {
            if e.a.component == e.b.component {
                out.push(Violation::SelfLoop {
                    component: e.a.component,
                });
            }
        }
        if !self.is_connected_tree() {
            out.push(Violation::NotATree);
        }
        for c in 0..self.count {
            let pts = self.special_points(c);
            let distinct: BTreeSet<_> = pts.iter().cloned().collect();
            if distinct.len() != pts.len() {
                out.push(Violation::DuplicateSpecialPoint { component: c });
            }
        }
        out
    }

    fn is_connected_tree(&self) -> bool {
        if self.edges.len() + 1 != self.count {
            return false;
        }
        let mut seen = vec![false; self.count];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(c) = stack.pop() {
            for e in &self.edges {
                for (here, there) in [(&e.a, &e.b), (&e.b, &e.a)] {
                    if here.component == c && !seen[there.component] {
                        seen[there.component] = true;
                        stack.push(there.component);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Parent component of each node when rooted at `root`; the root maps
    /// to itself. Also returns, per component, the attachment of the parent
    /// edge on the component itself and on the parent.
    fn rooted(&self, root: usize) -> RootedView {
        let mut parent = vec![usize::MAX; self.count];
        let mut up_here: Vec<Option<ProjPoint>> = vec![None; self.count];
        let mut up_there: Vec<Option<ProjPoint>> = vec![None; self.count];
        parent[root] = root;
        let mut stack = vec![root];
        while let Some(c) = stack.pop() {
            for e in &self.edges {
                for (here, there) in [(&e.a, &e.b), (&e.b, &e.a)] {
                    if here.component == c && parent[there.component] == usize::MAX {
                        parent[there.component] = c;
                        up_here[there.component] = Some(there.point.clone());
                        up_there[there.component] = Some(here.point.clone());
                        stack.push(there.component);
                    }
                }
            }
        }
        // smallest marking label reachable inside each subtree
        let mut min_label = vec![usize::MAX; self.count];
        let order = {
            // process deepest-first by repeated sweeps (trees are tiny)
            let mut depth = vec![0usize; self.count];
            for (c, d) in depth.iter_mut().enumerate() {
                let mut x = c;
                while parent[x] != x {
                    *d += 1;
                    x = parent[x];
                }
            }
            let mut idx: Vec<usize> = (0..self.count).collect();
            idx.sort_by_key(|&c| std::cmp::Reverse(depth[c]));
            idx
        };
        for (&label, m) in &self.markings {
            if min_label[m.component] > label {
                min_label[m.component] = label;
            }
        }
        for &c in &order {
            if parent[c] != c {
                let p = parent[c];
                if min_label[p] > min_label[c] {
                    min_label[p] = min_label[c];
                }
            }
        }
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); self.count];
        for c in 0..self.count {
            if parent[c] != c {
                children[parent[c]].push(c);
            }
        }
        for ch in &mut children {
            ch.sort_by_key(|&c| (min_label[c], c));
        }
        RootedView {
            parent,
            children,
            up_here,
            up_there,
        }
    }

    fn apply_on_component(&mut self, c: usize, map: &MobiusMap) {
        for e in &mut self.edges {
            for end in [&mut e.a, &mut e.b] {
                if end.component == c {
                    end.point = map.apply(&end.point);
                }
            }
        }
        for m in self.markings.values_mut() {
            if m.component == c {
                m.point = map.apply(&m.point);
            }
        }
    }

    /// Reparametrizes every component other than the root (and the root too
    /// when asked) so its three leading special points become (1:0), (0:1),
    /// (1:1), then renumbers components in preorder and sorts edges.
    fn canonical_form(mut self, root: usize, normalize_root: bool) -> Result<Skeleton> {
        let view = self.rooted(root);
        for c in 0..self.count {
            if c == root && !normalize_root {
                continue;
            }
            let mut leading: Vec<ProjPoint> = Vec::new();
            if let Some(up) = &view.up_here[c] {
                leading.push(up.clone());
            }
            let mut labels = self.marking_labels_on(c);
            labels.sort_unstable();
            for l in labels {
                leading.push(self.markings[&l].point.clone());
            }
            for &ch in &view.children[c] {
                leading.push(
                    view.up_there[ch]
                        .clone()
                        .expect("child has a parent edge"),
                );
            }
            if leading.len() < 3 {
                return Err(Error::InvalidArgument(
                    "cannot normalize an unstable component".into(),
                ));
            }
            let g = three_point_map(&leading[0], &leading[1], &leading[2])?;
            self.apply_on_component(c, &g.inverse());
        }
        // preorder renumbering; children keep their label-based order
        let view = self.rooted(root);
        let mut new_id = vec![usize::MAX; self.count];
        let mut next = 0usize;
        let mut stack = vec![root];
        while let Some(c) = stack.pop() {
            new_id[c] = next;
            next += 1;
            for &ch in view.children[c].iter().rev() {
                stack.push(ch);
            }
        }
        let mut edges: Vec<Edge> = Vec::new();
        for c in 0..self.count {
            if view.parent[c] == c {
                continue;
            }
            edges.push(Edge {
                a: Attach::new(
                    new_id[view.parent[c]],
                    view.up_there[c].clone().expect("parent edge"),
                ),
                b: Attach::new(new_id[c], view.up_here[c].clone().expect("parent edge")),
            });
        }
        edges.sort_by(|x, y| {
            (x.a.component, x.b.component).cmp(&(y.a.component, y.b.component))
        });
        let markings = self
            .markings
            .into_iter()
            .map(|(l, m)| (l, Attach::new(new_id[m.component], m.point)))
            .collect();
        Ok(Skeleton {
            count: self.count,
            edges,
            markings,
        })
    }
}

struct RootedView {
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
    /// Attachment of the parent edge in the component's own coordinates.
    up_here: Vec<Option<ProjPoint>>,
    /// Attachment of the parent edge on the parent component.
    up_there: Vec<Option<ProjPoint>>,
}

impl StableMapTree {
    /// Smooth tree: one framed component carrying all markings.
    pub fn smooth(markings: Vec<(usize, ProjPoint)>, frame: MobiusMap) -> Self {
        StableMapTree {
            component_count: 1,
            edges: Vec::new(),
            markings: markings
                .into_iter()
                .map(|(l, p)| (l, Attach::new(0, p)))
                .collect(),
            framed: 0,
            frame,
        }
    }

    pub fn n(&self) -> usize {
        self.markings.len()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.markings.keys().copied().collect()
    }

    fn skeleton(&self) -> Skeleton {
        Skeleton {
            count: self.component_count,
            edges: self.edges.clone(),
            markings: self.markings.clone(),
        }
    }
}

impl StableCurveTree {
    pub fn n(&self) -> usize {
        self.markings.len()
    }
}

/// Every violated invariant of the tree; empty means valid.
pub fn validate(t: &StableMapTree) -> Vec<Violation> {
    let skel = t.skeleton();
    let mut out = skel.structural_violations();
    if t.framed >= t.component_count {
        out.push(Violation::BadReference(format!(
            "framed component {} does not exist",
            t.framed
        )));
        return out;
    }
    if out.iter().any(|v| matches!(v, Violation::BadReference(_))) {
        return out;
    }
    for c in 0..t.component_count {
        if c != t.framed && skel.special_points(c).len() < 3 {
            out.push(Violation::Unstable { component: c });
        }
    }
    out
}

pub fn validate_curve(t: &StableCurveTree) -> Vec<Violation> {
    let skel = Skeleton {
        count: t.component_count,
        edges: t.edges.clone(),
        markings: t.markings.clone(),
    };
    let mut out = skel.structural_violations();
    if out.iter().any(|v| matches!(v, Violation::BadReference(_))) {
        return out;
    }
    for c in 0..t.component_count {
        if skel.special_points(c).len() < 3 {
            out.push(Violation::Unstable { component: c });
        }
    }
    out
}

pub fn is_valid(t: &StableMapTree) -> bool {
    validate(t).is_empty()
}

/// Normal form: identity frame, framed component first, contracted
/// components pinned by their three leading special points, preorder ids.
/// Isomorphic trees have equal canonical forms.
pub fn canonicalize(t: &StableMapTree) -> Result<StableMapTree> {
    let mut skel = t.skeleton();
    skel.apply_on_component(t.framed, &t.frame);
    let skel = skel.canonical_form(t.framed, false)?;
    Ok(StableMapTree {
        component_count: skel.count,
        edges: skel.edges,
        markings: skel.markings,
        framed: 0,
        frame: MobiusMap::identity(),
    })
}

pub fn canonicalize_curve(t: &StableCurveTree) -> Result<StableCurveTree> {
    // root at the component holding the smallest label
    let root = t
        .markings
        .iter()
        .min_by_key(|(l, _)| **l)
        .map(|(_, m)| m.component)
        .unwrap_or(0);
    let skel = Skeleton {
        count: t.component_count,
        edges: t.edges.clone(),
        markings: t.markings.clone(),
    }
    .canonical_form(root, true)?;
    Ok(StableCurveTree {
        component_count: skel.count,
        edges: skel.edges,
        markings: skel.markings,
    })
}

/// Image of the i-th marked point under the map: its own coordinate on the
/// framed component, or the node where its subtree meets the framed one.
pub fn evaluate(t: &StableMapTree, label: usize) -> Result<ProjPoint> {
    let m = t
        .markings
        .get(&label)
        .ok_or_else(|| Error::UnknownLabel(format!("marking {label}")))?;
    if m.component == t.framed {
        return Ok(t.frame.apply(&m.point));
    }
    let skel = t.skeleton();
    let view = skel.rooted(t.framed);
    let mut c = m.component;
    while view.parent[c] != t.framed {
        c = view.parent[c];
        if view.parent[c] == c {
            return Err(Error::InvalidArgument(
                "marking is disconnected from the framed component".into(),
            ));
        }
    }
    let node = view.up_there[c]
        .clone()
        .expect("non-root component has a parent edge");
    Ok(t.frame.apply(&node))
}

enum StabilizeMode {
    /// The framed component is exempt from the three-point rule.
    Map { framed: usize },
    Curve,
}

/// Contracts unstable components smallest-id-first until none remain.
/// Returns the stabilized skeleton and the surviving id of the protected
/// component (for map mode).
fn stabilize(mut skel: Skeleton, mode: StabilizeMode) -> Result<(Skeleton, usize)> {
    let mut protected = match mode {
        StabilizeMode::Map { framed } => Some(framed),
        StabilizeMode::Curve => None,
    };
    loop {
        if skel.count == 1 {
            break;
        }
        let unstable = (0..skel.count).find(|&c| {
            Some(c) != protected && skel.special_points(c).len() < 3
        });
        let Some(c) = unstable else { break };
        let degree = skel.edge_degree(c);
        let labels = skel.marking_labels_on(c);
        match (degree, labels.len()) {
            (2, 0) => {
                // smooth the node: fuse the two edges through c
                let mut far: Vec<Attach> = Vec::new();
                skel.edges.retain(|e| {
                    if e.a.component == c {
                        far.push(e.b.clone());
                        false
                    } else if e.b.component == c {
                        far.push(e.a.clone());
                        false
                    } else {
                        true
                    }
                });
                debug_assert_eq!(far.len(), 2);
                let b = far.pop().expect("two incident edges");
                let a = far.pop().expect("two incident edges");
                skel.edges.push(Edge { a, b });
            }
            (1, 0) | (1, 1) => {
                // drop the component; a lone marking relocates to the node
                let mut far: Option<Attach> = None;
                skel.edges.retain(|e| {
                    if e.a.component == c {
                        far = Some(e.b.clone());
                        false
                    } else if e.b.component == c {
                        far = Some(e.a.clone());
                        false
                    } else {
                        true
                    }
                });
                let far = far.expect("one incident edge");
                for l in labels {
                    skel.markings.insert(l, far.clone());
                }
            }
            _ => {
                return Err(Error::InvalidArgument(
                    "component cannot be stabilized".into(),
                ));
            }
        }
        // compact ids
        for e in &mut skel.edges {
            for end in [&mut e.a, &mut e.b] {
                debug_assert_ne!(end.component, c);
                if end.component > c {
                    end.component -= 1;
                }
            }
        }
        for m in skel.markings.values_mut() {
            if m.component > c {
                m.component -= 1;
            }
        }
        if let Some(f) = protected {
            debug_assert_ne!(f, c);
            if f > c {
                protected = Some(f - 1);
            }
        }
        skel.count -= 1;
    }
    Ok((skel, protected.unwrap_or(0)))
}

/// Removes the markings in `drop` and stabilizes. `drop` must be a proper
/// subset of the present labels.
pub fn forget(t: &StableMapTree, drop: &BTreeSet<usize>) -> Result<StableMapTree> {
    let labels: BTreeSet<usize> = t.markings.keys().copied().collect();
    if !drop.is_subset(&labels) {
        return Err(Error::UnknownLabel(
            "forgetting a label that is not present".into(),
        ));
    }
    if drop.len() == labels.len() {
        return Err(Error::InvalidArgument(
            "cannot forget every marking".into(),
        ));
    }
    let mut skel = t.skeleton();
    skel.markings.retain(|l, _| !drop.contains(l));
    let (skel, framed) = stabilize(skel, StabilizeMode::Map { framed: t.framed })?;
    canonicalize(&StableMapTree {
        component_count: skel.count,
        edges: skel.edges,
        markings: skel.markings,
        framed,
        frame: t.frame.clone(),
    })
}

/// Forgets the map itself, keeping the stabilized marked domain curve.
pub fn forget_map(t: &StableMapTree) -> Result<StableCurveTree> {
    if t.n() < 3 {
        return Err(Error::InvalidArgument(format!(
            "the underlying curve is only stable for n >= 3, got n = {}",
            t.n()
        )));
    }
    let (skel, _) = stabilize(t.skeleton(), StabilizeMode::Curve)?;
    canonicalize_curve(&StableCurveTree {
        component_count: skel.count,
        edges: skel.edges,
        markings: skel.markings,
    })
}

/// Marking relabelling: the new i-th marking is the old sigma(i)-th one.
pub fn act_sym(t: &StableMapTree, sigma: &Permutation) -> Result<StableMapTree> {
    let n = t.n();
    if sigma.degree() != n {
        return Err(Error::DimensionMismatch(format!(
            "permutation degree {} on a tree with {} markings",
            sigma.degree(),
            n
        )));
    }
    let labels = t.labels();
    if labels != (1..=n).collect::<Vec<_>>() {
        return Err(Error::InvalidArgument(
            "relabelling needs marking labels exactly 1..n".into(),
        ));
    }
    let markings = (1..=n)
        .map(|i| (i, t.markings[&sigma.apply(i)].clone()))
        .collect();
    canonicalize(&StableMapTree {
        component_count: t.component_count,
        edges: t.edges.clone(),
        markings,
        framed: t.framed,
        frame: t.frame.clone(),
    })
}

/// Post-composition of the map with mu.
pub fn act_target(t: &StableMapTree, mu: &MobiusMap) -> Result<StableMapTree> {
    let mut c = canonicalize(t)?;
    let mut skel = c.skeleton();
    skel.apply_on_component(c.framed, mu);
    c.edges = skel.edges;
    c.markings = skel.markings;
    Ok(c)
}

/// The two-marked action moving each marking by its own transformation,
/// with the bubble appearing or disappearing as the images collide or
/// separate.
pub fn act_pair(t: &StableMapTree, nu1: &MobiusMap, nu2: &MobiusMap) -> Result<StableMapTree> {
    if t.n() != 2 || t.labels() != vec![1, 2] {
        return Err(Error::InvalidArgument(
            "the pair action needs markings exactly {1, 2}".into(),
        ));
    }
    let violations = validate(t);
    if !violations.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "invalid tree: {}",
            violations[0]
        )));
    }
    let c = canonicalize(t)?;
    if c.component_count == 1 {
        let x1 = &c.markings[&1].point;
        let x2 = &c.markings[&2].point;
        let y1 = nu1.apply(x1);
        let y2 = nu2.apply(x2);
        if y1 != y2 {
            Ok(StableMapTree::smooth(
                vec![(1, y1), (2, y2)],
                MobiusMap::identity(),
            ))
        } else {
            Ok(two_marked_bubble(y1))
        }
    } else {
        // canonical two-component tree: framed 0, bubble 1 with both
        // markings, node on the framed side at edge.a
        let x = &c.edges[0].a.point;
        let y1 = nu1.apply(x);
        let y2 = nu2.apply(x);
        if y1 == y2 {
            Ok(two_marked_bubble(y1))
        } else {
            Ok(StableMapTree::smooth(
                vec![(1, y1), (2, y2)],
                MobiusMap::identity(),
            ))
        }
    }
}

/// The boundary point of the two-marked space: both markings on a bubble
/// attached at `node`. Built directly in canonical form.
fn two_marked_bubble(node: ProjPoint) -> StableMapTree {
    StableMapTree {
        component_count: 2,
        edges: vec![Edge {
            a: Attach::new(0, node),
            b: Attach::new(1, ProjPoint::infinity()),
        }],
        markings: BTreeMap::from([
            (1, Attach::new(1, ProjPoint::zero())),
            (2, Attach::new(1, ProjPoint::one())),
        ]),
        framed: 0,
        frame: MobiusMap::identity(),
    }
}

/// Expected dimension of the space of n-marked degree-d genus-0 maps to
/// projective N-space.
pub fn moduli_dimension(big_n: u64, d: u64, n: u64) -> Result<i64> {
    if big_n < 1 {
        return Err(Error::InvalidArgument(
            "target dimension must be at least 1".into(),
        ));
    }
    Ok((big_n + d * (big_n + 1) + n) as i64 - 3)
}

/// The boundary strata with a prescribed contracted subtree: one divisor
/// per label subset of size at least two.
pub fn boundary_divisors(n: usize) -> Result<Vec<IndexSubset>> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "boundary divisors need n >= 2".into(),
        ));
    }
    subsets(n, 2, n)
}

impl StableMapTree {
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        map.insert("n".into(), serde_json::Value::from(self.n()));
        map.insert(
            "components".into(),
            serde_json::Value::Array(
                (0..self.component_count)
                    .map(serde_json::Value::from)
                    .collect(),
            ),
        );
        map.insert(
            "edges".into(),
            serde_json::Value::Array(
                self.edges
                    .iter()
                    .map(|e| {
                        let mut edge = serde_json::Map::new();
                        edge.insert("a".into(), e.a.to_json());
                        edge.insert("b".into(), e.b.to_json());
                        serde_json::Value::Object(edge)
                    })
                    .collect(),
            ),
        );
        let mut marks = serde_json::Map::new();
        for (l, m) in &self.markings {
            marks.insert(l.to_string(), m.to_json());
        }
        map.insert("markings".into(), serde_json::Value::Object(marks));
        map.insert("framed".into(), serde_json::Value::from(self.framed));
        map.insert("frame".into(), self.frame.to_json());
        serde_json::Value::Object(map)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::InvalidArgument("tree JSON must be an object".into()))?;
        let components = obj
            .get("components")
            .and_then(serde_json::Value::as_array)
            .ok_or_else(|| Error::InvalidArgument("missing components array".into()))?;
        let component_count = components.len();
        let mut edges = Vec::new();
        if let Some(es) = obj.get("edges") {
            for e in es
                .as_array()
                .ok_or_else(|| Error::InvalidArgument("edges must be an array".into()))?
            {
                let a = e
                    .get("a")
                    .ok_or_else(|| Error::InvalidArgument("edge missing side a".into()))?;
                let b = e
                    .get("b")
                    .ok_or_else(|| Error::InvalidArgument("edge missing side b".into()))?;
                edges.push(Edge {
                    a: attach_from_json(a)?,
                    b: attach_from_json(b)?,
                });
            }
        }
        let mut markings = BTreeMap::new();
        if let Some(ms) = obj.get("markings") {
            let ms = ms
                .as_object()
                .ok_or_else(|| Error::InvalidArgument("markings must be an object".into()))?;
            for (k, m) in ms {
                let label: usize = k.parse().map_err(|_| {
                    Error::InvalidArgument(format!("marking label {k} is not a number"))
                })?;
                markings.insert(label, attach_from_json(m)?);
            }
        }
        let framed = obj
            .get("framed")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::InvalidArgument("missing framed component id".into()))?
            as usize;
        let frame = mobius_from_json(
            obj.get("frame")
                .ok_or_else(|| Error::InvalidArgument("missing frame".into()))?,
        )?;
        Ok(StableMapTree {
            component_count,
            edges,
            markings,
            framed,
            frame,
        })
    }
}

impl StableCurveTree {
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        map.insert("n".into(), serde_json::Value::from(self.n()));
        map.insert(
            "components".into(),
            serde_json::Value::Array(
                (0..self.component_count)
                    .map(serde_json::Value::from)
                    .collect(),
            ),
        );
        map.insert(
            "edges".into(),
            serde_json::Value::Array(
                self.edges
                    .iter()
                    .map(|e| {
                        let mut edge = serde_json::Map::new();
                        edge.insert("a".into(), e.a.to_json());
                        edge.insert("b".into(), e.b.to_json());
                        serde_json::Value::Object(edge)
                    })
                    .collect(),
            ),
        );
        let mut marks = serde_json::Map::new();
        for (l, m) in &self.markings {
            marks.insert(l.to_string(), m.to_json());
        }
        map.insert("markings".into(), serde_json::Value::Object(marks));
        serde_json::Value::Object(map)
    }
}

impl Serialize for StableMapTree {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl Serialize for StableCurveTree {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

fn int_from_json(v: &serde_json::Value) -> Result<Int> {
    let n = v
        .as_number()
        .ok_or_else(|| Error::InvalidArgument(format!("expected a number, got {v}")))?;
    let s = n.to_string();
    s.parse()
        .map_err(|_| Error::InvalidArgument(format!("expected an integer, got {s}")))
}

fn point_from_json(v: &serde_json::Value) -> Result<ProjPoint> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::InvalidArgument("point must be a [p, q] pair".into()))?;
    ProjPoint::new(int_from_json(&arr[0])?, int_from_json(&arr[1])?)
}

fn attach_from_json(v: &serde_json::Value) -> Result<Attach> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::InvalidArgument("attachment must be [cid, [p, q]]".into()))?;
    let cid = arr[0]
        .as_u64()
        .ok_or_else(|| Error::InvalidArgument("component id must be a number".into()))?;
    Ok(Attach::new(cid as usize, point_from_json(&arr[1])?))
}

fn mobius_from_json(v: &serde_json::Value) -> Result<MobiusMap> {
    let rows = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::InvalidArgument("frame must be [[a,b],[c,d]]".into()))?;
    let mut entries = Vec::with_capacity(4);
    for row in rows {
        let row = row
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::InvalidArgument("frame must be [[a,b],[c,d]]".into()))?;
        entries.push(int_from_json(&row[0])?);
        entries.push(int_from_json(&row[1])?);
    }
    let d = entries.pop().expect("four entries");
    let c = entries.pop().expect("four entries");
    let b = entries.pop().expect("four entries");
    let a = entries.pop().expect("four entries");
    MobiusMap::new(a, b, c, d)
}

/// Seeded generators for property tests.
pub mod random {
    use rand::Rng;

    use super::*;

    pub fn random_point<R: Rng>(rng: &mut R) -> ProjPoint {
        loop {
            let p = rng.gen_range(-9i64..=9);
            let q = rng.gen_range(0i64..=9);
            if p != 0 || q != 0 {
                return ProjPoint::from_i64(p, q);
            }
        }
    }

    fn fresh_point<R: Rng>(rng: &mut R, used: &mut Vec<ProjPoint>) -> ProjPoint {
        loop {
            let p = random_point(rng);
            if !used.contains(&p) {
                used.push(p.clone());
                return p;
            }
        }
    }

    pub fn random_mobius<R: Rng>(rng: &mut R) -> MobiusMap {
        loop {
            let e: [i64; 4] = [
                rng.gen_range(-5..=5),
                rng.gen_range(-5..=5),
                rng.gen_range(-5..=5),
                rng.gen_range(-5..=5),
            ];
            if let Ok(m) = MobiusMap::from_i64(e[0], e[1], e[2], e[3]) {
                return m;
            }
        }
    }

    /// A valid tree with markings 1..n, a few bubbles, random coordinates,
    /// and a random frame.
    pub fn random_map_tree<R: Rng>(rng: &mut R, n: usize) -> StableMapTree {
        // pick a bubble structure whose stability demands fit inside n
        let (parents, demands) = loop {
            let k = rng.gen_range(0..=3usize.min(n / 2));
            let parents: Vec<usize> = (0..k).map(|j| rng.gen_range(0..=j)).collect();
            let mut children = vec![0usize; k + 1];
            for &p in &parents {
                children[p] += 1;
            }
            let demands: Vec<usize> = (1..=k)
                .map(|c| 2usize.saturating_sub(children[c]))
                .collect();
            if demands.iter().sum::<usize>() <= n {
                break (parents, demands);
            }
        };
        let count = parents.len() + 1;
        // assign labels: demanded ones first, the rest anywhere
        let mut labels: Vec<usize> = (1..=n).collect();
        for i in (1..labels.len()).rev() {
            let j = rng.gen_range(0..=i);
            labels.swap(i, j);
        }
        let mut component_of = BTreeMap::new();
        let mut iter = labels.into_iter();
        for (c, d) in demands.iter().enumerate() {
            for _ in 0..*d {
                component_of.insert(iter.next().expect("demands fit"), c + 1);
            }
        }
        for l in iter {
            component_of.insert(l, rng.gen_range(0..count));
        }
        // coordinates: keep special points distinct per component
        let mut used: Vec<Vec<ProjPoint>> = vec![Vec::new(); count];
        let mut edges = Vec::new();
        for (j, &p) in parents.iter().enumerate() {
            let c = j + 1;
            let on_parent = fresh_point(rng, &mut used[p]);
            let on_child = fresh_point(rng, &mut used[c]);
            edges.push(Edge {
                a: Attach::new(p, on_parent),
                b: Attach::new(c, on_child),
            });
        }
        let markings = component_of
            .into_iter()
            .map(|(l, c)| {
                let pt = fresh_point(rng, &mut used[c]);
                (l, Attach::new(c, pt))
            })
            .collect();
        StableMapTree {
            component_count: count,
            edges,
            markings,
            framed: 0,
            frame: random_mobius(rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(p: i64, q: i64) -> ProjPoint {
        ProjPoint::from_i64(p, q)
    }

    fn smooth_n2() -> StableMapTree {
        StableMapTree::smooth(
            vec![(1, pt(0, 1)), (2, pt(1, 1))],
            MobiusMap::identity(),
        )
    }

    /// Framed component plus one leaf bubble carrying the given labels.
    fn with_leaf(labels_on_leaf: &[usize], labels_on_frame: &[(usize, ProjPoint)]) -> StableMapTree {
        let mut markings: BTreeMap<usize, Attach> = BTreeMap::new();
        for (l, p) in labels_on_frame {
            markings.insert(*l, Attach::new(0, p.clone()));
        }
        for (i, l) in labels_on_leaf.iter().enumerate() {
            markings.insert(*l, Attach::new(1, pt(i as i64, 1)));
        }
        StableMapTree {
            component_count: 2,
            edges: vec![Edge {
                a: Attach::new(0, pt(0, 1)),
                b: Attach::new(1, ProjPoint::infinity()),
            }],
            markings,
            framed: 0,
            frame: MobiusMap::identity(),
        }
    }

    #[test]
    fn validation_examples() {
        assert!(validate(&smooth_n2()).is_empty());
        let bad = with_leaf(&[1], &[(2, pt(3, 1))]);
        assert_eq!(validate(&bad), vec![Violation::Unstable { component: 1 }]);
        let good = with_leaf(&[1, 2], &[]);
        assert!(validate(&good).is_empty());
    }

    #[test]
    fn validation_duplicate_point() {
        let t = StableMapTree::smooth(
            vec![(1, pt(1, 1)), (2, pt(1, 1))],
            MobiusMap::identity(),
        );
        assert_eq!(
            validate(&t),
            vec![Violation::DuplicateSpecialPoint { component: 0 }]
        );
    }

    #[test]
    fn canonicalize_applies_frame() {
        let t = StableMapTree::smooth(
            vec![(1, pt(1, 1))],
            MobiusMap::from_i64(2, 0, 0, 1).unwrap(),
        );
        let c = canonicalize(&t).unwrap();
        assert!(c.frame.is_identity());
        assert_eq!(c.markings[&1].point, pt(2, 1));
    }

    #[test]
    fn canonicalize_idempotent_and_bubble_normal_form() {
        let mut t = with_leaf(&[2, 3], &[(1, pt(5, 1))]);
        // scramble the bubble coordinates away from normal form
        t.edges[0].b.point = pt(4, 1);
        t.markings.insert(2, Attach::new(1, pt(0, 1)));
        t.markings.insert(3, Attach::new(1, pt(1, 1)));
        let c = canonicalize(&t).unwrap();
        // node first, then markings by label
        assert_eq!(c.edges[0].b.point, ProjPoint::infinity());
        assert_eq!(c.markings[&2].point, ProjPoint::zero());
        assert_eq!(c.markings[&3].point, ProjPoint::one());
        assert_eq!(canonicalize(&c).unwrap(), c);
        assert!(validate(&c).is_empty());
    }

    #[test]
    fn evaluate_examples() {
        let t = StableMapTree::smooth(vec![(1, pt(2, 1))], MobiusMap::identity());
        assert_eq!(evaluate(&t, 1).unwrap(), pt(2, 1));

        let leaf = with_leaf(&[1, 2], &[]);
        assert_eq!(evaluate(&leaf, 1).unwrap(), pt(0, 1));
        assert_eq!(evaluate(&leaf, 2).unwrap(), pt(0, 1));

        let inv = StableMapTree::smooth(
            vec![(1, pt(1, 2))],
            MobiusMap::from_i64(0, 1, 1, 0).unwrap(),
        );
        assert_eq!(evaluate(&inv, 1).unwrap(), pt(2, 1));
        assert!(matches!(evaluate(&inv, 7), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn forget_smooth_case() {
        let t = StableMapTree::smooth(
            vec![(1, pt(0, 1)), (2, pt(1, 1)), (3, pt(2, 1))],
            MobiusMap::identity(),
        );
        let f = forget(&t, &BTreeSet::from([3])).unwrap();
        assert_eq!(f.n(), 2);
        assert_eq!(f.markings[&1].point, pt(0, 1));
        assert_eq!(f.markings[&2].point, pt(1, 1));
        assert_eq!(f.component_count, 1);
    }

    #[test]
    fn forget_contracts_leaf_and_relocates() {
        let t = with_leaf(&[2, 3], &[(1, pt(5, 1))]);
        let f = forget(&t, &BTreeSet::from([2])).unwrap();
        assert_eq!(f.component_count, 1);
        // marking 3 lands on the old attachment point
        assert_eq!(f.markings[&3], Attach::new(0, pt(0, 1)));
        assert_eq!(f.markings[&1], Attach::new(0, pt(5, 1)));
        assert!(validate(&f).is_empty());
    }

    #[test]
    fn forget_to_single_label_preserves_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let n = rng.gen_range(2..=6);
            let t = random::random_map_tree(&mut rng, n);
            assert!(validate(&t).is_empty());
            for j in 1..=n {
                let keep: BTreeSet<usize> = (1..=n).filter(|&l| l != j).collect();
                let f = forget(&t, &keep).unwrap();
                assert_eq!(
                    evaluate(&f, j).unwrap(),
                    evaluate(&t, j).unwrap(),
                    "n={n} j={j}"
                );
            }
        }
    }

    #[test]
    fn forget_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let n = rng.gen_range(3..=7);
            let t = random::random_map_tree(&mut rng, n);
            let a: BTreeSet<usize> = [1].into();
            let b: BTreeSet<usize> = [2].into();
            let ab: BTreeSet<usize> = [1, 2].into();
            assert_eq!(
                forget(&forget(&t, &a).unwrap(), &b).unwrap(),
                forget(&t, &ab).unwrap()
            );
        }
    }

    #[test]
    fn forget_rejects_improper_subsets() {
        let t = smooth_n2();
        assert!(forget(&t, &BTreeSet::from([1, 2])).is_err());
        assert!(forget(&t, &BTreeSet::from([5])).is_err());
    }

    #[test]
    fn forget_map_examples() {
        let t = StableMapTree::smooth(
            vec![(1, pt(0, 1)), (2, pt(1, 1)), (3, pt(1, 0))],
            MobiusMap::identity(),
        );
        let c = forget_map(&t).unwrap();
        assert_eq!(c.component_count, 1);
        assert_eq!(c.markings[&1].point, ProjPoint::infinity());
        assert_eq!(c.markings[&2].point, ProjPoint::zero());
        assert_eq!(c.markings[&3].point, ProjPoint::one());

        assert!(forget_map(&smooth_n2()).is_err());
    }

    #[test]
    fn forget_map_cross_ratio() {
        let t = StableMapTree::smooth(
            vec![
                (1, pt(0, 1)),
                (2, pt(1, 1)),
                (3, ProjPoint::infinity()),
                (4, pt(2, 1)),
            ],
            MobiusMap::identity(),
        );
        let c = forget_map(&t).unwrap();
        assert_eq!(c.markings[&4].point, pt(1, 2));
    }

    #[test]
    fn forget_map_kills_target_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..30 {
            let n = rng.gen_range(3..=6);
            let t = random::random_map_tree(&mut rng, n);
            let mu = random::random_mobius(&mut rng);
            assert_eq!(
                forget_map(&act_target(&t, &mu).unwrap()).unwrap(),
                forget_map(&t).unwrap()
            );
        }
    }

    #[test]
    fn act_sym_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..25 {
            let n = rng.gen_range(2..=6);
            let t = random::random_map_tree(&mut rng, n);
            let id = Permutation::identity(n);
            assert_eq!(act_sym(&t, &id).unwrap(), canonicalize(&t).unwrap());

            let images: Vec<usize> = {
                let mut v: Vec<usize> = (1..=n).collect();
                for i in (1..v.len()).rev() {
                    let j = rng.gen_range(0..=i);
                    v.swap(i, j);
                }
                v
            };
            let sigma = Permutation::new(images).unwrap();
            let tau = {
                let mut v: Vec<usize> = (1..=n).collect();
                v.rotate_left(1);
                Permutation::new(v).unwrap()
            };
            // right action and label chase
            assert_eq!(
                act_sym(&act_sym(&t, &sigma).unwrap(), &tau).unwrap(),
                act_sym(&t, &sigma.compose(&tau).unwrap()).unwrap()
            );
            for i in 1..=n {
                assert_eq!(
                    evaluate(&act_sym(&t, &sigma).unwrap(), i).unwrap(),
                    evaluate(&t, sigma.apply(i)).unwrap()
                );
            }
        }
    }

    #[test]
    fn act_sym_involution() {
        let t = smooth_n2();
        let swap = Permutation::new(vec![2, 1]).unwrap();
        let once = act_sym(&t, &swap).unwrap();
        assert_eq!(once.markings[&1].point, pt(1, 1));
        assert_eq!(act_sym(&once, &swap).unwrap(), canonicalize(&t).unwrap());
    }

    #[test]
    fn act_target_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..30 {
            let n = rng.gen_range(1..=6);
            let t = random::random_map_tree(&mut rng, n);
            let mu = random::random_mobius(&mut rng);
            let moved = act_target(&t, &mu).unwrap();
            assert!(validate(&moved).is_empty());
            for i in 1..=n {
                assert_eq!(
                    evaluate(&moved, i).unwrap(),
                    mu.apply(&evaluate(&t, i).unwrap())
                );
            }
            assert_eq!(
                act_target(&t, &MobiusMap::identity()).unwrap(),
                canonicalize(&t).unwrap()
            );
        }
    }

    #[test]
    fn actions_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..25 {
            let n = rng.gen_range(2..=6);
            let t = random::random_map_tree(&mut rng, n);
            let mu = random::random_mobius(&mut rng);
            let images: Vec<usize> = {
                let mut v: Vec<usize> = (1..=n).collect();
                for i in (1..v.len()).rev() {
                    let j = rng.gen_range(0..=i);
                    v.swap(i, j);
                }
                v
            };
            let sigma = Permutation::new(images).unwrap();
            assert_eq!(
                act_target(&act_sym(&t, &sigma).unwrap(), &mu).unwrap(),
                act_sym(&act_target(&t, &mu).unwrap(), &sigma).unwrap()
            );
        }
    }

    #[test]
    fn act_pair_cases() {
        let id = MobiusMap::identity();
        let shift = MobiusMap::from_i64(1, 1, 0, 1).unwrap(); // z -> z + 1

        let t = smooth_n2();
        assert_eq!(act_pair(&t, &id, &id).unwrap(), canonicalize(&t).unwrap());

        // images collide: a bubble appears at (1:1)
        let bubbled = act_pair(&t, &shift, &id).unwrap();
        assert_eq!(bubbled.component_count, 2);
        assert_eq!(bubbled.edges[0].a.point, pt(1, 1));
        assert_eq!(evaluate(&bubbled, 1).unwrap(), pt(1, 1));
        assert_eq!(evaluate(&bubbled, 2).unwrap(), pt(1, 1));

        // images separate: the bubble disappears
        let bubble_at_zero = two_marked_bubble(pt(0, 1));
        let smooth = act_pair(&bubble_at_zero, &id, &shift).unwrap();
        assert_eq!(smooth.component_count, 1);
        assert_eq!(smooth.markings[&1].point, pt(0, 1));
        assert_eq!(smooth.markings[&2].point, pt(1, 1));

        // wrong marking count
        let t3 = StableMapTree::smooth(
            vec![(1, pt(0, 1)), (2, pt(1, 1)), (3, pt(2, 1))],
            MobiusMap::identity(),
        );
        assert!(act_pair(&t3, &id, &id).is_err());
    }

    #[test]
    fn act_pair_invertible_and_intertwines() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..60 {
            let t = random::random_map_tree(&mut rng, 2);
            let n1 = random::random_mobius(&mut rng);
            let n2 = random::random_mobius(&mut rng);
            let moved = act_pair(&t, &n1, &n2).unwrap();
            assert!(validate(&moved).is_empty());
            let back = act_pair(&moved, &n1.inverse(), &n2.inverse()).unwrap();
            assert_eq!(back, canonicalize(&t).unwrap());
            assert_eq!(
                evaluate(&moved, 1).unwrap(),
                n1.apply(&evaluate(&t, 1).unwrap())
            );
            assert_eq!(
                evaluate(&moved, 2).unwrap(),
                n2.apply(&evaluate(&t, 2).unwrap())
            );
        }
    }

    #[test]
    fn dimension_formula() {
        assert_eq!(moduli_dimension(1, 1, 5).unwrap(), 5);
        assert_eq!(moduli_dimension(2, 2, 0).unwrap(), 5);
        assert_eq!(moduli_dimension(3, 3, 6).unwrap(), 18);
        assert!(moduli_dimension(0, 1, 1).is_err());
    }

    #[test]
    fn boundary_divisor_counts() {
        assert_eq!(boundary_divisors(3).unwrap().len(), 4);
        assert_eq!(boundary_divisors(2).unwrap().len(), 1);
        assert_eq!(boundary_divisors(5).unwrap().len(), 26);
        assert!(boundary_divisors(1).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let n = rng.gen_range(2..=5);
            let t = random::random_map_tree(&mut rng, n);
            let v = t.to_json();
            let back = StableMapTree::from_json(&v).unwrap();
            assert_eq!(back, t);
        }
    }

    #[test]
    fn random_trees_are_valid_and_canonicalize_idempotently() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..60 {
            let n = rng.gen_range(2..=8);
            let t = random::random_map_tree(&mut rng, n);
            assert!(validate(&t).is_empty(), "{:?}", validate(&t));
            let c = canonicalize(&t).unwrap();
            assert!(validate(&c).is_empty());
            assert_eq!(canonicalize(&c).unwrap(), c);
        }
    }
}
