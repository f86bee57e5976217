//! Independent checks: the lemma battery, a brute-force betweenness oracle,
//! the visible hull and the subdivision check between the regular
//! neighbourhood and the tree of cylinders, the Φ contract and finite
//! symmetries.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixtures::VertexMap;
use crate::forest::{coarse_leq, crosses, eta_y, pairs_of, small_intersection, Class, ForestClass};
use crate::qh::{eta_v, separating_qh, QhClass, QhTarget, Side};
use crate::rn::{
    cross_connected_components, observed_ccc_census, phi, predicted_ccc_census, BetweenTable, Ccc, CccKind, RnGraph,
};
use crate::tc::{Subdivided, TcNode, TcPoint, TreeOfCylinders};
use crate::window::{CylIx, EdgeIx, ValidWindow, VertexIx};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub check: String,
    pub instances: usize,
    pub failures: Vec<String>,
}

impl Report {
    pub fn new(check: &str) -> Self {
        Report {
            check: check.to_owned(),
            instances: 0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

fn class_label(w: &ValidWindow, c: &Class) -> String {
    serde_json::to_string(&c.to_repr(w)).expect("class repr serializes")
}

/// Components, betweenness table and Φ-images of one window.
pub struct Analysis {
    pub cccs: Vec<Ccc>,
    pub table: BetweenTable,
    pub sd: Subdivided,
    pub images: Vec<TcPoint>,
}

impl Analysis {
    pub fn new(w: &ValidWindow, with_qh: bool, cap: u64) -> Result<Self> {
        let cccs = cross_connected_components(w, with_qh, cap)?;
        Self::of(w, cccs)
    }

    fn of(w: &ValidWindow, cccs: Vec<Ccc>) -> Result<Self> {
        let table = BetweenTable::new(w, &cccs)?;
        let sd = Subdivided::new(TreeOfCylinders::new(w));
        let images = cccs.iter().map(|c| phi(w, &sd, &c.kind)).collect();
        Ok(Analysis {
            cccs,
            table,
            sd,
            images,
        })
    }

    fn node(&self, n: TcNode) -> TcPoint {
        TcPoint::Node(self.sd.tc.node_index(n).expect("node of the tree of cylinders"))
    }
}

/// Maps forest classes (either orientation) to the index of their component.
fn ccc_lookup(cccs: &[Ccc]) -> HashMap<ForestClass, usize> {
    let mut out = HashMap::new();
    for (i, c) in cccs.iter().enumerate() {
        for m in &c.members {
            out.insert(*m, i);
            out.insert(m.complement(), i);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Brute-force oracle

/// The window with its external hangings made explicit, so that "infinite"
/// becomes "contains a rigid element". Each flagged ordinary vertex gets one
/// pendant token; a QH vertex gets a `+` and a `-` reservoir token and a
/// `+` and a `-` core token.
pub struct Oracle<'a> {
    w: &'a ValidWindow,
    adj: Vec<Vec<(usize, Option<EdgeIx>)>>,
    rigid: FixedBitSet,
    /// `[hang+, hang-, core+, core-]` token indices of each QH vertex.
    qh_tokens: HashMap<VertexIx, [usize; 4]>,
}

impl<'a> Oracle<'a> {
    pub fn new(w: &'a ValidWindow) -> Self {
        let n = w.vertex_count();
        let mut adj: Vec<Vec<(usize, Option<EdgeIx>)>> = (0..n)
            .map(|v| w.neighbours(VertexIx(v)).iter().map(|&(x, e)| (x.0, Some(e))).collect())
            .collect();
        let mut rigid_ix = Vec::new();
        let mut qh_tokens = HashMap::new();
        for v in 0..n {
            let vx = VertexIx(v);
            if !w.window().vertices[v].ext.is_flagged() {
                continue;
            }
            let count = if w.is_qh(vx) { 4 } else { 1 };
            let first = adj.len();
            for t in first..first + count {
                adj.push(vec![(v, None)]);
                adj[v].push((t, None));
                rigid_ix.push(t);
            }
            if w.is_qh(vx) {
                qh_tokens.insert(vx, [first, first + 1, first + 2, first + 3]);
            } else {
                rigid_ix.push(v);
            }
        }
        let mut rigid = FixedBitSet::with_capacity(adj.len());
        for r in rigid_ix {
            rigid.insert(r);
        }
        Oracle {
            w,
            adj,
            rigid,
            qh_tokens,
        }
    }

    fn size(&self) -> usize {
        self.adj.len()
    }

    fn flood(&self, seeds: &[usize], mut pass: impl FnMut(usize, usize, Option<EdgeIx>) -> bool) -> FixedBitSet {
        let mut seen = FixedBitSet::with_capacity(self.size());
        let mut queue = VecDeque::new();
        for &s in seeds {
            seen.insert(s);
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            for &(x, e) in &self.adj[u] {
                if !seen.contains(x) && pass(u, x, e) {
                    seen.insert(x);
                    queue.push_back(x);
                }
            }
        }
        seen
    }

    /// Component of `start` after deleting the window edges of `cyl`.
    fn atom(&self, cyl: CylIx, start: VertexIx) -> FixedBitSet {
        self.flood(&[start.0], |_, _, e| e.is_none_or(|e| self.w.edge_cylinder(e) != cyl))
    }

    fn is_infinite(&self, set: &FixedBitSet) -> bool {
        !set.is_disjoint(&self.rigid)
    }

    /// Smallest and largest special-forest or QH representative, and the
    /// finite atoms that may be added between them.
    fn bounds(&self, c: &Class) -> Bounds {
        match c {
            Class::Forest(f) => {
                let cyl = self.w.cylinder(f.cylinder());
                let attach: BTreeSet<VertexIx> = f.attachments(self.w).into_iter().collect();
                let mut canon = FixedBitSet::with_capacity(self.size());
                let mut finite = Vec::new();
                for &v in &cyl.vertices {
                    let a = self.atom(cyl.ix, v);
                    if attach.contains(&v) {
                        canon.union_with(&a);
                    } else if !self.is_infinite(&a) {
                        finite.push(a);
                    }
                }
                let mut max = canon.clone();
                for a in &finite {
                    max.union_with(a);
                }
                Bounds {
                    min: canon.clone(),
                    canon,
                    max,
                    finite,
                    qh_vertex: None,
                }
            }
            Class::Qh(q) => {
                let v = q.vertex();
                let [hp, hm, cp, cm] = self.qh_tokens[&v];
                // complementary classes take opposite reservoir and core tokens
                let (hang, core) = if q.plus_mask() & 1 == 1 { (hp, cp) } else { (hm, cm) };
                let canon = self.flood(&[v.0], |u, x, e| {
                    if u != v.0 {
                        return x != v.0;
                    }
                    match e {
                        Some(e) => q.side(self.w, self.w.edge_cylinder(e)) == Some(Side::Plus),
                        None => x == hang || x == core,
                    }
                });
                let mut min = canon.clone();
                min.set(v.0, false);
                Bounds {
                    max: canon.clone(),
                    canon,
                    min,
                    finite: Vec::new(),
                    qh_vertex: Some(v),
                }
            }
        }
    }

    /// Whether the intersection of the canonical realizations is infinite.
    pub fn small(&self, a: &Class, b: &Class) -> bool {
        let (ra, rb) = (self.bounds(a).canon, self.bounds(b).canon);
        ra.intersection(&rb).all(|x| !self.rigid.contains(x))
    }

    /// A literal chain `X1 ⊆ X2 ⊆ X3` of representatives.
    fn chain(&self, x1: &Bounds, x2: &Bounds, x3: &Bounds) -> bool {
        match x2.qh_vertex {
            Some(v) => {
                let mut without = x2.canon.clone();
                without.set(v.0, false);
                [without, x2.canon.clone()]
                    .iter()
                    .any(|r| x1.min.is_subset(r) && r.is_subset(&x3.max))
            }
            None => {
                let mut rep = x2.canon.clone();
                for a in &x2.finite {
                    if x1.min.intersection(a).any(|x| !x2.canon.contains(x)) {
                        rep.union_with(a);
                    }
                }
                x1.min.is_subset(&rep) && rep.is_subset(&x3.max)
            }
        }
    }

    /// Betweenness by exhaustive search for nested representatives.
    pub fn between(&self, c1: &Ccc, c2: &Ccc, c3: &Ccc) -> Result<bool> {
        let b = |c: &Ccc| -> Result<Vec<Bounds>> {
            Ok(c.oriented_members(self.w)?.iter().map(|m| self.bounds(m)).collect())
        };
        let (m1, m2, m3) = (b(c1)?, b(c2)?, b(c3)?);
        Ok(m2
            .iter()
            .any(|x2| m1.iter().any(|x1| m3.iter().any(|x3| self.chain(x1, x2, x3)))))
    }
}

struct Bounds {
    canon: FixedBitSet,
    min: FixedBitSet,
    max: FixedBitSet,
    finite: Vec<FixedBitSet>,
    qh_vertex: Option<VertexIx>,
}

/// Whether `cccs[j]` lies between `cccs[i]` and `cccs[k]`, decided without
/// the coarse order.
pub fn brute_force_between(w: &ValidWindow, cccs: &[Ccc], i: usize, j: usize, k: usize) -> Result<bool> {
    if cccs.len() < 3 {
        return Err(Error::TooFewCccs(cccs.len()));
    }
    if i == j || j == k || i == k {
        return Err(Error::NotDistinct);
    }
    Oracle::new(w).between(&cccs[i], &cccs[j], &cccs[k])
}

/// Oracle and table agree on every ordered triple of distinct components.
pub fn check_oracle(w: &ValidWindow, with_qh: bool, cap: u64) -> Result<Report> {
    let a = Analysis::new(w, with_qh, cap)?;
    let oracle = Oracle::new(w);
    let mut r = Report::new("oracle_agreement");
    let n = a.cccs.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k {
                    continue;
                }
                let fast = a.table.between(i, j, k);
                let slow = oracle.between(&a.cccs[i], &a.cccs[j], &a.cccs[k])?;
                r.expect(fast == slow, || {
                    format!(
                        "between({}, {}, {}): table {fast}, oracle {slow}",
                        a.cccs[i].kind.label(w),
                        a.cccs[j].kind.label(w),
                        a.cccs[k].kind.label(w)
                    )
                });
            }
        }
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// Lemma battery

/// At most 16 side assignments: all of them on four cylinders or fewer,
/// otherwise separating classes for cyclically adjacent cylinders.
pub fn qh_sample(w: &ValidWindow, v: VertexIx) -> Result<Vec<QhClass>> {
    let at = w.cylinders_at(v);
    if at.len() <= 4 {
        return QhClass::all_at(w, v);
    }
    let mut out = BTreeSet::new();
    for i in 0..at.len() {
        let s = separating_qh(w, v, at[i], at[(i + 1) % at.len()])?;
        out.insert(s);
        out.insert(s.complement());
    }
    Ok(out.into_iter().take(16).collect())
}

fn forest_universe(w: &ValidWindow, cap: u64) -> Result<Vec<ForestClass>> {
    let mut out = Vec::new();
    for c in w.cylinders().iter().filter(|c| c.complete) {
        for p in pairs_of(w, c.ix, cap)? {
            out.push(p);
            out.push(p.complement());
        }
    }
    Ok(out)
}

fn qh_universe(w: &ValidWindow) -> Result<Vec<QhClass>> {
    let mut out = Vec::new();
    for v in w.qh_vertices() {
        out.extend(qh_sample(w, v)?);
    }
    Ok(out)
}

/// Instantiates every lemma hypothesis over enumerated classes and checks
/// the conclusion; one report per lemma.
pub fn check_lemma_suite(w: &ValidWindow, cap: u64) -> Result<Vec<Report>> {
    if w.is_degenerate() {
        return Ok(LEMMAS.iter().map(|n| Report::new(n)).collect());
    }
    let forests = forest_universe(w, cap)?;
    let qhs = qh_universe(w)?;
    let a = Analysis::new(w, true, cap)?;
    let lookup = ccc_lookup(&a.cccs);
    let oracle = Oracle::new(w);
    let image = |c: &Class| -> TcPoint {
        match c {
            Class::Forest(f) => a.images[lookup[f]],
            Class::Qh(q) => a.node(TcNode::V0(q.vertex())),
        }
    };
    let same_ccc = |x: &Class, y: &Class| match (x, y) {
        (Class::Forest(f), Class::Forest(g)) => lookup[f] == lookup[g],
        (Class::Qh(p), Class::Qh(q)) => p.vertex() == q.vertex(),
        _ => false,
    };
    let mut everything: Vec<Class> = forests.iter().map(|f| Class::Forest(*f)).collect();
    everything.extend(qhs.iter().map(|q| Class::Qh(*q)));

    let mut disjoint = Report::new(LEMMAS[0]);
    let mut cross_cyl = Report::new(LEMMAS[1]);
    let mut forest_small = Report::new(LEMMAS[2]);
    for (i, f) in forests.iter().enumerate() {
        for g in &forests[i + 1..] {
            let (x, y) = (Class::Forest(*f), Class::Forest(*g));
            let small = small_intersection(w, &x, &y)?;
            forest_small.expect(small == oracle.small(&x, &y), || {
                format!(
                    "small({}, {}) = {small}, oracle disagrees",
                    class_label(w, &x),
                    class_label(w, &y)
                )
            });
            if f.cylinder() != g.cylinder() && small {
                disjoint.expect(f.realize(w).is_disjoint(&g.realize(w)), || {
                    format!(
                        "{} and {} are small but not disjoint",
                        class_label(w, &x),
                        class_label(w, &y)
                    )
                });
            }
        }
    }
    let cyls: Vec<CylIx> = w.cylinders().iter().filter(|c| c.complete).map(|c| c.ix).collect();
    for (i, &c1) in cyls.iter().enumerate() {
        for &c2 in &cyls[i + 1..] {
            for p in pairs_of(w, c1, cap)? {
                for q in pairs_of(w, c2, cap)? {
                    let (x, y) = (Class::Forest(p), Class::Forest(q));
                    cross_cyl.expect(!crosses(w, &x, &y)?, || {
                        format!("{} crosses {}", class_label(w, &x), class_label(w, &y))
                    });
                }
            }
        }
    }

    let mut qh_small = Report::new(LEMMAS[3]);
    let mut qh_cross = Report::new(LEMMAS[4]);
    for s in &qhs {
        let x = Class::Qh(*s);
        for y in &everything {
            if let Class::Qh(q) = y {
                if q.vertex() == s.vertex() {
                    continue;
                }
            }
            let small = small_intersection(w, &x, y)?;
            qh_small.expect(small == oracle.small(&x, y), || {
                format!(
                    "small({}, {}) = {small}, oracle disagrees",
                    class_label(w, &x),
                    class_label(w, y)
                )
            });
            qh_cross.expect(!crosses(w, &x, y)?, || {
                format!("{} crosses {}", class_label(w, &x), class_label(w, y))
            });
        }
    }

    let mut projection = Report::new(LEMMAS[5]);
    for (ci, c) in a.cccs.iter().enumerate() {
        let CccKind::NonPeripheral { cyl } = c.kind else {
            continue;
        };
        if w.cylinder(cyl).boundary.len() < 4 {
            continue;
        }
        let y_c = a.node(TcNode::Cyl(cyl));
        for s in c.oriented_members(w)? {
            let rs = s.realize(w);
            for s2 in &everything {
                if matches!(s2, Class::Forest(f) if lookup[f] == ci) || !coarse_leq(w, s2, &s)? {
                    continue;
                }
                let what = || format!("{} <= {}", class_label(w, s2), class_label(w, &s));
                let Ok(eta) = eta_y(w, cyl, s2) else {
                    projection.expect(false, || format!("{}: projection undefined", what()));
                    continue;
                };
                let p = Class::Forest(ForestClass::from_attachments(w, cyl, &[eta])?);
                let ok = rs.contains(eta.0)
                    && coarse_leq(w, s2, &p)?
                    && coarse_leq(w, &p, &s)?
                    && a.sd.same_side(image(s2), a.node(TcNode::V0(eta)), y_c);
                projection.expect(ok, || format!("{}: fails through {}", what(), w.vertex_id(eta)));
            }
        }
    }

    let mut sides = Report::new(LEMMAS[6]);
    for c in w.cylinders().iter().filter(|c| c.complete && c.boundary.len() >= 2) {
        for &u in &c.boundary {
            let s = Class::Forest(ForestClass::from_attachments(w, c.ix, &[u])?);
            let at = image(&s);
            let u_c = a.node(TcNode::V0(u));
            for s2 in &everything {
                if same_ccc(s2, &s) {
                    continue;
                }
                if coarse_leq(w, s2, &s)? {
                    sides.expect(a.sd.same_side(image(s2), u_c, at), || {
                        format!(
                            "{} <= {} lands away from {}",
                            class_label(w, s2),
                            class_label(w, &s),
                            w.vertex_id(u)
                        )
                    });
                }
                if coarse_leq(w, &s, s2)? {
                    sides.expect(image(s2) != at && !a.sd.same_side(image(s2), u_c, at), || {
                        format!(
                            "{} <= {} lands beside {}",
                            class_label(w, &s),
                            class_label(w, s2),
                            w.vertex_id(u)
                        )
                    });
                }
            }
        }
    }

    let mut link = Report::new(LEMMAS[7]);
    for s in &qhs {
        let v = s.vertex();
        let x = Class::Qh(*s);
        let v_c = a.node(TcNode::V0(v));
        for s2 in &everything {
            let target = match s2 {
                Class::Forest(f) => QhTarget::Cylinder(f.cylinder()),
                Class::Qh(q) if q.vertex() == v => continue,
                Class::Qh(q) => QhTarget::Vertex(q.vertex()),
            };
            if !coarse_leq(w, s2, &x)? {
                continue;
            }
            let y0 = eta_v(w, v, target)?;
            let only = BTreeMap::from_iter(
                w.cylinders_at(v)
                    .iter()
                    .map(|&c| (c, if c == y0 { Side::Plus } else { Side::Minus })),
            );
            let q0 = Class::Qh(crate::qh::qh_class(w, v, &only)?);
            let ok = s.side(w, y0) == Some(Side::Plus)
                && coarse_leq(w, s2, &q0)?
                && a.sd.same_side(image(s2), a.node(TcNode::Cyl(y0)), v_c);
            link.expect(ok, || {
                format!("{} <= {} via {}", class_label(w, s2), class_label(w, &x), w.cyl_id(y0))
            });
        }
    }

    Ok(vec![
        disjoint,
        cross_cyl,
        forest_small,
        qh_small,
        qh_cross,
        projection,
        sides,
        link,
    ])
}

/// Names of the lemma reports, in the order returned by [`check_lemma_suite`].
pub const LEMMAS: [&str; 8] = [
    "small_forests_disjoint",
    "no_crossing_across_cylinders",
    "forest_smallness_matches_oracle",
    "qh_smallness_matches_oracle",
    "qh_never_crosses",
    "non_peripheral_projection",
    "peripheral_sides",
    "qh_link_projection",
];

/// Computed components on every complete cylinder match the census
/// predicted from the boundary size.
pub fn check_census(w: &ValidWindow, cap: u64) -> Result<Report> {
    let mut r = Report::new("ccc_census");
    if w.is_degenerate() {
        return Ok(r);
    }
    let cccs = cross_connected_components(w, false, cap)?;
    for c in w.cylinders().iter().filter(|c| c.complete) {
        let predicted = predicted_ccc_census(w, &c.id)?;
        let observed = observed_ccc_census(&cccs, c.ix);
        r.expect(predicted == observed, || {
            format!("{}: predicted {predicted:?}, computed {observed:?}", c.id)
        });
    }
    Ok(r)
}

/// Every window-level check; the oracle comparison only when asked.
pub fn verify_all(w: &ValidWindow, with_qh: bool, oracle: bool, cap: u64) -> Result<Vec<Report>> {
    let mut out = vec![check_census(w, cap)?];
    out.extend(check_lemma_suite(w, cap)?);
    out.push(check_phi(w, with_qh, cap)?);
    let mut sub = Report::new("rn_is_subdivision");
    sub.instances = 1;
    if let Outcome::Failure(c) = check_rn_is_subdivision(w, with_qh, cap)? {
        sub.failures
            .push(format!("{} (components: {})", c.reason, c.cccs.join(", ")));
    }
    out.push(sub);
    if oracle {
        out.push(check_oracle(w, with_qh, cap)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Hull and subdivision

/// The convex hull of the Φ-images in the subdivided tree of cylinders,
/// with midpoints that are not images contracted away.
#[derive(Clone, Debug)]
pub struct Hull {
    /// Hull points, as indices into the subdivided tree.
    pub points: Vec<usize>,
    /// Points kept after contraction.
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

pub fn hull_of(sd: &Subdivided, images: &[TcPoint]) -> Hull {
    let ims: Vec<usize> = images.iter().map(|&p| sd.index(p)).collect();
    let inside = |p: usize| {
        ims.iter().any(|&a| {
            ims.iter()
                .any(|&b| sd.dist_ix(a, p) + sd.dist_ix(p, b) == sd.dist_ix(a, b))
        })
    };
    let points: Vec<usize> = (0..sd.len()).filter(|&p| inside(p)).collect();
    let in_hull: BTreeSet<usize> = points.iter().copied().collect();
    let kept = |p: usize| matches!(sd.point(p), TcPoint::Node(_)) || ims.contains(&p);
    let vertices: Vec<usize> = points.iter().copied().filter(|&p| kept(p)).collect();
    let mut edges = BTreeSet::new();
    for &p in &vertices {
        for &q in sd.neighbours(p) {
            if !in_hull.contains(&q) {
                continue;
            }
            if kept(q) {
                edges.insert((p.min(q), p.max(q)));
            } else if let Some(&r) = sd.neighbours(q).iter().find(|&&r| r != p && in_hull.contains(&r)) {
                edges.insert((p.min(r), p.max(r)));
            }
        }
    }
    Hull {
        points,
        vertices,
        edges: edges.into_iter().collect(),
    }
}

pub fn visible_hull(w: &ValidWindow, with_qh: bool, cap: u64) -> Result<(Subdivided, Hull)> {
    let cccs = cross_connected_components(w, with_qh, cap)?;
    if cccs.is_empty() {
        return Err(Error::NoCccs);
    }
    let sd = Subdivided::new(TreeOfCylinders::new(w));
    let images: Vec<TcPoint> = cccs.iter().map(|c| phi(w, &sd, &c.kind)).collect();
    let hull = hull_of(&sd, &images);
    Ok((sd, hull))
}

/// Where each regular-neighbourhood vertex lands in the subdivided hull.
#[derive(Clone, Debug, Serialize)]
pub struct Mapping {
    pub cccs: Vec<(String, String)>,
    /// Star members and the hull point standing for the star; inserted
    /// subdivision points are named by the hull edge they split.
    pub stars: Vec<(Vec<String>, String)>,
    pub subdivisions: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub cccs: Vec<String>,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub enum Outcome {
    Isomorphism(Mapping),
    Failure(Certificate),
}

impl Outcome {
    pub fn is_isomorphism(&self) -> bool {
        matches!(self, Outcome::Isomorphism(_))
    }
}

fn attempt(w: &ValidWindow, sd: &Subdivided, cccs: &[Ccc]) -> Result<std::result::Result<Mapping, String>> {
    let label = |c: &Ccc| c.kind.label(w);
    if cccs.is_empty() {
        return Ok(Ok(Mapping {
            cccs: Vec::new(),
            stars: Vec::new(),
            subdivisions: 0,
        }));
    }
    let rn = RnGraph::from_cccs(w, cccs.to_vec())?;
    let images: Vec<TcPoint> = cccs.iter().map(|c| phi(w, sd, &c.kind)).collect();
    let mut by_point: HashMap<usize, usize> = HashMap::new();
    for (i, p) in images.iter().enumerate() {
        if let Some(j) = by_point.insert(sd.index(*p), i) {
            return Ok(Err(format!(
                "{} and {} share the image {}",
                label(&cccs[j]),
                label(&cccs[i]),
                sd.label(w, *p)
            )));
        }
    }
    let hull = hull_of(sd, &images);
    for &p in hull.vertices.iter().filter(|_| !w.is_degenerate()) {
        if let TcPoint::Node(n) = sd.point(p) {
            if let TcNode::Cyl(c) = sd.tc.nodes()[n] {
                if !w.cylinder(c).complete {
                    return Ok(Err(format!("incomplete cylinder {} lies inside the hull", w.cyl_id(c))));
                }
            }
        }
    }
    // non-image vertices of the subdivided hull, with their neighbouring components
    let mut hubs: Vec<(String, BTreeSet<usize>)> = Vec::new();
    let mut subdivisions = 0;
    for &p in &hull.vertices {
        if !by_point.contains_key(&p) {
            hubs.push((sd.label(w, sd.point(p)), BTreeSet::new()));
        }
    }
    let hub_of: HashMap<usize, usize> = hull
        .vertices
        .iter()
        .filter(|p| !by_point.contains_key(p))
        .enumerate()
        .map(|(i, &p)| (p, i))
        .collect();
    for &(p, q) in &hull.edges {
        match (by_point.get(&p), by_point.get(&q)) {
            (Some(&a), Some(&b)) => {
                subdivisions += 1;
                let name = format!("between({},{})", sd.label(w, sd.point(p)), sd.label(w, sd.point(q)));
                hubs.push((name, BTreeSet::from([a, b])));
            }
            (Some(&a), None) => {
                hubs[hub_of[&q]].1.insert(a);
            }
            (None, Some(&b)) => {
                hubs[hub_of[&p]].1.insert(b);
            }
            (None, None) => {
                return Ok(Err(format!(
                    "hull edge {} - {} joins two points outside the image",
                    sd.label(w, sd.point(p)),
                    sd.label(w, sd.point(q))
                )))
            }
        }
    }
    if cccs.len() == 1 && hubs.is_empty() && rn.stars.is_empty() {
        return Ok(Ok(Mapping {
            cccs: vec![(label(&cccs[0]), sd.label(w, images[0]))],
            stars: Vec::new(),
            subdivisions: 0,
        }));
    }
    let mut unmatched: BTreeMap<BTreeSet<usize>, Vec<String>> = BTreeMap::new();
    for (name, set) in hubs {
        unmatched.entry(set).or_default().push(name);
    }
    let mut stars = Vec::new();
    for s in &rn.stars {
        let key: BTreeSet<usize> = s.iter().copied().collect();
        let names: Vec<String> = s.iter().map(|&i| label(&cccs[i])).collect();
        match unmatched.get_mut(&key).and_then(|v| v.pop()) {
            Some(name) => stars.push((names, name)),
            None => {
                return Ok(Err(format!(
                    "star {{{}}} has no counterpart in the hull",
                    names.join(", ")
                )))
            }
        }
    }
    if let Some((set, names)) = unmatched.iter().find(|(_, v)| !v.is_empty()) {
        let members: Vec<String> = set.iter().map(|&i| label(&cccs[i])).collect();
        return Ok(Err(format!(
            "hull point {} around {{{}}} is not a star",
            names[0],
            members.join(", ")
        )));
    }
    let cccs_map = cccs
        .iter()
        .zip(&images)
        .map(|(c, p)| (label(c), sd.label(w, *p)))
        .collect();
    Ok(Ok(Mapping {
        cccs: cccs_map,
        stars,
        subdivisions,
    }))
}

/// Matches the regular neighbourhood against the visible hull with one
/// extra point on every hull edge joining two images. On failure the set
/// of components is shrunk greedily while the failure persists.
pub fn check_rn_is_subdivision(w: &ValidWindow, with_qh: bool, cap: u64) -> Result<Outcome> {
    let cccs = cross_connected_components(w, with_qh, cap)?;
    let sd = Subdivided::new(TreeOfCylinders::new(w));
    let reason = match attempt(w, &sd, &cccs)? {
        Ok(m) => return Ok(Outcome::Isomorphism(m)),
        Err(reason) => reason,
    };
    let mut keep = cccs;
    let mut reason = reason;
    let mut i = 0;
    while i < keep.len() {
        let mut trial = keep.clone();
        trial.remove(i);
        match attempt(w, &sd, &trial)? {
            Err(r) => {
                keep = trial;
                reason = r;
            }
            Ok(_) => i += 1,
        }
    }
    Ok(Outcome::Failure(Certificate {
        cccs: keep.iter().map(|c| c.kind.label(w)).collect(),
        reason,
    }))
}

// ---------------------------------------------------------------------------
// Φ contract

/// Injectivity, every closed hull edge meets the image, betweenness is
/// preserved, and images of two-boundary peripheral components have valence 2.
pub fn check_phi(w: &ValidWindow, with_qh: bool, cap: u64) -> Result<Report> {
    let a = Analysis::new(w, with_qh, cap)?;
    let sd = &a.sd;
    let mut r = Report::new("phi_contract");
    let label = |i: usize| a.cccs[i].kind.label(w);
    let n = a.cccs.len();
    for i in 0..n {
        for j in i + 1..n {
            r.expect(a.images[i] != a.images[j], || {
                format!("{} and {} share an image", label(i), label(j))
            });
        }
    }
    let hull = hull_of(sd, &a.images);
    let in_hull: BTreeSet<usize> = hull.points.iter().copied().collect();
    let image_set: BTreeSet<usize> = a.images.iter().map(|&p| sd.index(p)).collect();
    for (e, &(x, y)) in sd.tc.edges().iter().enumerate() {
        if !(in_hull.contains(&x) && in_hull.contains(&y)) {
            continue;
        }
        let mid = sd.index(TcPoint::Mid(e));
        r.expect(
            image_set.contains(&x) || image_set.contains(&y) || image_set.contains(&mid),
            || {
                format!(
                    "closed edge {} - {} misses the image",
                    sd.tc.label(w, x),
                    sd.tc.label(w, y)
                )
            },
        );
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k {
                    continue;
                }
                let algebraic = a.table.between(i, j, k);
                let geometric = sd.on_path(a.images[i], a.images[j], a.images[k]);
                r.expect(algebraic == geometric, || {
                    format!(
                        "{} between {} and {}: classes say {algebraic}, tree says {geometric}",
                        label(j),
                        label(i),
                        label(k)
                    )
                });
            }
        }
    }
    for (i, c) in a.cccs.iter().enumerate() {
        if let CccKind::Peripheral { cyl, .. } = c.kind {
            if w.cylinder(cyl).boundary.len() == 2 {
                let TcPoint::Node(y) = a.images[i] else {
                    unreachable!("two-boundary images are cylinder nodes")
                };
                let valence = sd.tc.edges().iter().filter(|&&(p, q)| p == y || q == y).count();
                r.expect(valence == 2, || format!("{} has image of valence {valence}", label(i)));
            }
        }
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// Symmetry

/// A window automorphism with its induced cylinder permutation.
struct Automorphism {
    vertex: Vec<VertexIx>,
    cyl: Vec<CylIx>,
}

fn induce(w: &ValidWindow, map: &VertexMap) -> Result<Automorphism> {
    let bad = |m: String| Error::NotAutomorphism(m);
    let n = w.vertex_count();
    if map.len() != n {
        return Err(bad(format!("map has {} entries for {n} vertices", map.len())));
    }
    let mut vertex = vec![VertexIx(usize::MAX); n];
    let mut hit = FixedBitSet::with_capacity(n);
    for (k, v) in map {
        let (a, b) = (w.vertex(k)?, w.vertex(v)?);
        if hit.put(b.0) {
            return Err(bad(format!("`{v}` is hit twice")));
        }
        vertex[a.0] = b;
    }
    for v in (0..n).map(VertexIx) {
        let f = vertex[v.0];
        if w.ext(v) != w.ext(f) || w.is_qh(v) != w.is_qh(f) {
            return Err(bad(format!(
                "`{}` and `{}` differ in external cylinders or QH mark",
                w.vertex_id(v),
                w.vertex_id(f)
            )));
        }
    }
    let mut cyl: Vec<Option<CylIx>> = vec![None; w.cylinders().len()];
    for e in (0..w.edge_count()).map(EdgeIx) {
        let (a, b) = w.ends(e);
        let Some(fe) = w.edge_between(vertex[a.0], vertex[b.0]) else {
            return Err(bad(format!("edge `{}` has no image", w.edge_id(e))));
        };
        let (c, fc) = (w.edge_cylinder(e), w.edge_cylinder(fe));
        match cyl[c.0] {
            Some(x) if x != fc => return Err(bad(format!("cylinder `{}` is split", w.cyl_id(c)))),
            _ => cyl[c.0] = Some(fc),
        }
    }
    let cyl: Vec<CylIx> = cyl
        .into_iter()
        .map(|c| c.expect("every cylinder has an edge"))
        .collect();
    let distinct: BTreeSet<CylIx> = cyl.iter().copied().collect();
    if distinct.len() != cyl.len() {
        return Err(bad("cylinders are merged".into()));
    }
    for (i, &c) in cyl.iter().enumerate() {
        if w.cylinder(CylIx(i)).complete != w.cylinder(c).complete {
            return Err(bad(format!(
                "`{}` and `{}` differ in completeness",
                w.cyl_id(CylIx(i)),
                w.cyl_id(c)
            )));
        }
    }
    Ok(Automorphism { vertex, cyl })
}

/// Each map must be a window automorphism; checks that the induced maps on
/// the tree of cylinders and on the regular neighbourhood are automorphisms
/// commuting with Φ.
pub fn check_equivariance(w: &ValidWindow, autos: &[VertexMap], with_qh: bool, cap: u64) -> Result<Report> {
    let a = Analysis::new(w, with_qh, cap)?;
    let rn = RnGraph::from_cccs(w, a.cccs.clone())?;
    let lookup = ccc_lookup(&a.cccs);
    let tc = &a.sd.tc;
    let mut r = Report::new("equivariance");
    for map in autos {
        let f = induce(w, map)?;
        let node_map: Vec<usize> = tc
            .nodes()
            .iter()
            .map(|n| {
                let m = match *n {
                    TcNode::V0(v) => TcNode::V0(f.vertex[v.0]),
                    TcNode::Cyl(c) => TcNode::Cyl(f.cyl[c.0]),
                    TcNode::Stub { at, slot } => TcNode::Stub {
                        at: f.vertex[at.0],
                        slot,
                    },
                };
                tc.node_index(m).expect("automorphisms preserve the node classes")
            })
            .collect();
        let edges: BTreeSet<(usize, usize)> = tc.edges().iter().copied().collect();
        for &(x, y) in tc.edges() {
            r.expect(edges.contains(&(node_map[x], node_map[y])), || {
                format!(
                    "tree-of-cylinders edge {} - {} has no image",
                    tc.label(w, x),
                    tc.label(w, y)
                )
            });
        }
        let point_map = |p: TcPoint| match p {
            TcPoint::Node(i) => TcPoint::Node(node_map[i]),
            TcPoint::Mid(e) => {
                let (x, y) = tc.edges()[e];
                TcPoint::Mid(tc.edge_index(node_map[x], node_map[y]).expect("edges map to edges"))
            }
        };
        let ccc_map: Vec<Option<usize>> = a
            .cccs
            .iter()
            .map(|c| match c.kind {
                CccKind::Qh { vertex } => a.cccs.iter().position(|d| {
                    d.kind
                        == CccKind::Qh {
                            vertex: f.vertex[vertex.0],
                        }
                }),
                _ if c.members.is_empty() => Some(0),
                _ => {
                    let m = c.members[0];
                    let at: Vec<VertexIx> = m.attachments(w).iter().map(|v| f.vertex[v.0]).collect();
                    ForestClass::from_attachments(w, f.cyl[m.cylinder().0], &at)
                        .ok()
                        .and_then(|x| lookup.get(&x).copied())
                }
            })
            .collect();
        let image: BTreeSet<Option<usize>> = ccc_map.iter().copied().collect();
        r.expect(image.len() == a.cccs.len() && !image.contains(&None), || {
            "induced map on components is not a bijection".into()
        });
        let stars: BTreeSet<Vec<usize>> = rn.stars.iter().cloned().collect();
        for s in &rn.stars {
            let mut t: Vec<usize> = s.iter().filter_map(|&i| ccc_map[i]).collect();
            t.sort_unstable();
            r.expect(stars.contains(&t), || format!("star {s:?} maps to a non-star {t:?}"));
        }
        for (i, c) in a.cccs.iter().enumerate() {
            let Some(j) = ccc_map[i] else { continue };
            r.expect(a.images[j] == point_map(a.images[i]), || {
                format!("Φ does not commute at {}", c.kind.label(w))
            });
        }
    }
    Ok(r)
}
