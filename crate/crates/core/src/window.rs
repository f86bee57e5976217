//! Windows: finite saturated truncations of a minimal simplicial tree whose
//! edges are partitioned into cylinders.
//!
//! A [`Window`] is plain data as read from disk. [`validate_window`] checks it
//! against the structural rules and [`ValidWindow`] is the indexed, checked
//! view that every other module works with. Each vertex carries `ext`, the
//! number of cylinders through it that lie entirely outside the window; a
//! vertex with `ext >= 1` has an unbounded hanging subtree attached to it.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Number of external cylinders at a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ext {
    Finite(u32),
    Inf,
}

impl Ext {
    /// True when something unbounded hangs off the vertex outside the window.
    pub fn is_flagged(self) -> bool {
        !matches!(self, Ext::Finite(0))
    }

    /// `self + n >= bound`, with `Inf` always passing.
    pub fn reaches(self, n: usize, bound: usize) -> bool {
        match self {
            Ext::Inf => true,
            Ext::Finite(k) => n + k as usize >= bound,
        }
    }
}

impl Serialize for Ext {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Ext::Finite(k) => s.serialize_u32(*k),
            Ext::Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Ext {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u32),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(k) => Ok(Ext::Finite(k)),
            Raw::S(s) if s == "inf" => Ok(Ext::Inf),
            Raw::S(s) => Err(serde::de::Error::custom(format!(
                "ext must be a non-negative integer or \"inf\", got \"{s}\""
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vertex {
    pub id: String,
    pub ext: Ext,
    pub qh: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub id: String,
    pub ends: [String; 2],
    pub cyl: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub complete: BTreeMap<String, bool>,
}

impl Window {
    /// Builds a window with vertices and edges ordered by id.
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>, complete: BTreeMap<String, bool>) -> Self {
        let mut w = Window {
            vertices,
            edges,
            complete,
        };
        w.normalize();
        w
    }

    pub fn normalize(&mut self) {
        self.vertices.sort_by(|a, b| a.id.cmp(&b.id));
        self.edges.sort_by(|a, b| a.id.cmp(&b.id));
    }

    pub fn vertex_mut(&mut self, id: &str) -> Option<&mut Vertex> {
        self.vertices.iter_mut().find(|v| v.id == id)
    }

    pub fn edge_mut(&mut self, id: &str) -> Option<&mut Edge> {
        self.edges.iter_mut().find(|e| e.id == id)
    }

    /// Cylinder ids appearing on edges, ascending.
    pub fn cylinder_ids(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.edges.iter().map(|e| e.cyl.as_str()).collect();
        set.into_iter().map(str::to_owned).collect()
    }
}

/// Which window rule a [`Violation`] breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Empty,
    DuplicateId,
    DanglingEnd,
    NotConnected,
    Cycle,
    CylinderNotConnected,
    CylindersShareVertices,
    Valence,
    QhNotInfinite,
    LeafWithoutExternal,
    SharedWithoutExternal,
    MissingCompleteness,
    UnknownCompleteness,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Empty => "empty window",
            Rule::DuplicateId => "duplicate id",
            Rule::DanglingEnd => "dangling end",
            Rule::NotConnected => "not connected",
            Rule::Cycle => "cycle",
            Rule::CylinderNotConnected => "cylinder not connected",
            Rule::CylindersShareVertices => "cylinders share more than one vertex",
            Rule::Valence => "valence",
            Rule::QhNotInfinite => "qh vertex without infinite ext",
            Rule::LeafWithoutExternal => "leaf without external cylinder",
            Rule::SharedWithoutExternal => "shared vertex without external cylinder",
            Rule::MissingCompleteness => "missing completeness entry",
            Rule::UnknownCompleteness => "completeness entry for unknown cylinder",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    pub ids: Vec<String>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.rule.name(), self.ids.join(","), self.detail)
    }
}

fn violation(rule: Rule, ids: Vec<String>, detail: impl Into<String>) -> Violation {
    Violation {
        rule,
        ids,
        detail: detail.into(),
    }
}

/// Checks every window rule and lists what is broken. An empty list means
/// the window is valid.
pub fn validate_window(w: &Window) -> Vec<Violation> {
    let mut out = Vec::new();
    if w.vertices.is_empty() {
        out.push(violation(Rule::Empty, vec![], "window has no vertices"));
        return out;
    }

    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, v) in w.vertices.iter().enumerate() {
        if index.insert(v.id.as_str(), i).is_some() {
            out.push(violation(Rule::DuplicateId, vec![v.id.clone()], "vertex id repeated"));
        }
    }
    let mut edge_ids = BTreeSet::new();
    for e in &w.edges {
        if !edge_ids.insert(e.id.as_str()) {
            out.push(violation(Rule::DuplicateId, vec![e.id.clone()], "edge id repeated"));
        }
        for end in &e.ends {
            if !index.contains_key(end.as_str()) {
                out.push(violation(
                    Rule::DanglingEnd,
                    vec![e.id.clone(), end.clone()],
                    format!("edge {} ends at undeclared vertex {}", e.id, end),
                ));
            }
        }
    }
    if !out.is_empty() {
        return out;
    }

    let n = w.vertices.len();
    let ends: Vec<(usize, usize)> = w
        .edges
        .iter()
        .map(|e| (index[e.ends[0].as_str()], index[e.ends[1].as_str()]))
        .collect();

    // Tree: union-find, every merging failure closes a cycle.
    let mut uf = UnionFind::new(n);
    for (e, &(a, b)) in w.edges.iter().zip(&ends) {
        if !uf.union(a, b) {
            out.push(violation(
                Rule::Cycle,
                vec![e.id.clone()],
                format!("edge {} closes a cycle", e.id),
            ));
        }
    }
    let roots: BTreeSet<usize> = (0..n).map(|i| uf.find(i)).collect();
    if roots.len() > 1 {
        out.push(violation(
            Rule::NotConnected,
            vec![],
            format!("underlying graph has {} components", roots.len()),
        ));
    }

    let mut degree = vec![0usize; n];
    let mut cyls_at: Vec<BTreeSet<&str>> = vec![BTreeSet::new(); n];
    let mut by_cyl: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, (e, &(a, b))) in w.edges.iter().zip(&ends).enumerate() {
        degree[a] += 1;
        degree[b] += 1;
        cyls_at[a].insert(e.cyl.as_str());
        cyls_at[b].insert(e.cyl.as_str());
        by_cyl.entry(e.cyl.as_str()).or_default().push(i);
    }

    let mut cyl_vertices: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
    for (&cyl, edges) in &by_cyl {
        let mut cuf = UnionFind::new(n);
        let mut verts = BTreeSet::new();
        for &e in edges {
            let (a, b) = ends[e];
            cuf.union(a, b);
            verts.insert(a);
            verts.insert(b);
        }
        let comps: BTreeSet<usize> = verts.iter().map(|&v| cuf.find(v)).collect();
        if comps.len() > 1 {
            out.push(violation(
                Rule::CylinderNotConnected,
                vec![cyl.to_owned()],
                format!("cylinder {} spans {} components", cyl, comps.len()),
            ));
        }
        cyl_vertices.insert(cyl, verts);
    }
    let cyl_list: Vec<(&str, &BTreeSet<usize>)> = cyl_vertices.iter().map(|(k, v)| (*k, v)).collect();
    for i in 0..cyl_list.len() {
        for j in i + 1..cyl_list.len() {
            let shared = cyl_list[i].1.intersection(cyl_list[j].1).count();
            if shared > 1 {
                out.push(violation(
                    Rule::CylindersShareVertices,
                    vec![cyl_list[i].0.to_owned(), cyl_list[j].0.to_owned()],
                    format!("{} shared vertices", shared),
                ));
            }
        }
    }

    for (i, v) in w.vertices.iter().enumerate() {
        if !v.ext.reaches(degree[i], 3) {
            let Ext::Finite(k) = v.ext else { unreachable!() };
            out.push(violation(
                Rule::Valence,
                vec![v.id.clone()],
                format!("degree {} + ext {} < 3", degree[i], k),
            ));
        }
        if v.qh && v.ext != Ext::Inf {
            out.push(violation(
                Rule::QhNotInfinite,
                vec![v.id.clone()],
                "qh vertex must have ext inf",
            ));
        }
        if degree[i] == 1 && !v.ext.is_flagged() {
            out.push(violation(
                Rule::LeafWithoutExternal,
                vec![v.id.clone()],
                "a leaf of the window must carry an external cylinder",
            ));
        }
        if cyls_at[i].len() >= 2 && !v.ext.is_flagged() {
            out.push(violation(
                Rule::SharedWithoutExternal,
                vec![v.id.clone()],
                format!("vertex lies in {} cylinders but has ext 0", cyls_at[i].len()),
            ));
        }
    }

    for &cyl in by_cyl.keys() {
        if !w.complete.contains_key(cyl) {
            out.push(violation(
                Rule::MissingCompleteness,
                vec![cyl.to_owned()],
                "no completeness flag",
            ));
        }
    }
    for cyl in w.complete.keys() {
        if !by_cyl.contains_key(cyl.as_str()) {
            out.push(violation(
                Rule::UnknownCompleteness,
                vec![cyl.clone()],
                "cylinder has no edges",
            ));
        }
    }
    out
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexIx(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeIx(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CylIx(pub usize);

/// A component of the window minus the open edges of one cylinder.
#[derive(Clone, Debug)]
pub struct Atom {
    pub home: CylIx,
    pub attachment: VertexIx,
    pub vertices: FixedBitSet,
    pub infinite: bool,
}

#[derive(Clone, Debug)]
pub struct Cylinder {
    pub ix: CylIx,
    pub id: String,
    pub complete: bool,
    pub edges: Vec<EdgeIx>,
    /// Vertices of the cylinder, ascending.
    pub vertices: Vec<VertexIx>,
    /// Vertices lying in another in-window cylinder or carrying an external one.
    pub boundary: Vec<VertexIx>,
    /// One atom per vertex of the cylinder, in the order of `vertices`.
    pub atoms: Vec<Atom>,
}

impl Cylinder {
    pub fn contains(&self, v: VertexIx) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Position of `v` in `boundary`; infinite atoms are indexed the same way.
    pub fn boundary_pos(&self, v: VertexIx) -> Option<usize> {
        self.boundary.iter().position(|&b| b == v)
    }

    pub fn atom_at(&self, v: VertexIx) -> Option<&Atom> {
        self.vertices.binary_search(&v).ok().map(|i| &self.atoms[i])
    }

    /// Infinite atoms, aligned with `boundary`.
    pub fn infinite_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.boundary
            .iter()
            .map(move |&b| self.atom_at(b).expect("boundary vertex lies on the cylinder"))
    }

    pub fn finite_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter().filter(|a| !a.infinite)
    }
}

/// A window that passed [`validate_window`], with adjacency and cylinder data.
#[derive(Clone, Debug)]
pub struct ValidWindow {
    window: Window,
    vertex_index: HashMap<String, VertexIx>,
    edge_index: HashMap<String, EdgeIx>,
    cyl_index: HashMap<String, CylIx>,
    ends: Vec<(VertexIx, VertexIx)>,
    edge_cyl: Vec<CylIx>,
    adjacency: Vec<Vec<(VertexIx, EdgeIx)>>,
    vertex_cyls: Vec<Vec<CylIx>>,
    flagged: FixedBitSet,
    cylinders: Vec<Cylinder>,
}

impl ValidWindow {
    pub fn new(mut window: Window) -> Result<Self> {
        window.normalize();
        let violations = validate_window(&window);
        if !violations.is_empty() {
            return Err(Error::InvalidWindow(violations));
        }
        let n = window.vertices.len();
        let vertex_index: HashMap<String, VertexIx> = window
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id.clone(), VertexIx(i)))
            .collect();
        let edge_index: HashMap<String, EdgeIx> = window
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id.clone(), EdgeIx(i)))
            .collect();
        let cyl_ids = window.cylinder_ids();
        let cyl_index: HashMap<String, CylIx> =
            cyl_ids.iter().enumerate().map(|(i, c)| (c.clone(), CylIx(i))).collect();

        let ends: Vec<(VertexIx, VertexIx)> = window
            .edges
            .iter()
            .map(|e| (vertex_index[&e.ends[0]], vertex_index[&e.ends[1]]))
            .collect();
        let edge_cyl: Vec<CylIx> = window.edges.iter().map(|e| cyl_index[&e.cyl]).collect();

        let mut adjacency = vec![Vec::new(); n];
        let mut vertex_cyls: Vec<BTreeSet<CylIx>> = vec![BTreeSet::new(); n];
        for (i, &(a, b)) in ends.iter().enumerate() {
            adjacency[a.0].push((b, EdgeIx(i)));
            adjacency[b.0].push((a, EdgeIx(i)));
            vertex_cyls[a.0].insert(edge_cyl[i]);
            vertex_cyls[b.0].insert(edge_cyl[i]);
        }
        let vertex_cyls: Vec<Vec<CylIx>> = vertex_cyls.into_iter().map(|s| s.into_iter().collect()).collect();

        let mut flagged = FixedBitSet::with_capacity(n);
        for (i, v) in window.vertices.iter().enumerate() {
            flagged.set(i, v.ext.is_flagged());
        }

        let mut vw = ValidWindow {
            vertex_index,
            edge_index,
            cyl_index,
            ends,
            edge_cyl,
            adjacency,
            vertex_cyls,
            flagged,
            cylinders: Vec::new(),
            window,
        };
        vw.cylinders = cyl_ids
            .iter()
            .enumerate()
            .map(|(i, id)| vw.build_cylinder(CylIx(i), id))
            .collect();
        Ok(vw)
    }

    fn build_cylinder(&self, ix: CylIx, id: &str) -> Cylinder {
        let edges: Vec<EdgeIx> = (0..self.ends.len())
            .filter(|&e| self.edge_cyl[e] == ix)
            .map(EdgeIx)
            .collect();
        let mut verts = BTreeSet::new();
        for &e in &edges {
            let (a, b) = self.ends[e.0];
            verts.insert(a);
            verts.insert(b);
        }
        let vertices: Vec<VertexIx> = verts.into_iter().collect();
        let boundary: Vec<VertexIx> = vertices
            .iter()
            .copied()
            .filter(|&v| self.vertex_cyls[v.0].len() >= 2 || self.flagged.contains(v.0))
            .collect();
        let atoms = vertices
            .iter()
            .map(|&v| {
                let set = self.component_avoiding(v, |e| self.edge_cyl[e.0] == ix);
                let infinite = set.intersection(&self.flagged).next().is_some();
                Atom {
                    home: ix,
                    attachment: v,
                    vertices: set,
                    infinite,
                }
            })
            .collect();
        Cylinder {
            ix,
            id: id.to_owned(),
            complete: self.window.complete.get(id).copied().unwrap_or(false),
            edges,
            vertices,
            boundary,
            atoms,
        }
    }

    /// Vertices reachable from `start` without crossing edges for which `blocked` holds.
    pub fn component_avoiding(&self, start: VertexIx, blocked: impl Fn(EdgeIx) -> bool) -> FixedBitSet {
        let mut seen = FixedBitSet::with_capacity(self.vertex_count());
        seen.insert(start.0);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &(x, e) in &self.adjacency[u.0] {
                if !blocked(e) && !seen.contains(x.0) {
                    seen.insert(x.0);
                    queue.push_back(x);
                }
            }
        }
        seen
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn vertex_count(&self) -> usize {
        self.window.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.window.edges.len()
    }

    pub fn vertex(&self, id: &str) -> Result<VertexIx> {
        self.vertex_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_owned()))
    }

    pub fn edge(&self, id: &str) -> Result<EdgeIx> {
        self.edge_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownEdge(id.to_owned()))
    }

    pub fn cylinder_ix(&self, id: &str) -> Result<CylIx> {
        self.cyl_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownCylinder(id.to_owned()))
    }

    pub fn vertex_id(&self, v: VertexIx) -> &str {
        &self.window.vertices[v.0].id
    }

    pub fn edge_id(&self, e: EdgeIx) -> &str {
        &self.window.edges[e.0].id
    }

    pub fn ext(&self, v: VertexIx) -> Ext {
        self.window.vertices[v.0].ext
    }

    pub fn is_qh(&self, v: VertexIx) -> bool {
        self.window.vertices[v.0].qh
    }

    pub fn qh_vertices(&self) -> Vec<VertexIx> {
        (0..self.vertex_count())
            .map(VertexIx)
            .filter(|&v| self.is_qh(v))
            .collect()
    }

    /// Vertices with at least one external cylinder.
    pub fn flagged(&self) -> &FixedBitSet {
        &self.flagged
    }

    pub fn is_flagged(&self, v: VertexIx) -> bool {
        self.flagged.contains(v.0)
    }

    pub fn ends(&self, e: EdgeIx) -> (VertexIx, VertexIx) {
        self.ends[e.0]
    }

    pub fn edge_cylinder(&self, e: EdgeIx) -> CylIx {
        self.edge_cyl[e.0]
    }

    pub fn neighbours(&self, v: VertexIx) -> &[(VertexIx, EdgeIx)] {
        &self.adjacency[v.0]
    }

    /// In-window cylinders through `v`, ascending.
    pub fn cylinders_at(&self, v: VertexIx) -> &[CylIx] {
        &self.vertex_cyls[v.0]
    }

    pub fn cylinders(&self) -> &[Cylinder] {
        &self.cylinders
    }

    pub fn cylinder(&self, c: CylIx) -> &Cylinder {
        &self.cylinders[c.0]
    }

    pub fn cyl_id(&self, c: CylIx) -> &str {
        &self.cylinders[c.0].id
    }

    /// The cylinder with id `id`, which must be complete.
    pub fn complete_cylinder(&self, id: &str) -> Result<&Cylinder> {
        let c = self.cylinder(self.cylinder_ix(id)?);
        if c.complete {
            Ok(c)
        } else {
            Err(Error::IncompleteCylinder(id.to_owned()))
        }
    }

    /// All edges lie in a single cylinder that continues outside the window:
    /// the window then stands for a tree made of one cylinder.
    pub fn is_degenerate(&self) -> bool {
        self.cylinders.len() == 1 && !self.cylinders[0].complete
    }

    /// In-window cylinder count plus external cylinders reaches two.
    pub fn in_v0(&self, v: VertexIx) -> bool {
        self.ext(v).reaches(self.vertex_cyls[v.0].len(), 2)
    }

    /// Vertices along the geodesic from `a` to `b`, both ends included.
    pub fn path(&self, a: VertexIx, b: VertexIx) -> Vec<VertexIx> {
        let n = self.vertex_count();
        let mut parent: Vec<Option<VertexIx>> = vec![None; n];
        let mut seen = FixedBitSet::with_capacity(n);
        seen.insert(a.0);
        let mut queue = VecDeque::from([a]);
        while let Some(u) = queue.pop_front() {
            if u == b {
                break;
            }
            for &(x, _) in &self.adjacency[u.0] {
                if !seen.contains(x.0) {
                    seen.insert(x.0);
                    parent[x.0] = Some(u);
                    queue.push_back(x);
                }
            }
        }
        let mut out = vec![b];
        let mut cur = b;
        while let Some(p) = parent[cur.0] {
            out.push(p);
            cur = p;
        }
        out.reverse();
        out
    }

    pub fn edge_between(&self, a: VertexIx, b: VertexIx) -> Option<EdgeIx> {
        self.adjacency[a.0].iter().find(|(x, _)| *x == b).map(|&(_, e)| e)
    }

    /// The vertex of cylinder `c` closest to `x`.
    pub fn project_vertex(&self, c: CylIx, x: VertexIx) -> VertexIx {
        let cyl = self.cylinder(c);
        if cyl.contains(x) {
            return x;
        }
        let target = cyl.vertices[0];
        *self
            .path(x, target)
            .iter()
            .find(|&&v| cyl.contains(v))
            .expect("path reaches the cylinder")
    }

    /// `pr_c(other)`: a single point because distinct cylinders share at most one vertex.
    pub fn project_cylinder(&self, c: CylIx, other: CylIx) -> VertexIx {
        let cyl = self.cylinder(c);
        let oth = self.cylinder(other);
        if let Some(&v) = oth.vertices.iter().find(|&&v| cyl.contains(v)) {
            return v;
        }
        self.project_vertex(c, oth.vertices[0])
    }

    /// Components of the window minus `v`, keyed by the edge leaving `v`.
    pub fn branches(&self, v: VertexIx) -> Vec<(EdgeIx, FixedBitSet)> {
        self.adjacency[v.0]
            .iter()
            .map(|&(x, e)| {
                let mut set = FixedBitSet::with_capacity(self.vertex_count());
                set.insert(x.0);
                let mut queue = VecDeque::from([x]);
                while let Some(u) = queue.pop_front() {
                    for &(y, _) in &self.adjacency[u.0] {
                        if y != v && !set.contains(y.0) {
                            set.insert(y.0);
                            queue.push_back(y);
                        }
                    }
                }
                (e, set)
            })
            .collect()
    }

    pub fn vertex_set_ids(&self, set: &FixedBitSet) -> Vec<String> {
        set.ones().map(|i| self.window.vertices[i].id.clone()).collect()
    }
}

/// The cylinders of a valid window, one per cylinder id.
pub fn cylinders_of(w: &Window) -> Result<Vec<Cylinder>> {
    Ok(ValidWindow::new(w.clone())?.cylinders)
}

/// Whether `v` belongs to two or more cylinders of the tree.
pub fn is_in_v0(w: &ValidWindow, v: &str) -> Result<bool> {
    Ok(w.in_v0(w.vertex(v)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn rules(w: &Window) -> Vec<Rule> {
        validate_window(w).into_iter().map(|v| v.rule).collect()
    }

    #[test]
    fn shipped_fixtures_validate() {
        for (name, w) in fixtures::all() {
            assert!(validate_window(&w).is_empty(), "{name}: {:?}", validate_window(&w));
        }
    }

    #[test]
    fn zero_ext_at_middle_of_line_breaks_valence() {
        let mut w = fixtures::line2();
        w.vertex_mut("u").unwrap().ext = Ext::Finite(0);
        let v = validate_window(&w);
        assert!(v.iter().any(|x| x.rule == Rule::Valence && x.ids == ["u"]));
    }

    #[test]
    fn reassigning_a_star_edge_reevaluates_sharing() {
        let mut w = fixtures::star4();
        w.edge_mut("e1").unwrap().cyl = "Y'".into();
        w.complete.insert("Y'".into(), true);
        let r = rules(&w);
        // m now lies in Y and Y' with no external cylinder
        assert!(r.contains(&Rule::SharedWithoutExternal));
        assert!(!r.contains(&Rule::CylindersShareVertices));
        assert!(!r.contains(&Rule::Valence));
    }

    #[test]
    fn structural_errors() {
        let mut w = fixtures::line2();
        w.edges[0].ends[1] = "z".into();
        assert_eq!(rules(&w), vec![Rule::DanglingEnd]);

        let mut w = fixtures::star3();
        w.edges.push(Edge {
            id: "e9".into(),
            ends: ["v1".into(), "v2".into()],
            cyl: "Y".into(),
        });
        assert!(rules(&w).contains(&Rule::Cycle));

        let mut w = fixtures::star3();
        w.edges.retain(|e| e.id != "e1");
        let r = rules(&w);
        assert!(r.contains(&Rule::NotConnected));

        let mut w = fixtures::star3();
        w.complete.clear();
        assert_eq!(rules(&w), vec![Rule::MissingCompleteness]);

        let mut w = fixtures::qh4();
        w.vertex_mut("q").unwrap().ext = Ext::Finite(3);
        assert_eq!(rules(&w), vec![Rule::QhNotInfinite]);

        let mut w = fixtures::star3();
        w.vertex_mut("v1").unwrap().ext = Ext::Finite(0);
        let r = rules(&w);
        assert!(r.contains(&Rule::LeafWithoutExternal) && r.contains(&Rule::Valence));
    }

    #[test]
    fn disconnected_cylinder_is_reported() {
        // a path x - y - z with both edges in C, plus a middle edge in D
        let w = Window::new(
            vec![
                Vertex {
                    id: "a".into(),
                    ext: Ext::Inf,
                    qh: false,
                },
                Vertex {
                    id: "b".into(),
                    ext: Ext::Inf,
                    qh: false,
                },
                Vertex {
                    id: "c".into(),
                    ext: Ext::Inf,
                    qh: false,
                },
                Vertex {
                    id: "d".into(),
                    ext: Ext::Inf,
                    qh: false,
                },
            ],
            vec![
                Edge {
                    id: "e1".into(),
                    ends: ["a".into(), "b".into()],
                    cyl: "C".into(),
                },
                Edge {
                    id: "e2".into(),
                    ends: ["b".into(), "c".into()],
                    cyl: "D".into(),
                },
                Edge {
                    id: "e3".into(),
                    ends: ["c".into(), "d".into()],
                    cyl: "C".into(),
                },
            ],
            [("C".to_owned(), true), ("D".to_owned(), true)].into(),
        );
        assert!(rules(&w).contains(&Rule::CylinderNotConnected));
    }

    #[test]
    fn star4_cylinder() {
        let cyls = cylinders_of(&fixtures::star4()).unwrap();
        assert_eq!(cyls.len(), 1);
        let vw = ValidWindow::new(fixtures::star4()).unwrap();
        let y = &cyls[0];
        let ids: Vec<&str> = y.boundary.iter().map(|&v| vw.vertex_id(v)).collect();
        assert_eq!(ids, ["v1", "v2", "v3", "v4"]);
        assert_eq!(y.atoms.len(), 5);
        let m = y.atom_at(vw.vertex("m").unwrap()).unwrap();
        assert!(!m.infinite);
        assert_eq!(m.vertices.count_ones(..), 1);
        assert_eq!(y.infinite_atoms().count(), 4);
        for a in y.infinite_atoms() {
            assert_eq!(a.vertices.ones().collect::<Vec<_>>(), vec![a.attachment.0]);
        }
    }

    #[test]
    fn line2_cylinders() {
        let vw = ValidWindow::new(fixtures::line2()).unwrap();
        let y1 = vw.complete_cylinder("Y1").unwrap();
        let ids: Vec<&str> = y1.boundary.iter().map(|&v| vw.vertex_id(v)).collect();
        assert_eq!(ids, ["a", "u"]);
        assert!(y1.atoms.iter().all(|a| a.infinite));
        let u_atom = y1.atom_at(vw.vertex("u").unwrap()).unwrap();
        assert_eq!(vw.vertex_set_ids(&u_atom.vertices), ["b", "u"]);
        let y2 = vw.complete_cylinder("Y2").unwrap();
        let ids: Vec<&str> = y2.boundary.iter().map(|&v| vw.vertex_id(v)).collect();
        assert_eq!(ids, ["b", "u"]);
    }

    #[test]
    fn onecyl_boundary_on_visible_part() {
        let vw = ValidWindow::new(fixtures::onecyl()).unwrap();
        let y = vw.cylinder(vw.cylinder_ix("Y").unwrap());
        assert!(!y.complete);
        assert!(vw.is_degenerate());
        let ids: Vec<&str> = y.boundary.iter().map(|&v| vw.vertex_id(v)).collect();
        assert_eq!(ids, ["a", "b", "d"]);
        assert!(matches!(vw.complete_cylinder("Y"), Err(Error::IncompleteCylinder(_))));
    }

    #[test]
    fn v0_membership() {
        let line = ValidWindow::new(fixtures::line2()).unwrap();
        assert!(is_in_v0(&line, "u").unwrap());
        let star = ValidWindow::new(fixtures::star4()).unwrap();
        assert!(!is_in_v0(&star, "m").unwrap());
        assert!(is_in_v0(&star, "v1").unwrap());
        assert!(matches!(is_in_v0(&star, "nope"), Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn projections() {
        let vw = ValidWindow::new(fixtures::line2()).unwrap();
        let y1 = vw.cylinder_ix("Y1").unwrap();
        let y2 = vw.cylinder_ix("Y2").unwrap();
        assert_eq!(vw.vertex_id(vw.project_cylinder(y1, y2)), "u");
        assert_eq!(vw.vertex_id(vw.project_vertex(y1, vw.vertex("b").unwrap())), "u");
        let comp = fixtures::star4_line();
        let vw = ValidWindow::new(comp).unwrap();
        let y = vw.cylinder_ix("Y").unwrap();
        let z = vw.cylinder_ix("Z").unwrap();
        assert_eq!(vw.vertex_id(vw.project_cylinder(y, z)), "v1");
        assert_eq!(vw.vertex_id(vw.project_cylinder(z, y)), "v1");
    }
}
