//! Cross-connected components, betweenness, stars and the regular
//! neighbourhood graph, with the map of CCCs into the subdivided tree of
//! cylinders.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use petgraph::graph::UnGraph;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forest::{is_peripheral, pairs_of, Class, ClassRepr, ForestClass, Realized};
use crate::qh::{separating_qh, QhClass};
use crate::tc::{Subdivided, TcNode, TcPoint};
use crate::window::{CylIx, UnionFind, ValidWindow, VertexIx};

pub const DEFAULT_CAP: u64 = 4096;

/// QH vertices with at most this many cylinders search every side assignment.
pub const QH_FULL_SEARCH: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CccKind {
    Peripheral { cyl: CylIx, vertex: VertexIx },
    NonPeripheral { cyl: CylIx },
    Qh { vertex: VertexIx },
}

impl CccKind {
    fn order_key(&self) -> (usize, usize, usize, usize) {
        match *self {
            CccKind::Peripheral { cyl, vertex } => (0, cyl.0, 0, vertex.0),
            CccKind::NonPeripheral { cyl } => (0, cyl.0, 1, 0),
            CccKind::Qh { vertex } => (1, 0, 0, vertex.0),
        }
    }

    pub fn label(&self, w: &ValidWindow) -> String {
        match *self {
            CccKind::Peripheral { cyl, vertex } => format!("P({},{})", w.vertex_id(vertex), w.cyl_id(cyl)),
            CccKind::NonPeripheral { cyl } => format!("N({})", w.cyl_id(cyl)),
            CccKind::Qh { vertex } => format!("QH({})", w.vertex_id(vertex)),
        }
    }
}

/// A cross-connected component. Forest kinds list one representative per
/// member pair; a QH component stands for every side assignment at its vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ccc {
    pub kind: CccKind,
    pub members: Vec<ForestClass>,
}

impl Ccc {
    /// Members in both orientations.
    pub fn oriented_members(&self, w: &ValidWindow) -> Result<Vec<Class>> {
        match self.kind {
            CccKind::Qh { vertex } => qh_witnesses(w, vertex),
            _ => Ok(self
                .members
                .iter()
                .flat_map(|m| [Class::Forest(*m), Class::Forest(m.complement())])
                .collect()),
        }
    }
}

/// All side assignments at `v`, or the separating ones when `v` lies on many cylinders.
pub fn qh_witnesses(w: &ValidWindow, v: VertexIx) -> Result<Vec<Class>> {
    let at = w.cylinders_at(v);
    if at.len() <= QH_FULL_SEARCH {
        return Ok(QhClass::all_at(w, v)?.into_iter().map(Class::Qh).collect());
    }
    let mut out = BTreeSet::new();
    for &a in at {
        for &b in at {
            if a != b {
                let s = separating_qh(w, v, a, b)?;
                out.insert(s);
                out.insert(s.complement());
            }
        }
    }
    Ok(out.into_iter().map(Class::Qh).collect())
}

/// Components of the crossing graph on forest class pairs, one per cylinder
/// at a time (classes on different cylinders never cross), then one QH
/// component per QH vertex when `with_qh` is set.
pub fn cross_connected_components(w: &ValidWindow, with_qh: bool, cap: u64) -> Result<Vec<Ccc>> {
    if w.is_degenerate() {
        return Ok(vec![Ccc {
            kind: CccKind::NonPeripheral { cyl: CylIx(0) },
            members: Vec::new(),
        }]);
    }
    let mut out = Vec::new();
    for c in w.cylinders().iter().filter(|c| c.complete) {
        let pairs = pairs_of(w, c.ix, cap)?;
        let reps: Vec<Realized> = pairs.iter().map(|p| Realized::new(w, Class::Forest(*p))).collect();
        let comps: Vec<Realized> = reps.iter().map(|r| r.complement(w)).collect();
        let mut uf = UnionFind::new(pairs.len());
        for i in 0..pairs.len() {
            for j in i + 1..pairs.len() {
                if uf.find(i) == uf.find(j) {
                    continue;
                }
                let mut crossing = true;
                for (x, y) in [
                    (&reps[i], &reps[j]),
                    (&reps[i], &comps[j]),
                    (&comps[i], &reps[j]),
                    (&comps[i], &comps[j]),
                ] {
                    if x.small(w, y)? {
                        crossing = false;
                        break;
                    }
                }
                if crossing {
                    uf.union(i, j);
                }
            }
        }
        let mut groups: Vec<Vec<ForestClass>> = Vec::new();
        let mut root_slot = std::collections::HashMap::new();
        for (i, p) in pairs.iter().enumerate() {
            let r = uf.find(i);
            let slot = *root_slot.entry(r).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[slot].push(*p);
        }
        for members in groups {
            let kind = match (members.len(), is_peripheral(w, &members[0])) {
                (1, Some(_)) if c.boundary.len() == 2 => CccKind::Peripheral {
                    cyl: c.ix,
                    vertex: c.boundary[0],
                },
                (1, Some(v)) => CccKind::Peripheral { cyl: c.ix, vertex: v },
                _ => CccKind::NonPeripheral { cyl: c.ix },
            };
            out.push(Ccc { kind, members });
        }
    }
    if with_qh {
        for v in w.qh_vertices() {
            out.push(Ccc {
                kind: CccKind::Qh { vertex: v },
                members: Vec::new(),
            });
        }
    }
    out.sort_by_key(|c| c.kind.order_key());
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CccCensus {
    pub peripheral_count: usize,
    pub has_non_peripheral: bool,
}

/// What the classification of cross-connected components predicts from `|∂Y|` alone.
pub fn predicted_ccc_census(w: &ValidWindow, cyl: &str) -> Result<CccCensus> {
    let c = w.complete_cylinder(cyl)?;
    Ok(match c.boundary.len() {
        0 => CccCensus {
            peripheral_count: 0,
            has_non_peripheral: true,
        },
        1 => return Err(Error::SingleBoundary(c.id.clone())),
        2 => CccCensus {
            peripheral_count: 1,
            has_non_peripheral: false,
        },
        k => CccCensus {
            peripheral_count: k,
            has_non_peripheral: k != 3,
        },
    })
}

/// The census of the computed components based on `cyl`.
pub fn observed_ccc_census(cccs: &[Ccc], cyl: CylIx) -> CccCensus {
    let mut census = CccCensus {
        peripheral_count: 0,
        has_non_peripheral: false,
    };
    for c in cccs {
        match c.kind {
            CccKind::Peripheral { cyl: y, .. } if y == cyl => census.peripheral_count += 1,
            CccKind::NonPeripheral { cyl: y } if y == cyl => census.has_non_peripheral = true,
            _ => {}
        }
    }
    census
}

/// Precomputed order data answering "is `b` between `a` and `c`" for a
/// fixed list of components.
#[derive(Clone, Debug)]
pub struct BetweenTable {
    member_of: Vec<FixedBitSet>,
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
}

impl BetweenTable {
    pub fn new(w: &ValidWindow, cccs: &[Ccc]) -> Result<Self> {
        let mut members: Vec<Realized> = Vec::new();
        let mut owner = Vec::new();
        for (i, c) in cccs.iter().enumerate() {
            for m in c.oriented_members(w)? {
                members.push(Realized::new(w, m));
                owner.push(i);
            }
        }
        let n = members.len();
        let comps: Vec<Realized> = members.iter().map(|m| m.complement(w)).collect();
        let mut member_of = vec![FixedBitSet::with_capacity(n); cccs.len()];
        for (j, &o) in owner.iter().enumerate() {
            member_of[o].insert(j);
        }
        // leq[i] holds every j with members[i] <= members[j]
        let mut leq = vec![FixedBitSet::with_capacity(n); n];
        for i in 0..n {
            for j in 0..n {
                if owner[i] != owner[j] && members[i].leq(w, &comps[j])? {
                    leq[i].insert(j);
                }
            }
        }
        let mut up = vec![FixedBitSet::with_capacity(n); cccs.len()];
        let mut down = vec![FixedBitSet::with_capacity(n); cccs.len()];
        for i in 0..n {
            up[owner[i]].union_with(&leq[i]);
            for (c, set) in member_of.iter().enumerate() {
                if !leq[i].is_disjoint(set) {
                    down[c].insert(i);
                }
            }
        }
        Ok(BetweenTable { member_of, up, down })
    }

    /// Whether some members satisfy `x_a <= x_b <= x_c`.
    pub fn between(&self, a: usize, b: usize, c: usize) -> bool {
        self.member_of[b]
            .ones()
            .any(|j| self.up[a].contains(j) && self.down[c].contains(j))
    }

    pub fn len(&self) -> usize {
        self.member_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.member_of.is_empty()
    }

    /// Some component lies between `a` and `b`.
    pub fn separated(&self, a: usize, b: usize) -> bool {
        (0..self.len()).any(|k| k != a && k != b && self.between(a, k, b))
    }
}

/// Whether `c2` lies between `c1` and `c3`.
pub fn ccc_between(w: &ValidWindow, c1: &Ccc, c2: &Ccc, c3: &Ccc) -> Result<bool> {
    if c1.kind == c2.kind || c2.kind == c3.kind || c1.kind == c3.kind {
        return Err(Error::NotDistinct);
    }
    let t = BetweenTable::new(w, &[c1.clone(), c2.clone(), c3.clone()])?;
    Ok(t.between(0, 1, 2))
}

/// Maximal sets of two or more components with nothing between any two of them.
pub fn stars_of(table: &BetweenTable) -> Vec<Vec<usize>> {
    let n = table.len();
    let mut g = UnGraph::<(), ()>::new_undirected();
    let ids: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for a in 0..n {
        for b in a + 1..n {
            if !table.separated(a, b) {
                g.add_edge(ids[a], ids[b], ());
            }
        }
    }
    let mut stars: Vec<Vec<usize>> = petgraph::algo::maximal_cliques(&g)
        .into_iter()
        .filter(|c| c.len() >= 2)
        .map(|c| {
            let mut s: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
            s.sort_unstable();
            s
        })
        .collect();
    stars.sort();
    stars
}

/// The bipartite graph on components and stars.
#[derive(Clone, Debug)]
pub struct RnGraph {
    pub cccs: Vec<Ccc>,
    pub stars: Vec<Vec<usize>>,
    /// `(component, star)` index pairs.
    pub edges: Vec<(usize, usize)>,
}

impl RnGraph {
    pub fn from_cccs(w: &ValidWindow, cccs: Vec<Ccc>) -> Result<Self> {
        let table = BetweenTable::new(w, &cccs)?;
        let stars = stars_of(&table);
        let edges = stars
            .iter()
            .enumerate()
            .flat_map(|(s, m)| m.iter().map(move |&c| (c, s)))
            .collect();
        Ok(RnGraph { cccs, stars, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.cccs.len() + self.stars.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Vertex index of star `s` when components come first.
    pub fn star_vertex(&self, s: usize) -> usize {
        self.cccs.len() + s
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for &(c, s) in &self.edges {
            adj[c].push(self.star_vertex(s));
            adj[self.star_vertex(s)].push(c);
        }
        adj
    }

    pub fn is_tree(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 || self.edge_count() + 1 != n {
            return false;
        }
        let mut uf = UnionFind::new(n);
        self.edges.iter().all(|&(c, s)| uf.union(c, self.star_vertex(s)))
    }

    pub fn to_json(&self, w: &ValidWindow) -> RnJson {
        RnJson {
            ccc: self
                .cccs
                .iter()
                .map(|c| {
                    let (kind, cyl, vertex) = match c.kind {
                        CccKind::Peripheral { cyl, vertex } => ("peripheral", Some(cyl), Some(vertex)),
                        CccKind::NonPeripheral { cyl } => ("non_peripheral", Some(cyl), None),
                        CccKind::Qh { vertex } => ("qh", None, Some(vertex)),
                    };
                    CccJson {
                        label: c.kind.label(w),
                        kind,
                        cyl: cyl.map(|x| w.cyl_id(x).to_owned()),
                        vertex: vertex.map(|x| w.vertex_id(x).to_owned()),
                        members: c.members.iter().map(|m| Class::Forest(*m).to_repr(w)).collect(),
                    }
                })
                .collect(),
            stars: self.stars.clone(),
            edges: self.edges.iter().map(|&(c, s)| [c, s]).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CccJson {
    pub label: String,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cyl: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex: Option<String>,
    pub members: Vec<ClassRepr>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RnJson {
    pub ccc: Vec<CccJson>,
    pub stars: Vec<Vec<usize>>,
    pub edges: Vec<[usize; 2]>,
}

pub fn build_rn(w: &ValidWindow, with_qh: bool, cap: u64) -> Result<RnGraph> {
    RnGraph::from_cccs(w, cross_connected_components(w, with_qh, cap)?)
}

/// The point of the subdivided tree of cylinders assigned to a component.
pub fn phi(w: &ValidWindow, sd: &Subdivided, kind: &CccKind) -> TcPoint {
    let node = |n: TcNode| sd.tc.node_index(n).expect("node of the tree of cylinders");
    match *kind {
        CccKind::NonPeripheral { cyl } => TcPoint::Node(node(TcNode::Cyl(cyl))),
        CccKind::Peripheral { cyl, .. } if w.cylinder(cyl).boundary.len() == 2 => TcPoint::Node(node(TcNode::Cyl(cyl))),
        CccKind::Peripheral { cyl, vertex } => {
            let e = sd
                .tc
                .edge_index(node(TcNode::V0(vertex)), node(TcNode::Cyl(cyl)))
                .expect("boundary vertex meets its cylinder");
            TcPoint::Mid(e)
        }
        CccKind::Qh { vertex } => TcPoint::Node(node(TcNode::V0(vertex))),
    }
}
