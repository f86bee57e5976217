//! The tree of cylinders: bipartite tree dual to the covering of the tree by
//! its cylinders, and its barycentric subdivision used for point queries.

use std::collections::{HashMap, VecDeque};

use petgraph::graph::UnGraph;

use crate::error::Result;
use crate::window::{CylIx, ValidWindow, VertexIx, Window};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TcNode {
    /// A window vertex lying in two or more cylinders.
    V0(VertexIx),
    /// An in-window cylinder, complete or not.
    Cyl(CylIx),
    /// An external cylinder at a vertex; `slot` is `None` for the single
    /// marker standing for infinitely many.
    Stub { at: VertexIx, slot: Option<u32> },
}

impl TcNode {
    pub fn is_v0(&self) -> bool {
        matches!(self, TcNode::V0(_))
    }
}

#[derive(Clone, Debug)]
pub struct TreeOfCylinders {
    nodes: Vec<TcNode>,
    edges: Vec<(usize, usize)>,
    index: HashMap<TcNode, usize>,
}

impl TreeOfCylinders {
    pub fn new(w: &ValidWindow) -> Self {
        let mut t = TreeOfCylinders {
            nodes: Vec::new(),
            edges: Vec::new(),
            index: HashMap::new(),
        };
        if w.is_degenerate() {
            t.push(TcNode::Cyl(CylIx(0)));
            return t;
        }
        for c in w.cylinders() {
            t.push(TcNode::Cyl(c.ix));
        }
        for v in (0..w.vertex_count()).map(VertexIx) {
            if !w.in_v0(v) {
                continue;
            }
            let x = t.push(TcNode::V0(v));
            for &c in w.cylinders_at(v) {
                let y = t.index[&TcNode::Cyl(c)];
                t.edges.push((x, y));
            }
            let slots: Vec<Option<u32>> = match w.ext(v) {
                crate::window::Ext::Inf => vec![None],
                crate::window::Ext::Finite(k) => (0..k).map(Some).collect(),
            };
            for slot in slots {
                let s = t.push(TcNode::Stub { at: v, slot });
                t.edges.push((x, s));
            }
        }
        t
    }

    fn push(&mut self, n: TcNode) -> usize {
        let i = self.nodes.len();
        self.nodes.push(n);
        self.index.insert(n, i);
        i
    }

    pub fn nodes(&self) -> &[TcNode] {
        &self.nodes
    }

    /// Edges as `(V0 node, V1 node)` index pairs.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn node_index(&self, n: TcNode) -> Option<usize> {
        self.index.get(&n).copied()
    }

    pub fn v0(&self) -> impl Iterator<Item = VertexIx> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            TcNode::V0(v) => Some(*v),
            _ => None,
        })
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges
            .iter()
            .position(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
    }

    pub fn label(&self, w: &ValidWindow, i: usize) -> String {
        match self.nodes[i] {
            TcNode::V0(v) => w.vertex_id(v).to_owned(),
            TcNode::Cyl(c) => format!("[{}]", w.cyl_id(c)),
            TcNode::Stub { at, slot: None } => format!("ext({})*", w.vertex_id(at)),
            TcNode::Stub { at, slot: Some(k) } => format!("ext({}).{}", w.vertex_id(at), k),
        }
    }

    /// Connected, acyclic and bipartite between V0 and V1.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let mut g = UnGraph::<(), ()>::new_undirected();
        let ids: Vec<_> = self.nodes.iter().map(|_| g.add_node(())).collect();
        for &(a, b) in &self.edges {
            if self.nodes[a].is_v0() == self.nodes[b].is_v0() {
                return Err(format!("edge {a}-{b} joins two nodes of the same class"));
            }
            g.add_edge(ids[a], ids[b], ());
        }
        if !self.nodes.is_empty() && petgraph::algo::connected_components(&g) != 1 {
            return Err("tree of cylinders is disconnected".into());
        }
        if petgraph::algo::is_cyclic_undirected(&g) {
            return Err("tree of cylinders has a cycle".into());
        }
        Ok(())
    }
}

pub fn tree_of_cylinders(w: &Window) -> Result<TreeOfCylinders> {
    Ok(TreeOfCylinders::new(&ValidWindow::new(w.clone())?))
}

/// A point of the subdivided tree of cylinders: a node or the midpoint of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TcPoint {
    Node(usize),
    Mid(usize),
}

/// The tree of cylinders with every edge split at its midpoint, and all
/// pairwise distances in half-edge units.
#[derive(Clone, Debug)]
pub struct Subdivided {
    pub tc: TreeOfCylinders,
    adjacency: Vec<Vec<usize>>,
    dist: Vec<Vec<u32>>,
}

impl Subdivided {
    pub fn new(tc: TreeOfCylinders) -> Self {
        let n = tc.nodes.len();
        let total = n + tc.edges.len();
        let mut adjacency = vec![Vec::new(); total];
        for (e, &(a, b)) in tc.edges.iter().enumerate() {
            let m = n + e;
            adjacency[a].push(m);
            adjacency[m].push(a);
            adjacency[b].push(m);
            adjacency[m].push(b);
        }
        let dist = (0..total)
            .map(|s| {
                let mut d = vec![u32::MAX; total];
                d[s] = 0;
                let mut queue = VecDeque::from([s]);
                while let Some(u) = queue.pop_front() {
                    for &x in &adjacency[u] {
                        if d[x] == u32::MAX {
                            d[x] = d[u] + 1;
                            queue.push_back(x);
                        }
                    }
                }
                d
            })
            .collect();
        Subdivided { tc, adjacency, dist }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn index(&self, p: TcPoint) -> usize {
        match p {
            TcPoint::Node(i) => i,
            TcPoint::Mid(e) => self.tc.nodes.len() + e,
        }
    }

    pub fn point(&self, i: usize) -> TcPoint {
        let n = self.tc.nodes.len();
        if i < n {
            TcPoint::Node(i)
        } else {
            TcPoint::Mid(i - n)
        }
    }

    pub fn neighbours(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Distance in half-edge units.
    pub fn distance(&self, a: TcPoint, b: TcPoint) -> u32 {
        self.dist[self.index(a)][self.index(b)]
    }

    pub fn dist_ix(&self, a: usize, b: usize) -> u32 {
        self.dist[a][b]
    }

    /// Whether `b` lies on the geodesic `[a, c]`.
    pub fn on_path(&self, a: TcPoint, b: TcPoint, c: TcPoint) -> bool {
        let (a, b, c) = (self.index(a), self.index(b), self.index(c));
        self.dist[a][b] + self.dist[b][c] == self.dist[a][c]
    }

    /// Whether `a` and `b` lie in the same component of the tree minus `cut`.
    pub fn same_side(&self, a: TcPoint, b: TcPoint, cut: TcPoint) -> bool {
        a != cut && b != cut && !self.on_path(a, cut, b)
    }

    pub fn label(&self, w: &ValidWindow, p: TcPoint) -> String {
        match p {
            TcPoint::Node(i) => self.tc.label(w, i),
            TcPoint::Mid(e) => {
                let (a, b) = self.tc.edges[e];
                format!("mid({},{})", self.tc.label(w, a), self.tc.label(w, b))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn build(w: Window) -> (ValidWindow, TreeOfCylinders) {
        let vw = ValidWindow::new(w).unwrap();
        let tc = TreeOfCylinders::new(&vw);
        (vw, tc)
    }

    fn adjacent(tc: &TreeOfCylinders, a: TcNode, b: TcNode) -> bool {
        let (a, b) = (tc.node_index(a).unwrap(), tc.node_index(b).unwrap());
        tc.edge_index(a, b).is_some()
    }

    #[test]
    fn line2_is_a_path_with_stubs() {
        let (vw, tc) = build(fixtures::line2());
        tc.check_invariants().unwrap();
        let v = |id| TcNode::V0(vw.vertex(id).unwrap());
        let c = |id| TcNode::Cyl(vw.cylinder_ix(id).unwrap());
        assert!(adjacent(&tc, v("a"), c("Y1")));
        assert!(adjacent(&tc, v("u"), c("Y1")));
        assert!(adjacent(&tc, v("u"), c("Y2")));
        assert!(adjacent(&tc, v("b"), c("Y2")));
        assert!(!adjacent(&tc, v("a"), c("Y2")));
        let stubs: Vec<_> = tc.nodes().iter().filter(|n| matches!(n, TcNode::Stub { .. })).collect();
        assert_eq!(stubs.len(), 3);
        let u = vw.vertex("u").unwrap();
        assert!(tc.nodes().contains(&TcNode::Stub { at: u, slot: Some(0) }));
        assert_eq!(tc.nodes().len(), 8);
        assert_eq!(tc.edges().len(), 7);
    }

    #[test]
    fn star4_is_a_star() {
        let (vw, tc) = build(fixtures::star4());
        tc.check_invariants().unwrap();
        let v0: Vec<&str> = tc.v0().map(|v| vw.vertex_id(v)).collect();
        assert_eq!(v0, ["v1", "v2", "v3", "v4"]);
        let y = TcNode::Cyl(vw.cylinder_ix("Y").unwrap());
        for id in v0 {
            assert!(adjacent(&tc, TcNode::V0(vw.vertex(id).unwrap()), y));
        }
        assert!(tc.node_index(TcNode::V0(vw.vertex("m").unwrap())).is_none());
    }

    #[test]
    fn onecyl_is_a_point() {
        let (_, tc) = build(fixtures::onecyl());
        assert_eq!(tc.nodes().len(), 1);
        assert!(tc.edges().is_empty());
        assert!(matches!(tc.nodes()[0], TcNode::Cyl(_)));
        tc.check_invariants().unwrap();
    }

    #[test]
    fn subdivided_distances() {
        let (vw, tc) = build(fixtures::line2());
        let y1 = tc.node_index(TcNode::Cyl(vw.cylinder_ix("Y1").unwrap())).unwrap();
        let y2 = tc.node_index(TcNode::Cyl(vw.cylinder_ix("Y2").unwrap())).unwrap();
        let u = tc.node_index(TcNode::V0(vw.vertex("u").unwrap())).unwrap();
        let sd = Subdivided::new(tc);
        assert_eq!(sd.distance(TcPoint::Node(y1), TcPoint::Node(y2)), 4);
        assert!(sd.on_path(TcPoint::Node(y1), TcPoint::Node(u), TcPoint::Node(y2)));
        let e = sd.tc.edge_index(u, y1).unwrap();
        assert_eq!(sd.distance(TcPoint::Mid(e), TcPoint::Node(y1)), 1);
        assert!(sd.same_side(TcPoint::Mid(e), TcPoint::Node(y1), TcPoint::Node(u)));
    }
}
