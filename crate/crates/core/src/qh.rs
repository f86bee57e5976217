//! Classes of subtrees dual to boundary curves of a QH vertex.
//!
//! At a QH vertex `v` each incident in-window cylinder is put on the `+` or
//! `-` side of a separating curve. The realization is `v` together with the
//! branches at `v` whose first edge lies in a `+` cylinder; external
//! cylinders at `v` are never assigned, which is what keeps both the class
//! and its complement infinite.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::window::{CylIx, ValidWindow, VertexIx};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }
}

/// `plus` has bit `i` set when `cylinders_at(vertex)[i]` is on the `+` side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QhClass {
    vertex: VertexIx,
    plus: u64,
    width: u8,
}

impl QhClass {
    pub(crate) fn from_bits(w: &ValidWindow, v: VertexIx, plus: u64) -> Result<Self> {
        if !w.is_qh(v) {
            return Err(Error::NotQh(w.vertex_id(v).to_owned()));
        }
        let k = w.cylinders_at(v).len();
        if k > 64 {
            return Err(Error::TooWide(k));
        }
        let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        Ok(QhClass {
            vertex: v,
            plus: plus & full,
            width: k as u8,
        })
    }

    pub fn vertex(&self) -> VertexIx {
        self.vertex
    }

    pub fn plus_mask(&self) -> u64 {
        self.plus
    }

    pub fn complement(&self) -> Self {
        let full = if self.width == 64 {
            u64::MAX
        } else {
            (1u64 << self.width) - 1
        };
        QhClass {
            plus: !self.plus & full,
            ..*self
        }
    }

    pub fn side(&self, w: &ValidWindow, cyl: CylIx) -> Option<Side> {
        let i = w.cylinders_at(self.vertex).iter().position(|&c| c == cyl)?;
        Some(if self.plus >> i & 1 == 1 {
            Side::Plus
        } else {
            Side::Minus
        })
    }

    pub fn sides(&self, w: &ValidWindow) -> Vec<(CylIx, Side)> {
        w.cylinders_at(self.vertex)
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                (
                    c,
                    if self.plus >> i & 1 == 1 {
                        Side::Plus
                    } else {
                        Side::Minus
                    },
                )
            })
            .collect()
    }

    pub fn realize(&self, w: &ValidWindow) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(w.vertex_count());
        set.insert(self.vertex.0);
        for (e, branch) in w.branches(self.vertex) {
            if self.side(w, w.edge_cylinder(e)) == Some(Side::Plus) {
                set.union_with(&branch);
            }
        }
        set
    }

    /// Every side assignment at `v`.
    pub fn all_at(w: &ValidWindow, v: VertexIx) -> Result<Vec<QhClass>> {
        let k = w.cylinders_at(v).len();
        if k >= 63 {
            return Err(Error::TooWide(k));
        }
        (0..1u64 << k).map(|m| QhClass::from_bits(w, v, m)).collect()
    }
}

/// The QH class at `v` with the given side for every in-window cylinder through `v`.
pub fn qh_class(w: &ValidWindow, v: VertexIx, sides: &BTreeMap<CylIx, Side>) -> Result<QhClass> {
    if !w.is_qh(v) {
        return Err(Error::NotQh(w.vertex_id(v).to_owned()));
    }
    for c in sides.keys() {
        if !w.cylinders_at(v).contains(c) {
            return Err(Error::NotOnCylinder {
                vertex: w.vertex_id(v).to_owned(),
                cyl: w.cyl_id(*c).to_owned(),
            });
        }
    }
    let mut plus = 0u64;
    for (i, &c) in w.cylinders_at(v).iter().enumerate() {
        match sides.get(&c) {
            Some(Side::Plus) => plus |= 1 << i,
            Some(Side::Minus) => {}
            None => {
                return Err(Error::MissingSide {
                    vertex: w.vertex_id(v).to_owned(),
                    cyl: w.cyl_id(c).to_owned(),
                })
            }
        }
    }
    QhClass::from_bits(w, v, plus)
}

/// What to project to the link of a QH vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QhTarget {
    Cylinder(CylIx),
    Vertex(VertexIx),
}

/// The cylinder through `v` in whose direction `target` lies.
pub fn eta_v(w: &ValidWindow, v: VertexIx, target: QhTarget) -> Result<CylIx> {
    if !w.is_qh(v) {
        return Err(Error::NotQh(w.vertex_id(v).to_owned()));
    }
    let x = match target {
        QhTarget::Cylinder(c) if w.cylinder(c).contains(v) => return Ok(c),
        QhTarget::Cylinder(c) => w.project_vertex(c, v),
        QhTarget::Vertex(x) if x == v => {
            return Err(Error::Projection(format!(
                "vertex `{}` projects to itself",
                w.vertex_id(v)
            )))
        }
        QhTarget::Vertex(x) => x,
    };
    let path = w.path(v, x);
    let e = w
        .edge_between(path[0], path[1])
        .expect("consecutive path vertices are adjacent");
    Ok(w.edge_cylinder(e))
}

/// A QH class at `v` with `y1` on the `+` side and `y3` on the `-` side; the
/// other cylinders alternate `+`, `-` in id order.
pub fn separating_qh(w: &ValidWindow, v: VertexIx, y1: CylIx, y3: CylIx) -> Result<QhClass> {
    if y1 == y3 {
        return Err(Error::NotDistinct);
    }
    let at = w.cylinders_at(v);
    for c in [y1, y3] {
        if !at.contains(&c) {
            return Err(Error::NotOnCylinder {
                vertex: w.vertex_id(v).to_owned(),
                cyl: w.cyl_id(c).to_owned(),
            });
        }
    }
    let mut sides = BTreeMap::from([(y1, Side::Plus), (y3, Side::Minus)]);
    let mut next = Side::Plus;
    for &c in at.iter().filter(|&&c| c != y1 && c != y3) {
        sides.insert(c, next);
        next = next.flip();
    }
    qh_class(w, v, &sides)
}
