//! Boolean algebras of special-forest classes based on a cylinder.
//!
//! For a complete cylinder `Y` the classes of special forests based on `Y`,
//! modulo finite symmetric difference, form the algebra of subsets of the
//! infinite atoms of `Y`. A [`ForestClass`] stores that subset as a bit mask
//! indexed by `Cylinder::boundary` (each infinite atom is attached at exactly
//! one boundary vertex), so class equality is plain equality.
//!
//! Smallness of an intersection is decided on realizations inside the
//! window: for two forest classes the intersection is infinite in the tree
//! exactly when it touches a vertex carrying an external cylinder.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qh::QhClass;
use crate::window::{CylIx, ValidWindow, VertexIx};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ForestClass {
    cyl: CylIx,
    mask: u64,
    width: u8,
}

fn full_mask(width: u8) -> u64 {
    if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

impl ForestClass {
    /// The class whose mask selects the infinite atoms at `boundary[i]` for each set bit `i`.
    pub fn new(w: &ValidWindow, cyl: CylIx, mask: u64) -> Result<Self> {
        let c = w.cylinder(cyl);
        if !c.complete {
            return Err(Error::IncompleteCylinder(c.id.clone()));
        }
        let k = c.boundary.len();
        if k > 64 {
            return Err(Error::TooWide(k));
        }
        let width = k as u8;
        Ok(ForestClass {
            cyl,
            mask: mask & full_mask(width),
            width,
        })
    }

    pub fn from_attachments(w: &ValidWindow, cyl: CylIx, atoms: &[VertexIx]) -> Result<Self> {
        let c = w.cylinder(cyl);
        let mut mask = 0u64;
        for &v in atoms {
            let pos = c.boundary_pos(v).ok_or_else(|| Error::NotOnBoundary {
                vertex: w.vertex_id(v).to_owned(),
                cyl: c.id.clone(),
            })?;
            mask |= 1 << pos;
        }
        ForestClass::new(w, cyl, mask)
    }

    pub fn cylinder(&self) -> CylIx {
        self.cyl
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// Number of infinite atoms of the home cylinder.
    pub fn width(&self) -> u8 {
        self.width
    }

    pub fn complement(&self) -> Self {
        ForestClass {
            mask: !self.mask & full_mask(self.width),
            ..*self
        }
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.same_cylinder(other)?;
        Ok(ForestClass {
            mask: self.mask & other.mask,
            ..*self
        })
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        self.same_cylinder(other)?;
        Ok(ForestClass {
            mask: self.mask | other.mask,
            ..*self
        })
    }

    fn same_cylinder(&self, other: &Self) -> Result<()> {
        if self.cyl != other.cyl {
            return Err(Error::CylinderMismatch(
                format!("{:?}", self.cyl),
                format!("{:?}", other.cyl),
            ));
        }
        Ok(())
    }

    /// Empty or full mask: the class of a finite set or of a cofinite one.
    pub fn is_trivial(&self) -> bool {
        self.mask == 0 || self.mask == full_mask(self.width)
    }

    pub fn attachments(&self, w: &ValidWindow) -> Vec<VertexIx> {
        let c = w.cylinder(self.cyl);
        (0..self.width as usize)
            .filter(|i| self.mask >> i & 1 == 1)
            .map(|i| c.boundary[i])
            .collect()
    }

    /// Union of the selected atoms. External hangings at a vertex follow it.
    pub fn realize(&self, w: &ValidWindow) -> FixedBitSet {
        let c = w.cylinder(self.cyl);
        let mut set = FixedBitSet::with_capacity(w.vertex_count());
        for (i, atom) in c.infinite_atoms().enumerate() {
            if self.mask >> i & 1 == 1 {
                set.union_with(&atom.vertices);
            }
        }
        set
    }

    fn single(&self) -> Option<usize> {
        (self.mask.count_ones() == 1).then(|| self.mask.trailing_zeros() as usize)
    }
}

/// A forest class or a QH class: anything that can stand on either side of
/// a smallness or crossing test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    Forest(ForestClass),
    Qh(QhClass),
}

impl Class {
    pub fn complement(&self) -> Class {
        match self {
            Class::Forest(f) => Class::Forest(f.complement()),
            Class::Qh(q) => Class::Qh(q.complement()),
        }
    }

    pub fn realize(&self, w: &ValidWindow) -> FixedBitSet {
        match self {
            Class::Forest(f) => f.realize(w),
            Class::Qh(q) => q.realize(w),
        }
    }

    pub fn to_repr(&self, w: &ValidWindow) -> ClassRepr {
        match self {
            Class::Forest(f) => ClassRepr::Forest {
                cyl: w.cyl_id(f.cyl).to_owned(),
                atoms: sorted_ids(w, f.attachments(w)),
            },
            Class::Qh(q) => {
                let (plus, minus): (Vec<_>, Vec<_>) =
                    q.sides(w).into_iter().partition(|(_, s)| *s == crate::qh::Side::Plus);
                let names = |v: Vec<(CylIx, crate::qh::Side)>| {
                    let mut out: Vec<String> = v.into_iter().map(|(c, _)| w.cyl_id(c).to_owned()).collect();
                    out.sort();
                    out
                };
                ClassRepr::Qh {
                    qh: w.vertex_id(q.vertex()).to_owned(),
                    plus: names(plus),
                    minus: names(minus),
                }
            }
        }
    }

    pub fn from_repr(w: &ValidWindow, r: &ClassRepr) -> Result<Class> {
        match r {
            ClassRepr::Forest { cyl, atoms } => {
                let c = w.cylinder_ix(cyl)?;
                let vs = atoms.iter().map(|a| w.vertex(a)).collect::<Result<Vec<_>>>()?;
                Ok(Class::Forest(ForestClass::from_attachments(w, c, &vs)?))
            }
            ClassRepr::Qh { qh, plus, minus } => {
                let v = w.vertex(qh)?;
                let mut sides = std::collections::BTreeMap::new();
                for c in plus {
                    sides.insert(w.cylinder_ix(c)?, crate::qh::Side::Plus);
                }
                for c in minus {
                    sides.insert(w.cylinder_ix(c)?, crate::qh::Side::Minus);
                }
                Ok(Class::Qh(crate::qh::qh_class(w, v, &sides)?))
            }
        }
    }
}

fn sorted_ids(w: &ValidWindow, vs: Vec<VertexIx>) -> Vec<String> {
    let mut out: Vec<String> = vs.into_iter().map(|v| w.vertex_id(v).to_owned()).collect();
    out.sort();
    out
}

impl From<ForestClass> for Class {
    fn from(f: ForestClass) -> Self {
        Class::Forest(f)
    }
}

impl From<QhClass> for Class {
    fn from(q: QhClass) -> Self {
        Class::Qh(q)
    }
}

/// Wire form: `{"cyl", "atoms"}` for forests, `{"qh", "plus", "minus"}` for QH classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClassRepr {
    Forest {
        cyl: String,
        atoms: Vec<String>,
    },
    Qh {
        qh: String,
        plus: Vec<String>,
        minus: Vec<String>,
    },
}

/// A class together with its realization, for repeated predicate evaluation.
#[derive(Clone, Debug)]
pub(crate) struct Realized {
    pub class: Class,
    pub set: FixedBitSet,
}

impl Realized {
    pub fn new(w: &ValidWindow, class: Class) -> Self {
        Realized {
            set: class.realize(w),
            class,
        }
    }

    pub fn small(&self, w: &ValidWindow, other: &Realized) -> Result<bool> {
        match (&self.class, &other.class) {
            (Class::Forest(_), Class::Forest(_)) => {
                Ok(!self.set.intersection(&other.set).any(|v| w.flagged().contains(v)))
            }
            (Class::Qh(a), Class::Qh(b)) if a.vertex() == b.vertex() => {
                if a == b {
                    Ok(false)
                } else if a.complement() == *b {
                    Ok(true)
                } else {
                    Err(Error::QhSameVertex(w.vertex_id(a.vertex()).to_owned()))
                }
            }
            _ => Ok(self.set.is_disjoint(&other.set)),
        }
    }

    pub fn complement(&self, w: &ValidWindow) -> Realized {
        Realized::new(w, self.class.complement())
    }

    /// `self <= other` up to a small correction.
    pub fn leq(&self, w: &ValidWindow, other_complement: &Realized) -> Result<bool> {
        self.small(w, other_complement)
    }
}

pub fn small_intersection(w: &ValidWindow, a: &Class, b: &Class) -> Result<bool> {
    Realized::new(w, *a).small(w, &Realized::new(w, *b))
}

/// None of the four corner intersections is small.
pub fn crosses(w: &ValidWindow, a: &Class, b: &Class) -> Result<bool> {
    let ra = Realized::new(w, *a);
    let rb = Realized::new(w, *b);
    let ca = ra.complement(w);
    let cb = rb.complement(w);
    for (x, y) in [(&ra, &rb), (&ra, &cb), (&ca, &rb), (&ca, &cb)] {
        if x.small(w, y)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn coarse_leq(w: &ValidWindow, a: &Class, b: &Class) -> Result<bool> {
    small_intersection(w, a, &b.complement())
}

/// The class of the half-tree beyond edge `edge` on the side of `toward`.
pub fn z_generator(w: &ValidWindow, edge: &str, toward: &str) -> Result<ForestClass> {
    let e = w.edge(edge)?;
    let v = w.vertex(toward)?;
    let (a, b) = w.ends(e);
    if v != a && v != b {
        return Err(Error::NotAnEnd {
            edge: edge.to_owned(),
            vertex: toward.to_owned(),
        });
    }
    let cyl = w.edge_cylinder(e);
    let side = w.component_avoiding(v, |x| x == e);
    let c = w.cylinder(cyl);
    let attach: Vec<VertexIx> = c.boundary.iter().copied().filter(|b| side.contains(b.0)).collect();
    ForestClass::from_attachments(w, cyl, &attach)
}

/// The class of `pr_Y^{-1}(v)`: the single infinite atom of `Y` at `v`.
pub fn peripheral_class(w: &ValidWindow, v: &str, cyl: &str) -> Result<ForestClass> {
    let c = w.complete_cylinder(cyl)?;
    let vx = w.vertex(v)?;
    ForestClass::from_attachments(w, c.ix, &[vx])
}

/// The vertex `v` when `x` or its complement is the peripheral class at `v`.
/// A mask that is itself a single atom reports its own attachment.
pub fn is_peripheral(w: &ValidWindow, x: &ForestClass) -> Option<VertexIx> {
    let c = w.cylinder(x.cyl);
    x.single().or_else(|| x.complement().single()).map(|i| c.boundary[i])
}

/// One class per non-trivial complementary pair based on `cyl`; the
/// representative never contains the last infinite atom.
pub fn enumerate_class_pairs(w: &ValidWindow, cyl: &str, cap: u64) -> Result<Vec<ForestClass>> {
    let c = w.complete_cylinder(cyl)?;
    pairs_of(w, c.ix, cap)
}

pub(crate) fn pairs_of(w: &ValidWindow, cyl: CylIx, cap: u64) -> Result<Vec<ForestClass>> {
    let c = w.cylinder(cyl);
    let k = c.boundary.len();
    if k >= 64 || (1u64 << k) > cap {
        return Err(Error::CapExceeded {
            cyl: c.id.clone(),
            atoms: k,
            cap,
        });
    }
    if k < 2 {
        return Ok(Vec::new());
    }
    (1..(1u64 << (k - 1))).map(|m| ForestClass::new(w, cyl, m)).collect()
}

/// Projection of a class not based on `Y` (or peripheral on `Y`) to a vertex of `Y`.
pub fn eta_y(w: &ValidWindow, cyl: CylIx, s: &Class) -> Result<VertexIx> {
    match s {
        Class::Forest(f) if f.cyl != cyl => Ok(w.project_cylinder(cyl, f.cyl)),
        Class::Forest(f) => {
            let c = w.cylinder(cyl);
            match f.single() {
                Some(i) => Ok(c.boundary[i]),
                None => Err(Error::Projection(format!("non-peripheral class based on {}", c.id))),
            }
        }
        Class::Qh(q) => Ok(w.project_vertex(cyl, q.vertex())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::qh::{qh_class, Side};
    use std::collections::BTreeMap;

    fn star4() -> ValidWindow {
        ValidWindow::new(fixtures::star4()).unwrap()
    }

    fn atoms(w: &ValidWindow, cyl: &str, ids: &[&str]) -> ForestClass {
        let c = w.cylinder_ix(cyl).unwrap();
        let vs: Vec<VertexIx> = ids.iter().map(|i| w.vertex(i).unwrap()).collect();
        ForestClass::from_attachments(w, c, &vs).unwrap()
    }

    fn ids(w: &ValidWindow, f: &ForestClass) -> Vec<String> {
        sorted_ids(w, f.attachments(w))
    }

    #[test]
    fn z_generators_on_star4() {
        let w = star4();
        assert_eq!(ids(&w, &z_generator(&w, "e1", "v1").unwrap()), ["v1"]);
        assert_eq!(ids(&w, &z_generator(&w, "e1", "m").unwrap()), ["v2", "v3", "v4"]);
        let line = ValidWindow::new(fixtures::line2()).unwrap();
        assert_eq!(ids(&line, &z_generator(&line, "e1", "a").unwrap()), ["a"]);
        assert!(matches!(z_generator(&w, "e9", "m"), Err(Error::UnknownEdge(_))));
        let one = ValidWindow::new(fixtures::onecyl()).unwrap();
        assert!(matches!(
            z_generator(&one, "e1", "a"),
            Err(Error::IncompleteCylinder(_))
        ));
    }

    #[test]
    fn boolean_operations() {
        let w = star4();
        let a1 = atoms(&w, "Y", &["v1"]);
        assert_eq!(a1.complement(), atoms(&w, "Y", &["v2", "v3", "v4"]));
        let x = atoms(&w, "Y", &["v1", "v2"]);
        let y = atoms(&w, "Y", &["v2", "v3"]);
        assert_eq!(x.meet(&y).unwrap(), atoms(&w, "Y", &["v2"]));
        assert_eq!(a1.join(&atoms(&w, "Y", &["v2"])).unwrap(), x);
        let line = ValidWindow::new(fixtures::line2()).unwrap();
        let other = atoms(&line, "Y1", &["a"]);
        let wrong = ForestClass { cyl: CylIx(7), ..other };
        assert!(matches!(other.meet(&wrong), Err(Error::CylinderMismatch(..))));
    }

    #[test]
    fn triviality() {
        let w = star4();
        assert!(atoms(&w, "Y", &[]).is_trivial());
        assert!(atoms(&w, "Y", &["v1", "v2", "v3", "v4"]).is_trivial());
        assert!(!atoms(&w, "Y", &["v1"]).is_trivial());
    }

    #[test]
    fn peripheral_classes() {
        let w = star4();
        assert_eq!(peripheral_class(&w, "v1", "Y").unwrap(), atoms(&w, "Y", &["v1"]));
        assert!(matches!(
            peripheral_class(&w, "m", "Y"),
            Err(Error::NotOnBoundary { .. })
        ));
        let line = ValidWindow::new(fixtures::line2()).unwrap();
        let pu = peripheral_class(&line, "u", "Y1").unwrap();
        assert_eq!(pu.complement(), peripheral_class(&line, "a", "Y1").unwrap());
        let s3 = ValidWindow::new(fixtures::star3()).unwrap();
        assert_eq!(ids(&s3, &peripheral_class(&s3, "v2", "Y").unwrap()), ["v2"]);
        let one = ValidWindow::new(fixtures::onecyl()).unwrap();
        assert!(matches!(
            peripheral_class(&one, "a", "Y"),
            Err(Error::IncompleteCylinder(_))
        ));
    }

    #[test]
    fn peripheral_detection() {
        let w = star4();
        let v3 = w.vertex("v3").unwrap();
        assert_eq!(is_peripheral(&w, &atoms(&w, "Y", &["v3"])), Some(v3));
        assert_eq!(is_peripheral(&w, &atoms(&w, "Y", &["v1", "v2", "v4"])), Some(v3));
        assert_eq!(is_peripheral(&w, &atoms(&w, "Y", &["v1", "v2"])), None);
        let line = ValidWindow::new(fixtures::line2()).unwrap();
        let a = line.vertex("a").unwrap();
        assert_eq!(is_peripheral(&line, &atoms(&line, "Y1", &["a"])), Some(a));
    }

    #[test]
    fn realizations() {
        let w = star4();
        assert_eq!(w.vertex_set_ids(&atoms(&w, "Y", &["v1"]).realize(&w)), ["v1"]);
        assert_eq!(
            w.vertex_set_ids(&atoms(&w, "Y", &["v2", "v3"]).realize(&w)),
            ["v2", "v3"]
        );
        let line = ValidWindow::new(fixtures::line2()).unwrap();
        assert_eq!(
            line.vertex_set_ids(&atoms(&line, "Y1", &["u"]).realize(&line)),
            ["b", "u"]
        );
    }

    #[test]
    fn smallness_and_crossing_on_star4() {
        let w = star4();
        let f = |ids: &[&str]| Class::Forest(atoms(&w, "Y", ids));
        assert!(small_intersection(&w, &f(&["v1"]), &f(&["v2"])).unwrap());
        assert!(!small_intersection(&w, &f(&["v1", "v2"]), &f(&["v2", "v3"])).unwrap());
        assert!(crosses(&w, &f(&["v1", "v2"]), &f(&["v1", "v3"])).unwrap());
        assert!(!crosses(&w, &f(&["v1"]), &f(&["v2"])).unwrap());
        assert!(coarse_leq(&w, &f(&["v1"]), &f(&["v1", "v2"])).unwrap());
        assert!(!coarse_leq(&w, &f(&["v1"]), &f(&["v2", "v3"])).unwrap());
    }

    #[test]
    fn different_cylinders_never_cross_on_line2() {
        let w = ValidWindow::new(fixtures::line2()).unwrap();
        let a = Class::Forest(atoms(&w, "Y1", &["a"]));
        let b = Class::Forest(atoms(&w, "Y2", &["b"]));
        assert!(!crosses(&w, &a, &b).unwrap());
        // the a-side of Y1 sits inside the u-side of Y2
        assert!(coarse_leq(&w, &a, &Class::Forest(atoms(&w, "Y2", &["u"]))).unwrap());
    }

    #[test]
    fn qh_against_forest() {
        let w = ValidWindow::new(fixtures::qh4()).unwrap();
        let q = w.vertex("q").unwrap();
        let c = |id| w.cylinder_ix(id).unwrap();
        let sides: BTreeMap<_, _> = [
            (c("Y1"), Side::Plus),
            (c("Y2"), Side::Plus),
            (c("Y3"), Side::Minus),
            (c("Y4"), Side::Minus),
        ]
        .into();
        let s = Class::Qh(qh_class(&w, q, &sides).unwrap());
        let beyond_w1 = Class::Forest(atoms(&w, "Y1", &["w1"]));
        assert!(!small_intersection(&w, &s, &beyond_w1).unwrap());
        let beyond_w2 = Class::Forest(atoms(&w, "Y2", &["w2"]));
        assert!(coarse_leq(&w, &beyond_w2, &s).unwrap());
        assert!(small_intersection(&w, &s, &s.complement()).unwrap());
        assert!(!small_intersection(&w, &s, &s).unwrap());
        let other = Class::Qh(
            qh_class(
                &w,
                q,
                &[
                    (c("Y1"), Side::Plus),
                    (c("Y2"), Side::Minus),
                    (c("Y3"), Side::Minus),
                    (c("Y4"), Side::Minus),
                ]
                .into(),
            )
            .unwrap(),
        );
        assert!(matches!(crosses(&w, &s, &other), Err(Error::QhSameVertex(_))));
    }

    #[test]
    fn pair_enumeration_counts() {
        let w = star4();
        assert_eq!(enumerate_class_pairs(&w, "Y", 4096).unwrap().len(), 7);
        let s3 = ValidWindow::new(fixtures::star3()).unwrap();
        assert_eq!(enumerate_class_pairs(&s3, "Y", 4096).unwrap().len(), 3);
        let line = ValidWindow::new(fixtures::line2()).unwrap();
        assert_eq!(enumerate_class_pairs(&line, "Y1", 4096).unwrap().len(), 1);
        assert!(matches!(
            enumerate_class_pairs(&w, "Y", 8),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn projections_to_cylinders() {
        let line = ValidWindow::new(fixtures::line2()).unwrap();
        let y1 = line.cylinder_ix("Y1").unwrap();
        let s = Class::Forest(atoms(&line, "Y2", &["b"]));
        assert_eq!(line.vertex_id(eta_y(&line, y1, &s).unwrap()), "u");
        let w = star4();
        let y = w.cylinder_ix("Y").unwrap();
        let p = Class::Forest(peripheral_class(&w, "v1", "Y").unwrap());
        assert_eq!(w.vertex_id(eta_y(&w, y, &p).unwrap()), "v1");
        let n = Class::Forest(atoms(&w, "Y", &["v1", "v2"]));
        assert!(matches!(eta_y(&w, y, &n), Err(Error::Projection(_))));
        let qw = ValidWindow::new(fixtures::qh4()).unwrap();
        let q = qw.vertex("q").unwrap();
        let s = crate::qh::separating_qh(&qw, q, qw.cylinder_ix("Y1").unwrap(), qw.cylinder_ix("Y3").unwrap()).unwrap();
        assert_eq!(
            qw.vertex_id(eta_y(&qw, qw.cylinder_ix("Y1").unwrap(), &Class::Qh(s)).unwrap()),
            "q"
        );
    }

    #[test]
    fn repr_round_trip() {
        let w = star4();
        let x = Class::Forest(atoms(&w, "Y", &["v1", "v3"]));
        let r = x.to_repr(&w);
        assert_eq!(serde_json::to_string(&r).unwrap(), r#"{"cyl":"Y","atoms":["v1","v3"]}"#);
        assert_eq!(Class::from_repr(&w, &r).unwrap(), x);
        let qw = ValidWindow::new(fixtures::qh4()).unwrap();
        let q = qw.vertex("q").unwrap();
        let s = Class::Qh(
            crate::qh::separating_qh(&qw, q, qw.cylinder_ix("Y1").unwrap(), qw.cylinder_ix("Y3").unwrap()).unwrap(),
        );
        let r = s.to_repr(&qw);
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"qh":"q","plus":["Y1","Y2"],"minus":["Y3","Y4"]}"#
        );
        let back: ClassRepr = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(Class::from_repr(&qw, &back).unwrap(), s);
    }
}
