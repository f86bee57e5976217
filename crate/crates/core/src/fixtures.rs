//! Canonical windows and parametric star generators.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::window::{Edge, Ext, Vertex, Window};

fn vertex(id: &str, ext: Ext, qh: bool) -> Vertex {
    Vertex {
        id: id.to_owned(),
        ext,
        qh,
    }
}

fn edge(id: &str, a: &str, b: &str, cyl: &str) -> Edge {
    Edge {
        id: id.to_owned(),
        ends: [a.to_owned(), b.to_owned()],
        cyl: cyl.to_owned(),
    }
}

fn complete(ids: &[(&str, bool)]) -> BTreeMap<String, bool> {
    ids.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// A single cylinder that continues outside the window.
pub fn onecyl() -> Window {
    Window::new(
        vec![
            vertex("c", Ext::Finite(0), false),
            vertex("a", Ext::Inf, false),
            vertex("b", Ext::Inf, false),
            vertex("d", Ext::Inf, false),
        ],
        vec![
            edge("e1", "c", "a", "Y"),
            edge("e2", "c", "b", "Y"),
            edge("e3", "c", "d", "Y"),
        ],
        complete(&[("Y", false)]),
    )
}

/// Two single-edge cylinders meeting at `u`.
pub fn line2() -> Window {
    Window::new(
        vec![
            vertex("a", Ext::Inf, false),
            vertex("u", Ext::Finite(1), false),
            vertex("b", Ext::Inf, false),
        ],
        vec![edge("e1", "a", "u", "Y1"), edge("e2", "u", "b", "Y2")],
        complete(&[("Y1", true), ("Y2", true)]),
    )
}

pub fn star3() -> Window {
    gen_star(3, false).expect("k >= 3")
}

pub fn star4() -> Window {
    gen_star(4, false).expect("k >= 3")
}

pub fn qh4() -> Window {
    gen_star(4, true).expect("k >= 3")
}

/// The four-leaf star with one more complete cylinder `Z` hanging at `v1`.
pub fn star4_line() -> Window {
    let mut w = star4();
    w.vertices.push(vertex("x", Ext::Inf, false));
    w.edges.push(edge("e5", "v1", "x", "Z"));
    w.complete.insert("Z".into(), true);
    w.normalize();
    w
}

/// `qh = false`: one complete cylinder `Y` with centre `m` and leaves `v1..vk`.
/// `qh = true`: a QH centre `q` with single-edge cylinders `Y1..Yk` to `w1..wk`.
pub fn gen_star(k: usize, qh: bool) -> Result<Window> {
    if k < 3 {
        return Err(Error::BadParams(format!("star needs k >= 3, got {k}")));
    }
    let (centre, leaf) = if qh { ("q", "w") } else { ("m", "v") };
    let centre_ext = if qh { Ext::Inf } else { Ext::Finite(0) };
    let mut vertices = vec![vertex(centre, centre_ext, qh)];
    let mut edges = Vec::new();
    let mut flags = BTreeMap::new();
    for i in 1..=k {
        let l = format!("{leaf}{i}");
        let cyl = if qh { format!("Y{i}") } else { "Y".to_owned() };
        vertices.push(vertex(&l, Ext::Inf, false));
        edges.push(edge(&format!("e{i}"), centre, &l, &cyl));
        flags.insert(cyl, true);
    }
    Ok(Window::new(vertices, edges, flags))
}

/// Every shipped fixture with its file stem.
pub fn all() -> Vec<(&'static str, Window)> {
    vec![
        ("onecyl", onecyl()),
        ("line2", line2()),
        ("star3", star3()),
        ("star4", star4()),
        ("qh4", qh4()),
        ("star4_line", star4_line()),
    ]
}

/// A window automorphism given as a vertex map.
pub type VertexMap = BTreeMap<String, String>;

/// Rotation and reflection generators of the dihedral symmetry of a star
/// built by [`gen_star`].
pub fn star_symmetries(k: usize, qh: bool) -> Vec<VertexMap> {
    let (centre, leaf) = if qh { ("q", "w") } else { ("m", "v") };
    let name = |i: usize| format!("{leaf}{}", i % k + 1);
    let mut rotation = VertexMap::new();
    let mut reflection = VertexMap::new();
    rotation.insert(centre.into(), centre.into());
    reflection.insert(centre.into(), centre.into());
    for i in 0..k {
        rotation.insert(name(i), name(i + 1));
        reflection.insert(name(i), name(k - 1 - i));
    }
    vec![rotation, reflection]
}

/// The swap `a <-> b` of [`line2`].
pub fn line2_swap() -> VertexMap {
    [("a", "b"), ("b", "a"), ("u", "u")]
        .iter()
        .map(|(x, y)| (x.to_string(), y.to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_generator_matches_fixtures() {
        assert_eq!(gen_star(4, false).unwrap(), star4());
        assert_eq!(gen_star(3, false).unwrap(), star3());
        assert_eq!(gen_star(4, true).unwrap(), qh4());
        assert!(gen_star(2, false).is_err());
        let w = star4();
        assert_eq!(w.vertices.len(), 5);
        assert_eq!(w.complete.len(), 1);
        let w = qh4();
        assert!(w.vertices.iter().any(|v| v.id == "q" && v.qh && v.ext == Ext::Inf));
        assert_eq!(w.complete.len(), 4);
    }

    #[test]
    fn rotation_has_order_k() {
        let rot = &star_symmetries(5, false)[0];
        let mut cur = "v1".to_owned();
        for _ in 0..5 {
            cur = rot[&cur].clone();
        }
        assert_eq!(cur, "v1");
        assert_eq!(rot["v5"], "v1");
    }
}
