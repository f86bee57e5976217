//! Graphviz output for windows, trees of cylinders and regular neighbourhoods.

use std::fmt::Write;

use crate::rn::RnGraph;
use crate::tc::{TcNode, TreeOfCylinders};
use crate::window::{Ext, ValidWindow, Window};

pub enum Dot<'a> {
    Window(&'a Window),
    Tc(&'a ValidWindow, &'a TreeOfCylinders),
    Rn(&'a ValidWindow, &'a RnGraph),
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn emit_dot(d: Dot) -> String {
    let mut out = String::new();
    match d {
        Dot::Window(w) => {
            out.push_str("graph window {\n");
            for v in &w.vertices {
                let ext = match v.ext {
                    Ext::Inf => "inf".to_owned(),
                    Ext::Finite(k) => k.to_string(),
                };
                let shape = if v.qh { "doublecircle" } else { "circle" };
                let _ = writeln!(
                    out,
                    "  {} [label={}, shape={shape}];",
                    quote(&v.id),
                    quote(&format!("{} ({ext})", v.id))
                );
            }
            for e in &w.edges {
                let _ = writeln!(
                    out,
                    "  {} -- {} [label={}];",
                    quote(&e.ends[0]),
                    quote(&e.ends[1]),
                    quote(&e.cyl)
                );
            }
        }
        Dot::Tc(w, tc) => {
            out.push_str("graph tree_of_cylinders {\n");
            for (i, n) in tc.nodes().iter().enumerate() {
                let style = match n {
                    TcNode::V0(_) => "shape=ellipse".to_owned(),
                    TcNode::Cyl(c) if w.cylinder(*c).complete => "shape=box".to_owned(),
                    TcNode::Cyl(_) => "shape=box, style=dashed".to_owned(),
                    TcNode::Stub { .. } => "shape=point".to_owned(),
                };
                let _ = writeln!(out, "  n{i} [label={}, {style}];", quote(&tc.label(w, i)));
            }
            for &(a, b) in tc.edges() {
                let _ = writeln!(out, "  n{a} -- n{b};");
            }
        }
        Dot::Rn(w, rn) => {
            out.push_str("graph regular_neighbourhood {\n");
            for (i, c) in rn.cccs.iter().enumerate() {
                let _ = writeln!(out, "  c{i} [label={}, shape=box];", quote(&c.kind.label(w)));
            }
            for s in 0..rn.stars.len() {
                let _ = writeln!(out, "  s{s} [label={}, shape=diamond];", quote(&format!("star {s}")));
            }
            for &(c, s) in &rn.edges {
                let _ = writeln!(out, "  c{c} -- s{s};");
            }
        }
    }
    out.push_str("}\n");
    out
}
