//! Graphviz output for nets, switching graphs and constraint graphs.

use std::fmt::Write;

use crate::ncl::{Configuration, ConstraintGraph};
use crate::proofnet::Switching;
use crate::{Kind, Linking, Sequent};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn label(kind: Kind) -> &'static str {
    match kind {
        Kind::One => "1",
        Kind::Bot => "⊥",
        Kind::Tensor => "⊗",
        Kind::Par => "⅋",
    }
}

fn nodes(s: &Sequent, out: &mut String) {
    for v in 0..s.len() {
        let shape = if s.kind(v).is_unit() { "circle" } else { "box" };
        writeln!(out, "  n{v} [label={}, xlabel={}, shape={shape}];", quote(label(s.kind(v))), quote(s.name(v))).unwrap();
    }
}

/// The formula trees with solid tensor edges, dashed par edges and one arrow
/// per jump.
pub fn net_dot(s: &Sequent, l: &Linking) -> String {
    let mut out = String::from("digraph net {\n  rankdir=BT;\n");
    nodes(s, &mut out);
    for v in 0..s.len() {
        let style = if s.kind(v) == Kind::Par { "dashed" } else { "solid" };
        for &c in s.children(v) {
            writeln!(out, "  n{c} -> n{v} [style={style}, arrowhead=none];").unwrap();
        }
    }
    for &b in s.bots() {
        writeln!(out, "  n{b} -> n{} [color=blue, constraint=false];", l.of(s, b)).unwrap();
    }
    out.push_str("}\n");
    out
}

/// The switching graph of `sw`: each par keeps the one child it selects.
pub fn switching_dot(s: &Sequent, l: &Linking, sw: &Switching) -> String {
    let mut out = String::from("graph switching {\n");
    nodes(s, &mut out);
    for (a, b) in crate::proofnet::switching_graph(s, l, sw) {
        let style = match s.kind(a) {
            Kind::Par => "dashed",
            Kind::Bot => "dotted",
            _ => "solid",
        };
        writeln!(out, "  n{a} -- n{b} [style={style}];").unwrap();
    }
    out.push_str("}\n");
    out
}

/// Vertices labelled with their constraint; edges bold for weight 2 and, when
/// a configuration is given, directed at the vertex they point to.
pub fn graph_dot(g: &ConstraintGraph, c: Option<&Configuration>) -> String {
    let mut out = String::from("digraph ncl {\n  edge [arrowhead=none];\n");
    for v in &g.vertices {
        writeln!(out, "  {} [label={}];", quote(&v.id), quote(&format!("{} ({})", v.id, v.constraint))).unwrap();
    }
    for (i, e) in g.edges.iter().enumerate() {
        let (a, b) = (e.ends[0], *e.ends.last().unwrap());
        let to = c.and_then(|c| c.get(i));
        let (from, into) = if to == Some(a) && a != b { (b, a) } else { (a, b) };
        let width = if e.weight >= 2 { 3 } else { 1 };
        let head = if to.is_some() { ", arrowhead=normal" } else { "" };
        writeln!(
            out,
            "  {} -> {} [label={}, penwidth={width}{head}];",
            quote(&g.vertices[from].id),
            quote(&g.vertices[into].id),
            quote(&e.id)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
