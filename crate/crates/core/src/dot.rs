//! Graphviz renderings of tableaux and models.

use std::fmt::Write as _;

use crate::models::SynthesizedModel;
use crate::tableau::{NodeKind, Tableau};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// States are boxes, prestates ellipses; eliminated nodes are dashed.
pub fn tableau_dot(t: &Tableau) -> String {
    let mut out = String::from("digraph tableau {\n");
    for n in t.nodes() {
        let shape = match n.kind {
            NodeKind::State => "box",
            NodeKind::Prestate => "ellipse",
        };
        let label = format!("n{} {}", n.id, t.closure().display_label(&n.label));
        let _ = write!(out, "  n{} [shape={shape}, label={}", n.id, quote(&label));
        if let Some(o) = n.origin {
            let _ = write!(out, ", origin={}", quote(&t.model().state(o).id));
        }
        if n.kind == NodeKind::State && !n.alive {
            out.push_str(", style=dashed");
        }
        out.push_str("];\n");
    }
    for n in t.nodes() {
        for &o in &n.offspring {
            let _ = writeln!(out, "  n{} -> n{o} [style=dotted];", n.id);
        }
        for g in &n.groups {
            let _ = writeln!(out, "  n{} -> n{};", n.id, g.prestate);
        }
    }
    out.push_str("}\n");
    out
}

pub fn model_dot(m: &SynthesizedModel) -> String {
    let model = &m.model;
    let mut out = String::from("digraph model {\n");
    for (i, s) in model.states().iter().enumerate() {
        let atoms: Vec<&str> = s.label.iter().map(String::as_str).collect();
        let label = format!("{} {{{}}}", s.id, atoms.join(", "));
        let _ = write!(out, "  s{i} [shape=circle, label={}", quote(&label));
        if i == model.root() {
            out.push_str(", peripheries=2");
        }
        if let Some((orig, _)) = m.embedding.iter().find(|(_, img)| **img == s.id) {
            let _ = write!(out, ", origin={}", quote(orig));
        }
        out.push_str("];\n");
    }
    for &(a, b) in model.transitions() {
        let _ = writeln!(out, "  s{a} -> s{b};");
    }
    out.push_str("}\n");
    out
}
