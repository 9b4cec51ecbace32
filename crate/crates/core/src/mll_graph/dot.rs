//! Graphviz rendering. Boxes are rectangles named by their main variable;
//! positive edges point down from their source, negative edges point back up.

use std::fmt::Write;

use super::net::{NodeKind, ProofNet};

pub fn to_dot(net: &ProofNet) -> String {
    let mut s = String::from("digraph proofnet {\n  node [fontname=\"Helvetica\"];\n");
    for (id, n) in net.nodes() {
        let (shape, label) = match n.kind {
            NodeKind::Box => ("box", format!("b^{}", net.main_name(id).unwrap_or("?"))),
            NodeKind::Ax => ("plaintext", "ax".to_string()),
            NodeKind::Cut => ("plaintext", "cut".to_string()),
            NodeKind::Tensor => ("circle", "⊗".to_string()),
            NodeKind::Par => ("circle", "⅋".to_string()),
            NodeKind::One => ("circle", "1".to_string()),
            NodeKind::Bot => ("circle", "⊥".to_string()),
            NodeKind::Contraction => ("circle", "c".to_string()),
            NodeKind::Weakening => ("circle", "w".to_string()),
        };
        let _ = writeln!(s, "  {id} [shape={shape}, label=\"{label}\"];");
    }
    for (i, e) in net.conclusions().iter().enumerate() {
        let _ = writeln!(s, "  c{i} [shape=point]; // conclusion {e}");
    }
    for (eid, e) in net.edges() {
        let target = match e.to {
            Some(t) => t.to_string(),
            None => match net.conclusions().iter().position(|c| *c == eid) {
                Some(i) => format!("c{i}"),
                None => continue,
            },
        };
        let dir = if e.label.is_negative_atom() { "back" } else { "forward" };
        let _ = writeln!(s, "  {} -> {target} [label=\"{}\", dir={dir}];", e.from, e.label);
    }
    s.push_str("}\n");
    s
}
