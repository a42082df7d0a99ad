//! Graphviz renderings of decomposition trees. Labels use vertex ids.

use std::fmt::Write;

use crate::cutset::CutsetTree;
use crate::graph::WeightedGraph;
use crate::modular::{ExtendedTree, ModuleNode, NodeKind};

fn label(g: &WeightedGraph, set: &[usize]) -> String {
    let mut ids: Vec<_> = set.iter().map(|&v| g.id(v)).collect();
    ids.sort_unstable();
    let parts: Vec<String> = ids.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// Cliques as circles, atoms as boxes. The clique `K_h` is the root; each
/// `K_i` has the atom `A_i` and the rest of the tree below it.
pub fn cutset_dot(g: &WeightedGraph, tree: &CutsetTree) -> String {
    let mut out = String::from("digraph cutsets {\n  node [fontname=\"Helvetica\"];\n");
    for i in 0..=tree.h() {
        writeln!(
            out,
            "  a{i} [shape=box, label=\"A{i} {}\"];",
            label(g, &tree.atom(i))
        )
        .unwrap();
    }
    for i in 1..=tree.h() {
        writeln!(
            out,
            "  k{i} [shape=circle, label=\"{}\"];",
            label(g, tree.clique(i))
        )
        .unwrap();
        writeln!(out, "  k{i} -> a{i};").unwrap();
        if i == 1 {
            writeln!(out, "  k1 -> a0;").unwrap();
        } else {
            writeln!(out, "  k{i} -> k{};", i - 1).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

fn kind_name(k: NodeKind) -> &'static str {
    match k {
        NodeKind::Leaf => "leaf",
        NodeKind::Parallel => "parallel",
        NodeKind::Series => "series",
        NodeKind::Prime => "prime",
    }
}

fn standard_nodes(
    g: &WeightedGraph,
    node: &ModuleNode,
    next: &mut usize,
    out: &mut String,
) -> usize {
    let me = *next;
    *next += 1;
    let shape = if node.kind == NodeKind::Leaf {
        "plaintext"
    } else {
        "ellipse"
    };
    writeln!(
        out,
        "    s{me} [shape={shape}, label=\"{} {}\"];",
        kind_name(node.kind),
        label(g, &node.vertices)
    )
    .unwrap();
    for c in &node.children {
        let child = standard_nodes(g, c, next, out);
        writeln!(out, "    s{me} -> s{child};").unwrap();
    }
    me
}

/// The standard tree and, beside it, the extended tree as a chain of
/// contracted leaves in postorder.
pub fn modular_dot(
    g: &WeightedGraph,
    standard: Option<&ModuleNode>,
    extended: &ExtendedTree,
) -> String {
    let mut out = String::from("digraph modules {\n  node [fontname=\"Helvetica\"];\n");
    out.push_str("  subgraph cluster_standard {\n    label=\"standard\";\n");
    if let Some(root) = standard {
        standard_nodes(g, root, &mut 0, &mut out);
    }
    out.push_str("  }\n  subgraph cluster_extended {\n    label=\"extended\";\n");
    for (i, step) in extended.steps.iter().enumerate() {
        let ids: Vec<String> = step.members.iter().map(|m| m.to_string()).collect();
        writeln!(
            out,
            "    m{} [shape=box, label=\"M{} {} {{{}}} -> {}\"];",
            i + 1,
            i + 1,
            kind_name(step.kind),
            ids.join(","),
            step.rep
        )
        .unwrap();
        if i > 0 {
            writeln!(out, "    m{i} -> m{};", i + 1).unwrap();
        }
    }
    out.push_str("  }\n}\n");
    out
}
