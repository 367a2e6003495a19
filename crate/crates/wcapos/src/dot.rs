//! Graphviz export. Nodes appear in pre-order with one rank per level; the
//! normalized causality of each split is kept as a node attribute rather than
//! encoded in the layout.

use std::fmt::Write;

use wcapos_core::cart::CartTree;
use wcapos_core::{Region, Structure};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

fn region_style(r: Region) -> (&'static str, &'static str) {
    match r {
        Region::Positive => ("box", "#b7e1b0"),
        Region::Negative => ("box", "#f2b8b5"),
        Region::Boundary => ("ellipse", "#fde9a9"),
    }
}

fn ranks(out: &mut String, levels: impl Iterator<Item = (usize, usize)>) {
    let mut by_level: Vec<Vec<usize>> = Vec::new();
    for (id, level) in levels {
        if by_level.len() <= level {
            by_level.resize(level + 1, Vec::new());
        }
        by_level[level].push(id);
    }
    for (level, ids) in by_level.iter().enumerate().filter(|(_, ids)| ids.len() > 1) {
        let list: Vec<String> = ids.iter().map(|i| format!("n{i};")).collect();
        let _ = writeln!(
            out,
            "  subgraph level_{level} {{ rank=same; {} }}",
            list.join(" ")
        );
    }
}

pub fn export_dot(s: &Structure) -> String {
    let mut out = String::new();
    let p = s.params();
    let _ = writeln!(out, "digraph structure {{");
    let _ = writeln!(
        out,
        "  graph [model={}, alpha={}, beta={}, min_split={}, fingerprint={}];",
        quote("3wcapos"),
        quote(&p.alpha.to_string()),
        quote(&p.beta.to_string()),
        quote(&p.min_split.to_string()),
        quote(&format!("{:016x}", s.fingerprint()))
    );
    let _ = writeln!(out, "  node [style=filled];");
    for n in s.nodes() {
        let (shape, fill) = region_style(n.region);
        let counts = format!("{} objects, {} positive", n.size(), n.positives);
        let label = match &n.split {
            Some(sc) => format!("{}\n{}", s.attributes()[sc.attribute], counts),
            None => format!("{}\n{}", n.region.as_str(), counts),
        };
        let mut attrs = format!(
            "label={}, shape={}, fillcolor={}, region={}, size_objects={}, positive_fraction={}",
            quote(&label),
            shape,
            quote(fill),
            quote(n.region.as_str()),
            n.size(),
            quote(&n.positive_fraction().to_string())
        );
        if let Some(nc) = n.split.and_then(|sc| sc.nc()) {
            let _ = write!(attrs, ", nc={}", quote(&nc.to_string()));
        }
        if let Some(r) = n.leaf_reason {
            let _ = write!(attrs, ", leaf_reason={}", quote(r.as_str()));
        }
        let _ = writeln!(out, "  n{} [{}];", n.id, attrs);
    }
    for n in s.nodes() {
        if let Some(c) = n.children {
            let _ = writeln!(
                out,
                "  n{} -> n{} [label=\"absent\", style=dashed];",
                n.id, c.absent
            );
            let _ = writeln!(out, "  n{} -> n{} [label=\"present\"];", n.id, c.present);
        }
    }
    ranks(&mut out, s.nodes().iter().map(|n| (n.id, n.level)));
    out.push_str("}\n");
    out
}

/// The baseline tree, marked as such in the graph attributes.
pub fn export_cart_dot(t: &CartTree) -> String {
    let mut out = String::new();
    let p = t.params();
    let _ = writeln!(out, "digraph cart {{");
    let _ = writeln!(
        out,
        "  graph [model={}, baseline=true, min_split={}, fingerprint={}];",
        quote("cart"),
        quote(&p.min_split.to_string()),
        quote(&format!("{:016x}", t.fingerprint()))
    );
    let _ = writeln!(out, "  node [style=filled];");
    for n in t.nodes() {
        let counts = format!("{} objects, {} positive", n.size(), n.positives);
        let (label, shape, fill) = match n.split_attribute {
            Some(m) => (
                format!("{}\n{}", t.attributes()[m], counts),
                "ellipse",
                "#dde6f3",
            ),
            None => {
                let tag = match n.majority() {
                    Some(true) => "majority 1",
                    Some(false) => "majority 0",
                    None => "tie",
                };
                (format!("{tag}\n{counts}"), "box", "#eeeeee")
            }
        };
        let _ = writeln!(
            out,
            "  n{} [label={}, shape={}, fillcolor={}, gini={}];",
            n.id,
            quote(&label),
            shape,
            quote(fill),
            quote(&n.impurity.to_string())
        );
    }
    for n in t.nodes() {
        if let Some(c) = n.children {
            let _ = writeln!(
                out,
                "  n{} -> n{} [label=\"absent\", style=dashed];",
                n.id, c.absent
            );
            let _ = writeln!(out, "  n{} -> n{} [label=\"present\"];", n.id, c.present);
        }
    }
    ranks(&mut out, t.nodes().iter().map(|n| (n.id, n.level)));
    out.push_str("}\n");
    out
}
