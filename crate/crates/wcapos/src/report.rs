//! Plain-text tables for the command line.

use std::fmt::Write;

use wcapos_core::cart::CartTree;
use wcapos_core::causal::{conditional_prob, interventional_prob, CausalScore, NodeScope};
use wcapos_core::context::{BinarizationMap, RuleKind};
use wcapos_core::eval::EvalReport;
use wcapos_core::{FormalDecisionContext, Structure};

fn fmt3(x: f64) -> String {
    if x == f64::MAX {
        "inf".to_string()
    } else {
        format!("{x:.3}")
    }
}

/// Each rule and the number of objects holding the attribute it produces.
pub fn binarization_report(ctx: &FormalDecisionContext, map: &BinarizationMap) -> String {
    let mut out = String::new();
    let width = ctx
        .attributes()
        .iter()
        .map(|a| a.chars().count())
        .max()
        .unwrap_or(9)
        .max(9);
    let _ = writeln!(
        out,
        "{:<width$}  {:<10}  {:>6}  source",
        "attribute", "rule", "g(m)"
    );
    for (m, rule) in map.rules.iter().enumerate() {
        let kind = match &rule.kind {
            RuleKind::Identity => "identity".to_string(),
            RuleKind::OneHot { .. } => "one-hot".to_string(),
            RuleKind::Threshold { cut } => format!(">= {cut}"),
        };
        let _ = writeln!(
            out,
            "{:<width$}  {:<10}  {:>6}  {}",
            rule.attribute,
            kind,
            ctx.attribute_extent(m).len(),
            rule.source
        );
    }
    for d in &map.dropped {
        let _ = writeln!(out, "dropped column '{}': {}", d.source, d.reason);
    }
    let _ = writeln!(
        out,
        "{} objects, {} binary attributes, {} positive",
        ctx.n_objects(),
        ctx.n_attributes(),
        ctx.decision().len()
    );
    out
}

/// The ranked score table over the whole context: `p(c | m absent)`,
/// `p(c | m)`, CF, |ln CF| and NC, to three decimals.
pub fn rank_table(ctx: &FormalDecisionContext, ranked: &[CausalScore]) -> String {
    let mut out = String::new();
    let root = NodeScope::root(ctx);
    let width = ctx
        .attributes()
        .iter()
        .map(|a| a.chars().count())
        .max()
        .unwrap_or(9)
        .max(9);
    let _ = writeln!(
        out,
        "{:<width$}  {:>7}  {:>7}  {:>7}  {:>7}  {:>7}",
        "attribute", "p(c|do)", "p(c|m)", "CF", "|ln CF|", "NC"
    );
    for s in ranked {
        let name = ctx.attribute_name(s.attribute);
        let prob = |p: Option<f64>| p.map_or("-".to_string(), fmt3);
        let without = prob(interventional_prob(ctx, s.attribute, &root).ok().flatten());
        let with = prob(conditional_prob(ctx, s.attribute, &root).ok().flatten());
        match s.outcome {
            Ok(c) => {
                let _ = writeln!(
                    out,
                    "{:<width$}  {:>7}  {:>7}  {:>7}  {:>7}  {:>7}",
                    name,
                    without,
                    with,
                    fmt3(c.cf),
                    fmt3(c.log_abs),
                    fmt3(c.nc)
                );
            }
            Err(u) => {
                let _ = writeln!(
                    out,
                    "{:<width$}  {:>7}  {:>7}  undefined ({})",
                    name,
                    without,
                    with,
                    u.as_str()
                );
            }
        }
    }
    out
}

/// One block per level: each node's split or leaf status, size, positive
/// fraction and region.
pub fn build_summary(s: &Structure) -> String {
    let mut out = String::new();
    for level in 0..=s.depth() {
        let _ = writeln!(out, "level {level}");
        for n in s.nodes().iter().filter(|n| n.level == level) {
            let what = match (&n.split, n.leaf_reason) {
                (Some(sc), _) => format!(
                    "split on '{}' (nc {})",
                    s.attributes()[sc.attribute],
                    sc.nc().map_or("-".to_string(), fmt3)
                ),
                (None, Some(r)) => format!("leaf ({})", r.as_str()),
                (None, None) => "leaf".to_string(),
            };
            let _ = writeln!(
                out,
                "  node {}: {} objects, positive fraction {}, {}; {}",
                n.id,
                n.size(),
                fmt3(n.positive_fraction()),
                n.region.as_str(),
                what
            );
        }
    }
    out
}

pub fn cart_summary(t: &CartTree) -> String {
    let mut out = String::new();
    for n in t.nodes() {
        let what = match (n.split_attribute, n.leaf_reason) {
            (Some(m), _) => format!("split on '{}'", t.attributes()[m]),
            (None, Some(r)) => format!("leaf ({})", r.as_str()),
            (None, None) => "leaf".to_string(),
        };
        let _ = writeln!(
            out,
            "{}node {}: {} objects, {} positive, gini {}; {}",
            "  ".repeat(n.level),
            n.id,
            n.size(),
            n.positives,
            fmt3(n.impurity),
            what
        );
    }
    out
}

pub fn metrics_header() -> String {
    format!(
        "{:<8}  {:>5}  {:>5}  {:>5}  {:>5}  {:>5}",
        "model", "ACC", "REC", "FPR", "PRE", "F1"
    )
}

/// One row of the comparison table; metrics with a zero denominator get `*`.
pub fn metrics_row(name: &str, r: &EvalReport) -> String {
    let m = &r.metrics;
    let u = &r.undefined;
    let cell = |v: f64, undefined: bool| {
        if undefined {
            format!("{:>5}", format!("{v:.3}*"))
        } else {
            format!("{v:>5.3}")
        }
    };
    format!(
        "{:<8}  {}  {}  {}  {}  {}",
        name,
        cell(m.acc, false),
        cell(m.rec, u.rec),
        cell(m.fpr, u.fpr),
        cell(m.pre, u.pre),
        cell(m.f1, u.f1)
    )
}

/// Fold accounting printed under the metrics rows.
pub fn fold_note(r: &EvalReport) -> String {
    let mut out = format!(
        "{} predictions, {} skipped folds, {} single-class training folds",
        r.per_fold.len(),
        r.skipped.len(),
        r.single_class_folds
    );
    for s in &r.skipped {
        let _ = write!(out, "\n  skipped object {}: {}", s.object + 1, s.reason);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use wcapos_core::causal::rank_attributes;
    use wcapos_core::fixtures::watermelon;
    use wcapos_core::structure::{build_structure, BuildParams};

    #[test]
    fn rank_table_rounds_to_three_decimals() {
        let ctx = watermelon();
        let all: Vec<usize> = (0..6).collect();
        let ranked = rank_attributes(&ctx, &all, &NodeScope::root(&ctx)).unwrap();
        let t = rank_table(&ctx, &ranked);
        let first = t.lines().nth(1).unwrap();
        let cols: Vec<&str> = first.split_whitespace().collect();
        assert_eq!(
            cols,
            vec!["clear", "0.125", "0.889", "0.141", "1.962", "0.877"]
        );
        assert!(t.lines().last().unwrap().contains("1.200"));
    }

    #[test]
    fn summary_lists_levels() {
        let s = build_structure(&watermelon(), &BuildParams::default()).unwrap();
        let text = build_summary(&s);
        assert!(text.contains("level 2"));
        assert!(text
            .contains("node 3: 3 objects, positive fraction 0.667, BOUNDARY; leaf (min-samples)"));
        assert!(text
            .contains("node 1: 8 objects, positive fraction 0.125, NEGATIVE; leaf (pure-region)"));
    }

    #[test]
    fn undefined_metric_marked() {
        let r = EvalReport::from_confusion(wcapos_core::eval::Confusion {
            tp: 0,
            fp: 0,
            fn_: 0,
            tn: 2,
        })
        .unwrap();
        assert!(metrics_row("x", &r).contains("0.000*"));
    }
}
