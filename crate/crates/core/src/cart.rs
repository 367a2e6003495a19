//! Gini-impurity decision tree over the same binary attributes, used as the
//! comparison baseline. It shares stopping rules, path-local attribute
//! exclusion and tie-breaking with [`crate::structure`]; only the split
//! criterion differs.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::causal::NodeScope;
use crate::context::FormalDecisionContext;
use crate::error::{Error, Result};
use crate::structure::{classify_region, BuildParams, Children, LeafReason, Region};

/// `1 - p^2 - (1-p)^2` with `p = pos / (pos + neg)`, computed as `2 pos neg / n^2`.
pub fn gini(pos: usize, neg: usize) -> Result<f64> {
    let n = pos + neg;
    if n == 0 {
        return Err(Error::EmptyContext);
    }
    let n = n as f64;
    Ok(2.0 * pos as f64 * neg as f64 / (n * n))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CartNode {
    pub id: usize,
    pub level: usize,
    pub parent: Option<usize>,
    pub scope: NodeScope,
    pub positives: usize,
    pub split_attribute: Option<usize>,
    pub children: Option<Children>,
    pub impurity: f64,
    pub leaf_reason: Option<LeafReason>,
}

impl CartNode {
    pub fn size(&self) -> usize {
        self.scope.len()
    }

    /// Majority decision; `None` on an exact tie.
    pub fn majority(&self) -> Option<bool> {
        let neg = self.size() - self.positives;
        match self.positives.cmp(&neg) {
            core::cmp::Ordering::Greater => Some(true),
            core::cmp::Ordering::Less => Some(false),
            core::cmp::Ordering::Equal => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CartTree {
    nodes: Vec<CartNode>,
    params: BuildParams,
    attributes: Vec<String>,
    fingerprint: u64,
}

impl CartTree {
    /// Reassembles a tree from stored parts, checking ids and partitions.
    pub fn from_parts(
        nodes: Vec<CartNode>,
        params: BuildParams,
        attributes: Vec<String>,
        fingerprint: u64,
    ) -> Result<CartTree> {
        params.validate()?;
        let bad = |msg: String| Err(Error::MalformedStructure(msg));
        if nodes.is_empty() || nodes[0].parent.is_some() {
            return bad("missing root".to_string());
        }
        for (i, n) in nodes.iter().enumerate() {
            if n.id != i || n.positives > n.size() {
                return bad(alloc::format!("node {i} is inconsistent"));
            }
            if n.split_attribute.is_some() != n.children.is_some()
                || n.children.is_some() == n.leaf_reason.is_some()
            {
                return bad(alloc::format!(
                    "node {i}: split, children and leaf reason disagree"
                ));
            }
            if n.split_attribute.is_some_and(|m| m >= attributes.len()) {
                return bad(alloc::format!("node {i}: split attribute out of range"));
            }
            if let Some(Children { absent, present }) = n.children {
                let (Some(a), Some(p)) = (nodes.get(absent), nodes.get(present)) else {
                    return bad(alloc::format!("node {i}: child missing"));
                };
                let mut union = a.scope.objects.clone();
                union.union_with(&p.scope.objects);
                if a.parent != Some(i)
                    || p.parent != Some(i)
                    || absent <= i
                    || present <= i
                    || a.scope.objects.intersection_len(&p.scope.objects) != 0
                    || union != n.scope.objects
                {
                    return bad(alloc::format!(
                        "node {i}: children do not partition the scope"
                    ));
                }
            }
        }
        Ok(CartTree {
            nodes,
            params,
            attributes,
            fingerprint,
        })
    }

    pub fn root(&self) -> &CartNode {
        &self.nodes[0]
    }

    pub fn nodes(&self) -> &[CartNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &CartNode {
        &self.nodes[id]
    }

    pub fn params(&self) -> &BuildParams {
        &self.params
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn leaves(&self) -> impl Iterator<Item = &CartNode> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }
}

/// Size-weighted Gini of the two sides of a split.
fn split_impurity(ctx: &FormalDecisionContext, scope: &NodeScope, m: usize) -> Option<f64> {
    let extent = ctx.attribute_extent(m);
    let with = scope.objects.intersection(extent);
    let without = scope.objects.difference(extent);
    if with.is_empty() || without.is_empty() {
        return None;
    }
    let n = scope.len() as f64;
    let side = |s: &crate::bitset::BitSet| {
        let pos = s.intersection_len(ctx.decision());
        gini(pos, s.len() - pos)
            .map(|g| g * s.len() as f64 / n)
            .ok()
    };
    Some(side(&with)? + side(&without)?)
}

pub fn build_cart(ctx: &FormalDecisionContext, params: &BuildParams) -> Result<CartTree> {
    params.validate()?;
    if ctx.n_objects() == 0 {
        return Err(Error::EmptyContext);
    }
    let mut nodes = Vec::new();
    grow(ctx, params, NodeScope::root(ctx), 0, None, &mut nodes)?;
    Ok(CartTree {
        nodes,
        params: *params,
        attributes: ctx.attributes().to_vec(),
        fingerprint: ctx.fingerprint(),
    })
}

const MIN_GAIN: f64 = 1e-12;

fn grow(
    ctx: &FormalDecisionContext,
    params: &BuildParams,
    scope: NodeScope,
    level: usize,
    parent: Option<usize>,
    nodes: &mut Vec<CartNode>,
) -> Result<usize> {
    let id = nodes.len();
    let positives = scope.objects.intersection_len(ctx.decision());
    let impurity = gini(positives, scope.len() - positives)?;
    let region = classify_region(positives as f64 / scope.len() as f64, params);
    let candidates: Vec<usize> = (0..ctx.n_attributes())
        .filter(|&m| !scope.is_conditioned(m))
        .collect();

    let mut leaf_reason = if region != Region::Boundary {
        Some(LeafReason::PureRegion)
    } else if scope.len() < params.min_split {
        Some(LeafReason::MinSamples)
    } else if candidates.is_empty() {
        Some(LeafReason::AttributeExhausted)
    } else if params.max_depth.is_some_and(|d| level >= d) {
        Some(LeafReason::MaxDepth)
    } else {
        None
    };

    let mut best: Option<(usize, f64)> = None;
    if leaf_reason.is_none() {
        for &m in &candidates {
            if let Some(w) = split_impurity(ctx, &scope, m) {
                // strict improvement keeps the earliest attribute on ties
                if w < impurity - MIN_GAIN && best.is_none_or(|(_, b)| w < b) {
                    best = Some((m, w));
                }
            }
        }
        if best.is_none() {
            leaf_reason = Some(LeafReason::NoGain);
        }
    }

    nodes.push(CartNode {
        id,
        level,
        parent,
        scope,
        positives,
        split_attribute: best.map(|(m, _)| m),
        children: None,
        impurity,
        leaf_reason,
    });

    if let Some((m, _)) = best {
        let absent = nodes[id].scope.child(ctx, m, false)?;
        let present = nodes[id].scope.child(ctx, m, true)?;
        let absent = grow(ctx, params, absent, level + 1, Some(id), nodes)?;
        let present = grow(ctx, params, present, level + 1, Some(id), nodes)?;
        nodes[id].children = Some(Children { absent, present });
    }
    Ok(id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{build_context, BinarizeOptions};
    use crate::fixtures::{balloons, watermelon};
    use alloc::vec;

    #[test]
    fn gini_values() {
        assert_eq!(gini(5, 0).unwrap(), 0.0);
        assert_eq!(gini(5, 5).unwrap(), 0.5);
        assert_eq!(gini(2, 6).unwrap(), 0.375);
        assert_eq!(gini(0, 0), Err(Error::EmptyContext));
    }

    #[test]
    fn pure_context_is_one_leaf() {
        let ctx = FormalDecisionContext::new(
            vec!["1".into(), "2".into()],
            vec!["a".into()],
            &[vec![true], vec![false]],
            &[false, false],
        )
        .unwrap();
        let t = build_cart(&ctx, &BuildParams::default()).unwrap();
        assert_eq!(t.nodes().len(), 1);
        assert_eq!(t.root().majority(), Some(false));
    }

    #[test]
    fn balloons_tree_is_pure() {
        let (ctx, _) = build_context(&balloons(), &BinarizeOptions::default()).unwrap();
        let t = build_cart(&ctx, &BuildParams::strict()).unwrap();
        for leaf in t.leaves() {
            assert_eq!(leaf.impurity, 0.0);
        }
    }

    #[test]
    fn splits_strictly_reduce_impurity() {
        let ctx = watermelon();
        let t = build_cart(&ctx, &BuildParams::strict()).unwrap();
        for n in t.nodes() {
            if let Some(c) = n.children {
                let (a, p) = (t.node(c.absent), t.node(c.present));
                assert_eq!(a.size() + p.size(), n.size());
                let w =
                    (a.impurity * a.size() as f64 + p.impurity * p.size() as f64) / n.size() as f64;
                assert!(w < n.impurity);
            }
        }
    }
}
