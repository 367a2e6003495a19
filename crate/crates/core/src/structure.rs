//! Construction of the three-way causal attribute partial order structure.
//!
//! Starting from the full object set, every node is labelled with a three-way
//! region from its positive fraction. Boundary nodes are split on the remaining
//! attribute with the strongest normalized causality computed *inside the
//! node's own scope*; the chosen attribute is then excluded along that path.
//! Growth stops at positive/negative regions, small nodes, exhausted
//! attributes, or when no candidate has a defined causal factor and a genuine
//! two-way split.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::causal::{self, CausalScore, Condition, NodeScope};
use crate::context::{BinarizationMap, FormalDecisionContext};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Positive,
    Negative,
    Boundary,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::Positive => "POSITIVE",
            Region::Negative => "NEGATIVE",
            Region::Boundary => "BOUNDARY",
        }
    }

    pub fn parse(s: &str) -> Option<Region> {
        match s {
            "POSITIVE" => Some(Region::Positive),
            "NEGATIVE" => Some(Region::Negative),
            "BOUNDARY" => Some(Region::Boundary),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildParams {
    /// A node with positive fraction `>= alpha` is a positive region.
    pub alpha: f64,
    /// A node with positive fraction `<= beta` is a negative region.
    pub beta: f64,
    /// Nodes with fewer objects are not split.
    pub min_split: usize,
    pub max_depth: Option<usize>,
}

impl Default for BuildParams {
    fn default() -> Self {
        BuildParams {
            alpha: 0.9,
            beta: 0.15,
            min_split: 4,
            max_depth: None,
        }
    }
}

impl BuildParams {
    /// Literal purity: only all-positive or all-negative nodes are settled.
    pub fn strict() -> Self {
        BuildParams {
            alpha: 1.0,
            beta: 0.0,
            min_split: 2,
            max_depth: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = (0.0..=1.0).contains(&self.beta)
            && (0.0..=1.0).contains(&self.alpha)
            && self.beta < self.alpha;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidThresholds {
                alpha: self.alpha,
                beta: self.beta,
            })
        }
    }
}

/// Three-way region of a node with positive fraction `v`.
pub fn classify_region(v: f64, params: &BuildParams) -> Region {
    if v >= params.alpha {
        Region::Positive
    } else if v <= params.beta {
        Region::Negative
    } else {
        Region::Boundary
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafReason {
    PureRegion,
    MinSamples,
    NoDefinedCandidate,
    AttributeExhausted,
    MaxDepth,
    /// Decision-tree baseline only: no split reduces impurity.
    NoGain,
}

impl LeafReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            LeafReason::PureRegion => "pure-region",
            LeafReason::MinSamples => "min-samples",
            LeafReason::NoDefinedCandidate => "no-defined-candidate",
            LeafReason::AttributeExhausted => "attribute-exhausted",
            LeafReason::MaxDepth => "max-depth",
            LeafReason::NoGain => "no-gain",
        }
    }

    pub fn parse(s: &str) -> Option<LeafReason> {
        [
            LeafReason::PureRegion,
            LeafReason::MinSamples,
            LeafReason::NoDefinedCandidate,
            LeafReason::AttributeExhausted,
            LeafReason::MaxDepth,
            LeafReason::NoGain,
        ]
        .into_iter()
        .find(|r| r.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Children {
    pub absent: usize,
    pub present: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureNode {
    pub id: usize,
    /// Depth from the root; the root's children are level 1.
    pub level: usize,
    pub parent: Option<usize>,
    pub scope: NodeScope,
    pub positives: usize,
    pub region: Region,
    /// Score of the split attribute, computed in this node's scope.
    pub split: Option<CausalScore>,
    pub children: Option<Children>,
    pub leaf_reason: Option<LeafReason>,
}

impl StructureNode {
    pub fn size(&self) -> usize {
        self.scope.len()
    }

    pub fn positive_fraction(&self) -> f64 {
        if self.size() == 0 {
            0.0
        } else {
            self.positives as f64 / self.size() as f64
        }
    }

    pub fn split_attribute(&self) -> Option<usize> {
        self.split.map(|s| s.attribute)
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }
}

/// A built structure. Nodes are stored in pre-order (absent branch first), so
/// node `0` is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct Structure {
    nodes: Vec<StructureNode>,
    params: BuildParams,
    attributes: Vec<String>,
    n_objects: usize,
    fingerprint: u64,
    binarization: Option<BinarizationMap>,
}

impl Structure {
    /// Reassembles a structure from stored parts, checking the tree invariants.
    pub fn from_parts(
        nodes: Vec<StructureNode>,
        params: BuildParams,
        attributes: Vec<String>,
        n_objects: usize,
        fingerprint: u64,
        binarization: Option<BinarizationMap>,
    ) -> Result<Structure> {
        params.validate()?;
        let s = Structure {
            nodes,
            params,
            attributes,
            n_objects,
            fingerprint,
            binarization,
        };
        s.check()?;
        Ok(s)
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::MalformedStructure(msg));
        if self.nodes.is_empty() {
            return bad("no nodes".to_string());
        }
        if let Some(map) = &self.binarization {
            if map.attribute_names() != self.attributes {
                return bad("binarization rules do not match attributes".to_string());
            }
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i {
                return bad(format!("node at position {i} has id {}", node.id));
            }
            if node.scope.objects.universe() != self.n_objects {
                return bad(format!("node {i} scope has the wrong universe"));
            }
            if node.positives > node.size() {
                return bad(format!("node {i} has more positives than objects"));
            }
            if node.split.is_some() != node.children.is_some() {
                return bad(format!("node {i}: split and children disagree"));
            }
            if node.is_leaf() != node.leaf_reason.is_some() {
                return bad(format!("node {i}: leaf reason and children disagree"));
            }
            if let Some(m) = node.split_attribute() {
                if m >= self.attributes.len() || node.scope.is_conditioned(m) {
                    return bad(format!("node {i}: invalid split attribute"));
                }
            }
            if let Some(Children { absent, present }) = node.children {
                for (child, flag) in [(absent, false), (present, true)] {
                    let Some(c) = self.nodes.get(child) else {
                        return bad(format!("node {i}: child {child} missing"));
                    };
                    let expected = Condition {
                        attribute: node.split_attribute().unwrap(),
                        present: flag,
                    };
                    if c.parent != Some(i)
                        || c.level != node.level + 1
                        || child <= i
                        || c.scope.conditions.last() != Some(&expected)
                        || c.scope.conditions.len() != node.scope.conditions.len() + 1
                    {
                        return bad(format!("node {i}: inconsistent child {child}"));
                    }
                }
                let a = &self.nodes[absent].scope.objects;
                let p = &self.nodes[present].scope.objects;
                let mut union = a.clone();
                union.union_with(p);
                if a.intersection_len(p) != 0 || union != node.scope.objects {
                    return bad(format!("node {i}: children do not partition the scope"));
                }
            }
        }
        if self.nodes[0].parent.is_some() || self.nodes[0].level != 0 {
            return bad("node 0 is not a root".to_string());
        }
        Ok(())
    }

    pub fn root(&self) -> &StructureNode {
        &self.nodes[0]
    }

    pub fn nodes(&self) -> &[StructureNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &StructureNode {
        &self.nodes[id]
    }

    pub fn params(&self) -> &BuildParams {
        &self.params
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    /// Fingerprint of the training context.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn binarization(&self) -> Option<&BinarizationMap> {
        self.binarization.as_ref()
    }

    pub fn with_binarization(mut self, map: BinarizationMap) -> Result<Structure> {
        self.binarization = Some(map);
        self.check()?;
        Ok(self)
    }

    pub fn leaves(&self) -> impl Iterator<Item = &StructureNode> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.level).max().unwrap_or(0)
    }
}

/// Best splitting attribute among `candidates` in `scope`: the strongest
/// defined score whose attribute splits the scope into two nonempty sides.
pub fn select_split(
    ctx: &FormalDecisionContext,
    candidates: &[usize],
    scope: &NodeScope,
) -> Result<Option<CausalScore>> {
    let ranked = causal::rank_attributes(ctx, candidates, scope)?;
    Ok(ranked.into_iter().find(|s| {
        // a defined score implies both sides are populated
        s.is_defined() && {
            let inside = scope
                .objects
                .intersection_len(ctx.attribute_extent(s.attribute));
            inside > 0 && inside < scope.len()
        }
    }))
}

/// Splits `scope` by presence of `m`: `(absent side, present side)`.
pub fn split(
    ctx: &FormalDecisionContext,
    scope: &NodeScope,
    m: usize,
) -> Result<(NodeScope, NodeScope)> {
    let absent = scope.child(ctx, m, false)?;
    let present = scope.child(ctx, m, true)?;
    if absent.is_empty() || present.is_empty() {
        return Err(Error::EmptySplitSide(ctx.attribute_name(m).to_string()));
    }
    Ok((absent, present))
}

pub fn build_structure(ctx: &FormalDecisionContext, params: &BuildParams) -> Result<Structure> {
    params.validate()?;
    if ctx.n_objects() == 0 {
        return Err(Error::EmptyContext);
    }
    let mut nodes = Vec::new();
    grow(ctx, params, NodeScope::root(ctx), 0, None, &mut nodes)?;
    Structure::from_parts(
        nodes,
        *params,
        ctx.attributes().to_vec(),
        ctx.n_objects(),
        ctx.fingerprint(),
        None,
    )
}

fn grow(
    ctx: &FormalDecisionContext,
    params: &BuildParams,
    scope: NodeScope,
    level: usize,
    parent: Option<usize>,
    nodes: &mut Vec<StructureNode>,
) -> Result<usize> {
    let id = nodes.len();
    let positives = scope.objects.intersection_len(ctx.decision());
    let v = positives as f64 / scope.len() as f64;
    let region = classify_region(v, params);
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
    let choice = match leaf_reason {
        None => {
            let c = select_split(ctx, &candidates, &scope)?;
            if c.is_none() {
                leaf_reason = Some(LeafReason::NoDefinedCandidate);
            }
            c
        }
        Some(_) => None,
    };

    nodes.push(StructureNode {
        id,
        level,
        parent,
        scope,
        positives,
        region,
        split: choice,
        children: None,
        leaf_reason,
    });

    if let Some(score) = choice {
        let (absent, present) = split(ctx, &nodes[id].scope, score.attribute)?;
        let absent = grow(ctx, params, absent, level + 1, Some(id), nodes)?;
        let present = grow(ctx, params, present, level + 1, Some(id), nodes)?;
        nodes[id].children = Some(Children { absent, present });
    }
    Ok(id)
}
