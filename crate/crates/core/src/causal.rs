//! Causal factor scoring of binary attributes against the decision.
//!
//! For an attribute `m` and the positive decision `c`, counted inside a
//! [`NodeScope`]:
//!
//! ```text
//! CF(m) = p(c | do(m)) / p(c | m)
//! NC(m) = 1 / (1 + exp(-|ln CF(m)|))
//! ```
//!
//! The interventional term is estimated as `p(c | m absent)` within the scope.
//! `NC` lies in `[1/2, 1]`: `1/2` means no causal correlation (`CF = 1`) and
//! `CF = 0` (a focus attribute) maps to the upper bound `1`.
//!
//! Scores are undefined when `p(c | m) = 0` (the attribute is unrelated to
//! the decision) or when either side of the attribute is empty in scope.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::bitset::BitSet;
use crate::context::FormalDecisionContext;
use crate::error::{Error, Result};

/// One step on a root-to-node path: `attribute` held (`present`) or not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Condition {
    pub attribute: usize,
    pub present: bool,
}

/// The population of a node together with the path conditions that select it.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeScope {
    pub objects: BitSet,
    pub conditions: Vec<Condition>,
}

impl NodeScope {
    pub fn root(ctx: &FormalDecisionContext) -> NodeScope {
        NodeScope {
            objects: ctx.all_objects(),
            conditions: Vec::new(),
        }
    }

    /// Re-derives a scope from path conditions alone.
    pub fn from_conditions(
        ctx: &FormalDecisionContext,
        conditions: &[Condition],
    ) -> Result<NodeScope> {
        let mut scope = NodeScope::root(ctx);
        for c in conditions {
            scope = scope.child(ctx, c.attribute, c.present)?;
        }
        Ok(scope)
    }

    pub fn is_conditioned(&self, m: usize) -> bool {
        self.conditions.iter().any(|c| c.attribute == m)
    }

    pub fn child(&self, ctx: &FormalDecisionContext, m: usize, present: bool) -> Result<NodeScope> {
        if m >= ctx.n_attributes() {
            return Err(Error::AttributeOutOfRange(m));
        }
        if self.is_conditioned(m) {
            return Err(Error::AlreadyConditioned(ctx.attribute_name(m).to_string()));
        }
        let objects = if present {
            self.objects.intersection(ctx.attribute_extent(m))
        } else {
            self.objects.difference(ctx.attribute_extent(m))
        };
        let mut conditions = self.conditions.clone();
        conditions.push(Condition {
            attribute: m,
            present,
        });
        Ok(NodeScope {
            objects,
            conditions,
        })
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }
}

/// Four-cell contingency counts of an attribute against the decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CellCounts {
    pub with_pos: usize,
    pub with_total: usize,
    pub without_pos: usize,
    pub without_total: usize,
}

impl CellCounts {
    pub fn tally(extent: &BitSet, decision: &BitSet, scope: &BitSet) -> CellCounts {
        let with = extent.intersection(scope);
        let without = scope.difference(extent);
        CellCounts {
            with_pos: with.intersection_len(decision),
            with_total: with.len(),
            without_pos: without.intersection_len(decision),
            without_total: without.len(),
        }
    }

    /// `p(c | m)`, or `None` when no object holds `m`.
    pub fn conditional(&self) -> Option<f64> {
        (self.with_total > 0).then(|| self.with_pos as f64 / self.with_total as f64)
    }

    /// `p(c | m absent)`, or `None` when every object holds `m`.
    pub fn complement(&self) -> Option<f64> {
        (self.without_total > 0).then(|| self.without_pos as f64 / self.without_total as f64)
    }
}

/// Why a causal factor could not be computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Undefined {
    /// No object in scope holds the attribute.
    NoHolders,
    /// Every object in scope holds the attribute.
    NoComplement,
    /// `p(c | m) = 0`: the attribute is unrelated to the decision.
    Unrelated,
}

impl Undefined {
    pub fn as_str(&self) -> &'static str {
        match self {
            Undefined::NoHolders => "no-holders",
            Undefined::NoComplement => "no-complement",
            Undefined::Unrelated => "unrelated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Causality {
    pub cf: f64,
    /// `|ln cf|`; `f64::MAX` when `cf = 0`.
    pub log_abs: f64,
    pub nc: f64,
}

impl Causality {
    pub fn from_cf(cf: f64) -> Causality {
        debug_assert!(cf >= 0.0 && cf.is_finite());
        if cf == 0.0 {
            Causality {
                cf,
                log_abs: f64::MAX,
                nc: 1.0,
            }
        } else {
            let log_abs = libm::fabs(libm::log(cf));
            Causality {
                cf,
                log_abs,
                nc: sigmoid(log_abs),
            }
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-x))
}

/// `NC` for a causal factor; `None` passes through.
pub fn normalized_causality(cf: Option<f64>) -> Option<f64> {
    cf.map(|cf| Causality::from_cf(cf).nc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CausalScore {
    pub attribute: usize,
    pub outcome: core::result::Result<Causality, Undefined>,
}

impl CausalScore {
    pub fn is_defined(&self) -> bool {
        self.outcome.is_ok()
    }

    pub fn cf(&self) -> Option<f64> {
        self.outcome.ok().map(|c| c.cf)
    }

    pub fn nc(&self) -> Option<f64> {
        self.outcome.ok().map(|c| c.nc)
    }

    pub fn log_abs(&self) -> Option<f64> {
        self.outcome.ok().map(|c| c.log_abs)
    }

    pub fn is_focus(&self) -> bool {
        self.cf() == Some(0.0)
    }
}

/// Ranking order: defined before undefined, stronger causality first, then
/// declaration order.
pub fn rank_order(a: &CausalScore, b: &CausalScore) -> Ordering {
    match (a.outcome, b.outcome) {
        (Ok(x), Ok(y)) => y
            .log_abs
            .total_cmp(&x.log_abs)
            .then(a.attribute.cmp(&b.attribute)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.attribute.cmp(&b.attribute),
    }
}

/// Causal factor from contingency counts.
pub fn score_counts(c: &CellCounts) -> core::result::Result<Causality, Undefined> {
    let conditional = c.conditional().ok_or(Undefined::NoHolders)?;
    let interventional = c.complement().ok_or(Undefined::NoComplement)?;
    if conditional == 0.0 {
        return Err(Undefined::Unrelated);
    }
    Ok(Causality::from_cf(interventional / conditional))
}

fn counts_in_scope(ctx: &FormalDecisionContext, m: usize, scope: &NodeScope) -> Result<CellCounts> {
    if m >= ctx.n_attributes() {
        return Err(Error::AttributeOutOfRange(m));
    }
    if scope.is_conditioned(m) {
        return Err(Error::AlreadyConditioned(ctx.attribute_name(m).to_string()));
    }
    Ok(CellCounts::tally(
        ctx.attribute_extent(m),
        ctx.decision(),
        &scope.objects,
    ))
}

/// `p(c | m)` within the scope; `Ok(None)` when no object in scope holds `m`.
pub fn conditional_prob(
    ctx: &FormalDecisionContext,
    m: usize,
    scope: &NodeScope,
) -> Result<Option<f64>> {
    Ok(counts_in_scope(ctx, m, scope)?.conditional())
}

/// The interventional estimate `p(c | do(m))`, taken as `p(c | m absent)`
/// within the scope; `Ok(None)` when every object in scope holds `m`.
pub fn interventional_prob(
    ctx: &FormalDecisionContext,
    m: usize,
    scope: &NodeScope,
) -> Result<Option<f64>> {
    Ok(counts_in_scope(ctx, m, scope)?.complement())
}

pub fn causal_factor(
    ctx: &FormalDecisionContext,
    m: usize,
    scope: &NodeScope,
) -> Result<CausalScore> {
    let counts = counts_in_scope(ctx, m, scope)?;
    Ok(CausalScore {
        attribute: m,
        outcome: score_counts(&counts),
    })
}

/// Scores every candidate in scope and sorts them by [`rank_order`].
pub fn rank_attributes(
    ctx: &FormalDecisionContext,
    candidates: &[usize],
    scope: &NodeScope,
) -> Result<Vec<CausalScore>> {
    let mut scores = candidates
        .iter()
        .map(|&m| causal_factor(ctx, m, scope))
        .collect::<Result<Vec<_>>>()?;
    scores.sort_by(rank_order);
    Ok(scores)
}

/// Alternative estimators for the interventional term.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Estimator {
    /// `p(c | m absent)` within the scope.
    #[default]
    ComplementConditional,
    /// EXPERIMENTAL. Stratifies on the given covariates and reports
    /// `sum_z p(c | m absent, z) p(z) / sum_z p(c | m, z) p(z)`, using only
    /// strata where both arms are populated. Not used by structure building.
    StratifiedAdjustment { covariates: Vec<usize> },
}

pub fn causal_factor_with(
    ctx: &FormalDecisionContext,
    m: usize,
    scope: &NodeScope,
    estimator: &Estimator,
) -> Result<CausalScore> {
    let covariates = match estimator {
        Estimator::ComplementConditional => return causal_factor(ctx, m, scope),
        Estimator::StratifiedAdjustment { covariates } => covariates,
    };
    let counts = counts_in_scope(ctx, m, scope)?;
    if let Some(&z) = covariates.iter().find(|&&z| z >= ctx.n_attributes()) {
        return Err(Error::AttributeOutOfRange(z));
    }
    let covariates: Vec<usize> = covariates.iter().copied().filter(|&z| z != m).collect();
    let mut strata: BTreeMap<Vec<bool>, CellCounts> = BTreeMap::new();
    let extent = ctx.attribute_extent(m);
    for g in &scope.objects {
        let key: Vec<bool> = covariates.iter().map(|&z| ctx.has(g, z)).collect();
        let cell = strata.entry(key).or_default();
        let pos = ctx.decision().contains(g) as usize;
        if extent.contains(g) {
            cell.with_total += 1;
            cell.with_pos += pos;
        } else {
            cell.without_total += 1;
            cell.without_pos += pos;
        }
    }
    let usable: Vec<&CellCounts> = strata
        .values()
        .filter(|c| c.with_total > 0 && c.without_total > 0)
        .collect();
    let outcome = if counts.with_total == 0 {
        Err(Undefined::NoHolders)
    } else if counts.without_total == 0 || usable.is_empty() {
        Err(Undefined::NoComplement)
    } else {
        let weight: usize = usable.iter().map(|c| c.with_total + c.without_total).sum();
        let (mut num, mut den) = (0.0, 0.0);
        for c in &usable {
            let w = (c.with_total + c.without_total) as f64 / weight as f64;
            num += w * c.complement().unwrap_or(0.0);
            den += w * c.conditional().unwrap_or(0.0);
        }
        if den == 0.0 {
            Err(Undefined::Unrelated)
        } else {
            Ok(Causality::from_cf(num / den))
        }
    };
    Ok(CausalScore {
        attribute: m,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::watermelon;
    use alloc::vec;

    fn idx(ctx: &FormalDecisionContext, name: &str) -> usize {
        ctx.attribute_index(name).unwrap()
    }

    #[test]
    fn clear_probabilities() {
        let ctx = watermelon();
        let root = NodeScope::root(&ctx);
        let clear = idx(&ctx, "clear");
        assert_eq!(
            conditional_prob(&ctx, clear, &root).unwrap(),
            Some(8.0 / 9.0)
        );
        assert_eq!(
            interventional_prob(&ctx, clear, &root).unwrap(),
            Some(1.0 / 8.0)
        );
    }

    #[test]
    fn turbid_and_concave_probabilities() {
        let ctx = watermelon();
        let root = NodeScope::root(&ctx);
        assert_eq!(
            conditional_prob(&ctx, idx(&ctx, "turbid"), &root).unwrap(),
            Some(6.0 / 10.0)
        );
        assert_eq!(
            interventional_prob(&ctx, idx(&ctx, "concave"), &root).unwrap(),
            Some(4.0 / 10.0)
        );
    }

    #[test]
    fn empty_denominators_are_undefined() {
        let ctx = watermelon();
        let clear = idx(&ctx, "clear");
        let absent = NodeScope::root(&ctx).child(&ctx, clear, false).unwrap();
        let present = NodeScope::root(&ctx).child(&ctx, clear, true).unwrap();
        let clear_only = NodeScope {
            objects: present.objects.clone(),
            conditions: vec![],
        };
        assert_eq!(
            conditional_prob(
                &ctx,
                clear,
                &NodeScope {
                    objects: absent.objects,
                    conditions: vec![]
                }
            )
            .unwrap(),
            None
        );
        assert_eq!(interventional_prob(&ctx, clear, &clear_only).unwrap(), None);
        assert_eq!(
            causal_factor(&ctx, clear, &clear_only).unwrap().outcome,
            Err(Undefined::NoComplement)
        );
    }

    #[test]
    fn conditioned_attribute_rejected() {
        let ctx = watermelon();
        let clear = idx(&ctx, "clear");
        let scope = NodeScope::root(&ctx).child(&ctx, clear, true).unwrap();
        assert_eq!(
            causal_factor(&ctx, clear, &scope),
            Err(Error::AlreadyConditioned("clear".into()))
        );
    }

    #[test]
    fn watermelon_causal_factors() {
        let ctx = watermelon();
        let root = NodeScope::root(&ctx);
        let cf = |n: &str| {
            causal_factor(&ctx, idx(&ctx, n), &root)
                .unwrap()
                .cf()
                .unwrap()
        };
        assert!((cf("clear") - 0.140625).abs() < 1e-15);
        assert!((cf("hard slippery") - 1.2).abs() < 1e-12);
    }

    #[test]
    fn decision_copy_is_focus() {
        let ctx = watermelon();
        let incidence: Vec<Vec<bool>> = (0..17).map(|g| vec![ctx.decision().contains(g)]).collect();
        let decision: Vec<bool> = (0..17).map(|g| ctx.decision().contains(g)).collect();
        let copy = FormalDecisionContext::new(
            ctx.object_labels().to_vec(),
            vec!["good copy".into()],
            &incidence,
            &decision,
        )
        .unwrap();
        let s = causal_factor(&copy, 0, &NodeScope::root(&copy)).unwrap();
        assert!(s.is_focus());
        assert_eq!(s.nc(), Some(1.0));
        assert_eq!(s.log_abs(), Some(f64::MAX));
    }

    #[test]
    fn normalization_values() {
        assert_eq!(normalized_causality(Some(1.0)), Some(0.5));
        assert_eq!(normalized_causality(Some(0.0)), Some(1.0));
        assert_eq!(normalized_causality(None), None);
        let nc = normalized_causality(Some(9.0 / 64.0)).unwrap();
        assert!((nc - 0.877).abs() < 5e-4);
        let nc = normalized_causality(Some(1.2)).unwrap();
        assert!((nc - 0.545).abs() < 5e-4);
        // |ln cf| is symmetric: cf and 1/cf score the same
        let a = normalized_causality(Some(0.25)).unwrap();
        let b = normalized_causality(Some(4.0)).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn ranking_of_watermelon() {
        let ctx = watermelon();
        let all: Vec<usize> = (0..6).collect();
        let ranked = rank_attributes(&ctx, &all, &NodeScope::root(&ctx)).unwrap();
        let names: Vec<&str> = ranked
            .iter()
            .map(|s| ctx.attribute_name(s.attribute))
            .collect();
        assert_eq!(
            names,
            vec![
                "clear",
                "concave",
                "black",
                "curled",
                "turbid",
                "hard slippery"
            ]
        );
    }

    #[test]
    fn ranking_single_candidate() {
        let ctx = watermelon();
        let r = rank_attributes(&ctx, &[2], &NodeScope::root(&ctx)).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].attribute, 2);
    }

    #[test]
    fn duplicated_column_ties_in_declaration_order() {
        let ctx = FormalDecisionContext::new(
            (1..=4).map(|i| i.to_string()).collect(),
            vec!["a".into(), "b".into(), "a2".into()],
            &[
                vec![true, false, true],
                vec![true, true, true],
                vec![false, true, false],
                vec![false, false, false],
            ],
            &[true, false, false, false],
        )
        .unwrap();
        let ranked = rank_attributes(&ctx, &[2, 1, 0], &NodeScope::root(&ctx)).unwrap();
        let a = ranked.iter().find(|s| s.attribute == 0).unwrap();
        let a2 = ranked.iter().find(|s| s.attribute == 2).unwrap();
        assert_eq!(a.outcome, a2.outcome);
        let pos_a = ranked.iter().position(|s| s.attribute == 0).unwrap();
        let pos_a2 = ranked.iter().position(|s| s.attribute == 2).unwrap();
        assert_eq!(pos_a2, pos_a + 1);
    }

    #[test]
    fn undefined_sorts_last() {
        let ctx = FormalDecisionContext::new(
            (1..=3).map(|i| i.to_string()).collect(),
            vec!["never".into(), "x".into()],
            &[vec![false, true], vec![false, false], vec![false, true]],
            &[true, false, false],
        )
        .unwrap();
        let ranked = rank_attributes(&ctx, &[0, 1], &NodeScope::root(&ctx)).unwrap();
        assert_eq!(ranked[0].attribute, 1);
        assert_eq!(ranked[1].outcome, Err(Undefined::NoHolders));
    }

    #[test]
    fn unrelated_attribute_is_undefined() {
        let counts = CellCounts {
            with_pos: 0,
            with_total: 3,
            without_pos: 2,
            without_total: 4,
        };
        assert_eq!(score_counts(&counts), Err(Undefined::Unrelated));
    }

    #[test]
    fn stratified_adjustment_without_covariates_matches_default() {
        let ctx = watermelon();
        let root = NodeScope::root(&ctx);
        for m in 0..6 {
            let a = causal_factor(&ctx, m, &root).unwrap();
            let b = causal_factor_with(
                &ctx,
                m,
                &root,
                &Estimator::StratifiedAdjustment { covariates: vec![] },
            )
            .unwrap();
            assert_eq!(a.cf(), b.cf());
        }
    }

    #[test]
    fn stratified_adjustment_removes_confounding() {
        // z drives both m and c; within each stratum m has no effect
        let mut rows: Vec<(bool, bool, bool)> = Vec::new();
        for (z, m, n, pos) in [
            (true, true, 6, 4),
            (true, false, 3, 2),
            (false, true, 3, 1),
            (false, false, 6, 2),
        ] {
            for i in 0..n {
                rows.push((z, m, i < pos));
            }
        }
        let incidence: Vec<Vec<bool>> = rows.iter().map(|&(z, m, _)| vec![z, m]).collect();
        let decision: Vec<bool> = rows.iter().map(|&(_, _, c)| c).collect();
        let ctx = FormalDecisionContext::new(
            (1..=18).map(|i| i.to_string()).collect(),
            vec!["z".into(), "m".into()],
            &incidence,
            &decision,
        )
        .unwrap();
        let root = NodeScope::root(&ctx);
        let naive = causal_factor(&ctx, 1, &root).unwrap().cf().unwrap();
        let adjusted = causal_factor_with(
            &ctx,
            1,
            &root,
            &Estimator::StratifiedAdjustment {
                covariates: vec![0],
            },
        )
        .unwrap()
        .cf()
        .unwrap();
        assert!((naive - 0.8).abs() < 1e-12);
        assert!((adjusted - 1.0).abs() < 1e-12);
    }
}
