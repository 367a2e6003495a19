//! Prediction through built trees, confusion-matrix metrics and
//! leave-one-out cross-validation.

use alloc::string::String;
use alloc::vec::Vec;

use crate::cart::{build_cart, CartTree};
use crate::causal::Condition;
use crate::context::{build_context, BinarizeOptions, RawDataset};
use crate::error::{Error, Result};
use crate::structure::{build_structure, BuildParams, Children, Region, Structure};

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: bool,
    pub leaf_id: usize,
    /// Conditions taken from the root to the leaf.
    pub trace: Vec<Condition>,
    /// Training fraction of the predicted class at the leaf.
    pub confidence: f64,
}

/// Read access to a binary tree of scoped nodes, shared by both learners.
pub trait DecisionTree {
    fn n_attributes(&self) -> usize;
    fn split_of(&self, id: usize) -> Option<(usize, Children)>;
    /// `(size, positives)` of the node's training scope.
    fn counts(&self, id: usize) -> (usize, usize);
    fn parent_of(&self, id: usize) -> Option<usize>;
    fn conditions_of(&self, id: usize) -> &[Condition];
    /// A label fixed by the node itself, if any; otherwise majority vote applies.
    fn settled_label(&self, id: usize) -> Option<bool>;
}

impl DecisionTree for Structure {
    fn n_attributes(&self) -> usize {
        self.attributes().len()
    }
    fn split_of(&self, id: usize) -> Option<(usize, Children)> {
        let n = self.node(id);
        Some((n.split_attribute()?, n.children?))
    }
    fn counts(&self, id: usize) -> (usize, usize) {
        let n = self.node(id);
        (n.size(), n.positives)
    }
    fn parent_of(&self, id: usize) -> Option<usize> {
        self.node(id).parent
    }
    fn conditions_of(&self, id: usize) -> &[Condition] {
        &self.node(id).scope.conditions
    }
    fn settled_label(&self, id: usize) -> Option<bool> {
        match self.node(id).region {
            Region::Positive => Some(true),
            Region::Negative => Some(false),
            Region::Boundary => None,
        }
    }
}

impl DecisionTree for CartTree {
    fn n_attributes(&self) -> usize {
        self.attributes().len()
    }
    fn split_of(&self, id: usize) -> Option<(usize, Children)> {
        let n = self.node(id);
        Some((n.split_attribute?, n.children?))
    }
    fn counts(&self, id: usize) -> (usize, usize) {
        let n = self.node(id);
        (n.size(), n.positives)
    }
    fn parent_of(&self, id: usize) -> Option<usize> {
        self.node(id).parent
    }
    fn conditions_of(&self, id: usize) -> &[Condition] {
        &self.node(id).scope.conditions
    }
    fn settled_label(&self, _id: usize) -> Option<bool> {
        None
    }
}

/// Majority decision at `id`, walking up through ties; a tie at the root is 0.
fn majority_with_fallback<T: DecisionTree + ?Sized>(tree: &T, mut id: usize) -> bool {
    loop {
        let (size, pos) = tree.counts(id);
        let neg = size - pos;
        if pos != neg {
            return pos > neg;
        }
        match tree.parent_of(id) {
            Some(p) => id = p,
            None => return false,
        }
    }
}

/// Routes `sample` (one value per attribute) to a leaf and labels it.
pub fn predict_with<T: DecisionTree + ?Sized>(tree: &T, sample: &[bool]) -> Result<Prediction> {
    if sample.len() != tree.n_attributes() {
        return Err(Error::SampleWidth {
            found: sample.len(),
            expected: tree.n_attributes(),
        });
    }
    let mut id = 0;
    while let Some((m, kids)) = tree.split_of(id) {
        id = if sample[m] { kids.present } else { kids.absent };
    }
    let label = tree
        .settled_label(id)
        .unwrap_or_else(|| majority_with_fallback(tree, id));
    let (size, pos) = tree.counts(id);
    let fraction = if size == 0 {
        0.0
    } else {
        pos as f64 / size as f64
    };
    Ok(Prediction {
        label,
        leaf_id: id,
        trace: tree.conditions_of(id).to_vec(),
        confidence: if label { fraction } else { 1.0 - fraction },
    })
}

pub fn predict(s: &Structure, sample: &[bool]) -> Result<Prediction> {
    predict_with(s, sample)
}

pub fn predict_cart(tree: &CartTree, sample: &[bool]) -> Result<Prediction> {
    predict_with(tree, sample)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn from_labels(predicted: &[bool], truth: &[bool]) -> Result<Confusion> {
        if predicted.len() != truth.len() {
            return Err(Error::LengthMismatch {
                predictions: predicted.len(),
                truth: truth.len(),
            });
        }
        let mut c = Confusion::default();
        for (&p, &t) in predicted.iter().zip(truth) {
            match (p, t) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

/// Metrics whose denominator was zero; they are reported as 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct UndefinedMetrics {
    pub rec: bool,
    pub fpr: bool,
    pub pre: bool,
    pub f1: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub acc: f64,
    pub rec: f64,
    pub fpr: f64,
    pub pre: f64,
    pub f1: f64,
}

fn ratio(num: usize, den: usize) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

impl Metrics {
    pub fn from_confusion(c: &Confusion) -> Result<(Metrics, UndefinedMetrics)> {
        if c.total() == 0 {
            return Err(Error::EmptyEvaluation);
        }
        let (acc, _) = ratio(c.tp + c.tn, c.total());
        let (rec, rec_u) = ratio(c.tp, c.tp + c.fn_);
        let (fpr, fpr_u) = ratio(c.fp, c.tn + c.fp);
        let (pre, pre_u) = ratio(c.tp, c.tp + c.fp);
        let f1_u = rec_u || pre_u || rec + pre == 0.0;
        let f1 = if f1_u {
            0.0
        } else {
            2.0 * rec * pre / (rec + pre)
        };
        Ok((
            Metrics {
                acc,
                rec,
                fpr,
                pre,
                f1,
            },
            UndefinedMetrics {
                rec: rec_u,
                fpr: fpr_u,
                pre: pre_u,
                f1: f1_u,
            },
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldRecord {
    /// Row index of the held-out object.
    pub object: usize,
    pub label: String,
    pub prediction: Prediction,
    pub truth: bool,
    /// Fingerprint of the binary context the fold's model was trained on.
    pub context_fingerprint: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedFold {
    pub object: usize,
    pub reason: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub confusion: Confusion,
    pub metrics: Metrics,
    pub undefined: UndefinedMetrics,
    pub per_fold: Vec<FoldRecord>,
    pub skipped: Vec<SkippedFold>,
    /// Folds whose training rows held only one decision class.
    pub single_class_folds: usize,
}

impl EvalReport {
    pub fn from_confusion(confusion: Confusion) -> Result<EvalReport> {
        let (metrics, undefined) = Metrics::from_confusion(&confusion)?;
        Ok(EvalReport {
            confusion,
            metrics,
            undefined,
            per_fold: Vec::new(),
            skipped: Vec::new(),
            single_class_folds: 0,
        })
    }
}

/// Confusion counts and the five metrics for `preds` against `truth`.
pub fn metrics(preds: &[Prediction], truth: &[bool]) -> Result<EvalReport> {
    let labels: Vec<bool> = preds.iter().map(|p| p.label).collect();
    EvalReport::from_confusion(Confusion::from_labels(&labels, truth)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Learner {
    Causal,
    Cart,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Causal(Structure),
    Cart(CartTree),
}

impl Learner {
    pub fn fit(
        &self,
        ctx: &crate::context::FormalDecisionContext,
        params: &BuildParams,
    ) -> Result<Model> {
        Ok(match self {
            Learner::Causal => Model::Causal(build_structure(ctx, params)?),
            Learner::Cart => Model::Cart(build_cart(ctx, params)?),
        })
    }
}

impl Model {
    pub fn predict(&self, sample: &[bool]) -> Result<Prediction> {
        match self {
            Model::Causal(s) => predict(s, sample),
            Model::Cart(t) => predict_cart(t, sample),
        }
    }

    pub fn fingerprint(&self) -> u64 {
        match self {
            Model::Causal(s) => s.fingerprint(),
            Model::Cart(t) => t.fingerprint(),
        }
    }
}

/// Leave-one-out cross-validation of one learner.
pub fn loocv(
    raw: &RawDataset,
    params: &BuildParams,
    learner: Learner,
    options: &BinarizeOptions,
) -> Result<EvalReport> {
    Ok(loocv_many(raw, params, &[learner], options)?.remove(0))
}

/// Leave-one-out cross-validation of several learners. Each fold refits the
/// binarization on its training rows and feeds the same binary context to
/// every learner.
pub fn loocv_many(
    raw: &RawDataset,
    params: &BuildParams,
    learners: &[Learner],
    options: &BinarizeOptions,
) -> Result<Vec<EvalReport>> {
    params.validate()?;
    let n = raw.n_rows();
    if n < 2 {
        return Err(Error::EmptyEvaluation);
    }
    if !raw.has_both_classes() {
        return Err(Error::DecisionNotBinary(1));
    }
    let mut folds: Vec<Vec<FoldRecord>> = learners.iter().map(|_| Vec::new()).collect();
    let mut skipped: Vec<Vec<SkippedFold>> = learners.iter().map(|_| Vec::new()).collect();
    let mut single_class = 0;
    for i in 0..n {
        let train = raw.without_row(i);
        if !train.has_both_classes() {
            single_class += 1;
        }
        let prepared = build_context(&train, options).and_then(|(ctx, map)| {
            let sample = map.encode_row(raw, i)?;
            Ok((ctx, sample))
        });
        let (ctx, sample) = match prepared {
            Ok(p) => p,
            Err(reason) => {
                for s in skipped.iter_mut() {
                    s.push(SkippedFold {
                        object: i,
                        reason: reason.clone(),
                    });
                }
                continue;
            }
        };
        for (k, learner) in learners.iter().enumerate() {
            match learner.fit(&ctx, params).and_then(|m| m.predict(&sample)) {
                Ok(prediction) => folds[k].push(FoldRecord {
                    object: i,
                    label: raw.row_labels()[i].clone(),
                    prediction,
                    truth: raw.decision()[i],
                    context_fingerprint: ctx.fingerprint(),
                }),
                Err(reason) => skipped[k].push(SkippedFold { object: i, reason }),
            }
        }
    }
    folds
        .into_iter()
        .zip(skipped)
        .map(|(per_fold, skipped)| {
            let predicted: Vec<bool> = per_fold.iter().map(|f| f.prediction.label).collect();
            let truth: Vec<bool> = per_fold.iter().map(|f| f.truth).collect();
            let mut report =
                EvalReport::from_confusion(Confusion::from_labels(&predicted, &truth)?)?;
            report.per_fold = per_fold;
            report.skipped = skipped;
            report.single_class_folds = single_class;
            Ok(report)
        })
        .collect()
}
