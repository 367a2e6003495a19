//! Self-describing JSON documents for built models, with an optional
//! evaluation block. Numbers are written in shortest round-trip form, so
//! export, import and export again gives identical bytes.

use serde::{Deserialize, Serialize};

use wcapos_core::cart::{CartNode, CartTree};
use wcapos_core::causal::{CausalScore, Causality, Condition, NodeScope};
use wcapos_core::context::{BinarizationMap, DroppedColumn, Rule, RuleKind};
use wcapos_core::eval::{EvalReport, Model};
use wcapos_core::structure::{BuildParams, Children, LeafReason, Region, Structure, StructureNode};
use wcapos_core::{BitSet, Error};

pub const FORMAT: &str = "wcapos-model";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub format: String,
    pub version: u32,
    /// `3wcapos`, or `cart` for the baseline.
    pub model: String,
    pub params: ParamsDoc,
    pub attributes: Vec<String>,
    pub n_objects: usize,
    /// Hex fingerprint of the binary context the model was built from.
    pub fingerprint: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binarization: Option<BinarizationDoc>,
    pub nodes: Vec<NodeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluation: Option<EvaluationDoc>,
    /// Provenance added on request; not covered by the fingerprint.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stamp: Option<StampDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsDoc {
    pub alpha: f64,
    pub beta: f64,
    pub min_split: usize,
    pub max_depth: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinarizationDoc {
    pub rules: Vec<RuleDoc>,
    pub dropped: Vec<DroppedDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDoc {
    pub source: String,
    pub attribute: String,
    /// `identity`, `one-hot` or `threshold`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DroppedDoc {
    pub source: String,
    /// `no-midpoint`, `no-defined-threshold` or `empty-column`.
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionDoc {
    pub attribute: String,
    pub present: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitDoc {
    pub attribute: String,
    pub cf: f64,
    pub log_abs: f64,
    pub nc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChildrenDoc {
    pub absent: usize,
    pub present: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: usize,
    pub level: usize,
    pub parent: Option<usize>,
    pub size: usize,
    pub positives: usize,
    /// Object indices (0-based) in the node's scope.
    pub objects: Vec<usize>,
    pub conditions: Vec<ConditionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub impurity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<SplitDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub children: Option<ChildrenDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf_reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationDoc {
    /// `loocv` or `resubstitution`.
    pub protocol: String,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    pub acc: f64,
    pub rec: f64,
    pub fpr: f64,
    pub pre: f64,
    pub f1: f64,
    /// Metrics whose denominator was zero (reported as 0).
    pub undefined: Vec<String>,
    pub single_class_folds: usize,
    pub skipped: Vec<SkippedDoc>,
    pub folds: Vec<FoldDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkippedDoc {
    pub object: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoldDoc {
    pub object: usize,
    pub label: String,
    pub truth: bool,
    pub predicted: bool,
    pub leaf: usize,
    pub confidence: f64,
    /// Path to the leaf, by attribute index in the fold's own context.
    pub trace: Vec<(usize, bool)>,
    pub context_fingerprint: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StampDoc {
    pub tool: String,
    pub version: String,
    pub created_unix: u64,
}

impl StampDoc {
    pub fn now() -> StampDoc {
        StampDoc {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            created_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error("invalid model document: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unsupported document: {0}")]
    Unsupported(String),
    #[error("inconsistent model document: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] Error),
}

fn params_doc(p: &BuildParams) -> ParamsDoc {
    ParamsDoc {
        alpha: p.alpha,
        beta: p.beta,
        min_split: p.min_split,
        max_depth: p.max_depth,
    }
}

fn condition_docs(attributes: &[String], conditions: &[Condition]) -> Vec<ConditionDoc> {
    conditions
        .iter()
        .map(|c| ConditionDoc {
            attribute: attributes[c.attribute].clone(),
            present: c.present,
        })
        .collect()
}

fn dropped_code(e: &Error) -> &'static str {
    match e {
        Error::NoMidpoint(_) => "no-midpoint",
        Error::NoDefinedThreshold(_) => "no-defined-threshold",
        _ => "empty-column",
    }
}

pub fn binarization_doc(map: &BinarizationMap) -> BinarizationDoc {
    BinarizationDoc {
        rules: map
            .rules
            .iter()
            .map(|r| {
                let (kind, value, cut) = match &r.kind {
                    RuleKind::Identity => ("identity", None, None),
                    RuleKind::OneHot { value } => ("one-hot", Some(value.clone()), None),
                    RuleKind::Threshold { cut } => ("threshold", None, Some(*cut)),
                };
                RuleDoc {
                    source: r.source.clone(),
                    attribute: r.attribute.clone(),
                    kind: kind.to_string(),
                    value,
                    cut,
                }
            })
            .collect(),
        dropped: map
            .dropped
            .iter()
            .map(|d| DroppedDoc {
                source: d.source.clone(),
                reason: dropped_code(&d.reason).to_string(),
            })
            .collect(),
    }
}

pub fn evaluation_doc(protocol: &str, r: &EvalReport) -> EvaluationDoc {
    let u = &r.undefined;
    let undefined = [("rec", u.rec), ("fpr", u.fpr), ("pre", u.pre), ("f1", u.f1)]
        .iter()
        .filter(|(_, flag)| *flag)
        .map(|(name, _)| name.to_string())
        .collect();
    EvaluationDoc {
        protocol: protocol.to_string(),
        tp: r.confusion.tp,
        fp: r.confusion.fp,
        fn_: r.confusion.fn_,
        tn: r.confusion.tn,
        acc: r.metrics.acc,
        rec: r.metrics.rec,
        fpr: r.metrics.fpr,
        pre: r.metrics.pre,
        f1: r.metrics.f1,
        undefined,
        single_class_folds: r.single_class_folds,
        skipped: r
            .skipped
            .iter()
            .map(|s| SkippedDoc {
                object: s.object,
                reason: s.reason.to_string(),
            })
            .collect(),
        folds: r
            .per_fold
            .iter()
            .map(|f| FoldDoc {
                object: f.object,
                label: f.label.clone(),
                truth: f.truth,
                predicted: f.prediction.label,
                leaf: f.prediction.leaf_id,
                confidence: f.prediction.confidence,
                trace: f
                    .prediction
                    .trace
                    .iter()
                    .map(|c| (c.attribute, c.present))
                    .collect(),
                context_fingerprint: format!("{:016x}", f.context_fingerprint),
            })
            .collect(),
    }
}

pub fn structure_doc(s: &Structure) -> ModelDoc {
    let attrs = s.attributes();
    ModelDoc {
        format: FORMAT.to_string(),
        version: VERSION,
        model: "3wcapos".to_string(),
        params: params_doc(s.params()),
        attributes: attrs.to_vec(),
        n_objects: s.n_objects(),
        fingerprint: format!("{:016x}", s.fingerprint()),
        binarization: s.binarization().map(binarization_doc),
        nodes: s
            .nodes()
            .iter()
            .map(|n| NodeDoc {
                id: n.id,
                level: n.level,
                parent: n.parent,
                size: n.size(),
                positives: n.positives,
                objects: n.scope.objects.to_vec(),
                conditions: condition_docs(attrs, &n.scope.conditions),
                region: Some(n.region.as_str().to_string()),
                impurity: None,
                split: n.split.and_then(|sc| {
                    let c = sc.outcome.ok()?;
                    Some(SplitDoc {
                        attribute: attrs[sc.attribute].clone(),
                        cf: c.cf,
                        log_abs: c.log_abs,
                        nc: c.nc,
                    })
                }),
                children: n.children.map(|c| ChildrenDoc {
                    absent: c.absent,
                    present: c.present,
                }),
                leaf_reason: n.leaf_reason.map(|r| r.as_str().to_string()),
            })
            .collect(),
        evaluation: None,
        stamp: None,
    }
}

pub fn cart_doc(
    t: &CartTree,
    n_objects: usize,
    binarization: Option<&BinarizationMap>,
) -> ModelDoc {
    let attrs = t.attributes();
    ModelDoc {
        format: FORMAT.to_string(),
        version: VERSION,
        model: "cart".to_string(),
        params: params_doc(t.params()),
        attributes: attrs.to_vec(),
        n_objects,
        fingerprint: format!("{:016x}", t.fingerprint()),
        binarization: binarization.map(binarization_doc),
        nodes: t
            .nodes()
            .iter()
            .map(|n| NodeDoc {
                id: n.id,
                level: n.level,
                parent: n.parent,
                size: n.size(),
                positives: n.positives,
                objects: n.scope.objects.to_vec(),
                conditions: condition_docs(attrs, &n.scope.conditions),
                region: None,
                impurity: Some(n.impurity),
                split: None,
                children: n.children.map(|c| ChildrenDoc {
                    absent: c.absent,
                    present: c.present,
                }),
                leaf_reason: n.leaf_reason.map(|r| r.as_str().to_string()),
            })
            .collect(),
        evaluation: None,
        stamp: None,
    }
}

/// Pretty-printed document text, newline terminated.
pub fn render(doc: &ModelDoc) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("model documents always serialize");
    s.push('\n');
    s
}

pub fn export_json(s: &Structure, report: Option<&EvalReport>) -> String {
    let mut doc = structure_doc(s);
    doc.evaluation = report.map(|r| evaluation_doc("loocv", r));
    render(&doc)
}

/// A model read back from a document.
#[derive(Debug, Clone)]
pub struct Imported {
    pub model: Model,
    pub binarization: Option<BinarizationMap>,
    pub doc: ModelDoc,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, JsonError> {
    Err(JsonError::Invalid(msg.into()))
}

fn map_from_doc(doc: &BinarizationDoc) -> Result<BinarizationMap, JsonError> {
    let mut map = BinarizationMap::default();
    for r in &doc.rules {
        let rule = match (r.kind.as_str(), &r.value, r.cut) {
            ("identity", None, None) => Rule::identity(&r.source),
            ("one-hot", Some(v), None) => Rule::one_hot(&r.source, v),
            ("threshold", None, Some(cut)) => Rule::threshold(&r.source, cut),
            _ => return invalid(format!("bad rule for attribute '{}'", r.attribute)),
        };
        if rule.attribute != r.attribute {
            return invalid(format!(
                "rule name '{}' does not match its definition",
                r.attribute
            ));
        }
        map.rules.push(rule);
    }
    for d in &doc.dropped {
        let reason = match d.reason.as_str() {
            "no-midpoint" => Error::NoMidpoint(d.source.clone()),
            "no-defined-threshold" => Error::NoDefinedThreshold(d.source.clone()),
            "empty-column" => Error::EmptyColumn(d.source.clone()),
            other => return invalid(format!("unknown drop reason '{other}'")),
        };
        map.dropped.push(DroppedColumn {
            source: d.source.clone(),
            reason,
        });
    }
    Ok(map)
}

pub fn import_json(text: &str) -> Result<Imported, JsonError> {
    let doc: ModelDoc = serde_json::from_str(text)?;
    if doc.format != FORMAT || doc.version != VERSION {
        return Err(JsonError::Unsupported(format!(
            "{} version {}",
            doc.format, doc.version
        )));
    }
    let params = BuildParams {
        alpha: doc.params.alpha,
        beta: doc.params.beta,
        min_split: doc.params.min_split,
        max_depth: doc.params.max_depth,
    };
    let fingerprint = u64::from_str_radix(&doc.fingerprint, 16)
        .or_else(|_| invalid(format!("bad fingerprint '{}'", doc.fingerprint)))?;
    let index = |name: &str| {
        doc.attributes
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| JsonError::Invalid(format!("unknown attribute '{name}'")))
    };
    let binarization = doc.binarization.as_ref().map(map_from_doc).transpose()?;

    let mut scopes = Vec::with_capacity(doc.nodes.len());
    for n in &doc.nodes {
        if n.objects.iter().any(|&g| g >= doc.n_objects) || n.objects.len() != n.size {
            return invalid(format!("node {} has an invalid scope", n.id));
        }
        let conditions = n
            .conditions
            .iter()
            .map(|c| {
                Ok(Condition {
                    attribute: index(&c.attribute)?,
                    present: c.present,
                })
            })
            .collect::<Result<Vec<_>, JsonError>>()?;
        scopes.push(NodeScope {
            objects: BitSet::from_indices(doc.n_objects, n.objects.iter().copied()),
            conditions,
        });
    }
    let reason = |n: &NodeDoc| {
        n.leaf_reason
            .as_deref()
            .map(|r| {
                LeafReason::parse(r)
                    .ok_or_else(|| JsonError::Invalid(format!("unknown leaf reason '{r}'")))
            })
            .transpose()
    };
    let children = |n: &NodeDoc| {
        n.children.as_ref().map(|c| Children {
            absent: c.absent,
            present: c.present,
        })
    };

    let model = match doc.model.as_str() {
        "3wcapos" => {
            let mut nodes = Vec::with_capacity(doc.nodes.len());
            for (n, scope) in doc.nodes.iter().zip(scopes) {
                let region =
                    n.region.as_deref().and_then(Region::parse).ok_or_else(|| {
                        JsonError::Invalid(format!("node {} lacks a region", n.id))
                    })?;
                let split = n
                    .split
                    .as_ref()
                    .map(|s| {
                        Ok::<_, JsonError>(CausalScore {
                            attribute: index(&s.attribute)?,
                            outcome: Ok(Causality {
                                cf: s.cf,
                                log_abs: s.log_abs,
                                nc: s.nc,
                            }),
                        })
                    })
                    .transpose()?;
                nodes.push(StructureNode {
                    id: n.id,
                    level: n.level,
                    parent: n.parent,
                    scope,
                    positives: n.positives,
                    region,
                    split,
                    children: children(n),
                    leaf_reason: reason(n)?,
                });
            }
            Model::Causal(Structure::from_parts(
                nodes,
                params,
                doc.attributes.clone(),
                doc.n_objects,
                fingerprint,
                binarization.clone(),
            )?)
        }
        "cart" => {
            let mut nodes = Vec::with_capacity(doc.nodes.len());
            for (n, scope) in doc.nodes.iter().zip(scopes) {
                let split_attribute = match &n.children {
                    Some(_) => {
                        // the split is the last condition of either child
                        let c = n.children.as_ref().unwrap();
                        let child = doc.nodes.get(c.present).ok_or_else(|| {
                            JsonError::Invalid(format!("node {} child missing", n.id))
                        })?;
                        let last = child.conditions.last().ok_or_else(|| {
                            JsonError::Invalid(format!("node {} child unconditioned", n.id))
                        })?;
                        Some(index(&last.attribute)?)
                    }
                    None => None,
                };
                nodes.push(CartNode {
                    id: n.id,
                    level: n.level,
                    parent: n.parent,
                    scope,
                    positives: n.positives,
                    split_attribute,
                    children: children(n),
                    impurity: n.impurity.ok_or_else(|| {
                        JsonError::Invalid(format!("node {} lacks impurity", n.id))
                    })?,
                    leaf_reason: reason(n)?,
                });
            }
            Model::Cart(CartTree::from_parts(
                nodes,
                params,
                doc.attributes.clone(),
                fingerprint,
            )?)
        }
        other => return Err(JsonError::Unsupported(format!("model kind '{other}'"))),
    };
    Ok(Imported {
        model,
        binarization,
        doc,
    })
}

/// Document text for an imported model, keeping any evaluation and stamp.
pub fn reexport(imported: &Imported) -> String {
    let mut doc = match &imported.model {
        Model::Causal(s) => structure_doc(s),
        Model::Cart(t) => cart_doc(t, imported.doc.n_objects, imported.binarization.as_ref()),
    };
    doc.evaluation = imported.doc.evaluation.clone();
    doc.stamp = imported.doc.stamp.clone();
    render(&doc)
}
