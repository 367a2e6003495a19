//! Formal decision contexts and the conversion of raw tabular data into them.
//!
//! A [`FormalDecisionContext`] is a set of objects, a list of binary condition
//! attributes with their incidence, and one binary decision per object. Raw
//! datasets with discrete or continuous columns are turned into such a context
//! by [`build_context`], which records how every binary attribute was derived in
//! a [`BinarizationMap`] so that unseen rows can be encoded the same way.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::bitset::BitSet;
use crate::causal::{self, CellCounts, Undefined};
use crate::error::{Error, Result};

/// Binary condition attributes over a fixed object set, plus one binary decision.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalDecisionContext {
    object_labels: Vec<String>,
    attributes: Vec<String>,
    extents: Vec<BitSet>,
    decision: BitSet,
}

impl FormalDecisionContext {
    /// Builds a context from a row-major incidence matrix.
    pub fn new(
        object_labels: Vec<String>,
        attributes: Vec<String>,
        incidence: &[Vec<bool>],
        decision: &[bool],
    ) -> Result<Self> {
        let n = object_labels.len();
        let m = attributes.len();
        let bad_row = incidence.iter().find(|r| r.len() != m);
        if incidence.len() != n || decision.len() != n || bad_row.is_some() {
            return Err(Error::ShapeMismatch {
                rows: incidence.len(),
                cols: bad_row.map_or(m, |r| r.len()),
                expected_rows: n,
                expected_cols: m,
            });
        }
        let extents = (0..m)
            .map(|j| BitSet::from_indices(n, (0..n).filter(|&g| incidence[g][j])))
            .collect();
        Self::from_extents(
            object_labels,
            attributes,
            extents,
            BitSet::from_bools(decision),
        )
    }

    /// Builds a context from one extent per attribute.
    pub fn from_extents(
        object_labels: Vec<String>,
        attributes: Vec<String>,
        extents: Vec<BitSet>,
        decision: BitSet,
    ) -> Result<Self> {
        let n = object_labels.len();
        if extents.len() != attributes.len()
            || decision.universe() != n
            || extents.iter().any(|e| e.universe() != n)
        {
            return Err(Error::ShapeMismatch {
                rows: decision.universe(),
                cols: extents.len(),
                expected_rows: n,
                expected_cols: attributes.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for a in &attributes {
            if !seen.insert(a.as_str()) {
                return Err(Error::DuplicateAttribute(a.clone()));
            }
        }
        Ok(FormalDecisionContext {
            object_labels,
            attributes,
            extents,
            decision,
        })
    }

    pub fn n_objects(&self) -> usize {
        self.object_labels.len()
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn attribute_name(&self, m: usize) -> &str {
        &self.attributes[m]
    }

    pub fn object_labels(&self) -> &[String] {
        &self.object_labels
    }

    pub fn attribute_index(&self, name: &str) -> Result<usize> {
        self.attributes
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    fn check_attribute(&self, m: usize) -> Result<()> {
        if m < self.attributes.len() {
            Ok(())
        } else {
            Err(Error::AttributeOutOfRange(m))
        }
    }

    /// Objects holding attribute `m` (the attribute's extent).
    pub fn attribute_extent(&self, m: usize) -> &BitSet {
        &self.extents[m]
    }

    /// Objects whose decision is positive.
    pub fn decision(&self) -> &BitSet {
        &self.decision
    }

    pub fn has(&self, g: usize, m: usize) -> bool {
        self.extents[m].contains(g)
    }

    pub fn all_objects(&self) -> BitSet {
        BitSet::full(self.n_objects())
    }

    pub fn all_attributes(&self) -> BitSet {
        BitSet::full(self.n_attributes())
    }

    /// Attribute values of object `g` in declaration order.
    pub fn row(&self, g: usize) -> Vec<bool> {
        self.extents.iter().map(|e| e.contains(g)).collect()
    }

    /// Objects having every attribute in `attrs`; the empty set maps to all objects.
    pub fn extent(&self, attrs: &[usize]) -> Result<BitSet> {
        let mut out = self.all_objects();
        for &m in attrs {
            self.check_attribute(m)?;
            out.intersect_with(&self.extents[m]);
        }
        Ok(out)
    }

    pub fn extent_by_name(&self, names: &[&str]) -> Result<BitSet> {
        let idx = names
            .iter()
            .map(|n| self.attribute_index(n))
            .collect::<Result<Vec<_>>>()?;
        self.extent(&idx)
    }

    /// Attributes shared by every object in `objs`; the empty set maps to all attributes.
    pub fn intent(&self, objs: &[usize]) -> Result<BitSet> {
        if let Some(&g) = objs.iter().find(|&&g| g >= self.n_objects()) {
            return Err(Error::ObjectOutOfRange(g));
        }
        Ok(BitSet::from_indices(
            self.n_attributes(),
            (0..self.n_attributes()).filter(|&m| objs.iter().all(|&g| self.extents[m].contains(g))),
        ))
    }

    /// Order-sensitive FNV-1a digest of names, incidence and decision.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv::new();
        h.write_usize(self.n_objects());
        for (name, extent) in self.attributes.iter().zip(&self.extents) {
            h.write(name.as_bytes());
            h.write(&[0xff]);
            for g in extent {
                h.write_usize(g);
            }
            h.write(&[0xfe]);
        }
        for g in &self.decision {
            h.write_usize(g);
        }
        h.finish()
    }
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }
    fn write_usize(&mut self, v: usize) {
        self.write(&(v as u64).to_le_bytes());
    }
    fn finish(&self) -> u64 {
        self.0
    }
}

/// A single raw value, as read from a dataset or supplied for prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell<'a> {
    Flag(bool),
    Text(&'a str),
    Number(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum RawColumn {
    /// Already a 0/1 indicator; mapped through unchanged.
    Binary(Vec<bool>),
    Discrete(Vec<String>),
    Continuous(Vec<f64>),
}

impl RawColumn {
    pub fn len(&self) -> usize {
        match self {
            RawColumn::Binary(v) => v.len(),
            RawColumn::Discrete(v) => v.len(),
            RawColumn::Continuous(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell(&self, row: usize) -> Cell<'_> {
        match self {
            RawColumn::Binary(v) => Cell::Flag(v[row]),
            RawColumn::Discrete(v) => Cell::Text(&v[row]),
            RawColumn::Continuous(v) => Cell::Number(v[row]),
        }
    }

    fn select(&self, rows: &[usize]) -> RawColumn {
        match self {
            RawColumn::Binary(v) => RawColumn::Binary(rows.iter().map(|&r| v[r]).collect()),
            RawColumn::Discrete(v) => {
                RawColumn::Discrete(rows.iter().map(|&r| v[r].clone()).collect())
            }
            RawColumn::Continuous(v) => RawColumn::Continuous(rows.iter().map(|&r| v[r]).collect()),
        }
    }
}

/// Typed condition columns plus a binary decision column.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    column_names: Vec<String>,
    columns: Vec<RawColumn>,
    decision_name: String,
    decision: Vec<bool>,
    row_labels: Vec<String>,
}

impl RawDataset {
    /// Checks that every column has one entry per row. Class balance is not
    /// checked here: training subsets may legitimately hold a single class.
    pub fn new(
        column_names: Vec<String>,
        columns: Vec<RawColumn>,
        decision_name: String,
        decision: Vec<bool>,
        row_labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let n = decision.len();
        if column_names.len() != columns.len() {
            return Err(Error::ShapeMismatch {
                rows: n,
                cols: columns.len(),
                expected_rows: n,
                expected_cols: column_names.len(),
            });
        }
        for (name, col) in column_names.iter().zip(&columns) {
            if col.len() != n {
                return Err(Error::ColumnLength {
                    column: name.clone(),
                    found: col.len(),
                    expected: n,
                });
            }
        }
        let row_labels = match row_labels {
            Some(l) if l.len() != n => {
                return Err(Error::ColumnLength {
                    column: "<row labels>".to_string(),
                    found: l.len(),
                    expected: n,
                })
            }
            Some(l) => l,
            None => (1..=n).map(|i| format!("{i}")).collect(),
        };
        Ok(RawDataset {
            column_names,
            columns,
            decision_name,
            decision,
            row_labels,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.decision.len()
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn columns(&self) -> &[RawColumn] {
        &self.columns
    }

    pub fn decision_name(&self) -> &str {
        &self.decision_name
    }

    pub fn decision(&self) -> &[bool] {
        &self.decision
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn has_both_classes(&self) -> bool {
        self.decision.iter().any(|&d| d) && self.decision.iter().any(|&d| !d)
    }

    /// The dataset restricted to `rows`, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> RawDataset {
        RawDataset {
            column_names: self.column_names.clone(),
            columns: self.columns.iter().map(|c| c.select(rows)).collect(),
            decision_name: self.decision_name.clone(),
            decision: rows.iter().map(|&r| self.decision[r]).collect(),
            row_labels: rows.iter().map(|&r| self.row_labels[r].clone()).collect(),
        }
    }

    pub fn without_row(&self, row: usize) -> RawDataset {
        let keep: Vec<usize> = (0..self.n_rows()).filter(|&r| r != row).collect();
        self.select_rows(&keep)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RuleKind {
    Identity,
    OneHot {
        value: String,
    },
    /// Holds when the value is `>= cut`.
    Threshold {
        cut: f64,
    },
}

/// How one binary attribute is derived from one source column.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub source: String,
    pub attribute: String,
    pub kind: RuleKind,
}

impl Rule {
    pub fn identity(source: &str) -> Rule {
        Rule {
            source: source.to_string(),
            attribute: source.to_string(),
            kind: RuleKind::Identity,
        }
    }

    pub fn one_hot(source: &str, value: &str) -> Rule {
        Rule {
            source: source.to_string(),
            attribute: format!("{source}_{value}"),
            kind: RuleKind::OneHot {
                value: value.to_string(),
            },
        }
    }

    pub fn threshold(source: &str, cut: f64) -> Rule {
        Rule {
            source: source.to_string(),
            attribute: format!("{source}\u{2265}{cut}"),
            kind: RuleKind::Threshold { cut },
        }
    }

    /// Evaluates the rule on one raw value. Text cells are parsed as needed.
    pub fn holds(&self, cell: Cell<'_>) -> Result<bool> {
        let bad = |v: &str| Error::BadCell {
            column: self.source.clone(),
            value: v.to_string(),
        };
        match (&self.kind, cell) {
            (RuleKind::Identity, Cell::Flag(b)) => Ok(b),
            (RuleKind::Identity, Cell::Number(x)) if x == 0.0 || x == 1.0 => Ok(x == 1.0),
            (RuleKind::Identity, Cell::Text(t)) => parse_flag(t).ok_or_else(|| bad(t)),
            (RuleKind::OneHot { value }, Cell::Text(t)) => Ok(t.trim() == value),
            (RuleKind::OneHot { value }, Cell::Number(x)) => Ok(format!("{x}") == *value),
            (RuleKind::OneHot { value }, Cell::Flag(b)) => Ok(value == if b { "1" } else { "0" }),
            (RuleKind::Threshold { cut }, Cell::Number(x)) => Ok(x >= *cut),
            (RuleKind::Threshold { cut }, Cell::Text(t)) => t
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|x| !x.is_nan())
                .map(|x| x >= *cut)
                .ok_or_else(|| bad(t)),
            (RuleKind::Threshold { cut }, Cell::Flag(b)) => Ok(if b { 1.0 } else { 0.0 } >= *cut),
            (RuleKind::Identity, Cell::Number(x)) => Err(bad(&format!("{x}"))),
        }
    }
}

/// Parses a 0/1 indicator cell.
pub fn parse_flag(text: &str) -> Option<bool> {
    match text.trim() {
        "1" => Some(true),
        "0" => Some(false),
        _ => None,
    }
}

/// A source column that produced no binary attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct DroppedColumn {
    pub source: String,
    pub reason: Error,
}

/// Every rule used to build a context, in attribute order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BinarizationMap {
    pub rules: Vec<Rule>,
    pub dropped: Vec<DroppedColumn>,
}

impl BinarizationMap {
    pub fn attribute_names(&self) -> Vec<String> {
        self.rules.iter().map(|r| r.attribute.clone()).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.rules.iter().all(|r| r.kind == RuleKind::Identity)
    }

    /// Encodes one row given a lookup from source column name to raw value.
    pub fn encode<'a, F>(&self, mut lookup: F) -> Result<Vec<bool>>
    where
        F: FnMut(&str) -> Option<Cell<'a>>,
    {
        self.rules
            .iter()
            .map(|rule| {
                let cell =
                    lookup(&rule.source).ok_or_else(|| Error::MissingCell(rule.source.clone()))?;
                rule.holds(cell)
            })
            .collect()
    }

    /// Encodes row `row` of a raw dataset that carries the source columns.
    pub fn encode_row(&self, raw: &RawDataset, row: usize) -> Result<Vec<bool>> {
        self.encode(|name| {
            raw.column_names
                .iter()
                .position(|c| c == name)
                .map(|j| raw.columns[j].cell(row))
        })
    }
}

/// A binary attribute derived from a raw column.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryAttribute {
    pub rule: Rule,
    pub column: BitSet,
}

/// What to do with a discrete column that has exactly two distinct values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TwoValuedPolicy {
    /// One attribute per value, like any other discrete column.
    #[default]
    Both,
    /// A single indicator for one of the two values.
    Single,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BinarizeOptions {
    pub two_valued: TwoValuedPolicy,
}

const AFFIRMATIVE: [&str; 8] = ["1", "yes", "y", "true", "t", "positive", "pos", "present"];

/// One attribute per distinct value (sorted), holding where the row equals it.
pub fn binarize_discrete(name: &str, values: &[String]) -> Result<Vec<BinaryAttribute>> {
    binarize_discrete_with(name, values, TwoValuedPolicy::Both)
}

pub fn binarize_discrete_with(
    name: &str,
    values: &[String],
    policy: TwoValuedPolicy,
) -> Result<Vec<BinaryAttribute>> {
    let distinct: BTreeSet<&str> = values.iter().map(String::as_str).collect();
    if distinct.is_empty() {
        return Err(Error::EmptyColumn(name.to_string()));
    }
    let chosen: Vec<&str> = if policy == TwoValuedPolicy::Single && distinct.len() == 2 {
        let affirmative = distinct
            .iter()
            .find(|v| AFFIRMATIVE.contains(&v.to_ascii_lowercase().as_str()));
        // otherwise the larger of the two in sort order
        alloc::vec![*affirmative.unwrap_or_else(|| distinct.iter().next_back().unwrap())]
    } else {
        distinct.into_iter().collect()
    };
    Ok(chosen
        .into_iter()
        .map(|v| BinaryAttribute {
            rule: Rule::one_hot(name, v),
            column: BitSet::from_indices(
                values.len(),
                values
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| *x == v)
                    .map(|(i, _)| i),
            ),
        })
        .collect())
}

/// Outcome of the threshold search on one continuous column.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdChoice {
    pub attribute: BinaryAttribute,
    pub cut: f64,
    pub score: causal::Causality,
    /// Every midpoint tried, with its score or the reason it was skipped.
    pub candidates: Vec<(f64, core::result::Result<causal::Causality, Undefined>)>,
}

fn threshold_column(values: &[f64], cut: f64) -> BitSet {
    BitSet::from_indices(
        values.len(),
        values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= cut)
            .map(|(i, _)| i),
    )
}

/// Single-cut discretization: tries every midpoint between consecutive
/// distinct values and keeps the cut whose indicator `value >= cut` has the
/// strongest normalized causality against `decision`.
///
/// Ties on causal strength prefer the higher `p(c | value >= cut)`, then the
/// smaller cut.
pub fn binarize_continuous(
    name: &str,
    values: &[f64],
    decision: &BitSet,
) -> Result<ThresholdChoice> {
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    if sorted.len() < 2 {
        return Err(Error::NoMidpoint(name.to_string()));
    }
    let mut candidates = Vec::with_capacity(sorted.len() - 1);
    let mut best: Option<(f64, causal::Causality, f64)> = None;
    for pair in sorted.windows(2) {
        let cut = (pair[0] + pair[1]) / 2.0;
        let column = threshold_column(values, cut);
        let counts = CellCounts::tally(&column, decision, &BitSet::full(values.len()));
        let outcome = causal::score_counts(&counts);
        if let Ok(score) = outcome {
            let conditional = counts.conditional().unwrap_or(0.0);
            let better = match &best {
                None => true,
                Some((_, b, b_cond)) => match score.log_abs.total_cmp(&b.log_abs) {
                    Ordering::Greater => true,
                    Ordering::Equal => conditional > *b_cond,
                    Ordering::Less => false,
                },
            };
            if better {
                best = Some((cut, score, conditional));
            }
        }
        candidates.push((cut, outcome));
    }
    let (cut, score, _) = best.ok_or_else(|| Error::NoDefinedThreshold(name.to_string()))?;
    Ok(ThresholdChoice {
        attribute: BinaryAttribute {
            rule: Rule::threshold(name, cut),
            column: threshold_column(values, cut),
        },
        cut,
        score,
        candidates,
    })
}

/// Converts every raw column into binary attributes: identity for indicator
/// columns, one-hot for discrete columns and a single searched cut for
/// continuous columns. Columns that cannot be binarized are recorded in
/// [`BinarizationMap::dropped`].
pub fn build_context(
    raw: &RawDataset,
    options: &BinarizeOptions,
) -> Result<(FormalDecisionContext, BinarizationMap)> {
    let n = raw.n_rows();
    let decision = BitSet::from_bools(raw.decision());
    let mut map = BinarizationMap::default();
    let mut extents = Vec::new();
    for (name, column) in raw.column_names().iter().zip(raw.columns()) {
        let produced = match column {
            RawColumn::Binary(v) => Ok(alloc::vec![BinaryAttribute {
                rule: Rule::identity(name),
                column: BitSet::from_bools(v),
            }]),
            RawColumn::Discrete(v) => binarize_discrete_with(name, v, options.two_valued),
            RawColumn::Continuous(v) => {
                binarize_continuous(name, v, &decision).map(|c| alloc::vec![c.attribute])
            }
        };
        match produced {
            Ok(attrs) => {
                for a in attrs {
                    map.rules.push(a.rule);
                    extents.push(a.column);
                }
            }
            Err(
                reason @ (Error::NoMidpoint(_)
                | Error::NoDefinedThreshold(_)
                | Error::EmptyColumn(_)),
            ) => map.dropped.push(DroppedColumn {
                source: name.clone(),
                reason,
            }),
            Err(e) => return Err(e),
        }
    }
    debug_assert!(extents.iter().all(|e| e.universe() == n));
    let ctx = FormalDecisionContext::from_extents(
        raw.row_labels().to_vec(),
        map.attribute_names(),
        extents,
        decision,
    )?;
    Ok((ctx, map))
}
