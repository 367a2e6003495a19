//! Delimiter-separated dataset loading.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use wcapos_core::context::{parse_flag, RawColumn, RawDataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Binary,
    Discrete,
    Continuous,
}

/// How to read a table: which column is the decision, which value is the
/// positive class, and any declared column kinds. Undeclared columns are
/// typed from their contents.
#[derive(Debug, Clone)]
pub struct Schema {
    pub decision: String,
    pub positive_label: Option<String>,
    pub kinds: BTreeMap<String, ColumnKind>,
    /// Column holding object labels; excluded from the condition columns.
    pub id_column: Option<String>,
    /// Columns to leave out entirely.
    pub ignore: Vec<String>,
    pub delimiter: u8,
    /// Cell values treated as missing, after trimming.
    pub missing: Vec<String>,
}

impl Schema {
    pub fn new(decision: &str) -> Schema {
        Schema {
            decision: decision.to_string(),
            positive_label: None,
            kinds: BTreeMap::new(),
            id_column: None,
            ignore: Vec::new(),
            delimiter: b',',
            missing: vec!["?".to_string(), String::new()],
        }
    }

    pub fn positive(mut self, label: &str) -> Schema {
        self.positive_label = Some(label.to_string());
        self
    }

    pub fn kind(mut self, column: &str, kind: ColumnKind) -> Schema {
        self.kinds.insert(column.to_string(), kind);
        self
    }

    pub fn id(mut self, column: &str) -> Schema {
        self.id_column = Some(column.to_string());
        self
    }

    pub fn delimiter(mut self, d: u8) -> Schema {
        self.delimiter = d;
        self
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed table: {0}")]
    Csv(#[from] csv::Error),
    #[error("the table has no header row")]
    NoHeader,
    #[error("unknown column '{0}'")]
    UnknownColumn(String),
    #[error("duplicate column '{0}'")]
    DuplicateColumn(String),
    #[error("line {line}: expected {expected} fields, found {found}")]
    Arity {
        line: u64,
        found: usize,
        expected: usize,
    },
    #[error("line {line}: column '{column}' is declared continuous but holds '{value}'")]
    NotNumeric {
        line: u64,
        column: String,
        value: String,
    },
    #[error("line {line}: column '{column}' is declared binary but holds '{value}'")]
    NotBinary {
        line: u64,
        column: String,
        value: String,
    },
    #[error("positive label '{label}' does not occur in decision column '{column}'")]
    UnknownPositive { column: String, label: String },
    #[error("decision column '{column}' must have exactly two distinct values, found {found:?}")]
    DecisionValues { column: String, found: Vec<String> },
    #[error("no complete rows remain ({dropped} dropped for missing values)")]
    NoRows { dropped: usize },
    #[error(transparent)]
    Core(#[from] wcapos_core::Error),
}

impl DatasetError {
    /// Data that parses but cannot support learning, as opposed to bad input.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            DatasetError::DecisionValues { .. } | DatasetError::NoRows { .. }
        )
    }
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub raw: RawDataset,
    pub kinds: Vec<ColumnKind>,
    pub positive_label: String,
    pub negative_label: String,
    /// Rows dropped because a used cell was missing.
    pub dropped_rows: usize,
}

fn is_number(s: &str) -> bool {
    s.parse::<f64>().is_ok_and(|x| x.is_finite())
}

fn infer_kind(values: &[&str]) -> ColumnKind {
    if values.iter().all(|v| *v == "0" || *v == "1") {
        ColumnKind::Binary
    } else if values.iter().all(|v| is_number(v)) {
        ColumnKind::Continuous
    } else {
        ColumnKind::Discrete
    }
}

/// Picks the positive decision value when none is declared: the value that
/// reads as an affirmative flag, otherwise the larger of the two in sort order.
fn default_positive(values: &BTreeSet<String>) -> String {
    const YES: [&str; 6] = ["1", "t", "true", "yes", "y", "positive"];
    values
        .iter()
        .find(|v| YES.contains(&v.to_ascii_lowercase().as_str()))
        .unwrap_or_else(|| values.iter().next_back().unwrap())
        .clone()
}

pub fn parse_dataset<R: Read>(reader: R, schema: &Schema) -> Result<Loaded, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(DatasetError::NoHeader);
    }
    let mut seen = BTreeSet::new();
    for h in &header {
        if !seen.insert(h.as_str()) {
            return Err(DatasetError::DuplicateColumn(h.clone()));
        }
    }
    let position = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DatasetError::UnknownColumn(name.to_string()))
    };
    let decision_col = position(&schema.decision)?;
    let id_col = schema.id_column.as_deref().map(position).transpose()?;
    for name in schema.kinds.keys().chain(&schema.ignore) {
        position(name)?;
    }
    let used: Vec<usize> = (0..header.len())
        .filter(|&j| j != decision_col && Some(j) != id_col && !schema.ignore.contains(&header[j]))
        .collect();

    let mut rows: Vec<(u64, csv::StringRecord)> = Vec::new();
    let mut dropped_rows = 0;
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != header.len() {
            return Err(DatasetError::Arity {
                line,
                found: record.len(),
                expected: header.len(),
            });
        }
        let incomplete = used
            .iter()
            .chain(std::iter::once(&decision_col))
            .any(|&j| schema.missing.iter().any(|m| m == &record[j]));
        if incomplete {
            dropped_rows += 1;
            continue;
        }
        rows.push((line, record));
    }
    if rows.is_empty() {
        return Err(DatasetError::NoRows {
            dropped: dropped_rows,
        });
    }

    let distinct: BTreeSet<String> = rows
        .iter()
        .map(|(_, r)| r[decision_col].to_string())
        .collect();
    if distinct.len() != 2 {
        return Err(DatasetError::DecisionValues {
            column: schema.decision.clone(),
            found: distinct.into_iter().collect(),
        });
    }
    let positive = match &schema.positive_label {
        Some(p) if distinct.contains(p) => p.clone(),
        Some(p) => {
            return Err(DatasetError::UnknownPositive {
                column: schema.decision.clone(),
                label: p.clone(),
            })
        }
        None => default_positive(&distinct),
    };
    let negative = distinct.iter().find(|v| **v != positive).unwrap().clone();

    let mut names = Vec::with_capacity(used.len());
    let mut columns = Vec::with_capacity(used.len());
    let mut kinds = Vec::with_capacity(used.len());
    for &j in &used {
        let name = &header[j];
        let cells: Vec<&str> = rows.iter().map(|(_, r)| &r[j]).collect();
        let kind = schema
            .kinds
            .get(name)
            .copied()
            .unwrap_or_else(|| infer_kind(&cells));
        let column = match kind {
            ColumnKind::Binary => RawColumn::Binary(
                cells
                    .iter()
                    .zip(&rows)
                    .map(|(c, (line, _))| {
                        parse_flag(c).ok_or_else(|| DatasetError::NotBinary {
                            line: *line,
                            column: name.clone(),
                            value: c.to_string(),
                        })
                    })
                    .collect::<Result<_, _>>()?,
            ),
            ColumnKind::Continuous => RawColumn::Continuous(
                cells
                    .iter()
                    .zip(&rows)
                    .map(|(c, (line, _))| {
                        c.parse::<f64>()
                            .ok()
                            .filter(|x| x.is_finite())
                            .ok_or_else(|| DatasetError::NotNumeric {
                                line: *line,
                                column: name.clone(),
                                value: c.to_string(),
                            })
                    })
                    .collect::<Result<_, _>>()?,
            ),
            ColumnKind::Discrete => {
                RawColumn::Discrete(cells.iter().map(|c| c.to_string()).collect())
            }
        };
        names.push(name.clone());
        columns.push(column);
        kinds.push(kind);
    }
    let decision = rows
        .iter()
        .map(|(_, r)| r[decision_col] == positive)
        .collect();
    let labels = id_col.map(|j| rows.iter().map(|(_, r)| r[j].to_string()).collect());
    let raw = RawDataset::new(names, columns, schema.decision.clone(), decision, labels)?;
    Ok(Loaded {
        raw,
        kinds,
        positive_label: positive,
        negative_label: negative,
        dropped_rows,
    })
}

pub fn load_dataset(path: &Path, schema: &Schema) -> Result<Loaded, DatasetError> {
    let file = std::fs::File::open(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_dataset(std::io::BufReader::new(file), schema)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, schema: &Schema) -> Result<Loaded, DatasetError> {
        parse_dataset(text.as_bytes(), schema)
    }

    #[test]
    fn types_columns_from_contents() {
        let text = "a,b,c,y\n1,2.5,red,yes\n0,3,blue,no\n1,4,red,no\n";
        let l = parse(text, &Schema::new("y")).unwrap();
        assert_eq!(
            l.kinds,
            vec![
                ColumnKind::Binary,
                ColumnKind::Continuous,
                ColumnKind::Discrete
            ]
        );
        assert_eq!(l.raw.decision(), &[true, false, false]);
        assert_eq!(l.positive_label, "yes");
        assert_eq!(l.raw.row_labels(), &["1", "2", "3"]);
    }

    #[test]
    fn declared_kind_wins() {
        let text = "a,y\n1,p\n0,n\n";
        let l = parse(text, &Schema::new("y").kind("a", ColumnKind::Discrete)).unwrap();
        assert_eq!(l.kinds, vec![ColumnKind::Discrete]);
        assert_eq!(l.positive_label, "p");
    }

    #[test]
    fn explicit_positive_label() {
        let text = "a,y\n1,T\n0,F\n";
        let l = parse(text, &Schema::new("y").positive("F")).unwrap();
        assert_eq!(l.raw.decision(), &[false, true]);
        assert!(matches!(
            parse(text, &Schema::new("y").positive("X")),
            Err(DatasetError::UnknownPositive { .. })
        ));
    }

    #[test]
    fn single_row_is_degenerate() {
        let err = parse("a,y\n1,1\n", &Schema::new("y")).unwrap_err();
        assert!(matches!(err, DatasetError::DecisionValues { .. }));
        assert!(err.is_degenerate());
    }

    #[test]
    fn three_decision_values_rejected() {
        let err = parse("a,y\n1,x\n0,y\n1,z\n", &Schema::new("y")).unwrap_err();
        assert!(err.is_degenerate());
    }

    #[test]
    fn wrong_arity_reports_line() {
        let err = parse("a,b,y\n1,2,1\n1,0\n", &Schema::new("y")).unwrap_err();
        assert!(matches!(
            err,
            DatasetError::Arity {
                line: 3,
                found: 2,
                expected: 3
            }
        ));
        assert!(!err.is_degenerate());
    }

    #[test]
    fn non_numeric_in_continuous_column() {
        let schema = Schema::new("y").kind("a", ColumnKind::Continuous);
        let err = parse("a,y\n1.5,1\nabc,0\n", &schema).unwrap_err();
        assert!(matches!(err, DatasetError::NotNumeric { line: 3, .. }));
    }

    #[test]
    fn missing_cells_drop_rows() {
        let text = "a,b,y\n1,2,1\n?,3,0\n0,,1\n1,5,0\n";
        let l = parse(text, &Schema::new("y")).unwrap();
        assert_eq!(l.dropped_rows, 2);
        assert_eq!(l.raw.n_rows(), 2);
    }

    #[test]
    fn id_and_ignored_columns() {
        let text = "id,a,skip,y\nx1,1,9,1\nx2,0,8,0\n";
        let mut schema = Schema::new("y").id("id");
        schema.ignore.push("skip".to_string());
        let l = parse(text, &schema).unwrap();
        assert_eq!(l.raw.column_names(), &["a"]);
        assert_eq!(l.raw.row_labels(), &["x1", "x2"]);
    }

    #[test]
    fn unknown_decision_column() {
        assert!(matches!(
            parse("a,y\n1,1\n", &Schema::new("z")),
            Err(DatasetError::UnknownColumn(_))
        ));
    }

    #[test]
    fn tab_delimiter() {
        let l = parse(
            "a\tb\ty\n1\t2\t1\n0\t3\t0\n",
            &Schema::new("y").delimiter(b'\t'),
        )
        .unwrap();
        assert_eq!(l.raw.column_names(), &["a", "b"]);
    }
}
