use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("attribute index {0} out of range")]
    AttributeOutOfRange(usize),
    #[error("object index {0} out of range")]
    ObjectOutOfRange(usize),
    #[error("duplicate attribute name `{0}`")]
    DuplicateAttribute(String),
    #[error("incidence is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("column `{column}` has {found} entries, expected {expected}")]
    ColumnLength {
        column: String,
        found: usize,
        expected: usize,
    },
    #[error("decision has {0} distinct value(s); exactly two are required")]
    DecisionNotBinary(usize),
    #[error("column `{0}` has no midpoint: all values are identical")]
    NoMidpoint(String),
    #[error("column `{0}`: every threshold candidate has an undefined causal factor")]
    NoDefinedThreshold(String),
    #[error("column `{0}` is empty")]
    EmptyColumn(String),
    #[error("split on `{0}` leaves one side empty")]
    EmptySplitSide(String),
    #[error("attribute `{0}` is already conditioned in this scope")]
    AlreadyConditioned(String),
    #[error("invalid thresholds: need 0 <= beta < alpha <= 1 (alpha={alpha}, beta={beta})")]
    InvalidThresholds { alpha: f64, beta: f64 },
    #[error("sample has {found} attribute values, structure expects {expected}")]
    SampleWidth { found: usize, expected: usize },
    #[error("cannot read `{value}` as input for column `{column}`")]
    BadCell { column: String, value: String },
    #[error("missing value for column `{0}`")]
    MissingCell(String),
    #[error("predictions ({predictions}) and truth ({truth}) differ in length")]
    LengthMismatch { predictions: usize, truth: usize },
    #[error("nothing to evaluate")]
    EmptyEvaluation,
    #[error("context has no objects")]
    EmptyContext,
    #[error("malformed structure: {0}")]
    MalformedStructure(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
