//! Small built-in datasets: the 17-melon binary decision context and the
//! 20-row balloons data (inflated iff yellow and small).

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::context::{FormalDecisionContext, RawColumn, RawDataset};

pub const WATERMELON_ATTRIBUTES: [&str; 6] = [
    "black",
    "curled",
    "turbid",
    "clear",
    "concave",
    "hard slippery",
];

// black curled turbid clear concave hard-slippery | good
const WATERMELON_ROWS: [[u8; 7]; 17] = [
    [0, 1, 1, 1, 1, 1, 1],
    [1, 1, 0, 1, 1, 1, 1],
    [1, 1, 1, 1, 1, 1, 1],
    [0, 1, 0, 1, 1, 1, 1],
    [0, 1, 1, 1, 1, 1, 1],
    [0, 0, 1, 1, 0, 0, 1],
    [1, 0, 1, 0, 0, 0, 1],
    [1, 0, 1, 1, 0, 1, 1],
    [1, 0, 0, 0, 0, 1, 0],
    [0, 0, 0, 1, 0, 0, 1],
    [0, 0, 0, 0, 0, 1, 0],
    [0, 1, 1, 0, 0, 0, 0],
    [0, 0, 1, 0, 1, 1, 0],
    [0, 0, 0, 0, 1, 1, 0],
    [1, 0, 1, 1, 0, 0, 0],
    [0, 1, 1, 0, 0, 1, 0],
    [0, 1, 0, 0, 0, 1, 0],
];

/// The watermelon context; objects are labelled `1..=17`.
pub fn watermelon() -> FormalDecisionContext {
    let incidence: Vec<Vec<bool>> = WATERMELON_ROWS
        .iter()
        .map(|r| r[..6].iter().map(|&b| b == 1).collect())
        .collect();
    let decision: Vec<bool> = WATERMELON_ROWS.iter().map(|r| r[6] == 1).collect();
    FormalDecisionContext::new(
        (1..=17).map(|i| i.to_string()).collect(),
        WATERMELON_ATTRIBUTES
            .iter()
            .map(|s| s.to_string())
            .collect(),
        &incidence,
        &decision,
    )
    .expect("fixture is well formed")
}

/// color, size, act, age, inflated
pub const BALLOONS_ROWS: [[&str; 5]; 20] = [
    ["YELLOW", "SMALL", "STRETCH", "ADULT", "T"],
    ["YELLOW", "SMALL", "STRETCH", "CHILD", "T"],
    ["YELLOW", "SMALL", "DIP", "ADULT", "T"],
    ["YELLOW", "SMALL", "DIP", "CHILD", "T"],
    ["YELLOW", "LARGE", "STRETCH", "ADULT", "F"],
    ["YELLOW", "LARGE", "STRETCH", "CHILD", "F"],
    ["YELLOW", "LARGE", "DIP", "ADULT", "F"],
    ["YELLOW", "LARGE", "DIP", "CHILD", "F"],
    ["PURPLE", "SMALL", "STRETCH", "ADULT", "F"],
    ["PURPLE", "SMALL", "STRETCH", "CHILD", "F"],
    ["PURPLE", "SMALL", "DIP", "ADULT", "F"],
    ["PURPLE", "SMALL", "DIP", "CHILD", "F"],
    ["PURPLE", "LARGE", "STRETCH", "ADULT", "F"],
    ["PURPLE", "LARGE", "STRETCH", "CHILD", "F"],
    ["PURPLE", "LARGE", "DIP", "ADULT", "F"],
    ["PURPLE", "LARGE", "DIP", "CHILD", "F"],
    ["YELLOW", "SMALL", "STRETCH", "ADULT", "T"],
    ["YELLOW", "SMALL", "STRETCH", "CHILD", "T"],
    ["YELLOW", "SMALL", "DIP", "ADULT", "T"],
    ["YELLOW", "SMALL", "DIP", "CHILD", "T"],
];

/// Balloons with text-valued columns `color, size, act, age`.
pub fn balloons() -> RawDataset {
    let names = ["color", "size", "act", "age"];
    let columns = (0..4)
        .map(|j| RawColumn::Discrete(BALLOONS_ROWS.iter().map(|r| r[j].to_string()).collect()))
        .collect();
    RawDataset::new(
        names.iter().map(|s| s.to_string()).collect::<Vec<String>>(),
        columns,
        "inflated".to_string(),
        BALLOONS_ROWS.iter().map(|r| r[4] == "T").collect(),
        None,
    )
    .expect("fixture is well formed")
}
