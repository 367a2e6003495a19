//! File formats and command line for the `wcapos_core` learner: delimited
//! table loading, text reports, Graphviz and JSON export.

pub mod cli;
pub mod dataset;
pub mod dot;
pub mod json;
pub mod report;
