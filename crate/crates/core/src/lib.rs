//! Three-way causal attribute partial order structures.
//!
//! Attributes of a binary decision context are scored by a causal factor
//! (how much the positive-decision rate changes when the attribute is absent
//! versus present) and its sigmoid-normalized strength. A tree is grown by
//! repeatedly splitting mixed ("boundary") object sets on the strongest
//! attribute in the current scope, until nodes fall into a positive or
//! negative region.
//!
//! The crate is `no_std` and only needs `alloc`. Parsing, file formats and
//! the command line live in the `wcapos` crate.
//!
//! ```
//! use wcapos_core::fixtures::watermelon;
//! use wcapos_core::structure::{build_structure, BuildParams};
//!
//! let ctx = watermelon();
//! let s = build_structure(&ctx, &BuildParams::default()).unwrap();
//! let root = s.root().split_attribute().unwrap();
//! assert_eq!(ctx.attribute_name(root), "clear");
//! ```

#![no_std]

extern crate alloc;

pub mod bitset;
pub mod cart;
pub mod causal;
pub mod context;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod structure;

pub use bitset::BitSet;
pub use causal::{CausalScore, Causality, Condition, NodeScope, Undefined};
pub use context::{
    BinarizationMap, BinarizeOptions, FormalDecisionContext, RawColumn, RawDataset, Rule, RuleKind,
};
pub use error::{Error, Result};
pub use eval::{EvalReport, Learner, Model, Prediction};
pub use structure::{BuildParams, Region, Structure, StructureNode};
