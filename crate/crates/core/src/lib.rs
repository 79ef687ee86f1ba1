//! Online stable matching ("stable secretaries").
//!
//! Girls are static positions known in advance; boys arrive one at a time in a
//! hidden order and the decision maker only learns each arrival's rank relative
//! to the boys seen so far. Every assignment is irrevocable. Outcomes are scored
//! by how many individuals (or matched pairs) do not take part in a blocking pair.
//!
//! Preferences are implicit: girl `1` and boy `1` are the most preferred, and so
//! on down to the last index.
//!
//! The crate is `no_std` (it needs `alloc`). IO, the experiment harness and the
//! CLI live in the `stabsec` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod algorithms;
pub mod analysis;
mod error;
pub mod model;
pub mod online;
pub mod order;

pub use error::{Error, Result};
pub use model::{
    blocking_pairs, evaluate_satisfaction, optimum_value, satisfaction, stable_matching, transpose_instance,
    transpose_matching, Criterion, Instance, Matching, Satisfaction, SatisfactionReport,
};
