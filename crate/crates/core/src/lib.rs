//! Sequential complexity measures for online learning: trees, function
//! classes, sequential dimensions and covers, sequential Rademacher
//! complexity, minimax values of finite online games and the learners that
//! attain them.

pub mod classes;
pub mod complexity;
pub mod covers;
pub mod error;
pub mod games;
pub mod harness;
pub mod learners;
pub mod rational;
pub mod shattering;
pub mod tailbounds;
pub mod trees;

pub use error::{Error, Result};
