//! Shared helpers for integration tests and the acceptance runner.
#![allow(dead_code)]

pub mod checks;
pub mod corpus;
pub mod fixtures;
