//! Command-line front end: JSON documents in, verdicts and documents out.

pub mod commands;
pub mod document;
pub mod error;
pub mod registry;
