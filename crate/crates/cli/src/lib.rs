//! Command implementations behind the `iwasawa2` binary.

pub mod commands;
pub mod config;
pub mod error;
