//! File formats and command reports behind the `phigamma` binary.

pub mod commands;
pub mod formats;
