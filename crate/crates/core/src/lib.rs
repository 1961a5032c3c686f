pub mod arith;
pub mod construction;
pub mod corpus;
pub mod error;
pub mod filtered;
pub mod linalg;
pub mod local_fields;
pub mod membership;
pub mod robba;
pub mod selftest;

pub use error::{Error, Result};
