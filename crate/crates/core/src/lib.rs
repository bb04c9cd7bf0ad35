#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod alt_series;
pub mod args;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod laguerre_series;
pub mod oracle;
pub mod reference;
pub mod special;
pub mod sum;

pub use args::{EvalReport, MarcumArgs, Method, TruncationPolicy};
pub use error::{Error, Result};
