#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod cli;
pub mod contact;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod field;
pub mod legendrian;
pub mod maps;
pub mod numeric;
pub mod report;
pub mod sampling;
pub mod suites;
pub mod thermo;

pub use error::{Error, Result};
pub use field::ScalarField;
pub use report::VerificationReport;
