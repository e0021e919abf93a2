//! Dental age estimation with uncertainty-aware reliability and bilingual
//! natural-language reports.

pub mod controller;
pub mod domain;
pub mod error;
pub mod estimate;
pub mod nlg;
pub mod reliability;
pub mod store;
pub mod surrogate;

pub use error::{Error, Result};
