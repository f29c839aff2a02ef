//! Command-line tools and an HTTP/JSON service around `formation_core`.
//!
//! The CLI and the HTTP handlers share [`analysis::analyze`] and
//! [`pipeline::run_assessment`], so both surfaces return the same payloads.

pub mod analysis;
pub mod cli;
pub mod edits;
pub mod error;
pub mod http;
pub mod pipeline;
pub mod store;

pub use error::{ServiceError, ServiceResult};
pub use store::Store;
