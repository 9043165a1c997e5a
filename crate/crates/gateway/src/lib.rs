//! Command line and HTTP/JSON access to process models, live instances and
//! analyses.

pub mod cli;
pub mod http;
pub mod store;
pub mod views;

pub use store::{SessionStore, Snapshot, StoreError};
