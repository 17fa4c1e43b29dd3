//! Standard-library companion to `pht-core`: CSV ingestion, versioned JSON
//! documents, analysis artifacts, the `pht` command line and the HTTP
//! service.

pub mod artifact;
pub mod cli;
pub mod formats;
pub mod io;
pub mod service;
pub mod session;

pub use pht_core as core;
