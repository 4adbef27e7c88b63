//! Command-line front end: image decode/encode, run manifests, batch
//! processing and the evaluation harness.

pub mod error;
pub mod imageio;
pub mod manifest;
pub mod patterns;
pub mod report;
pub mod run;

pub use error::CliError;
pub use manifest::{Mode, RunManifest};
pub use run::run;
