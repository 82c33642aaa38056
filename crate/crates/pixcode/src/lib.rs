//! File formats, thread-pool execution, experiments and the command line
//! for `pixcode-core`.

pub mod bundle_io;
pub mod cli;
pub mod codebook_io;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod manifest;

pub use error::{AppError, Result};
pub use exec::RayonExecutor;
