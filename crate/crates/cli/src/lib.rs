//! Batch front end for the adaptive solver: config files, the mesh text
//! format, and machine-readable convergence history.

#![forbid(unsafe_code)]

pub mod config;
pub mod meshio;
pub mod runner;

pub use config::{parse_config, ConfigError, RunConfig};
pub use meshio::{parse_mesh, write_mesh, MeshIoError};
pub use runner::{execute, format_verify_block, write_history_csv, CliError, RunArtifacts};
